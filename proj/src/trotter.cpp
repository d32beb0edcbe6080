#include "qlevy/trotter.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <memory>

#include "qlevy/error.hpp"

namespace qlevy {

double product_bound(double mesh, double length, double normG, double C) {
  return mesh * length * std::exp(length * std::max(normG, C)) * (C * C + normG * normG * std::exp(mesh * normG)) /
         2.0;
}

double operator_norm(const CMatrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(M);
  return svd.singularValues()(0);
}

namespace {

CMatrix gaussian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix M(n, n);
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) M(i, j) = cplx(g(rng), g(rng));
  return M;
}

// operator norm for the max-abs coordinate norm
double row_sum_norm(const CMatrix& M) {
  if (M.size() == 0) return 0.0;
  return M.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

MatrixFamily random_matrix_family(std::size_t dim, std::size_t muCount, double gScale, double C, double R,
                                  std::mt19937_64& rng) {
  if (dim < 1 || muCount < 1) throw InvalidParameter("matrix family needs dim >= 1 and at least one member");
  MatrixFamily f;
  f.G = gScale * gaussian(dim, rng);
  auto E = std::make_shared<std::vector<CMatrix>>();
  for (std::size_t m = 0; m < muCount; ++m) {
    CMatrix e = gaussian(dim, rng);
    E->push_back(e / operator_norm(e));
  }
  f.remainder = [E, C](double r, std::size_t mu) -> CMatrix { return (r * r * C * C / 2.0) * E->at(mu); };
  f.muCount = muCount;
  f.R = R;
  f.C = C;
  return f;
}

MatrixFamily exact_matrix_family(CMatrix G, double R) {
  MatrixFamily f;
  const auto n = G.rows();
  f.G = std::move(G);
  f.remainder = [n](double, std::size_t) -> CMatrix { return CMatrix::Zero(n, n); };
  f.R = R;
  f.C = 0.0;
  return f;
}

double family_remainder_ratio(const MatrixFamily& f, std::size_t samples) {
  double worst = 0.0;
  for (std::size_t k = 1; k <= samples; ++k) {
    const double r = f.R * static_cast<double>(k) / static_cast<double>(samples);
    for (std::size_t mu = 0; mu < f.muCount; ++mu) {
      const double n = operator_norm(f.remainder(r, mu));
      if (n == 0.0) continue;
      const double cap = r * r * f.C * f.C / 2.0;
      worst = std::max(worst, cap > 0.0 ? n / cap : INFINITY);
    }
  }
  return worst;
}

BanachProductReport banach_product_check(const MatrixFamily& f, const Partition& alpha, std::size_t draws,
                                         std::mt19937_64& rng) {
  BanachProductReport rep;
  rep.mesh = alpha.mesh();
  if (rep.mesh > f.R) throw MeshTooCoarse("partition mesh exceeds R");
  const double len = alpha.end() - alpha.start();
  const auto n = f.G.rows();
  const CMatrix I = CMatrix::Identity(n, n);
  const CMatrix target = (len * f.G).exp();
  rep.normG = operator_norm(f.G);
  rep.bound = product_bound(rep.mesh, len, rep.normG, f.C);
  std::uniform_int_distribution<std::size_t> pick(0, f.muCount - 1);
  for (std::size_t d = 0; d < draws; ++d) {
    CMatrix P = I;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const double r = alpha.length(i);
      P = P * (I + r * f.G + f.remainder(r, pick(rng)));
    }
    rep.maxLhs = std::max(rep.maxLhs, operator_norm(P - target));
  }
  rep.draws = draws;
  rep.pass = rep.maxLhs <= rep.bound + 1e-13;
  return rep;
}

// ---------------------------------------------------------------------------

FunctionalFamily linear_family(const LinearFunctional& psi, const BialgebraPtr& B, double R) {
  FunctionalFamily f;
  f.name = "linear";
  f.psi = psi;
  f.R = R;
  f.member = [psi, B](double r, std::size_t) {
    return LinearFunctional("delta+r psi", [psi, B, r](const Word& w) { return B->counit_word(w) + r * psi(w); });
  };
  return f;
}

FunctionalFamily semigroup_family(const LinearFunctional& psi, const BialgebraPtr& B, double R) {
  FunctionalFamily f;
  f.name = "semigroup";
  f.psi = psi;
  f.R = R;
  f.member = [psi, B](double r, std::size_t) { return conv_exp_functional(psi, r, B); };
  return f;
}

FunctionalFamily mixed_family(const LinearFunctional& psi, const BialgebraPtr& B, double R) {
  FunctionalFamily lin = linear_family(psi, B, R), semi = semigroup_family(psi, B, R);
  FunctionalFamily f;
  f.name = "mixed";
  f.psi = psi;
  f.R = R;
  f.muCount = 2;
  f.member = [lin, semi](double r, std::size_t mu) { return mu == 0 ? lin.member(r, 0) : semi.member(r, 0); };
  return f;
}

CoalgebraProductReport coalgebra_product_check(const FunctionalFamily& f, const NcPoly& p, const BialgebraSpec& B,
                                               const Partition& alpha, std::mt19937_64& rng, std::size_t dimCap) {
  if (alpha.mesh() > f.R) throw MeshTooCoarse("partition mesh exceeds R");
  CoalgebraProductReport rep;
  const NcPoly q = B.algebra().normal_form(p);
  const Subcoalgebra sub = subcoalgebra_of(q, B, dimCap);
  rep.dim = sub.dim();
  const double len = alpha.end() - alpha.start();
  if (rep.dim == 0) {
    rep.pass = true;
    return rep;
  }
  const CVector c = sub.coords(q);
  const CVector& eps = sub.counit_vector();
  const auto n = static_cast<Eigen::Index>(rep.dim);
  const CMatrix I = CMatrix::Identity(n, n);
  const CMatrix G = transfer_matrix(f.psi, sub).matrix;
  auto A = [&](double r, std::size_t mu) { return transfer_matrix(f.member(r, mu), sub).matrix; };

  // Remainder constant, sampled.
  std::vector<double> rs;
  for (int k = 1; k <= 16; ++k) rs.push_back(f.R * k / 16.0);
  for (std::size_t i = 0; i < alpha.size(); ++i) rs.push_back(alpha.length(i));
  double c2 = 0.0;
  for (double r : rs)
    for (std::size_t mu = 0; mu < f.muCount; ++mu)
      c2 = std::max(c2, 2.0 * row_sum_norm(A(r, mu) - I - r * G) / (r * r));
  rep.C = std::sqrt(c2);

  std::uniform_int_distribution<std::size_t> pick(0, f.muCount - 1);
  CMatrix P = I;
  for (std::size_t i = 0; i < alpha.size(); ++i) P = P * A(alpha.length(i), pick(rng));
  rep.product = eps.transpose() * (P * c);
  rep.target = eps.transpose() * ((len * G).exp() * c);
  rep.lhs = std::abs(rep.product - rep.target);

  rep.normG = row_sum_norm(G);
  rep.normDelta = eps.cwiseAbs().sum();
  rep.normC = c.cwiseAbs().maxCoeff();
  const double s = std::max(1.0, rep.normDelta * rep.normC);
  rep.Cc = rep.C * std::sqrt(s);
  rep.PsiC = rep.normG * std::sqrt(s);
  rep.bound = product_bound(alpha.mesh(), len, rep.PsiC, rep.Cc);
  rep.pass = rep.lhs <= rep.bound + 1e-13;
  return rep;
}

}  // namespace qlevy
