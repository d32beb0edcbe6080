#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <random>

#include "qlevy/error.hpp"
#include "qlevy/fock.hpp"

using namespace qlevy;

namespace {

const AzemaModel& az() {
  static AzemaModel m = make_azema(2.0);
  return m;
}

NcPoly P(std::string_view s) { return parse_poly(s, az().azema->algebra()); }

double dist(const SparseMatrix& a, const SparseMatrix& b) { return CMatrix(a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("basis ordering and dimension") {
  const FockFactor f(2, 3);
  CHECK(f.dim() == 10);
  CHECK(f.particles(0) == 0);
  for (std::size_t i = 1; i < f.dim(); ++i) CHECK(f.particles(i - 1) <= f.particles(i));
  CHECK(f.index({1, 2}) < f.dim());
  CHECK_THROWS_AS(f.index({2, 2}), InvalidParameter);
}

TEST_CASE("ladder operators") {
  const FockFactor f(2, 4);
  const SparseMatrix below = f.projector(3);
  for (std::size_t j = 0; j < 2; ++j) {
    // a_j Omega = 0, a_j^* Omega = |e_j>
    CHECK(CVector(f.lower(j) * f.vacuum()).norm() == 0.0);
    std::vector<std::size_t> occ(2, 0);
    occ[j] = 1;
    CHECK(std::abs(CVector(f.raise(j) * f.vacuum())(f.index(occ)) - 1.0) < 1e-15);
    CHECK(dist(f.lower(j), SparseMatrix(f.raise(j).adjoint())) == 0.0);
    for (std::size_t l = 0; l < 2; ++l) {
      // [a_j, a_l^*] = delta_jl below the cap
      SparseMatrix comm = f.lower(j) * f.raise(l) - f.raise(l) * f.lower(j);
      SparseMatrix want = (j == l) ? f.identity() : SparseMatrix(f.dim(), f.dim());
      CHECK(dist(SparseMatrix(below * comm * below), SparseMatrix(below * want * below)) < 1e-14);
    }
  }
}

TEST_CASE("noise operator adjoints and dimension checks") {
  const FockFactor f(2, 3);
  CVector k(2);
  k << cplx(1, 2), cplx(-0.5, 0.3);
  CHECK(dist(noise_matrix(NoiseKind::Annihilation, k, 0.3, f),
             SparseMatrix(noise_matrix(NoiseKind::Creation, k, 0.3, f).adjoint())) < 1e-15);
  CMatrix T(2, 2);
  T << 1, cplx(0, 1), 2, 3;
  CHECK(dist(noise_matrix(NoiseKind::Preservation, CMatrix(T.adjoint()), 0.3, f),
             SparseMatrix(noise_matrix(NoiseKind::Preservation, T, 0.3, f).adjoint())) < 1e-14);
  CHECK_THROWS_AS(noise_matrix(NoiseKind::Creation, CVector(CVector::Ones(3)), 1.0, f), DimensionMismatch);
  CHECK_THROWS_AS(noise_matrix(NoiseKind::Preservation, CVector(CVector::Ones(2)), 1.0, f), DimensionMismatch);
}

TEST_CASE("exponential vectors") {
  const FockFactor f1(1, 10);
  const Partition unit({0.0, 1.0});
  const CVector zero = CVector::Zero(1), one = CVector::Ones(1), two = CVector::Constant(1, 2.0);
  const FactorizedFockVector e0 = exponential_vector(zero, unit, f1);
  const FactorizedFockVector om = FactorizedFockVector::vacuum(unit, f1);
  CHECK(std::abs(inner(e0, om) - 1.0) < 1e-15);
  CHECK(std::abs(inner(e0, e0) - 1.0) < 1e-15);
  const FactorizedFockVector e1 = exponential_vector(one, unit, f1);
  CHECK(std::abs(inner(e1, e1) - std::exp(1.0)) < 3e-8);
  CHECK(exponential_tail_bound(one, one, unit, 10) < 3e-8);

  // <E(1), E(2)> = e^2 within the bound; N chosen so the tail is below 1e-6
  const FockFactor f2(1, 24);
  const FactorizedFockVector a = exponential_vector(one, unit, f2), b = exponential_vector(two, unit, f2);
  CHECK(std::abs(inner(a, b) - std::exp(2.0)) <= exponential_tail_bound(one, two, unit, 24) * (1 + 1e-9) + 1e-13);

  // factorized over several intervals
  const Partition p = Partition::uniform(0.0, 1.0, 3);
  const FactorizedFockVector c = exponential_vector(one, p, f1), d = exponential_vector(two, p, f2);
  CHECK(std::abs(inner(c, c) - std::exp(1.0)) <= exponential_tail_bound(one, one, p, 10) + 1e-13);
  CHECK_THROWS_AS(exponential_vector(CVector::Constant(1, 10.0), unit, f1), TailBoundExceeded);
}

TEST_CASE("operators on factorized vectors") {
  const FockFactor f(1, 6);
  const Partition p = Partition::uniform(0.0, 1.0, 3);
  const CVector one = CVector::Ones(1);
  const SparseMatrix cr = noise_matrix(NoiseKind::Creation, one, 1.0, f);
  const FockOperator a0 = FockOperator::local(p, 0, cr, f), a2 = FockOperator::local(p, 2, cr, f);
  const FactorizedFockVector om = FactorizedFockVector::vacuum(p, f);
  const FactorizedFockVector u = a0.apply(om), v = add(a0, a2).apply(om);
  CHECK(std::abs(inner(u, u) - 1.0) < 1e-15);
  CHECK(std::abs(inner(v, v) - 2.0) < 1e-15);
  CHECK(std::abs(inner(u, om)) < 1e-15);
  const FactorizedFockVector w = compose(a0, a0).apply(om);
  CHECK(std::abs(inner(w, w) - 2.0) < 1e-14);
  CHECK(std::abs(inner(add(u, u, -1.0), add(u, u, -1.0))) < 1e-15);
  CHECK_THROWS_AS(inner(u, FactorizedFockVector::vacuum(Partition::uniform(0.0, 1.0, 2), f)), InvalidParameter);
}

TEST_CASE("generator matrices of the Azema triple") {
  const LevyTriple tr = azema_triple(az());
  const FockFactor f(1, 5);
  const double h = 0.3, q = 2.0;
  CHECK(dist(generator_matrix(tr, NcPoly::unit(), h, f), f.identity()) < 1e-15);
  const SparseMatrix lam = noise_matrix(NoiseKind::Preservation, CMatrix(CMatrix::Ones(1, 1)), h, f);
  const SparseMatrix Y = generator_matrix(tr, P("y"), h, f);
  CHECK(dist(Y, SparseMatrix(f.identity() + (q - 1.0) * lam)) < 1e-14);
  // 1 + (q - 1) k on |k>, which is q^k for k <= 1
  for (std::size_t k = 0; k <= 5; ++k) CHECK(std::abs(CMatrix(Y)(k, k) - (1.0 + (q - 1.0) * double(k))) < 1e-12);
  // one particle in each of k factors: the product of Y's gives q^k
  const Partition p = Partition::uniform(0.0, 1.0, 3);
  FockOperator prodY = generator_process(tr, P("y"), 0.0, 1.0, f);
  prodY.partition = p;
  prodY.table = {f.identity(), Y};
  prodY.terms = {{{1, 1, 1}, 1.0}};
  const SparseMatrix cr = noise_matrix(NoiseKind::Creation, CVector(CVector::Ones(1)), 1.0, f);
  FactorizedFockVector w = FactorizedFockVector::vacuum(p, f);
  for (std::size_t i = 0; i < 3; ++i) w = FockOperator::local(p, i, cr, f).apply(w);
  CHECK(std::abs(inner(w, prodY.apply(w)) - std::pow(q, 3.0)) < 1e-12);
  CHECK(dist(generator_matrix(tr, P("x"), h, f), noise_matrix(NoiseKind::Annihilation, CVector(CVector::Ones(1)), h, f)) <
        1e-15);
  // <Omega, I_h(b) Omega> = delta(b) + h psi(b - delta(b))
  for (const char* s : {"x x^*", "x x^* y^2", "x^* x", "y + 3 x x^*", "1 + y^3"}) {
    const NcPoly b = P(s);
    const cplx d = az().azema->counit(az().azema->algebra().normal_form(b));
    CHECK(std::abs(CMatrix(generator_matrix(tr, b, h, f))(0, 0) - (d + h * az().psi(b - d * NcPoly::unit()))) < 1e-14);
  }
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const NcPoly b = random_poly(az().azema->algebra(), 4, 4, rng);
    const cplx d = az().azema->counit(az().azema->algebra().normal_form(b));
    CHECK(std::abs(CMatrix(generator_matrix(tr, b, h, f))(0, 0) - (d + h * az().psi(b - d * NcPoly::unit()))) <
          1e-12 * (1.0 + std::abs(d)));
  }
  CHECK_THROWS_AS(generator_matrix(tr, P("x"), h, FockFactor(2, 3)), DimensionMismatch);
}

TEST_CASE("convolution products of generators") {
  const LevyTriple tr = azema_triple(az());
  const FockFactor f(1, 6);
  const AlgebraSpec& alg = az().azema->algebra();
  for (const char* s : {"x", "x x^*", "x^* y"}) {
    const NcPoly b = P(s);
    // vacuum expectation is the convolution of (delta + h psi) over the pieces
    const Partition p = Partition::uniform(0.0, 1.0, 4);
    const SweedlerExpansion e = iterated_coproduct(alg.normal_form(b), 4, *az().azema);
    cplx want = 0.0;
    for (const auto& [legs, c] : e.terms) {
      cplx prod = c;
      for (const Word& w : legs) {
        const NcPoly l = NcPoly::monomial(w);
        const cplx d = az().azema->counit(l);
        prod *= d + 0.25 * az().psi(l - d * NcPoly::unit());
      }
      want += prod;
    }
    const FactorizedFockVector v = convolution_product_process(tr, b, p, f).apply_vacuum(f);
    CHECK(std::abs(inner(FactorizedFockVector::vacuum(p, f), v) - want) < 1e-13);
  }
  // Delta_2(x) legs: I_1(x) (x) I_2(y) + 1 (x) I_2(x)
  {
    const Partition p2 = Partition::uniform(0.0, 1.0, 2);
    const FockOperator op = convolution_product_process(tr, P("x"), p2, f);
    FockOperator want = add(compose(FockOperator::local(p2, 0, generator_matrix(tr, P("x"), 0.5, f), f),
                                    FockOperator::local(p2, 1, generator_matrix(tr, P("y"), 0.5, f), f)),
                            FockOperator::local(p2, 1, generator_matrix(tr, P("x"), 0.5, f), f));
    CHECK(op.size() == 2);
    FactorizedFockVector w = FactorizedFockVector::vacuum(p2, f);
    const SparseMatrix cr = noise_matrix(NoiseKind::Creation, CVector(CVector::Ones(1)), 1.0, f);
    w = FockOperator::local(p2, 1, cr, f).apply(FockOperator::local(p2, 0, cr, f).apply(w));
    const FactorizedFockVector diff = add(op.apply(w), want.apply(w), -1.0);
    CHECK(std::abs(inner(diff, diff)) < 1e-26);
    CHECK(std::abs(inner(op.apply(w), op.apply(w))) > 0.1);
  }
  // x x^* on the vacuum: first-order increments are exact
  const Partition p = Partition::uniform(0.0, 1.0, 8);
  const FactorizedFockVector v = convolution_product_process(tr, P("x x^*"), p, f).apply_vacuum(f);
  CHECK(std::abs(inner(FactorizedFockVector::vacuum(p, f), v) - conv_exp(az().psi, 1.0, P("x x^*"), *az().azema)) <
        1e-13);
}

TEST_CASE("group-like increments") {
  const LevyTriple tr = azema_triple(az());
  const FockFactor f(1, 12);
  const Partition p = Partition::uniform(0.0, 1.0, 4);
  // y is group-like with eta(y) = 0
  const FactorizedFockVector v = grouplike_product_vector(tr, P("y"), p, f);
  CHECK(std::abs(inner(v, v) - 1.0) < 1e-14);
  CHECK_THROWS_AS(grouplike_product_vector(tr, P("x"), p, f), InvalidParameter);
}

TEST_CASE("unitary product evolution") {
  const BialgebraPtr U1 = make_unitary_bialgebra(1), U2 = make_unitary_bialgebra(2);
  SUBCASE("trivial triple") {
    UnitaryTripleParams par;
    par.d = 2;
    par.W = CMatrix::Identity(2, 2);
    par.L.assign(2, std::vector<CVector>(2, CVector::Zero(1)));
    par.H = CMatrix::Zero(2, 2);
    const LevyTriple tr = unitary_triple(par, U2);
    const FockFactor f(1, 3);
    const ProductEvolution r = unitary_product_evolution(tr, 2, Partition::uniform(0.0, 1.0, 4), f, 2);
    CHECK((r.vacuumBlock - CMatrix::Identity(2, 2)).norm() < 1e-14);
    CHECK(r.unitarityDefect < 1e-14);
  }
  SUBCASE("d = 1 vacuum block") {
    std::mt19937_64 rng(7);
    const UnitaryTripleParams par = random_unitary_params(1, 1, rng);
    const LevyTriple tr = unitary_triple(par, U1);
    const FockFactor f(1, 4);
    const cplx psi = tr.psi()(NcPoly::monomial({unitary_x(1, 0, 0)}));
    for (std::size_t n : {4, 16}) {
      const ProductEvolution r = unitary_product_evolution(tr, 1, Partition::uniform(0.0, 1.0, n), f, 2);
      CHECK(std::abs(r.vacuumBlock(0, 0) - std::pow(1.0 + psi / double(n), double(n))) < 1e-12);
    }
  }
  SUBCASE("d = 2 defect decreases with the mesh") {
    std::mt19937_64 rng(20080131);
    const UnitaryTripleParams par = random_unitary_params(2, 1, rng, 0.5);
    const LevyTriple tr = unitary_triple(par, U2);
    const FockFactor f(1, 3);
    double prev = 1e300;
    for (std::size_t n : {2, 4, 8}) {
      const ProductEvolution r = unitary_product_evolution(tr, 2, Partition::uniform(0.0, 1.0, n), f, 2);
      MESSAGE(n, " ", r.unitarityDefect, " dim ", r.defectDim);
      CHECK(r.unitarityDefect < prev);
      prev = r.unitarityDefect;
    }
  }
  SUBCASE("d = 2, |L| <= 0.5, N = 6: finer mesh has smaller defect") {
    std::mt19937_64 rng(20080131);
    UnitaryTripleParams par = random_unitary_params(2, 1, rng, 1.0);
    for (auto& row : par.L)
      for (auto& l : row) l *= 0.5 / std::max(0.5, l.norm());
    const LevyTriple tr = unitary_triple(par, U2);
    const FockFactor f(1, 6);
    const std::size_t K = feasible_defect_particles(f, 32, 2);
    const double d4 = unitary_product_evolution(tr, 2, Partition::uniform(0.0, 1.0, 4), f, K).unitarityDefect;
    const double d32 = unitary_product_evolution(tr, 2, Partition::uniform(0.0, 1.0, 32), f, K).unitarityDefect;
    CHECK(d32 < d4);
  }
  SUBCASE("defect is first order in t") {
    std::mt19937_64 rng(3);
    const LevyTriple tr = unitary_triple(random_unitary_params(2, 1, rng), U2);
    const FockFactor f(1, 3);
    const double a = unitary_product_evolution(tr, 2, Partition::uniform(0.0, 1e-2, 2), f, 2).unitarityDefect;
    const double b = unitary_product_evolution(tr, 2, Partition::uniform(0.0, 1e-3, 2), f, 2).unitarityDefect;
    CHECK(b < 0.2 * a);
    CHECK(b < 0.1);
  }
  CHECK(feasible_defect_particles(FockFactor(1, 8), 32, 1) == 2);
  CHECK(feasible_defect_particles(FockFactor(1, 8), 64, 2) == 1);
}

TEST_CASE("spectral radius: Lanczos against the dense solver") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int n : {50, 400}) {
    CMatrix A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = cplx(g(rng), g(rng));
    const CMatrix H = A + A.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H, Eigen::EigenvaluesOnly);
    const double want = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(std::abs(hermitian_spectral_radius(H) - want) < 1e-9 * want);
  }
}

TEST_CASE("Azema from Wiener increments") {
  for (double q : {1.0, 0.5, 2.0}) {
    const AzemaWienerReport r = azema_wiener_experiment(q, Partition::uniform(0.0, 1.0, 6), 4);
    CHECK(r.xOmegaNorm < 1e-14);
    CHECK(std::abs(r.wienerNormSq - r.wienerTarget) < 1e-12);
    CHECK(std::abs(r.azemaNormSq - r.azemaTarget) < 1e-12);
    CHECK(std::abs(r.wienerTarget - 1.0) < 1e-14);
    CHECK(r.qsdeResidual < 1e-12);
  }
}
