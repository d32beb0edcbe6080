#pragma once

// Checkers for the infinitesimal product bounds, matrix and coalgebra versions.

#include <functional>
#include <string>

#include "qlevy/partition.hpp"
#include "qlevy/subcoalg.hpp"

namespace qlevy {

/// Right-hand side of the Banach-algebra product bound:
/// mesh (t-s) e^{(t-s) max(|G|, C)} (C^2 + |G|^2 e^{mesh |G|}) / 2.
double product_bound(double mesh, double length, double normG, double C);

/// A_r^(mu) = I + r G + S_r^(mu) with |S_r^(mu)| <= r^2 C^2 / 2 for r <= R.
struct MatrixFamily {
  CMatrix G;
  std::function<CMatrix(double r, std::size_t mu)> remainder;
  std::size_t muCount = 1;
  double R = 1.0;
  double C = 0.0;
};

/// G with iid complex Gaussian entries scaled by gScale; S_r^(mu) = r^2 C^2/2 E_mu
/// with E_mu random of unit operator norm.
MatrixFamily random_matrix_family(std::size_t dim, std::size_t muCount, double gScale, double C, double R,
                                  std::mt19937_64& rng);
/// Zero remainders.
MatrixFamily exact_matrix_family(CMatrix G, double R);

/// Largest singular value.
double operator_norm(const CMatrix& M);

/// max over sampled r in (0, R] and mu of |S_r^(mu)| / (r^2 C^2 / 2); <= 1 when the family is valid.
double family_remainder_ratio(const MatrixFamily& f, std::size_t samples);

struct BanachProductReport {
  double maxLhs = 0.0;
  double bound = 0.0;
  double mesh = 0.0;
  double normG = 0.0;
  std::size_t draws = 0;
  bool pass = false;
};

/// Throws MeshTooCoarse if mesh > R.
BanachProductReport banach_product_check(const MatrixFamily& f, const Partition& alpha, std::size_t draws,
                                         std::mt19937_64& rng);

/// f_r^(mu) = delta + r psi + R_r^(mu).
struct FunctionalFamily {
  std::string name;
  LinearFunctional psi;
  std::function<LinearFunctional(double r, std::size_t mu)> member;
  std::size_t muCount = 1;
  double R = 1.0;
};

/// f_r = delta + r psi for every mu.
FunctionalFamily linear_family(const LinearFunctional& psi, const BialgebraPtr& B, double R);
/// f_r = exp(r psi), the true convolution semigroup.
FunctionalFamily semigroup_family(const LinearFunctional& psi, const BialgebraPtr& B, double R);
/// mu = 0 linear, mu = 1 semigroup.
FunctionalFamily mixed_family(const LinearFunctional& psi, const BialgebraPtr& B, double R);

struct CoalgebraProductReport {
  cplx product;
  cplx target;
  double lhs = 0.0;
  double bound = 0.0;
  std::size_t dim = 0;
  double normG = 0.0;
  double C = 0.0;
  double normDelta = 0.0;
  double normC = 0.0;
  double Cc = 0.0;
  double PsiC = 0.0;
  bool pass = false;
};

/// |f^(mu_1)_{t_1-t_0} * ... * f^(mu_n)_{t_n-t_{n-1}}(p) - exp((t-s) psi)(p)| against the bound with
/// C_c = C sqrt(s), Psi_c = |G| sqrt(s), s = max(1, |delta| |p|), norms in max-abs coordinates on the
/// subcoalgebra of p. C is sampled from the remainders over r in (0, R] and the partition lengths.
CoalgebraProductReport coalgebra_product_check(const FunctionalFamily& f, const NcPoly& p, const BialgebraSpec& B,
                                               const Partition& alpha, std::mt19937_64& rng,
                                               std::size_t dimCap = kDefaultDimCap);

}  // namespace qlevy
