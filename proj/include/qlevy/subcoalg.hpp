#pragma once

// Finite-dimensional subcoalgebras, transfer matrices T(psi) = (id (x) psi) Delta
// and convolution exponentials.

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "qlevy/bialg.hpp"

namespace qlevy {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr std::size_t kDefaultDimCap = 512;
inline constexpr double kPivotTolerance = 1e-10;

/// Smallest Delta-closed span containing a seed. The basis is kept fully
/// reduced: basis[i] has coefficient 1 on pivot[i] and 0 on every other pivot,
/// so coordinates of a member are its coefficients on the pivot words.
class Subcoalgebra {
 public:
  Subcoalgebra(const BialgebraSpec& B, std::size_t dimCap);

  /// Adds p and closes under left/right Sweedler legs. Throws DimCapExceeded.
  void absorb(const NcPoly& p);

  std::size_t dim() const { return basis_.size(); }
  const std::vector<NcPoly>& basis() const { return basis_; }
  const std::vector<Word>& pivots() const { return pivots_; }
  const BialgebraSpec& bialgebra() const { return *B_; }

  /// Delta b_i = sum_jk c(i)(j,k) b_j (x) b_k.
  const std::vector<CMatrix>& delta_constants() const;
  const CVector& counit_vector() const;

  /// Throws InvalidParameter if p is not in the span (residual > 1e-9 relative).
  CVector coords(const NcPoly& p) const;
  bool contains(const NcPoly& p, double tol = 1e-9) const;
  NcPoly element(const CVector& c) const;
  /// max over basis of |Delta b_i - sum c b_j (x) b_k|, relative.
  double closure_residual() const;

 private:
  bool insert(NcPoly v);
  void build_constants() const;

  const BialgebraSpec* B_;
  std::size_t dimCap_;
  std::vector<NcPoly> basis_;
  std::vector<Word> pivots_;
  std::map<Word, std::size_t, DegLex> pivotIndex_;
  mutable std::vector<CMatrix> constants_;
  mutable CVector counit_;
  mutable bool built_ = false;
};

Subcoalgebra subcoalgebra_of(const NcPoly& p, const BialgebraSpec& B, std::size_t dimCap = kDefaultDimCap);

struct TransferMatrix {
  CMatrix matrix;
  LinearFunctional functional;
};

TransferMatrix transfer_matrix(const LinearFunctional& psi, const Subcoalgebra& sub);

/// delta o exp(t T(psi)) (p).
cplx conv_exp(const LinearFunctional& psi, double t, const NcPoly& p, const BialgebraSpec& B,
              std::size_t dimCap = kDefaultDimCap);
/// Same on a subcoalgebra already containing p.
cplx conv_exp(const LinearFunctional& psi, double t, const NcPoly& p, const Subcoalgebra& sub);

struct SeriesResult {
  cplx value;
  std::size_t terms = 0;
};

/// sum_n t^n psi^{*n}(p)/n! by repeated slicing in the algebra; stops when the
/// remainder polynomial vanishes or three successive increments are < tol.
/// Throws NonConvergence after 64 terms.
SeriesResult conv_exp_series(const LinearFunctional& psi, double t, const NcPoly& p, const BialgebraSpec& B,
                             double tol = 1e-14);

/// phi_t = delta o exp(t T(psi)) as a functional (memoized per word).
LinearFunctional conv_exp_functional(const LinearFunctional& psi, double t, const BialgebraPtr& B);

}  // namespace qlevy
