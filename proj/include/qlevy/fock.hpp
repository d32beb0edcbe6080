#pragma once

// Truncated Boson Fock space: one factor per partition interval, vectors and
// operators kept as sums of elementary tensors over the factors.

#include <Eigen/Sparse>
#include <variant>

#include "qlevy/gns.hpp"
#include "qlevy/gram.hpp"

namespace qlevy {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

/// Occupation tuples (n_1..n_m) with sum <= N, ordered by total then lexicographically.
class FockFactor {
 public:
  FockFactor(std::size_t modeDim, std::size_t particleCap);

  std::size_t modes() const { return m_; }
  std::size_t cap() const { return N_; }
  std::size_t dim() const { return basis_.size(); }
  const std::vector<std::vector<std::size_t>>& basis() const { return basis_; }
  std::size_t particles(std::size_t i) const;
  /// Index of an occupation tuple; throws InvalidParameter if absent.
  std::size_t index(const std::vector<std::size_t>& occ) const;

  CVector vacuum() const;
  /// a_j^* truncated at the cap, and a_j.
  const SparseMatrix& raise(std::size_t j) const { return raise_.at(j); }
  const SparseMatrix& lower(std::size_t j) const { return lower_.at(j); }
  SparseMatrix identity() const;
  /// Projection onto states with at most k particles.
  SparseMatrix projector(std::size_t k) const;

 private:
  std::size_t m_, N_;
  std::vector<std::vector<std::size_t>> basis_;
  std::map<std::vector<std::size_t>, std::size_t> index_;
  std::vector<SparseMatrix> raise_, lower_;
};

enum class NoiseKind { Creation, Annihilation, Preservation };

/// Creation: sqrt(h) sum_j k_j a_j^*; annihilation: sqrt(h) sum_j conj(k_j) a_j;
/// preservation: sum_jl T_jl a_j^* a_l (no time factor). Throws DimensionMismatch.
SparseMatrix noise_matrix(NoiseKind kind, const std::variant<CVector, CMatrix>& arg, double h, const FockFactor& f);

/// Sum of elementary vectors over a partition; table entries are per-factor vectors.
struct FactorizedFockVector {
  Partition partition;
  std::vector<CVector> table;
  TupleSum terms;

  static FactorizedFockVector vacuum(const Partition& p, const FockFactor& f);
  std::size_t size() const { return terms.size(); }
};

cplx inner(const FactorizedFockVector& u, const FactorizedFockVector& v);
/// u + c v on the same partition.
FactorizedFockVector add(const FactorizedFockVector& u, const FactorizedFockVector& v, cplx c = 1.0);

/// Sum of elementary tensors of per-factor matrices; table entry 0 is the identity.
struct FockOperator {
  Partition partition;
  std::vector<SparseMatrix> table;
  TupleSum terms;

  /// A single-factor operator acting on interval i of p, identity elsewhere.
  static FockOperator local(const Partition& p, std::size_t i, const SparseMatrix& a, const FockFactor& f);
  FactorizedFockVector apply(const FactorizedFockVector& v, std::size_t budget = kExpansionBudget) const;
  FactorizedFockVector apply_vacuum(const FockFactor& f) const;
  std::size_t size() const { return terms.size(); }
};

/// Operator sum with coefficients (same partition).
FockOperator add(const FockOperator& a, const FockOperator& b, cplx c = 1.0);
/// a b (apply b first).
FockOperator compose(const FockOperator& a, const FockOperator& b, std::size_t budget = kExpansionBudget);

FockOperator quantum_noise_op(NoiseKind kind, const std::variant<CVector, CMatrix>& arg, double s, double t,
                              const FockFactor& f);

/// sum_{p > N} x^p / p!.
double exp_tail(double x, std::size_t N);

/// sum_{p<=N} (sqrt(h) k.a^*)^p / p! Omega on each interval of the partition.
/// Throws TailBoundExceeded if |k|^2 h > ln(10) N / 3 or the predicted
/// truncation error of the squared norm exceeds 1e-6.
FactorizedFockVector exponential_vector(const CVector& k, const Partition& p, const FockFactor& f);
/// Tail bound of |<E(f),E(g)>_trunc - exp(<f,g>)| for the factorized vectors.
double exponential_tail_bound(const CVector& f, const CVector& g, const Partition& p, std::size_t N);

/// I_h(b) = delta(b) + A(eta(b*)) + Lambda(rho(b) - delta(b)) + A^*(eta(b)) + psi(b - delta(b)) h.
SparseMatrix generator_matrix(const LevyTriple& t, const NcPoly& b, double h, const FockFactor& f);
FockOperator generator_process(const LevyTriple& t, const NcPoly& b, double s, double u, const FockFactor& f);

/// sum over Delta_n(b) legs of (x)_i I_{t_{i-1},t_i}(leg_i). Throws TermBudgetExceeded.
FockOperator convolution_product_process(const LevyTriple& t, const NcPoly& b, const Partition& p,
                                         const FockFactor& f, std::size_t budget = kExpansionBudget);

/// Exact increments of a group-like g: (x)_i exp(h_i psi(g)) E(eta(g) 1_{I_i}).
FactorizedFockVector grouplike_product_vector(const LevyTriple& t, const NcPoly& g, const Partition& p,
                                              const FockFactor& f);

/// max |lambda| of a Hermitian matrix.
double hermitian_spectral_radius(const CMatrix& H);

struct ProductEvolution {
  /// <Omega, U Omega> as a d x d matrix.
  CMatrix vacuumBlock;
  /// |P(U^* U - I)P|, P onto states with at most one particle per interval and
  /// at most defectParticles in total.
  double unitarityDefect = 0.0;
  std::size_t defectParticles = 0;
  std::size_t defectDim = 0;
};

/// U = I_{t0,t1} ... I_{t_{n-1},t_n} with (I_{s,t})_ij the generator process of x_ij.
/// The compressed U^* U is assembled exactly from per-factor transfer matrices.
ProductEvolution unitary_product_evolution(const LevyTriple& t, int d, const Partition& p, const FockFactor& f,
                                           std::size_t defectParticles);
/// Largest k whose defect subspace over the partition has d * dim <= maxDim.
std::size_t feasible_defect_particles(const FockFactor& f, std::size_t intervals, int d, std::size_t maxDim = 2500);

struct AzemaWienerReport {
  double q = 1.0;
  std::size_t n = 0;
  double mesh = 0.0;
  /// |(sum_j Z_j) Omega|^2 and |Z_t Omega|^2 (Azema structure over Wiener increments).
  double wienerNormSq = 0.0;
  double azemaNormSq = 0.0;
  /// Targets exp(t psi)((x + x*)^2) under the primitive and Azema structures.
  double wienerTarget = 0.0;
  double azemaTarget = 0.0;
  /// |X_t Omega|.
  double xOmegaNorm = 0.0;
  /// max over test vectors of |(X_{t+h} - X_t - (q-1) X_t Lambda(1) - A(1)) Omega'|.
  double qsdeResidual = 0.0;
};

AzemaWienerReport azema_wiener_experiment(double q, const Partition& p, std::size_t cap);

}  // namespace qlevy
