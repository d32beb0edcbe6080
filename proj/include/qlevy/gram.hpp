#pragma once

// Inner products of infinitesimal convolution products from vacuum Gram data
// phi_h = exp(h psi) alone, and the convergence sweeps built on them.

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qlevy/constructions.hpp"
#include "qlevy/partition.hpp"
#include "qlevy/subcoalg.hpp"

namespace qlevy {

/// Entries are normal polynomials interned process-wide.
using EntryId = std::uint32_t;
EntryId intern_entry(const NcPoly& p);
const NcPoly& entry_poly(EntryId id);

inline constexpr std::size_t kExpansionBudget = 100'000;

/// Weighted tuples: sum_s c_s e(t_s1) (x) ... (x) e(t_sn).
using TupleSum = std::map<std::vector<std::uint32_t>, cplx>;
using PairKernel = std::function<cplx(std::size_t interval, std::uint32_t a, std::uint32_t b)>;

/// sum_{s,t} conj(c_s) c_t prod_i kernel(i, t_si, t_ti), by dynamic
/// programming over suffix-shared tuples.
cplx tuple_sum_pairing(const TupleSum& u, const TupleSum& v, std::size_t n, const PairKernel& kernel);

/// sum_s c_s j_{I_1}(a_s1) Omega (x) ... (x) j_{I_n}(a_sn) Omega.
struct FactorizedVectorSum {
  Partition partition;
  TupleSum terms;

  void add(const std::vector<EntryId>& tuple, cplx c);
  void prune();
  std::size_t size() const { return terms.size(); }
};

/// One interval, one entry: j_{s,t}(b) Omega.
FactorizedVectorSum singleton_vector(const NcPoly& b, double s, double t);

/// Legs of the source's n-fold coproduct of c mapped through kappa.
FactorizedVectorSum theta_expand(const NcPoly& c, const Morphism& kappa, const Partition& alpha,
                                 std::size_t budget = kExpansionBudget);
/// Group-like source: each key b^ gives the constant tuple (b, ..., b).
FactorizedVectorSum theta_expand(const GroupLikeCarrier::Element& c, const GroupLikeCarrier& C,
                                 const Partition& alpha);
/// Legs of the induced coproduct of E(b) (computed as E per leg of Delta_n(b)),
/// mapped by kappa~ into C; each interval is then split into innerMeshFactor
/// equal pieces carrying the group-like expansion.
FactorizedVectorSum zeta_expand(const NcPoly& b, const TensorBialgebra& Tind, const GroupLikeCarrier& C,
                                const Partition& alpha, std::size_t innerMeshFactor,
                                std::size_t budget = kExpansionBudget);

/// Re-expands every entry over the pieces of gamma using Delta of B.
FactorizedVectorSum refine(const FactorizedVectorSum& u, const Partition& gamma, const BialgebraSpec& B,
                           std::size_t budget = kExpansionBudget);

/// Memoized phi_h(a* b) = exp(h psi)(a* b).
class PhiCache {
 public:
  PhiCache(LinearFunctional psi, BialgebraPtr B);
  cplx phi(double h, EntryId a, EntryId b);
  cplx phi(double h, const NcPoly& p);
  std::size_t evaluations() const { return evaluations_; }
  const BialgebraPtr& bialgebra() const { return B_; }
  const LinearFunctional& psi() const { return psi_; }

 private:
  struct Block {
    std::shared_ptr<Subcoalgebra> sub;
    CMatrix M;
    CVector coords;
    std::map<double, cplx> values;
  };
  Block& block(const NcPoly& p);

  LinearFunctional psi_;
  BialgebraPtr B_;
  std::mutex mu_;
  std::map<std::pair<EntryId, EntryId>, EntryId> products_;
  std::unordered_map<EntryId, Block> blocks_;
  std::size_t evaluations_ = 0;
  bool warned_ = false;
};

/// <u, v>: both sides refined to the common refinement, then a product kernel
/// over intervals summed by dynamic programming over suffix-shared expansions.
cplx gram(const FactorizedVectorSum& u, const FactorizedVectorSum& v, PhiCache& cache);
cplx gram(const FactorizedVectorSum& u, const FactorizedVectorSum& v, const LinearFunctional& psi,
          const BialgebraPtr& B);
/// Plain double sum over term pairs (no sharing); reference path.
cplx gram_pairs(const FactorizedVectorSum& u, const FactorizedVectorSum& v, PhiCache& cache);

/// (L_1 * ... * L_n)(c-bar (x) d) on the conjugate tensor coalgebra, with
/// L_i(a-bar (x) b) = phi_{h_i}(kappa(a)* kappa(b)), evaluated by peeling
/// legs from the right. No vector expansion is formed.
cplx convolved_pairing(const NcPoly& c, const NcPoly& d, const Morphism& kappa, const Partition& alpha,
                       PhiCache& cache);

/// exp(t psi o kappa) on a group-like element: sum_k c_k exp(t psi(b_k)).
cplx grouplike_conv_exp(const LinearFunctional& psi, double t, const GroupLikeCarrier::Element& c,
                        const GroupLikeCarrier& C);

/// psi o kappa as a functional on the source.
LinearFunctional pullback(const LinearFunctional& psi, const Morphism& kappa);

struct ConvergenceRow {
  double mesh = 0.0;
  std::size_t n = 0;
  double normSq = 0.0;
  cplx cross;
  double defect = 0.0;
  double bound = 0.0;
  /// |theta_n(c) - theta_prev(c)|^2, NaN on the first row.
  double cauchy = 0.0;
  /// |normSq - normTarget|, NaN without a norm target.
  double normDefect = 0.0;
};

using VectorBuilder = std::function<FactorizedVectorSum(const Partition&)>;

/// Uniform meshes of [s, t]; defect = |<u_n(c), u_n(d)> - target|; bound is
/// mesh (t - s) C with C fitted from the two finest rows.
std::vector<ConvergenceRow> convergence_sweep(const VectorBuilder& c, const VectorBuilder& d, cplx target,
                                              double s, double t, const std::vector<std::size_t>& meshes,
                                              PhiCache& cache, std::optional<double> normTarget = std::nullopt);

/// |<zeta_n(b), j_{s,t}(d) Omega> - exp((t-s) psi)(b* d)| per mesh; normDefect
/// compares |zeta_n(b)|^2 with exp((t-s) psi)(b* b).
std::vector<ConvergenceRow> reverse_check(const NcPoly& b, const NcPoly& d, const TensorBialgebra& Tind,
                                          const GroupLikeCarrier& C, double s, double t,
                                          const std::vector<std::size_t>& meshes, std::size_t innerMeshFactor,
                                          PhiCache& cache);

/// CSV with columns mesh,n,norm_sq,re_cross,im_cross,defect,bound.
std::string sweep_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace qlevy
