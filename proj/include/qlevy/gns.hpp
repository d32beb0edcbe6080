#pragma once

// Levy triples (rho, eta, psi): GNS-type construction from a generator,
// the U<d> triple from (W, L, H), and residual checks.

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "qlevy/constructions.hpp"
#include "qlevy/subcoalg.hpp"

namespace qlevy {

/// rho and eta are stored on generators and extended to words by
/// rho(g w) = rho(g) rho(w), eta(g w) = rho(g) eta(w) + eta(g) delta(w).
class LevyTriple {
 public:
  LevyTriple() = default;
  LevyTriple(BialgebraPtr B, std::size_t kDim, std::vector<CVector> etaGen, std::vector<CMatrix> rhoGen,
             LinearFunctional psi, double tolUsed = 0.0);

  std::size_t k_dim() const { return kDim_; }
  const BialgebraPtr& bialgebra() const { return B_; }
  const LinearFunctional& psi() const { return psi_; }
  const std::vector<CVector>& eta_on_gen() const { return etaGen_; }
  const std::vector<CMatrix>& rho_on_gen() const { return rhoGen_; }
  double tol_used() const { return tolUsed_; }

  CVector eta(const Word& w) const;
  /// eta(p) := eta(p - delta(p) 1); linear, eta(1) = 0.
  CVector eta(const NcPoly& p) const;
  CMatrix rho(const Word& w) const;
  CMatrix rho(const NcPoly& p) const;

  /// Basis words the triple was fitted on (empty for closed-form triples).
  std::vector<Word> fittedWords;

 private:
  struct Memo {
    std::mutex mu;
    std::map<Word, CVector, DegLex> eta;
  };
  BialgebraPtr B_;
  std::size_t kDim_ = 0;
  std::vector<CVector> etaGen_;
  std::vector<CMatrix> rhoGen_;
  LinearFunctional psi_;
  double tolUsed_ = 0.0;
  std::shared_ptr<Memo> memo_ = std::make_shared<Memo>();
};

struct PositivityReport {
  double minEigenvalue = 0.0;
  double maxEigenvalue = 0.0;
  double hermitianResidual = 0.0;
  std::size_t basisSize = 0;
  bool ok(double tol = 1e-10) const { return minEigenvalue >= -tol && hermitianResidual <= tol; }
};

/// Gram matrix G_vw = psi(v* w) over v = w - delta(w) 1, 1 <= |w| <= degreeCap.
CMatrix conditional_gram(const LinearFunctional& psi, const BialgebraSpec& B, std::size_t degreeCap,
                         std::vector<Word>* words = nullptr);
PositivityReport check_conditional_positivity(const LinearFunctional& psi, const BialgebraSpec& B,
                                              std::size_t degreeCap);

/// K = range of the Gram matrix (eigenvalues above nullTol * max kept, descending);
/// eta(w)_k = sqrt(l_k) conj(e_k[w]) with the first significant entry of each
/// column made real positive; rho(g) by least squares on eta of words of degree
/// <= degreeCap - 1. Throws PositivityViolation, RankDeficiency.
LevyTriple gns_construct(const LinearFunctional& psi, const BialgebraPtr& B, std::size_t degreeCap,
                         double nullTol = 1e-9);

struct UnitaryTripleParams {
  int d = 1;
  /// d m x d m, block (k, l) is W_kl.
  CMatrix W;
  /// L[k][l] in C^m.
  std::vector<std::vector<CVector>> L;
  CMatrix H;
};

/// rho(x_kl) = W_kl, eta(x_kl) = L_kl, psi(x_kl) = -M_kl/2 + i H_kl with
/// M_kl = sum_i <L_ik, L_il>; psi extended by psi(g w) = delta(g) psi(w) + psi(g) delta(w) + <eta(g*), eta(w)>.
LevyTriple unitary_triple(const UnitaryTripleParams& p, const BialgebraPtr& Ud);
UnitaryTripleParams random_unitary_params(int d, int m, std::mt19937_64& rng, double lScale = 1.0);

/// K = C, eta(x*) = 1, eta(x) = eta(y) = 0, rho(x) = rho(x*) = 0, rho(y) = q.
LevyTriple azema_triple(const AzemaModel& m);

struct TripleResiduals {
  double eq21 = 0.0;
  double cocycle = 0.0;
  double rhoMultiplicative = 0.0;
  double rhoStar = 0.0;
  double worst() const { return std::max({eq21, cocycle, rhoMultiplicative, rhoStar}); }
};

/// All generator pairs plus nSamples random pairs of degree <= maxDegree.
TripleResiduals levy_triple_residuals(const LevyTriple& t, std::size_t nSamples, std::mt19937_64& rng,
                                      std::size_t maxDegree = 3);

}  // namespace qlevy
