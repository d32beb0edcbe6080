#pragma once

// Coproduct, counit, Sweedler expansions and convolution of functionals.

#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qlevy/ncpoly.hpp"

namespace qlevy {

inline constexpr std::size_t kTermBudget = 1'000'000;

struct TensorPoly {
  std::map<std::pair<Word, Word>, cplx> terms;

  void add(const Word& a, const Word& b, cplx c);
  void prune(double threshold = kDropThreshold);
  double max_abs() const;
  std::size_t size() const { return terms.size(); }
};

double max_diff(const TensorPoly& a, const TensorPoly& b);

using Tuple = std::vector<Word>;

struct SweedlerExpansion {
  std::size_t arity = 1;
  std::map<Tuple, cplx> terms;

  std::size_t size() const { return terms.size(); }
};

double max_diff(const SweedlerExpansion& a, const SweedlerExpansion& b);

class BialgebraSpec {
 public:
  BialgebraSpec(std::string name, AlgebraPtr algebra, std::vector<TensorPoly> deltaOnGen,
                std::vector<cplx> counitOnGen);
  BialgebraSpec(const BialgebraSpec&) = delete;
  BialgebraSpec& operator=(const BialgebraSpec&) = delete;

  const std::string& name() const { return name_; }
  const AlgebraSpec& algebra() const { return *algebra_; }
  const AlgebraPtr& algebra_ptr() const { return algebra_; }
  const TensorPoly& delta_on_gen(Letter g) const { return deltaOnGen_.at(g); }
  cplx counit_on_gen(Letter g) const { return counitOnGen_.at(g); }

  /// Multiplicative extension over the letters of w (w need not be normal).
  /// The reference stays valid for the lifetime of this object.
  const TensorPoly& coproduct_word(const Word& w) const;
  TensorPoly coproduct(const NcPoly& p) const;
  cplx counit_word(const Word& w) const;
  cplx counit(const NcPoly& p) const;

 private:
  TensorPoly product(const TensorPoly& a, const TensorPoly& b) const;

  std::string name_;
  AlgebraPtr algebra_;
  std::vector<TensorPoly> deltaOnGen_;
  std::vector<cplx> counitOnGen_;

  mutable std::mutex mu_;
  mutable std::unordered_map<Word, TensorPoly, WordHash> cache_;
};

using BialgebraPtr = std::shared_ptr<const BialgebraSpec>;

TensorPoly coproduct(const NcPoly& p, const BialgebraSpec& B);
cplx counit(const NcPoly& p, const BialgebraSpec& B);
/// Delta_n via Delta_n = (Delta_{n-1} (x) id) o Delta. Throws TermBudgetExceeded.
SweedlerExpansion iterated_coproduct(const NcPoly& p, std::size_t n, const BialgebraSpec& B,
                                     std::size_t budget = kTermBudget);
/// Applies the counit to leg i, giving an expansion of arity n-1.
SweedlerExpansion contract_leg(const SweedlerExpansion& e, std::size_t i, const BialgebraSpec& B);

/// Linear functional given on normal words, memoized. Copies share the memo.
class LinearFunctional {
 public:
  using Evaluator = std::function<cplx(const Word&)>;

  LinearFunctional() = default;
  LinearFunctional(std::string name, Evaluator f, bool hermitian = false);

  cplx operator()(const Word& w) const;
  cplx operator()(const NcPoly& p) const;
  const std::string& name() const { return state_->name; }
  bool hermitian() const { return state_->hermitian; }
  std::uint64_t id() const { return state_->id; }
  explicit operator bool() const { return static_cast<bool>(state_); }

 private:
  struct State {
    std::string name;
    Evaluator f;
    bool hermitian = false;
    std::uint64_t id = 0;
    std::mutex mu;
    std::unordered_map<Word, cplx, WordHash> memo;
  };
  std::shared_ptr<State> state_;
};

LinearFunctional counit_functional(const BialgebraPtr& B);
LinearFunctional zero_functional();
/// Functional given on finitely many words, zero elsewhere.
LinearFunctional table_functional(std::string name, std::map<Word, cplx> values, bool hermitian);

/// max |f(w*) - conj f(w)| over random normal words.
double hermitian_residual(const LinearFunctional& f, const AlgebraSpec& alg, std::size_t nSamples,
                          std::size_t maxDegree, std::mt19937_64& rng);

/// (id (x) f) o Delta applied to p.
NcPoly slice_right(const NcPoly& p, const LinearFunctional& f, const BialgebraSpec& B);
/// (f (x) id) o Delta applied to p.
NcPoly slice_left(const NcPoly& p, const LinearFunctional& f, const BialgebraSpec& B);

/// (f_1 * ... * f_n)(p).
cplx convolve_eval(const std::vector<LinearFunctional>& fs, const NcPoly& p, const BialgebraSpec& B);
/// Same value from the explicit sum over Delta_n legs (reference path).
cplx convolve_eval_legs(const std::vector<LinearFunctional>& fs, const NcPoly& p,
                        const BialgebraSpec& B);

/// Each field is a max residual relative to max(1, largest coefficient involved).
struct AxiomReport {
  double coassociativity = 0.0;
  double counitLaw = 0.0;
  double deltaMultiplicative = 0.0;
  double counitMultiplicative = 0.0;
  double ruleCompatibility = 0.0;
  double involution = 0.0;

  double worst() const;
  bool ok(double tol) const { return worst() <= tol; }
};

AxiomReport check_bialgebra_axioms(const BialgebraSpec& B, std::size_t sampleDegree,
                                   std::size_t nSamples, std::mt19937_64& rng);

}  // namespace qlevy
