#pragma once

// Free *-algebra over a finite alphabet modulo a terminating rewrite system.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qlevy {

using cplx = std::complex<double>;
using Letter = std::uint16_t;
using Word = std::vector<Letter>;

inline constexpr double kDropThreshold = 1e-14;
inline constexpr std::size_t kRewriteBudget = 1'000'000;

/// Degree first, then lexicographic in letter index.
struct DegLex {
  bool operator()(const Word& a, const Word& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
};

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (Letter l : w) {
      h ^= l + 0x9e37u;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h ^ (w.size() << 1));
  }
};

class NcPoly {
 public:
  using Terms = std::map<Word, cplx, DegLex>;

  NcPoly() = default;
  static NcPoly scalar(cplx c);
  static NcPoly unit() { return scalar(1.0); }
  static NcPoly monomial(Word w, cplx c = 1.0);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  cplx coeff(const Word& w) const;
  /// -1 for the zero polynomial.
  int degree() const;
  double max_abs() const;

  /// Adds c*w without pruning.
  void add(const Word& w, cplx c);
  void prune(double threshold = kDropThreshold);

  NcPoly& operator+=(const NcPoly& o);
  NcPoly& operator-=(const NcPoly& o);
  NcPoly& operator*=(cplx c);
  friend NcPoly operator+(NcPoly a, const NcPoly& b) { return a += b; }
  friend NcPoly operator-(NcPoly a, const NcPoly& b) { return a -= b; }
  friend NcPoly operator*(cplx c, NcPoly a) { return a *= c; }
  bool operator==(const NcPoly& o) const { return terms_ == o.terms_; }

 private:
  Terms terms_;
};

/// Largest coefficient modulus of a - b.
double max_diff(const NcPoly& a, const NcPoly& b);

struct GeneratorSymbol {
  std::string name;
  Letter adjoint = 0;
  /// g* = adjointScale * alphabet[adjoint]; 1 for plain alphabets.
  cplx adjointScale{1.0, 0.0};
};

struct RewriteRule {
  Word lhs;
  NcPoly rhs;
};

/// Called once per produced word of every rewrite step: (rewritten word, result word).
using RewriteObserver = std::function<void(const Word&, const Word&)>;

class AlgebraSpec {
 public:
  /// maxDegree = 0 means untruncated; otherwise any word longer than maxDegree
  /// reaching normal_form raises DegreeCapExceeded.
  AlgebraSpec(std::vector<GeneratorSymbol> alphabet, std::vector<RewriteRule> rules,
              std::size_t maxDegree = 0);
  AlgebraSpec(const AlgebraSpec&) = delete;
  AlgebraSpec& operator=(const AlgebraSpec&) = delete;

  std::size_t size() const { return alphabet_.size(); }
  const std::vector<GeneratorSymbol>& alphabet() const { return alphabet_; }
  const GeneratorSymbol& generator(Letter l) const { return alphabet_.at(l); }
  const std::vector<RewriteRule>& rules() const { return rules_; }
  std::size_t max_degree() const { return maxDegree_; }

  std::optional<Letter> find(std::string_view name) const;
  /// Throws UnknownGenerator.
  Letter letter(std::string_view name) const;

  bool is_normal(const Word& w) const;
  bool valid(const Word& w) const;

  /// out += c * nf(w).
  void accumulate_normal_form(const Word& w, cplx c, NcPoly& out) const;
  NcPoly normal_form(const NcPoly& p, const RewriteObserver& observer = {}) const;
  NcPoly normal_form(const Word& w) const;
  NcPoly multiply(const NcPoly& a, const NcPoly& b) const;
  /// nf(u v) for words.
  NcPoly multiply_words(const Word& u, const Word& v) const;
  NcPoly involute(const NcPoly& p) const;
  /// Reversed, starred word before normalization together with its scale.
  std::pair<cplx, Word> star_word(const Word& w) const;

  std::string format_word(const Word& w) const;
  std::string format(const NcPoly& p) const;

  std::size_t rewrite_steps() const;

 private:
  /// Returns the index of the leftmost matching rule and its position.
  bool find_match(const Word& w, std::size_t& pos, std::size_t& rule) const;
  NcPoly rewrite(const Word& w, const RewriteObserver& observer) const;
  void validate() const;

  std::vector<GeneratorSymbol> alphabet_;
  std::vector<RewriteRule> rules_;
  std::vector<std::vector<std::size_t>> rulesByFirst_;
  std::size_t maxDegree_;

  mutable std::mutex mu_;
  mutable std::unordered_map<Word, NcPoly, WordHash> cache_;
  mutable std::size_t steps_ = 0;
};

using AlgebraPtr = std::shared_ptr<const AlgebraSpec>;

NcPoly normal_form(const NcPoly& p, const AlgebraSpec& alg);
NcPoly multiply(const NcPoly& p, const NcPoly& q, const AlgebraSpec& alg);
NcPoly involute(const NcPoly& p, const AlgebraSpec& alg);
/// Throws LengthMismatch.
NcPoly linear_combine(const std::vector<cplx>& coeffs, const std::vector<NcPoly>& polys);
/// Grammar: poly := signed-term (('+'|'-') term)*; term := [scalar] factor*;
/// factor := ident ('^*')? ('^' uint)?; scalar := real | '(' real ('+'|'-') real 'i' ')'.
NcPoly parse_poly(std::string_view text, const AlgebraSpec& alg);

/// All normal words of length 1..maxDegree in DegLex order.
std::vector<Word> normal_words(const AlgebraSpec& alg, std::size_t maxDegree);

/// Random element: nTerms normal words of length <= maxDegree with
/// coefficients uniform in the unit square.
NcPoly random_poly(const AlgebraSpec& alg, std::size_t maxDegree, std::size_t nTerms,
                   std::mt19937_64& rng);

/// Rewrites random words under a shuffled rule order and counts words whose
/// normal form differs from the declared order. Nonzero means non-confluent.
std::size_t confluence_smoke_test(const AlgebraSpec& alg, std::size_t nWords,
                                  std::size_t maxDegree, std::mt19937_64& rng);

}  // namespace qlevy
