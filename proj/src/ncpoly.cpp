#include "qlevy/ncpoly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "qlevy/error.hpp"

namespace qlevy {

NcPoly NcPoly::scalar(cplx c) {
  NcPoly p;
  if (std::abs(c) > kDropThreshold) p.terms_[{}] = c;
  return p;
}

NcPoly NcPoly::monomial(Word w, cplx c) {
  NcPoly p;
  if (std::abs(c) > kDropThreshold) p.terms_[std::move(w)] = c;
  return p;
}

cplx NcPoly::coeff(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? cplx{} : it->second;
}

int NcPoly::degree() const {
  if (terms_.empty()) return -1;
  return static_cast<int>(terms_.rbegin()->first.size());
}

double NcPoly::max_abs() const {
  double m = 0.0;
  for (const auto& [w, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void NcPoly::add(const Word& w, cplx c) {
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) it->second += c;
}

void NcPoly::prune(double threshold) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= threshold)
      it = terms_.erase(it);
    else
      ++it;
  }
}

NcPoly& NcPoly::operator+=(const NcPoly& o) {
  for (const auto& [w, c] : o.terms_) add(w, c);
  prune();
  return *this;
}

NcPoly& NcPoly::operator-=(const NcPoly& o) {
  for (const auto& [w, c] : o.terms_) add(w, -c);
  prune();
  return *this;
}

NcPoly& NcPoly::operator*=(cplx c) {
  for (auto& [w, v] : terms_) v *= c;
  prune();
  return *this;
}

double max_diff(const NcPoly& a, const NcPoly& b) {
  NcPoly d = a;
  for (const auto& [w, c] : b.terms()) d.add(w, -c);
  return d.max_abs();
}

// ---------------------------------------------------------------------------

AlgebraSpec::AlgebraSpec(std::vector<GeneratorSymbol> alphabet, std::vector<RewriteRule> rules,
                         std::size_t maxDegree)
    : alphabet_(std::move(alphabet)), rules_(std::move(rules)), maxDegree_(maxDegree) {
  if (alphabet_.size() > 0xFFFF) throw InvalidSpec("alphabet too large");
  rulesByFirst_.assign(alphabet_.size(), {});
  for (std::size_t r = 0; r < rules_.size(); ++r) {
    const Word& lhs = rules_[r].lhs;
    if (lhs.empty()) throw InvalidSpec("rule " + std::to_string(r) + " has an empty left side");
    if (!valid(lhs)) throw InvalidSpec("rule " + std::to_string(r) + " uses an unknown letter");
    rulesByFirst_[lhs.front()].push_back(r);
  }
  validate();
}

void AlgebraSpec::validate() const {
  std::set<std::string> names;
  for (std::size_t i = 0; i < alphabet_.size(); ++i) {
    const auto& g = alphabet_[i];
    if (!names.insert(g.name).second) throw InvalidSpec("duplicate generator name '" + g.name + "'");
    if (g.adjoint >= alphabet_.size())
      throw InvalidSpec("generator '" + g.name + "' has an out-of-range adjoint");
    const auto& h = alphabet_[g.adjoint];
    if (h.adjoint != i) throw InvalidSpec("adjoint pairing of '" + g.name + "' is not an involution");
    if (std::abs(g.adjointScale * std::conj(h.adjointScale) - 1.0) > 1e-12)
      throw InvalidSpec("adjoint scales of '" + g.name + "' are inconsistent");
  }
  DegLex less;
  for (std::size_t r = 0; r < rules_.size(); ++r) {
    for (const auto& [w, c] : rules_[r].rhs.terms()) {
      if (!valid(w)) throw InvalidSpec("rule " + std::to_string(r) + " rhs uses an unknown letter");
      if (!less(w, rules_[r].lhs))
        throw InvalidSpec("rule " + std::to_string(r) + " is not degree-lex decreasing");
    }
  }
  // Closure under the involution: lhs* and rhs* must have equal normal forms.
  for (std::size_t r = 0; r < rules_.size(); ++r) {
    NcPoly l = involute(NcPoly::monomial(rules_[r].lhs));
    NcPoly rr = involute(rules_[r].rhs);
    if (max_diff(l, rr) > 1e-12)
      throw InvalidSpec("rule " + std::to_string(r) + " is not closed under the involution");
  }
}

std::optional<Letter> AlgebraSpec::find(std::string_view name) const {
  for (std::size_t i = 0; i < alphabet_.size(); ++i)
    if (alphabet_[i].name == name) return static_cast<Letter>(i);
  return std::nullopt;
}

Letter AlgebraSpec::letter(std::string_view name) const {
  auto l = find(name);
  if (!l) throw UnknownGenerator("unknown generator '" + std::string(name) + "'");
  return *l;
}

bool AlgebraSpec::valid(const Word& w) const {
  return std::all_of(w.begin(), w.end(), [&](Letter l) { return l < alphabet_.size(); });
}

bool AlgebraSpec::find_match(const Word& w, std::size_t& pos, std::size_t& rule) const {
  for (std::size_t p = 0; p < w.size(); ++p) {
    for (std::size_t r : rulesByFirst_[w[p]]) {
      const Word& lhs = rules_[r].lhs;
      if (p + lhs.size() <= w.size() && std::equal(lhs.begin(), lhs.end(), w.begin() + p)) {
        pos = p;
        rule = r;
        return true;
      }
    }
  }
  return false;
}

bool AlgebraSpec::is_normal(const Word& w) const {
  std::size_t p, r;
  return !find_match(w, p, r);
}

NcPoly AlgebraSpec::rewrite(const Word& w, const RewriteObserver& observer) const {
  std::map<Word, cplx, DegLex> pending;
  pending.emplace(w, 1.0);
  NcPoly result;
  std::size_t steps = 0;
  while (!pending.empty()) {
    // Largest first: every rewrite produces strictly smaller words, so each
    // word is finished once it reaches the top of the worklist.
    auto top = std::prev(pending.end());
    Word cur = top->first;
    cplx c = top->second;
    pending.erase(top);
    if (std::abs(c) <= kDropThreshold) continue;
    if (!observer && cur != w) {
      const NcPoly* hit = nullptr;
      {
        std::lock_guard lk(mu_);
        auto it = cache_.find(cur);
        if (it != cache_.end()) hit = &it->second;
      }
      if (hit) {
        for (const auto& [u, d] : hit->terms()) result.add(u, c * d);
        continue;
      }
    }
    std::size_t pos, r;
    if (!find_match(cur, pos, r)) {
      result.add(cur, c);
      continue;
    }
    if (++steps > kRewriteBudget)
      throw RewriteBudgetExceeded("more than " + std::to_string(kRewriteBudget) +
                                  " rule applications while rewriting " + format_word(w));
    const RewriteRule& rule = rules_[r];
    for (const auto& [rw, rc] : rule.rhs.terms()) {
      Word next;
      next.reserve(cur.size() - rule.lhs.size() + rw.size());
      next.insert(next.end(), cur.begin(), cur.begin() + pos);
      next.insert(next.end(), rw.begin(), rw.end());
      next.insert(next.end(), cur.begin() + pos + rule.lhs.size(), cur.end());
      if (observer) observer(cur, next);
      auto [it, inserted] = pending.try_emplace(std::move(next), c * rc);
      if (!inserted) it->second += c * rc;
    }
  }
  result.prune();
  std::lock_guard lk(mu_);
  steps_ += steps;
  return result;
}

void AlgebraSpec::accumulate_normal_form(const Word& w, cplx c, NcPoly& out) const {
  if (maxDegree_ != 0 && w.size() > maxDegree_)
    throw DegreeCapExceeded("word of length " + std::to_string(w.size()) + " exceeds degree cap " +
                            std::to_string(maxDegree_));
  if (is_normal(w)) {
    out.add(w, c);
    return;
  }
  const NcPoly* hit = nullptr;
  {
    std::lock_guard lk(mu_);
    auto it = cache_.find(w);
    if (it != cache_.end()) hit = &it->second;
  }
  if (!hit) {
    NcPoly r = rewrite(w, {});
    std::lock_guard lk(mu_);
    hit = &cache_.try_emplace(w, std::move(r)).first->second;
  }
  for (const auto& [u, d] : hit->terms()) out.add(u, c * d);
}

NcPoly AlgebraSpec::normal_form(const NcPoly& p, const RewriteObserver& observer) const {
  NcPoly out;
  for (const auto& [w, c] : p.terms()) {
    if (!valid(w)) throw UnknownGenerator("word contains a letter outside the alphabet");
    if (observer) {
      if (maxDegree_ != 0 && w.size() > maxDegree_)
        throw DegreeCapExceeded("word exceeds degree cap " + std::to_string(maxDegree_));
      NcPoly r = rewrite(w, observer);
      for (const auto& [u, d] : r.terms()) out.add(u, c * d);
    } else {
      accumulate_normal_form(w, c, out);
    }
  }
  out.prune();
  return out;
}

NcPoly AlgebraSpec::normal_form(const Word& w) const {
  NcPoly out;
  accumulate_normal_form(w, 1.0, out);
  out.prune();
  return out;
}

NcPoly AlgebraSpec::multiply_words(const Word& u, const Word& v) const {
  Word uv;
  uv.reserve(u.size() + v.size());
  uv.insert(uv.end(), u.begin(), u.end());
  uv.insert(uv.end(), v.begin(), v.end());
  return normal_form(uv);
}

NcPoly AlgebraSpec::multiply(const NcPoly& a, const NcPoly& b) const {
  NcPoly out;
  Word uv;
  for (const auto& [u, cu] : a.terms()) {
    for (const auto& [v, cv] : b.terms()) {
      uv.assign(u.begin(), u.end());
      uv.insert(uv.end(), v.begin(), v.end());
      accumulate_normal_form(uv, cu * cv, out);
    }
  }
  out.prune();
  return out;
}

std::pair<cplx, Word> AlgebraSpec::star_word(const Word& w) const {
  cplx s = 1.0;
  Word r(w.rbegin(), w.rend());
  for (Letter& l : r) {
    s *= alphabet_[l].adjointScale;
    l = alphabet_[l].adjoint;
  }
  return {s, r};
}

NcPoly AlgebraSpec::involute(const NcPoly& p) const {
  NcPoly out;
  for (const auto& [w, c] : p.terms()) {
    auto [s, r] = star_word(w);
    accumulate_normal_form(r, std::conj(c) * s, out);
  }
  out.prune();
  return out;
}

std::string AlgebraSpec::format_word(const Word& w) const {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < w.size();) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    if (!s.empty()) s += ' ';
    s += alphabet_[w[i]].name;
    if (j - i > 1) s += "^" + std::to_string(j - i);
    i = j;
  }
  return s;
}

namespace {
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string AlgebraSpec::format(const NcPoly& p) const {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : p.terms()) {
    if (c.imag() == 0.0) {
      const bool neg = c.real() < 0;
      out += first ? (neg ? "-" : "") : (neg ? " - " : " + ");
      const double mag = std::abs(c.real());
      if (w.empty())
        out += num(mag);
      else if (mag != 1.0)
        out += num(mag) + " " + format_word(w);
      else
        out += format_word(w);
    } else {
      out += first ? "" : " + ";
      out += "(" + num(c.real()) + (c.imag() < 0 ? "-" : "+") + num(std::abs(c.imag())) + "i)";
      if (!w.empty()) out += " " + format_word(w);
    }
    first = false;
  }
  return out;
}

std::size_t AlgebraSpec::rewrite_steps() const {
  std::lock_guard lk(mu_);
  return steps_;
}

// ---------------------------------------------------------------------------

NcPoly normal_form(const NcPoly& p, const AlgebraSpec& alg) { return alg.normal_form(p); }
NcPoly multiply(const NcPoly& p, const NcPoly& q, const AlgebraSpec& alg) { return alg.multiply(p, q); }
NcPoly involute(const NcPoly& p, const AlgebraSpec& alg) { return alg.involute(p); }

NcPoly linear_combine(const std::vector<cplx>& coeffs, const std::vector<NcPoly>& polys) {
  if (coeffs.size() != polys.size())
    throw LengthMismatch("linear_combine: " + std::to_string(coeffs.size()) + " coefficients for " +
                         std::to_string(polys.size()) + " polynomials");
  NcPoly out;
  for (std::size_t i = 0; i < polys.size(); ++i)
    for (const auto& [w, c] : polys[i].terms()) out.add(w, coeffs[i] * c);
  out.prune();
  return out;
}

std::vector<Word> normal_words(const AlgebraSpec& alg, std::size_t maxDegree) {
  std::vector<Word> out;
  std::vector<Word> level{Word{}};
  for (std::size_t d = 1; d <= maxDegree; ++d) {
    std::vector<Word> next;
    for (const Word& w : level) {
      for (Letter l = 0; l < alg.size(); ++l) {
        Word u = w;
        u.push_back(l);
        if (alg.is_normal(u)) next.push_back(std::move(u));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;
}

NcPoly random_poly(const AlgebraSpec& alg, std::size_t maxDegree, std::size_t nTerms,
                   std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len(0, maxDegree);
  std::uniform_int_distribution<std::size_t> letter(0, alg.size() - 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  NcPoly out;
  for (std::size_t k = 0; k < nTerms; ++k) {
    Word w(len(rng));
    for (Letter& l : w) l = static_cast<Letter>(letter(rng));
    const double re = u(rng);
    const double im = u(rng);
    alg.accumulate_normal_form(w, cplx(re, im), out);
  }
  out.prune();
  return out;
}

std::size_t confluence_smoke_test(const AlgebraSpec& alg, std::size_t nWords,
                                  std::size_t maxDegree, std::mt19937_64& rng) {
  std::vector<RewriteRule> rules = alg.rules();
  std::shuffle(rules.begin(), rules.end(), rng);
  AlgebraSpec shuffled(alg.alphabet(), std::move(rules), alg.max_degree());
  std::uniform_int_distribution<std::size_t> len(0, maxDegree);
  std::uniform_int_distribution<std::size_t> letter(0, alg.size() - 1);
  std::size_t mismatches = 0;
  for (std::size_t k = 0; k < nWords; ++k) {
    Word w(len(rng));
    for (Letter& l : w) l = static_cast<Letter>(letter(rng));
    if (max_diff(alg.normal_form(w), shuffled.normal_form(w)) > 1e-12) ++mismatches;
  }
  return mismatches;
}

}  // namespace qlevy
