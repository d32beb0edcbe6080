#include "qlevy/bialg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "qlevy/error.hpp"

namespace qlevy {

void TensorPoly::add(const Word& a, const Word& b, cplx c) {
  auto [it, inserted] = terms.try_emplace({a, b}, c);
  if (!inserted) it->second += c;
}

void TensorPoly::prune(double threshold) {
  for (auto it = terms.begin(); it != terms.end();) {
    if (std::abs(it->second) <= threshold)
      it = terms.erase(it);
    else
      ++it;
  }
}

double TensorPoly::max_abs() const {
  double m = 0.0;
  for (const auto& [k, c] : terms) m = std::max(m, std::abs(c));
  return m;
}

double max_diff(const TensorPoly& a, const TensorPoly& b) {
  TensorPoly d = a;
  for (const auto& [k, c] : b.terms) d.add(k.first, k.second, -c);
  return d.max_abs();
}

double max_diff(const SweedlerExpansion& a, const SweedlerExpansion& b) {
  std::map<Tuple, cplx> d = a.terms;
  for (const auto& [k, c] : b.terms) d[k] -= c;
  double m = 0.0;
  for (const auto& [k, c] : d) m = std::max(m, std::abs(c));
  return m;
}

// ---------------------------------------------------------------------------

BialgebraSpec::BialgebraSpec(std::string name, AlgebraPtr algebra, std::vector<TensorPoly> deltaOnGen,
                             std::vector<cplx> counitOnGen)
    : name_(std::move(name)),
      algebra_(std::move(algebra)),
      deltaOnGen_(std::move(deltaOnGen)),
      counitOnGen_(std::move(counitOnGen)) {
  const std::size_t n = algebra_->size();
  if (deltaOnGen_.size() != n || counitOnGen_.size() != n)
    throw InvalidSpec("bialgebra '" + name_ + "': coproduct/counit tables do not cover the alphabet");
  for (const auto& t : deltaOnGen_)
    for (const auto& [k, c] : t.terms)
      if (!algebra_->is_normal(k.first) || !algebra_->is_normal(k.second))
        throw InvalidSpec("bialgebra '" + name_ + "': coproduct leg not in normal form");
}

TensorPoly BialgebraSpec::product(const TensorPoly& a, const TensorPoly& b) const {
  TensorPoly out;
  Word uv;
  for (const auto& [ka, ca] : a.terms) {
    for (const auto& [kb, cb] : b.terms) {
      uv.assign(ka.first.begin(), ka.first.end());
      uv.insert(uv.end(), kb.first.begin(), kb.first.end());
      NcPoly left;
      algebra_->accumulate_normal_form(uv, 1.0, left);
      uv.assign(ka.second.begin(), ka.second.end());
      uv.insert(uv.end(), kb.second.begin(), kb.second.end());
      NcPoly right;
      algebra_->accumulate_normal_form(uv, 1.0, right);
      for (const auto& [l, cl] : left.terms())
        for (const auto& [r, cr] : right.terms()) out.add(l, r, ca * cb * cl * cr);
      if (out.size() > kTermBudget)
        throw TermBudgetExceeded("coproduct expansion exceeds " + std::to_string(kTermBudget) + " terms");
    }
  }
  out.prune();
  return out;
}

const TensorPoly& BialgebraSpec::coproduct_word(const Word& w) const {
  {
    std::lock_guard lk(mu_);
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
  }
  TensorPoly t;
  if (w.empty()) {
    t.add({}, {}, 1.0);
  } else if (w.size() == 1) {
    t = deltaOnGen_.at(w[0]);
  } else {
    Word head(w.begin(), w.end() - 1);
    const TensorPoly& h = coproduct_word(head);
    t = product(h, deltaOnGen_.at(w.back()));
  }
  std::lock_guard lk(mu_);
  return cache_.try_emplace(w, std::move(t)).first->second;
}

TensorPoly BialgebraSpec::coproduct(const NcPoly& p) const {
  TensorPoly out;
  for (const auto& [w, c] : p.terms()) {
    for (const auto& [k, d] : coproduct_word(w).terms) out.add(k.first, k.second, c * d);
    if (out.size() > kTermBudget)
      throw TermBudgetExceeded("coproduct expansion exceeds " + std::to_string(kTermBudget) + " terms");
  }
  out.prune();
  return out;
}

cplx BialgebraSpec::counit_word(const Word& w) const {
  cplx v = 1.0;
  for (Letter l : w) v *= counitOnGen_.at(l);
  return v;
}

cplx BialgebraSpec::counit(const NcPoly& p) const {
  cplx v = 0.0;
  for (const auto& [w, c] : p.terms()) v += c * counit_word(w);
  return v;
}

TensorPoly coproduct(const NcPoly& p, const BialgebraSpec& B) { return B.coproduct(p); }
cplx counit(const NcPoly& p, const BialgebraSpec& B) { return B.counit(p); }

SweedlerExpansion iterated_coproduct(const NcPoly& p, std::size_t n, const BialgebraSpec& B,
                                     std::size_t budget) {
  if (n == 0) throw InvalidParameter("iterated_coproduct: arity must be at least 1");
  SweedlerExpansion e;
  e.arity = 1;
  for (const auto& [w, c] : p.terms()) e.terms[{w}] += c;
  for (std::size_t k = 2; k <= n; ++k) {
    // Splitting the first leg realizes (Delta_{k-1} (x) id) o Delta; by
    // coassociativity this matches splitting the leg Delta_{k-1} left unsplit.
    SweedlerExpansion next;
    next.arity = k;
    Tuple t;
    for (const auto& [tuple, c] : e.terms) {
      for (const auto& [legs, d] : B.coproduct_word(tuple.front()).terms) {
        t.clear();
        t.reserve(k);
        t.push_back(legs.first);
        t.push_back(legs.second);
        t.insert(t.end(), tuple.begin() + 1, tuple.end());
        auto [it, inserted] = next.terms.try_emplace(t, c * d);
        if (!inserted) it->second += c * d;
      }
      if (next.terms.size() > budget)
        throw TermBudgetExceeded("iterated coproduct of arity " + std::to_string(k) + " exceeds " +
                                 std::to_string(budget) + " terms");
    }
    for (auto it = next.terms.begin(); it != next.terms.end();) {
      if (std::abs(it->second) <= kDropThreshold)
        it = next.terms.erase(it);
      else
        ++it;
    }
    e = std::move(next);
  }
  return e;
}

SweedlerExpansion contract_leg(const SweedlerExpansion& e, std::size_t i, const BialgebraSpec& B) {
  if (i >= e.arity || e.arity < 2) throw InvalidParameter("contract_leg: leg index out of range");
  SweedlerExpansion out;
  out.arity = e.arity - 1;
  Tuple t;
  for (const auto& [tuple, c] : e.terms) {
    const cplx v = c * B.counit_word(tuple[i]);
    if (v == cplx{}) continue;
    t.assign(tuple.begin(), tuple.begin() + i);
    t.insert(t.end(), tuple.begin() + i + 1, tuple.end());
    out.terms[t] += v;
  }
  for (auto it = out.terms.begin(); it != out.terms.end();) {
    if (std::abs(it->second) <= kDropThreshold)
      it = out.terms.erase(it);
    else
      ++it;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {
std::atomic<std::uint64_t> next_functional_id{1};
}

LinearFunctional::LinearFunctional(std::string name, Evaluator f, bool hermitian)
    : state_(std::make_shared<State>()) {
  state_->name = std::move(name);
  state_->f = std::move(f);
  state_->hermitian = hermitian;
  state_->id = next_functional_id++;
}

cplx LinearFunctional::operator()(const Word& w) const {
  {
    std::lock_guard lk(state_->mu);
    auto it = state_->memo.find(w);
    if (it != state_->memo.end()) return it->second;
  }
  const cplx v = state_->f(w);
  std::lock_guard lk(state_->mu);
  state_->memo.try_emplace(w, v);
  return v;
}

cplx LinearFunctional::operator()(const NcPoly& p) const {
  cplx v = 0.0;
  for (const auto& [w, c] : p.terms()) v += c * (*this)(w);
  return v;
}

LinearFunctional counit_functional(const BialgebraPtr& B) {
  return LinearFunctional(
      "counit", [B](const Word& w) { return B->counit_word(w); }, true);
}

LinearFunctional zero_functional() {
  return LinearFunctional("zero", [](const Word&) { return cplx{}; }, true);
}

LinearFunctional table_functional(std::string name, std::map<Word, cplx> values, bool hermitian) {
  auto table = std::make_shared<const std::map<Word, cplx>>(std::move(values));
  return LinearFunctional(
      std::move(name),
      [table](const Word& w) {
        auto it = table->find(w);
        return it == table->end() ? cplx{} : it->second;
      },
      hermitian);
}

double hermitian_residual(const LinearFunctional& f, const AlgebraSpec& alg, std::size_t nSamples,
                          std::size_t maxDegree, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len(0, maxDegree);
  std::uniform_int_distribution<std::size_t> letter(0, alg.size() - 1);
  double worst = 0.0;
  for (std::size_t k = 0; k < nSamples; ++k) {
    Word w(len(rng));
    for (Letter& l : w) l = static_cast<Letter>(letter(rng));
    NcPoly p = alg.normal_form(w);
    worst = std::max(worst, std::abs(f(alg.involute(p)) - std::conj(f(p))));
  }
  return worst;
}

NcPoly slice_right(const NcPoly& p, const LinearFunctional& f, const BialgebraSpec& B) {
  NcPoly out;
  for (const auto& [w, c] : p.terms()) {
    for (const auto& [legs, d] : B.coproduct_word(w).terms) {
      const cplx v = f(legs.second);
      if (v != cplx{}) out.add(legs.first, c * d * v);
    }
  }
  out.prune();
  return out;
}

NcPoly slice_left(const NcPoly& p, const LinearFunctional& f, const BialgebraSpec& B) {
  NcPoly out;
  for (const auto& [w, c] : p.terms()) {
    for (const auto& [legs, d] : B.coproduct_word(w).terms) {
      const cplx v = f(legs.first);
      if (v != cplx{}) out.add(legs.second, c * d * v);
    }
  }
  out.prune();
  return out;
}

cplx convolve_eval(const std::vector<LinearFunctional>& fs, const NcPoly& p, const BialgebraSpec& B) {
  if (fs.empty()) throw InvalidParameter("convolve_eval: need at least one functional");
  // f_1 * ... * f_n = f_1 o (id (x) f_2 * ... ) ..., peeled from the right.
  NcPoly h = p;
  for (std::size_t k = fs.size() - 1; k >= 1; --k) {
    h = slice_right(h, fs[k], B);
    if (h.is_zero()) return 0.0;
  }
  return fs[0](h);
}

cplx convolve_eval_legs(const std::vector<LinearFunctional>& fs, const NcPoly& p,
                        const BialgebraSpec& B) {
  SweedlerExpansion e = iterated_coproduct(p, fs.size(), B);
  cplx v = 0.0;
  for (const auto& [tuple, c] : e.terms) {
    cplx t = c;
    for (std::size_t i = 0; i < tuple.size() && t != cplx{}; ++i) t *= fs[i](tuple[i]);
    v += t;
  }
  return v;
}

// ---------------------------------------------------------------------------

double AxiomReport::worst() const {
  return std::max({coassociativity, counitLaw, deltaMultiplicative, counitMultiplicative,
                   ruleCompatibility, involution});
}

namespace {

SweedlerExpansion expand_left(const TensorPoly& t, const BialgebraSpec& B) {
  SweedlerExpansion e;
  e.arity = 3;
  for (const auto& [k, c] : t.terms)
    for (const auto& [l, d] : B.coproduct_word(k.first).terms) e.terms[{l.first, l.second, k.second}] += c * d;
  return e;
}

SweedlerExpansion expand_right(const TensorPoly& t, const BialgebraSpec& B) {
  SweedlerExpansion e;
  e.arity = 3;
  for (const auto& [k, c] : t.terms)
    for (const auto& [r, d] : B.coproduct_word(k.second).terms) e.terms[{k.first, r.first, r.second}] += c * d;
  return e;
}

TensorPoly multiply_tensor(const TensorPoly& a, const TensorPoly& b, const AlgebraSpec& alg) {
  TensorPoly out;
  for (const auto& [ka, ca] : a.terms)
    for (const auto& [kb, cb] : b.terms) {
      NcPoly l = alg.multiply_words(ka.first, kb.first);
      NcPoly r = alg.multiply_words(ka.second, kb.second);
      for (const auto& [u, cu] : l.terms())
        for (const auto& [v, cv] : r.terms()) out.add(u, v, ca * cb * cu * cv);
    }
  out.prune();
  return out;
}

TensorPoly star_tensor(const TensorPoly& t, const AlgebraSpec& alg) {
  TensorPoly out;
  for (const auto& [k, c] : t.terms) {
    NcPoly l = alg.involute(NcPoly::monomial(k.first));
    NcPoly r = alg.involute(NcPoly::monomial(k.second));
    for (const auto& [u, cu] : l.terms())
      for (const auto& [v, cv] : r.terms()) out.add(u, v, std::conj(c) * cu * cv);
  }
  out.prune();
  return out;
}

}  // namespace

AxiomReport check_bialgebra_axioms(const BialgebraSpec& B, std::size_t sampleDegree,
                                   std::size_t nSamples, std::mt19937_64& rng) {
  const AlgebraSpec& alg = B.algebra();
  AxiomReport rep;

  std::vector<NcPoly> samples;
  for (Letter g = 0; g < alg.size(); ++g) samples.push_back(alg.normal_form(Word{g}));
  for (std::size_t k = 0; k < nSamples; ++k) samples.push_back(random_poly(alg, sampleDegree, 3, rng));

  // Residuals are relative to max(1, largest coefficient involved).
  auto rel = [](double r, double scale) { return r / std::max(1.0, scale); };
  for (const NcPoly& p : samples) {
    const TensorPoly d = B.coproduct(p);
    const SweedlerExpansion el = expand_left(d, B);
    double elMax = 0.0;
    for (const auto& [k, c] : el.terms) elMax = std::max(elMax, std::abs(c));
    rep.coassociativity = std::max(rep.coassociativity, rel(max_diff(el, expand_right(d, B)), elMax));

    NcPoly left, right;
    for (const auto& [k, c] : d.terms) {
      left.add(k.second, c * B.counit_word(k.first));
      right.add(k.first, c * B.counit_word(k.second));
    }
    rep.counitLaw = std::max({rep.counitLaw, rel(max_diff(left, p), p.max_abs()), rel(max_diff(right, p), p.max_abs())});

    const TensorPoly ds = B.coproduct(alg.involute(p));
    rep.involution = std::max(rep.involution, rel(max_diff(ds, star_tensor(d, alg)), ds.max_abs()));
  }

  for (std::size_t k = 0; k + 1 < samples.size(); k += 2) {
    const NcPoly& p = samples[k];
    const NcPoly& q = samples[k + 1];
    const NcPoly pq = alg.multiply(p, q);
    const TensorPoly dpq = B.coproduct(pq);
    rep.deltaMultiplicative =
        std::max(rep.deltaMultiplicative,
                 rel(max_diff(dpq, multiply_tensor(B.coproduct(p), B.coproduct(q), alg)), dpq.max_abs()));
    const cplx epq = B.counit(pq);
    rep.counitMultiplicative =
        std::max(rep.counitMultiplicative, rel(std::abs(epq - B.counit(p) * B.counit(q)), std::abs(epq)));
  }

  for (const RewriteRule& r : alg.rules()) {
    // Delta of the raw left side is the product of the letter coproducts.
    const TensorPoly& lhs = B.coproduct_word(r.lhs);
    rep.ruleCompatibility = std::max(rep.ruleCompatibility, rel(max_diff(lhs, B.coproduct(r.rhs)), lhs.max_abs()));
    rep.ruleCompatibility = std::max(rep.ruleCompatibility, std::abs(B.counit_word(r.lhs) - B.counit(r.rhs)));
  }
  return rep;
}

}  // namespace qlevy
