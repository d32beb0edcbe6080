#include "qlevy/constructions.hpp"

#include <cmath>

#include "qlevy/error.hpp"

namespace qlevy {

Morphism identity_morphism(const BialgebraPtr& B) {
  Morphism m;
  m.name = "id";
  m.source = m.target = B;
  for (Letter g = 0; g < B->algebra().size(); ++g) m.imageOnGen.push_back(NcPoly::monomial({g}));
  return m;
}

NcPoly apply_morphism(const Morphism& m, const NcPoly& p) {
  const AlgebraSpec& tgt = m.target->algebra();
  NcPoly out;
  for (const auto& [w, c] : p.terms()) {
    NcPoly img = NcPoly::unit();
    for (Letter l : w) {
      img = tgt.multiply(img, m.imageOnGen.at(l));
      if (img.is_zero()) break;
    }
    img *= c;
    out += img;
  }
  return out;
}

CounitReport check_counit_preserving(const Morphism& m, std::size_t nSamples, std::size_t maxDegree,
                                     std::mt19937_64& rng) {
  CounitReport rep;
  const AlgebraSpec& src = m.source->algebra();
  std::vector<NcPoly> samples;
  for (Letter g = 0; g < src.size(); ++g) samples.push_back(NcPoly::monomial({g}));
  for (std::size_t k = 0; k < nSamples; ++k) samples.push_back(random_poly(src, maxDegree, 3, rng));
  for (const NcPoly& p : samples) {
    const double r = std::abs(m.target->counit(apply_morphism(m, p)) - m.source->counit(p));
    rep.maxResidual = std::max(rep.maxResidual, r);
  }
  rep.samples = samples.size();
  return rep;
}

// ---------------------------------------------------------------------------

NcPoly TensorBialgebra::letters(const NcPoly& p) const {
  NcPoly out;
  for (const auto& [w, c] : p.terms()) {
    if (w.empty()) continue;
    auto it = letterOf.find(w);
    if (it == letterOf.end())
      throw DegreeCapExceeded("word '" + base->algebra().format_word(w) + "' is past the letter degree cap " +
                              std::to_string(cap));
    out.add({it->second}, c);
  }
  out.prune();
  return out;
}

NcPoly TensorBialgebra::lift(const NcPoly& b) const {
  NcPoly out = letters(b);
  out += NcPoly::scalar(base->counit(b));
  return out;
}

namespace {

TensorPtr build_tensor(const BialgebraPtr& B, std::size_t cap, bool induced) {
  if (cap < 1) throw InvalidParameter("tensor bialgebra degree cap must be at least 1");
  const AlgebraSpec& alg = B->algebra();
  auto T = std::make_shared<TensorBialgebra>();
  T->base = B;
  T->induced = induced;
  T->cap = cap;
  T->letterWord = normal_words(alg, cap);
  if (T->letterWord.size() > 0xFFFF) throw DimCapExceeded("too many letters for the tensor alphabet");
  for (std::size_t i = 0; i < T->letterWord.size(); ++i) T->letterOf.emplace(T->letterWord[i], static_cast<Letter>(i));

  std::vector<GeneratorSymbol> alphabet(T->letterWord.size());
  for (std::size_t i = 0; i < T->letterWord.size(); ++i) {
    auto [s, raw] = alg.star_word(T->letterWord[i]);
    NcPoly st = alg.normal_form(raw);
    if (st.size() != 1)
      throw InvalidSpec("involution does not map the word basis to itself at '" +
                        alg.format_word(T->letterWord[i]) + "'");
    const auto& [w, c] = *st.terms().begin();
    alphabet[i].name = "L" + std::to_string(i);
    alphabet[i].adjoint = T->letterOf.at(w);
    alphabet[i].adjointScale = s * c;
  }
  auto talg = std::make_shared<const AlgebraSpec>(std::move(alphabet), std::vector<RewriteRule>{}, cap);

  std::vector<TensorPoly> delta(T->letterWord.size());
  for (std::size_t i = 0; i < T->letterWord.size(); ++i) {
    const Letter li = static_cast<Letter>(i);
    delta[i].add({li}, {}, 1.0);
    delta[i].add({}, {li}, 1.0);
    if (!induced) continue;
    for (const auto& [legs, c] : B->coproduct_word(T->letterWord[i]).terms) {
      if (legs.first.empty() || legs.second.empty()) continue;
      auto a = T->letterOf.find(legs.first);
      auto b = T->letterOf.find(legs.second);
      if (a == T->letterOf.end() || b == T->letterOf.end())
        throw DegreeCapExceeded("coproduct leg past the letter degree cap");
      delta[i].add({a->second}, {b->second}, c);
    }
    delta[i].prune();
  }
  std::vector<cplx> eps(T->letterWord.size(), 0.0);
  T->spec = std::make_shared<const BialgebraSpec>(
      (induced ? "induced_tensor(" : "primitive_tensor(") + B->name() + "," + std::to_string(cap) + ")", talg,
      std::move(delta), std::move(eps));

  T->kappa.name = "kappa";
  T->kappa.source = T->spec;
  T->kappa.target = B;
  for (const Word& w : T->letterWord)
    T->kappa.imageOnGen.push_back(NcPoly::monomial(w) + NcPoly::scalar(-B->counit_word(w)));
  return T;
}

}  // namespace

TensorPtr make_primitive_tensor(const BialgebraPtr& B, std::size_t degreeCap) {
  return build_tensor(B, degreeCap, false);
}

TensorPtr make_induced_tensor(const BialgebraPtr& B, std::size_t degreeCap) {
  return build_tensor(B, degreeCap, true);
}

Morphism letter_identity(const TensorBialgebra& from, const TensorBialgebra& to) {
  if (from.letterWord != to.letterWord)
    throw InvalidParameter("letter_identity: tensor bialgebras have different letters");
  Morphism m;
  m.name = "letter_identity";
  m.source = from.spec;
  m.target = to.spec;
  m.kind = Morphism::Kind::Section;
  for (Letter i = 0; i < from.letterWord.size(); ++i) m.imageOnGen.push_back(NcPoly::monomial({i}));
  return m;
}

// ---------------------------------------------------------------------------

bool GroupLikeCarrier::PolyLess::operator()(const NcPoly& a, const NcPoly& b) const {
  auto ia = a.terms().begin(), ib = b.terms().begin();
  DegLex less;
  for (; ia != a.terms().end() && ib != b.terms().end(); ++ia, ++ib) {
    if (less(ia->first, ib->first)) return true;
    if (less(ib->first, ia->first)) return false;
    if (ia->second.real() != ib->second.real()) return ia->second.real() < ib->second.real();
    if (ia->second.imag() != ib->second.imag()) return ia->second.imag() < ib->second.imag();
  }
  return ia == a.terms().end() && ib != b.terms().end();
}

GroupLikeCarrier::GroupLikeCarrier(BialgebraPtr base, std::size_t degreeCap)
    : base_(std::move(base)), cap_(degreeCap) {
  if (cap_ < 1) throw InvalidParameter("group-like carrier degree cap must be at least 1");
  key(NcPoly::unit());
}

std::size_t GroupLikeCarrier::key(const NcPoly& b) const {
  if (b.degree() > static_cast<int>(cap_))
    throw DegreeCapExceeded("group-like key of degree " + std::to_string(b.degree()) + " past cap " +
                            std::to_string(cap_));
  if (std::abs(base_->counit(b) - 1.0) > 1e-12)
    throw InvalidParameter("group-like key must have counit 1");
  std::lock_guard lk(mu_);
  auto it = index_.find(b);
  if (it != index_.end()) return it->second;
  keys_.push_back(b);
  index_.emplace(b, keys_.size() - 1);
  return keys_.size() - 1;
}

NcPoly GroupLikeCarrier::key_poly(std::size_t k) const {
  std::lock_guard lk(mu_);
  return keys_.at(k);
}

namespace {
void add_to(GroupLikeCarrier::Element& e, std::size_t k, cplx c) {
  auto [it, inserted] = e.try_emplace(k, c);
  if (!inserted) it->second += c;
}
void prune(GroupLikeCarrier::Element& e) {
  for (auto it = e.begin(); it != e.end();) {
    if (std::abs(it->second) <= kDropThreshold)
      it = e.erase(it);
    else
      ++it;
  }
}
}  // namespace

GroupLikeCarrier::Element GroupLikeCarrier::multiply(const Element& a, const Element& b) const {
  Element out;
  const AlgebraSpec& alg = base_->algebra();
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) add_to(out, key(alg.multiply(key_poly(ka), key_poly(kb))), ca * cb);
  prune(out);
  return out;
}

GroupLikeCarrier::Element GroupLikeCarrier::involute(const Element& a) const {
  Element out;
  for (const auto& [k, c] : a) add_to(out, key(base_->algebra().involute(key_poly(k))), std::conj(c));
  prune(out);
  return out;
}

cplx GroupLikeCarrier::counit(const Element& a) const {
  cplx v = 0.0;
  for (const auto& [k, c] : a) v += c;
  return v;
}

std::map<std::pair<std::size_t, std::size_t>, cplx> GroupLikeCarrier::coproduct(const Element& a) const {
  std::map<std::pair<std::size_t, std::size_t>, cplx> out;
  for (const auto& [k, c] : a) out[{k, k}] += c;
  return out;
}

NcPoly GroupLikeCarrier::kappa(const Element& a) const {
  NcPoly out;
  for (const auto& [k, c] : a) {
    NcPoly p = key_poly(k);
    p *= c;
    out += p;
  }
  return out;
}

GroupLikeCarrier::Element GroupLikeCarrier::kappa_tilde_letter(const NcPoly& b0) const {
  if (std::abs(base_->counit(b0)) > 1e-12) throw InvalidParameter("kappa~ letter must lie in ker(delta)");
  Element out;
  if (b0.is_zero()) return out;
  add_to(out, key(b0 + NcPoly::unit()), 1.0);
  add_to(out, key(NcPoly::unit()), -1.0);
  return out;
}

GroupLikeCarrier::Element GroupLikeCarrier::kappa_tilde_basis(Letter l, const TensorBialgebra& Tind) const {
  if (Tind.base.get() != base_.get()) throw InvalidParameter("kappa~: tensor bialgebra over a different base");
  const GeneratorSymbol& g = Tind.spec->algebra().generator(l);
  auto b0_of = [&](Letter i) {
    const Word& w = Tind.letterWord.at(i);
    return NcPoly::monomial(w) + NcPoly::scalar(-base_->counit_word(w));
  };
  // The letter with the smaller index of an adjoint pair gets the plain
  // formula; its partner is fixed by L(a)* = s L(l).
  if (g.adjoint > l) return kappa_tilde_letter(b0_of(l));
  if (g.adjoint < l) {
    const cplx s = Tind.spec->algebra().generator(g.adjoint).adjointScale;
    Element e = involute(kappa_tilde_letter(b0_of(g.adjoint)));
    for (auto& [k, c] : e) c /= s;
    return e;
  }
  // Self-adjoint up to a phase s: rotate to a hermitian h0 = e^{i t/2} b0 first.
  const cplx s = g.adjointScale;
  if (std::abs(s - 1.0) <= 1e-15) return kappa_tilde_letter(b0_of(l));
  const cplx r = std::polar(1.0, -0.5 * std::arg(s));
  Element e = kappa_tilde_letter(std::conj(r) * b0_of(l));
  for (auto& [k, c] : e) c *= r;
  return e;
}

GroupLikeCarrier::Element GroupLikeCarrier::kappa_tilde(const NcPoly& t, const TensorBialgebra& Tind) const {
  if (Tind.base.get() != base_.get()) throw InvalidParameter("kappa~: tensor bialgebra over a different base");
  Element out;
  const std::size_t one = key(NcPoly::unit());
  for (const auto& [w, c] : t.terms()) {
    Element e{{one, 1.0}};
    for (Letter l : w) e = multiply(e, kappa_tilde_basis(l, Tind));
    for (const auto& [k, v] : e) add_to(out, k, c * v);
  }
  prune(out);
  return out;
}

double max_diff(const GroupLikeCarrier::Element& a, const GroupLikeCarrier::Element& b) {
  GroupLikeCarrier::Element d = a;
  for (const auto& [k, c] : b) add_to(d, k, -c);
  double m = 0.0;
  for (const auto& [k, c] : d) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace qlevy
