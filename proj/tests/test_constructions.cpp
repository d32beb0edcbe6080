#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qlevy/constructions.hpp"
#include "qlevy/error.hpp"

using namespace qlevy;

namespace {

const AzemaModel& az() {
  static AzemaModel m = make_azema(2.0);
  return m;
}

// E applied to every leg of Delta_n(b) in the base.
SweedlerExpansion lift_legs(const SweedlerExpansion& e, const TensorBialgebra& T) {
  SweedlerExpansion out;
  out.arity = e.arity;
  for (const auto& [tuple, c] : e.terms) {
    std::map<Tuple, cplx> acc{{Tuple{}, c}};
    for (const Word& leg : tuple) {
      const NcPoly L = T.lift(NcPoly::monomial(leg));
      std::map<Tuple, cplx> next;
      for (const auto& [t, v] : acc)
        for (const auto& [w, d] : L.terms()) {
          Tuple u = t;
          u.push_back(w);
          next[u] += v * d;
        }
      acc = std::move(next);
    }
    for (const auto& [t, v] : acc) out.terms[t] += v;
  }
  return out;
}

}  // namespace

TEST_CASE("Azema generator values") {
  const LinearFunctional& psi = az().psi;
  CHECK(psi(Word{0, 1}) == cplx{1.0});
  CHECK(psi(Word{0, 1, 2, 2, 2}) == cplx{1.0});
  CHECK(psi(Word{1, 0}) == cplx{});
  CHECK(psi(Word{0}) == cplx{});
  CHECK(psi(Word{}) == cplx{});
  CHECK(psi(Word{0, 1, 0, 1}) == cplx{});
  CHECK(az().azema->counit(NcPoly::monomial({2})) == cplx{1.0});
  CHECK(az().azema->name() == "azema(2)");
}

TEST_CASE("unitary bialgebra") {
  auto u1 = make_unitary_bialgebra(1);
  const AlgebraSpec& a1 = u1->algebra();
  CHECK(a1.generator(0).name == "x");
  CHECK(a1.generator(1).name == "x^*");
  // Every monomial is group-like.
  for (const Word& w : normal_words(a1, 4)) {
    TensorPoly expect;
    expect.add(w, w, 1.0);
    CHECK(max_diff(u1->coproduct_word(w), expect) < 1e-14);
  }

  auto u2 = make_unitary_bialgebra(2);
  const AlgebraSpec& a2 = u2->algebra();
  CHECK(a2.generator(unitary_x(2, 0, 1)).name == "x12");
  CHECK(a2.generator(unitary_xs(2, 1, 0)).name == "x21^*");
  CHECK(max_diff(parse_poly("x11 x11^* + x12 x12^*", a2), NcPoly::unit()) < 1e-14);
  CHECK(max_diff(parse_poly("x11^* x12 + x21^* x22", a2), NcPoly{}) < 1e-14);
  CHECK(u2->counit(parse_poly("x12", a2)) == cplx{});
  CHECK(u2->counit(parse_poly("x22^*", a2)) == cplx{1.0});

  auto u10 = make_unitary_bialgebra(10);
  CHECK(u10->algebra().generator(unitary_x(10, 9, 0)).name == "x_10_1");
  CHECK_THROWS_AS(make_unitary_bialgebra(0), InvalidParameter);
}

TEST_CASE("tensor letter coproducts") {
  auto P = make_primitive_tensor(az().azema, 2);
  auto I = make_induced_tensor(az().azema, 2);
  CHECK(P->letterWord.size() == 10);
  const Letter Lx = P->letterOf.at({0}), Ly = P->letterOf.at({2});

  TensorPoly prim;
  prim.add({Lx}, {}, 1.0);
  prim.add({}, {Lx}, 1.0);
  CHECK(max_diff(P->spec->coproduct_word({Lx}), prim) == 0.0);

  // reduced part of Delta(y - 1) is (y - 1) (x) (y - 1)
  TensorPoly ly;
  ly.add({Ly}, {}, 1.0);
  ly.add({}, {Ly}, 1.0);
  ly.add({Ly}, {Ly}, 1.0);
  CHECK(max_diff(I->spec->coproduct_word({Ly}), ly) < 1e-15);
  // reduced part of Delta(x) is x (x) (y - 1)
  TensorPoly lx = prim;
  lx.add({Lx}, {Ly}, 1.0);
  CHECK(max_diff(I->spec->coproduct_word({Lx}), lx) < 1e-15);

  CHECK(max_diff(I->lift(parse_poly("2 y + x", az().azema->algebra())),
                 NcPoly::monomial({Ly}, 2.0) + NcPoly::monomial({Lx}) + NcPoly::scalar(2.0)) < 1e-15);
  CHECK_THROWS_AS(I->letters(NcPoly::monomial({0, 1, 2})), DegreeCapExceeded);

  // L(x y)* = q L(x* y)
  const AlgebraSpec& ta = I->spec->algebra();
  const Letter Lxy = I->letterOf.at({0, 2}), Lxsy = I->letterOf.at({1, 2});
  CHECK(max_diff(ta.involute(NcPoly::monomial({Lxy})), NcPoly::monomial({Lxsy}, 2.0)) < 1e-15);
}

TEST_CASE("tensor bialgebras satisfy the axioms") {
  std::mt19937_64 rng(11);
  for (auto T : {make_primitive_tensor(az().azema, 4), make_induced_tensor(az().azema, 4)}) {
    AxiomReport r = check_bialgebra_axioms(*T->spec, 2, 40, rng);
    CHECK(r.worst() <= 1e-12);
  }
  auto u2 = make_unitary_bialgebra(2);
  AxiomReport r = check_bialgebra_axioms(*make_induced_tensor(u2, 2)->spec, 1, 40, rng);
  CHECK(r.worst() <= 1e-12);
}

TEST_CASE("counit-preserving maps") {
  std::mt19937_64 rng(12);
  auto I = make_induced_tensor(az().azema, 3);
  auto P = make_primitive_tensor(az().azema, 3);
  CHECK(check_counit_preserving(I->kappa, 50, 3, rng).maxResidual <= 1e-12);
  CHECK(check_counit_preserving(P->kappa, 50, 3, rng).maxResidual <= 1e-12);
  CHECK(check_counit_preserving(letter_identity(*I, *P), 50, 3, rng).maxResidual <= 1e-12);
  CHECK(check_counit_preserving(identity_morphism(az().azema), 50, 4, rng).maxResidual <= 1e-12);

  Morphism bad = identity_morphism(az().azema);
  bad.imageOnGen[2] = NcPoly::monomial({2}, 2.0);
  CHECK(check_counit_preserving(bad, 0, 1, rng).maxResidual == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("induced coproduct intertwines the lift") {
  std::mt19937_64 rng(13);
  auto I = make_induced_tensor(az().azema, 3);
  const BialgebraSpec& B = *az().azema;
  for (int k = 0; k < 40; ++k) {
    NcPoly b = random_poly(B.algebra(), 3, 3, rng);
    for (std::size_t n : {2u, 3u, 4u}) {
      SweedlerExpansion viaT = iterated_coproduct(I->lift(b), n, *I->spec);
      SweedlerExpansion viaB = lift_legs(iterated_coproduct(b, n, B), *I);
      CHECK(max_diff(viaT, viaB) < 1e-12);
    }
  }
}

TEST_CASE("group-like carrier") {
  const BialgebraSpec& B = *az().azema;
  const AlgebraSpec& alg = B.algebra();
  auto I = make_induced_tensor(az().azema, 2);
  auto C = make_grouplike(az().azema, 6);
  CHECK_THROWS_AS(C->key(NcPoly::monomial({0})), InvalidParameter);
  CHECK_THROWS_AS(C->key(NcPoly::monomial({2, 2, 2, 2, 2, 2, 2})), DegreeCapExceeded);

  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(I->letterWord.size()) - 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    // t: a short combination of letter words
    NcPoly t;
    for (int j = 0; j < 3; ++j) {
      Word w(1 + j % 2);
      for (Letter& l : w) l = static_cast<Letter>(pick(rng));
      t.add(w, {u(rng), u(rng)});
    }
    GroupLikeCarrier::Element e = C->kappa_tilde(t, *I);
    CHECK(max_diff(C->kappa(e), apply_morphism(I->kappa, t)) < 1e-12);
    CHECK(max_diff(C->involute(e), C->kappa_tilde(I->spec->algebra().involute(t), *I)) < 1e-12);
  }
  for (std::size_t i = 0; i < I->letterWord.size(); ++i) {
    const Word& w = I->letterWord[i];
    NcPoly b0 = NcPoly::monomial(w) + NcPoly::scalar(-B.counit_word(w));
    CHECK(std::abs(C->counit(C->kappa_tilde_letter(b0))) < 1e-15);
    CHECK(std::abs(C->counit(C->kappa_tilde_letter(cplx(0.3, 0.7) * b0))) < 1e-15);
  }

  // Lambda is multiplicative on keys.
  for (int k = 0; k < 30; ++k) {
    NcPoly a = random_poly(alg, 2, 2, rng), b = random_poly(alg, 2, 2, rng);
    a += NcPoly::scalar(1.0 - B.counit(a));
    b += NcPoly::scalar(1.0 - B.counit(b));
    auto ea = C->hat(a), eb = C->hat(b);
    auto lhs = C->coproduct(C->multiply(ea, eb));
    std::map<std::pair<std::size_t, std::size_t>, cplx> rhs;
    for (const auto& [ka, ca] : C->coproduct(ea))
      for (const auto& [kb, cb] : C->coproduct(eb)) {
        auto l = C->multiply({{ka.first, 1.0}}, {{kb.first, 1.0}});
        auto r = C->multiply({{ka.second, 1.0}}, {{kb.second, 1.0}});
        for (const auto& [x, cx] : l)
          for (const auto& [y, cy] : r) rhs[{x, y}] += ca * cb * cx * cy;
      }
    double d = 0.0;
    for (const auto& [kk, c] : lhs) d = std::max(d, std::abs(c - rhs[kk]));
    for (const auto& [kk, c] : rhs) d = std::max(d, std::abs(c - lhs[kk]));
    CHECK(d < 1e-12);
    CHECK(std::abs(C->counit(C->multiply(ea, eb)) - 1.0) < 1e-15);
  }
}
