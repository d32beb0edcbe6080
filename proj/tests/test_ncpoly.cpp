#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qlevy/constructions.hpp"
#include "qlevy/error.hpp"
#include "qlevy/ncpoly.hpp"

using namespace qlevy;

namespace {

const AlgebraSpec& azema2() {
  static AzemaModel m = make_azema(2.0);
  return m.azema->algebra();
}

NcPoly P(const char* s, const AlgebraSpec& a) { return parse_poly(s, a); }

}  // namespace

TEST_CASE("Azema normal forms move y to the right") {
  const AlgebraSpec& a = azema2();
  const Letter x = 0, y = 2;
  NcPoly r = a.normal_form(Word{y, x});
  CHECK(r.size() == 1);
  CHECK(std::abs(r.coeff({x, y}) - 0.5) < 1e-15);

  CHECK(a.normal_form(Word{}) == NcPoly::unit());

  r = a.normal_form(Word{x, y, x});
  CHECK(r.size() == 1);
  CHECK(std::abs(r.coeff({x, x, y}) - 0.5) < 1e-15);
}

TEST_CASE("multiply") {
  const AlgebraSpec& a = azema2();
  std::mt19937_64 rng(1);
  NcPoly p = random_poly(a, 3, 4, rng);
  CHECK(max_diff(multiply(NcPoly::unit(), p, a), p) == 0.0);
  CHECK(max_diff(multiply(P("y", a), P("x", a), a), P("0.5 x y", a)) < 1e-15);

  auto u1 = make_unitary_bialgebra(1);
  CHECK(max_diff(multiply(P("x", u1->algebra()), P("x^*", u1->algebra()), u1->algebra()), NcPoly::unit()) < 1e-15);
}

TEST_CASE("involute") {
  const AlgebraSpec& a = azema2();
  // ((2+i) x y)* = (2-i) y x* = (2-i) q x* y
  NcPoly p = P("(2+1i) x y", a);
  NcPoly expect = NcPoly::monomial({1, 2}, cplx(2.0, -1.0) * 2.0);
  CHECK(max_diff(involute(p, a), expect) < 1e-14);
  CHECK(involute(NcPoly::unit(), a) == NcPoly::unit());

  std::mt19937_64 rng(2);
  for (int k = 0; k < 100; ++k) {
    NcPoly q = random_poly(a, 4, 3, rng);
    CHECK(max_diff(involute(involute(q, a), a), q) < 1e-13);
  }
}

TEST_CASE("linear_combine") {
  const AlgebraSpec& a = azema2();
  NcPoly p = P("x + 2 y", a);
  CHECK(linear_combine({1.0, -1.0}, {p, p}).is_zero());
  CHECK(max_diff(linear_combine({2.0, 3.0}, {P("x", a), P("x", a)}), P("5 x", a)) == 0.0);
  NcPoly r = linear_combine({1.0, 1e-16}, {P("x", a), P("y", a)});
  CHECK(r == P("x", a));
  CHECK_THROWS_AS(linear_combine({1.0}, {p, p}), LengthMismatch);
}

TEST_CASE("parse_poly") {
  auto u1 = make_unitary_bialgebra(1);
  CHECK(max_diff(P("x^* x + 1", u1->algebra()), NcPoly::scalar(2.0)) < 1e-15);

  const AlgebraSpec& a = azema2();
  CHECK(P("(2+1i) x y^2", a) == NcPoly::monomial({0, 2, 2}, cplx(2.0, 1.0)));
  CHECK(P("-x + (0.5-2i) x^* y - 3", a).size() == 3);
  CHECK(P("x^*^2", a) == NcPoly::monomial({1, 1}));
  CHECK(P("1.5e1 y", a) == NcPoly::monomial({2}, 15.0));

  try {
    P("x ^", a);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(P("x +", a), ParseError);
  CHECK_THROWS_AS(P("(1+2) x", a), ParseError);
  CHECK_THROWS_AS(P("z", a), UnknownGenerator);
}

TEST_CASE("format round-trips through the parser") {
  const AlgebraSpec& a = azema2();
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    NcPoly p = random_poly(a, 4, 4, rng);
    CHECK(max_diff(P(a.format(p).c_str(), a), p) < 1e-15);
  }
}

TEST_CASE("normal_form is idempotent on random inputs") {
  auto u2 = make_unitary_bialgebra(2);
  for (const AlgebraSpec* a : {&azema2(), &u2->algebra()}) {
    std::mt19937_64 rng(4);
    for (int k = 0; k < 100; ++k) {
      NcPoly p = random_poly(*a, 6, 3, rng);
      CHECK(a->normal_form(p) == p);
    }
  }
}

TEST_CASE("multiply is associative and involute is an anti-homomorphism") {
  auto u2 = make_unitary_bialgebra(2);
  for (const AlgebraSpec* a : {&azema2(), &u2->algebra()}) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 60; ++k) {
      NcPoly p = random_poly(*a, 3, 2, rng), q = random_poly(*a, 3, 2, rng), r = random_poly(*a, 3, 2, rng);
      CHECK(max_diff(a->multiply(a->multiply(p, q), r), a->multiply(p, a->multiply(q, r))) < 1e-12);
      CHECK(max_diff(a->involute(a->multiply(p, q)), a->multiply(a->involute(q), a->involute(p))) < 1e-12);
    }
  }
}

TEST_CASE("each rewrite step decreases in degree-lex order") {
  auto u2 = make_unitary_bialgebra(2);
  for (const AlgebraSpec* a : {&azema2(), &u2->algebra()}) {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> letter(0, static_cast<int>(a->size()) - 1);
    std::size_t steps = 0, bad = 0;
    DegLex less;
    for (int k = 0; k < 100; ++k) {
      Word w(1 + k % 6);
      for (Letter& l : w) l = static_cast<Letter>(letter(rng));
      a->normal_form(NcPoly::monomial(w), [&](const Word& from, const Word& to) {
        ++steps;
        if (!less(to, from)) ++bad;
      });
    }
    CHECK(steps > 0);
    CHECK(bad == 0);
  }
}

TEST_CASE("shipped orientations pass the confluence smoke test") {
  std::mt19937_64 rng(7);
  CHECK(confluence_smoke_test(azema2(), 200, 6, rng) == 0);
  CHECK(confluence_smoke_test(make_unitary_bialgebra(2)->algebra(), 200, 6, rng) == 0);
  CHECK(confluence_smoke_test(make_unitary_bialgebra(3)->algebra(), 200, 5, rng) == 0);
}

TEST_CASE("invalid rule systems are rejected") {
  std::vector<GeneratorSymbol> ab{{"a", 0, 1.0}, {"b", 1, 1.0}};
  // Increasing rule.
  CHECK_THROWS_AS(AlgebraSpec(ab, {{{0, 1}, NcPoly::monomial({1, 0})}}), InvalidSpec);
  // Broken adjoint pairing.
  CHECK_THROWS_AS(AlgebraSpec({{"a", 1, 1.0}, {"b", 1, 1.0}}, {}), InvalidSpec);
  CHECK_THROWS_AS(AlgebraSpec({{"a", 0, 1.0}, {"a", 1, 1.0}}, {}), InvalidSpec);
  CHECK_THROWS_AS(make_azema(0.0), InvalidParameter);
}

TEST_CASE("rewrite budget") {
  // b a -> a b + a c doubles the number of words each time an a moves left.
  std::vector<GeneratorSymbol> g{{"a", 5, 1.0}, {"b", 4, 1.0}, {"c", 3, 1.0},
                                 {"cs", 2, 1.0}, {"bs", 1, 1.0}, {"as", 0, 1.0}};
  NcPoly rhs = NcPoly::monomial({0, 1}) + NcPoly::monomial({0, 2});
  NcPoly rhsStar = NcPoly::monomial({4, 5}) + NcPoly::monomial({3, 5});
  std::vector<RewriteRule> rules{{{1, 0}, rhs}, {{2, 0}, rhs}, {{5, 4}, rhsStar}, {{5, 3}, rhsStar}};
  AlgebraSpec alg(g, rules);
  Word w(20, 1);
  w.push_back(0);
  CHECK(alg.normal_form(Word{1, 1, 0}).size() == 4);
  CHECK_THROWS_AS(alg.normal_form(w), RewriteBudgetExceeded);
}

TEST_CASE("degree cap") {
  AlgebraSpec alg({{"a", 0, 1.0}}, {}, 2);
  CHECK_NOTHROW(alg.normal_form(Word{0, 0}));
  CHECK_THROWS_AS(alg.normal_form(Word{0, 0, 0}), DegreeCapExceeded);
}
