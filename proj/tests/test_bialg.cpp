#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qlevy/bialg.hpp"
#include "qlevy/constructions.hpp"
#include "qlevy/error.hpp"

using namespace qlevy;

namespace {

const AzemaModel& az() {
  static AzemaModel m = make_azema(2.0);
  return m;
}

TensorPoly T(std::initializer_list<std::tuple<Word, Word, cplx>> terms) {
  TensorPoly t;
  for (const auto& [a, b, c] : terms) t.add(a, b, c);
  return t;
}

const Word one{}, x{0}, xs{1}, y{2};

}  // namespace

TEST_CASE("Azema coproduct on generators and products") {
  const BialgebraSpec& B = *az().azema;
  CHECK(max_diff(B.coproduct(NcPoly::monomial(x)), T({{x, y, 1.0}, {one, x, 1.0}})) == 0.0);
  CHECK(max_diff(B.coproduct(NcPoly::unit()), T({{one, one, 1.0}})) == 0.0);
  // Delta(x x*) = x x* (x) y^2 + q x (x) x* y + x* (x) x y + 1 (x) x x*
  TensorPoly expect = T({{{0, 1}, {2, 2}, 1.0}, {x, {1, 2}, 2.0}, {xs, {0, 2}, 1.0}, {one, {0, 1}, 1.0}});
  CHECK(max_diff(B.coproduct(NcPoly::monomial({0, 1})), expect) < 1e-15);
}

TEST_CASE("counit") {
  const BialgebraSpec& B = *az().azema;
  CHECK(B.counit(NcPoly::monomial({0, 0, 2})) == cplx{});
  CHECK(B.counit(NcPoly::unit()) == cplx{1.0});
  CHECK(B.counit(NcPoly::monomial({2, 2, 2})) == cplx{1.0});
}

TEST_CASE("iterated coproduct") {
  const BialgebraSpec& B = *az().azema;
  SweedlerExpansion e = iterated_coproduct(NcPoly::monomial(y), 3, B);
  CHECK(e.size() == 1);
  CHECK(e.terms.at({y, y, y}) == cplx{1.0});

  e = iterated_coproduct(NcPoly::monomial(x), 3, B);
  CHECK(e.size() == 3);
  CHECK(e.terms.at({x, y, y}) == cplx{1.0});
  CHECK(e.terms.at({one, x, y}) == cplx{1.0});
  CHECK(e.terms.at({one, one, x}) == cplx{1.0});

  e = iterated_coproduct(NcPoly::unit(), 5, B);
  CHECK(e.size() == 1);
  CHECK(e.terms.at(Tuple(5, one)) == cplx{1.0});

  e = iterated_coproduct(NcPoly::monomial(x), 1, B);
  CHECK(e.terms.at({x}) == cplx{1.0});
  CHECK_THROWS_AS(iterated_coproduct(NcPoly::monomial(x), 0, B), InvalidParameter);
  CHECK_THROWS_AS(iterated_coproduct(NcPoly::monomial({0, 1, 0, 1}), 40, B, 1000), TermBudgetExceeded);
}

TEST_CASE("counit contraction of Delta_3 reproduces Delta_2") {
  std::mt19937_64 rng(1);
  for (const BialgebraSpec* B : {az().azema.get(), az().primitive.get()}) {
    for (int k = 0; k < 30; ++k) {
      NcPoly p = random_poly(B->algebra(), 4, 3, rng);
      SweedlerExpansion e3 = iterated_coproduct(p, 3, *B);
      SweedlerExpansion e2 = iterated_coproduct(p, 2, *B);
      for (std::size_t i = 0; i < 3; ++i) CHECK(max_diff(contract_leg(e3, i, *B), e2) < 1e-12);
    }
  }
}

TEST_CASE("convolve_eval") {
  const BialgebraSpec& B = *az().azema;
  LinearFunctional delta = counit_functional(az().azema);
  const LinearFunctional& psi = az().psi;
  std::mt19937_64 rng(2);
  for (int k = 0; k < 50; ++k) {
    NcPoly p = random_poly(B.algebra(), 4, 3, rng);
    CHECK(std::abs(convolve_eval({delta, psi}, p, B) - psi(p)) < 1e-13);
    CHECK(std::abs(convolve_eval({psi, delta}, p, B) - psi(p)) < 1e-13);
  }
  const NcPoly xxs = NcPoly::monomial({0, 1});
  CHECK(std::abs(convolve_eval({psi, psi}, xxs, B)) < 1e-15);
  CHECK(convolve_eval({psi}, xxs, B) == cplx{1.0});
}

TEST_CASE("convolve_eval agrees with the explicit leg sum and is associative") {
  auto u2 = make_unitary_bialgebra(2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const BialgebraSpec* B : {az().azema.get(), u2.get()}) {
    std::vector<LinearFunctional> fs;
    for (int i = 0; i < 3; ++i) {
      std::map<Word, cplx> table;
      for (const Word& w : normal_words(B->algebra(), 4)) table[w] = {u(rng), u(rng)};
      table[{}] = 1.0;
      fs.push_back(table_functional("f" + std::to_string(i), table, false));
    }
    LinearFunctional f12("f1*f2", [&](const Word& w) { return convolve_eval({fs[0], fs[1]}, NcPoly::monomial(w), *B); });
    LinearFunctional f23("f2*f3", [&](const Word& w) { return convolve_eval({fs[1], fs[2]}, NcPoly::monomial(w), *B); });
    for (int k = 0; k < 20; ++k) {
      NcPoly p = random_poly(B->algebra(), 3, 3, rng);
      const cplx direct = convolve_eval(fs, p, *B);
      CHECK(std::abs(direct - convolve_eval_legs(fs, p, *B)) < 1e-12);
      CHECK(std::abs(convolve_eval({f12, fs[2]}, p, *B) - direct) < 1e-12);
      CHECK(std::abs(convolve_eval({fs[0], f23}, p, *B) - direct) < 1e-12);
    }
  }
}

TEST_CASE("Azema generator is hermitian") {
  std::mt19937_64 rng(4);
  CHECK(az().psi.hermitian());
  CHECK(hermitian_residual(az().psi, az().azema->algebra(), 100, 5, rng) < 1e-12);
}

TEST_CASE("axiom checker on shipped bialgebras") {
  std::mt19937_64 rng(5);
  AxiomReport r = check_bialgebra_axioms(*az().azema, 4, 100, rng);
  CHECK(r.worst() <= 1e-12);
  r = check_bialgebra_axioms(*az().primitive, 4, 100, rng);
  CHECK(r.worst() <= 1e-12);
  auto u2 = make_unitary_bialgebra(2);
  r = check_bialgebra_axioms(*u2, 3, 100, rng);
  CHECK(r.worst() <= 1e-12);
  auto u1 = make_unitary_bialgebra(1);
  r = check_bialgebra_axioms(*u1, 4, 100, rng);
  CHECK(r.worst() <= 1e-12);
}

TEST_CASE("axiom checker flags a corrupted coproduct") {
  const BialgebraSpec& A = *az().azema;
  std::vector<TensorPoly> delta;
  std::vector<cplx> eps;
  for (Letter g = 0; g < 3; ++g) {
    delta.push_back(A.delta_on_gen(g));
    eps.push_back(A.counit_on_gen(g));
  }
  delta[0] = T({{x, x, 1.0}});
  BialgebraSpec bad("bad", A.algebra_ptr(), delta, eps);
  std::mt19937_64 rng(6);
  AxiomReport r = check_bialgebra_axioms(bad, 3, 20, rng);
  CHECK(r.counitLaw == doctest::Approx(1.0).epsilon(1e-12));
}
