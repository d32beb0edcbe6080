#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qlevy/constructions.hpp"
#include "qlevy/error.hpp"
#include "qlevy/subcoalg.hpp"

using namespace qlevy;

namespace {

const AzemaModel& az() {
  static AzemaModel m = make_azema(2.0);
  return m;
}

const Word one{}, x{0}, xs{1}, y{2};

}  // namespace

TEST_CASE("subcoalgebra of x") {
  const BialgebraSpec& B = *az().azema;
  Subcoalgebra s = subcoalgebra_of(NcPoly::monomial(x), B);
  CHECK(s.dim() == 3);
  for (const Word& w : {one, x, y}) CHECK(s.contains(NcPoly::monomial(w)));
  CHECK_FALSE(s.contains(NcPoly::monomial(xs)));
  CHECK(s.closure_residual() <= 1e-12);
}

TEST_CASE("subcoalgebra of x x*") {
  const BialgebraSpec& B = *az().azema;
  Subcoalgebra s = subcoalgebra_of(NcPoly::monomial({0, 1}), B);
  CHECK(s.dim() == 8);
  for (const Word& w : {one, x, xs, y, Word{2, 2}, Word{0, 2}, Word{1, 2}, Word{0, 1}})
    CHECK(s.contains(NcPoly::monomial(w)));
  CHECK(s.closure_residual() <= 1e-12);
  CHECK_THROWS_AS(subcoalgebra_of(NcPoly::monomial({0, 1}), B, 4), DimCapExceeded);
}

TEST_CASE("group-like elements span one dimension") {
  auto u1 = make_unitary_bialgebra(1);
  for (const Word& w : {Word{0}, Word{0, 0, 0}, Word{1, 1}}) {
    Subcoalgebra s = subcoalgebra_of(NcPoly::monomial(w), *u1);
    CHECK(s.dim() == 1);
    LinearFunctional psi("z", [](const Word&) { return cplx(0.3, -0.2); });
    TransferMatrix T = transfer_matrix(psi, s);
    CHECK(std::abs(T.matrix(0, 0) - cplx(0.3, -0.2)) < 1e-15);
    const double t = 1.7;
    CHECK(std::abs(conv_exp(psi, t, NcPoly::monomial(w), *u1) - std::exp(t * cplx(0.3, -0.2))) < 1e-13);
  }
}

TEST_CASE("random subcoalgebras are closed and structure constants reproduce Delta") {
  std::mt19937_64 rng(21);
  auto u2 = make_unitary_bialgebra(2);
  for (const BialgebraSpec* B : {az().azema.get(), az().primitive.get(), u2.get()}) {
    for (int k = 0; k < 15; ++k) {
      NcPoly p = random_poly(B->algebra(), 3, 3, rng);
      Subcoalgebra s = subcoalgebra_of(p, *B);
      CHECK(s.contains(p));
      CHECK(s.closure_residual() <= 1e-12);
    }
  }
}

TEST_CASE("transfer matrices") {
  const BialgebraSpec& B = *az().azema;
  Subcoalgebra s = subcoalgebra_of(NcPoly::monomial({0, 1, 2}), B);
  TransferMatrix T = transfer_matrix(counit_functional(az().azema), s);
  CHECK((T.matrix - CMatrix::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff() < 1e-14);

  Subcoalgebra sx = subcoalgebra_of(NcPoly::monomial(x), B);
  CHECK(transfer_matrix(az().psi, sx).matrix.cwiseAbs().maxCoeff() == 0.0);

  // M coords(b) = coords((id (x) psi) Delta b)
  T = transfer_matrix(az().psi, s);
  for (std::size_t i = 0; i < s.dim(); ++i) {
    const NcPoly img = slice_right(s.basis()[i], az().psi, B);
    CHECK((T.matrix.col(i) - s.coords(img)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("closed-form convolution exponentials") {
  for (double q : {-1.0, 0.5, 2.0}) {
    AzemaModel m = make_azema(q);
    for (double t : {0.0, 0.1, 1.0, 2.0}) {
      CHECK(std::abs(conv_exp(m.psi, t, NcPoly::monomial({0, 1}), *m.azema) - t) < 1e-12);
      CHECK(std::abs(conv_exp(m.psi, t, NcPoly::unit(), *m.azema) - 1.0) < 1e-14);
    }
  }
  // primitive b with psi(b) = z
  LinearFunctional psi("p", [](const Word& w) { return w == Word{0} ? cplx(0.5, 1.0) : cplx{}; });
  SeriesResult r = conv_exp_series(psi, 1.5, NcPoly::monomial(x), *az().primitive);
  CHECK(std::abs(r.value - 1.5 * cplx(0.5, 1.0)) < 1e-14);
  CHECK(std::abs(conv_exp(psi, 1.5, NcPoly::monomial(x), *az().primitive) - 1.5 * cplx(0.5, 1.0)) < 1e-13);

  r = conv_exp_series(az().psi, 0.7, NcPoly::unit(), *az().azema);
  CHECK(r.value == cplx{1.0});
  CHECK(r.terms == 1);
}

TEST_CASE("series oracle matches the matrix exponential") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const BialgebraSpec& B = *az().azema;
  for (int k = 0; k < 60; ++k) {
    NcPoly p = random_poly(B.algebra(), 4, 3, rng);
    const double t = u(rng);
    const cplx a = conv_exp(az().psi, t, p, B);
    const cplx b = conv_exp_series(az().psi, t, p, B).value;
    CHECK(std::abs(a - b) <= 1e-10);
  }
  // a generator whose convolution powers do not vanish
  LinearFunctional g("g", [](const Word& w) { return w.empty() ? cplx{} : cplx(0.2 * w.size(), 0.1); });
  for (int k = 0; k < 20; ++k) {
    NcPoly p = random_poly(B.algebra(), 3, 3, rng);
    CHECK(std::abs(conv_exp(g, 1.3, p, B) - conv_exp_series(g, 1.3, p, B).value) <= 1e-10);
  }
}

TEST_CASE("semigroup law, time zero and choice independence") {
  std::mt19937_64 rng(23);
  const BialgebraSpec& B = *az().azema;
  LinearFunctional f = conv_exp_functional(az().psi, 0.4, az().azema);
  LinearFunctional g = conv_exp_functional(az().psi, 0.9, az().azema);
  for (int k = 0; k < 30; ++k) {
    NcPoly p = random_poly(B.algebra(), 3, 3, rng);
    CHECK(std::abs(convolve_eval({f, g}, p, B) - conv_exp(az().psi, 1.3, p, B)) <= 1e-10);
    CHECK(conv_exp(az().psi, 0.0, p, B) == B.counit(p));

    NcPoly q = random_poly(B.algebra(), 4, 2, rng);
    Subcoalgebra big = subcoalgebra_of(p + q, B);
    big.absorb(p);
    CHECK(std::abs(conv_exp(az().psi, 0.8, p, big) - conv_exp(az().psi, 0.8, p, B)) <= 1e-12);
  }
}

TEST_CASE("hermitian generator gives positive values") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const BialgebraSpec& B = *az().azema;
  const AlgebraSpec& a = B.algebra();
  for (int k = 0; k < 40; ++k) {
    NcPoly p = random_poly(a, 2, 3, rng);
    const cplx v = conv_exp(az().psi, u(rng), a.multiply(a.involute(p), p), B);
    CHECK(v.real() >= -1e-10);
    CHECK(std::abs(v.imag()) <= 1e-10);
  }
}
