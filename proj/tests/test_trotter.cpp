#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "qlevy/constructions.hpp"
#include "qlevy/error.hpp"
#include "qlevy/trotter.hpp"

using namespace qlevy;

TEST_CASE("partitions") {
  Partition a = Partition::uniform(0.0, 1.0, 4);
  CHECK(a.size() == 4);
  CHECK(a.mesh() == doctest::Approx(0.25));
  Partition b({0.0, 0.1, 1.0});
  Partition c = common_refinement(a, b);
  CHECK(c.size() == 5);
  CHECK(c.refines(a));
  CHECK(c.refines(b));
  CHECK_FALSE(a.refines(b));
  CHECK(b.subdivided(0.2).mesh() <= 0.2);
  CHECK(b.subdivided(0.2).refines(b));
  CHECK_THROWS_AS(Partition({0.0, 0.0, 1.0}), InvalidParameter);
  std::mt19937_64 rng(1);
  Partition r = Partition::random(0.0, 2.0, 7, rng);
  CHECK(r.size() == 7);
  CHECK(r.start() == 0.0);
  CHECK(r.end() == 2.0);
}

TEST_CASE("nilpotent generator telescopes exactly") {
  CMatrix G = CMatrix::Zero(2, 2);
  G(0, 1) = 1.0;
  std::mt19937_64 rng(2);
  BanachProductReport r = banach_product_check(exact_matrix_family(G, 1.0), Partition::uniform(0.0, 1.0, 8), 3, rng);
  CHECK(r.maxLhs <= 1e-13);
  CHECK(r.pass);
  r = banach_product_check(exact_matrix_family(CMatrix::Zero(3, 3), 1.0), Partition::random(0.0, 2.0, 9, rng), 3, rng);
  CHECK(r.maxLhs == 0.0);
}

TEST_CASE("random matrix families respect the bound") {
  std::mt19937_64 rng(3);
  for (int inst = 0; inst < 100; ++inst) {
    MatrixFamily f = random_matrix_family(4, 3, 0.5, 1.0, 0.25, rng);
    CHECK(family_remainder_ratio(f, 16) <= 1.0 + 1e-12);
    for (int k = 0; k < 5; ++k) {
      Partition a = Partition::random(0.0, 1.0, 6, rng).subdivided(0.25);
      BanachProductReport r = banach_product_check(f, a, 2, rng);
      CHECK(r.pass);
    }
  }
  MatrixFamily f = random_matrix_family(4, 1, 0.5, 1.0, 0.1, rng);
  CHECK_THROWS_AS(banach_product_check(f, Partition::uniform(0.0, 1.0, 2), 1, rng), MeshTooCoarse);
}

TEST_CASE("coalgebra product check on a group-like element") {
  auto u1 = make_unitary_bialgebra(1);
  const cplx z(0.3, 0.4);
  LinearFunctional psi("z", [z](const Word& w) { return w == Word{0} ? z : cplx{}; });
  FunctionalFamily f = linear_family(psi, u1, 1.0);
  std::mt19937_64 rng(4);
  Partition a = Partition::random(0.0, 1.0, 5, rng);
  CoalgebraProductReport r = coalgebra_product_check(f, NcPoly::monomial({0}), *u1, a, rng);
  cplx prod = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) prod *= 1.0 + a.length(i) * z;
  CHECK(std::abs(r.product - prod) < 1e-14);
  CHECK(std::abs(r.lhs - std::abs(prod - std::exp(z))) < 1e-14);
  CHECK(r.pass);

  r = coalgebra_product_check(f, NcPoly::unit(), *u1, a, rng);
  CHECK(r.lhs < 1e-15);
}

TEST_CASE("coalgebra product check on the Azema generator") {
  AzemaModel m = make_azema(2.0);
  std::mt19937_64 rng(5);
  const NcPoly xxs = NcPoly::monomial({0, 1});
  // true semigroup: the product is the exponential itself
  CoalgebraProductReport r =
      coalgebra_product_check(semigroup_family(m.psi, m.azema, 1.0), xxs, *m.azema, Partition::uniform(0, 1, 4), rng);
  CHECK(r.lhs < 1e-12);
  CHECK(r.pass);

  // (x x*)^2 has a non-vanishing second convolution power, so the linear family feels the mesh
  const NcPoly c = NcPoly::monomial({0, 1, 0, 1});
  double prev = INFINITY;
  for (std::size_t n : {2u, 4u, 8u, 16u}) {
    r = coalgebra_product_check(linear_family(m.psi, m.azema, 1.0), c, *m.azema, Partition::uniform(0, 1, n), rng);
    CHECK(r.pass);
    CHECK(r.lhs < 0.6 * prev);
    prev = r.lhs;
  }
  CHECK(prev > 0.0);

  // product agrees with the convolution evaluated on the algebra
  FunctionalFamily lin = linear_family(m.psi, m.azema, 1.0);
  Partition a({0.0, 0.3, 0.5, 1.0});
  r = coalgebra_product_check(lin, c, *m.azema, a, rng);
  std::vector<LinearFunctional> fs;
  for (std::size_t i = 0; i < a.size(); ++i) fs.push_back(lin.member(a.length(i), 0));
  CHECK(std::abs(r.product - convolve_eval(fs, c, *m.azema)) < 1e-12);

  for (std::size_t n : {2u, 8u}) {
    r = coalgebra_product_check(mixed_family(m.psi, m.azema, 1.0), c, *m.azema, Partition::uniform(0, 1, n), rng);
    CHECK(r.pass);
  }
}
