#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "qlevy/kernels.hpp"

using qlevy::kernels::cplx;
using qlevy::kernels::KernelTable;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<cplx> v(n);
  for (auto& z : v) z = {u(rng), u(rng)};
  return v;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Every table must agree with straightforward std::complex arithmetic.
void check_table(const KernelTable& t) {
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 1u, 2u, 3u, 7u, 16u, 33u, 100u}) {
    auto a = random_vec(n, rng), b = random_vec(n, rng);
    cplx ref{};
    for (std::size_t i = 0; i < n; ++i) ref += std::conj(a[i]) * b[i];
    CHECK(rel(t.dotc(a.data(), b.data(), n), ref) < 1e-13);

    auto y = random_vec(n, rng);
    auto yref = y;
    const cplx alpha{0.3, -1.7};
    for (std::size_t i = 0; i < n; ++i) yref[i] += alpha * a[i];
    t.axpy(alpha, a.data(), y.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(rel(y[i], yref[i]) < 1e-14);

    auto f = random_vec(n, rng, 1.2);
    cplx pref{1.0, 0.0};
    for (auto z : f) pref *= z;
    CHECK(rel(t.product(f.data(), n), pref) < 1e-12);
  }
  for (std::size_t rows : {1u, 3u, 8u, 9u}) {
    for (std::size_t cols : {1u, 4u, 5u}) {
      auto a = random_vec(rows * cols, rng), x = random_vec(cols, rng);
      std::vector<cplx> y(rows), yref(rows);
      for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r) yref[r] += a[c * rows + r] * x[c];
      t.gemv(a.data(), rows, cols, x.data(), y.data());
      for (std::size_t r = 0; r < rows; ++r) CHECK(rel(y[r], yref[r]) < 1e-13);
    }
  }
}

}  // namespace

TEST_CASE("scalar kernels match std::complex arithmetic") { check_table(qlevy::kernels::scalar_table()); }

TEST_CASE("avx2 kernels match std::complex arithmetic") {
  const KernelTable* t = qlevy::kernels::avx2_table();
  if (t == nullptr) {
    MESSAGE("AVX2 not available on this host; skipped");
    return;
  }
  check_table(*t);
}

TEST_CASE("scalar and avx2 kernels agree on long inputs") {
  const KernelTable* t = qlevy::kernels::avx2_table();
  if (t == nullptr) return;
  const KernelTable& s = qlevy::kernels::scalar_table();
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + rng() % 500;
    auto a = random_vec(n, rng), b = random_vec(n, rng);
    CHECK(rel(t->dotc(a.data(), b.data(), n), s.dotc(a.data(), b.data(), n)) < 1e-12);
    auto f = random_vec(n, rng, 1.0);
    for (auto& z : f) z = 1.0 + 0.01 * z;
    CHECK(rel(t->product(f.data(), n), s.product(f.data(), n)) < 1e-12);
  }
}

TEST_CASE("active table honours the environment override") {
  const auto& a = qlevy::kernels::active();
  CHECK((a.name == "scalar" || a.name == "avx2"));
}
