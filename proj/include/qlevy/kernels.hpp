#pragma once

// Complex double-precision vector kernels used by the Fock and Gram engines.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2/FMA implementation. The active table is chosen once at first use from
// the CPU's capabilities; QLEVY_SIMD=scalar in the environment forces the
// reference path. Both paths are exercised by tests/test_kernels.cpp.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace qlevy::kernels {

using cplx = std::complex<double>;

struct KernelTable {
  std::string_view name;
  /// sum_i conj(a[i]) * b[i]
  cplx (*dotc)(const cplx* a, const cplx* b, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::size_t n);
  /// y = A x for a column-major rows x cols matrix A
  void (*gemv)(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y);
  /// prod_i a[i]
  cplx (*product)(const cplx* a, std::size_t n);
};

const KernelTable& scalar_table();
/// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

/// Table selected for this process.
const KernelTable& active();

inline cplx dotc(std::span<const cplx> a, std::span<const cplx> b) {
  return active().dotc(a.data(), b.data(), a.size());
}
inline void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline cplx product(std::span<const cplx> a) { return active().product(a.data(), a.size()); }

}  // namespace qlevy::kernels
