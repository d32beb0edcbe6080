#include "qlevy/kernels.hpp"

namespace qlevy::kernels {
namespace {

// Plain component arithmetic: std::complex operator* goes through the
// Annex G NaN-recovery path, which we do not want in the reference kernel.
inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

cplx dotc_scalar(const cplx* a, const cplx* b, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

void axpy_scalar(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += mul(alpha, x[i]);
}

void gemv_scalar(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = 0.0;
  for (std::size_t c = 0; c < cols; ++c) {
    if (x[c] == cplx{}) continue;
    axpy_scalar(x[c], a + c * rows, y, rows);
  }
}

cplx product_scalar(const cplx* a, std::size_t n) {
  cplx acc{1.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc = mul(acc, a[i]);
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dotc_scalar, axpy_scalar, gemv_scalar, product_scalar};
  return table;
}

}  // namespace qlevy::kernels
