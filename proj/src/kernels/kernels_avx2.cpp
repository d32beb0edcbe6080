// Compiled with -mavx2 -mfma; only reached through avx2_table() after the
// runtime CPU check in dispatch.cpp.

#include <immintrin.h>

#include "qlevy/kernels.hpp"

namespace qlevy::kernels::avx2 {
namespace {

// Two complex numbers per register, interleaved [re0, im0, re1, im1].
inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d are = _mm256_movedup_pd(a);
  const __m256d aim = _mm256_permute_pd(a, 0xF);
  const __m256d bsw = _mm256_permute_pd(b, 0x5);
  return _mm256_fmaddsub_pd(are, b, _mm256_mul_pd(aim, bsw));
}

inline cplx scalar_mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

cplx dotc(const cplx* a, const cplx* b, std::size_t n) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = load2(a + i);
    const __m256d vb = load2(b + i);
    acc_re = _mm256_fmadd_pd(va, vb, acc_re);
    acc_im = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), acc_im);
  }
  alignas(32) double re[4];
  alignas(32) double im[4];
  _mm256_store_pd(re, acc_re);
  _mm256_store_pd(im, acc_im);
  double sre = re[0] + re[1] + re[2] + re[3];
  double sim = (im[0] - im[1]) + (im[2] - im[3]);
  for (; i < n; ++i) {
    sre += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    sim += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {sre, sim};
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = load2(x + i);
    const __m256d t = _mm256_mul_pd(ai, _mm256_permute_pd(vx, 0x5));
    store2(y + i, _mm256_add_pd(load2(y + i), _mm256_fmaddsub_pd(ar, vx, t)));
  }
  for (; i < n; ++i) y[i] += scalar_mul(alpha, x[i]);
}

void gemv(const cplx* a, std::size_t rows, std::size_t cols, const cplx* x, cplx* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = 0.0;
  for (std::size_t c = 0; c < cols; ++c) {
    if (x[c] == cplx{}) continue;
    axpy(x[c], a + c * rows, y, rows);
  }
}

cplx product(const cplx* a, std::size_t n) {
  __m256d acc = _mm256_setr_pd(1.0, 0.0, 1.0, 0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = cmul(acc, load2(a + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  cplx result = scalar_mul({lanes[0], lanes[1]}, {lanes[2], lanes[3]});
  for (; i < n; ++i) result = scalar_mul(result, a[i]);
  return result;
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{"avx2", dotc, axpy, gemv, product};
  return t;
}

}  // namespace qlevy::kernels::avx2
