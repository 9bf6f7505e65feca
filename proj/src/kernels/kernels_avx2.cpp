// Built with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "fbl/kernels.hpp"

namespace fbl::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void rot_avx2(double* x, double* y, double c, double s, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d yi = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_fmsub_pd(vc, xi, _mm256_mul_pd(vs, yi)));
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vs, xi, _mm256_mul_pd(vc, yi)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void bernoulli_step_avx2(const double* in, double* out, double p, std::size_t n) {
  if (n == 0) {
    out[0] = 0.0;
    return;
  }
  const double q = 1.0 - p;
  const __m256d vp = _mm256_set1_pd(p);
  const __m256d vq = _mm256_set1_pd(q);
  out[0] = q * in[0];
  std::size_t k = 1;
  for (; k + 4 <= n; k += 4) {
    const __m256d cur = _mm256_loadu_pd(in + k);
    const __m256d prev = _mm256_loadu_pd(in + k - 1);
    _mm256_storeu_pd(out + k, _mm256_fmadd_pd(vq, cur, _mm256_mul_pd(vp, prev)));
  }
  for (; k < n; ++k) out[k] = q * in[k] + p * in[k - 1];
  out[n] = p * in[n - 1];
}

void axpy_sq_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(_mm256_mul_pd(va, xi), xi, _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i] * x[i];
}

}  // namespace

const KernelTable* avx2_table() noexcept {
  static const KernelTable table{Isa::avx2,       dot_avx2,    axpy_avx2, rot_avx2,
                                 bernoulli_step_avx2, axpy_sq_avx2};
  return &table;
}

}  // namespace fbl::kernels
