#include "fbl/kernels.hpp"

namespace fbl::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  // four accumulators, same reduction tree shape as the vector path
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  double s = (s0 + s2) + (s1 + s3);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void rot_scalar(double* x, double* y, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void bernoulli_step_scalar(const double* in, double* out, double p, std::size_t n) {
  if (n == 0) {
    out[0] = 0.0;
    return;
  }
  const double q = 1.0 - p;
  out[0] = q * in[0];
  for (std::size_t k = 1; k < n; ++k) out[k] = q * in[k] + p * in[k - 1];
  out[n] = p * in[n - 1];
}

void axpy_sq_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i] * x[i];
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{Isa::scalar,       dot_scalar,    axpy_scalar, rot_scalar,
                                 bernoulli_step_scalar, axpy_sq_scalar};
  return table;
}

}  // namespace fbl::kernels
