#pragma once

// Inner-loop kernels with a portable scalar reference and an AVX2/FMA
// variant. The active table is chosen once at first use from the CPU
// features; FBL_ISA=scalar in the environment (or force_isa) pins the
// reference path. All higher-level numerics go through these entry points.

#include <cstddef>
#include <span>
#include <string_view>

namespace fbl::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  Isa isa;
  // sum_i a_i b_i
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // (x, y) <- (c x - s y, s x + c y)
  void (*rot)(double* x, double* y, double c, double s, std::size_t n);
  // out[k] = (1-p) in[k] + p in[k-1], in[-1] = in[n] = 0, k in [0, n]; in has n entries, out n+1
  void (*bernoulli_step)(const double* in, double* out, double p, std::size_t n);
  // y += alpha * x .* x
  void (*axpy_sq)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the binary was built without the AVX2 translation unit.
const KernelTable* avx2_table() noexcept;
bool cpu_has_avx2() noexcept;

const KernelTable& active() noexcept;
void force_isa(Isa isa);
std::string_view isa_name(Isa isa) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void rot(std::span<double> x, std::span<double> y, double c, double s) noexcept {
  active().rot(x.data(), y.data(), c, s, x.size());
}
inline void axpy_sq(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy_sq(alpha, x.data(), y.data(), x.size());
}

}  // namespace fbl::kernels
