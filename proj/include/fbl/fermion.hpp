#pragma once

// Ground-state functionals built from the Fermi projector and the Gram
// spectrum of its restriction to a region.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fbl/grid.hpp"
#include "fbl/matrix.hpp"
#include "fbl/spectral.hpp"

namespace fbl {

/// Columns are the occupied eigenvectors, Euclidean-normalized, so U^T U = I
/// and the kernel is Pi(x_i, x_j) = (U U^T)_ij / h^n.
struct FermiProjector {
  Matrix u;
  Grid grid;
  double hbar = 0.0;
  double mu = 0.0;

  [[nodiscard]] std::size_t count() const noexcept { return u.cols(); }
  [[nodiscard]] std::size_t nodes() const noexcept { return u.rows(); }
  /// Kernel value Pi(x_i, x_j).
  [[nodiscard]] double kernel(std::size_t i, std::size_t j) const;
  [[nodiscard]] std::uint64_t grid_fingerprint() const noexcept { return grid.fingerprint(); }
};

FermiProjector fermi_projector(const SpectralData& spectral, double mu);

/// G = U^T diag(w) U restricted to the listed rows (w = 1 when empty).
Matrix weighted_gram(const FermiProjector& proj, std::span<const std::size_t> rows,
                     std::span<const double> weights = {});

struct RestrictedSpectrum {
  std::vector<double> sigma;  // descending, clamped to [0, 1]
  double gram_trace = 0.0;
  double max_excursion = 0.0;  // largest distance outside [0, 1] before clamping
  std::uint64_t region_fingerprint = 0;
  double hbar = 0.0;
};

/// Eigenvalues of U_Omega^T U_Omega.
RestrictedSpectrum restricted_spectrum(const FermiProjector& proj, const Mask& mask,
                                       std::uint64_t region_fingerprint = 0);
/// Wraps given values (sorted descending, clamped with the same rules).
RestrictedSpectrum restricted_spectrum_from(std::vector<double> sigma);

/// s(l) = -l log l - (1-l) log(1-l), 0 log 0 = 0
double binary_entropy(double l) noexcept;

struct CommutatorReport {
  double j2_squared = 0.0;  // 2 sum s(1-s)
  double j1 = 0.0;          // 2 sum sqrt(s(1-s))
  double variance = 0.0;    // sum s(1-s)
  double entropy = 0.0;     // sum binary_entropy(s)
};

CommutatorReport commutator_report(const RestrictedSpectrum& sigma);

struct SpectralLinkReport {
  std::vector<double> from_compression;  // 2x {l(1-l)} over spec(PQP), descending, padded to dim
  std::vector<double> from_commutator;   // spec(-[P,Q]^2), descending
  double max_deviation = 0.0;
  double trace_compression = 0.0;  // 2 tr g(PQP), g(l) = l(1-l)
  double trace_commutator = 0.0;   // tr(-[P,Q]^2)
  [[nodiscard]] bool matches(double tol = 1e-8) const noexcept {
    return max_deviation <= tol && std::abs(trace_compression - trace_commutator) <= tol;
  }
};

/// P, Q symmetric idempotent (to 1e-10), dimension <= 64.
SpectralLinkReport spectral_link_check(const Matrix& p, const Matrix& q);

struct EntropySandwich {
  double lower = 0.0;
  double entropy = 0.0;
  double upper = 0.0;
};

/// lower = j2^2, upper = 2 j2^2 log(j1 / j2^2). Throws DegenerateSpectrum
/// when j2^2 = 0 (the entropy is then 0).
EntropySandwich entropy_sandwich(const RestrictedSpectrum& sigma);

struct CountingLaw {
  std::vector<double> pmf;  // P(X = k), k = 0..N
  double mean = 0.0;
  double variance = 0.0;
  double kappa3 = 0.0;
  double kappa4 = 0.0;
};

constexpr std::size_t kMaxCountingParameters = 20000;

CountingLaw counting_law(const RestrictedSpectrum& sigma);

/// First four cumulants computed from a pmf over {0, 1, ...}.
std::array<double, 4> pmf_cumulants(std::span<const double> pmf);

struct GaussianityReport {
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  double ks_half_integer = 0.0;
};

GaussianityReport gaussianity_report(const CountingLaw& law);

/// log det(I + U^T diag(e^w - 1) U), w given per node.
double laplace_transform(const FermiProjector& proj, std::span<const double> weights);

/// Cov(X(A), X(B)) = tr G_{A and B} - tr(G_A G_B)
double cross_covariance(const FermiProjector& proj, const Mask& a, const Mask& b);

/// Var X(f) = tr G_{f^2} - ||G_f||_F^2, f given per node (zero off the region).
double observable_variance(const FermiProjector& proj, std::span<const double> f);

/// Named test functions on [0, 1].
struct SpectralFunction {
  std::string name;
  std::function<double(double)> g;
};

SpectralFunction variance_function();
SpectralFunction entropy_function();
/// log(l^a + (1-l)^a) / (1 - a); a = 1 gives the binary entropy.
SpectralFunction renyi_function(double alpha);
/// sum_k c_k l^k
SpectralFunction poly_function(std::vector<double> coeffs);

/// sum g(sigma_n)
double spectral_functional(const RestrictedSpectrum& sigma, const std::function<double(double)>& g);

}  // namespace fbl
