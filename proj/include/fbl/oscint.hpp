#pragma once

// Fourier transform of the unit-ball indicator and stationary phase for
// quadratic phases Phi(x) = x.Hx/2, each with a brute-force quadrature check.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>

#include "fbl/grid.hpp"

namespace fbl {

/// J_{n/2}(xi) / xi^{n/2}, the transform (2 pi)^{-n/2} int_B e^{-i x.xi} dx; n in {1, 2, 3}.
double ball_indicator_ft(int n, double xi);

/// 2 cos(xi - (n+1) pi/4) / (sqrt(2 pi) xi^{(n+1)/2}); xi >= 5.
double ball_ft_asymptotic(int n, double xi);

/// J_nu(x) for nu in {1/2, 1, 3/2}: ascending series up to x = 12, Hankel
/// expansion beyond.
double bessel_j(double nu, double x);

struct StationaryPhaseProblem {
  int dim = 1;
  std::array<double, 4> hessian{1.0, 0.0, 0.0, 1.0};  // row-major; dim 1 uses [0]
  std::function<double(Point)> amplitude;
  double delta = 1.0;           // amplitude scale
  double support_radius = 1.0;  // amplitude vanishes outside [-R, R]^d
  double hbar = 0.1;
  /// Optional exact derivatives d^{px+py} a / dx^px dy^py at 0.
  std::function<double(int, int)> derivatives;
};

/// Normalized expansion sum_{k<order} hbar^k i^{-alpha} |det H|^{-1/2}
/// ((i/2) grad.H^{-1}grad)^k a(0) / k!; multiply by (2 pi i hbar)^{d/2}
/// (see stationary_phase_prefactor) for the raw integral.
std::complex<double> stationary_phase_expand(const StationaryPhaseProblem& problem, int order);

/// (2 pi i hbar)^{d/2}, principal branch.
std::complex<double> stationary_phase_prefactor(int dim, double hbar);

struct OscillatoryIntegral {
  std::complex<double> value;
  double error_estimate = 0.0;
  std::size_t samples = 0;
};

constexpr std::size_t kOscillatoryBudget = 1000000;

/// int e^{i Phi(x)/hbar} a(x) dx over [-R, R]^d by composite 16-point
/// Gauss-Legendre panels (>= 16 nodes per local period), refined by panel
/// doubling until the estimate is <= 1e-9 (2R)^d.
OscillatoryIntegral brute_force_oscillatory(const StationaryPhaseProblem& problem);

}  // namespace fbl
