#pragma once

// Closed-form constants and limiting coefficients for sweep comparisons.

#include <functional>

#include "fbl/grid.hpp"
#include "fbl/schrodinger.hpp"

namespace fbl {

/// c_n = pi^{n/2} / Gamma(n/2 + 1), the volume of the unit ball (c_0 = 1).
double ball_volume(int n);

using BoundaryFunction = std::function<double(Point)>;

/// C_{Omega,f} = c_{n-1}/(2 pi^2) int_{dOmega} (mu - V)_+^{(n-1)/2} f^2.
/// 1D: finite sum over endpoints. 2D: composite Gauss-Legendre over each
/// smooth boundary piece with `panels` panels (>= 256).
double variance_coefficient(const Region& region, const Potential& potential, double mu,
                            const BoundaryFunction& f, std::size_t panels = 256);
double variance_coefficient(const Region& region, const Potential& potential, double mu);

/// (2 pi r)^{n-1} (mu - v(r))^{(n-1)/2} / (pi^2 Gamma(n))
double disk_variance_coefficient(int n, double r, double v_of_r, double mu);

/// int_0^1 g(l) / (l (1 - l)) dl with the endpoint substitution l = u^2 (3 - 2u).
double widom_integral(const std::function<double(double)>& g);
/// 2 C int_0^1 g / (l (1 - l)) dl
double widom_limit(const std::function<double(double)>& g, double c_omega);

/// pi^2 / 3
double entropy_variance_target();

}  // namespace fbl
