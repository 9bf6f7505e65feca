#include "fbl/predictions.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fbl/error.hpp"

namespace fbl {

double ball_volume(int n) {
  if (n < 0) throw Error(Errc::invalid_argument, "ball dimension must be >= 0");
  switch (n) {
    case 0: return 1.0;
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    default: return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
  }
}

namespace {

double bulk_margin(const Potential& potential, double mu, Point x, int dim) {
  const double v = potential.value(x, dim);
  if (!(v < mu - 1e-6)) {
    std::ostringstream os;
    os << "boundary point (" << x[0] << ", " << x[1] << ") has V = " << v << ", not below mu = " << mu;
    throw Error(Errc::region_not_in_bulk, os.str());
  }
  return mu - v;
}

}  // namespace

double variance_coefficient(const Region& region, const Potential& potential, double mu, const BoundaryFunction& f,
                            std::size_t panels) {
  const int n = region.dim();
  const double pref = ball_volume(n - 1) / (2.0 * std::numbers::pi * std::numbers::pi);
  if (n == 1) {
    double s = 0.0;
    for (double x : region.boundary_points_1d()) {
      bulk_margin(potential, mu, {x, 0.0}, 1);
      const double fx = f({x, 0.0});
      s += fx * fx;
    }
    return pref * s;
  }
  if (panels < 256) panels = 256;
  using GL = boost::math::quadrature::gauss<double, 16>;
  double total = 0.0;
  for (std::size_t piece = 0; piece < region.boundary_piece_count(); ++piece) {
    for (std::size_t k = 0; k < panels; ++k) {
      const double a = static_cast<double>(k) / static_cast<double>(panels);
      const double b = static_cast<double>(k + 1) / static_cast<double>(panels);
      total += GL::integrate(
          [&](double t) {
            const auto s = region.boundary_point(piece, t);
            const double fx = f(s.x);
            return std::sqrt(bulk_margin(potential, mu, s.x, 2)) * fx * fx * s.speed;
          },
          a, b);
    }
  }
  return pref * total;
}

double variance_coefficient(const Region& region, const Potential& potential, double mu) {
  return variance_coefficient(region, potential, mu, [](Point) { return 1.0; });
}

double disk_variance_coefficient(int n, double r, double v_of_r, double mu) {
  if (n < 1) throw Error(Errc::invalid_argument, "dimension must be >= 1");
  if (v_of_r > mu) throw Error(Errc::outside_bulk, "v(r) exceeds mu");
  const double nd = n;
  return std::pow(2.0 * std::numbers::pi * r, nd - 1.0) * std::pow(mu - v_of_r, (nd - 1.0) / 2.0) /
         (std::numbers::pi * std::numbers::pi * std::tgamma(nd));
}

double widom_integral(const std::function<double(double)>& g) {
  // l = u^2 (3 - 2u), 1 - l = (1 - u)^2 (1 + 2u), dl = 6 u (1 - u) du
  auto integrand = [&](double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double l = u * u * (3.0 - 2.0 * u);
    return g(l) * 6.0 / (u * (3.0 - 2.0 * u) * (1.0 - u) * (1.0 + 2.0 * u));
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double err = 0.0, l1 = 0.0;
  const double value = GK::integrate(integrand, 0.0, 1.0, 20, 1e-13, &err, &l1);
  if (!std::isfinite(value) || !std::isfinite(err) || err > 1e-8 * std::max(1.0, std::abs(value)))
    throw Error(Errc::non_integrable, "g/(l(1-l)) is not integrable on (0, 1)");
  return value;
}

double widom_limit(const std::function<double(double)>& g, double c_omega) {
  return 2.0 * c_omega * widom_integral(g);
}

double entropy_variance_target() { return std::numbers::pi * std::numbers::pi / 3.0; }

}  // namespace fbl
