#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "fbl/error.hpp"
#include "fbl/experiments.hpp"
#include "fbl/oscint.hpp"

using namespace fbl;
using std::numbers::pi;
using cplx = std::complex<double>;

namespace {

double radial_quadrature_n2(double xi) {
  // (1/2pi) int_0^1 r int_0^{2pi} cos(r xi cos t) dt dr
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  auto inner = [xi](double r) {
    return r * 2.0 * GK::integrate([=](double t) { return std::cos(r * xi * std::cos(t)); }, 0.0, pi, 15, 1e-14);
  };
  return GK::integrate(inner, 0.0, 1.0, 15, 1e-13) / (2 * pi);
}

// int e^{i h x^2 / (2 hbar)} e^{-x^2/delta^2} dx over the real line
cplx gaussian_1d(double h, double hbar, double delta) {
  return std::sqrt(cplx(pi, 0.0) / cplx(1.0 / (delta * delta), -h / (2.0 * hbar)));
}

StationaryPhaseProblem gaussian_problem(int dim, std::array<double, 4> hessian, double hbar, double delta, double r) {
  StationaryPhaseProblem p;
  p.dim = dim;
  p.hessian = hessian;
  p.hbar = hbar;
  p.delta = delta;
  p.support_radius = r;
  p.amplitude = [delta](Point x) { return std::exp(-(x[0] * x[0] + x[1] * x[1]) / (delta * delta)); };
  return p;
}

}  // namespace

TEST_CASE("Bessel functions of order 1/2, 1, 3/2") {
  for (double x : {0.3, 1.0, 5.0, 11.9, 12.1, 20.0, 47.5, 100.0}) {
    CAPTURE(x);
    CHECK(std::abs(bessel_j(0.5, x) - std::cyl_bessel_j(0.5, x)) < 1e-11);
    CHECK(std::abs(bessel_j(1.0, x) - std::cyl_bessel_j(1.0, x)) < 1e-11);
    CHECK(std::abs(bessel_j(1.5, x) - std::cyl_bessel_j(1.5, x)) < 1e-11);
  }
  CHECK(bessel_j(1.0, 0.0) == 0.0);
  CHECK_THROWS_AS(bessel_j(1.0, -1.0), Error);
}

TEST_CASE("ball transform closed forms") {
  for (double xi : {0.5, 2.0, 7.0, 15.0, 33.0}) {
    CHECK(ball_indicator_ft(1, xi) == doctest::Approx(std::sqrt(2.0 / pi) * std::sin(xi) / xi).epsilon(1e-12).scale(1e-6));
    const double n3 = std::sqrt(2.0 / pi) * (std::sin(xi) - xi * std::cos(xi)) / (xi * xi * xi);
    CHECK(std::abs(ball_indicator_ft(3, xi) - n3) < 1e-12);
  }
  CHECK(std::abs(ball_indicator_ft(1, pi)) < 1e-15);
  CHECK(ball_indicator_ft(2, 0.0) == 0.5);
  CHECK(ball_indicator_ft(1, 0.0) == doctest::Approx(std::sqrt(2.0 / pi)));
  CHECK_THROWS_AS(ball_indicator_ft(4, 1.0), Error);
}

TEST_CASE("n = 2 transform matches radial quadrature") {
  for (double xi = 0.5; xi <= 40.0; xi += 1.7) {
    CAPTURE(xi);
    CHECK(std::abs(ball_indicator_ft(2, xi) - radial_quadrature_n2(xi)) <= 1e-6);
  }
}

TEST_CASE("ball transform asymptotics") {
  CHECK_THROWS_AS(ball_ft_asymptotic(2, 4.0), Error);
  for (double xi : {10.0, 31.0, 80.0}) CHECK(std::abs(ball_indicator_ft(1, xi) - ball_ft_asymptotic(1, xi)) < 1e-13);
  // residual envelope falls like xi^{-(n+3)/2}
  for (int n : {2, 3}) {
    std::vector<double> lx, ly;
    for (double xi0 = 10.0; xi0 <= 94.0; xi0 *= 1.12) {
      double env = 0.0;
      for (int j = 0; j < 64; ++j) {
        const double xi = xi0 + 2 * pi * j / 64.0;
        env = std::max(env, std::abs(ball_indicator_ft(n, xi) - ball_ft_asymptotic(n, xi)));
      }
      lx.push_back(std::log(xi0));
      ly.push_back(std::log(env));
    }
    CHECK(linear_fit(lx, ly).slope == doctest::Approx(-(n + 3) / 2.0).epsilon(0.3 / ((n + 3) / 2.0)));
  }
  // zeros of exact and asymptotic interlace for n = 2 on [10, 60]
  std::vector<double> ze, za;
  for (double xi = 10.0; xi < 60.0; xi += 0.01) {
    if (ball_indicator_ft(2, xi) * ball_indicator_ft(2, xi + 0.01) < 0) ze.push_back(xi);
    if (ball_ft_asymptotic(2, xi) * ball_ft_asymptotic(2, xi + 0.01) < 0) za.push_back(xi);
  }
  REQUIRE(ze.size() == za.size());
  for (std::size_t k = 0; k + 1 < ze.size(); ++k) {
    CHECK(std::abs(ze[k] - za[k]) < 0.1);
    CHECK(ze[k + 1] > za[k]);
  }
}

TEST_CASE("stationary phase leading term and degenerate amplitudes") {
  auto p = gaussian_problem(1, {1, 0, 0, 1}, 1.0 / 256, std::pow(1.0 / 256, 0.4), 1.0);
  const cplx lead = stationary_phase_expand(p, 1);
  CHECK(lead.real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(lead.imag()) < 1e-15);

  p.amplitude = [](Point x) { return x[0] * x[0] * x[0]; };
  CHECK(std::abs(stationary_phase_expand(p, 1)) < 1e-12);
  p.amplitude = [](Point) { return 0.0; };
  CHECK(std::abs(stationary_phase_expand(p, 3)) == 0.0);
  CHECK(std::abs(brute_force_oscillatory(p).value) == 0.0);

  p.hessian = {0.0, 0, 0, 0};
  CHECK_THROWS_AS(stationary_phase_expand(p, 1), Error);
  p.hessian = {1.0, 0, 0, 0};
  p.delta = 0.01;
  CHECK_THROWS_AS(stationary_phase_expand(p, 1), Error);
}

TEST_CASE("brute force reproduces the complex Gaussian") {
  for (double h : {1.0, -1.0, 2.5}) {
    const double hbar = 1.0 / 256, delta = std::pow(hbar, 0.4);
    const auto p = gaussian_problem(1, {h, 0, 0, 0}, hbar, delta, 8.0 * delta);
    const auto r = brute_force_oscillatory(p);
    const cplx exact = gaussian_1d(h, hbar, delta);
    CHECK(std::abs(r.value - exact) <= 1e-9);
    CHECK(r.samples <= kOscillatoryBudget);
  }
  // 2D indefinite phase: product of 1D transforms
  const auto p = gaussian_problem(2, {1.0, 0, 0, -1.0}, 0.25, 0.5, 3.0);
  const auto r = brute_force_oscillatory(p);
  CHECK(std::abs(r.value - gaussian_1d(1.0, 0.25, 0.5) * gaussian_1d(-1.0, 0.25, 0.5)) <= 1e-8);
}

TEST_CASE("expansion converges to the Gaussian closed form at rate t^order") {
  // normalized integral (1 + 2 i t / h)^{-1/2} i^{-alpha} |h|^{-1/2}, t = hbar / delta^2
  for (double h : {1.0, -2.0}) {
    double previous[3] = {0, 0, 0};
    for (double hbar : {1.0 / 64, 1.0 / 1024}) {
      const double delta = std::pow(hbar, 0.4);
      const auto p = gaussian_problem(1, {h, 0, 0, 0}, hbar, delta, 8.0 * delta);
      const cplx exact = gaussian_1d(h, hbar, delta) / stationary_phase_prefactor(1, hbar);
      const double t = hbar / (delta * delta);
      for (int l = 1; l <= 3; ++l) {
        const double rem = std::abs(stationary_phase_expand(p, l) - exact);
        CHECK(rem <= 3.0 * std::pow(t, l));
        // t shrinks by 2^{-0.8} between the two hbar values
        if (previous[l - 1] > 0.0) CHECK(rem < previous[l - 1] * std::pow(2.0, -0.8 * l) * 1.5);
        previous[l - 1] = rem;
      }
    }
  }
}

TEST_CASE("Morse index and rotated Hessians in 2D") {
  const double hbar = 0.01, delta = 0.5;
  const double t = hbar / (delta * delta);
  const double c = std::cos(0.4), s = std::sin(0.4);
  for (auto [l1, l2] : {std::pair{1.0, 2.0}, std::pair{1.0, -3.0}, std::pair{-1.5, -0.5}}) {
    // H = R diag(l1, l2) R^T; the radial amplitude makes the integral rotation invariant
    const std::array<double, 4> h{c * c * l1 + s * s * l2, c * s * (l1 - l2), c * s * (l1 - l2), s * s * l1 + c * c * l2};
    const auto p = gaussian_problem(2, h, hbar, delta, 8.0 * delta);
    const cplx exact = gaussian_1d(l1, hbar, delta) * gaussian_1d(l2, hbar, delta) / stationary_phase_prefactor(2, hbar);
    CHECK(std::abs(stationary_phase_expand(p, 1) - exact) <= 4.0 * t);
    CHECK(std::abs(stationary_phase_expand(p, 3) - exact) <= 40.0 * t * t * t);
  }
}

TEST_CASE("odd amplitudes integrate to zero") {
  auto p = gaussian_problem(1, {1, 0, 0, 0}, 1.0 / 128, std::pow(1.0 / 128, 0.4), 8.0 * std::pow(1.0 / 128, 0.4));
  const double d = p.delta;
  p.amplitude = [d](Point x) { return x[0] * std::exp(-x[0] * x[0] / (d * d)); };
  CHECK(std::abs(brute_force_oscillatory(p).value) < 1e-10);
  CHECK(std::abs(stationary_phase_expand(p, 3)) < 1e-8);
}

TEST_CASE("exact derivatives override finite differences") {
  auto p = gaussian_problem(1, {1, 0, 0, 0}, 1.0 / 256, 0.5, 4.0);
  const cplx fd = stationary_phase_expand(p, 3);
  const double d = p.delta;
  // d^k/dx^k e^{-x^2/d^2} at 0: 1, 0, -2/d^2, 0, 12/d^4
  p.derivatives = [d](int px, int) {
    switch (px) {
      case 0: return 1.0;
      case 2: return -2.0 / (d * d);
      case 4: return 12.0 / (d * d * d * d);
      default: return 0.0;
    }
  };
  CHECK(std::abs(stationary_phase_expand(p, 3) - fd) < 1e-9);
}
