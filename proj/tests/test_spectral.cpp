#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbl/error.hpp"
#include "fbl/predictions.hpp"
#include "fbl/spectral.hpp"
#include "fbl/symeig.hpp"

using namespace fbl;
using std::numbers::pi;

namespace {

SchrodingerProblem harmonic(int dim, double hbar, double half_width = 1.5, std::size_t m = 0) {
  if (m == 0) m = std::max<std::size_t>(minimal_points_per_axis(half_width, hbar, 1.0, 0.0) * 2, 16);
  return assemble(build_grid(dim, half_width, m), Potential::harmonic(), hbar, 1.0);
}

}  // namespace

TEST_CASE("2x2 stencil matrix") {
  Matrix a(2, 2);
  a(0, 0) = a(1, 1) = 2.0;
  a(0, 1) = a(1, 0) = -1.0;
  const auto v = linalg::symmetric_eigenvalues(a);
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(3.0));
}

TEST_CASE("1D harmonic levels follow hbar (2k + 1)") {
  const double hbar = 0.05;
  const auto s = eigendecompose(harmonic(1, hbar, 2.0, 1200));
  for (std::size_t k = 0; k < 8; ++k) CHECK(s.eigenvalues[k] == doctest::Approx(hbar * (2.0 * k + 1)).epsilon(1e-4));
  // vectors are orthonormal eigenvectors
  const auto p = harmonic(1, hbar, 2.0, 1200);
  std::vector<double> v(p.grid.size()), hv(p.grid.size()), w(p.grid.size());
  for (std::size_t k = 0; k < s.count(); k += 7) {
    s.vector(k, v);
    p.apply(v, hv);
    double res = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      res = std::max(res, std::abs(hv[i] - s.eigenvalues[k] * v[i]));
      norm += v[i] * v[i];
    }
    CHECK(res < 1e-8);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    s.vector((k + 3) % s.count(), w);
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) d += v[i] * w[i];
    if ((k + 3) % s.count() != k) CHECK(std::abs(d) < 1e-10);
  }
}

TEST_CASE("separable 2D levels are tensor sums with degeneracy k + 1") {
  const double hbar = 0.05;
  const auto s = eigendecompose(harmonic(2, hbar, 2.0, 160));
  REQUIRE(s.separable.has_value());
  CHECK(s.eigenvalues[0] == doctest::Approx(0.1).epsilon(1e-3));
  std::size_t pos = 0;
  for (int k = 0; k < 5; ++k) {
    const double level = 0.1 * (k + 1);
    std::size_t count = 0;
    while (pos < s.count() && std::abs(s.eigenvalues[pos] - level) < 0.01) {
      ++count;
      ++pos;
    }
    CHECK(count == static_cast<std::size_t>(k + 1));
  }
}

TEST_CASE("separable path agrees with the dense path") {
  const auto p = harmonic(2, 0.15, 1.5, 32);
  const auto sep = eigendecompose(p);
  const auto dense = eigendecompose(p, std::nullopt, SolverPath::dense);
  REQUIRE(sep.count() == dense.count());
  for (std::size_t k = 0; k < sep.count(); ++k) CHECK(sep.eigenvalues[k] == doctest::Approx(dense.eigenvalues[k]).epsilon(1e-10));
  // projector onto the retained space is basis independent
  const std::size_t n = p.grid.size();
  std::vector<double> a(n), b(n);
  Matrix pa(n, n), pb(n, n);
  for (std::size_t k = 0; k < sep.count(); ++k) {
    sep.vector(k, a);
    dense.vector(k, b);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        pa(i, j) += a[i] * a[j];
        pb(i, j) += b[i] * b[j];
      }
  }
  CHECK(max_abs(subtract(pa, pb)) < 1e-8);
}

TEST_CASE("trace identity: eigenvalue sum equals matrix trace on the dense path") {
  const auto p = assemble(build_grid(2, 1.5, 20), Potential::power(4.0), 0.2, 1.0);
  const auto s = eigendecompose(p, 1e9, SolverPath::dense);
  CHECK(s.complete);
  REQUIRE(s.count() == p.grid.size());
  double tr = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < p.grid.size(); ++i) tr += p.diagonal(i);
  for (double e : s.eigenvalues) sum += e;
  CHECK(sum == doctest::Approx(tr).epsilon(1e-12));
}

TEST_CASE("Fermi counts") {
  const auto s = eigendecompose(harmonic(1, 0.01));
  CHECK(fermi_count(s, 1.0) == 50);
  CHECK(fermi_count(s, 0.001) == 0);
  CHECK_THROWS_AS(fermi_count(s, 5.0), Error);

  std::size_t previous = 0;
  for (double hbar : {0.05, 0.02, 0.01, 0.005}) {
    const std::size_t n = fermi_count(eigendecompose(harmonic(1, hbar)), 1.0);
    CHECK(n >= previous);
    previous = n;
  }
}

TEST_CASE("Weyl law") {
  CHECK(weyl_volume(Potential::harmonic(), 1.0, 1) == doctest::Approx(pi / 2).epsilon(1e-12));
  CHECK(weyl_volume(Potential::harmonic(), 1.0, 2) == doctest::Approx(pi / 2).epsilon(1e-12));
  CHECK(weyl_prediction(Potential::harmonic(), 1.0, 0.01, 1) == doctest::Approx(50.0).epsilon(1e-10));
  CHECK(weyl_prediction(Potential::harmonic(), 1.0, 0.05, 2) == doctest::Approx(pi * pi / 2 / std::pow(2 * pi * 0.05, 2)).epsilon(1e-10));
  for (int n : {1, 2})
    for (double hbar : {0.1, 0.03, 0.007}) {
      const double z = weyl_volume(Potential::power(3.0), 1.0, n);
      CHECK(weyl_prediction(Potential::power(3.0), 1.0, hbar, n) * std::pow(2 * pi * hbar, n) / (ball_volume(n) * z) ==
            doctest::Approx(1.0).epsilon(1e-14));
    }
  // |x|^4 in 1D: int (1 - x^4)^{1/2} dx = B(1/4, 3/2) / 2
  const double b = std::exp(std::lgamma(0.25) + std::lgamma(1.5) - std::lgamma(1.75));
  CHECK(weyl_volume(Potential::power(4.0), 1.0, 1) == doctest::Approx(b / 2).epsilon(1e-12));
  const auto sep = Potential::separable(Potential::harmonic(), Potential::harmonic());
  CHECK(weyl_volume(sep, 1.0, 2, 1.5) == doctest::Approx(pi / 2).epsilon(1e-8));
}

TEST_CASE("window counts") {
  const auto s = eigendecompose(harmonic(1, 0.01));
  for (double lambda : {0.9, 0.95, 1.0, 1.003}) {
    const auto c = window_count(s, lambda, 0.01);
    CHECK(c >= 1);
    CHECK(c <= 2);
  }
  // mid-gap with a quarter-width window
  CHECK(window_count(s, 0.02, 0.0025) == 0);
}

TEST_CASE("matrix counting function matches the eigenvalue count") {
  const auto p1 = harmonic(1, 0.013);
  const auto all = linalg::symmetric_eigenvalues(p1.dense());
  for (double x : {0.0, 0.3, 0.777, 1.0, 1.2, all[7], all[40]}) {
    const auto expect = static_cast<std::size_t>(std::upper_bound(all.begin(), all.end(), x) - all.begin());
    CHECK(counting_function(p1, x) == expect);
  }
  const auto s1 = eigendecompose(p1);
  for (double lambda : {0.5, 0.9, 1.0, all[20]}) CHECK(window_count(p1, lambda, 0.013) == window_count(s1, lambda, 0.013));

  const auto p2 = harmonic(2, 0.12);
  const auto s2 = eigendecompose(p2);
  CHECK(counting_function(p2, 1.0) == fermi_count(s2, 1.0));
  CHECK(window_count(p2, 1.0, 0.12) == window_count(s2, 1.0, 0.12));
}
