#include "fbl/spectral.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fbl/error.hpp"
#include "fbl/predictions.hpp"
#include "fbl/symeig.hpp"

namespace fbl {
namespace {

void canonical_sign(std::span<double> v) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  if (v[arg] < 0.0)
    for (double& x : v) x = -x;
}

struct Tridiagonal {
  std::vector<double> diag, off;
};

Tridiagonal axis_operator(const Grid& grid, const Potential& v1d, double hbar) {
  Tridiagonal t;
  const std::size_t m = grid.points_per_axis;
  const double c = hbar * hbar / (grid.spacing * grid.spacing);
  t.diag.resize(m);
  t.off.assign(m - 1, -c);
  for (std::size_t i = 0; i < m; ++i) t.diag[i] = 2.0 * c + v1d.value({grid.coord(i), 0.0}, 1);
  return t;
}

std::size_t count_at_most(const std::vector<double>& ascending, double x) {
  return static_cast<std::size_t>(std::upper_bound(ascending.begin(), ascending.end(), x) - ascending.begin());
}

SpectralData dense_path(const SchrodingerProblem& problem, double cutoff) {
  const std::size_t n = problem.grid.size();
  if (n > kDenseCap) {
    std::ostringstream os;
    os << "dense path holds at most " << kDenseCap << " nodes, problem has " << n;
    throw Error(Errc::matrix_too_large, os.str());
  }
  auto pairs = linalg::symmetric_eigen(problem.dense());
  const std::size_t keep = count_at_most(pairs.values, cutoff);
  SpectralData s;
  s.complete = keep == n;
  s.eigenvalues.assign(pairs.values.begin(), pairs.values.begin() + static_cast<std::ptrdiff_t>(keep));
  s.eigenvectors = Matrix(n, keep);
  for (std::size_t k = 0; k < keep; ++k) {
    std::copy(pairs.vectors.col(k).begin(), pairs.vectors.col(k).end(), s.eigenvectors.col(k).begin());
    canonical_sign(s.eigenvectors.col(k));
  }
  return s;
}

SpectralData tridiagonal_path(const SchrodingerProblem& problem, double cutoff) {
  const std::size_t n = problem.grid.size();
  std::vector<double> diag(n), off(n - 1, problem.coupling);
  for (std::size_t i = 0; i < n; ++i) diag[i] = problem.diagonal(i);
  SpectralData s;
  s.eigenvalues = linalg::tridiagonal_eigenvalues_below(diag, off, cutoff);
  s.complete = s.eigenvalues.size() == n;
  s.eigenvectors = linalg::tridiagonal_eigenvectors(diag, off, s.eigenvalues);
  return s;
}

SpectralData separable_path(const SchrodingerProblem& problem, double cutoff) {
  const Grid& grid = problem.grid;
  const Potential fx = problem.potential.factor(0);
  const Potential fy = problem.potential.factor(1);
  const Tridiagonal tx = axis_operator(grid, fx, problem.hbar);
  const bool same = fx.describe() == fy.describe();
  const Tridiagonal ty = same ? tx : axis_operator(grid, fy, problem.hbar);

  const auto all_x = linalg::tridiagonal_eigenvalues(tx.diag, tx.off);
  const auto all_y = same ? all_x : linalg::tridiagonal_eigenvalues(ty.diag, ty.off);

  SpectralData::SeparableFactors f;
  f.values_x.assign(all_x.begin(), all_x.begin() + static_cast<std::ptrdiff_t>(count_at_most(all_x, cutoff - all_y.front())));
  f.values_y.assign(all_y.begin(), all_y.begin() + static_cast<std::ptrdiff_t>(count_at_most(all_y, cutoff - all_x.front())));

  struct Level {
    double value;
    std::uint32_t i, j;
  };
  std::vector<Level> levels;
  for (std::uint32_t i = 0; i < f.values_x.size(); ++i)
    for (std::uint32_t j = 0; j < f.values_y.size(); ++j) {
      const double v = f.values_x[i] + f.values_y[j];
      if (v <= cutoff) levels.push_back({v, i, j});
    }
  std::sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });

  f.vectors_x = linalg::tridiagonal_eigenvectors(tx.diag, tx.off, f.values_x);
  f.vectors_y = same && f.values_y.size() <= f.values_x.size()
                    ? Matrix()
                    : linalg::tridiagonal_eigenvectors(ty.diag, ty.off, f.values_y);
  if (f.vectors_y.empty()) {
    f.vectors_y = Matrix(grid.points_per_axis, f.values_y.size());
    for (std::size_t k = 0; k < f.values_y.size(); ++k)
      std::copy(f.vectors_x.col(k).begin(), f.vectors_x.col(k).end(), f.vectors_y.col(k).begin());
  }

  SpectralData s;
  s.complete = levels.size() == grid.size();
  s.eigenvalues.reserve(levels.size());
  f.pairs.reserve(levels.size());
  for (const auto& l : levels) {
    s.eigenvalues.push_back(l.value);
    f.pairs.emplace_back(l.i, l.j);
  }
  s.separable = std::move(f);
  return s;
}

}  // namespace

void SpectralData::vector(std::size_t k, std::span<double> out) const {
  if (!separable) {
    auto c = eigenvectors.col(k);
    std::copy(c.begin(), c.end(), out.begin());
    return;
  }
  const auto [i, j] = separable->pairs[k];
  const std::size_t m = grid.points_per_axis;
  auto vx = separable->vectors_x.col(i);
  auto vy = separable->vectors_y.col(j);
  for (std::size_t iy = 0; iy < m; ++iy)
    for (std::size_t ix = 0; ix < m; ++ix) out[ix + m * iy] = vx[ix] * vy[iy];
}

SpectralData eigendecompose(const SchrodingerProblem& problem, std::optional<double> upper_cutoff, SolverPath path) {
  const double cutoff = upper_cutoff.value_or(problem.mu + kDefaultWindowMargin);
  if (!(cutoff >= problem.mu))
    throw Error(Errc::invalid_argument, "upper_cutoff must be >= mu");

  SpectralData s;
  if (path == SolverPath::dense)
    s = dense_path(problem, cutoff);
  else if (problem.grid.dim == 1)
    s = tridiagonal_path(problem, cutoff);
  else if (problem.potential.is_separable())
    s = separable_path(problem, cutoff);
  else
    s = dense_path(problem, cutoff);

  s.grid = problem.grid;
  s.hbar = problem.hbar;
  s.mu = problem.mu;
  s.upper_cutoff = cutoff;
  return s;
}

std::size_t fermi_count(const SpectralData& spectral, double mu) {
  if (!spectral.complete && spectral.upper_cutoff < mu) {
    std::ostringstream os;
    os << "retained spectrum ends at " << spectral.upper_cutoff << " below mu = " << mu;
    throw Error(Errc::cutoff_too_low, os.str());
  }
  return count_at_most(spectral.eigenvalues, mu);
}

std::size_t window_count(const SpectralData& spectral, double lambda, double hbar) {
  if (!spectral.complete && spectral.upper_cutoff < lambda + hbar) {
    std::ostringstream os;
    os << "window [" << lambda - hbar << ", " << lambda + hbar << "] exceeds retained cutoff " << spectral.upper_cutoff;
    throw Error(Errc::cutoff_too_low, os.str());
  }
  const auto& e = spectral.eigenvalues;
  const auto lo = std::lower_bound(e.begin(), e.end(), lambda - hbar);
  const auto hi = std::upper_bound(e.begin(), e.end(), lambda + hbar);
  return static_cast<std::size_t>(hi - lo);
}

namespace {

std::size_t sturm_count(const SchrodingerProblem& p, double x, bool inclusive) {
  const std::size_t n = p.grid.size();
  std::vector<double> diag(n), off(n - 1, p.coupling);
  for (std::size_t i = 0; i < n; ++i) diag[i] = p.diagonal(i);
  return linalg::tridiagonal_count(diag, off, x, inclusive);
}

}  // namespace

std::size_t counting_function(const SchrodingerProblem& problem, double x) {
  if (problem.grid.dim == 1) return sturm_count(problem, x, true);
  return count_at_most(eigendecompose(problem, x).eigenvalues, x);
}

std::size_t window_count(const SchrodingerProblem& problem, double lambda, double hbar) {
  if (problem.grid.dim == 1)
    return sturm_count(problem, lambda + hbar, true) - sturm_count(problem, lambda - hbar, false);
  return window_count(eigendecompose(problem, lambda + hbar), lambda, hbar);
}

double weyl_volume(const Potential& potential, double mu, int dim, double half_width) {
  if (dim != 1 && dim != 2) throw Error(Errc::unsupported_dimension, "Weyl volume for n in {1, 2}");
  const double nd = dim;
  if (potential.is_radial()) {
    if (mu <= 0.0) return 0.0;
    // int (mu - r^q)_+^{n/2} |S^{n-1}| r^{n-1} dr
    const double q = potential.exponent();
    const double radius = std::pow(mu, 1.0 / q);
    const double sphere = dim == 1 ? 2.0 : 2.0 * std::numbers::pi;
    const double beta = std::exp(std::lgamma(nd / q) + std::lgamma(nd / 2.0 + 1.0) - std::lgamma(nd / q + nd / 2.0 + 1.0));
    return sphere * std::pow(radius, nd) * std::pow(mu, nd / 2.0) * beta / q;
  }
  if (potential.kind() == Potential::Kind::tabulated) {
    if (potential.table_dim() != dim) throw Error(Errc::invalid_argument, "tabulated potential dimension mismatch");
    const double h = 2.0 * potential.table_half_width() / static_cast<double>(potential.table_points());
    double z = 0.0;
    for (double v : potential.table_values())
      if (v < mu) z += std::pow(mu - v, nd / 2.0);
    return z * std::pow(h, nd);
  }
  // separable: nested adaptive quadrature over the box
  if (!(half_width > 0.0)) throw Error(Errc::invalid_argument, "separable Weyl volume needs the box half-width");
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const Potential fx = potential.factor(0);
  const Potential fy = potential.factor(1);
  double outer_err = 0.0;
  const double z = GK::integrate(
      [&](double x) {
        const double vx = fx.value({x, 0.0}, 1);
        if (vx >= mu) return 0.0;
        return GK::integrate([&](double y) { return std::max(mu - vx - fy.value({y, 0.0}, 1), 0.0); }, -half_width,
                             half_width, 12, 1e-11);
      },
      -half_width, half_width, 12, 1e-10, &outer_err);
  if (!std::isfinite(z) || outer_err > 1e-6 * std::max(std::abs(z), 1.0))
    throw Error(Errc::quadrature_failure, "Weyl volume quadrature did not converge");
  return z;
}

double weyl_prediction(const Potential& potential, double mu, double hbar, int dim, double half_width) {
  if (!(hbar > 0.0)) throw Error(Errc::invalid_argument, "hbar must be positive");
  return ball_volume(dim) * weyl_volume(potential, mu, dim, half_width) / std::pow(2.0 * std::numbers::pi * hbar, dim);
}

}  // namespace fbl
