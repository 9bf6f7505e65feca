#include "fbl/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fbl/error.hpp"

namespace fbl {
Potential Potential::harmonic() {
  Potential v;
  v.kind_ = Kind::harmonic;
  v.q_ = 2.0;
  return v;
}

Potential Potential::power(double q) {
  if (!(q > 0.0)) throw Error(Errc::invalid_argument, "power potential needs q > 0");
  Potential v;
  v.kind_ = Kind::power;
  v.q_ = q;
  return v;
}

Potential Potential::separable(const Potential& vx, const Potential& vy) {
  for (const Potential* f : {&vx, &vy}) {
    if (f->kind_ == Kind::separable || (f->kind_ == Kind::tabulated && f->tab_dim_ != 1))
      throw Error(Errc::invalid_argument, "separable factors must be 1D potentials");
  }
  Potential v;
  v.kind_ = Kind::separable;
  v.vx_ = std::make_shared<const Potential>(vx);
  v.vy_ = std::make_shared<const Potential>(vy);
  return v;
}

Potential Potential::tabulated(int dim, double half_width, std::vector<double> values) {
  if (dim != 1 && dim != 2) throw Error(Errc::unsupported_dimension, "tabulated potential must be 1D or 2D");
  if (!(half_width > 0.0)) throw Error(Errc::invalid_argument, "tabulated half_width must be positive");
  std::size_t m = values.size();
  if (dim == 2) {
    m = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(values.size()))));
    if (m * m != values.size()) throw Error(Errc::invalid_argument, "2D table must be square");
  }
  if (m < 2) throw Error(Errc::invalid_argument, "table needs at least 2 points per axis");
  for (double x : values)
    if (!std::isfinite(x)) throw Error(Errc::invalid_argument, "table values must be finite");
  Potential v;
  v.kind_ = Kind::tabulated;
  v.tab_dim_ = dim;
  v.tab_half_width_ = half_width;
  v.tab_points_ = m;
  v.tab_values_ = std::move(values);
  return v;
}

double Potential::value(Point x, int dim) const {
  switch (kind_) {
    case Kind::harmonic: return dim == 1 ? x[0] * x[0] : x[0] * x[0] + x[1] * x[1];
    case Kind::power: {
      const double r = dim == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
      return q_ == 2.0 ? r * r : std::pow(r, q_);
    }
    case Kind::separable:
      if (dim != 2) throw Error(Errc::invalid_argument, "separable potential is 2D only");
      return vx_->value({x[0], 0.0}, 1) + vy_->value({x[1], 0.0}, 1);
    case Kind::tabulated: {
      if (dim != tab_dim_) throw Error(Errc::invalid_argument, "tabulated potential dimension mismatch");
      const double h = 2.0 * tab_half_width_ / static_cast<double>(tab_points_);
      auto index = [&](double c) {
        const double s = std::floor((c + tab_half_width_) / h);
        return static_cast<std::size_t>(std::clamp(s, 0.0, static_cast<double>(tab_points_ - 1)));
      };
      const std::size_t i = index(x[0]);
      return dim == 1 ? tab_values_[i] : tab_values_[i + tab_points_ * index(x[1])];
    }
  }
  return 0.0;
}

bool Potential::is_separable() const noexcept {
  return kind_ == Kind::harmonic || kind_ == Kind::separable || (kind_ == Kind::power && q_ == 2.0);
}

Potential Potential::factor(int axis) const {
  if (!is_separable()) throw Error(Errc::invalid_argument, "potential is not separable");
  if (kind_ == Kind::separable) return axis == 0 ? *vx_ : *vy_;
  return *this;  // |x|^2 = x1^2 + x2^2, each factor the same 1D kind
}

std::string Potential::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::harmonic: os << "harmonic"; break;
    case Kind::power: os << "power(q=" << q_ << ")"; break;
    case Kind::separable: os << "separable(" << vx_->describe() << "," << vy_->describe() << ")"; break;
    case Kind::tabulated: os << "tabulated(dim=" << tab_dim_ << ",L=" << tab_half_width_ << ",M=" << tab_points_ << ")"; break;
  }
  return os.str();
}

double Potential::infimum() const {
  switch (kind_) {
    case Kind::harmonic:
    case Kind::power: return 0.0;
    case Kind::separable: return vx_->infimum() + vy_->infimum();
    case Kind::tabulated: return *std::min_element(tab_values_.begin(), tab_values_.end());
  }
  return 0.0;
}

// ---------------------------------------------------------------- problem

Matrix SchrodingerProblem::dense() const {
  const std::size_t n = grid.size();
  const std::size_t m = grid.points_per_axis;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = diagonal(i);
    if (grid.dim == 1) {
      if (i + 1 < n) a(i, i + 1) = a(i + 1, i) = coupling;
    } else {
      const std::size_t ix = i % m;
      const std::size_t iy = i / m;
      if (ix + 1 < m) a(i, i + 1) = a(i + 1, i) = coupling;
      if (iy + 1 < m) a(i, i + m) = a(i + m, i) = coupling;
    }
  }
  return a;
}

void SchrodingerProblem::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = grid.size();
  const std::size_t m = grid.points_per_axis;
  for (std::size_t i = 0; i < n; ++i) {
    double s = diagonal(i) * x[i];
    if (grid.dim == 1) {
      if (i > 0) s += coupling * x[i - 1];
      if (i + 1 < n) s += coupling * x[i + 1];
    } else {
      const std::size_t ix = i % m;
      const std::size_t iy = i / m;
      if (ix > 0) s += coupling * x[i - 1];
      if (ix + 1 < m) s += coupling * x[i + 1];
      if (iy > 0) s += coupling * x[i - m];
      if (iy + 1 < m) s += coupling * x[i + m];
    }
    y[i] = s;
  }
}

double SchrodingerProblem::norm1() const {
  double best = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    best = std::max(best, std::abs(diagonal(i)) + 2.0 * grid.dim * std::abs(coupling));
  return best;
}

std::size_t minimal_points_per_axis(double half_width, double hbar, double mu, double min_potential) {
  const double k = std::sqrt(std::max(mu - min_potential, 0.0));
  const double h_max = 2.0 * std::numbers::pi * hbar / (8.0 * k + 1e-12);
  return static_cast<std::size_t>(std::ceil(2.0 * half_width / h_max));
}

SchrodingerProblem assemble(const Grid& grid, const Potential& potential, double hbar, double mu, double wall_margin) {
  if (!(hbar > 0.0)) throw Error(Errc::invalid_argument, "hbar must be positive");
  if (potential.kind() == Potential::Kind::separable && grid.dim != 2)
    throw Error(Errc::invalid_argument, "separable potential requires a 2D grid");

  SchrodingerProblem p;
  p.grid = grid;
  p.potential = potential;
  p.hbar = hbar;
  p.mu = mu;
  p.coupling = -hbar * hbar / (grid.spacing * grid.spacing);
  p.potential_values.resize(grid.size());
  double vmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    p.potential_values[i] = potential.value(grid.node(i), grid.dim);
    vmin = std::min(vmin, p.potential_values[i]);
  }
  if (!(vmin < mu))
    throw Error(Errc::empty_droplet, "min V on grid = " + std::to_string(vmin) + " is not below mu = " + std::to_string(mu));

  // wall: every boundary cell must sit above mu + margin
  const std::size_t m = grid.points_per_axis;
  double wall = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t ix = i % m;
    const std::size_t iy = grid.dim == 1 ? 1 : i / m;
    const bool boundary = ix == 0 || ix + 1 == m || (grid.dim == 2 && (iy == 0 || iy + 1 == m));
    if (boundary) wall = std::min(wall, p.potential_values[i]);
  }

  const double k = std::sqrt(std::max(mu - vmin, 0.0));
  p.diagnostics.spacing = grid.spacing;
  p.diagnostics.hbar = hbar;
  p.diagnostics.points_per_wavelength =
      k > 0.0 ? 2.0 * std::numbers::pi * hbar / (grid.spacing * k) : std::numeric_limits<double>::infinity();
  p.diagnostics.wall_margin = wall - mu;
  p.diagnostics.min_potential = vmin;

  const double h_max = 2.0 * std::numbers::pi * hbar / (8.0 * k + 1e-12);
  if (grid.spacing > h_max) {
    std::ostringstream os;
    os << "h = " << grid.spacing << " exceeds 2 pi hbar/(8 sqrt(mu - min V)) = " << h_max
       << " (points per wavelength " << p.diagnostics.points_per_wavelength << ", need M >= "
       << minimal_points_per_axis(grid.half_width, hbar, mu, vmin) << ")";
    throw Error(Errc::resolution_too_coarse, os.str());
  }
  if (wall < mu + wall_margin) {
    std::ostringstream os;
    os << "min V on boundary cells = " << wall << " < mu + margin = " << mu + wall_margin;
    throw Error(Errc::box_too_small, os.str());
  }
  return p;
}

// ---------------------------------------------------------------- droplet

std::string Droplet::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (shape) {
    case Shape::interval: os << "interval(" << -radius << "," << radius << ")"; break;
    case Shape::disk: os << "disk(radius=" << radius << ")"; break;
    case Shape::general: os << "general"; break;
  }
  return os.str();
}

Droplet droplet_descriptor(const Potential& potential, double mu, int dim) {
  if (dim != 1 && dim != 2) throw Error(Errc::unsupported_dimension, "droplet dimension must be 1 or 2");
  Droplet d;
  if (potential.is_radial()) {
    if (!(mu > 0.0)) throw Error(Errc::empty_droplet, "{|x|^q < mu} is empty for mu <= 0");
    d.shape = dim == 1 ? Droplet::Shape::interval : Droplet::Shape::disk;
    d.radius = std::pow(mu, 1.0 / potential.exponent());
    return d;
  }
  if (!(potential.infimum() < mu)) throw Error(Errc::empty_droplet, "potential never drops below mu");
  d.shape = Droplet::Shape::general;
  return d;
}

}  // namespace fbl
