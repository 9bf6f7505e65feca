#include "fbl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fbl/error.hpp"
#include "fbl/hash.hpp"

namespace fbl {

using std::numbers::pi;

std::uint64_t Grid::fingerprint() const noexcept {
  return Fnv1a().u64(static_cast<std::uint64_t>(dim)).f64(half_width).u64(points_per_axis).value();
}

Grid build_grid(int dim, double half_width, std::size_t points_per_axis) {
  if (dim != 1 && dim != 2) throw Error(Errc::unsupported_dimension, "grid dimension must be 1 or 2, got " + std::to_string(dim));
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw Error(Errc::invalid_argument, "half_width must be positive");
  if (points_per_axis < 2) throw Error(Errc::invalid_argument, "points_per_axis must be >= 2");
  Grid g;
  g.dim = dim;
  g.half_width = half_width;
  g.points_per_axis = points_per_axis;
  g.spacing = 2.0 * half_width / static_cast<double>(points_per_axis);
  g.weight = dim == 1 ? g.spacing : g.spacing * g.spacing;
  return g;
}

// ---------------------------------------------------------------- Region

Region Region::interval(double a, double b) {
  if (!(a < b)) throw Error(Errc::invalid_argument, "interval requires a < b");
  return Region(Kind::interval, 1, {a, b});
}

Region Region::rectangle(Point lower, Point upper) {
  if (!(lower[0] < upper[0] && lower[1] < upper[1]))
    throw Error(Errc::invalid_argument, "rectangle requires lower < upper componentwise");
  return Region(Kind::rectangle, 2, {lower[0], lower[1], upper[0], upper[1]});
}

Region Region::disk(Point center, double radius) {
  if (!(radius > 0.0)) throw Error(Errc::invalid_argument, "disk radius must be positive");
  return Region(Kind::disk, 2, {center[0], center[1], radius});
}

Region Region::annulus(Point center, double inner, double outer) {
  if (!(inner > 0.0 && inner < outer)) throw Error(Errc::invalid_argument, "annulus requires 0 < inner < outer");
  return Region(Kind::annulus, 2, {center[0], center[1], inner, outer});
}

Region Region::union_of(const Region& first, const Region& second) {
  if (first.dim() != second.dim()) throw Error(Errc::invalid_argument, "union parts must share a dimension");
  Region r(Kind::union_of_two, first.dim(), {});
  r.first_ = std::make_shared<const Region>(first);
  r.second_ = std::make_shared<const Region>(second);
  return r;
}

bool Region::contains(Point x) const {
  const auto& p = params_;
  switch (kind_) {
    case Kind::interval: return p[0] < x[0] && x[0] < p[1];
    case Kind::rectangle: return p[0] < x[0] && x[0] < p[2] && p[1] < x[1] && x[1] < p[3];
    case Kind::disk: return std::hypot(x[0] - p[0], x[1] - p[1]) < p[2];
    case Kind::annulus: {
      const double rho = std::hypot(x[0] - p[0], x[1] - p[1]);
      return p[2] < rho && rho < p[3];
    }
    case Kind::union_of_two: return first_->contains(x) || second_->contains(x);
  }
  return false;
}

double Region::boundary_measure() const {
  const auto& p = params_;
  switch (kind_) {
    case Kind::interval: return 2.0;
    case Kind::rectangle: return 2.0 * ((p[2] - p[0]) + (p[3] - p[1]));
    case Kind::disk: return 2.0 * pi * p[2];
    case Kind::annulus: return 2.0 * pi * (p[2] + p[3]);
    case Kind::union_of_two: return first_->boundary_measure() + second_->boundary_measure();
  }
  return 0.0;
}

double Region::defining_function(Point x) const {
  const auto& p = params_;
  switch (kind_) {
    case Kind::interval: {
      const double c = 0.5 * (p[0] + p[1]);
      const double half = 0.5 * (p[1] - p[0]);
      return ((x[0] - c) * (x[0] - c) - half * half) / (2.0 * half);
    }
    case Kind::rectangle: {
      const double cx = 0.5 * (p[0] + p[2]), cy = 0.5 * (p[1] + p[3]);
      return std::max(std::abs(x[0] - cx) - 0.5 * (p[2] - p[0]), std::abs(x[1] - cy) - 0.5 * (p[3] - p[1]));
    }
    case Kind::disk: {
      const double d2 = (x[0] - p[0]) * (x[0] - p[0]) + (x[1] - p[1]) * (x[1] - p[1]);
      return (d2 - p[2] * p[2]) / (2.0 * p[2]);
    }
    case Kind::annulus: {
      const double rho = std::hypot(x[0] - p[0], x[1] - p[1]);
      return (rho - p[2]) * (rho - p[3]) / (p[3] - p[2]);
    }
    case Kind::union_of_two: return std::min(first_->defining_function(x), second_->defining_function(x));
  }
  return 0.0;
}

Point Region::interior_point() const {
  const auto& p = params_;
  switch (kind_) {
    case Kind::interval: return {0.5 * (p[0] + p[1]), 0.0};
    case Kind::rectangle: return {0.5 * (p[0] + p[2]), 0.5 * (p[1] + p[3])};
    case Kind::disk: return {p[0], p[1]};
    case Kind::annulus: return {p[0] + 0.5 * (p[2] + p[3]), p[1]};
    case Kind::union_of_two: return first_->interior_point();
  }
  return {0.0, 0.0};
}

std::array<Point, 2> Region::bounding_box() const {
  const auto& p = params_;
  switch (kind_) {
    case Kind::interval: return {Point{p[0], 0.0}, Point{p[1], 0.0}};
    case Kind::rectangle: return {Point{p[0], p[1]}, Point{p[2], p[3]}};
    case Kind::disk: return {Point{p[0] - p[2], p[1] - p[2]}, Point{p[0] + p[2], p[1] + p[2]}};
    case Kind::annulus: return {Point{p[0] - p[3], p[1] - p[3]}, Point{p[0] + p[3], p[1] + p[3]}};
    case Kind::union_of_two: {
      const auto a = first_->bounding_box();
      const auto b = second_->bounding_box();
      return {Point{std::min(a[0][0], b[0][0]), std::min(a[0][1], b[0][1])},
              Point{std::max(a[1][0], b[1][0]), std::max(a[1][1], b[1][1])}};
    }
  }
  return {};
}

std::vector<double> Region::boundary_points_1d() const {
  if (dim_ != 1) throw Error(Errc::unsupported_dimension, "boundary_points_1d on a 2D region");
  if (kind_ == Kind::interval) return {params_[0], params_[1]};
  auto pts = first_->boundary_points_1d();
  const auto more = second_->boundary_points_1d();
  pts.insert(pts.end(), more.begin(), more.end());
  std::sort(pts.begin(), pts.end());
  return pts;
}

std::size_t Region::boundary_piece_count() const {
  switch (kind_) {
    case Kind::interval: return 0;
    case Kind::rectangle: return 4;
    case Kind::disk: return 1;
    case Kind::annulus: return 2;
    case Kind::union_of_two: return first_->boundary_piece_count() + second_->boundary_piece_count();
  }
  return 0;
}

Region::BoundarySample Region::boundary_point(std::size_t piece, double t) const {
  const auto& p = params_;
  switch (kind_) {
    case Kind::interval: break;
    case Kind::rectangle: {
      const double w = p[2] - p[0], h = p[3] - p[1];
      switch (piece) {
        case 0: return {{p[0] + t * w, p[1]}, w};
        case 1: return {{p[2], p[1] + t * h}, h};
        case 2: return {{p[2] - t * w, p[3]}, w};
        case 3: return {{p[0], p[3] - t * h}, h};
        default: break;
      }
      break;
    }
    case Kind::disk:
      if (piece == 0) {
        const double th = 2.0 * pi * t;
        return {{p[0] + p[2] * std::cos(th), p[1] + p[2] * std::sin(th)}, 2.0 * pi * p[2]};
      }
      break;
    case Kind::annulus:
      if (piece < 2) {
        const double r = piece == 0 ? p[3] : p[2];
        const double th = 2.0 * pi * t;
        return {{p[0] + r * std::cos(th), p[1] + r * std::sin(th)}, 2.0 * pi * r};
      }
      break;
    case Kind::union_of_two: {
      const std::size_t na = first_->boundary_piece_count();
      return piece < na ? first_->boundary_point(piece, t) : second_->boundary_point(piece - na, t);
    }
  }
  throw Error(Errc::invalid_argument, "boundary piece index out of range");
}

std::string Region::describe() const {
  std::ostringstream os;
  os.precision(17);
  const auto& p = params_;
  switch (kind_) {
    case Kind::interval: os << "interval(" << p[0] << "," << p[1] << ")"; break;
    case Kind::rectangle: os << "rectangle([" << p[0] << "," << p[1] << "],[" << p[2] << "," << p[3] << "])"; break;
    case Kind::disk: os << "disk([" << p[0] << "," << p[1] << "]," << p[2] << ")"; break;
    case Kind::annulus: os << "annulus([" << p[0] << "," << p[1] << "]," << p[2] << "," << p[3] << ")"; break;
    case Kind::union_of_two: os << "union(" << first_->describe() << "," << second_->describe() << ")"; break;
  }
  return os.str();
}

std::uint64_t Region::fingerprint() const { return Fnv1a().bytes(describe()).value(); }

// ---------------------------------------------------------------- masks

Mask region_mask(const Grid& grid, const Region& region) {
  if (region.dim() != grid.dim) throw Error(Errc::invalid_argument, "region and grid dimensions differ");
  Mask m;
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i)
    if (region.contains(grid.node(i))) m.indices.push_back(i);
  m.empty_warning = m.indices.empty();
  return m;
}

Mask full_mask(const Grid& grid) {
  Mask m;
  m.indices.resize(grid.size());
  for (std::size_t i = 0; i < m.indices.size(); ++i) m.indices[i] = i;
  return m;
}

Mask mask_intersection(const Mask& a, const Mask& b) {
  Mask m;
  std::set_intersection(a.indices.begin(), a.indices.end(), b.indices.begin(), b.indices.end(),
                        std::back_inserter(m.indices));
  m.empty_warning = m.indices.empty();
  return m;
}

Mask mask_complement(const Grid& grid, const Mask& a) {
  Mask m;
  std::size_t k = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (k < a.indices.size() && a.indices[k] == i) {
      ++k;
      continue;
    }
    m.indices.push_back(i);
  }
  m.empty_warning = m.indices.empty();
  return m;
}

// ---------------------------------------------------------------- collision volume

namespace {

CollisionEstimate exact_1d(const Grid& grid, const std::vector<char>& inside, double radius) {
  const std::size_t n = grid.points_per_axis;
  const auto reach = static_cast<std::size_t>(std::floor(radius / grid.spacing * (1.0 + 1e-12)));
  double count = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!inside[i]) continue;
    const std::size_t lo = i >= reach ? i - reach : 0;
    const std::size_t hi = std::min(n - 1, i + reach);
    for (std::size_t j = lo; j <= hi; ++j)
      if (!inside[j]) count += 1.0;
  }
  return {count * grid.spacing * grid.spacing, 0.0};
}

std::vector<char> inside_flags(const Grid& grid, const Region& region) {
  std::vector<char> inside(grid.size());
  for (std::size_t i = 0; i < inside.size(); ++i) inside[i] = region.contains(grid.node(i)) ? 1 : 0;
  return inside;
}

}  // namespace

CollisionEstimate boundary_collision_volume(const Grid& grid, const Region& region, double radius,
                                            std::size_t sampler_budget, std::uint64_t seed) {
  if (!(radius > 0.0)) throw Error(Errc::invalid_argument, "collision radius must be positive");
  if (region.dim() != grid.dim) throw Error(Errc::invalid_argument, "region and grid dimensions differ");
  if (grid.dim == 1) return exact_1d(grid, inside_flags(grid, region), radius);

  if (sampler_budget < 10000)
    throw Error(Errc::invalid_argument, "2D collision volume needs a budget >= 1e4, got " + std::to_string(sampler_budget));
  auto box = region.bounding_box();
  box[0][0] -= radius;
  box[0][1] -= radius;
  box[1][0] += radius;
  box[1][1] += radius;
  const double area = (box[1][0] - box[0][0]) * (box[1][1] - box[0][1]);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < sampler_budget; ++s) {
    const Point x{box[0][0] + unit(rng) * (box[1][0] - box[0][0]), box[0][1] + unit(rng) * (box[1][1] - box[0][1])};
    const double rho = radius * std::sqrt(unit(rng));
    const double th = 2.0 * pi * unit(rng);
    const Point y{x[0] + rho * std::cos(th), x[1] + rho * std::sin(th)};
    if (region.contains(x) && !region.contains(y)) ++hits;
  }
  const double n = static_cast<double>(sampler_budget);
  const double p = static_cast<double>(hits) / n;
  const double scale = area * pi * radius * radius;
  return {scale * p, scale * std::sqrt(p * (1.0 - p) / n)};
}

CollisionEstimate boundary_collision_volume_swapped(const Grid& grid, const Region& region, double radius) {
  if (grid.dim != 1) throw Error(Errc::unsupported_dimension, "swapped collision volume is the 1D exact path");
  if (!(radius > 0.0)) throw Error(Errc::invalid_argument, "collision radius must be positive");
  auto inside = inside_flags(grid, region);
  for (auto& f : inside) f = f ? 0 : 1;
  return exact_1d(grid, inside, radius);
}

}  // namespace fbl
