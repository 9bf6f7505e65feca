#pragma once

// Cell-centered grids over (-L, L)^n, regions with analytic boundaries, and
// the boundary-collision volume  int 1_Omega(x) 1_{Omega^c}(y) 1{|x-y| <= r}.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace fbl {

using Point = std::array<double, 2>;

struct Grid {
  int dim = 1;
  double half_width = 1.0;
  std::size_t points_per_axis = 2;
  double spacing = 1.0;  // h = 2L/M
  double weight = 1.0;   // h^n

  [[nodiscard]] std::size_t size() const noexcept {
    return dim == 1 ? points_per_axis : points_per_axis * points_per_axis;
  }
  [[nodiscard]] double coord(std::size_t i) const noexcept {
    return -half_width + (static_cast<double>(i) + 0.5) * spacing;
  }
  /// Flat index i + M*j, x fastest.
  [[nodiscard]] Point node(std::size_t flat) const noexcept {
    if (dim == 1) return {coord(flat), 0.0};
    return {coord(flat % points_per_axis), coord(flat / points_per_axis)};
  }
  [[nodiscard]] std::uint64_t fingerprint() const noexcept;
};

Grid build_grid(int dim, double half_width, std::size_t points_per_axis);

class Region {
 public:
  enum class Kind { interval, rectangle, disk, annulus, union_of_two };

  static Region interval(double a, double b);
  static Region rectangle(Point lower, Point upper);
  static Region disk(Point center, double radius);
  static Region annulus(Point center, double inner, double outer);
  static Region union_of(const Region& first, const Region& second);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] const std::vector<double>& params() const noexcept { return params_; }

  [[nodiscard]] bool contains(Point x) const;
  /// Analytic (n-1)-dimensional measure of the boundary.
  [[nodiscard]] double boundary_measure() const;
  /// Smooth w with Omega = {w < 0} and |grad w| ~ 1 near the boundary.
  [[nodiscard]] double defining_function(Point x) const;
  /// A point guaranteed to be inside (the center for convex kinds).
  [[nodiscard]] Point interior_point() const;
  /// Axis-aligned bounding box (lower, upper).
  [[nodiscard]] std::array<Point, 2> bounding_box() const;

  // 1D boundary: finitely many points.
  [[nodiscard]] std::vector<double> boundary_points_1d() const;

  // 2D boundary: a list of smooth pieces, each parametrized over [0, 1].
  struct BoundarySample {
    Point x;
    double speed;  // |d x / d t|
  };
  [[nodiscard]] std::size_t boundary_piece_count() const;
  [[nodiscard]] BoundarySample boundary_point(std::size_t piece, double t) const;

  [[nodiscard]] std::string describe() const;
  [[nodiscard]] std::uint64_t fingerprint() const;

 private:
  Region(Kind kind, int dim, std::vector<double> params) : kind_(kind), dim_(dim), params_(std::move(params)) {}

  Kind kind_;
  int dim_;
  std::vector<double> params_;
  std::shared_ptr<const Region> first_, second_;
};

/// Nodes of `grid` whose centers lie in `region`, ascending.
struct Mask {
  std::vector<std::size_t> indices;
  bool empty_warning = false;
  [[nodiscard]] std::size_t size() const noexcept { return indices.size(); }
};

Mask region_mask(const Grid& grid, const Region& region);
Mask full_mask(const Grid& grid);
Mask mask_intersection(const Mask& a, const Mask& b);
Mask mask_complement(const Grid& grid, const Mask& a);

struct CollisionEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for the exact 1D sum
};

/// 1D: exact double sum over grid nodes (Omega^c = grid nodes outside).
/// 2D: Monte Carlo with `sampler_budget` pairs from the given seed
/// (Omega^c = plane minus Omega).
CollisionEstimate boundary_collision_volume(const Grid& grid, const Region& region, double radius,
                                            std::size_t sampler_budget, std::uint64_t seed = 0);

/// Same integral with Omega and its complement exchanged (1D exact path).
CollisionEstimate boundary_collision_volume_swapped(const Grid& grid, const Region& region, double radius);

}  // namespace fbl
