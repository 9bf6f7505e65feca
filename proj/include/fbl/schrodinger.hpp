#pragma once

// H = -hbar^2 Lap_h + diag(V) on a cell-centered grid with Dirichlet walls.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fbl/grid.hpp"
#include "fbl/matrix.hpp"

namespace fbl {

class Potential {
 public:
  enum class Kind { harmonic, power, separable, tabulated };

  /// V(x) = |x|^2
  static Potential harmonic();
  /// V(x) = |x|^q, q > 0
  static Potential power(double q);
  /// V(x) = vx(x1) + vy(x2); 2D only, each factor a 1D kind.
  static Potential separable(const Potential& vx, const Potential& vy);
  /// Values on their own cell-centered grid over (-L, L)^n, nearest-node lookup.
  static Potential tabulated(int dim, double half_width, std::vector<double> values);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double exponent() const noexcept { return q_; }
  [[nodiscard]] double value(Point x, int dim) const;

  /// True when V splits as a sum of 1D potentials in 2D (harmonic, power q = 2,
  /// separable).
  [[nodiscard]] bool is_separable() const noexcept;
  /// 1D factor along `axis` (0 or 1) of a separable potential.
  [[nodiscard]] Potential factor(int axis) const;
  /// Radial kinds (harmonic, power) admit closed-form droplets and Weyl volumes.
  [[nodiscard]] bool is_radial() const noexcept { return kind_ == Kind::harmonic || kind_ == Kind::power; }
  /// Greatest lower bound over R^n (over the table for tabulated kinds).
  [[nodiscard]] double infimum() const;
  [[nodiscard]] int table_dim() const noexcept { return tab_dim_; }
  [[nodiscard]] double table_half_width() const noexcept { return tab_half_width_; }
  [[nodiscard]] std::size_t table_points() const noexcept { return tab_points_; }
  [[nodiscard]] const std::vector<double>& table_values() const noexcept { return tab_values_; }

  [[nodiscard]] std::string describe() const;

 private:
  Potential() = default;
  Kind kind_ = Kind::harmonic;
  double q_ = 2.0;
  std::shared_ptr<const Potential> vx_, vy_;
  // tabulated
  int tab_dim_ = 1;
  double tab_half_width_ = 1.0;
  std::size_t tab_points_ = 0;
  std::vector<double> tab_values_;
};

struct AssemblyDiagnostics {
  double spacing = 0.0;
  double hbar = 0.0;
  double points_per_wavelength = 0.0;
  double wall_margin = 0.0;  // min V on boundary cells minus mu
  double min_potential = 0.0;
};

struct SchrodingerProblem {
  Grid grid;
  Potential potential = Potential::harmonic();
  double hbar = 0.0;
  double mu = 0.0;
  std::vector<double> potential_values;  // V at each node
  double coupling = 0.0;                 // off-diagonal entry, -hbar^2/h^2
  AssemblyDiagnostics diagnostics;

  /// Diagonal entry 2 n hbar^2/h^2 + V(x_i).
  [[nodiscard]] double diagonal(std::size_t i) const noexcept {
    return -2.0 * grid.dim * coupling + potential_values[i];
  }
  /// Full symmetric matrix (M^n)^2 entries; guarded by the caller's size cap.
  [[nodiscard]] Matrix dense() const;
  /// y = H x, matrix-free.
  void apply(std::span<const double> x, std::span<double> y) const;
  /// max_i sum_j |H_ij|
  [[nodiscard]] double norm1() const;
};

/// Minimal M satisfying the 8-points-per-wavelength rule for this box.
std::size_t minimal_points_per_axis(double half_width, double hbar, double mu, double min_potential);

SchrodingerProblem assemble(const Grid& grid, const Potential& potential, double hbar, double mu,
                            double wall_margin = 0.5);

struct Droplet {
  enum class Shape { interval, disk, general };
  Shape shape = Shape::general;
  double radius = 0.0;  // interval (-radius, radius) or disk radius
  std::string describe() const;
};

Droplet droplet_descriptor(const Potential& potential, double mu, int dim);

}  // namespace fbl
