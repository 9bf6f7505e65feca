#pragma once

// Config-driven hbar sweeps, regression fits and result files.

#include <array>
#include <cstddef>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fbl/fermion.hpp"
#include "fbl/grid.hpp"
#include "fbl/schrodinger.hpp"

namespace fbl {

enum class ExperimentKind { variance_sweep, entropy_sweep, j1_sweep, widom, clt, covariance, sample, weyl, oscint, collision };

std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_kind(std::string_view name);

struct FitRecord {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = slope x + intercept; at least 3 points.
FitRecord linear_fit(std::span<const double> x, std::span<const double> y);
/// y = A log(1/hbar) + B over (hbar, y) pairs; at least 4 points, distinct hbar.
/// R^2 is reported as 0 when y is constant.
FitRecord log_slope_fit(std::span<const std::pair<double, double>> points);

struct ProblemSpec {
  int dim = 1;
  double half_width = 1.5;
  std::size_t points_per_axis = 0;  // 0: auto_points_per_axis
  double mu = 1.0;
  double wall_margin = 0.5;
  Potential potential = Potential::harmonic();
};

struct ObservableFunction {
  enum class Kind { constant, affine };
  Kind kind = Kind::constant;
  std::array<double, 3> coeffs{1.0, 0.0, 0.0};  // c0 + c1 x1 + c2 x2
  [[nodiscard]] double operator()(Point x) const noexcept { return coeffs[0] + coeffs[1] * x[0] + coeffs[2] * x[1]; }
  [[nodiscard]] bool is_constant() const noexcept { return coeffs[1] == 0.0 && coeffs[2] == 0.0; }
};

struct OscintSpec {
  int dim = 1;
  std::array<double, 4> hessian{1.0, 0.0, 0.0, 1.0};
  std::string amplitude = "gaussian";  // gaussian | annulus
  double delta_exponent = 0.4;         // delta = hbar^exponent for gaussian
  double delta = 1.0;                  // fixed scale for annulus
  double inner = 0.3;
  double outer = 0.6;
  double support_scale = 8.0;  // gaussian support radius in units of delta
  std::vector<int> orders{1, 2, 3};
};

struct CollisionSpec {
  std::vector<double> radii{0.02, 0.04, 0.08, 0.16};
  std::size_t budget = 200000;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::variance_sweep;
  ProblemSpec problem;
  std::vector<Region> regions;
  ObservableFunction f;
  std::optional<SpectralFunction> g;
  std::vector<double> hbars;  // distinct; cells are reported by descending hbar
  std::uint64_t seed = 0;
  std::string output_dir = "fbl-out";
  unsigned threads = 1;
  std::size_t sample_count = 1000;
  OscintSpec oscint;
  CollisionSpec collision;
  std::string source_text;  // the config exactly as read
};

/// Parses and validates a TOML config. Throws Error(config_error).
ExperimentConfig load_config(std::string_view toml_text);
/// Reads a .toml config or a result manifest (.json) carrying config_text.
ExperimentConfig load_config_file(const std::string& path);

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct SweepResult {
  ExperimentKind kind = ExperimentKind::variance_sweep;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> failures;  // per row; empty when the cell succeeded
  nlohmann::ordered_json fits = nlohmann::ordered_json::object();
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<Series> plot;
  std::string plot_x_label, plot_y_label;
  std::vector<std::pair<std::string, std::string>> extra_files;  // name, contents
  std::string config_text;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;

  [[nodiscard]] bool ok() const noexcept;
  /// Column index by name; throws when absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
};

SweepResult run(const ExperimentConfig& config);

struct EmitOptions {
  bool csv = true;
  bool json = true;
  bool svg = false;
  bool timing = false;  // adds wall_seconds to the manifest
};

/// "%.17g"
std::string format_number(double v);
std::string to_csv(const SweepResult& result);
std::string to_json(const SweepResult& result, bool timing = false);
std::string to_svg(const SweepResult& result);

/// Writes result.csv, manifest.json, plot.svg and extra files into dir.
/// Returns the written paths. Throws Error(io_failure).
std::vector<std::string> emit(const SweepResult& result, const std::string& dir, const EmitOptions& options);

/// Even M >= 16 with at least 16 points per shortest wavelength.
std::size_t auto_points_per_axis(const ProblemSpec& spec, double hbar);

}  // namespace fbl
