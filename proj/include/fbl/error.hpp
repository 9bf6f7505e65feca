#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbl {

enum class Errc {
  invalid_argument,
  config_error,
  io_failure,
  // numeric
  resolution_too_coarse,
  box_too_small,
  empty_droplet,
  no_convergence,
  matrix_too_large,
  cutoff_too_low,
  empty_occupation,
  not_a_projection,
  degenerate_spectrum,
  too_many_parameters,
  zero_variance,
  singular_determinant,
  numerical_breakdown,
  region_not_in_bulk,
  outside_bulk,
  non_integrable,
  unsupported_dimension,
  argument_too_small,
  degenerate_phase,
  budget_exceeded,
  insufficient_points,
  quadrature_failure,
};

constexpr std::string_view to_string(Errc c) noexcept {
  switch (c) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::config_error: return "ConfigError";
    case Errc::io_failure: return "IoFailure";
    case Errc::resolution_too_coarse: return "ResolutionTooCoarse";
    case Errc::box_too_small: return "BoxTooSmall";
    case Errc::empty_droplet: return "EmptyDroplet";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::matrix_too_large: return "MatrixTooLarge";
    case Errc::cutoff_too_low: return "CutoffTooLow";
    case Errc::empty_occupation: return "EmptyOccupation";
    case Errc::not_a_projection: return "NotAProjection";
    case Errc::degenerate_spectrum: return "DegenerateSpectrum";
    case Errc::too_many_parameters: return "TooManyParameters";
    case Errc::zero_variance: return "ZeroVariance";
    case Errc::singular_determinant: return "SingularDeterminant";
    case Errc::numerical_breakdown: return "NumericalBreakdown";
    case Errc::region_not_in_bulk: return "RegionNotInBulk";
    case Errc::outside_bulk: return "OutsideBulk";
    case Errc::non_integrable: return "NonIntegrable";
    case Errc::unsupported_dimension: return "UnsupportedDimension";
    case Errc::argument_too_small: return "ArgumentTooSmall";
    case Errc::degenerate_phase: return "DegeneratePhase";
    case Errc::budget_exceeded: return "BudgetExceeded";
    case Errc::insufficient_points: return "InsufficientPoints";
    case Errc::quadrature_failure: return "QuadratureFailure";
  }
  return "Unknown";
}

/// Everything the library throws. The message carries the offending numbers.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

  /// Config and usage problems versus failures of the numerics.
  [[nodiscard]] bool is_config() const noexcept {
    return code_ == Errc::config_error || code_ == Errc::invalid_argument;
  }

 private:
  Errc code_;
};

}  // namespace fbl
