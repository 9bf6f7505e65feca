#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fbl/matrix.hpp"
#include "fbl/schrodinger.hpp"

namespace fbl {

/// Eigenpairs of a SchrodingerProblem retained up to a cutoff. Vectors are
/// Euclidean-orthonormal. On the separable 2D path the vectors are kept as
/// pairs of 1D factors and materialized on demand.
struct SpectralData {
  struct SeparableFactors {
    std::vector<double> values_x, values_y;
    Matrix vectors_x, vectors_y;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // (i, j) per retained level
  };

  Grid grid;
  double hbar = 0.0;
  double mu = 0.0;
  double upper_cutoff = 0.0;
  bool complete = false;  // every eigenpair of the matrix was computed
  std::vector<double> eigenvalues;
  Matrix eigenvectors;  // empty when separable
  std::optional<SeparableFactors> separable;

  [[nodiscard]] std::size_t count() const noexcept { return eigenvalues.size(); }
  /// Writes eigenvector k (length grid.size()) into out.
  void vector(std::size_t k, std::span<double> out) const;
};

enum class SolverPath { automatic, dense };

constexpr double kDefaultWindowMargin = 0.25;
constexpr std::size_t kDenseCap = 4096;

/// Retains all pairs with eigenvalue <= upper_cutoff (default mu + 0.25).
/// automatic: 1D tridiagonal QL + inverse iteration; 2D separable tensor
/// pairs; otherwise dense Householder + QL (size cap 4096).
SpectralData eigendecompose(const SchrodingerProblem& problem, std::optional<double> upper_cutoff = std::nullopt,
                            SolverPath path = SolverPath::automatic);

/// #{k : lambda_k <= mu}
std::size_t fermi_count(const SpectralData& spectral, double mu);

/// c_n Z / (2 pi hbar)^n with Z = int (mu - V)_+^{n/2} dx. Box half-width is
/// needed for separable and tabulated kinds (integration domain).
double weyl_volume(const Potential& potential, double mu, int dim, double half_width = 0.0);
double weyl_prediction(const Potential& potential, double mu, double hbar, int dim, double half_width = 0.0);

/// #{k : |lambda_k - lambda| <= hbar}
std::size_t window_count(const SpectralData& spectral, double lambda, double hbar);

/// #{k : lambda_k <= x} straight from the matrix. 1D uses a Sturm sequence
/// (no eigenpairs, linear in M); other grids fall back to eigendecompose.
std::size_t counting_function(const SchrodingerProblem& problem, double x);
/// #{k : |lambda_k - lambda| <= hbar}, computed like counting_function.
std::size_t window_count(const SchrodingerProblem& problem, double lambda, double hbar);

}  // namespace fbl
