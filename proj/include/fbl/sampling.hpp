#pragma once

// Exact sampling of the projection determinantal process with kernel U U^T.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "fbl/fermion.hpp"
#include "fbl/grid.hpp"

namespace fbl {

struct SampleBatch {
  std::vector<std::vector<std::size_t>> configurations;  // each sorted, N distinct nodes
  std::uint64_t seed = 0;
  [[nodiscard]] std::size_t count() const noexcept { return configurations.size(); }
};

/// Sequential conditional sampler. Configuration c draws from its own
/// stream seeded by (seed, c), so the batch does not depend on `threads`.
SampleBatch sample(const FermiProjector& proj, std::size_t count, std::uint64_t seed, unsigned threads = 1);

/// One configuration from the stream (seed, index).
std::vector<std::size_t> sample_one(const FermiProjector& proj, std::uint64_t seed, std::uint64_t index);

struct JointStatistics {
  std::vector<double> means;
  std::vector<double> mean_errors;
  std::vector<std::vector<double>> covariance;
  std::vector<std::vector<double>> covariance_errors;
};

JointStatistics empirical_joint(const SampleBatch& batch, const std::vector<Mask>& masks);

/// One row per configuration, sorted node indices.
void write_batch_csv(const SampleBatch& batch, std::ostream& out);

}  // namespace fbl
