#include "fbl/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "fbl/error.hpp"
#include "fbl/kernels.hpp"

namespace fbl {
namespace {

constexpr double kBreakdownTolerance = 1e-6;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

std::vector<std::size_t> sample_one(const FermiProjector& proj, std::uint64_t seed, std::uint64_t index) {
  const std::size_t n = proj.count();
  const std::size_t nodes = proj.nodes();
  auto rng = stream(seed, index);

  // basis of the remaining subspace in coefficient space, one column per dimension
  Matrix q = Matrix::identity(n);
  std::size_t rank = n;
  std::vector<double> diag(nodes, 0.0);
  for (std::size_t k = 0; k < n; ++k) kernels::axpy_sq(1.0, proj.u.col(k), diag);

  std::vector<double> row(n), z(n), y(nodes);
  std::vector<std::size_t> picked;
  picked.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    double total = 0.0;
    for (double d : diag) total += std::max(d, 0.0);
    double mass = 0.0;
    for (double d : diag) mass += d;
    if (std::abs(mass - static_cast<double>(n - t)) > kBreakdownTolerance) {
      std::ostringstream os;
      os << "residual mass " << mass << " deviates from " << n - t << " at step " << t;
      throw Error(Errc::numerical_breakdown, os.str());
    }

    const double target = uniform01(rng) * total;
    std::size_t pick = nodes;
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
      const double d = std::max(diag[i], 0.0);
      if (d <= 0.0) continue;
      acc += d;
      pick = i;
      if (acc > target) break;
    }
    if (pick == nodes) throw Error(Errc::numerical_breakdown, "no residual mass at step " + std::to_string(t));
    picked.push_back(pick);

    // z = Q Q^T u_pick, normalized
    for (std::size_t k = 0; k < n; ++k) row[k] = proj.u(pick, k);
    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t j = 0; j < rank; ++j) kernels::axpy(kernels::dot(q.col(j), row), q.col(j), z);
    const double norm = std::sqrt(kernels::dot(z, z));
    if (!(norm > 0.0)) throw Error(Errc::numerical_breakdown, "zero conditional direction at step " + std::to_string(t));
    for (double& x : z) x /= norm;

    // residual diagonal loses (u_m . z)^2
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k)
      if (z[k] != 0.0) kernels::axpy(z[k], proj.u.col(k), y);
    kernels::axpy_sq(-1.0, y, diag);
    diag[pick] = 0.0;

    // remove z from the basis: project, drop the most aligned column, re-orthonormalize
    std::size_t drop = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < rank; ++j) {
      auto c = q.col(j);
      const double f = kernels::dot(z, c);
      kernels::axpy(-f, z, c);
      if (std::abs(f) > best) {
        best = std::abs(f);
        drop = j;
      }
    }
    if (drop + 1 != rank) {
      auto last = q.col(rank - 1);
      std::copy(last.begin(), last.end(), q.col(drop).begin());
    }
    --rank;
    for (std::size_t j = 0; j < rank; ++j) {
      auto c = q.col(j);
      for (int pass = 0; pass < 2; ++pass) {
        kernels::axpy(-kernels::dot(z, c), z, c);
        for (std::size_t i = 0; i < j; ++i) kernels::axpy(-kernels::dot(q.col(i), c), q.col(i), c);
      }
      const double cn = std::sqrt(kernels::dot(c, c));
      if (!(cn > 1e-12)) throw Error(Errc::numerical_breakdown, "basis collapsed at step " + std::to_string(t));
      for (double& x : c) x /= cn;
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

SampleBatch sample(const FermiProjector& proj, std::size_t count, std::uint64_t seed, unsigned threads) {
  if (count < 1) throw Error(Errc::invalid_argument, "sample count must be >= 1");
  if (proj.count() == 0) throw Error(Errc::empty_occupation, "projector has rank 0");
  SampleBatch batch;
  batch.seed = seed;
  batch.configurations.resize(count);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads == 1) {
    for (std::size_t c = 0; c < count; ++c) batch.configurations[c] = sample_one(proj, seed, c);
    return batch;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < count; c += threads) batch.configurations[c] = sample_one(proj, seed, c);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return batch;
}

JointStatistics empirical_joint(const SampleBatch& batch, const std::vector<Mask>& masks) {
  const std::size_t s = batch.count();
  if (s == 0) throw Error(Errc::invalid_argument, "empty batch");
  const std::size_t k = masks.size();
  std::size_t max_node = 0;
  for (const auto& c : batch.configurations)
    for (std::size_t i : c) max_node = std::max(max_node, i);
  for (const auto& m : masks)
    for (std::size_t i : m.indices) max_node = std::max(max_node, i);

  std::vector<std::vector<double>> x(k, std::vector<double>(s, 0.0));
  std::vector<char> member(max_node + 1);
  for (std::size_t m = 0; m < k; ++m) {
    std::fill(member.begin(), member.end(), 0);
    for (std::size_t i : masks[m].indices) member[i] = 1;
    for (std::size_t c = 0; c < s; ++c)
      for (std::size_t i : batch.configurations[c]) x[m][c] += member[i];
  }

  JointStatistics j;
  const double sd = static_cast<double>(s);
  j.means.resize(k);
  j.mean_errors.resize(k);
  for (std::size_t m = 0; m < k; ++m) {
    double sum = 0.0;
    for (double v : x[m]) sum += v;
    j.means[m] = sum / sd;
  }
  j.covariance.assign(k, std::vector<double>(k, 0.0));
  j.covariance_errors.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      double sum = 0.0, sum2 = 0.0;
      for (std::size_t c = 0; c < s; ++c) {
        const double p = (x[a][c] - j.means[a]) * (x[b][c] - j.means[b]);
        sum += p;
        sum2 += p * p;
      }
      const double cov = s > 1 ? sum / (sd - 1.0) : 0.0;
      const double mp = sum / sd;
      const double var_p = s > 1 ? std::max(sum2 / sd - mp * mp, 0.0) * sd / (sd - 1.0) : 0.0;
      j.covariance[a][b] = j.covariance[b][a] = cov;
      j.covariance_errors[a][b] = j.covariance_errors[b][a] = std::sqrt(var_p / sd);
    }
  for (std::size_t m = 0; m < k; ++m) j.mean_errors[m] = std::sqrt(j.covariance[m][m] / sd);
  return j;
}

void write_batch_csv(const SampleBatch& batch, std::ostream& out) {
  const std::size_t n = batch.configurations.empty() ? 0 : batch.configurations.front().size();
  for (std::size_t i = 0; i < n; ++i) out << (i ? "," : "") << "p" << i;
  out << "\n";
  for (const auto& c : batch.configurations) {
    for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << c[i];
    out << "\n";
  }
}

}  // namespace fbl
