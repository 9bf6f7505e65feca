#include "fbl/fermion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fbl/error.hpp"
#include "fbl/kernels.hpp"
#include "fbl/symeig.hpp"

namespace fbl {
namespace {

constexpr double kClampWindow = 1e-9;
constexpr double kHardWindow = 1e-6;

// sigma in [0, 1] after the clamping rules; values outside the hard window throw.
std::vector<double> clamp_sigma(std::vector<double> s, double& excursion) {
  excursion = 0.0;
  for (double& x : s) {
    const double out = std::max(-x, x - 1.0);
    excursion = std::max(excursion, out);
    if (out > kHardWindow) {
      std::ostringstream os;
      os << "restricted eigenvalue " << x << " outside [0, 1] beyond " << kHardWindow;
      throw Error(Errc::numerical_breakdown, os.str());
    }
    x = std::clamp(x, 0.0, 1.0);
  }
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

Matrix gather_rows(const Matrix& u, std::span<const std::size_t> rows) {
  Matrix r(rows.size(), u.cols());
  for (std::size_t k = 0; k < u.cols(); ++k) {
    auto src = u.col(k);
    auto dst = r.col(k);
    for (std::size_t i = 0; i < rows.size(); ++i) dst[i] = src[rows[i]];
  }
  return r;
}

Matrix symmetric_products(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.cols();
  Matrix g(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j; i < n; ++i) g(i, j) = g(j, i) = kernels::dot(a.col(i), b.col(j));
  return g;
}

bool is_projection(const Matrix& p, double tol) {
  const std::size_t n = p.rows();
  if (p.cols() != n) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(p(i, j) - p(j, i)) > tol) return false;
  return max_abs(subtract(multiply(p, p), p)) <= tol;
}

double frobenius_inner(const Matrix& a, const Matrix& b) {
  return kernels::dot({a.data(), a.rows() * a.cols()}, {b.data(), b.rows() * b.cols()});
}

}  // namespace

double FermiProjector::kernel(std::size_t i, std::size_t j) const {
  double s = 0.0;
  for (std::size_t k = 0; k < u.cols(); ++k) s += u(i, k) * u(j, k);
  return s / grid.weight;
}

FermiProjector fermi_projector(const SpectralData& spectral, double mu) {
  const std::size_t n = fermi_count(spectral, mu);
  if (n == 0) throw Error(Errc::empty_occupation, "no eigenvalue at or below mu");
  FermiProjector p;
  p.grid = spectral.grid;
  p.hbar = spectral.hbar;
  p.mu = mu;
  p.u = Matrix(spectral.grid.size(), n);
  for (std::size_t k = 0; k < n; ++k) spectral.vector(k, p.u.col(k));
  return p;
}

Matrix weighted_gram(const FermiProjector& proj, std::span<const std::size_t> rows, std::span<const double> weights) {
  const Matrix r = gather_rows(proj.u, rows);
  if (weights.empty()) return symmetric_products(r, r);
  if (weights.size() != rows.size()) throw Error(Errc::invalid_argument, "one weight per selected row");
  Matrix wr = r;
  for (std::size_t k = 0; k < wr.cols(); ++k) {
    auto c = wr.col(k);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= weights[i];
  }
  return symmetric_products(r, wr);
}

RestrictedSpectrum restricted_spectrum(const FermiProjector& proj, const Mask& mask, std::uint64_t region_fingerprint) {
  for (std::size_t i : mask.indices)
    if (i >= proj.nodes()) throw Error(Errc::invalid_argument, "mask index outside the grid");
  const Matrix g = weighted_gram(proj, mask.indices);
  double trace = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i) trace += g(i, i);
  RestrictedSpectrum s;
  s.sigma = clamp_sigma(linalg::symmetric_eigenvalues(g), s.max_excursion);
  s.gram_trace = trace;
  s.region_fingerprint = region_fingerprint;
  s.hbar = proj.hbar;
  return s;
}

RestrictedSpectrum restricted_spectrum_from(std::vector<double> sigma) {
  RestrictedSpectrum s;
  for (double x : sigma) s.gram_trace += x;
  s.sigma = clamp_sigma(std::move(sigma), s.max_excursion);
  return s;
}

double binary_entropy(double l) noexcept {
  if (l <= 0.0 || l >= 1.0) return 0.0;
  return -l * std::log(l) - (1.0 - l) * std::log1p(-l);
}

CommutatorReport commutator_report(const RestrictedSpectrum& sigma) {
  CommutatorReport r;
  for (double s : sigma.sigma) {
    const double t = s * (1.0 - s);
    r.variance += t;
    r.j1 += std::sqrt(t);
    r.entropy += binary_entropy(s);
  }
  r.j2_squared = 2.0 * r.variance;
  r.j1 *= 2.0;
  return r;
}

SpectralLinkReport spectral_link_check(const Matrix& p, const Matrix& q) {
  const std::size_t n = p.rows();
  if (n == 0 || n > 64 || q.rows() != n) throw Error(Errc::invalid_argument, "projections must share a dimension <= 64");
  if (!is_projection(p, 1e-10)) throw Error(Errc::not_a_projection, "P is not a symmetric idempotent");
  if (!is_projection(q, 1e-10)) throw Error(Errc::not_a_projection, "Q is not a symmetric idempotent");

  SpectralLinkReport r;
  const auto lambda = linalg::symmetric_eigenvalues(multiply(multiply(p, q), p));
  for (double l : lambda) {
    const double t = l * (1.0 - l);
    r.from_compression.push_back(t);
    r.from_compression.push_back(t);
    r.trace_compression += 2.0 * t;
  }
  std::sort(r.from_compression.begin(), r.from_compression.end(), std::greater<>());
  r.from_compression.resize(n);  // at most n/2 pairs are nonzero; the tail is zero

  const Matrix c = subtract(multiply(p, q), multiply(q, p));
  const Matrix minus_c2 = multiply(transpose(c), c);
  r.from_commutator = linalg::symmetric_eigenvalues(minus_c2);
  std::sort(r.from_commutator.begin(), r.from_commutator.end(), std::greater<>());
  for (std::size_t i = 0; i < n; ++i) r.trace_commutator += minus_c2(i, i);

  for (std::size_t i = 0; i < n; ++i)
    r.max_deviation = std::max(r.max_deviation, std::abs(r.from_compression[i] - r.from_commutator[i]));
  return r;
}

EntropySandwich entropy_sandwich(const RestrictedSpectrum& sigma) {
  const auto rep = commutator_report(sigma);
  if (rep.j2_squared == 0.0) throw Error(Errc::degenerate_spectrum, "all sigma in {0, 1}; entropy = 0");
  return {rep.j2_squared, rep.entropy, 2.0 * rep.j2_squared * std::log(rep.j1 / rep.j2_squared)};
}

CountingLaw counting_law(const RestrictedSpectrum& sigma) {
  const std::size_t n = sigma.sigma.size();
  if (n > kMaxCountingParameters) {
    std::ostringstream os;
    os << n << " Bernoulli parameters exceed the limit " << kMaxCountingParameters;
    throw Error(Errc::too_many_parameters, os.str());
  }
  const auto& kt = kernels::active();
  std::vector<double> a(n + 1, 0.0), b(n + 1, 0.0);
  a[0] = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    kt.bernoulli_step(a.data(), b.data(), sigma.sigma[k], k + 1);
    std::swap(a, b);
  }
  CountingLaw law;
  for (double& p : a) p = std::max(p, 0.0);
  law.pmf = std::move(a);
  for (double s : sigma.sigma) {
    const double t = s * (1.0 - s);
    law.mean += s;
    law.variance += t;
    law.kappa3 += t * (1.0 - 2.0 * s);
    law.kappa4 += t * (1.0 - 6.0 * t);
  }
  return law;
}

std::array<double, 4> pmf_cumulants(std::span<const double> pmf) {
  double mean = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) mean += static_cast<double>(k) * pmf[k];
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    const double d = static_cast<double>(k) - mean;
    m2 += d * d * pmf[k];
    m3 += d * d * d * pmf[k];
    m4 += d * d * d * d * pmf[k];
  }
  return {mean, m2, m3, m4 - 3.0 * m2 * m2};
}

GaussianityReport gaussianity_report(const CountingLaw& law) {
  if (!(law.variance > 0.0)) throw Error(Errc::zero_variance, "counting law is deterministic");
  GaussianityReport g;
  g.skewness = law.kappa3 / std::pow(law.variance, 1.5);
  g.excess_kurtosis = law.kappa4 / (law.variance * law.variance);
  const double sd = std::sqrt(law.variance);
  double cdf = 0.0;
  for (std::size_t k = 0; k < law.pmf.size(); ++k) {
    cdf += law.pmf[k];
    const double z = (static_cast<double>(k) + 0.5 - law.mean) / sd;
    const double phi = 0.5 * std::erfc(-z / std::numbers::sqrt2);
    g.ks_half_integer = std::max(g.ks_half_integer, std::abs(std::min(cdf, 1.0) - phi));
  }
  // k = -1/2
  g.ks_half_integer = std::max(g.ks_half_integer, 0.5 * std::erfc((law.mean + 0.5) / (sd * std::numbers::sqrt2)));
  return g;
}

double laplace_transform(const FermiProjector& proj, std::span<const double> weights) {
  if (weights.size() != proj.nodes()) throw Error(Errc::invalid_argument, "one weight per grid node");
  std::vector<std::size_t> rows;
  std::vector<double> w;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i])) throw Error(Errc::invalid_argument, "weights must be finite");
    if (weights[i] != 0.0) {
      rows.push_back(i);
      w.push_back(std::expm1(weights[i]));
    }
  }
  const std::size_t n = proj.count();
  Matrix a = weighted_gram(proj, rows, w);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += 1.0;

  // LU with partial pivoting; the determinant is positive for a valid DPP.
  double logdet = 0.0;
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (a(piv, k) == 0.0) throw Error(Errc::singular_determinant, "zero pivot at column " + std::to_string(k));
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      sign = -sign;
    }
    const double d = a(k, k);
    if (d < 0.0) sign = -sign;
    logdet += std::log(std::abs(d));
    for (std::size_t i = k + 1; i < n; ++i) a(i, k) /= d;
    for (std::size_t j = k + 1; j < n; ++j) {
      const double t = a(k, j);
      if (t == 0.0) continue;
      auto cj = a.col(j).subspan(k + 1);
      kernels::axpy(-t, std::span<const double>(a.col(k).subspan(k + 1)), cj);
    }
  }
  if (sign < 0) throw Error(Errc::singular_determinant, "determinant changed sign (negative)");
  return logdet;
}

double cross_covariance(const FermiProjector& proj, const Mask& a, const Mask& b) {
  const Mask ab = mask_intersection(a, b);
  const Matrix ga = weighted_gram(proj, a.indices);
  const Matrix gb = weighted_gram(proj, b.indices);
  double trace_ab = 0.0;
  for (std::size_t k = 0; k < proj.count(); ++k) {
    auto c = proj.u.col(k);
    for (std::size_t i : ab.indices) trace_ab += c[i] * c[i];
  }
  return trace_ab - frobenius_inner(ga, gb);
}

double observable_variance(const FermiProjector& proj, std::span<const double> f) {
  if (f.size() != proj.nodes()) throw Error(Errc::invalid_argument, "one f value per grid node");
  std::vector<std::size_t> rows;
  std::vector<double> w;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] != 0.0) {
      rows.push_back(i);
      w.push_back(f[i]);
    }
  const Matrix gf = weighted_gram(proj, rows, w);
  double trace_f2 = 0.0;
  for (std::size_t k = 0; k < proj.count(); ++k) {
    auto c = proj.u.col(k);
    for (std::size_t r = 0; r < rows.size(); ++r) trace_f2 += w[r] * w[r] * c[rows[r]] * c[rows[r]];
  }
  return trace_f2 - frobenius_inner(gf, gf);
}

SpectralFunction variance_function() {
  return {"variance", [](double l) { return l * (1.0 - l); }};
}

SpectralFunction entropy_function() { return {"entropy", binary_entropy}; }

SpectralFunction renyi_function(double alpha) {
  if (!(alpha > 0.0)) throw Error(Errc::invalid_argument, "Renyi index must be positive");
  std::ostringstream os;
  os.precision(17);
  os << "renyi(" << alpha << ")";
  if (alpha == 1.0) return {os.str(), binary_entropy};
  return {os.str(), [alpha](double l) {
            if (l <= 0.0 || l >= 1.0) return 0.0;
            return std::log(std::pow(l, alpha) + std::pow(1.0 - l, alpha)) / (1.0 - alpha);
          }};
}

SpectralFunction poly_function(std::vector<double> coeffs) {
  std::ostringstream os;
  os.precision(17);
  os << "poly(";
  for (std::size_t k = 0; k < coeffs.size(); ++k) os << (k ? "," : "") << coeffs[k];
  os << ")";
  return {os.str(), [c = std::move(coeffs)](double l) {
            double s = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * l + *it;
            return s;
          }};
}

double spectral_functional(const RestrictedSpectrum& sigma, const std::function<double(double)>& g) {
  double s = 0.0;
  for (double x : sigma.sigma) s += g(std::clamp(x, 0.0, 1.0));
  return s;
}

}  // namespace fbl
