#include "fbl/symeig.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>

#include "fbl/error.hpp"
#include "fbl/kernels.hpp"

namespace fbl::linalg {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxQlIterations = 60;

// Implicit-shift QL on (d, e), e[i] coupling i and i+1, e.back() == 0.
// Rotations are applied to the columns of z when given.
// Couplings below eps * ||T|| are dropped.
void implicit_ql(std::vector<double>& d, std::vector<double>& e, Matrix* z) {
  const std::size_t n = d.size();
  double tnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) tnorm = std::max(tnorm, std::abs(d[i]) + 2.0 * std::abs(e[i]));
  const double floor = kEps * tnorm;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= kEps * dd || std::abs(e[m]) <= floor) break;
      }
      if (m == l) break;
      if (iter++ == kMaxQlIterations)
        throw Error(Errc::no_convergence, "implicit QL stalled at eigenvalue index " + std::to_string(l));

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool deflated = false;
      for (std::size_t ii = m; ii-- > l;) {
        const double f = s * e[ii];
        const double b = c * e[ii];
        r = std::hypot(f, g);
        e[ii + 1] = r;
        if (r == 0.0) {
          d[ii + 1] -= p;
          e[m] = 0.0;
          deflated = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[ii + 1] - p;
        r = (d[ii] - g) * s + 2.0 * c * b;
        p = s * r;
        d[ii + 1] = g + p;
        g = c * r - b;
        if (z != nullptr) kernels::rot(z->col(ii), z->col(ii + 1), c, s);
      }
      if (deflated) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

EigenPairs sorted_pairs(std::vector<double> d, Matrix z) {
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  EigenPairs out;
  out.values.resize(d.size());
  out.vectors = Matrix(z.rows(), d.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.values[k] = d[order[k]];
    std::copy(z.col(order[k]).begin(), z.col(order[k]).end(), out.vectors.col(k).begin());
  }
  return out;
}

void check_tridiagonal(std::span<const double> diag, std::span<const double> off) {
  if (diag.empty()) throw Error(Errc::invalid_argument, "empty tridiagonal matrix");
  if (off.size() + 1 != diag.size())
    throw Error(Errc::invalid_argument, "off-diagonal must have n-1 entries");
}

// Householder reduction of the symmetric `a` (lower triangle, overwritten) to
// tridiagonal (d, e). Reflector k is stored below the subdiagonal of column k
// with its scale in beta[k].
void householder(Matrix& a, std::vector<double>& d, std::vector<double>& e, std::vector<double>& beta) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < j; ++i) a(i, j) = a(j, i);
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  beta.assign(n, 0.0);
  std::vector<double> p(n), w(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    std::span<double> x{&a(k + 1, k), m};
    d[k] = a(k, k);
    const double sigma = kernels::dot(x.subspan(1), x.subspan(1));
    const double x0 = x[0];
    if (sigma == 0.0) {
      e[k] = x0;
      std::fill(x.begin(), x.end(), 0.0);
      continue;
    }
    const double alpha = -std::copysign(std::sqrt(x0 * x0 + sigma), x0);
    x[0] = x0 - alpha;
    const double bk = 2.0 / (x[0] * x[0] + sigma);
    beta[k] = bk;
    e[k] = alpha;

    std::span<double> pk{p.data(), m};
    std::span<double> wk{w.data(), m};
    std::fill(pk.begin(), pk.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      std::span<const double> col{&a(k + 1, k + 1 + j), m};
      kernels::axpy(bk * x[j], col, pk);
    }
    const double kappa = 0.5 * bk * kernels::dot(pk, x);
    std::copy(pk.begin(), pk.end(), wk.begin());
    kernels::axpy(-kappa, x, wk);
    for (std::size_t j = 0; j < m; ++j) {
      std::span<double> col{&a(k + 1, k + 1 + j), m};
      kernels::axpy(-wk[j], x, col);
      kernels::axpy(-x[j], wk, col);
    }
  }
  if (n >= 2) {
    d[n - 2] = a(n - 2, n - 2);
    e[n - 2] = a(n - 1, n - 2);
  }
  d[n - 1] = a(n - 1, n - 1);
  e[n - 1] = 0.0;
}

Matrix accumulate_reflectors(const Matrix& a, const std::vector<double>& beta) {
  const std::size_t n = a.rows();
  Matrix q = Matrix::identity(n);
  for (std::size_t k = n >= 3 ? n - 2 : 0; k-- > 0;) {
    if (beta[k] == 0.0) continue;
    const std::size_t m = n - k - 1;
    std::span<const double> v = a.col(k).subspan(k + 1, m);
    for (std::size_t j = k + 1; j < n; ++j) {
      std::span<double> col{&q(k + 1, j), m};
      const double t = beta[k] * kernels::dot(v, col);
      if (t != 0.0) kernels::axpy(-t, v, col);
    }
  }
  return q;
}

// LU with partial pivoting of (T - lambda I), kept in three bands.
struct TridiagonalLu {
  std::vector<double> u0, u1, u2, mult;
  std::vector<char> swapped;

  TridiagonalLu(std::span<const double> diag, std::span<const double> off, double lambda, double tiny) {
    const std::size_t n = diag.size();
    u0.assign(n, 0.0);
    u1.assign(n, 0.0);
    u2.assign(n, 0.0);
    mult.assign(n, 0.0);
    swapped.assign(n, 0);
    double cur_diag = diag[0] - lambda;
    double cur_sup = n > 1 ? off[0] : 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double next_sub = off[k];
      const double next_diag = diag[k + 1] - lambda;
      const double next_sup = k + 2 < n ? off[k + 1] : 0.0;
      if (std::abs(cur_diag) >= std::abs(next_sub)) {
        if (cur_diag == 0.0) cur_diag = tiny;
        const double mk = next_sub / cur_diag;
        u0[k] = cur_diag;
        u1[k] = cur_sup;
        u2[k] = 0.0;
        mult[k] = mk;
        cur_diag = next_diag - mk * cur_sup;
        cur_sup = next_sup;
      } else {
        const double mk = cur_diag / next_sub;
        swapped[k] = 1;
        u0[k] = next_sub;
        u1[k] = next_diag;
        u2[k] = next_sup;
        mult[k] = mk;
        cur_diag = cur_sup - mk * next_diag;
        cur_sup = -mk * next_sup;
      }
    }
    u0[n - 1] = cur_diag == 0.0 ? tiny : cur_diag;
  }

  void solve(std::vector<double>& y) const {
    const std::size_t n = y.size();
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (swapped[k]) std::swap(y[k], y[k + 1]);
      y[k + 1] -= mult[k] * y[k];
    }
    for (std::size_t k = n; k-- > 0;) {
      double s = y[k];
      if (k + 1 < n) s -= u1[k] * y[k + 1];
      if (k + 2 < n) s -= u2[k] * y[k + 2];
      y[k] = s / u0[k];
    }
  }
};

void normalize(std::span<double> v) {
  const double nrm = std::sqrt(kernels::dot(v, v));
  if (nrm == 0.0) return;
  for (double& x : v) x /= nrm;
}

// Largest-magnitude component made positive, for reproducible signs.
void canonical_sign(std::span<double> v) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
  if (v[arg] < 0.0)
    for (double& x : v) x = -x;
}

}  // namespace

std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag, std::span<const double> off) {
  check_tridiagonal(diag, off);
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(off.begin(), off.end());
  e.push_back(0.0);
  implicit_ql(d, e, nullptr);
  std::sort(d.begin(), d.end());
  return d;
}

namespace {

constexpr std::size_t kLanes = 8;

struct SturmData {
  std::span<const double> diag;
  std::vector<double> off2;
  double tiny = 0.0;

  SturmData(std::span<const double> d, std::span<const double> off, double scale) : diag(d), off2(off.size()) {
    for (std::size_t i = 0; i < off.size(); ++i) off2[i] = off[i] * off[i];
    tiny = kEps * std::max(scale, 1e-300);
  }

  // Negative LDL^T pivots of T - x[l] for kLanes shifts in one pass. A zero
  // pivot is replaced by -tiny (inclusive) or +tiny.
  void counts(const double* x, std::size_t* out, bool inclusive = true) const {
    double q[kLanes];
    std::size_t c[kLanes] = {};
    const double z = inclusive ? -tiny : tiny;
    for (std::size_t l = 0; l < kLanes; ++l) {
      q[l] = diag[0] - x[l];
      q[l] = q[l] == 0.0 ? z : q[l];
      c[l] += q[l] < 0.0;
    }
    for (std::size_t i = 1; i < diag.size(); ++i) {
      const double d = diag[i], e2 = off2[i - 1];
      for (std::size_t l = 0; l < kLanes; ++l) {
        double v = d - x[l] - e2 / q[l];
        v = v == 0.0 ? z : v;
        c[l] += v < 0.0;
        q[l] = v;
      }
    }
    std::copy(c, c + kLanes, out);
  }
};

double gershgorin_scale(std::span<const double> diag, std::span<const double> off, double& lo, double& hi) {
  const std::size_t n = diag.size();
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  return std::max(std::abs(lo), std::abs(hi));
}

}  // namespace

std::size_t tridiagonal_count(std::span<const double> diag, std::span<const double> off, double x, bool inclusive) {
  check_tridiagonal(diag, off);
  double lo, hi;
  const SturmData sturm(diag, off, std::max(gershgorin_scale(diag, off, lo, hi), std::abs(x)));
  double xs[kLanes];
  std::fill(xs, xs + kLanes, x);
  std::size_t c[kLanes];
  sturm.counts(xs, c, inclusive);
  return c[0];
}

std::vector<double> tridiagonal_eigenvalues_below(std::span<const double> diag, std::span<const double> off,
                                                  double cutoff) {
  check_tridiagonal(diag, off);
  double lo, hi;
  const double norm = gershgorin_scale(diag, off, lo, hi);
  const SturmData sturm(diag, off, std::max(norm, std::abs(cutoff)));
  const std::size_t m = tridiagonal_count(diag, off, cutoff);
  if (m == 0) return {};
  hi = std::min(hi, cutoff);
  // shared brackets: eigenvalue k lies in (lower[k], upper[k]]
  std::vector<double> lower(m, lo - kEps * norm), upper(m, hi), values(m);
  const double tol = 2.0 * kEps * norm;
  double x[kLanes];
  std::size_t c[kLanes];
  for (std::size_t k0 = 0; k0 < m; k0 += kLanes) {
    const std::size_t k1 = std::min(m, k0 + kLanes);
    for (;;) {
      bool active = false;
      for (std::size_t l = 0; l < kLanes; ++l) {
        const std::size_t k = std::min(k0 + l, k1 - 1);
        const double a = lower[k], b = upper[k], mid = 0.5 * (a + b);
        const bool open = k0 + l < k1 && b - a > tol && mid > a && mid < b;
        active = active || open;
        x[l] = open ? mid : b;
      }
      if (!active) break;
      sturm.counts(x, c);
      for (std::size_t l = 0; l < kLanes; ++l) {
        const std::size_t cnt = std::min(c[l], m);
        for (std::size_t j = k0; j < cnt; ++j) upper[j] = std::min(upper[j], x[l]);
        for (std::size_t j = std::max(cnt, k0); j < m; ++j) lower[j] = std::max(lower[j], x[l]);
      }
    }
    for (std::size_t l = k0; l < k1; ++l) values[l] = 0.5 * (lower[l] + upper[l]);
  }
  return values;
}

EigenPairs tridiagonal_eigen(std::span<const double> diag, std::span<const double> off) {
  check_tridiagonal(diag, off);
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(off.begin(), off.end());
  e.push_back(0.0);
  Matrix z = Matrix::identity(d.size());
  implicit_ql(d, e, &z);
  return sorted_pairs(std::move(d), std::move(z));
}

Matrix tridiagonal_eigenvectors(std::span<const double> diag, std::span<const double> off,
                                std::span<const double> eigenvalues) {
  check_tridiagonal(diag, off);
  const std::size_t n = diag.size();
  double tnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = std::abs(diag[i]);
    if (i > 0) s += std::abs(off[i - 1]);
    if (i + 1 < n) s += std::abs(off[i]);
    tnorm = std::max(tnorm, s);
  }
  const double tiny = kEps * std::max(tnorm, 1e-300);
  const double cluster_tol = 1e-5 * tnorm;
  const double separation = 10.0 * kEps * tnorm;

  Matrix out(n, eigenvalues.size());
  std::vector<double> y(n);
  double prev = -std::numeric_limits<double>::infinity();
  std::size_t cluster_start = 0;
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    double lambda = eigenvalues[k];
    if (k > 0 && lambda - eigenvalues[k - 1] > cluster_tol) cluster_start = k;
    if (lambda - prev < separation) lambda = prev + separation;
    prev = lambda;

    const TridiagonalLu lu(diag, off, lambda, tiny);
    // deterministic, non-degenerate start vector
    std::uint64_t state = 0x9E3779B97F4A7C15ULL * (k + 1);
    for (double& v : y) {
      state ^= state << 13;
      state ^= state >> 7;
      state ^= state << 17;
      v = 0.5 + static_cast<double>(state >> 11) * 0x1.0p-53;
    }
    auto col = out.col(k);
    for (int it = 0; it < 3; ++it) {
      lu.solve(y);
      for (std::size_t j = cluster_start; j < k; ++j) {
        const double t = kernels::dot(out.col(j), y);
        kernels::axpy(-t, out.col(j), y);
      }
      normalize(y);
    }
    std::copy(y.begin(), y.end(), col.begin());
    canonical_sign(col);
  }
  // Residual sanity: a bad vector here means the eigenvalue was not accurate.
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    auto v = out.col(k);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = (diag[i] - eigenvalues[k]) * v[i];
      if (i > 0) r += off[i - 1] * v[i - 1];
      if (i + 1 < n) r += off[i] * v[i + 1];
      res += r * r;
    }
    if (std::sqrt(res) > 1e-8 * std::max(tnorm, 1.0))
      throw Error(Errc::no_convergence, "inverse iteration residual too large at index " + std::to_string(k));
  }
  return out;
}

std::vector<double> symmetric_eigenvalues(Matrix a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw Error(Errc::invalid_argument, "square nonempty matrix required");
  std::vector<double> d, e, beta;
  householder(a, d, e, beta);
  implicit_ql(d, e, nullptr);
  std::sort(d.begin(), d.end());
  return d;
}

EigenPairs symmetric_eigen(Matrix a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw Error(Errc::invalid_argument, "square nonempty matrix required");
  std::vector<double> d, e, beta;
  householder(a, d, e, beta);
  Matrix z = accumulate_reflectors(a, beta);
  implicit_ql(d, e, &z);
  return sorted_pairs(std::move(d), std::move(z));
}

}  // namespace fbl::linalg
