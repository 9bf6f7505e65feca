#include "fbl/oscint.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

#include "fbl/error.hpp"

namespace fbl {
namespace {

using std::numbers::pi;
using cplx = std::complex<double>;

void check_dimension(int n) {
  if (n < 1 || n > 3) throw Error(Errc::unsupported_dimension, "ball transform needs n in {1, 2, 3}");
}

double hankel_j(double nu, double x) {
  const double m = 4.0 * nu * nu;
  const double omega = x - nu * pi / 2.0 - pi / 4.0;
  double p = 1.0, q = 0.0, term = 1.0, last = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double f = (m - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
    term *= f;
    if (term == 0.0) break;  // terminates for half-integer order
    if (k > 3 && std::abs(term) > std::abs(last)) break;
    const double s = (k / 2) % 2 == 0 ? 1.0 : -1.0;
    if (k % 2 == 0)
      p += s * term;
    else
      q += s * term;
    last = term;
    if (k > 3 && std::abs(term) < 1e-17) break;
  }
  return std::sqrt(2.0 / (pi * x)) * (p * std::cos(omega) - q * std::sin(omega));
}

// J_nu(x)/x^nu by the ascending series
double series_scaled(double nu, double x) {
  const double y = x * x / 4.0;
  double term = 1.0 / (std::pow(2.0, nu) * std::tgamma(nu + 1.0));
  double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= -y / (k * (k + nu));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) && k > 4) break;
  }
  return sum;
}

struct Stencil {
  int half;
  std::vector<double> w;  // offsets -half..half
};

Stencil stencil(int order) {
  switch (order) {
    case 0: return {0, {1.0}};
    case 1: return {2, {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12}};
    case 2: return {2, {-1.0 / 12, 4.0 / 3, -5.0 / 2, 4.0 / 3, -1.0 / 12}};
    case 3: return {3, {1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8}};
    case 4: return {3, {-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6}};
    default: break;
  }
  throw Error(Errc::invalid_argument, "finite-difference order above 4");
}

double derivative_at_origin(const StationaryPhaseProblem& pr, int px, int py) {
  if (pr.derivatives) return pr.derivatives(px, py);
  const double s = pr.delta / 64.0;
  const Stencil sx = stencil(px), sy = stencil(py);
  double acc = 0.0;
  for (int a = -sx.half; a <= sx.half; ++a) {
    const double wa = sx.w[static_cast<std::size_t>(a + sx.half)];
    if (wa == 0.0) continue;
    for (int b = -sy.half; b <= sy.half; ++b) {
      const double wb = sy.w[static_cast<std::size_t>(b + sy.half)];
      if (wb == 0.0) continue;
      acc += wa * wb * pr.amplitude({a * s, b * s});
    }
  }
  return acc / std::pow(s, px + py);
}

double determinant(const StationaryPhaseProblem& pr) {
  const auto& h = pr.hessian;
  return pr.dim == 1 ? h[0] : h[0] * h[3] - h[1] * h[2];
}

void validate(const StationaryPhaseProblem& pr) {
  if (pr.dim != 1 && pr.dim != 2) throw Error(Errc::unsupported_dimension, "phase dimension must be 1 or 2");
  if (pr.dim == 2 && std::abs(pr.hessian[1] - pr.hessian[2]) > 1e-14 * (1.0 + std::abs(pr.hessian[1])))
    throw Error(Errc::invalid_argument, "phase matrix must be symmetric");
  if (!(std::abs(determinant(pr)) >= 1e-8)) throw Error(Errc::degenerate_phase, "|det H| < 1e-8");
  if (!(pr.hbar > 0.0 && pr.hbar <= 1.0)) throw Error(Errc::invalid_argument, "hbar must lie in (0, 1]");
  if (!(pr.delta > 0.0 && pr.delta <= 1.0)) throw Error(Errc::invalid_argument, "delta must lie in (0, 1]");
  if (pr.delta * pr.delta < pr.hbar * (1.0 - 1e-12))
    throw Error(Errc::invalid_argument, "amplitude scale needs delta^2 >= hbar");
  if (!(pr.support_radius > 0.0)) throw Error(Errc::invalid_argument, "support radius must be positive");
  if (!pr.amplitude && !pr.derivatives) throw Error(Errc::invalid_argument, "amplitude missing");
}

double spectral_norm(const StationaryPhaseProblem& pr) {
  const auto& h = pr.hessian;
  if (pr.dim == 1) return std::abs(h[0]);
  const double m = 0.5 * (h[0] + h[3]);
  const double r = std::hypot(0.5 * (h[0] - h[3]), h[1]);
  return std::max(std::abs(m + r), std::abs(m - r));
}

struct Rule {
  std::array<double, 16> x, w;
};

const Rule& gauss16() {
  static const Rule rule = [] {
    using G = boost::math::quadrature::gauss<double, 16>;
    Rule r{};
    const auto& a = G::abscissa();
    const auto& wt = G::weights();
    for (std::size_t i = 0; i < 8; ++i) {
      r.x[i] = -a[7 - i];
      r.w[i] = wt[7 - i];
      r.x[15 - i] = a[7 - i];
      r.w[15 - i] = wt[7 - i];
    }
    return r;
  }();
  return rule;
}

cplx composite(const StationaryPhaseProblem& pr, std::size_t panels) {
  const Rule& g = gauss16();
  const double r = pr.support_radius;
  const double width = 2.0 * r / static_cast<double>(panels);
  std::vector<double> nodes, weights;
  nodes.reserve(16 * panels);
  weights.reserve(16 * panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double c = -r + (static_cast<double>(p) + 0.5) * width;
    for (std::size_t k = 0; k < 16; ++k) {
      nodes.push_back(c + 0.5 * width * g.x[k]);
      weights.push_back(0.5 * width * g.w[k]);
    }
  }
  const auto& h = pr.hessian;
  cplx sum = 0.0;
  if (pr.dim == 1) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double x = nodes[i];
      const double a = pr.amplitude({x, 0.0});
      if (a == 0.0) continue;
      const double phase = 0.5 * h[0] * x * x / pr.hbar;
      sum += weights[i] * a * cplx(std::cos(phase), std::sin(phase));
    }
    return sum;
  }
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double y = nodes[j];
    cplx row = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double x = nodes[i];
      const double a = pr.amplitude({x, y});
      if (a == 0.0) continue;
      const double phase = 0.5 * (h[0] * x * x + 2.0 * h[1] * x * y + h[3] * y * y) / pr.hbar;
      row += weights[i] * a * cplx(std::cos(phase), std::sin(phase));
    }
    sum += weights[j] * row;
  }
  return sum;
}

}  // namespace

double bessel_j(double nu, double x) {
  if (x < 0.0) throw Error(Errc::invalid_argument, "Bessel argument must be >= 0");
  if (x <= 12.0) return series_scaled(nu, x) * std::pow(x, nu);
  return hankel_j(nu, x);
}

double ball_indicator_ft(int n, double xi) {
  check_dimension(n);
  if (xi < 0.0) throw Error(Errc::invalid_argument, "|xi| must be >= 0");
  const double nu = n / 2.0;
  if (xi <= 12.0) return series_scaled(nu, xi);
  return hankel_j(nu, xi) / std::pow(xi, nu);
}

double ball_ft_asymptotic(int n, double xi) {
  check_dimension(n);
  if (xi < 5.0) {
    std::ostringstream os;
    os << "|xi| = " << xi << " below 5";
    throw Error(Errc::argument_too_small, os.str());
  }
  return 2.0 * std::cos(xi - (n + 1) * pi / 4.0) / (std::sqrt(2.0 * pi) * std::pow(xi, (n + 1) / 2.0));
}

std::complex<double> stationary_phase_prefactor(int dim, double hbar) {
  return std::pow(cplx(0.0, 2.0 * pi * hbar), dim / 2.0);
}

std::complex<double> stationary_phase_expand(const StationaryPhaseProblem& pr, int order) {
  validate(pr);
  if (order < 1 || order > 3) throw Error(Errc::invalid_argument, "expansion order must be 1, 2 or 3");
  const auto& h = pr.hessian;
  const double det = determinant(pr);

  int alpha = 0;
  std::map<std::pair<int, int>, double> op;
  if (pr.dim == 1) {
    alpha = h[0] < 0.0 ? 1 : 0;
    op[{2, 0}] = 1.0 / h[0];
  } else {
    if (det < 0.0)
      alpha = 1;
    else if (h[0] + h[3] < 0.0)
      alpha = 2;
    op[{2, 0}] = h[3] / det;
    op[{1, 1}] = -2.0 * h[1] / det;
    op[{0, 2}] = h[0] / det;
  }

  std::map<std::pair<int, int>, double> power{{{0, 0}, 1.0}};
  cplx total = 0.0;
  cplx factor = 1.0;  // ((i/2) hbar)^k / k!
  for (int k = 0; k < order; ++k) {
    if (k > 0) {
      std::map<std::pair<int, int>, double> next;
      for (const auto& [e1, c1] : power)
        for (const auto& [e2, c2] : op) next[{e1.first + e2.first, e1.second + e2.second}] += c1 * c2;
      power = std::move(next);
      factor *= cplx(0.0, 0.5 * pr.hbar) / static_cast<double>(k);
    }
    double term = 0.0;
    for (const auto& [e, c] : power)
      if (c != 0.0) term += c * derivative_at_origin(pr, e.first, e.second);
    total += factor * term;
  }
  const cplx morse = std::pow(cplx(0.0, -1.0), alpha);
  return morse * total / std::sqrt(std::abs(det));
}

OscillatoryIntegral brute_force_oscillatory(const StationaryPhaseProblem& pr) {
  validate(pr);
  if (!pr.amplitude) throw Error(Errc::invalid_argument, "brute force needs amplitude samples");
  const double r = pr.support_radius;
  const double reach = pr.dim == 1 ? r : r * std::numbers::sqrt2;
  const double period = 2.0 * pi * pr.hbar / (spectral_norm(pr) * reach);
  std::size_t panels = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(2.0 * r / period)));
  const double volume = std::pow(2.0 * r, pr.dim);

  auto cost = [&](std::size_t p) { return static_cast<std::size_t>(std::pow(16.0 * static_cast<double>(p), pr.dim)); };
  OscillatoryIntegral out;
  if (cost(2 * panels) > kOscillatoryBudget) {
    std::ostringstream os;
    os << "needs " << cost(2 * panels) << " samples, budget " << kOscillatoryBudget;
    throw Error(Errc::budget_exceeded, os.str());
  }
  cplx coarse = composite(pr, panels);
  out.samples = cost(panels);
  for (;;) {
    if (out.samples + cost(2 * panels) > kOscillatoryBudget) {
      std::ostringstream os;
      os << "refinement stalled at " << panels << " panels per axis within " << kOscillatoryBudget << " samples";
      throw Error(Errc::budget_exceeded, os.str());
    }
    panels *= 2;
    const cplx fine = composite(pr, panels);
    out.samples += cost(panels);
    out.error_estimate = std::abs(fine - coarse);
    out.value = fine;
    if (out.error_estimate <= 1e-9 * volume) return out;
    coarse = fine;
  }
}

}  // namespace fbl
