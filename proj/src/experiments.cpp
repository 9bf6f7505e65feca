#include "fbl/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "fbl/error.hpp"
#include "fbl/hash.hpp"
#include "fbl/oscint.hpp"
#include "fbl/predictions.hpp"
#include "fbl/sampling.hpp"
#include "fbl/spectral.hpp"
#include "fbl/toml.hpp"

namespace fbl {
namespace {

using json = nlohmann::ordered_json;
using std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------- config parsing

[[noreturn]] void config_fail(const std::string& what) { throw Error(Errc::config_error, what); }

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) config_fail(where + ": missing '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) config_fail(where + ": expected a number");
  return j.get<double>();
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return number(j.at(key), where + "." + key);
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) config_fail(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, where));
  return out;
}

Point point(const json& j, const std::string& where) {
  const auto v = numbers(j, where);
  if (v.size() != 2) config_fail(where + ": expected [x, y]");
  return {v[0], v[1]};
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) config_fail(where + ": expected a string");
  return j.get<std::string>();
}

Potential parse_potential(const json& j, int dim, const std::string& where) {
  const std::string kind = text(require(j, "kind", where), where + ".kind");
  if (kind == "harmonic") return Potential::harmonic();
  if (kind == "power") return Potential::power(number(require(j, "q", where), where + ".q"));
  if (kind == "separable") {
    if (dim != 2) config_fail(where + ": separable potentials are 2D only");
    return Potential::separable(parse_potential(require(j, "vx", where), 1, where + ".vx"),
                                parse_potential(require(j, "vy", where), 1, where + ".vy"));
  }
  if (kind == "tabulated")
    return Potential::tabulated(dim, number(require(j, "half_width", where), where + ".half_width"),
                                numbers(require(j, "values", where), where + ".values"));
  config_fail(where + ": unknown potential kind '" + kind + "'");
}

Region parse_region(const json& j, const std::string& where) {
  const std::string kind = text(require(j, "kind", where), where + ".kind");
  if (kind == "interval")
    return Region::interval(number(require(j, "a", where), where + ".a"), number(require(j, "b", where), where + ".b"));
  if (kind == "rectangle")
    return Region::rectangle(point(require(j, "lower", where), where + ".lower"),
                             point(require(j, "upper", where), where + ".upper"));
  if (kind == "disk")
    return Region::disk(point(require(j, "center", where), where + ".center"),
                        number(require(j, "radius", where), where + ".radius"));
  if (kind == "annulus")
    return Region::annulus(point(require(j, "center", where), where + ".center"),
                           number(require(j, "inner", where), where + ".inner"),
                           number(require(j, "outer", where), where + ".outer"));
  if (kind == "union") {
    const auto& parts = require(j, "parts", where);
    if (!parts.is_array() || parts.size() != 2) config_fail(where + ".parts: expected two regions");
    return Region::union_of(parse_region(parts[0], where + ".parts[0]"), parse_region(parts[1], where + ".parts[1]"));
  }
  config_fail(where + ": unknown region kind '" + kind + "'");
}

ObservableFunction parse_f(const json& j, const std::string& where) {
  ObservableFunction f;
  const std::string kind = text(require(j, "kind", where), where + ".kind");
  if (kind == "constant") {
    f.coeffs = {number_or(j, "value", 1.0, where), 0.0, 0.0};
  } else if (kind == "affine") {
    const auto c = numbers(require(j, "coeffs", where), where + ".coeffs");
    if (c.empty() || c.size() > 3) config_fail(where + ".coeffs: expected 1 to 3 numbers");
    f.kind = ObservableFunction::Kind::affine;
    for (std::size_t i = 0; i < c.size(); ++i) f.coeffs[i] = c[i];
  } else {
    config_fail(where + ": unknown f kind '" + kind + "'");
  }
  return f;
}

SpectralFunction parse_g(const json& j, const std::string& where) {
  const std::string kind = text(require(j, "kind", where), where + ".kind");
  if (kind == "variance") return variance_function();
  if (kind == "entropy") return entropy_function();
  if (kind == "renyi") return renyi_function(number(require(j, "alpha", where), where + ".alpha"));
  if (kind == "poly") return poly_function(numbers(require(j, "coeffs", where), where + ".coeffs"));
  config_fail(where + ": unknown g kind '" + kind + "'");
}

std::vector<double> parse_hbars(const json& sweep) {
  std::vector<double> h;
  if (sweep.contains("hbar")) {
    h = numbers(sweep.at("hbar"), "sweep.hbar");
  } else if (sweep.contains("hbar_inverse")) {
    for (double v : numbers(sweep.at("hbar_inverse"), "sweep.hbar_inverse")) {
      if (!(v > 0.0)) config_fail("sweep.hbar_inverse: entries must be positive");
      h.push_back(1.0 / v);
    }
  } else if (sweep.contains("hbar_log2")) {
    for (double v : numbers(sweep.at("hbar_log2"), "sweep.hbar_log2")) h.push_back(std::exp2(v));
  } else {
    config_fail("sweep: give hbar, hbar_inverse or hbar_log2");
  }
  for (double v : h)
    if (!(v > 0.0) || !std::isfinite(v)) config_fail("sweep: hbar values must be positive and finite");
  auto sorted = h;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) config_fail("sweep: hbar values must be distinct");
  return sorted;
}

bool needs_fit(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::variance_sweep:
    case ExperimentKind::entropy_sweep:
    case ExperimentKind::j1_sweep:
    case ExperimentKind::widom:
    case ExperimentKind::covariance:
    case ExperimentKind::oscint: return true;
    default: return false;
  }
}

// ---------------------------------------------------------------- cells

struct Cell {
  Grid grid;
  SchrodingerProblem problem;
  SpectralData spectral;
  FermiProjector proj;
};

Cell build_cell(const ProblemSpec& spec, double hbar) {
  Cell c;
  const std::size_t m = spec.points_per_axis ? spec.points_per_axis : auto_points_per_axis(spec, hbar);
  c.grid = build_grid(spec.dim, spec.half_width, m);
  c.problem = assemble(c.grid, spec.potential, hbar, spec.mu, spec.wall_margin);
  c.spectral = eigendecompose(c.problem);
  c.proj = fermi_projector(c.spectral, spec.mu);
  return c;
}

double normalization(int dim, double hbar) { return std::pow(2.0 * pi * hbar, dim - 1); }

std::vector<double> node_values(const Grid& grid, const Mask& mask, const ObservableFunction& f) {
  std::vector<double> w(grid.size(), 0.0);
  for (std::size_t i : mask.indices) w[i] = f(grid.node(i));
  return w;
}

struct Runner {
  const ExperimentConfig& cfg;
  SweepResult& out;

  using RowFn = std::function<std::vector<double>(double hbar, std::size_t index)>;

  // Evaluates cells concurrently, gathers rows in hbar order.
  void sweep(const RowFn& fn) {
    const std::size_t n = cfg.hbars.size();
    out.rows.assign(n, {});
    out.failures.assign(n, {});
    auto work = [&](std::size_t i) {
      try {
        out.rows[i] = fn(cfg.hbars[i], i);
      } catch (const Error& e) {
        out.failures[i] = e.what();
        out.rows[i].assign(out.columns.size(), kNaN);
        out.rows[i][0] = cfg.hbars[i];
      } catch (const std::bad_alloc&) {
        out.failures[i] = "OutOfMemory: cell allocation failed";
        out.rows[i].assign(out.columns.size(), kNaN);
        out.rows[i][0] = cfg.hbars[i];
      }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(n)));
    if (threads == 1) {
      for (std::size_t i = 0; i < n; ++i) work(i);
      return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < n; i += threads) work(i);
      });
    for (auto& th : pool) th.join();
  }

  [[nodiscard]] std::vector<std::size_t> good_rows() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < out.rows.size(); ++i)
      if (out.failures[i].empty()) idx.push_back(i);
    return idx;
  }

  // Fit column `col` against log(1/hbar); adds a data and a fit series to the plot.
  void fit_column(const std::string& name, const std::string& col, double prediction = kNaN) {
    const std::size_t c = out.column(col);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i : good_rows()) pts.emplace_back(out.rows[i][0], out.rows[i][c]);
    json rec;
    Series data{col, {}, {}};
    for (const auto& [h, y] : pts) {
      data.x.push_back(std::log(1.0 / h));
      data.y.push_back(y);
    }
    out.plot.push_back(data);
    try {
      const FitRecord f = log_slope_fit(pts);
      rec = {{"column", col},         {"slope", f.slope},
             {"intercept", f.intercept}, {"r_squared", f.r_squared},
             {"slope_stderr", f.slope_stderr}, {"points", f.points}};
      if (!std::isnan(prediction)) rec["slope_over_prediction"] = f.slope / prediction;
      Series line{col + " fit", data.x, {}};
      for (double x : line.x) line.y.push_back(f.slope * x + f.intercept);
      out.plot.push_back(line);
    } catch (const Error& e) {
      rec = {{"column", col}, {"error", e.what()}};
    }
    out.fits[name] = rec;
  }

  [[nodiscard]] std::vector<double> column_values(const std::string& col) const {
    std::vector<double> v;
    const std::size_t c = out.column(col);
    for (std::size_t i : good_rows()) v.push_back(out.rows[i][c]);
    return v;
  }

  // ------------------------------------------------------------ kinds

  void variance_sweep() {
    out.columns = {"hbar", "N", "variance", "j2_sq", "j1", "entropy", "normalized", "prediction_C"};
    const Region& region = cfg.regions.at(0);
    const double c = variance_coefficient(region, cfg.problem.potential, cfg.problem.mu,
                                          [f = cfg.f](Point x) { return f(x); });
    sweep([&](double hbar, std::size_t) {
      const Cell cell = build_cell(cfg.problem, hbar);
      const Mask mask = region_mask(cell.grid, region);
      const auto sigma = restricted_spectrum(cell.proj, mask, region.fingerprint());
      const auto rep = commutator_report(sigma);
      double variance = rep.variance * cfg.f.coeffs[0] * cfg.f.coeffs[0];
      if (!cfg.f.is_constant()) variance = observable_variance(cell.proj, node_values(cell.grid, mask, cfg.f));
      return std::vector<double>{hbar,    static_cast<double>(cell.proj.count()),
                                 variance, rep.j2_squared,
                                 rep.j1,   rep.entropy,
                                 variance * normalization(cfg.problem.dim, hbar), c};
    });
    out.summary["prediction_C"] = c;
    fit_column("normalized_variance", "normalized", c);
    out.plot_y_label = "variance (2 pi hbar)^(n-1)";
  }

  void entropy_sweep() {
    out.columns = {"hbar", "N", "entropy", "lower", "upper", "variance", "ratio", "target", "normalized"};
    const Region& region = cfg.regions.at(0);
    const double target = entropy_variance_target();
    sweep([&](double hbar, std::size_t) {
      const Cell cell = build_cell(cfg.problem, hbar);
      const auto sigma = restricted_spectrum(cell.proj, region_mask(cell.grid, region), region.fingerprint());
      const auto s = entropy_sandwich(sigma);
      const auto rep = commutator_report(sigma);
      return std::vector<double>{hbar,        static_cast<double>(cell.proj.count()),
                                 s.entropy,   s.lower,
                                 s.upper,     rep.variance,
                                 s.entropy / rep.variance, target,
                                 s.entropy * normalization(cfg.problem.dim, hbar)};
    });
    bool holds = true;
    for (std::size_t i : good_rows()) {
      const auto& r = out.rows[i];
      holds = holds && r[3] <= r[2] + 1e-10 && r[2] <= r[4] + 1e-10;
    }
    const auto ratio = column_values("ratio");
    out.summary["sandwich_holds"] = holds;
    out.summary["ratio_target"] = target;
    out.summary["ratio_finest"] = ratio.empty() ? kNaN : ratio.back();
    out.summary["ratio_increasing"] = std::is_sorted(ratio.begin(), ratio.end());
    out.summary["prediction_C"] =
        variance_coefficient(region, cfg.problem.potential, cfg.problem.mu);
    fit_column("normalized_entropy", "normalized",
               target * out.summary["prediction_C"].get<double>());
    out.plot_y_label = "entropy (2 pi hbar)^(n-1)";
  }

  void j1_sweep() {
    out.columns = {"hbar", "N", "j1", "j2_sq", "normalized_j1", "normalized_j2_sq"};
    const Region& region = cfg.regions.at(0);
    sweep([&](double hbar, std::size_t) {
      const Cell cell = build_cell(cfg.problem, hbar);
      const auto rep = commutator_report(restricted_spectrum(cell.proj, region_mask(cell.grid, region)));
      const double l = std::log(1.0 / hbar);
      const double scale = std::pow(hbar, cfg.problem.dim - 1);
      return std::vector<double>{hbar, static_cast<double>(cell.proj.count()), rep.j1, rep.j2_squared,
                                 rep.j1 * scale / (l * l), rep.j2_squared * normalization(cfg.problem.dim, hbar)};
    });
    const auto v = column_values("normalized_j1");
    const auto j1 = column_values("j1");
    const auto j2 = column_values("j2_sq");
    bool dominates = true;
    for (std::size_t i = 0; i < j1.size(); ++i) dominates = dominates && j1[i] >= j2[i];
    out.summary["j1_dominates_j2_sq"] = dominates;
    out.summary["finest_relative_increase"] = v.size() >= 2 ? v.back() / v[v.size() - 2] - 1.0 : kNaN;
    fit_column("normalized_j1", "normalized_j1");
    out.plot_y_label = "j1 hbar^(n-1) / log^2(1/hbar)";
  }

  void widom() {
    out.columns = {"hbar", "N", "functional", "normalized", "prediction_C", "prediction_widom"};
    const Region& region = cfg.regions.at(0);
    const SpectralFunction g = cfg.g.value_or(variance_function());
    const double c = variance_coefficient(region, cfg.problem.potential, cfg.problem.mu);
    const double w = widom_limit(g.g, c);
    sweep([&](double hbar, std::size_t) {
      const Cell cell = build_cell(cfg.problem, hbar);
      const double s = spectral_functional(restricted_spectrum(cell.proj, region_mask(cell.grid, region)), g.g);
      return std::vector<double>{hbar, static_cast<double>(cell.proj.count()), s,
                                 s * normalization(cfg.problem.dim, hbar), c, w};
    });
    out.summary["g"] = g.name;
    out.summary["prediction_C"] = c;
    out.summary["prediction_widom"] = w;
    fit_column("normalized_functional", "normalized");
    const json& fit = out.fits["normalized_functional"];
    if (fit.contains("slope")) {
      out.summary["slope_over_C"] = fit["slope"].get<double>() / c;
      out.summary["slope_over_widom"] = fit["slope"].get<double>() / w;
    }
    out.plot_y_label = "sum g(sigma) (2 pi hbar)^(n-1)";
  }

  void clt() {
    out.columns = {"hbar", "N", "mean", "variance", "kappa3", "kappa4", "skewness", "excess_kurtosis", "ks_half_integer"};
    const Region& region = cfg.regions.at(0);
    sweep([&](double hbar, std::size_t) {
      const Cell cell = build_cell(cfg.problem, hbar);
      const auto law = counting_law(restricted_spectrum(cell.proj, region_mask(cell.grid, region)));
      const auto g = gaussianity_report(law);
      return std::vector<double>{hbar,       static_cast<double>(cell.proj.count()),
                                 law.mean,   law.variance,
                                 law.kappa3, law.kappa4,
                                 g.skewness, g.excess_kurtosis,
                                 g.ks_half_integer};
    });
    auto inversions = [](std::vector<double> v) {
      std::size_t k = 0;
      for (std::size_t i = 1; i < v.size(); ++i) k += std::abs(v[i]) > std::abs(v[i - 1]);
      return k;
    };
    const auto sk = column_values("skewness");
    const auto ku = column_values("excess_kurtosis");
    out.summary["skewness_inversions"] = inversions(sk);
    out.summary["kurtosis_inversions"] = inversions(ku);
    out.summary["skewness_finest"] = sk.empty() ? kNaN : sk.back();
    out.summary["excess_kurtosis_finest"] = ku.empty() ? kNaN : ku.back();
    for (const char* col : {"skewness", "excess_kurtosis"}) {
      Series s{col, {}, {}};
      const std::size_t c = out.column(col);
      for (std::size_t i : good_rows()) {
        s.x.push_back(std::log(1.0 / out.rows[i][0]));
        s.y.push_back(out.rows[i][c]);
      }
      out.plot.push_back(s);
    }
    out.plot_y_label = "cumulant ratio";
  }

  void covariance() {
    if (cfg.regions.size() < 2) config_fail("covariance needs two regions");
    out.columns = {"hbar", "N", "covariance", "normalized", "variance_a", "variance_b", "correlation"};
    const Region& a = cfg.regions[0];
    const Region& b = cfg.regions[1];
    sweep([&](double hbar, std::size_t) {
      const Cell cell = build_cell(cfg.problem, hbar);
      const Mask ma = region_mask(cell.grid, a);
      const Mask mb = region_mask(cell.grid, b);
      const double cov = cross_covariance(cell.proj, ma, mb);
      const double va = commutator_report(restricted_spectrum(cell.proj, ma)).variance;
      const double vb = commutator_report(restricted_spectrum(cell.proj, mb)).variance;
      const double norm = normalization(cfg.problem.dim, hbar) / std::log(1.0 / hbar);
      return std::vector<double>{hbar,          static_cast<double>(cell.proj.count()), cov, std::abs(cov) * norm, va, vb,
                                 cov / std::sqrt(va * vb)};
    });
    const auto v = column_values("normalized");
    std::size_t increases = 0;
    for (std::size_t i = 1; i < v.size(); ++i) increases += v[i] >= v[i - 1];
    out.summary["normalized_decreasing"] = increases == 0 && v.size() >= 2;
    fit_column("normalized_covariance", "normalized");
    out.plot_y_label = "|cov| (2 pi hbar)^(n-1) / log(1/hbar)";
  }

  void weyl() {
    out.columns = {"hbar", "N", "N_pred", "ratio", "deviation", "window_count"};
    sweep([&](double hbar, std::size_t) {
      const auto& spec = cfg.problem;
      const std::size_t m = spec.points_per_axis ? spec.points_per_axis : auto_points_per_axis(spec, hbar);
      const auto problem = assemble(build_grid(spec.dim, spec.half_width, m), spec.potential, hbar, spec.mu,
                                    spec.wall_margin);
      const double n = static_cast<double>(counting_function(problem, spec.mu));
      const double pred = weyl_prediction(spec.potential, spec.mu, hbar, spec.dim, spec.half_width);
      return std::vector<double>{hbar, n, pred, n / pred, std::abs(n / pred - 1.0),
                                 static_cast<double>(window_count(problem, spec.mu, hbar))};
    });
    const auto dev = column_values("deviation");
    out.summary["deviation_finest"] = dev.empty() ? kNaN : dev.back();
    out.summary["deviation_monotone"] = std::is_sorted(dev.rbegin(), dev.rend());
    Series s{"ratio", {}, {}};
    for (std::size_t i : good_rows()) {
      s.x.push_back(std::log(1.0 / out.rows[i][0]));
      s.y.push_back(out.rows[i][3]);
    }
    out.plot.push_back(s);
    out.plot_y_label = "N / N_pred";
  }

  void sample() {
    out.columns = {"hbar", "N", "count"};
    for (std::size_t r = 0; r < cfg.regions.size(); ++r)
      for (const char* c : {"mean_", "mean_exact_", "mean_stderr_", "var_", "var_exact_", "var_stderr_"})
        out.columns.push_back(c + std::to_string(r));
    std::vector<std::string> batches(cfg.hbars.size());
    sweep([&](double hbar, std::size_t index) {
      const Cell cell = build_cell(cfg.problem, hbar);
      const std::uint64_t seed = Fnv1a().u64(cfg.seed).f64(hbar).value();
      const SampleBatch batch = fbl::sample(cell.proj, cfg.sample_count, seed);
      std::vector<Mask> masks;
      for (const auto& region : cfg.regions) masks.push_back(region_mask(cell.grid, region));
      const auto joint = empirical_joint(batch, masks);
      std::vector<double> row{hbar, static_cast<double>(cell.proj.count()), static_cast<double>(batch.count())};
      for (std::size_t r = 0; r < masks.size(); ++r) {
        const auto rep = commutator_report(restricted_spectrum(cell.proj, masks[r]));
        double exact_mean = 0.0;
        for (std::size_t k = 0; k < cell.proj.count(); ++k)
          for (std::size_t i : masks[r].indices) exact_mean += cell.proj.u(i, k) * cell.proj.u(i, k);
        row.insert(row.end(), {joint.means[r], exact_mean, joint.mean_errors[r], joint.covariance[r][r], rep.variance,
                               joint.covariance_errors[r][r]});
      }
      std::ostringstream csv;
      write_batch_csv(batch, csv);
      batches[index] = csv.str();
      return row;
    });
    for (std::size_t i = 0; i < batches.size(); ++i)
      if (!batches[i].empty()) out.extra_files.emplace_back("samples_" + std::to_string(i) + ".csv", batches[i]);
  }

  StationaryPhaseProblem oscint_problem(double hbar) const {
    const OscintSpec& o = cfg.oscint;
    StationaryPhaseProblem p;
    p.dim = o.dim;
    p.hessian = o.hessian;
    p.hbar = hbar;
    if (o.amplitude == "gaussian") {
      const double delta = std::pow(hbar, o.delta_exponent);
      p.delta = delta;
      p.support_radius = o.support_scale * delta;
      const double r = p.support_radius;
      p.amplitude = [delta, r, dim = o.dim](Point x) {
        const double q = x[0] * x[0] + (dim == 2 ? x[1] * x[1] : 0.0);
        if (std::abs(x[0]) > r || std::abs(x[1]) > r) return 0.0;
        return std::exp(-q / (delta * delta));
      };
    } else if (o.amplitude == "annulus") {
      p.delta = o.delta;
      p.support_radius = o.outer;
      const double c = 0.5 * (o.inner + o.outer), w = 0.5 * (o.outer - o.inner);
      p.amplitude = [c, w, dim = o.dim](Point x) {
        const double t = ((dim == 2 ? std::hypot(x[0], x[1]) : std::abs(x[0])) - c) / w;
        if (std::abs(t) >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - t * t));
      };
    } else {
      config_fail("oscint.amplitude must be gaussian or annulus");
    }
    return p;
  }

  void oscint() {
    const OscintSpec& o = cfg.oscint;
    const bool annulus = o.amplitude == "annulus";
    out.columns = {"hbar", "delta", "t", "oracle_re", "oracle_im", "oracle_error", "normalized_abs"};
    if (!annulus)
      for (int l : o.orders) out.columns.push_back("remainder_" + std::to_string(l));
    sweep([&](double hbar, std::size_t) {
      const auto p = oscint_problem(hbar);
      const auto oracle = brute_force_oscillatory(p);
      const double scale = std::pow(hbar, p.dim / 2.0);
      std::vector<double> row{hbar,
                              p.delta,
                              hbar / (p.delta * p.delta),
                              oracle.value.real(),
                              oracle.value.imag(),
                              oracle.error_estimate,
                              std::abs(oracle.value) / scale};
      if (!annulus)
        for (int l : o.orders) {
          const auto e = stationary_phase_prefactor(p.dim, hbar) * stationary_phase_expand(p, l);
          row.push_back(std::abs(oracle.value - e) / scale);
        }
      return row;
    });
    auto loglog = [&](const std::string& name, const std::string& xcol, const std::string& ycol) {
      std::vector<double> x, y;
      const std::size_t cx = out.column(xcol), cy = out.column(ycol);
      for (std::size_t i : good_rows()) {
        x.push_back(std::log(out.rows[i][cx]));
        y.push_back(std::log(out.rows[i][cy]));
      }
      out.plot.push_back({ycol, x, y});
      try {
        const auto f = linear_fit(x, y);
        out.fits[name] = {{"x", "log " + xcol}, {"y", "log " + ycol}, {"slope", f.slope}, {"intercept", f.intercept},
                          {"r_squared", f.r_squared}, {"slope_stderr", f.slope_stderr}, {"points", f.points}};
      } catch (const Error& e) {
        out.fits[name] = {{"error", e.what()}};
      }
    };
    if (annulus) {
      loglog("decay", "hbar", "normalized_abs");
      out.plot_x_label = "log hbar";
      out.plot_y_label = "log |I| hbar^(-d/2)";
    } else {
      for (int l : o.orders) loglog("remainder_" + std::to_string(l), "t", "remainder_" + std::to_string(l));
      out.plot_x_label = "log(hbar/delta^2)";
      out.plot_y_label = "log remainder";
    }
  }

  void collision() {
    const Region& region = cfg.regions.at(0);
    const int n = region.dim();
    const Grid grid = build_grid(n, cfg.problem.half_width,
                                 cfg.problem.points_per_axis ? cfg.problem.points_per_axis : (n == 1 ? 4096 : 64));
    out.columns = {"radius", "value", "std_error", "normalized"};
    const double measure = region.boundary_measure();
    std::vector<double> x, y;
    for (std::size_t k = 0; k < cfg.collision.radii.size(); ++k) {
      const double r = cfg.collision.radii[k];
      try {
        const auto est = boundary_collision_volume(grid, region, r, cfg.collision.budget, cfg.seed + k);
        out.rows.push_back({r, est.value, est.std_error, est.value / (measure * std::pow(r, n + 1))});
        out.failures.emplace_back();
        x.push_back(std::log(r));
        y.push_back(std::log(est.value));
      } catch (const Error& e) {
        out.rows.push_back({r, kNaN, kNaN, kNaN});
        out.failures.emplace_back(e.what());
      }
    }
    out.plot.push_back({"value", x, y});
    try {
      const auto f = linear_fit(x, y);
      out.fits["radius_exponent"] = {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared},
                                     {"slope_stderr", f.slope_stderr}, {"points", f.points}, {"expected", n + 1}};
    } catch (const Error& e) {
      out.fits["radius_exponent"] = {{"error", e.what()}};
    }
    out.plot_x_label = "log radius";
    out.plot_y_label = "log volume";
  }
};

}  // namespace

// ---------------------------------------------------------------- public

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::variance_sweep: return "variance-sweep";
    case ExperimentKind::entropy_sweep: return "entropy-sweep";
    case ExperimentKind::j1_sweep: return "j1-sweep";
    case ExperimentKind::widom: return "widom";
    case ExperimentKind::clt: return "clt";
    case ExperimentKind::covariance: return "covariance";
    case ExperimentKind::sample: return "sample";
    case ExperimentKind::weyl: return "weyl";
    case ExperimentKind::oscint: return "oscint";
    case ExperimentKind::collision: return "collision";
  }
  return "unknown";
}

ExperimentKind parse_kind(std::string_view name) {
  for (auto k : {ExperimentKind::variance_sweep, ExperimentKind::entropy_sweep, ExperimentKind::j1_sweep,
                 ExperimentKind::widom, ExperimentKind::clt, ExperimentKind::covariance, ExperimentKind::sample,
                 ExperimentKind::weyl, ExperimentKind::oscint, ExperimentKind::collision})
    if (to_string(k) == name) return k;
  config_fail("unknown experiment kind '" + std::string(name) + "'");
}

FitRecord linear_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw Error(Errc::invalid_argument, "x and y lengths differ");
  if (n < 3) throw Error(Errc::insufficient_points, "need at least 3 points, got " + std::to_string(n));
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(Errc::insufficient_points, "x values are not distinct");
  FitRecord f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += r * r;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 0.0;
  f.slope_stderr = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
  return f;
}

FitRecord log_slope_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 4)
    throw Error(Errc::insufficient_points, "log-slope fit needs >= 4 points, got " + std::to_string(points.size()));
  std::vector<double> x, y;
  for (const auto& [h, v] : points) {
    if (!(h > 0.0)) throw Error(Errc::invalid_argument, "hbar must be positive");
    x.push_back(std::log(1.0 / h));
    y.push_back(v);
  }
  auto sorted = x;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(Errc::insufficient_points, "hbar values must be distinct");
  return linear_fit(x, y);
}

std::size_t auto_points_per_axis(const ProblemSpec& spec, double hbar) {
  std::size_t m = 2 * minimal_points_per_axis(spec.half_width, hbar, spec.mu, spec.potential.infimum());
  m = std::max<std::size_t>(m, 16);
  return m + (m % 2);
}

ExperimentConfig load_config(std::string_view toml_text) {
  const json root = parse_toml(toml_text);
  ExperimentConfig c;
  c.source_text = std::string(toml_text);
  c.kind = parse_kind(text(require(root, "kind", "config"), "kind"));
  if (root.contains("seed")) {
    const auto& s = root.at("seed");
    if (!s.is_number_integer() || s.get<std::int64_t>() < 0) config_fail("seed: expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (root.contains("output")) c.output_dir = text(root.at("output"), "output");
  if (root.contains("threads")) c.threads = static_cast<unsigned>(std::max(1.0, number(root.at("threads"), "threads")));

  if (root.contains("problem")) {
    const json& p = root.at("problem");
    const double dim = number_or(p, "dim", 1.0, "problem");
    if (dim != 1.0 && dim != 2.0) config_fail("problem.dim must be 1 or 2");
    c.problem.dim = static_cast<int>(dim);
    c.problem.half_width = number_or(p, "half_width", c.problem.half_width, "problem");
    const double m = number_or(p, "points_per_axis", 0.0, "problem");
    if (m < 0.0 || m != std::floor(m)) config_fail("problem.points_per_axis must be a non-negative integer");
    c.problem.points_per_axis = static_cast<std::size_t>(m);
    c.problem.mu = number_or(p, "mu", c.problem.mu, "problem");
    c.problem.wall_margin = number_or(p, "wall_margin", c.problem.wall_margin, "problem");
    if (p.contains("potential")) c.problem.potential = parse_potential(p.at("potential"), c.problem.dim, "problem.potential");
    if (!(c.problem.half_width > 0.0)) config_fail("problem.half_width must be positive");
  }

  if (root.contains("observable")) {
    const json& o = root.at("observable");
    if (o.contains("region")) c.regions.push_back(parse_region(o.at("region"), "observable.region"));
    if (o.contains("regions")) {
      const auto& rs = o.at("regions");
      if (!rs.is_array()) config_fail("observable.regions: expected an array");
      for (std::size_t i = 0; i < rs.size(); ++i)
        c.regions.push_back(parse_region(rs[i], "observable.regions[" + std::to_string(i) + "]"));
    }
    if (o.contains("f")) c.f = parse_f(o.at("f"), "observable.f");
    if (o.contains("g")) c.g = parse_g(o.at("g"), "observable.g");
  }
  for (const auto& r : c.regions)
    if (r.dim() != c.problem.dim && c.kind != ExperimentKind::collision)
      config_fail("region dimension differs from problem.dim");

  if (root.contains("sample")) {
    const double n = number_or(root.at("sample"), "count", 1000.0, "sample");
    if (n < 1.0) config_fail("sample.count must be >= 1");
    c.sample_count = static_cast<std::size_t>(n);
  }
  if (root.contains("oscint")) {
    const json& o = root.at("oscint");
    c.oscint.dim = static_cast<int>(number_or(o, "dim", 1.0, "oscint"));
    if (o.contains("hessian")) {
      const auto h = numbers(o.at("hessian"), "oscint.hessian");
      if (h.size() == 1)
        c.oscint.hessian = {h[0], 0.0, 0.0, 0.0};
      else if (h.size() == 4)
        c.oscint.hessian = {h[0], h[1], h[2], h[3]};
      else
        config_fail("oscint.hessian: expected 1 or 4 entries");
    }
    if (o.contains("amplitude")) c.oscint.amplitude = text(o.at("amplitude"), "oscint.amplitude");
    c.oscint.delta_exponent = number_or(o, "delta_exponent", c.oscint.delta_exponent, "oscint");
    c.oscint.delta = number_or(o, "delta", c.oscint.delta, "oscint");
    c.oscint.inner = number_or(o, "inner", c.oscint.inner, "oscint");
    c.oscint.outer = number_or(o, "outer", c.oscint.outer, "oscint");
    c.oscint.support_scale = number_or(o, "support_scale", c.oscint.support_scale, "oscint");
    if (o.contains("orders")) {
      c.oscint.orders.clear();
      for (double v : numbers(o.at("orders"), "oscint.orders")) c.oscint.orders.push_back(static_cast<int>(v));
    }
  }
  if (root.contains("collision")) {
    const json& o = root.at("collision");
    if (o.contains("radii")) c.collision.radii = numbers(o.at("radii"), "collision.radii");
    c.collision.budget = static_cast<std::size_t>(number_or(o, "budget", static_cast<double>(c.collision.budget), "collision"));
  }

  if (c.kind != ExperimentKind::collision) {
    c.hbars = parse_hbars(require(root, "sweep", "config"));
    if (needs_fit(c.kind) && c.hbars.size() < 4) config_fail("sweep: fits need at least 4 hbar values");
  }
  const bool needs_region = c.kind != ExperimentKind::weyl && c.kind != ExperimentKind::oscint &&
                            c.kind != ExperimentKind::sample;
  if (needs_region && c.regions.empty()) config_fail("observable.region is required for this kind");
  if (c.kind == ExperimentKind::covariance && c.regions.size() < 2) config_fail("covariance needs observable.regions with two entries");

  // resolution rule for explicit M
  if (c.problem.points_per_axis && c.kind != ExperimentKind::oscint && c.kind != ExperimentKind::collision) {
    for (double h : c.hbars) {
      const std::size_t need = minimal_points_per_axis(c.problem.half_width, h, c.problem.mu, c.problem.potential.infimum());
      if (c.problem.points_per_axis < need)
        config_fail("problem.points_per_axis = " + std::to_string(c.problem.points_per_axis) + " fails the resolution rule at hbar = " +
                    format_number(h) + " (need >= " + std::to_string(need) + ")");
    }
  }
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::config_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string body = ss.str();
  const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  if (!is_json) return load_config(body);
  json manifest;
  try {
    manifest = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, path + ": " + e.what());
  }
  if (!manifest.contains("config_text") || !manifest["config_text"].is_string())
    throw Error(Errc::config_error, path + ": manifest has no config_text");
  return load_config(manifest["config_text"].get<std::string>());
}

bool SweepResult::ok() const noexcept {
  return std::all_of(failures.begin(), failures.end(), [](const std::string& f) { return f.empty(); });
}

std::size_t SweepResult::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw Error(Errc::invalid_argument, "no column '" + std::string(name) + "'");
}

SweepResult run(const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepResult out;
  out.kind = config.kind;
  out.config_text = config.source_text;
  out.config_hash = Fnv1a().bytes(config.source_text).value();
  out.seed = config.seed;
  out.plot_x_label = "log(1/hbar)";
  Runner r{config, out};
  switch (config.kind) {
    case ExperimentKind::variance_sweep: r.variance_sweep(); break;
    case ExperimentKind::entropy_sweep: r.entropy_sweep(); break;
    case ExperimentKind::j1_sweep: r.j1_sweep(); break;
    case ExperimentKind::widom: r.widom(); break;
    case ExperimentKind::clt: r.clt(); break;
    case ExperimentKind::covariance: r.covariance(); break;
    case ExperimentKind::sample: r.sample(); break;
    case ExperimentKind::weyl: r.weyl(); break;
    case ExperimentKind::oscint: r.oscint(); break;
    case ExperimentKind::collision: r.collision(); break;
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace fbl
