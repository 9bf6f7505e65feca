// fbl: command-line front end for the experiment runner.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "fbl/error.hpp"
#include "fbl/experiments.hpp"
#include "fbl/oscint.hpp"
#include "fbl/spectral.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericFailure = 3;

struct RunFlags {
  std::string config;
  long long seed = -1;
  std::string out;
  unsigned threads = 0;
  std::string formats = "csv,json";
  bool timing = false;
};

fbl::EmitOptions parse_formats(const std::string& list) {
  fbl::EmitOptions o;
  o.csv = o.json = o.svg = false;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "csv")
      o.csv = true;
    else if (item == "json")
      o.json = true;
    else if (item == "svg")
      o.svg = true;
    else if (!item.empty())
      throw fbl::Error(fbl::Errc::config_error, "unknown format '" + item + "'");
  }
  return o;
}

int run_config(const RunFlags& flags, std::optional<fbl::ExperimentKind> force_kind) {
  auto cfg = fbl::load_config_file(flags.config);
  if (force_kind && cfg.kind != *force_kind)
    throw fbl::Error(fbl::Errc::config_error, "config kind is '" + std::string(fbl::to_string(cfg.kind)) + "', expected '" +
                                                  std::string(fbl::to_string(*force_kind)) + "'");
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (!flags.out.empty()) cfg.output_dir = flags.out;
  if (flags.threads > 0) cfg.threads = flags.threads;
  auto options = parse_formats(flags.formats);
  options.timing = flags.timing;

  const auto result = fbl::run(cfg);
  const auto files = fbl::emit(result, cfg.output_dir, options);
  for (const auto& f : files) std::cout << f << "\n";
  for (const auto& [name, fit] : result.fits.items())
    if (fit.contains("slope"))
      std::cout << name << ": slope " << fbl::format_number(fit["slope"].get<double>()) << ", R^2 "
                << fbl::format_number(fit["r_squared"].get<double>()) << "\n";
  if (!result.ok()) {
    for (std::size_t i = 0; i < result.failures.size(); ++i)
      if (!result.failures[i].empty()) std::cerr << "cell " << i << " failed: " << result.failures[i] << "\n";
    return kNumericFailure;
  }
  return kOk;
}

fbl::Potential potential_from(const std::string& spec) {
  if (spec == "harmonic") return fbl::Potential::harmonic();
  if (spec.rfind("power:", 0) == 0) return fbl::Potential::power(std::stod(spec.substr(6)));
  throw fbl::Error(fbl::Errc::config_error, "potential must be 'harmonic' or 'power:<q>'");
}

int weyl_table(int dim, const std::string& potential, double mu, const std::vector<double>& hbars, double half_width) {
  fbl::ProblemSpec spec;
  spec.dim = dim;
  spec.mu = mu;
  spec.half_width = half_width;
  spec.potential = potential_from(potential);
  std::cout << "hbar,M,N,N_pred,ratio\n";
  for (double h : hbars) {
    const std::size_t m = fbl::auto_points_per_axis(spec, h);
    const auto grid = fbl::build_grid(dim, half_width, m);
    const auto problem = fbl::assemble(grid, spec.potential, h, mu);
    const double n = static_cast<double>(fbl::counting_function(problem, mu));
    const double pred = fbl::weyl_prediction(spec.potential, mu, h, dim, half_width);
    std::cout << fbl::format_number(h) << "," << m << "," << n << "," << fbl::format_number(pred) << ","
              << fbl::format_number(n / pred) << "\n";
  }
  return kOk;
}

int oscint_report(double hbar, double delta_exponent, int order) {
  fbl::StationaryPhaseProblem p;
  p.dim = 1;
  p.hbar = hbar;
  p.delta = std::pow(hbar, delta_exponent);
  p.support_radius = 8.0 * p.delta;
  const double d = p.delta;
  p.amplitude = [d](fbl::Point x) { return std::exp(-x[0] * x[0] / (d * d)); };
  const auto oracle = fbl::brute_force_oscillatory(p);
  const auto pref = fbl::stationary_phase_prefactor(1, hbar);
  std::cout << "hbar " << fbl::format_number(hbar) << ", delta " << fbl::format_number(d) << "\n";
  std::cout << "oracle " << fbl::format_number(oracle.value.real()) << " " << fbl::format_number(oracle.value.imag())
            << "i  (error estimate " << fbl::format_number(oracle.error_estimate) << ", " << oracle.samples
            << " samples)\n";
  for (int l = 1; l <= order; ++l) {
    const auto e = pref * fbl::stationary_phase_expand(p, l);
    std::cout << "order " << l << ": " << fbl::format_number(e.real()) << " " << fbl::format_number(e.imag())
              << "i  remainder/hbar^(1/2) " << fbl::format_number(std::abs(oracle.value - e) / std::sqrt(hbar)) << "\n";
  }
  return kOk;
}

void add_run_flags(CLI::App* cmd, RunFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("config", flags.config, "experiment config (.toml) or result manifest (.json)");
  if (config_required) opt->required();
  cmd->add_option("--seed", flags.seed, "override the config seed");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--threads", flags.threads, "concurrent hbar cells");
  cmd->add_option("--formats", flags.formats, "comma list of csv,json,svg")->capture_default_str();
  cmd->add_flag("--timing", flags.timing, "record wall time in the manifest");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free-fermion ground-state statistics on discretized Schrodinger operators"};
  app.require_subcommand(1);

  RunFlags run_flags, sample_flags, osc_flags;
  auto* run = app.add_subcommand("run", "run an experiment config");
  add_run_flags(run, run_flags, true);

  auto* sample = app.add_subcommand("sample", "run a sample-kind config");
  add_run_flags(sample, sample_flags, true);

  int weyl_dim = 1;
  std::string weyl_potential = "harmonic";
  double weyl_mu = 1.0, weyl_half_width = 1.5;
  std::vector<double> weyl_hbar{0.01};
  auto* weyl = app.add_subcommand("weyl", "Fermi count against the Weyl prediction");
  weyl->add_option("--dim", weyl_dim)->check(CLI::IsMember({1, 2}));
  weyl->add_option("--potential", weyl_potential, "harmonic or power:<q>");
  weyl->add_option("--mu", weyl_mu);
  weyl->add_option("--hbar", weyl_hbar)->expected(1, -1);
  weyl->add_option("--half-width", weyl_half_width);

  double osc_hbar = 1.0 / 1024.0, osc_exponent = 0.4;
  int osc_order = 3;
  auto* osc = app.add_subcommand("oscint", "stationary phase against brute-force quadrature");
  add_run_flags(osc, osc_flags, false);
  osc->add_option("--hbar", osc_hbar);
  osc->add_option("--delta-exponent", osc_exponent);
  osc->add_option("--order", osc_order)->check(CLI::Range(1, 3));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return run_config(run_flags, std::nullopt);
    if (*sample) return run_config(sample_flags, fbl::ExperimentKind::sample);
    if (*weyl) return weyl_table(weyl_dim, weyl_potential, weyl_mu, weyl_hbar, weyl_half_width);
    if (*osc) {
      if (!osc_flags.config.empty()) return run_config(osc_flags, fbl::ExperimentKind::oscint);
      return oscint_report(osc_hbar, osc_exponent, osc_order);
    }
  } catch (const fbl::Error& e) {
    std::cerr << "fbl: " << e.what() << "\n";
    return e.is_config() ? kConfigError : kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << "fbl: " << e.what() << "\n";
    return kNumericFailure;
  }
  return kOk;
}
