#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "fbl/error.hpp"
#include "fbl/experiments.hpp"
#include "fbl/kernels.hpp"

namespace fbl {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_failure, "cannot open " + path.string() + " for writing");
  out << body;
  out.flush();
  if (!out) throw Error(Errc::io_failure, "write failed for " + path.string());
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const SweepResult& r) {
  std::ostringstream os;
  for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
  os << "\n";
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    for (std::size_t i = 0; i < r.rows[k].size(); ++i) os << (i ? "," : "") << format_number(r.rows[k][i]);
    os << "\n";
  }
  return os.str();
}

std::string to_json(const SweepResult& r, bool timing) {
  json m;
  m["tool"] = "fbl";
  m["version"] = kVersion;
  m["kind"] = std::string(to_string(r.kind));
  m["seed"] = r.seed;
  m["config_hash"] = "fnv1a64:" + hex(r.config_hash);
  m["config_text"] = r.config_text;
  m["kernels"] = std::string(kernels::isa_name(kernels::active().isa));
  m["status"] = r.ok() ? "ok" : "partial";
  m["columns"] = r.columns;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr = json::array();
    for (double v : row) jr.push_back(number_or_null(v));
    rows.push_back(jr);
  }
  m["rows"] = rows;
  json failures = json::array();
  for (std::size_t k = 0; k < r.failures.size(); ++k)
    if (!r.failures[k].empty())
      failures.push_back({{"row", k}, {"key", number_or_null(r.rows[k].empty() ? 0.0 : r.rows[k][0])}, {"error", r.failures[k]}});
  m["failures"] = failures;
  m["fits"] = r.fits;
  m["summary"] = r.summary;
  if (timing) m["wall_seconds"] = r.wall_seconds;
  return m.dump(2) + "\n";
}

std::string to_svg(const SweepResult& r) {
  constexpr double w = 640, h = 420, left = 70, right = 20, top = 30, bottom = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : r.plot)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (!(xmax > xmin)) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (!(ymax > ymin)) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (w - left - right); };
  auto py = [&](double y) { return h - bottom - (y - ymin) / (ymax - ymin) * (h - top - bottom); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
     << " " << h << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << to_string(r.kind)
     << "</text>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\"" << h - bottom
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << r.plot_x_label
     << " [" << short_number(xmin) << ", " << short_number(xmax) << "]</text>\n";
  os << "<text x=\"14\" y=\"" << h / 2 << "\" font-size=\"12\" transform=\"rotate(-90 14 " << h / 2 << ")\">"
     << r.plot_y_label << " [" << short_number(ymin) << ", " << short_number(ymax) << "]</text>\n";
  for (std::size_t k = 0; k < r.plot.size(); ++k) {
    const auto& s = r.plot[k];
    const bool is_fit = s.name.size() > 4 && s.name.compare(s.name.size() - 4, 4, " fit") == 0;
    os << "<polyline data-series=\"" << s.name << "\" fill=\"none\" stroke=\"" << colors[k % 6] << "\""
       << (is_fit ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << (first ? "" : " ") << short_number(px(s.x[i])) << "," << short_number(py(s.y[i]));
      first = false;
    }
    os << "\"/>\n";
    os << "<text x=\"" << w - right - 4 << "\" y=\"" << top + 14 * (k + 1) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
       << colors[k % 6] << "\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::string> emit(const SweepResult& result, const std::string& dir, const EmitOptions& options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(Errc::io_failure, "cannot create " + dir + ": " + ec.message());
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& body) {
    const fs::path p = fs::path(dir) / name;
    write_file(p, body);
    written.push_back(p.string());
  };
  if (options.csv) {
    put("result.csv", to_csv(result));
    for (const auto& [name, body] : result.extra_files) put(name, body);
  }
  if (options.json) put("manifest.json", to_json(result, options.timing));
  if (options.svg) put("plot.svg", to_svg(result));
  return written;
}

}  // namespace fbl
