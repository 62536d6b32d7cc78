#include "talbot/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace talbot {

namespace {

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

nlohmann::ordered_json fit_json(const fit_line& f) {
  nlohmann::ordered_json j;
  j["slope"] = number(f.slope);
  j["intercept"] = number(f.intercept);
  j["residual"] = number(f.residual);
  j["log_x"] = f.log_x;
  j["log_y"] = f.log_y;
  j["polylog"] = f.polylog;
  return j;
}

double fitted(const fit_line& f, double x) {
  const double xv = f.log_x ? std::log(x) : x;
  double y = f.intercept + f.slope * xv;
  if (f.log_y) y = std::exp(y);
  if (f.polylog) y *= std::log(x);
  return y;
}

}  // namespace

std::string report_json(const run_report& report) {
  nlohmann::ordered_json j;
  j["experiment"] = report.experiment;
  j["version"] = report.version;
  j["seed"] = report.seed;
  j["config"] = report.config;
  if (report.record_wall_time) j["wall_time_seconds"] = report.wall_time;
  j["passed"] = report.passed();
  auto& sections = j["sections"] = nlohmann::ordered_json::array();
  for (const auto& s : report.sections) {
    nlohmann::ordered_json sj;
    sj["name"] = s.name;
    sj["passed"] = s.passed();
    if (report.record_wall_time) sj["seconds"] = s.seconds;
    auto& checks = sj["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : s.checks) {
      nlohmann::ordered_json cj;
      cj["name"] = c.name;
      cj["value"] = number(c.value);
      cj["relation"] = c.relation;
      cj["threshold"] = number(c.threshold);
      if (!std::isnan(c.target)) cj["target"] = number(c.target);
      // Signed distance from the reference: target if present, else threshold.
      cj["diff"] = number(c.value - (std::isnan(c.target) ? c.threshold : c.target));
      cj["pass"] = c.pass;
      if (!c.note.empty()) cj["note"] = c.note;
      checks.push_back(std::move(cj));
    }
    auto& sweeps = sj["sweeps"] = nlohmann::ordered_json::array();
    for (const auto& t : s.sweeps) {
      nlohmann::ordered_json tj;
      tj["name"] = t.name;
      tj["file"] = "sweep_" + t.name + ".csv";
      tj["rows"] = t.rows.size();
      tj["columns"] = t.columns;
      if (t.fit) tj["fit"] = fit_json(*t.fit);
      if (!t.note.empty()) tj["note"] = t.note;
      sweeps.push_back(std::move(tj));
    }
    sections.push_back(std::move(sj));
  }
  return j.dump(2) + "\n";
}

std::string sweep_csv(const sweep_table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out += (i ? "," : "") + table.columns[i];
  out += "\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::logic_error("sweep '" + table.name + "' has a ragged row");
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + sci(row[i]);
    out += "\n";
  }
  return out;
}

void emit_plotdata(const run_report& report, const std::filesystem::path& dir) {
  std::size_t count = 0;
  for (const auto& s : report.sections) count += s.sweeps.size();
  if (count == 0) throw std::invalid_argument("report has no sweep to plot");
  std::filesystem::create_directories(dir);
  for (const auto& s : report.sections)
    for (const auto& t : s.sweeps) {
      std::string data = "# " + t.columns.at(t.plot_x) + " " + t.columns.at(t.plot_y) + "\n";
      for (const auto& r : t.rows) data += sci(r[t.plot_x]) + " " + sci(r[t.plot_y]) + "\n";
      write_file(dir / ("plot_" + t.name + ".dat"), data);
      if (!t.fit) continue;
      std::string fit = "# " + t.columns[t.plot_x] + " fitted " + t.columns[t.plot_y] +
                        " slope " + sci(t.fit->slope) + "\n";
      for (const auto& r : t.rows) fit += sci(r[t.plot_x]) + " " + sci(fitted(*t.fit, r[t.plot_x])) + "\n";
      write_file(dir / ("plot_" + t.name + "_fit.dat"), fit);
    }
}

void write_report(const run_report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::size_t count = 0;
  for (const auto& s : report.sections)
    for (const auto& t : s.sweeps) {
      write_file(dir / ("sweep_" + t.name + ".csv"), sweep_csv(t));
      ++count;
    }
  if (count) emit_plotdata(report, dir);
  write_file(dir / "report.json", report_json(report));
}

}  // namespace talbot
