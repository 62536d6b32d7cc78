#pragma once

#include <filesystem>
#include <string>

#include "talbot/experiments.hpp"

namespace talbot {

std::string report_json(const run_report& report);
std::string sweep_csv(const sweep_table& table);

// Two-column (x, y) data per sweep and, where a fit exists, plot_<name>_fit.dat
// with the fitted curve at the same abscissae. Throws std::invalid_argument
// when the report has no sweep.
void emit_plotdata(const run_report& report, const std::filesystem::path& dir);

// report.json, sweep_<name>.csv and the plot files.
void write_report(const run_report& report, const std::filesystem::path& dir);

}  // namespace talbot
