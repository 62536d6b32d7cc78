#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "talbot/config.hpp"

namespace talbot {

inline constexpr const char* artifact_version = "1.0.0";

struct check_result {
  std::string name;
  double value = 0.0;
  std::string relation;  // "<=", ">=", "==" or "|x-t|<="
  double threshold = 0.0;
  double target = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
  std::string note;
};

struct fit_line {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  bool log_x = true;
  bool log_y = true;
  bool polylog = false;  // y was ln(value) - ln ln(x)
};

struct sweep_table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::size_t plot_x = 0;
  std::size_t plot_y = 1;
  std::optional<fit_line> fit;
  std::string note;
};

struct section_result {
  std::string name;
  std::vector<check_result> checks;
  std::vector<sweep_table> sweeps;
  double seconds = 0.0;  // always measured; written only on request

  bool passed() const;
};

struct run_report {
  std::string experiment;
  std::string version = artifact_version;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;  // every key with its resolved value
  std::vector<section_result> sections;
  bool record_wall_time = false;
  double wall_time = 0.0;

  bool passed() const;
  const section_result* section(const std::string& name) const;
};

const std::vector<std::string>& experiment_ids();
bool is_randomized(const std::string& id);

// Reads and validates every key before any computation: unknown ids, unknown
// keys, malformed values and a missing seed all raise config_error.
run_report run_experiment(const std::string& id, const experiment_config& cfg);

}  // namespace talbot
