#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "talbot/config.hpp"
#include "talbot/experiments.hpp"
#include "talbot/parallel.hpp"
#include "talbot/report.hpp"

namespace {

constexpr int exit_checks_failed = 1;
constexpr int exit_usage = 2;
constexpr int exit_internal = 3;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string summary_line(const talbot::check_result& c) {
  std::string line = (c.pass ? "  pass  " : "  FAIL  ") + c.name + " = " + num(c.value) + " " +
                     c.relation + " " + num(c.threshold);
  if (c.relation == "|x-t|<=") line += " (target " + num(c.target) + ")";
  return line;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reproducible experiment runner for quadratic Weyl sums and the periodic "
               "Schrodinger maximal function."};
  app.set_version_flag("--version", std::string(talbot::artifact_version));
  std::string id;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  bool quiet = false;
  app.add_option("experiment", id, "Experiment id")
      ->required()
      ->check(CLI::IsMember(talbot::experiment_ids()));
  app.add_option("--config", config_path, "Key = value configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (default: config key output_dir or ./out-<id>)");
  app.add_option("--seed", seed, "Seed; overrides the config key");
  app.add_option("--jobs", jobs, "Worker thread cap")->check(CLI::Range(1u, 1024u));
  app.add_flag("--quiet", quiet, "Only print the verdict");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  talbot::run_report report;
  try {
    auto cfg = talbot::experiment_config::load(config_path);
    if (seed) cfg.set("seed", std::to_string(*seed));
    const std::string configured_out = cfg.get_string("output_dir", "out-" + id);
    if (out_dir.empty()) out_dir = configured_out;
    const auto configured_jobs = cfg.get_int("jobs", 1);
    if (configured_jobs < 1) throw talbot::config_error("jobs must be at least 1");
    talbot::set_worker_count(jobs ? *jobs : static_cast<unsigned>(configured_jobs));
    report = talbot::run_experiment(id, cfg);
  } catch (const talbot::config_error& e) {
    std::cerr << "talbot-lab: config error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "talbot-lab: invalid argument: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "talbot-lab: " << e.what() << "\n";
    return exit_internal;
  }

  try {
    talbot::write_report(report, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "talbot-lab: " << e.what() << "\n";
    return exit_internal;
  }

  if (!quiet)
    for (const auto& s : report.sections) {
      std::cout << s.name << (s.passed() ? "" : "  [failed]") << "\n";
      for (const auto& c : s.checks) std::cout << summary_line(c) << "\n";
    }
  std::cout << (report.passed() ? "PASS " : "FAIL ") << id << " -> " << out_dir << "\n";
  return report.passed() ? 0 : exit_checks_failed;
}
