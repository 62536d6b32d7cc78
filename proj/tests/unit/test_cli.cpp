#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "talbot/config.hpp"
#include "talbot/experiments.hpp"
#include "talbot/report.hpp"

using namespace talbot;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("talbot_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

int run_lab(const std::string& args) {
  const std::string cmd = std::string(TALBOT_LAB_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* small_evolve = "experiment = evolve\nseed = 5\nj_max = 2\nsamples = 4\n";

const char* small_gauss =
    "experiment = gauss\nseed = 9\nq_max = 40\nperturbed_q_min = 16\nperturbed_q_max = 24\n"
    "abel_instances = 50\n";

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = experiment_config::parse(
      "# comment\n  alpha = 0.5  # trailing\nlist = 1, 2 ,3\nflag = true\n\nname = x y\n");
  CHECK(cfg.get_double("alpha", 0.0) == 0.5);
  CHECK(cfg.get_int_list("list", {}) == std::vector<std::int64_t>{1, 2, 3});
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_string("name", "") == "x y");
  CHECK(cfg.get_int("missing", 7) == 7);
  CHECK(cfg.unused_keys().empty());

  CHECK_THROWS_AS(experiment_config::parse("a = 1\na = 2\n"), config_error);
  CHECK_THROWS_AS(experiment_config::parse("a 1\n"), config_error);
  CHECK_THROWS_AS(experiment_config::parse("a =\n"), config_error);
  CHECK_THROWS_AS(experiment_config::parse("Bad-Key = 1\n"), config_error);

  const auto bad = experiment_config::parse("n = abc\nt = -1\nb = yes\nx = 1.5\nu = -3\nunused = 1\n");
  CHECK_THROWS_AS(bad.get_int("n", 0), config_error);
  CHECK_THROWS_AS(bad.get_tolerance("t", 1.0), config_error);
  CHECK_THROWS_AS(bad.get_bool("b", false), config_error);
  CHECK_THROWS_AS(bad.get_int("x", 0), config_error);
  CHECK_THROWS_AS(bad.get_u64("u", 0), config_error);
  CHECK(bad.unused_keys() == std::vector<std::string>{"unused"});
  CHECK_THROWS_AS(experiment_config::load("/nonexistent/file.cfg"), config_error);
}

TEST_CASE("run validates the configuration before computing") {
  CHECK_THROWS_AS(run_experiment("nope", experiment_config::parse("")), config_error);
  CHECK_THROWS_AS(run_experiment("evolve", experiment_config::parse("j_max = 2\n")), config_error);
  CHECK_THROWS_AS(run_experiment("evolve", experiment_config::parse("seed = 1\nbogus = 2\n")),
                  config_error);
  CHECK_THROWS_AS(run_experiment("evolve", experiment_config::parse("experiment = gauss\nseed = 1\n")),
                  config_error);
  CHECK_THROWS_AS(run_experiment("claims", experiment_config::parse("seed = 1\nlambda = 16\nkappa = 0.5\n")),
                  config_error);
  CHECK_THROWS_AS(run_experiment("gauss", experiment_config::parse("seed = 1\ntol_closed_form = 0\n")),
                  config_error);
  CHECK(is_randomized("claims"));
  CHECK_FALSE(is_randomized("maximal"));
}

TEST_CASE("reports are deterministic and list every check once") {
  const auto cfg = experiment_config::parse(small_evolve);
  const auto a = run_experiment("evolve", cfg);
  const auto b = run_experiment("evolve", experiment_config::parse(small_evolve));
  CHECK(a.passed());
  CHECK(report_json(a) == report_json(b));
  CHECK(a.config.at("seed") == "5");
  CHECK(a.config.at("lambda") == "16");
  const std::string json = report_json(a);
  for (const auto& s : a.sections)
    for (const auto& c : s.checks) {
      const std::string key = "\"name\": \"" + c.name + "\"";
      const auto first = json.find(key);
      REQUIRE(first != std::string::npos);
      CHECK(json.find(key, first + 1) == std::string::npos);
    }
  CHECK(json.find("wall_time_seconds") == std::string::npos);
}

TEST_CASE("claims report carries the three claim tables") {
  const auto r = run_experiment(
      "claims", experiment_config::parse("seed = 3\nj_list = 2, 3\nsamples = 6\nblowup_j_last = 3\n"
                                         "blowup_j_max = 5\n"));
  for (const char* name : {"claim_i", "claim_ii", "claim_iii", "blowup"}) {
    const auto* s = r.section(name);
    REQUIRE(s != nullptr);
    CHECK(!s->sweeps.empty());
    CHECK(!s->sweeps.front().rows.empty());
  }
}

TEST_CASE("csv and plot files") {
  sweep_table t{"demo", {"n", "value"}, {{16, 0.1}, {32, 0.2}}, 0, 1, std::nullopt, ""};
  CHECK(sweep_csv(t) == "n,value\n1.6000000000000000e+01,1.0000000000000001e-01\n"
                        "3.2000000000000000e+01,2.0000000000000001e-01\n");
  fit_line f;
  f.slope = 1.0;
  f.intercept = std::log(0.1 / 16.0);
  t.fit = f;
  run_report r;
  section_result s;
  s.sweeps.push_back(t);
  r.sections.push_back(s);
  const auto dir = scratch("plots");
  emit_plotdata(r, dir);
  CHECK(fs::exists(dir / "plot_demo.dat"));
  const std::string fit = slurp(dir / "plot_demo_fit.dat");
  CHECK(fit.find("3.2000000000000000e+01 2.0000000000000") != std::string::npos);

  run_report empty;
  CHECK_THROWS_AS(emit_plotdata(empty, scratch("empty")), std::invalid_argument);
}

TEST_CASE("command line exit codes and outputs") {
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  spit(dir / "evolve.cfg", small_evolve);
  spit(dir / "broken.cfg", "experiment = evolve\nseed = 5\nj_max = two\n");
  spit(dir / "failing.cfg", std::string(small_gauss) + "perturbed_constant = 1e-6\n");

  CHECK(run_lab("evolve --config " + (dir / "broken.cfg").string() + " --out " + (dir / "b").string()) == 2);
  CHECK_FALSE(fs::exists(dir / "b"));
  CHECK(run_lab("nope --config " + (dir / "evolve.cfg").string()) == 2);
  CHECK(run_lab("evolve") == 2);
  CHECK(run_lab("--help") == 0);

  CHECK(run_lab("evolve --config " + (dir / "evolve.cfg").string() + " --out " + (dir / "r1").string()) == 0);
  CHECK(run_lab("evolve --config " + (dir / "evolve.cfg").string() + " --out " + (dir / "r2").string() +
                " --jobs 2") == 0);
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir / "r1")) {
    ++files;
    CHECK(slurp(e.path()) == slurp(dir / "r2" / e.path().filename()));
  }
  CHECK(files >= 3);
  CHECK(fs::exists(dir / "r1" / "sweep_fast_vs_direct.csv"));
  CHECK(fs::exists(dir / "r1" / "plot_fast_vs_direct.dat"));

  CHECK(run_lab("gauss --config " + (dir / "failing.cfg").string() + " --out " + (dir / "f").string()) == 1);
  CHECK(fs::exists(dir / "f" / "report.json"));
  CHECK(slurp(dir / "f" / "report.json").find("\"passed\": false") != std::string::npos);

  // --seed overrides the config and is echoed
  CHECK(run_lab("evolve --config " + (dir / "evolve.cfg").string() + " --seed 77 --out " +
                (dir / "s").string()) == 0);
  CHECK(slurp(dir / "s" / "report.json").find("\"seed\": \"77\"") != std::string::npos);
  fs::remove_all(dir.parent_path());
}
