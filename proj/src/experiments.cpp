#include "talbot/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "talbot/counterexample.hpp"
#include "talbot/expsum.hpp"
#include "talbot/fit.hpp"
#include "talbot/fractal.hpp"
#include "talbot/measures.hpp"
#include "talbot/parallel.hpp"
#include "talbot/schrodinger.hpp"

namespace talbot {

bool section_result::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const check_result& c) { return c.pass; });
}

bool run_report::passed() const {
  return std::all_of(sections.begin(), sections.end(),
                     [](const section_result& s) { return s.passed(); });
}

const section_result* run_report::section(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids{"gauss", "evolve", "claims", "dimension", "maximal"};
  return ids;
}

bool is_randomized(const std::string& id) {
  return id == "gauss" || id == "evolve" || id == "claims";
}

namespace {

constexpr double pi = std::numbers::pi;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_floating_point_v<T>)
      out += format_double(values[i]);
    else
      out += std::to_string(values[i]);
  }
  return out;
}

// Reads typed keys and remembers the resolved value of each one for the echo.
class settings {
 public:
  explicit settings(const experiment_config& cfg) : cfg_(cfg) {}

  double real(const std::string& key, double fallback) {
    const double v = cfg_.get_double(key, fallback);
    echo_[key] = format_double(v);
    return v;
  }
  double tolerance(const std::string& key, double fallback) {
    const double v = cfg_.get_tolerance(key, fallback);
    echo_[key] = format_double(v);
    return v;
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const auto v = cfg_.get_int(key, fallback);
    echo_[key] = std::to_string(v);
    return v;
  }
  std::int64_t positive(const std::string& key, std::int64_t fallback) {
    const auto v = integer(key, fallback);
    if (v < 1) throw config_error("key '" + key + "' must be a positive integer");
    return v;
  }
  bool flag(const std::string& key, bool fallback) {
    const bool v = cfg_.get_bool(key, fallback);
    echo_[key] = v ? "true" : "false";
    return v;
  }
  std::vector<std::int64_t> integers(const std::string& key,
                                     const std::vector<std::int64_t>& fallback) {
    auto v = cfg_.get_int_list(key, fallback);
    if (v.empty()) throw config_error("key '" + key + "' needs at least one value");
    echo_[key] = join(v);
    return v;
  }
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) {
    auto v = cfg_.get_double_list(key, fallback);
    if (v.empty()) throw config_error("key '" + key + "' needs at least one value");
    echo_[key] = join(v);
    return v;
  }
  std::uint64_t seed(bool required) {
    if (required && !cfg_.has("seed"))
      throw config_error("randomized experiment needs a seed (config key or --seed)");
    const auto v = cfg_.get_u64("seed", 0);
    echo_["seed"] = std::to_string(v);
    return v;
  }
  std::string text(const std::string& key, const std::string& fallback) {
    auto v = cfg_.get_string(key, fallback);
    echo_[key] = v;
    return v;
  }

  const std::map<std::string, std::string>& echo() const { return echo_; }

 private:
  const experiment_config& cfg_;
  std::map<std::string, std::string> echo_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw config_error(message);
}

std::vector<std::int64_t> powers_of_two(int lo, int hi) {
  std::vector<std::int64_t> out;
  for (int e = lo; e <= hi; ++e) out.push_back(std::int64_t{1} << e);
  return out;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Stream seed for a named sub-computation; FNV-1a keeps it platform independent.
std::uint64_t derive_seed(std::uint64_t seed, const std::string& tag, std::uint64_t index = 0) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : tag) h = (h ^ c) * 1099511628211ull;
  return splitmix(splitmix(seed ^ h) + index);
}

check_result make_check(std::string name, double value, std::string relation, double threshold,
                        double target = std::numeric_limits<double>::quiet_NaN(),
                        std::string note = "") {
  check_result c;
  c.name = std::move(name);
  c.value = value;
  c.relation = std::move(relation);
  c.threshold = threshold;
  c.target = target;
  c.note = std::move(note);
  if (c.relation == "<=")
    c.pass = value <= threshold;
  else if (c.relation == ">=")
    c.pass = value >= threshold;
  else if (c.relation == ">")
    c.pass = value > threshold;
  else if (c.relation == "==")
    c.pass = value == threshold;
  else
    c.pass = std::abs(value - target) <= threshold;
  return c;
}

check_result within(std::string name, double value, double target, double tol,
                    std::string note = "") {
  return make_check(std::move(name), value, "|x-t|<=", tol, target, std::move(note));
}

fit_line fit_of(std::span<const double> x, std::span<const double> y, bool log_x, bool log_y,
                bool polylog = false) {
  std::vector<double> fx, fy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if ((log_x && !(x[i] > 0.0)) || (log_y && !(y[i] > 0.0))) continue;
    double xv = log_x ? std::log(x[i]) : x[i];
    double yv = log_y ? std::log(y[i]) : y[i];
    if (polylog) yv -= std::log(std::log(x[i]));
    fx.push_back(xv);
    fy.push_back(yv);
  }
  fit_line f;
  f.log_x = log_x;
  f.log_y = log_y;
  f.polylog = polylog;
  if (fx.size() < 2) {
    f.slope = f.intercept = f.residual = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  const linear_fit lf = least_squares(fx, fy);
  f.slope = lf.slope;
  f.intercept = lf.intercept;
  f.residual = lf.residual;
  return f;
}

std::vector<double> column(const sweep_table& t, std::size_t c) {
  std::vector<double> out;
  for (const auto& r : t.rows) out.push_back(r[c]);
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? std::numeric_limits<double>::quiet_NaN() : *std::max_element(v.begin(), v.end());
}

template <class F>
section_result timed(const std::string& name, F&& body) {
  const auto start = std::chrono::steady_clock::now();
  section_result s;
  s.name = name;
  body(s);
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

counterexample_params read_params(settings& st) {
  counterexample_params p;
  p.d = static_cast<int>(st.positive("d", 1));
  p.alpha = st.real("alpha", p.alpha);
  p.lambda = st.positive("lambda", p.lambda);
  p.delta = st.real("delta", p.delta);
  p.kappa = st.real("kappa", p.kappa);
  p.c1 = st.real("c1", p.c1);
  p.c2 = st.real("c2", p.c2);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("invalid counterexample parameters: ") + e.what());
  }
  return p;
}

// ---------------------------------------------------------------- gauss

struct gauss_settings {
  std::uint64_t seed = 0;
  std::int64_t q_max = 2000;
  int random_r = 2;
  double tol = 1e-8;
  std::int64_t pq_min = 16, pq_max = 1024, pq_step = 4;
  int eps_points = 21;
  double eps_extent = 0.1;
  double perturbed_c = 5.0;
  double perturbed_floor = 1e-9;
  int abel_instances = 10000;
  std::int64_t abel_max_length = 128;
  double abel_slack = 1e-10;

  explicit gauss_settings(settings& st) {
    seed = st.seed(true);
    q_max = st.positive("q_max", q_max);
    require(q_max <= 4096, "q_max is limited to 4096");
    random_r = static_cast<int>(st.integer("random_r", random_r));
    require(random_r >= 0, "random_r must be nonnegative");
    tol = st.tolerance("tol_closed_form", tol);
    pq_min = st.positive("perturbed_q_min", pq_min);
    pq_max = st.positive("perturbed_q_max", pq_max);
    pq_step = st.positive("perturbed_q_step", pq_step);
    require(pq_min % 4 == 0 && pq_step % 4 == 0 && pq_min <= pq_max,
            "perturbed q range must run over multiples of 4");
    eps_points = static_cast<int>(st.positive("perturbed_eps_points", eps_points));
    require(eps_points >= 2, "perturbed_eps_points must be at least 2");
    eps_extent = st.tolerance("perturbed_eps_extent", eps_extent);
    require(eps_extent <= 0.1, "perturbed_eps_extent must not exceed 1/10");
    perturbed_c = st.tolerance("perturbed_constant", perturbed_c);
    perturbed_floor = st.tolerance("perturbed_floor", perturbed_floor);
    abel_instances = static_cast<int>(st.positive("abel_instances", abel_instances));
    abel_max_length = st.positive("abel_max_length", abel_max_length);
    abel_slack = st.tolerance("abel_slack", abel_slack);
  }
};

section_result gauss_closed_form(const gauss_settings& g) {
  return timed("gauss_closed_form", [&](section_result& s) {
    const auto nq = static_cast<std::size_t>(g.q_max);
    std::vector<std::vector<std::int64_t>> rs(nq);
    std::mt19937_64 rng(derive_seed(g.seed, "gauss_closed_form"));
    for (std::int64_t q = 1; q <= g.q_max; ++q) {
      auto& r = rs[static_cast<std::size_t>(q - 1)];
      r.push_back(1);
      if (q > 2) r.push_back(q - 1);
      std::vector<std::int64_t> coprime;
      for (std::int64_t v = 2; v <= q - 2; ++v)
        if (std::gcd(v, q) == 1) coprime.push_back(v);
      if (!coprime.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, coprime.size() - 1);
        for (int i = 0; i < g.random_r; ++i) r.push_back(coprime[pick(rng)]);
      }
    }
    std::vector<double> worst(nq, 0.0);
    std::vector<double> mismatches(nq, 0.0);
    parallel_for(nq, [&](std::size_t i) {
      const auto q = static_cast<std::int64_t>(i + 1);
      for (auto r : rs[i]) {
        const auto row = gauss_sum_bruteforce_row(q, r);
        for (std::int64_t p = 0; p < q; ++p) {
          const double closed = gauss_sum_magnitude({q, r, p});
          const double err = std::abs(row[static_cast<std::size_t>(p)] - closed) /
                             std::max(1.0, closed);
          worst[i] = std::max(worst[i], err);
          if (!(err <= g.tol)) mismatches[i] += 1.0;
        }
      }
    });
    sweep_table t{"gauss_closed_form", {"q", "r_values", "max_rel_error", "mismatches"}, {}, 0, 2,
                  std::nullopt, "error is | |brute| - closed | / max(1, closed)"};
    for (std::size_t i = 0; i < nq; ++i)
      t.rows.push_back({static_cast<double>(i + 1), static_cast<double>(rs[i].size()), worst[i],
                        mismatches[i]});
    s.checks.push_back(make_check("closed_form_mismatches",
                                  std::accumulate(mismatches.begin(), mismatches.end(), 0.0), "==",
                                  0.0));
    s.checks.push_back(make_check("closed_form_max_error", max_of(worst), "<=", g.tol));
    s.sweeps.push_back(std::move(t));
  });
}

section_result perturbed_gauss_section(const gauss_settings& g) {
  return timed("perturbed_gauss", [&](section_result& s) {
    std::vector<std::int64_t> qs;
    for (std::int64_t q = g.pq_min; q <= g.pq_max; q += g.pq_step) qs.push_back(q);
    std::vector<double> unit(static_cast<std::size_t>(g.eps_points));
    for (int i = 0; i < g.eps_points; ++i)
      unit[static_cast<std::size_t>(i)] =
          g.eps_extent * (2.0 * i / (g.eps_points - 1) - 1.0) * (1.0 - 1e-9);
    std::vector<double> worst(qs.size(), 0.0), violations(qs.size(), 0.0);
    parallel_for(qs.size(), [&](std::size_t i) {
      const std::int64_t q = qs[i];
      const double qd = static_cast<double>(q);
      for (std::int64_t p = 0; p < q; p += 2) {
        for (double u : unit) {
          const double eps = u / qd;
          const auto r = perturbed_gauss_sum_check(q, p, eps);
          const double scale = std::sqrt(qd) * (std::abs(u) + u * u);
          const double bound = g.perturbed_c * scale + g.perturbed_floor * std::sqrt(2.0 * qd);
          if (!(r.deviation <= bound)) violations[i] += 1.0;
          if (scale > 0.0) worst[i] = std::max(worst[i], r.deviation / scale);
        }
      }
    });
    sweep_table t{"perturbed_gauss", {"q", "worst_constant", "violations"}, {}, 0, 1, std::nullopt,
                  "worst_constant is max deviation / (sqrt(q)(q|eps| + q^2 eps^2)) over even p"};
    for (std::size_t i = 0; i < qs.size(); ++i)
      t.rows.push_back({static_cast<double>(qs[i]), worst[i], violations[i]});
    s.checks.push_back(make_check("perturbed_violations",
                                  std::accumulate(violations.begin(), violations.end(), 0.0), "==",
                                  0.0));
    s.checks.push_back(make_check("perturbed_worst_constant", max_of(worst), "<=", g.perturbed_c));
    s.sweeps.push_back(std::move(t));
  });
}

struct abel_instance {
  std::int64_t left = 0;
  std::vector<double> a;
  std::vector<cplx> b;
  int kind = 0;  // 0 gaussian, 1 quadratic phase, 2 unimodular
};

section_result abel_section(const gauss_settings& g) {
  return timed("abel", [&](section_result& s) {
    std::mt19937_64 rng(derive_seed(g.seed, "abel"));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<abel_instance> inst(static_cast<std::size_t>(g.abel_instances));
    for (auto& in : inst) {
      const auto n = static_cast<std::size_t>(
          std::uniform_int_distribution<std::int64_t>(1, g.abel_max_length)(rng));
      in.left = std::uniform_int_distribution<std::int64_t>(-1000, 1000)(rng);
      const double scale = std::pow(10.0, 6.0 * u01(rng) - 3.0);
      in.a.resize(n);
      for (auto& v : in.a) v = scale * u01(rng);
      if (u01(rng) < 0.05) std::fill(in.a.begin(), in.a.end(), scale);
      std::sort(in.a.begin(), in.a.end());
      if (u01(rng) < 0.5) std::reverse(in.a.begin(), in.a.end());
      in.kind = static_cast<int>(rng() % 3);
      in.b.resize(n);
      if (in.kind == 0) {
        for (auto& v : in.b) v = {normal(rng), normal(rng)};
      } else if (in.kind == 1) {
        const auto q = std::uniform_int_distribution<std::int64_t>(1, 1000)(rng);
        const auto a2 = std::uniform_int_distribution<std::int64_t>(0, q - 1)(rng);
        const auto a1 = std::uniform_int_distribution<std::int64_t>(0, q - 1)(rng);
        const double eps = (u01(rng) - 0.5) * 1e-2;
        for (std::size_t k = 0; k < n; ++k) {
          const auto kk = in.left + static_cast<std::int64_t>(k);
          const double frac =
              static_cast<double>(quadratic_residue(a2, a1, kk, q)) / static_cast<double>(q);
          in.b[k] = std::polar(1.0, 2.0 * pi * (frac + eps * static_cast<double>(kk)));
        }
      } else {
        for (auto& v : in.b) v = std::polar(1.0, 2.0 * pi * u01(rng));
      }
    }
    std::vector<abel_result> res(inst.size());
    parallel_for(inst.size(), [&](std::size_t i) {
      const auto& in = inst[i];
      const integer_interval iv{in.left, in.left + static_cast<std::int64_t>(in.a.size()) - 1};
      res[i] = abel_bound_check(in.a, in.b, iv, g.abel_slack);
    });
    sweep_table t{"abel", {"instance", "length", "kind", "lhs", "bound", "ratio"}, {}, 1, 5,
                  std::nullopt, "kind 0 gaussian, 1 quadratic phase, 2 unimodular"};
    double violations = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < inst.size(); ++i) {
      if (!res[i].holds) violations += 1.0;
      const double ratio = res[i].bound > 0.0 ? res[i].lhs / res[i].bound : 0.0;
      worst = std::max(worst, ratio);
      t.rows.push_back({static_cast<double>(i), static_cast<double>(inst[i].a.size()),
                        static_cast<double>(inst[i].kind), res[i].lhs, res[i].bound, ratio});
    }
    s.checks.push_back(make_check("abel_violations", violations, "==", 0.0, std::nan(""),
                                  "worst lhs/bound " + format_double(worst)));
    s.sweeps.push_back(std::move(t));
  });
}

// ---------------------------------------------------------------- evolve

struct evolve_settings {
  std::uint64_t seed = 0;
  counterexample_params params;
  int j_max = 4;
  int samples = 32;
  double tol = 1e-9;

  explicit evolve_settings(settings& st) {
    seed = st.seed(true);
    params = read_params(st);
    j_max = static_cast<int>(st.positive("j_max", j_max));
    require(int_power(params.lambda, j_max) <= (std::int64_t{1} << 24),
            "lambda^j_max is limited to 2^24 for the direct oracle");
    samples = static_cast<int>(st.positive("samples", samples));
    tol = st.tolerance("tol_evolve", tol);
  }
};

section_result fast_vs_direct(const evolve_settings& e) {
  return timed("fast_vs_direct", [&](section_result& s) {
    struct job {
      int j;
      rational_time t;
    };
    std::vector<job> jobs;
    for (int j = 1; j <= e.j_max; ++j)
      for (const auto& t : time_set(e.params, j)) jobs.push_back({j, t});
    std::vector<fourier_data> data;
    for (int j = 1; j <= e.j_max; ++j)
      data.push_back(datum_block(e.params, j).scaled(1.0 / e.params.amplitude(j)));
    std::vector<double> worst(jobs.size(), 0.0);
    parallel_for(jobs.size(), [&](std::size_t i) {
      const auto& jb = jobs[i];
      const dirichlet_block block{e.params.d, e.params.lambda, jb.j};
      const auto pts = sample_points(e.params, jb.j, jb.t, static_cast<std::size_t>(e.samples),
                                     derive_seed(e.seed, "evolve", i));
      const std::int64_t n = int_power(e.params.lambda, jb.j) - 1;
      for (const auto& x : pts) {
        const cplx fast = evolve_rational_fast(block, jb.t, x);
        const cplx direct = partial_sum_direct(data[static_cast<std::size_t>(jb.j - 1)], n, jb.t, x);
        worst[i] = std::max(worst[i], std::abs(fast - direct) / std::max(1.0, std::abs(direct)));
      }
    });
    sweep_table t{"fast_vs_direct", {"j", "q", "max_rel_error"}, {}, 1, 2, std::nullopt,
                  "relative error with denominator max(1, |direct|)"};
    for (std::size_t i = 0; i < jobs.size(); ++i)
      t.rows.push_back({static_cast<double>(jobs[i].j), static_cast<double>(jobs[i].t.q), worst[i]});
    s.checks.push_back(make_check("fast_vs_direct_max_error", max_of(worst), "<=", e.tol));
    s.checks.push_back(make_check("fast_vs_direct_cases", static_cast<double>(jobs.size()), ">=",
                                  1.0));
    s.sweeps.push_back(std::move(t));
  });
}

// ---------------------------------------------------------------- claims

struct claims_settings {
  std::uint64_t seed = 0;
  counterexample_params params;
  std::vector<std::int64_t> j_list{2, 3, 4};
  int samples = 64;
  double factor_band = 8.0;
  double factor_fraction = 0.95;
  double slope_tol = 0.25;
  double upper_c = 2.0;
  double vdc_kappa = 0.125;
  double vdc_multiplier = 8.0;
  double decay_c = 250.0;
  double decay_floor = 0.25;
  int blowup_first = 1, blowup_last = 5, blowup_j_max = 7;
  double blowup_tol = 0.3;

  explicit claims_settings(settings& st) {
    seed = st.seed(true);
    params = read_params(st);
    j_list = st.integers("j_list", j_list);
    for (auto j : j_list) require(j >= 2 && j <= 6, "j_list entries must lie in [2, 6]");
    require(int_power(params.lambda, static_cast<int>(*std::max_element(j_list.begin(), j_list.end())) + 2) <
                max_modulus,
            "lambda^(j+2) must stay below 2^31");
    samples = static_cast<int>(st.positive("samples", samples));
    factor_band = st.tolerance("factor_band", factor_band);
    factor_fraction = st.tolerance("factor_fraction", factor_fraction);
    slope_tol = st.tolerance("slope_tolerance", slope_tol);
    upper_c = st.tolerance("claim_ii_upper_c", upper_c);
    vdc_kappa = st.tolerance("vdc_kappa", vdc_kappa);
    vdc_multiplier = st.tolerance("vdc_multiplier", vdc_multiplier);
    decay_c = st.tolerance("claim_iii_c", decay_c);
    decay_floor = st.tolerance("decay_floor_fraction", decay_floor);
    blowup_first = static_cast<int>(st.positive("blowup_j_first", blowup_first));
    blowup_last = static_cast<int>(st.positive("blowup_j_last", blowup_last));
    blowup_j_max = static_cast<int>(st.positive("blowup_j_max", blowup_j_max));
    require(blowup_first < blowup_last && blowup_last <= blowup_j_max,
            "blow-up ladder needs j_first < j_last <= j_max");
    require(int_power(params.lambda, blowup_j_max) < max_modulus, "lambda^blowup_j_max must stay below 2^31");
    blowup_tol = st.tolerance("blowup_tolerance", blowup_tol);
  }
};

// One q drawn uniformly from T^j per sample, then one point at that q.
std::vector<sample_point> draw_samples(const claims_settings& c, int j) {
  const auto times = time_set(c.params, j);
  std::mt19937_64 rng(derive_seed(c.seed, "claims", static_cast<std::uint64_t>(j)));
  std::uniform_int_distribution<std::size_t> pick(0, times.size() - 1);
  std::vector<sample_point> out;
  for (int i = 0; i < c.samples; ++i) {
    const auto& t = times[pick(rng)];
    out.push_back(sample_points(c.params, j, t, 1, rng()).front());
  }
  return out;
}

std::vector<section_result> run_claims(const claims_settings& c) {
  std::vector<section_result> out;
  std::map<int, std::vector<sample_point>> samples;
  for (auto j : c.j_list) samples[static_cast<int>(j)] = draw_samples(c, static_cast<int>(j));
  const double log_lambda = std::log(static_cast<double>(c.params.lambda));

  out.push_back(timed("claim_i", [&](section_result& s) {
    std::vector<claim_report> reports(c.j_list.size());
    parallel_for(c.j_list.size(), [&](std::size_t i) {
      const int j = static_cast<int>(c.j_list[i]);
      reports[i] = verify_claim_i(c.params, j, samples[j], int_power(c.params.lambda, j) - 1);
    });
    sweep_table t{"claim_i", {"j", "q", "value", "ratio", "factor_ratio_min", "factor_ratio_max"},
                  {}, 0, 2, std::nullopt, "factor ratio is |sum| / lambda^(j - j alpha/(2(d+1)))"};
    double min_fraction = 1.0;
    for (const auto& r : reports) {
      int inside = 0;
      for (const auto& sm : r.samples) {
        const auto [lo, hi] = std::minmax_element(sm.factor_ratios.begin(), sm.factor_ratios.end());
        if (*lo >= 1.0 / c.factor_band && *hi <= c.factor_band) ++inside;
        t.rows.push_back({static_cast<double>(sm.j), static_cast<double>(sm.x.q), sm.value, sm.ratio,
                          *lo, *hi});
      }
      min_fraction = std::min(min_fraction, static_cast<double>(inside) / r.samples.size());
    }
    const auto x = column(t, 0), y = column(t, 2);
    t.fit = fit_of(x, y, false, true);
    const double target = c.params.delta * log_lambda;
    s.checks.push_back(make_check("claim_i_factor_fraction", min_fraction, ">=", c.factor_fraction,
                                  std::nan(""), "worst j; band [1/8, 8] by default"));
    s.checks.push_back(within("claim_i_slope", t.fit->slope, target, c.slope_tol * target,
                              "slope of ln|S f_j| against j; target delta ln(lambda)"));
    s.sweeps.push_back(std::move(t));
  }));

  out.push_back(timed("claim_ii", [&](section_result& s) {
    struct job {
      int j, k;
    };
    std::vector<job> jobs;
    for (auto j : c.j_list)
      for (int k = 1; k < j; ++k) jobs.push_back({static_cast<int>(j), k});
    std::vector<claim_report> reports(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
      const int j = jobs[i].j;
      reports[i] = verify_claim_ii(c.params, j, jobs[i].k, samples[j], int_power(c.params.lambda, j) - 1);
    });
    const double vdc_bound = c.vdc_multiplier * vdc_first_derivative_bound(c.vdc_kappa);
    sweep_table t{"claim_ii", {"j", "k", "regime", "q", "value", "ratio", "factor_max"}, {}, 1, 4,
                  std::nullopt, "regime 0 upper, 1 middle, 2 van der Corput"};
    double upper_max = std::nan(""), vdc_max = std::nan("");
    std::size_t upper_n = 0, vdc_n = 0, vdc_violations = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const auto regime = classify_claim_ii(c.params, jobs[i].j, jobs[i].k);
      for (const auto& sm : reports[i].samples) {
        const double fmax = *std::max_element(sm.factors.begin(), sm.factors.end());
        if (regime == claim_ii_regime::upper) {
          upper_max = upper_n++ ? std::max(upper_max, sm.ratio) : sm.ratio;
        } else if (regime == claim_ii_regime::van_der_corput) {
          vdc_max = vdc_n++ ? std::max(vdc_max, fmax) : fmax;
          if (!(fmax <= vdc_bound)) ++vdc_violations;
        }
        t.rows.push_back({static_cast<double>(sm.j), static_cast<double>(sm.k),
                          static_cast<double>(static_cast<int>(regime)), static_cast<double>(sm.x.q),
                          sm.value, sm.ratio, fmax});
      }
    }
    // An empty regime leaves the value NaN, which fails the check.
    s.checks.push_back(make_check("claim_ii_upper_ratio", upper_max, "<=", c.upper_c, std::nan(""),
                                  std::to_string(upper_n) + " upper-regime samples"));
    s.checks.push_back(make_check("claim_ii_vdc_violations",
                                  vdc_n ? static_cast<double>(vdc_violations) : std::nan(""), "==",
                                  0.0, std::nan(""),
                                  std::to_string(vdc_n) + " samples, bound " + format_double(vdc_bound) +
                                      ", max factor " + format_double(vdc_max)));
    s.sweeps.push_back(std::move(t));
  }));

  out.push_back(timed("claim_iii", [&](section_result& s) {
    struct job {
      int j, k;
    };
    std::vector<job> jobs;
    for (auto j : c.j_list)
      for (int k = static_cast<int>(j) + 1; k <= j + 2; ++k) jobs.push_back({static_cast<int>(j), k});
    std::vector<claim_report> reports(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
      const int k = jobs[i].k;
      const std::int64_t lo = int_power(c.params.lambda, k - 1);
      const std::int64_t hi = int_power(c.params.lambda, k) - 1;
      reports[i] = verify_claim_iii(c.params, jobs[i].j, k, samples[jobs[i].j], {lo, (lo + hi) / 2, hi});
    });
    sweep_table t{"claim_iii", {"j", "k", "n", "q", "value", "ratio", "factor_ratio_max"}, {}, 1, 4,
                  std::nullopt, "factor ratio is |sum| / lambda^(j(1 - alpha/(2(d+1))))"};
    double factor_max = 0.0;
    double c_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < jobs.size(); ++i)
      for (const auto& sm : reports[i].samples) {
        const double fr = *std::max_element(sm.factor_ratios.begin(), sm.factor_ratios.end());
        factor_max = std::max(factor_max, fr);
        t.rows.push_back({static_cast<double>(sm.j), static_cast<double>(sm.k), static_cast<double>(sm.n),
                          static_cast<double>(sm.x.q), sm.value, sm.ratio, fr});
      }
    std::string fitted;
    for (auto j : c.j_list) {
      std::vector<claim_report> per_j;
      for (std::size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i].j == j) per_j.push_back(reports[i]);
      const auto merged = merge_reports(per_j, c.params);
      const double cj = merged.fit_valid ? -merged.exponent : std::nan("");
      c_min = std::isnan(cj) ? cj : std::min(c_min, cj);
      fitted += (fitted.empty() ? "" : ", ") + ("j=" + std::to_string(j) + ": " + format_double(cj));
    }
    s.checks.push_back(make_check("claim_iii_factor_ratio", factor_max, "<=", c.decay_c));
    s.checks.push_back(make_check("claim_iii_fitted_c", c_min, ">=", c.decay_floor * c.params.s_alpha(),
                                  std::nan(""), "minimum over j; " + fitted));
    s.sweeps.push_back(std::move(t));
  }));

  out.push_back(timed("blowup", [&](section_result& s) {
    const auto ladder = canonical_ladder(c.params, c.blowup_first, c.blowup_last);
    const auto traj = blowup_trajectory(c.params, ladder, c.blowup_j_max);
    sweep_table t{"blowup", {"j", "t", "magnitude", "main", "a1", "a2", "accepted"}, {}, 0, 2,
                  std::nullopt, "accepted: a1 + a2 <= main/2, reported only"};
    double accepted = 0.0;
    for (const auto& b : traj) {
      accepted += b.accepted ? 1.0 : 0.0;
      t.rows.push_back({static_cast<double>(b.j), b.t, b.magnitude, b.main, b.a1, b.a2,
                        b.accepted ? 1.0 : 0.0});
    }
    t.fit = fit_of(column(t, 0), column(t, 2), false, true);
    s.checks.push_back(within("blowup_slope_ratio", t.fit->slope / (c.params.delta * log_lambda), 1.0,
                              c.blowup_tol,
                              "accepted fraction " + format_double(accepted / traj.size())));
    s.sweeps.push_back(std::move(t));
  }));
  return out;
}

// ---------------------------------------------------------------- dimension

struct dimension_settings {
  std::vector<double> covering_alphas{1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0};
  std::int64_t covering_base = 8;
  std::vector<std::int64_t> covering_j{2, 3, 4, 5, 6};
  double covering_tol = 0.05;

  double box_lo = 0.125, box_hi = 0.25;
  double sep_tau = 2.0, sep_beta = 4.0;
  std::vector<std::int64_t> sep_n = powers_of_two(6, 12);
  double sep_tol = 0.2;
  std::int64_t greedy_max_n = 256;

  std::int64_t ideal_lambda = 16;
  int ideal_k = 4;
  std::vector<std::int64_t> ideal_d{1, 2};
  std::vector<double> ideal_tau{2.0, 1.5};
  double ideal_tol = 0.15;

  nested_seed nested;
  int nested_k = 3;
  double constructed_min = 0.8;

  counterexample_params gamma_params;
  std::vector<std::int64_t> gamma_j{3, 4, 5};
  double gamma_band = 4.0;

  explicit dimension_settings(settings& st) {
    st.seed(false);
    covering_alphas = st.reals("covering_alphas", covering_alphas);
    covering_base = st.integer("covering_base", covering_base);
    require(covering_base >= 4 && covering_base % 4 == 0, "covering_base must be a multiple of 4");
    for (double a : covering_alphas) {
      require(a > 0.0 && a <= 1.0, "covering alphas must lie in (0, 1]");
      const double lam = std::pow(static_cast<double>(covering_base), 2.0 / a);
      require(std::abs(lam - std::round(lam)) < 1e-6 * lam && lam < 9e15,
              "covering_base^(2/alpha) must be an integer");
    }
    covering_j = st.integers("covering_j", covering_j);
    covering_tol = st.tolerance("tol_covering", covering_tol);

    box_lo = st.real("separated_box_lo", box_lo);
    box_hi = st.real("separated_box_hi", box_hi);
    require(box_lo < box_hi, "separated box needs lo < hi");
    sep_tau = st.tolerance("separated_tau", sep_tau);
    sep_beta = st.tolerance("separated_beta", sep_beta);
    sep_n = st.integers("separated_n", sep_n);
    require(sep_n.size() >= 2, "separated_n needs two scales");
    sep_tol = st.tolerance("tol_separated", sep_tol);
    greedy_max_n = st.integer("greedy_audit_max_n", greedy_max_n);

    ideal_lambda = st.positive("ideal_lambda", ideal_lambda);
    ideal_k = static_cast<int>(st.positive("ideal_k", ideal_k));
    ideal_d = st.integers("ideal_d", ideal_d);
    ideal_tau = st.reals("ideal_tau", ideal_tau);
    require(ideal_d.size() == ideal_tau.size(), "ideal_d and ideal_tau must have equal length");
    ideal_tol = st.tolerance("tol_ideal", ideal_tol);

    nested.tau = st.tolerance("nested_tau", nested.tau);
    nested.n1 = st.positive("nested_n1", nested.n1);
    nested.growth = st.tolerance("nested_growth", nested.growth);
    nested.n_cap = st.positive("nested_n_cap", nested.n_cap);
    nested.c1 = st.real("nested_c1", nested.c1);
    nested.c2 = st.real("nested_c2", nested.c2);
    require(0.0 < nested.c1 && nested.c1 < nested.c2 && nested.c2 <= 1.0,
            "nested offsets need 0 < c1 < c2 <= 1");
    nested.rule.beta = sep_beta;
    nested_k = static_cast<int>(st.positive("nested_k", nested_k));
    constructed_min = st.tolerance("constructed_min", constructed_min);

    gamma_params.lambda = st.positive("gamma_lambda", gamma_params.lambda);
    gamma_params.kappa = st.real("gamma_kappa", gamma_params.kappa);
    try {
      gamma_params.validate();
    } catch (const std::invalid_argument& e) {
      throw config_error(std::string("invalid gamma parameters: ") + e.what());
    }
    gamma_j = st.integers("gamma_j", gamma_j);
    gamma_band = st.tolerance("gamma_ratio_band", gamma_band);
  }
};

std::string alpha_tag(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", a);
  std::string s = buf;
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

std::vector<section_result> run_dimension(const dimension_settings& ds) {
  std::vector<section_result> out;

  out.push_back(timed("covering", [&](section_result& s) {
    for (double a : ds.covering_alphas) {
      counterexample_params p;
      p.alpha = a;
      p.lambda = static_cast<std::int64_t>(
          std::llround(std::pow(static_cast<double>(ds.covering_base), p.tau())));
      p.kappa = 1.0 / static_cast<double>(ds.covering_base);
      p.delta = std::min(p.delta, p.s_alpha() / 2.0);
      std::vector<std::pair<int, double>> counts;
      sweep_table t{"covering_alpha_" + alpha_tag(a), {"j", "count"}, {}, 0, 1, std::nullopt,
                    "lambda = " + std::to_string(p.lambda)};
      for (auto j : ds.covering_j) {
        const double n = gamma_level_count(p, static_cast<int>(j));
        counts.emplace_back(static_cast<int>(j), n);
        t.rows.push_back({static_cast<double>(j), n});
      }
      const auto fit = covering_exponent(counts, p.lambda);
      fit_line fl;
      fl.slope = fit.exponent * std::log(static_cast<double>(p.lambda));
      fl.residual = fit.residual;
      fl.log_x = false;
      const auto x = column(t, 0), y = column(t, 1);
      fl.intercept = fit_of(x, y, false, true).intercept;
      t.fit = fl;
      s.checks.push_back(within("covering_exponent_alpha_" + alpha_tag(a), fit.exponent, a,
                                ds.covering_tol));
      s.sweeps.push_back(std::move(t));
    }
  }));

  out.push_back(timed("separated", [&](section_result& s) {
    const box c{{ds.box_lo}, {ds.box_hi}};
    const separation_rule rule{ds.sep_beta};
    sweep_table t{"separated", {"n", "count", "candidates", "min_gap", "min_gap_scaled"}, {}, 0, 1,
                  std::nullopt, "min_gap_scaled = min_gap n^(1 + 1/d)"};
    double audit_failures = 0.0, greedy_failures = 0.0, greedy_runs = 0.0;
    for (auto n : ds.sep_n) {
      const auto r = separated_cubes(c, n, ds.sep_tau, rule);
      const auto a = audit_separated(r, c, n, ds.sep_tau, rule);
      if (!(a.anchors_inside && a.cubes_inside && a.anchors_separated && a.gaps_ok && a.exact))
        audit_failures += 1.0;
      if (n <= ds.greedy_max_n) {
        greedy_runs += 1.0;
        if (!is_greedy_maximal(r, c, n, ds.sep_tau, rule)) greedy_failures += 1.0;
      }
      const double nd = static_cast<double>(n);
      t.rows.push_back({nd, static_cast<double>(r.family.size()), static_cast<double>(r.candidates),
                        a.min_gap, a.min_gap * nd * nd});
    }
    t.fit = fit_of(column(t, 0), column(t, 1), true, true);
    s.checks.push_back(within("separated_slope", t.fit->slope, 2.0, ds.sep_tol));
    s.checks.push_back(make_check("separated_audit_failures", audit_failures, "==", 0.0));
    s.checks.push_back(make_check("separated_greedy_failures", greedy_failures, "==", 0.0, std::nan(""),
                                  format_double(greedy_runs) + " scales rescanned"));
    s.sweeps.push_back(std::move(t));
  }));

  out.push_back(timed("cantor_bound", [&](section_result& s) {
    sweep_table ideal{"cantor_ideal", {"d", "tau", "k_levels", "value", "target"}, {}, 2, 3,
                      std::nullopt, "idealized plans m_k = lambda^(d+1), eps_k = lambda^(-k tau)"};
    for (std::size_t i = 0; i < ds.ideal_d.size(); ++i) {
      const int d = static_cast<int>(ds.ideal_d[i]);
      const double tau = ds.ideal_tau[i];
      const double target = (d + 1) / tau;
      double value = 0.0;
      for (int k = 2; k <= ds.ideal_k; ++k) {
        value = cantor_lower_bound(idealized_plan(d, tau, ds.ideal_lambda, k));
        ideal.rows.push_back({static_cast<double>(d), tau, static_cast<double>(k), value, target});
      }
      s.checks.push_back(within("ideal_plan_d" + std::to_string(d) + "_tau_" + alpha_tag(tau), value,
                                target, ds.ideal_tol * target));
    }
    const auto nested = build_nested_levels(ds.nested, ds.nested_k);
    const double constructed = cantor_lower_bound(nested.plan);
    sweep_table plan{"nested_plan", {"k", "n", "m", "eps", "cubes"}, {}, 0, 2, std::nullopt,
                     "constructed plan, d = 1"};
    for (std::size_t k = 0; k < nested.plan.n.size(); ++k)
      plan.rows.push_back({static_cast<double>(k + 1), static_cast<double>(nested.plan.n[k]),
                           nested.plan.m[k], nested.plan.eps[k],
                           static_cast<double>(nested.levels[k].size())});
    s.checks.push_back(make_check("nested_containment", nested.nesting_ok ? 1.0 : 0.0, "==", 1.0));
    s.checks.push_back(make_check("constructed_plan_bound", constructed, ">=", ds.constructed_min));
    s.sweeps.push_back(std::move(ideal));
    s.sweeps.push_back(std::move(plan));
  }));

  out.push_back(timed("gamma_measure", [&](section_result& s) {
    sweep_table t{"gamma_measure", {"j", "value", "disjoint", "total", "side"}, {}, 0, 1,
                  std::nullopt, "alpha = d, lower bound from disjoint cubes"};
    std::vector<double> values;
    for (auto j : ds.gamma_j) {
      const auto g = gamma_measure_lower_bound(ds.gamma_params, static_cast<int>(j));
      values.push_back(g.value);
      t.rows.push_back({static_cast<double>(j), g.value, static_cast<double>(g.disjoint),
                        static_cast<double>(g.total), g.side});
    }
    double spread = 1.0;
    for (std::size_t i = 1; i < values.size(); ++i) {
      const double r = values[i] / values[i - 1];
      spread = std::max({spread, r, 1.0 / r});
    }
    s.checks.push_back(make_check("gamma_positive", *std::min_element(values.begin(), values.end()), ">", 0.0));
    s.checks.push_back(make_check("gamma_ratio_spread", spread, "<=", ds.gamma_band, std::nan(""),
                                  "max over consecutive j of max(r, 1/r)"));
    s.sweeps.push_back(std::move(t));
  }));
  return out;
}

// ---------------------------------------------------------------- maximal

struct maximal_settings {
  double cantor_ratio = 1.0 / 3.0;
  int conv_level = 12;
  std::vector<std::int64_t> conv_n = powers_of_two(6, 13);
  bool conv_maximal = false;
  double conv_tol = 0.08;

  std::vector<std::int64_t> l1_n = powers_of_two(4, 16);
  double l1_band = 2.0;

  int sweep_level = 10;
  std::vector<std::int64_t> sweep_n = powers_of_two(5, 9);
  double band = 2.0;
  double p = 6.0;
  double s_margin = 0.05;
  time_plan plan;
  double carleson_s = 0.3;
  double carleson_alpha = 0.63;
  double carleson_t = 1.0 / std::numbers::sqrt2;
  double carleson_eps = 0.05;
  double inadmissible_alpha = 0.3;

  explicit maximal_settings(settings& st) {
    st.seed(false);
    cantor_ratio = st.real("cantor_ratio", cantor_ratio);
    require(cantor_ratio > 0.0 && cantor_ratio < 0.5, "cantor_ratio must lie in (0, 1/2)");
    conv_level = static_cast<int>(st.positive("convolution_level", conv_level));
    conv_n = st.integers("convolution_n", conv_n);
    for (auto n : conv_n) require(n >= 3, "convolution_n entries must be at least 3");
    conv_maximal = st.flag("convolution_maximal", conv_maximal);
    conv_tol = st.tolerance("tol_convolution", conv_tol);
    l1_n = st.integers("kernel_l1_n", l1_n);
    for (auto n : l1_n) require(n >= 2, "kernel_l1_n entries must be at least 2");
    l1_band = st.tolerance("kernel_l1_band", l1_band);
    sweep_level = static_cast<int>(st.positive("sweep_level", sweep_level));
    sweep_n = st.integers("sweep_n", sweep_n);
    band = st.tolerance("sweep_band", band);
    p = st.tolerance("transference_p", p);
    s_margin = st.tolerance("transference_s_margin", s_margin);
    plan.q_min = st.positive("plan_q_min", plan.q_min);
    plan.q_max = st.positive("plan_q_max", plan.q_max);
    plan.uniform = static_cast<int>(st.integer("plan_uniform", plan.uniform));
    require(plan.q_min <= plan.q_max && plan.uniform >= 0, "invalid time plan");
    carleson_s = st.tolerance("carleson_s", carleson_s);
    carleson_alpha = st.tolerance("carleson_alpha", carleson_alpha);
    carleson_t = st.real("carleson_t", carleson_t);
    carleson_eps = st.tolerance("carleson_eps", carleson_eps);
    inadmissible_alpha = st.tolerance("inadmissible_alpha", inadmissible_alpha);
  }
};

fourier_data dirichlet_datum(std::int64_t n) {
  std::map<lattice_point, cplx> coef;
  for (std::int64_t k = -n; k <= n; ++k) coef[{k}] = 1.0;
  return fourier_data(1, coef);
}

std::vector<section_result> run_maximal(const maximal_settings& m) {
  std::vector<section_result> out;
  const double dim = std::log(2.0) / std::log(1.0 / m.cantor_ratio);

  out.push_back(timed("convolution", [&](section_result& s) {
    const auto mu = cantor_measure(1, m.cantor_ratio, m.conv_level);
    sweep_table t{"convolution", {"n", "sup", "grid", "argmax"}, {}, 0, 1, std::nullopt,
                  std::string(m.conv_maximal ? "maximal" : "plain") +
                      " kernel, coarsest grid with spacing <= 1/(10N)"};
    for (auto n : m.conv_n) {
      const auto r = convolve_dirichlet_sup(mu, n, m.conv_maximal);
      t.rows.push_back({static_cast<double>(n), r.value, static_cast<double>(r.grid), r.argmax.at(0)});
    }
    const auto x = column(t, 0), y = column(t, 1);
    t.fit = fit_of(x, y, true, true, true);
    const double plain = fit_of(x, y, true, true).slope;
    s.checks.push_back(within("convolution_polylog_slope", t.fit->slope, 1.0 - dim, m.conv_tol,
                              "uncorrected slope " + format_double(plain)));
    s.sweeps.push_back(std::move(t));
  }));

  out.push_back(timed("kernel_l1", [&](section_result& s) {
    std::vector<quadrature_result> plain(m.l1_n.size()), maximal(m.l1_n.size());
    parallel_for(m.l1_n.size() * 2, [&](std::size_t i) {
      const std::size_t k = i / 2;
      if (i % 2)
        maximal[k] = dirichlet_l1(m.l1_n[k], true);
      else
        plain[k] = dirichlet_l1(m.l1_n[k], false);
    });
    double below = 0.0;
    for (int variant = 0; variant < 2; ++variant) {
      const auto& res = variant ? maximal : plain;
      const std::string name = variant ? "kernel_l1_maximal" : "kernel_l1_plain";
      sweep_table t{name, {"n", "value", "error_estimate", "value_over_log"}, {}, 0, 1, std::nullopt,
                    variant ? "integral of sup_{M<=N} |D_M|" : "integral of |D_N|"};
      std::vector<double> ratios;
      for (std::size_t k = 0; k < res.size(); ++k) {
        const double nd = static_cast<double>(m.l1_n[k]);
        ratios.push_back(res[k].value / std::log(nd));
        t.rows.push_back({nd, res[k].value, res[k].error_estimate, ratios.back()});
        if (variant && maximal[k].value < plain[k].value) below += 1.0;
      }
      const auto x = column(t, 0), y = column(t, 1);
      t.fit = fit_of(x, y, true, true, true);
      const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
      s.checks.push_back(make_check(name + "_band", *hi / *lo, "<=", m.l1_band, std::nan(""),
                                    "max/min of value/ln N"));
      s.sweeps.push_back(std::move(t));
    }
    s.checks.push_back(make_check("kernel_l1_dominance_failures", below, "==", 0.0));
  }));

  out.push_back(timed("transference_carleson", [&](section_result& s) {
    const auto mu = cantor_measure(1, m.cantor_ratio, m.sweep_level);
    const auto radii = geometric_radii(1.0 / m.cantor_ratio, 1, m.sweep_level);
    const double s_val = (1.0 - dim) / m.p + 1.0 / 3.0 + m.s_margin;
    std::vector<std::int64_t> ns = m.sweep_n;
    std::vector<transference_result> tr(ns.size());
    std::vector<carleson_result> cr(ns.size());
    parallel_for(ns.size() * 2, [&](std::size_t i) {
      const std::size_t k = i / 2;
      const auto f = dirichlet_datum(ns[k]);
      if (i % 2) {
        std::vector<std::int64_t> trunc(static_cast<std::size_t>(ns[k]));
        std::iota(trunc.begin(), trunc.end(), std::int64_t{1});
        cr[k] = carleson_l2_ratio(f, mu, m.carleson_s, m.carleson_alpha, trunc, m.carleson_t, radii,
                                  m.carleson_eps);
      } else {
        tr[k] = transference_ratio(f, mu, m.p, s_val, dim, m.plan, radii);
      }
    });
    sweep_table tt{"transference", {"n", "ratio", "numerator", "frostman", "sobolev"}, {}, 0, 1,
                   std::nullopt, "p = " + format_double(m.p) + ", s = " + format_double(s_val) +
                                     ", times " + m.plan.describe()};
    sweep_table ct{"carleson", {"n", "ratio", "numerator", "frostman", "l2"}, {}, 0, 1, std::nullopt,
                   "s = " + format_double(m.carleson_s) + ", alpha = " + format_double(m.carleson_alpha) +
                       ", t = " + format_double(m.carleson_t)};
    std::vector<double> trr, crr;
    for (std::size_t k = 0; k < ns.size(); ++k) {
      const double nd = static_cast<double>(ns[k]);
      tt.rows.push_back({nd, tr[k].ratio, tr[k].numerator, tr[k].frostman, tr[k].sobolev});
      ct.rows.push_back({nd, cr[k].ratio, cr[k].numerator, cr[k].frostman, cr[k].l2});
      trr.push_back(tr[k].ratio);
      crr.push_back(cr[k].ratio);
    }
    s.checks.push_back(make_check("transference_max_over_median", max_of(trr) / median(trr), "<=", m.band));
    s.checks.push_back(make_check("carleson_max_over_median", max_of(crr) / median(crr), "<=", m.band));
    double rejected = 0.0;
    try {
      carleson_l2_ratio(dirichlet_datum(ns.front()), mu, m.carleson_s, m.inadmissible_alpha, {1},
                        m.carleson_t, radii, m.carleson_eps);
    } catch (const std::invalid_argument&) {
      rejected = 1.0;
    }
    s.checks.push_back(make_check("inadmissible_rejected", rejected, "==", 1.0, std::nan(""),
                                  "alpha = " + format_double(m.inadmissible_alpha) +
                                      " <= d - 2s"));
    s.sweeps.push_back(std::move(tt));
    s.sweeps.push_back(std::move(ct));
  }));
  return out;
}

}  // namespace

run_report run_experiment(const std::string& id, const experiment_config& cfg) {
  const auto& ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end())
    throw config_error("unknown experiment id '" + id + "'");
  settings st(cfg);
  const std::string declared = st.text("experiment", id);
  if (declared != id)
    throw config_error("config declares experiment '" + declared + "' but '" + id + "' was requested");

  run_report report;
  report.experiment = id;
  report.record_wall_time = st.flag("report_wall_time", false);

  // Every key is read and validated here, before any computation starts.
  std::function<std::vector<section_result>()> body;
  if (id == "gauss") {
    auto g = std::make_shared<gauss_settings>(st);
    report.seed = g->seed;
    body = [g] {
      return std::vector<section_result>{gauss_closed_form(*g), perturbed_gauss_section(*g),
                                         abel_section(*g)};
    };
  } else if (id == "evolve") {
    auto e = std::make_shared<evolve_settings>(st);
    report.seed = e->seed;
    body = [e] { return std::vector<section_result>{fast_vs_direct(*e)}; };
  } else if (id == "claims") {
    auto c = std::make_shared<claims_settings>(st);
    report.seed = c->seed;
    body = [c] { return run_claims(*c); };
  } else if (id == "dimension") {
    auto d = std::make_shared<dimension_settings>(st);
    body = [d] { return run_dimension(*d); };
  } else {
    auto m = std::make_shared<maximal_settings>(st);
    body = [m] { return run_maximal(*m); };
  }
  const auto unused = cfg.unused_keys();
  if (!unused.empty()) {
    std::string list;
    for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
    throw config_error("unknown config keys for '" + id + "': " + list);
  }
  report.config = st.echo();

  const auto start = std::chrono::steady_clock::now();
  report.sections = body();
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace talbot
