#include "talbot/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace talbot {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr std::size_t max_block_coefficients = std::size_t{1} << 24;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double lambda_pow(const counterexample_params& params, double e) {
  return std::pow(static_cast<double>(params.lambda), e);
}

void check_samples(const counterexample_params& params, const std::vector<sample_point>& samples) {
  for (const auto& x : samples)
    if (x.dimension() != params.d || x.eps.size() != x.p.size())
      throw std::invalid_argument("sample dimension does not match d");
}

claim_sample make_sample(int j, int k, std::int64_t n, const sample_point& x) {
  claim_sample s;
  s.j = j;
  s.k = k;
  s.n = n;
  s.x = x;
  return s;
}

// Fills value, factors and coherence for block k truncated at n.
void evaluate_block(const counterexample_params& params, claim_sample& s) {
  const std::int64_t lo = int_power(params.lambda, s.k - 1);
  const std::int64_t hi = int_power(params.lambda, s.k) - 1;
  s.factors.clear();
  if (s.n < lo) {
    s.factors.assign(static_cast<std::size_t>(params.d), 0.0);
    s.value = 0.0;
    return;
  }
  const std::int64_t top = std::min(s.n, hi);
  double product = params.amplitude(s.k);
  for (int l = 0; l < params.d; ++l) {
    const block_terms b = block_factor(lo, top, s.x.q, s.x.p[l], s.x.eps[l]);
    s.boundary_only = s.boundary_only || b.degenerate;
    const double mag = std::abs(b.total);
    s.factors.push_back(mag);
    product *= mag;
    const double window = static_cast<double>(std::max(b.block_right, b.block_left)) *
                          static_cast<double>(s.x.q) * std::abs(s.x.eps[l]);
    s.coherence = std::max(s.coherence, window);
  }
  s.value = product;
}

}  // namespace

double counterexample_params::s_alpha() const {
  return d * (d + 1 - alpha) / (2.0 * (d + 1));
}

double counterexample_params::tau() const { return (d + 1) / alpha; }

double counterexample_params::amplitude(int k) const {
  return std::pow(static_cast<double>(lambda), -k * (s_alpha() + d / 2.0 - delta));
}

void counterexample_params::validate() const {
  if (d < 1) throw std::invalid_argument("d must be at least 1");
  if (!(alpha > 0.0) || alpha > d) throw std::invalid_argument("alpha must lie in (0, d]");
  if (lambda < 2) throw std::invalid_argument("lambda must be an integer >= 2");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (!(delta < s_alpha())) throw std::invalid_argument("delta must be below s_alpha");
  if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must lie in (0, 1)");
  if (!(c1 > 0.0 && c1 < c2 && c2 <= 1.0))
    throw std::invalid_argument("offset window needs 0 < c1 < c2 <= 1");
  if (std::pow(static_cast<double>(lambda), 1.0 / tau()) > 1.0 / kappa + 1e-12)
    throw std::invalid_argument(
        "window-overlap condition lambda^{1/tau} <= 1/kappa violated: consecutive time "
        "windows leave gaps");
}

bool counterexample_params::strict_window_overlap() const {
  return std::pow(static_cast<double>(lambda), 1.0 / tau()) <= 1.0 / kappa - 1.0 + 1e-12;
}

std::int64_t int_power(std::int64_t base, int e) {
  if (e < 0) throw std::invalid_argument("negative exponent");
  std::int64_t v = 1;
  for (int i = 0; i < e; ++i) {
    if (v > max_modulus / base)
      throw std::out_of_range("lambda^" + std::to_string(e) + " exceeds the 2^31 limit");
    v *= base;
  }
  return v;
}

fourier_data datum_block(const counterexample_params& params, int j) {
  params.validate();
  if (j < 1) throw std::invalid_argument("block index j must be at least 1");
  const std::int64_t lo = int_power(params.lambda, j - 1);
  const std::int64_t hi = int_power(params.lambda, j) - 1;
  const auto width = static_cast<std::size_t>(hi - lo + 1);
  std::size_t count = 1;
  for (int l = 0; l < params.d; ++l) {
    if (count > max_block_coefficients / width)
      throw std::out_of_range("datum block has more than 2^24 coefficients");
    count *= width;
  }
  const cplx amp{params.amplitude(j), 0.0};
  std::map<lattice_point, cplx> coeffs;
  lattice_point k(static_cast<std::size_t>(params.d), lo);
  for (std::size_t i = 0; i < count; ++i) {
    coeffs.emplace_hint(coeffs.end(), k, amp);
    for (int l = params.d - 1; l >= 0; --l) {
      if (++k[l] <= hi) break;
      k[l] = lo;
    }
  }
  return fourier_data(params.d, coeffs);
}

std::pair<std::int64_t, std::int64_t> q_window(const counterexample_params& params, int j) {
  const double top = lambda_pow(params, j / params.tau());
  const auto lo = static_cast<std::int64_t>(std::ceil(params.kappa * top - 1e-9));
  const auto hi = static_cast<std::int64_t>(std::floor(top + 1e-9));
  return {std::max<std::int64_t>(lo, 1), hi};
}

std::vector<rational_time> time_set(const counterexample_params& params, int j) {
  params.validate();
  const auto [lo, hi] = q_window(params, j);
  std::vector<rational_time> out;
  for (std::int64_t q = (lo + 3) / 4 * 4; q <= hi; q += 4) out.push_back({q});
  if (out.empty())
    throw std::domain_error("time window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "] for j=" + std::to_string(j) +
                            " holds no multiple of 4 (window-overlap condition "
                            "lambda^{1/tau} <= 1/kappa)");
  return out;
}

std::vector<std::int64_t> anchor_window(std::int64_t q) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = (q + 3) / 4; 2 * p <= q; ++p)
    if (p % 2 == 0) out.push_back(p);
  return out;
}

std::vector<sample_point> sample_points(const counterexample_params& params, int j,
                                        const rational_time& t, std::size_t count,
                                        std::uint64_t seed) {
  params.validate();
  const auto anchors = anchor_window(t.q);
  if (anchors.empty())
    throw std::invalid_argument("no even integer in [q/4, q/2] for q=" + std::to_string(t.q));
  std::mt19937_64 rng(seed);
  const double scale = lambda_pow(params, -j);
  std::vector<sample_point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    sample_point x;
    x.q = t.q;
    for (int l = 0; l < params.d; ++l) {
      x.p.push_back(anchors[rng() % anchors.size()]);
      const double u = uniform01(rng);
      x.eps.push_back((params.c1 + (params.c2 - params.c1) * u) * scale);
    }
    out.push_back(std::move(x));
  }
  return out;
}

cplx block_value(const counterexample_params& params, int k, std::int64_t n,
                 const sample_point& x) {
  const std::int64_t lo = int_power(params.lambda, k - 1);
  const std::int64_t hi = int_power(params.lambda, k) - 1;
  if (n < lo) return {0.0, 0.0};
  cplx v{params.amplitude(k), 0.0};
  for (int l = 0; l < params.d; ++l)
    v *= block_factor(lo, std::min(n, hi), x.q, x.p[l], x.eps[l]).total;
  return v;
}

void summarize(claim_report& report, const counterexample_params& params) {
  report.ratio_min = report.ratio_max = report.ratio_geomean = 0.0;
  report.fit = {};
  report.fit_valid = false;
  report.exponent = 0.0;
  if (report.samples.empty()) return;
  double log_sum = 0.0;
  report.ratio_min = report.samples.front().ratio;
  report.ratio_max = report.samples.front().ratio;
  std::vector<double> xs, ys;
  std::set<int> distinct;
  for (const auto& s : report.samples) {
    report.ratio_min = std::min(report.ratio_min, s.ratio);
    report.ratio_max = std::max(report.ratio_max, s.ratio);
    if (s.ratio > 0.0) log_sum += std::log(s.ratio);
    if (s.value > 0.0) {
      const int abscissa = report.claim == "i" ? s.j : s.k;
      xs.push_back(abscissa);
      ys.push_back(std::log(s.value));
      distinct.insert(abscissa);
    }
  }
  report.ratio_geomean = std::exp(log_sum / static_cast<double>(report.samples.size()));
  if (distinct.size() >= 2) {
    report.fit = least_squares(xs, ys);
    report.fit_valid = true;
    report.exponent = report.fit.slope / std::log(static_cast<double>(params.lambda));
  }
}

claim_report merge_reports(const std::vector<claim_report>& reports,
                           const counterexample_params& params) {
  claim_report out;
  if (reports.empty()) return out;
  out.claim = reports.front().claim;
  out.c = reports.front().c;
  for (const auto& r : reports) {
    if (r.claim != out.claim) throw std::invalid_argument("cannot merge reports of different claims");
    out.samples.insert(out.samples.end(), r.samples.begin(), r.samples.end());
  }
  summarize(out, params);
  return out;
}

claim_report verify_claim_i(const counterexample_params& params, int j,
                            const std::vector<sample_point>& samples, std::int64_t n) {
  params.validate();
  check_samples(params, samples);
  const std::int64_t hi = int_power(params.lambda, j) - 1;
  if (n < hi) throw std::invalid_argument("claim (i) needs N >= lambda^j - 1");
  const double target = lambda_pow(params, j * params.delta);
  const double scale = lambda_pow(params, j - j * params.alpha / (2.0 * (params.d + 1)));
  claim_report report;
  report.claim = "i";
  for (const auto& x : samples) {
    claim_sample s = make_sample(j, j, n, x);
    evaluate_block(params, s);
    s.ratio = s.value / target;
    for (double f : s.factors) s.factor_ratios.push_back(f / scale);
    s.regime = s.boundary_only ? "boundary-only" : "complete";
    report.samples.push_back(std::move(s));
  }
  summarize(report, params);
  return report;
}

claim_ii_regime classify_claim_ii(const counterexample_params& params, int j, int k) {
  const double base = params.alpha / (params.d + 1);
  if (k >= j * (base + params.delta) - 1e-12) return claim_ii_regime::upper;
  if (k <= j * (base - params.delta) + 1e-12) return claim_ii_regime::van_der_corput;
  return claim_ii_regime::middle;
}

std::string regime_name(claim_ii_regime r) {
  switch (r) {
    case claim_ii_regime::upper:
      return "upper";
    case claim_ii_regime::middle:
      return "middle";
    default:
      return "van-der-corput";
  }
}

double claim_ii_decay_constant(const counterexample_params& params) {
  const double base = params.alpha / (params.d + 1);
  const double a = (1.0 - base - params.delta) / (base + params.delta);
  const double a_tilde = a * params.alpha * params.d / (2.0 * (params.d + 1));
  return std::min(a_tilde / 2.0, params.s_alpha() / 2.0);
}

claim_report verify_claim_ii(const counterexample_params& params, int j, int k,
                             const std::vector<sample_point>& samples, std::int64_t n) {
  params.validate();
  check_samples(params, samples);
  if (k < 1 || k >= j)
    throw std::out_of_range("claim (ii) needs 1 <= k < j, got k=" + std::to_string(k) +
                            ", j=" + std::to_string(j));
  if (n < int_power(params.lambda, j) - 1)
    throw std::invalid_argument("claim (ii) needs N >= lambda^j - 1");
  const claim_ii_regime regime = classify_claim_ii(params, j, k);
  const double c = claim_ii_decay_constant(params);
  const double ext_exp = k * params.delta -
                         (j - k) * params.d * params.alpha / (2.0 * (params.d + 1));
  claim_report report;
  report.claim = "ii";
  report.c = c;
  for (const auto& x : samples) {
    claim_sample s = make_sample(j, k, n, x);
    evaluate_block(params, s);
    s.regime = regime_name(regime);
    if (regime == claim_ii_regime::upper) {
      s.ratio = s.value / lambda_pow(params, k * params.delta);
      s.extended_ratio = s.value / lambda_pow(params, ext_exp);
    } else {
      s.ratio = s.value * lambda_pow(params, c * k);
    }
    // Per-coordinate sums are O(1) in the first-derivative regime; elsewhere
    // they are compared with the second-derivative scale lambda^k / sqrt(q).
    const double scale = regime == claim_ii_regime::van_der_corput
                             ? 1.0
                             : lambda_pow(params, k) / std::sqrt(static_cast<double>(x.q)) +
                                   std::sqrt(static_cast<double>(x.q));
    for (double f : s.factors) s.factor_ratios.push_back(f / scale);
    report.samples.push_back(std::move(s));
  }
  summarize(report, params);
  return report;
}

claim_report verify_claim_iii(const counterexample_params& params, int j, int k,
                              const std::vector<sample_point>& samples,
                              const std::vector<std::int64_t>& n_list, double c) {
  params.validate();
  check_samples(params, samples);
  if (k <= j) throw std::out_of_range("claim (iii) needs k > j");
  const std::int64_t lo = int_power(params.lambda, k - 1);
  const std::int64_t hi = int_power(params.lambda, k) - 1;
  for (auto n : n_list)
    if (n < lo || n > hi) throw std::out_of_range("claim (iii) needs N in [lambda^{k-1}, lambda^k)");
  const double floor_eps = params.c1 * lambda_pow(params, -j) * (1.0 - 1e-12);
  for (const auto& x : samples)
    for (double e : x.eps)
      if (e < floor_eps)
        throw std::invalid_argument("claim (iii) needs eps >= c1 lambda^{-j} in every coordinate");
  if (c < 0.0) c = params.s_alpha() / 2.0;
  const double target = lambda_pow(params, j * params.delta - c * (k - j));
  const double scale = lambda_pow(params, j * (1.0 - params.alpha / (2.0 * (params.d + 1))));
  claim_report report;
  report.claim = "iii";
  report.c = c;
  for (const auto& x : samples) {
    for (auto n : n_list) {
      claim_sample s = make_sample(j, k, n, x);
      evaluate_block(params, s);
      s.ratio = s.value / target;
      for (double f : s.factors) s.factor_ratios.push_back(f / scale);
      s.regime = "decay";
      report.samples.push_back(std::move(s));
    }
  }
  summarize(report, params);
  return report;
}

std::vector<ladder_point> canonical_ladder(const counterexample_params& params, int j_first,
                                           int j_last) {
  params.validate();
  std::vector<ladder_point> out;
  for (int j = j_first; j <= j_last; ++j) {
    const auto times = time_set(params, j);
    ladder_point lp;
    lp.j = j;
    lp.x.q = times.back().q;
    lp.x.p.assign(static_cast<std::size_t>(params.d), lp.x.q / 2);
    lp.x.eps.assign(static_cast<std::size_t>(params.d), params.c1 * lambda_pow(params, -j));
    out.push_back(std::move(lp));
  }
  return out;
}

std::vector<blowup_point> blowup_trajectory(const counterexample_params& params,
                                            const std::vector<ladder_point>& ladder,
                                            int j_max) {
  params.validate();
  const std::int64_t n = int_power(params.lambda, j_max) - 1;
  std::vector<blowup_point> out;
  for (const auto& lp : ladder) {
    if (lp.j < 1 || lp.j > j_max) throw std::out_of_range("ladder level outside [1, j_max]");
    if (lp.x.dimension() != params.d) throw std::invalid_argument("ladder point dimension differs");
    cplx main{}, a1{}, a2{};
    for (int k = 1; k <= j_max; ++k) {
      const cplx v = block_value(params, k, n, lp.x);
      if (k < lp.j)
        a1 += v;
      else if (k == lp.j)
        main = v;
      else
        a2 += v;
    }
    blowup_point b;
    b.j = lp.j;
    b.t = two_pi / static_cast<double>(lp.x.q);
    b.magnitude = std::abs(main + a1 + a2);
    b.main = std::abs(main);
    b.a1 = std::abs(a1);
    b.a2 = std::abs(a2);
    b.accepted = b.a1 + b.a2 <= 0.5 * b.main;
    out.push_back(b);
  }
  return out;
}

}  // namespace talbot
