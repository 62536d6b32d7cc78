#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "talbot/fit.hpp"
#include "talbot/schrodinger.hpp"

namespace talbot {

struct counterexample_params {
  int d = 1;
  double alpha = 1.0;
  std::int64_t lambda = 16;
  double delta = 0.05;
  double kappa = 0.25;
  double c1 = 1.0 / 200.0;
  double c2 = 1.0 / 100.0;

  double s_alpha() const;
  double tau() const;
  // lambda^{-k(s_alpha + d/2 - delta)}
  double amplitude(int k) const;
  // Throws std::invalid_argument naming the first violated condition.
  void validate() const;
  // lambda^{1/tau} <= 1/kappa - 1; stricter than the window-touching condition
  // enforced by validate(), reported for information.
  bool strict_window_overlap() const;
};

std::int64_t int_power(std::int64_t base, int e);

fourier_data datum_block(const counterexample_params& params, int j);

// Admissible q range [ceil(kappa Q), floor(Q)], Q = lambda^{j/tau}, before the
// divisibility filter.
std::pair<std::int64_t, std::int64_t> q_window(const counterexample_params& params, int j);
std::vector<rational_time> time_set(const counterexample_params& params, int j);

// Even integers in [q/4, q/2].
std::vector<std::int64_t> anchor_window(std::int64_t q);

std::vector<sample_point> sample_points(const counterexample_params& params, int j,
                                        const rational_time& t, std::size_t count,
                                        std::uint64_t seed);

// S_N(2 pi/q) f_k at x for the amplitude-weighted block k, via the block
// decomposition; zero when n < lambda^{k-1}.
cplx block_value(const counterexample_params& params, int k, std::int64_t n,
                 const sample_point& x);

struct claim_sample {
  int j = 0;
  int k = 0;
  std::int64_t n = 0;
  sample_point x;
  double value = 0.0;  // |S_N(t) f_k(x)|
  double ratio = 0.0;
  std::vector<double> factors;        // per-coordinate |sum|
  std::vector<double> factor_ratios;  // factors over the claim's scale
  double extended_ratio = 0.0;        // claim (ii) upper regime only
  double coherence = 0.0;             // max_l R q |eps_l|, R the last block index
  std::string regime;
  bool boundary_only = false;
};

struct claim_report {
  std::string claim;
  std::vector<claim_sample> samples;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double ratio_geomean = 0.0;
  linear_fit fit;          // ln(value) against j (claim i) or k (claims ii, iii)
  bool fit_valid = false;  // needs two distinct abscissae
  double exponent = 0.0;   // fit slope / ln(lambda)
  double c = 0.0;          // decay constant used in the ratios
};

// Recomputes summary and fit after samples are appended or merged.
void summarize(claim_report& report, const counterexample_params& params);
claim_report merge_reports(const std::vector<claim_report>& reports,
                           const counterexample_params& params);

claim_report verify_claim_i(const counterexample_params& params, int j,
                            const std::vector<sample_point>& samples, std::int64_t n);

enum class claim_ii_regime { upper, middle, van_der_corput };
claim_ii_regime classify_claim_ii(const counterexample_params& params, int j, int k);
std::string regime_name(claim_ii_regime r);
// min(a~/2, s_alpha/2) with a~ = a alpha d / (2(d+1)),
// a = (1 - alpha/(d+1) - delta) / (alpha/(d+1) + delta).
double claim_ii_decay_constant(const counterexample_params& params);

claim_report verify_claim_ii(const counterexample_params& params, int j, int k,
                             const std::vector<sample_point>& samples, std::int64_t n);

claim_report verify_claim_iii(const counterexample_params& params, int j, int k,
                              const std::vector<sample_point>& samples,
                              const std::vector<std::int64_t>& n_list, double c = -1.0);

struct ladder_point {
  int j = 0;
  sample_point x;
};

// q = largest multiple of 4 not above lambda^{j/tau}, p = q/2 in every
// coordinate, eps = c1 lambda^{-j}.
std::vector<ladder_point> canonical_ladder(const counterexample_params& params, int j_first,
                                           int j_last);

struct blowup_point {
  int j = 0;
  double t = 0.0;
  double magnitude = 0.0;  // |S(t_j) f| for the truncated datum
  double main = 0.0;       // |S(t_j) f_j|
  double a1 = 0.0;         // |sum_{k<j} S(t_j) f_k|
  double a2 = 0.0;         // |sum_{k>j} S(t_j) f_k|
  bool accepted = false;   // a1 + a2 <= main / 2
};

std::vector<blowup_point> blowup_trajectory(const counterexample_params& params,
                                            const std::vector<ladder_point>& ladder,
                                            int j_max);

}  // namespace talbot
