#include <cmath>
#include <set>

#include "doctest.h"
#include "talbot/counterexample.hpp"

using namespace talbot;
using doctest::Approx;

TEST_CASE("default parameters") {
  counterexample_params p;
  CHECK_NOTHROW(p.validate());
  CHECK(p.tau() == Approx(2.0));
  CHECK(p.s_alpha() == Approx(0.25));
  CHECK_FALSE(p.strict_window_overlap());
  counterexample_params bad = p;
  bad.delta = 0.3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.kappa = 0.5;  // lambda^{1/tau} = 4 > 2
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("datum blocks") {
  counterexample_params p;
  p.lambda = 2;
  p.kappa = 0.5;
  p.alpha = 1.0;
  const auto b = datum_block(p, 1);
  REQUIRE(b.size() == 1);
  CHECK(b.mode(0)[0] == 1);
  CHECK(std::abs(b.coefficient(0)) == Approx(std::pow(2.0, -(p.s_alpha() + 0.5 - p.delta))));

  counterexample_params q;
  const auto b2 = datum_block(q, 2);
  CHECK(b2.size() == 240);
  CHECK(b2.mode(0)[0] == 16);
  CHECK(b2.mode(239)[0] == 255);

  for (int d : {1, 2}) {
    counterexample_params r;
    r.d = d;
    r.alpha = d == 1 ? 1.0 : 1.5;
    r.lambda = 4;
    r.kappa = 0.5;
    r.delta = 0.01;
    for (int j = 1; j <= 3; ++j)
      CHECK(datum_block(r, j).size() ==
            static_cast<std::size_t>(std::pow(std::pow(4, j) - std::pow(4, j - 1), d)));
  }
}

TEST_CASE("time sets") {
  counterexample_params p;
  const auto t = time_set(p, 2);
  std::vector<std::int64_t> qs;
  for (const auto& x : t) qs.push_back(x.q);
  CHECK(qs == std::vector<std::int64_t>{4, 8, 12, 16});
  for (int j = 1; j <= 6; ++j)
    for (const auto& x : time_set(p, j)) CHECK(x.q % 4 == 0);

  counterexample_params narrow;
  narrow.lambda = 49;
  narrow.kappa = 5.0 / 7.0;  // window [5, 7]
  CHECK_THROWS(time_set(narrow, 1));
}

TEST_CASE("sample points") {
  counterexample_params p;
  p.d = 2;
  p.alpha = 1.5;
  p.lambda = 8;
  p.kappa = 0.25;
  const auto pts = sample_points(p, 2, rational_time{8}, 200, 42);
  std::set<std::int64_t> seen;
  const double lo = p.c1 * std::pow(8.0, -2), hi = p.c2 * std::pow(8.0, -2);
  for (const auto& x : pts) {
    CHECK(x.q == 8);
    for (auto v : x.p) seen.insert(v);
    for (double e : x.eps) {
      CHECK(e >= lo * (1 - 1e-12));
      CHECK(e <= hi * (1 + 1e-12));
    }
  }
  CHECK(seen == std::set<std::int64_t>{2, 4});
  const auto again = sample_points(p, 2, rational_time{8}, 200, 42);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].p == again[i].p);
    CHECK(pts[i].eps == again[i].eps);
  }
  CHECK(anchor_window(4) == std::vector<std::int64_t>{2});
}

namespace {

std::vector<sample_point> samples_for(const counterexample_params& p, int j, std::uint64_t seed) {
  std::vector<sample_point> out;
  for (const auto& t : time_set(p, j)) {
    auto s = sample_points(p, j, t, 2, seed + t.q);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

}  // namespace

TEST_CASE("claim (i) factor ratios") {
  counterexample_params p;
  for (int j = 2; j <= 3; ++j) {
    const auto r = verify_claim_i(p, j, samples_for(p, j, 9), (std::int64_t{1} << (4 * j)) - 1);
    for (const auto& s : r.samples)
      for (double f : s.factor_ratios) {
        CHECK(f >= 1.0 / 8);
        CHECK(f <= 8.0);
      }
  }
  // q above the block length leaves no complete residue block
  const sample_point wide{{1024}, 4096, {1e-5}};
  const auto r = verify_claim_i(p, 2, {wide}, 255);
  CHECK(r.samples.front().boundary_only);
  CHECK(r.samples.front().regime == "boundary-only");
  CHECK_THROWS_AS(verify_claim_i(p, 2, {wide}, 100), std::invalid_argument);
}

TEST_CASE("claim (ii) regimes") {
  counterexample_params p;
  CHECK(classify_claim_ii(p, 2, 1) == claim_ii_regime::middle);
  CHECK(classify_claim_ii(p, 3, 1) == claim_ii_regime::van_der_corput);
  CHECK(classify_claim_ii(p, 3, 2) == claim_ii_regime::upper);
  CHECK(classify_claim_ii(p, 4, 2) == claim_ii_regime::middle);
  const double bound = 8 * vdc_first_derivative_bound(0.125);
  const auto r = verify_claim_ii(p, 4, 1, samples_for(p, 4, 3), 65535);
  for (const auto& s : r.samples)
    for (double f : s.factors) CHECK(f <= bound);
  CHECK_THROWS_AS(verify_claim_ii(p, 3, 3, samples_for(p, 3, 3), 4095), std::out_of_range);
}

TEST_CASE("claim (iii) decay and disjoint spectrum") {
  counterexample_params p;
  const auto samples = samples_for(p, 2, 4);
  for (const auto& x : samples) {
    CHECK(block_value(p, 3, 255, x) == cplx(0.0, 0.0));
    CHECK(block_value(p, 4, 4095, x) == cplx(0.0, 0.0));
  }
  std::vector<claim_report> reports;
  for (int k : {3, 4}) {
    const std::int64_t lo = std::int64_t{1} << (4 * (k - 1));
    reports.push_back(verify_claim_iii(p, 2, k, samples, {lo, 4 * lo, 16 * lo - 1}));
    for (const auto& s : reports.back().samples)
      for (double f : s.factor_ratios) CHECK(f <= 250.0);
  }
  const auto merged = merge_reports(reports, p);
  REQUIRE(merged.fit_valid);
  CHECK(merged.exponent < 0.0);
  CHECK_THROWS_AS(verify_claim_iii(p, 2, 3, samples, {100}), std::out_of_range);
  CHECK_THROWS_AS(verify_claim_iii(p, 2, 2, samples, {100}), std::out_of_range);
}

TEST_CASE("blow-up trajectory") {
  counterexample_params p;
  const auto ladder = canonical_ladder(p, 1, 5);
  const auto traj = blowup_trajectory(p, ladder, 7);
  REQUIRE(traj.size() == 5);
  std::vector<double> xs, ys;
  double prev_t = 10.0;
  for (const auto& b : traj) {
    CHECK(std::isfinite(b.magnitude));
    CHECK(b.magnitude > 0.0);
    const double base = 2 * M_PI * std::pow(16.0, -b.j / 2.0);
    CHECK(b.t >= base * (1 - 1e-12));
    CHECK(b.t <= base / p.kappa * (1 + 1e-12));
    CHECK(b.t < prev_t);
    CHECK(b.magnitude + 1e-12 >= b.main - b.a1 - b.a2);
    prev_t = b.t;
    xs.push_back(b.j);
    ys.push_back(std::log(b.magnitude));
  }
  const auto fit = least_squares(xs, ys);
  const double target = p.delta * std::log(16.0);
  CHECK(std::abs(fit.slope - target) <= 0.3 * target);
}
