#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "talbot/measures.hpp"

using namespace talbot;
using doctest::Approx;

namespace {

const double cantor_dim = std::log(2.0) / std::log(3.0);

fourier_data dirichlet_datum(std::int64_t n) {
  std::map<lattice_point, cplx> c;
  for (std::int64_t k = -n; k <= n; ++k) c[{k}] = 1.0;
  return fourier_data(1, c);
}

double brute_envelope(std::int64_t n, double x) {
  double best = 0.0;
  for (std::int64_t m = 0; m <= n; ++m) best = std::max(best, std::abs(dirichlet_kernel_1d(m, x)));
  return best;
}

}  // namespace

TEST_CASE("cantor measures") {
  const auto mu = cantor_measure(1, 1.0 / 3.0, 8);
  CHECK(mu.alpha == Approx(0.6309297535714574));
  CHECK(mu.size() == 256);
  CHECK(mu.total_mass() == 1.0);
  const auto dot = cantor_measure(1, 1.0 / 3.0, 0);
  CHECK(dot.size() == 1);
  const auto square = cantor_measure(2, 0.25, 3, normalization::torus_volume);
  CHECK(square.size() == 64);
  CHECK(square.total_mass() == Approx(4 * M_PI * M_PI));
  for (std::size_t i = 0; i < square.size(); ++i)
    for (double v : square.position(i)) {
      CHECK(v >= 0.0);
      CHECK(v < 2 * M_PI);
    }
  CHECK_THROWS_AS(cantor_measure(1, 0.5, 3), std::invalid_argument);
}

TEST_CASE("frostman constants") {
  const auto u = uniform_measure(1, std::int64_t{1} << 20);
  const auto fu = frostman_constant(u, 1.0, geometric_radii(2, 1, 10));
  CHECK(fu.value == Approx(1.0 / M_PI).epsilon(1e-3));

  const auto dot = point_mass({1.0});
  CHECK(frostman_constant(dot, 0.0, geometric_radii(2, 1, 8)).value == Approx(1.0));

  std::vector<double> values;
  for (int level : {10, 11, 12}) {
    const auto mu = cantor_measure(1, 1.0 / 3.0, level);
    values.push_back(frostman_constant(mu, cantor_dim, geometric_radii(3, 1, level)).value);
  }
  for (double v : values) {
    CHECK(std::isfinite(v));
    CHECK(v == Approx(0.62724118700576148).epsilon(1e-12));
  }

  const auto mu = cantor_measure(1, 1.0 / 3.0, 8);
  const auto radii = geometric_radii(3, 1, 8);
  CHECK(frostman_constant(mu.scaled(2.0), cantor_dim, radii).value ==
        Approx(2.0 * frostman_constant(mu, cantor_dim, radii).value));
}

TEST_CASE("linear residues over a range") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 3000; ++trial) {
    const std::int64_t m = 1 + static_cast<std::int64_t>(rng() % 1000);
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 1500);
    const std::int64_t a = static_cast<std::int64_t>(rng() % m);
    const std::int64_t b = static_cast<std::int64_t>(rng() % m);
    std::int64_t lo = m, hi = -1;
    for (std::int64_t x = 0; x < n; ++x) {
      const std::int64_t v = (a * x + b) % m;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const auto [rlo, rhi] = linear_mod_range(n, m, a, b);
    REQUIRE(rlo == lo);
    REQUIRE(rhi == hi);
  }
}

TEST_CASE("maximal dirichlet envelope") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
  for (int trial = 0; trial < 300; ++trial) {
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 400);
    const double x = u(rng);
    const double env = dirichlet_envelope_1d(n, x);
    CHECK(env == Approx(brute_envelope(n, x)).epsilon(1e-7));
    CHECK(env >= std::abs(dirichlet_kernel_1d(n, x)));
  }
  CHECK(dirichlet_envelope_1d(50, 0.0) == Approx(101.0));
}

TEST_CASE("dirichlet kernel convolution") {
  const auto dot = point_mass({0.0});
  for (std::int64_t n : {4, 32, 100}) {
    CHECK(convolve_dirichlet_sup(dot, n, false).value == Approx(2.0 * n + 1));
    CHECK(convolve_dirichlet_sup(dot, n, true).value == Approx(2.0 * n + 1));
  }
  CHECK_THROWS_AS(convolve_dirichlet_sup(dot, 100, false, 16), std::invalid_argument);

  // uniform atoms reproduce the L1 norm of the kernel, which grows like ln N
  std::vector<double> ratios;
  for (int e = 6; e <= 9; ++e) {
    const std::int64_t n = std::int64_t{1} << e;
    const auto mu = uniform_measure(1, 8 * n);
    const double v = convolve_dirichlet_sup(mu, n, false).value;
    CHECK(v == Approx(dirichlet_l1(n, false).value / (2 * M_PI)).epsilon(0.02));
    ratios.push_back(v / std::log(static_cast<double>(n)));
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo <= 1.2);

  const auto mu = cantor_measure(1, 1.0 / 3.0, 6);
  for (std::int64_t n : {16, 64})
    CHECK(convolve_dirichlet_sup(mu, n, true).value >= convolve_dirichlet_sup(mu, n, false).value);
}

TEST_CASE("kernel L1 norms") {
  const auto one = dirichlet_l1(1, false);
  CHECK(one.value == Approx(2 * M_PI / 3 + 4 * std::sqrt(3.0)).epsilon(1e-10));
  CHECK(dirichlet_l1(1, false, 2).value == Approx(one.value * one.value).epsilon(1e-10));
  std::vector<double> ratios;
  for (int e = 4; e <= 12; e += 2) {
    const std::int64_t n = std::int64_t{1} << e;
    const auto plain = dirichlet_l1(n, false);
    const auto maximal = dirichlet_l1(n, true);
    CHECK(maximal.value >= plain.value);
    CHECK(plain.error_estimate <= 1e-6 * plain.value);
    ratios.push_back(plain.value / std::log(static_cast<double>(n)));
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi / *lo <= 2.0);
}

TEST_CASE("maximal Lp norms") {
  const fourier_data mode(1, {{{3}, 1.0}});
  const auto mu = cantor_measure(1, 1.0 / 3.0, 5, normalization::torus_volume);
  const time_plan plan{7, 16, 8};
  CHECK(maximal_lp_norm(mode, mu, 4.0, plan) == Approx(std::pow(2 * M_PI, 0.25)));

  const auto f = dirichlet_datum(20);
  const auto nu = cantor_measure(1, 1.0 / 3.0, 6);
  const time_plan coarse{7, 16, 8};
  const time_plan fine{7, 32, 8};
  CHECK(maximal_lp_norm(f, nu, 6.0, coarse) <= maximal_lp_norm(f, nu, 6.0, fine));
  CHECK(time_plan{}.times().size() == 58 + 64);
}

TEST_CASE("transference ratio") {
  const auto mu = cantor_measure(1, 1.0 / 3.0, 6);
  const auto radii = geometric_radii(3, 1, 6);
  const time_plan plan{7, 16, 8};
  const double p = 6.0;
  const double s = (1.0 - cantor_dim) / p + 1.0 / 3.0 + 0.05;
  CHECK(transference_ratio(fourier_data(1, {}), mu, p, s, cantor_dim, plan, radii).ratio == 0.0);

  const auto f = dirichlet_datum(16);
  const auto r = transference_ratio(f, mu, p, s, cantor_dim, plan, radii);
  const double expect = maximal_lp_norm(f, mu, p, plan) /
                        (std::pow(frostman_constant(mu, cantor_dim, radii).value, 1.0 / p) *
                         sobolev_norm(f, s));
  CHECK(std::abs(r.ratio - expect) <= 1e-12 * expect);
  const auto r2 = transference_ratio(f.scaled(2.0), mu, p, s, cantor_dim, plan, radii);
  CHECK(r2.ratio == Approx(r.ratio).epsilon(1e-12));
  CHECK_THROWS_AS(transference_ratio(f, mu, p, 0.3, cantor_dim, plan, radii), std::invalid_argument);
}

TEST_CASE("truncated maximal L2 and the Carleson ratio") {
  const auto f = dirichlet_datum(12);
  const auto mu = cantor_measure(1, 1.0 / 3.0, 5);
  const double t = 0.7;

  // one truncation is a plain weighted L2 norm
  double sum = 0.0;
  for (std::size_t a = 0; a < mu.size(); ++a)
    sum += mu.masses[a] * std::norm(partial_sum_direct(f, 12, t, mu.position(a)));
  CHECK(maximal_truncation_l2(f, mu, t, {12}) == Approx(std::sqrt(sum)).epsilon(1e-12));

  std::vector<std::int64_t> all(12);
  std::iota(all.begin(), all.end(), std::int64_t{1});
  CHECK(maximal_truncation_l2(f, mu, t, all) >= maximal_truncation_l2(f, mu, t, {12}));

  // point mass: Cauchy-Schwarz over the 2N+1 modes
  const fourier_data g(1, {{{-5}, {1.0, 2.0}}, {{0}, 0.5}, {{7}, -1.0}, {{12}, {0.0, 3.0}}});
  const auto dot = point_mass({0.4});
  const double v = maximal_truncation_l2(g, dot, t, all);
  double best = 0.0;
  for (auto m : all) best = std::max(best, std::abs(partial_sum_direct(g, m, t, dot.position(0))));
  CHECK(v == Approx(best).epsilon(1e-12));
  CHECK(v <= std::sqrt(25.0) * l2_norm(g));

  const auto radii = geometric_radii(3, 1, 5);
  const auto c = carleson_l2_ratio(f, mu, 0.3, 0.63, all, t, radii);
  CHECK(c.ratio > 0.0);
  CHECK(c.ratio == Approx(c.numerator / (std::sqrt(c.frostman) * std::pow(12.0, 0.185 + 0.05) * c.l2)));
  CHECK_THROWS_AS(carleson_l2_ratio(f, mu, 0.3, 0.3, all, t, radii), std::invalid_argument);
  CHECK_THROWS_AS(carleson_l2_ratio(f, mu, 0.7, 0.9, all, t, radii), std::invalid_argument);
}
