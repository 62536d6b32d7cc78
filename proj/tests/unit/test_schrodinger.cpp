#include <cmath>
#include <random>

#include "doctest.h"
#include "talbot/counterexample.hpp"
#include "talbot/schrodinger.hpp"

using namespace talbot;
using doctest::Approx;

namespace {

fourier_data unit_block(const counterexample_params& params, int j) {
  return datum_block(params, j).scaled(1.0 / params.amplitude(j));
}

}  // namespace

TEST_CASE("dirichlet kernel values") {
  for (std::int64_t n : {0, 1, 5, 100}) CHECK(dirichlet_kernel_1d(n, 0.0) == Approx(2.0 * n + 1));
  CHECK(dirichlet_kernel_1d(1, M_PI) == Approx(-1.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 50);
    CHECK(dirichlet_kernel_1d(n, 2 * M_PI - x) == Approx(dirichlet_kernel_1d(n, x)).epsilon(1e-9));
    double direct = 1.0;
    for (std::int64_t k = 1; k <= n; ++k) direct += 2.0 * std::cos(k * x);
    CHECK(dirichlet_kernel_1d(n, x) == Approx(direct).epsilon(1e-9).scale(1.0));
  }
  const std::vector<double> zero{0.0, 0.0};
  CHECK(dirichlet_kernel_nd(3, zero) == Approx(49.0));
  const std::vector<double> x{2 * M_PI / 3, 0.4};  // d_1 vanishes at 2 pi/3
  CHECK(std::abs(dirichlet_kernel_nd(1, x)) < 1e-12);
  const std::vector<double> y{M_PI, 0.0};
  CHECK(dirichlet_kernel_nd(1, y) == Approx(-3.0));
}

TEST_CASE("partial sums of simple data") {
  const fourier_data one(1, {{{0}, 1.0}});
  const std::vector<double> x{1.3};
  CHECK(std::abs(partial_sum_direct(one, 4, 0.7, x) - cplx(1.0, 0.0)) < 1e-15);

  const fourier_data mode(2, {{{3, -2}, 1.0}});
  const std::vector<double> x2{0.4, 1.1};
  const double t = 0.37;
  const cplx expect = std::polar(1.0, 3 * 0.4 - 2 * 1.1 - 13 * t);
  CHECK(std::abs(partial_sum_direct(mode, 3, t, x2) - expect) < 1e-12);
  CHECK(std::abs(partial_sum_direct(mode, 2, t, x2)) == 0.0);
}

TEST_CASE("S_N(0) f equals D_N * f for band-limited data") {
  const fourier_data f(1, {{{-7}, {0.5, 1.0}}, {{-2}, 2.0}, {{0}, -1.0}, {{4}, {0.0, 3.0}}, {{9}, 1.5}});
  const std::int64_t n = 5;
  const int m = 64;  // exact quadrature for trigonometric polynomials of degree < 64
  for (double x : {0.0, 0.9, 2.5, 5.1}) {
    cplx conv{};
    for (int i = 0; i < m; ++i) {
      const double y = 2 * M_PI * i / m;
      const std::vector<double> yy{y};
      conv += dirichlet_kernel_1d(n, x - y) * partial_sum_direct(f, 100, 0.0, yy);
    }
    conv /= static_cast<double>(m);
    const std::vector<double> xx{x};
    CHECK(std::abs(partial_sum_direct(f, n, 0.0, xx) - conv) < 1e-12);
  }
}

TEST_CASE("rational-time evaluation matches direct summation") {
  counterexample_params params;  // d = 1, lambda = 16
  const dirichlet_block block{1, 16, 2};
  const sample_point x{{8}, 16, {0.003}};
  const rational_time t{16};
  const cplx fast = evolve_rational_fast(block, t, x);
  const cplx direct = partial_sum_direct(unit_block(params, 2), 255, t, x);
  CHECK(std::abs(fast - direct) <= 1e-9 * std::max(1.0, std::abs(direct)));

  // block narrower than q: only boundary sums
  const dirichlet_block narrow{1, 16, 1};
  const sample_point z{{10}, 20, {0.001}};
  const auto terms = block_factor(narrow.lo(), narrow.hi(), 20, 10, 0.001);
  CHECK(terms.degenerate);
  const cplx fz = evolve_rational_fast(narrow, rational_time{20}, z);
  const cplx dz = partial_sum_direct(unit_block(params, 1), 15, rational_time{20}, z);
  CHECK(std::abs(fz - dz) < 1e-12);
}

TEST_CASE("block decomposition reassembles the factor sum") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::int64_t q = 4 * (1 + static_cast<std::int64_t>(rng() % 20));
    const std::int64_t p = 2 * static_cast<std::int64_t>(rng() % (q / 2));
    const std::int64_t lo = static_cast<std::int64_t>(rng() % 500);
    const std::int64_t hi = lo + static_cast<std::int64_t>(rng() % 3000);
    const double eps = 1e-4 * static_cast<double>(rng() % 100);
    const auto b = block_factor(lo, hi, q, p, eps);
    const cplx direct = weyl_sum({-1, p, q, eps}, {lo, hi});
    REQUIRE(std::abs(b.total - direct) < 1e-9 * std::max(1.0, std::abs(direct)));
    if (!b.degenerate)
      REQUIRE(std::abs(b.complete * b.coherent + b.left + b.right - b.total) < 1e-9 * std::max(1.0, std::abs(b.total)));
  }
}

TEST_CASE("coherent block sum stays near its length for small offsets") {
  const std::int64_t lambda = 16;
  for (int j = 2; j <= 4; ++j) {
    const std::int64_t lo = 1, hi = static_cast<std::int64_t>(std::pow(lambda, j)) - 1;
    const double eps = 0.01 / std::pow(lambda, j);
    for (std::int64_t q : {4, 8, 16}) {
      const auto b = block_factor(lo, hi, q, q / 2, eps);
      REQUIRE_FALSE(b.degenerate);
      CHECK(std::abs(b.coherent) >= 0.9 * static_cast<double>(b.block_right - b.block_left));
      CHECK(std::abs(b.complete) == Approx(std::sqrt(2.0 * q)).epsilon(1e-3));
    }
  }
}

TEST_CASE("maximal over times") {
  const fourier_data f(1, {{{1}, 1.0}, {{2}, {0.0, 2.0}}, {{-3}, 0.5}});
  const std::vector<double> x{0.8};
  const std::vector<double> one{0.3};
  CHECK(maximal_over_times(f, 3, one, x) == Approx(std::abs(partial_sum_direct(f, 3, 0.3, x))));
  const fourier_data mode(1, {{{5}, 1.0}});
  const std::vector<double> times{0.1, 0.2, 0.9};
  CHECK(maximal_over_times(mode, 5, times, x) == Approx(1.0));
  const std::vector<double> coarse{0.1, 0.5};
  const std::vector<double> fine{0.1, 0.3, 0.5, 0.7};
  CHECK(maximal_over_times(f, 3, coarse, x) <= maximal_over_times(f, 3, fine, x));
}

TEST_CASE("sobolev norms") {
  const fourier_data one(1, {{{0}, 1.0}});
  CHECK(sobolev_norm(one, 0.7) == Approx(1.0));
  const fourier_data mode(2, {{{3, 4}, 1.0}});
  CHECK(sobolev_norm(mode, 0.5) == Approx(std::pow(26.0, 0.25)));

  counterexample_params params;
  params.lambda = 8;
  const double s = 0.1;
  for (int j = 1; j <= 5; ++j) {
    const double ratio = sobolev_norm(datum_block(params, j), s) /
                         std::pow(8.0, -j * (params.s_alpha() - params.delta - s));
    CHECK(ratio >= 0.25);
    CHECK(ratio <= 4.0);
  }
}
