#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "talbot/expsum.hpp"

using namespace talbot;
using doctest::Approx;

namespace {

// Term-by-term reference in long double.
std::complex<long double> reference_sum(const quadratic_phase& ph, const integer_interval& iv) {
  std::complex<long double> s = 0;
  const long double two_pi = 2.0L * 3.14159265358979323846264338327950288L;
  for (std::int64_t k = iv.left; k <= iv.right; ++k) {
    const long double rational =
        static_cast<long double>(quadratic_residue(ph.a2, ph.a1, k, ph.q)) / ph.q;
    const long double phase = two_pi * (rational + static_cast<long double>(ph.eps) * k);
    s += std::complex<long double>(std::cos(phase), std::sin(phase));
  }
  return s;
}

}  // namespace

TEST_CASE("gauss sum examples") {
  CHECK(std::abs(gauss_sum_bruteforce({3, 1, 0})) == Approx(std::sqrt(3.0)).epsilon(1e-12));
  const cplx g4 = gauss_sum_bruteforce({4, 1, 0});
  CHECK(g4.real() == Approx(2.0).epsilon(1e-12));
  CHECK(g4.imag() == Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(gauss_sum_bruteforce({2, 1, 0})) < 1e-12);

  CHECK(gauss_sum_magnitude({3, 1, 0}) == Approx(std::sqrt(3.0)));
  CHECK(gauss_sum_magnitude({6, 1, 1}) == Approx(std::sqrt(12.0)));
  CHECK(std::abs(gauss_sum_bruteforce({6, 1, 1})) == Approx(std::sqrt(12.0)).epsilon(1e-12));
  CHECK(gauss_sum_magnitude({4, 1, 1}) == 0.0);
  CHECK_THROWS_AS(gauss_sum_magnitude({6, 2, 1}), std::invalid_argument);
}

TEST_CASE("closed form matches brute force for small moduli") {
  for (std::int64_t q = 1; q <= 60; ++q)
    for (std::int64_t r = 1; r <= std::max<std::int64_t>(1, q - 1); ++r) {
      if (std::gcd(r, q) != 1) continue;
      const auto row = gauss_sum_bruteforce_row(q, r);
      for (std::int64_t p = 0; p < q; ++p) {
        const double closed = gauss_sum_magnitude({q, r, p});
        REQUIRE(std::abs(row[p] - closed) <= 1e-9 * std::max(1.0, closed));
        REQUIRE(std::abs(std::abs(gauss_sum_bruteforce({q, r, p})) - row[p]) < 1e-9);
      }
    }
}

TEST_CASE("quadratic residue is exact near the width limit") {
  const std::int64_t q = max_modulus - 1;
  const std::int64_t k = max_modulus - 7;
  const __int128 expect = (static_cast<__int128>(k) * k % q * 3 + static_cast<__int128>(5) * k) % q;
  CHECK(quadratic_residue(3, 5, k, q) == static_cast<std::int64_t>(expect));
  CHECK(quadratic_residue(-1, 0, -3, 7) == 5);  // -9 mod 7
  CHECK_THROWS_AS(quadratic_residue(1, 0, 1, max_modulus + 1), std::out_of_range);
}

TEST_CASE("weyl sum examples") {
  for (std::int64_t q : {4, 5, 12}) {
    const cplx w = weyl_sum({-1, 3, q, 0.0}, {0, q - 1});
    CHECK(std::abs(w) == Approx(gauss_sum_magnitude({q, q - 1, 3})).epsilon(1e-12));
  }
  const quadratic_phase ph{2, 3, 7, 0.013};
  const cplx one = weyl_sum(ph, {5, 5});
  const double f = (2.0 * 25 + 15) / 7.0 + 0.013 * 5;
  CHECK(one.real() == Approx(std::cos(2 * M_PI * f)).epsilon(1e-12));
  CHECK(one.imag() == Approx(std::sin(2 * M_PI * f)).epsilon(1e-12));

  const quadratic_phase ex{-1, 2, 4, 1e-4};
  const auto ref = reference_sum(ex, {0, 3});
  const cplx w = weyl_sum(ex, {0, 3});
  CHECK(std::abs(w - cplx(static_cast<double>(ref.real()), static_cast<double>(ref.imag()))) <=
        1e-12 * std::abs(w));
  CHECK_THROWS_AS(weyl_sum(ex, {3, 2}), std::invalid_argument);
}

TEST_CASE("weyl sum agrees with the extended precision reference on long intervals") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::int64_t q = 1 + static_cast<std::int64_t>(rng() % 500);
    const quadratic_phase ph{static_cast<std::int64_t>(rng() % q), static_cast<std::int64_t>(rng() % q), q,
                             1e-3 * (static_cast<double>(rng() % 1000) / 1000.0 - 0.5)};
    const std::int64_t left = static_cast<std::int64_t>(rng() % 2000) - 1000;
    const integer_interval iv{left, left + static_cast<std::int64_t>(rng() % 3000)};
    const auto ref = reference_sum(ph, iv);
    const cplx w = weyl_sum(ph, iv);
    REQUIRE(std::abs(w - cplx(static_cast<double>(ref.real()), static_cast<double>(ref.imag()))) <
            1e-9 * std::max(1.0, std::abs(w)));
  }
}

TEST_CASE("perturbed gauss sum") {
  auto a = perturbed_gauss_sum_check(4, 0, 0.0);
  CHECK(a.magnitude == Approx(std::sqrt(8.0)).epsilon(1e-12));
  CHECK(a.deviation < 1e-12);
  auto b = perturbed_gauss_sum_check(8, 2, 0.0);
  CHECK(b.magnitude == Approx(4.0).epsilon(1e-12));
  CHECK(b.deviation < 1e-12);
  auto c = perturbed_gauss_sum_check(64, 16, 1e-4);
  CHECK(c.deviation <= 0.2 * 8.0);
  CHECK(c.deviation == Approx(0.026266349146375489).epsilon(1e-10));
  CHECK_THROWS_AS(perturbed_gauss_sum_check(6, 2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(perturbed_gauss_sum_check(8, 3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(perturbed_gauss_sum_check(8, 2, 0.0125), std::invalid_argument);
}

TEST_CASE("van der corput bounds") {
  const double q = 49.0;
  CHECK(vdc_second_derivative_bound({0, 49}, 1.0 / q, 1.0) == Approx(2.0 * std::sqrt(q)));
  CHECK(vdc_second_derivative_bound({3, 3}, 1.0, 1.0) == Approx(1.0));
  CHECK(vdc_second_derivative_bound({0, 100}, 0.01, 2.0) == Approx(30.0));
  CHECK(vdc_first_derivative_bound(0.125) == Approx(8.0));
  CHECK(vdc_first_derivative_bound(0.5) == Approx(2.0));
  CHECK(vdc_first_derivative_bound(0.01) == Approx(100.0));
  CHECK_THROWS_AS(vdc_first_derivative_bound(0.6), std::invalid_argument);
  CHECK_THROWS_AS(vdc_second_derivative_bound({0, 1}, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("abel summation examples") {
  const std::vector<double> a{1.0, 0.5, 0.25};
  const std::vector<cplx> b{1.0, -1.0, 1.0};
  const auto r = abel_bound_check(a, b, {0, 2});
  CHECK(r.subinterval_max == Approx(1.0));
  CHECK(r.bound == Approx(1.0));
  CHECK(r.lhs == Approx(0.75));
  CHECK(r.holds);

  const std::vector<double> ones(5, 1.0);
  const std::vector<cplx> bb{{1, 2}, {-3, 0}, {0.5, 0.5}, {2, -1}, {0, 1}};
  const auto c = abel_bound_check(ones, bb, {10, 14});
  CHECK(c.bound == Approx(c.subinterval_max));
  CHECK(c.lhs <= c.bound + 1e-12);

  const std::vector<double> bumpy{1.0, 2.0, 1.0};
  CHECK_THROWS_AS(abel_bound_check(bumpy, b, {0, 2}), std::invalid_argument);
  CHECK_THROWS_AS(abel_bound_check(a, b, {0, 5}), std::invalid_argument);
}

TEST_CASE("abel inequality on random monotone instances") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng() % 64;
    std::vector<double> a(n);
    for (auto& v : a) v = u(rng);
    std::sort(a.begin(), a.end());
    if (trial % 2) std::reverse(a.begin(), a.end());
    std::vector<cplx> b(n);
    for (auto& v : b) v = {g(rng), g(rng)};
    REQUIRE(abel_bound_check(a, b, {0, static_cast<std::int64_t>(n) - 1}).holds);
  }
}
