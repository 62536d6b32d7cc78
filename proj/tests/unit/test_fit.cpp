#include <cmath>

#include "doctest.h"
#include "talbot/fit.hpp"

using namespace talbot;
using doctest::Approx;

TEST_CASE("least squares recovers an exact line") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  std::vector<double> y;
  for (double v : x) y.push_back(-0.75 * v + 2.5);
  const auto f = least_squares(x, y);
  CHECK(f.slope == Approx(-0.75));
  CHECK(f.intercept == Approx(2.5));
  CHECK(f.residual < 1e-12);
  CHECK_THROWS(least_squares(std::vector<double>{1.0}, std::vector<double>{2.0}));
}

TEST_CASE("exponent fits") {
  std::vector<double> n, v, w;
  for (int e = 4; e <= 16; ++e) {
    const double x = std::ldexp(1.0, e);
    n.push_back(x);
    v.push_back(x * x);
    w.push_back(5.0 * std::pow(x, 0.37) * std::log(x));
  }
  const auto a = exponent_fit(n, v);
  CHECK(a.slope == Approx(2.0).epsilon(1e-12));
  CHECK(a.residual < 1e-12);
  const auto b = exponent_fit(n, w, true);
  CHECK(std::abs(b.slope - 0.37) < 1e-6);
  CHECK(b.polylog);
  CHECK(std::exp(b.intercept) == Approx(5.0).epsilon(1e-9));
}
