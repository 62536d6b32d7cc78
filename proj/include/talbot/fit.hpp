#pragma once

#include <span>
#include <utility>
#include <vector>

namespace talbot {

struct linear_fit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square of the fit residuals
};

// Ordinary least squares y = slope * x + intercept.
linear_fit least_squares(std::span<const double> x, std::span<const double> y);

struct exponent_fit_result {
  std::vector<std::pair<double, double>> samples;  // (scale, value)
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  bool polylog = false;
};

// Fit ln(value) against ln(scale); with polylog set, ln ln(scale) is subtracted
// from ln(value) first.
exponent_fit_result exponent_fit(std::span<const double> scales,
                                 std::span<const double> values, bool polylog = false);

}  // namespace talbot
