#include "talbot/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace talbot {

linear_fit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit inputs differ in length");
  const auto n = x.size();
  if (n < 2) throw std::invalid_argument("fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit abscissae are all equal");
  linear_fit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (out.slope * x[i] + out.intercept);
    ss += e * e;
  }
  out.residual = std::sqrt(ss / static_cast<double>(n));
  return out;
}

exponent_fit_result exponent_fit(std::span<const double> scales,
                                 std::span<const double> values, bool polylog) {
  if (scales.size() != values.size()) throw std::invalid_argument("fit inputs differ in length");
  if (scales.size() < 3) throw std::invalid_argument("exponent fit needs at least three samples");
  exponent_fit_result out;
  out.polylog = polylog;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(values[i] > 0.0)) throw std::invalid_argument("exponent fit needs positive values");
    if (!(scales[i] > 0.0)) throw std::invalid_argument("exponent fit needs positive scales");
    if (polylog && !(scales[i] > 1.0))
      throw std::invalid_argument("polylog correction needs scales above 1");
    out.samples.emplace_back(scales[i], values[i]);
    const double ls = std::log(scales[i]);
    lx.push_back(ls);
    ly.push_back(std::log(values[i]) - (polylog ? std::log(ls) : 0.0));
  }
  const linear_fit f = least_squares(lx, ly);
  out.slope = f.slope;
  out.intercept = f.intercept;
  out.residual = f.residual;
  return out;
}

}  // namespace talbot
