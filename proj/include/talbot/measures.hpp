#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "talbot/fit.hpp"
#include "talbot/schrodinger.hpp"

namespace talbot {

enum class normalization { probability, torus_volume };
std::string normalization_name(normalization n);

// Finitely supported positive measure on T^d; positions in radians, reduced
// to [0, 2 pi).
struct atomic_measure {
  int d = 1;
  std::vector<double> positions;  // row-major, size() * d entries
  std::vector<double> masses;
  double alpha = 0.0;
  normalization norm = normalization::probability;

  std::size_t size() const { return masses.size(); }
  std::span<const double> position(std::size_t i) const {
    return {positions.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
  }
  double total_mass() const;
  atomic_measure scaled(double factor) const;
};

// Level-L self-similar Cantor measure (2^{dL} equal atoms at the centres of the
// level-L cubes).
atomic_measure cantor_measure(int d, double ratio, int level,
                              normalization norm = normalization::probability);
// m^d equal atoms on the grid 2 pi i / m.
atomic_measure uniform_measure(int d, std::int64_t m,
                               normalization norm = normalization::probability);
atomic_measure point_mass(const std::vector<double>& x);

struct frostman_estimate {
  double value = 0.0;
  std::vector<double> radii;
  std::vector<double> argmax_x;
  double argmax_r = 0.0;
};

// max over atom centres x and radii r of mu(B_inf(x, r)) / r^alpha, closed
// periodic sup-norm balls.
frostman_estimate frostman_constant(const atomic_measure& mu, double alpha,
                                    const std::vector<double>& radii);

// Radii 2 pi b^{-m}, m = first..last.
std::vector<double> geometric_radii(double base, int first, int last);

// sup_{0 <= M <= N} |d_M(x)|, exact in M for x rounded to a multiple of pi 2^-40.
double dirichlet_envelope_1d(std::int64_t n, double x);

// (min, max) of (a x + b) mod m over 0 <= x < n, in O(log m) steps.
std::pair<std::int64_t, std::int64_t> linear_mod_range(std::int64_t n, std::int64_t m,
                                                       std::int64_t a, std::int64_t b);

struct convolution_result {
  double value = 0.0;
  std::vector<double> argmax;
  std::int64_t grid = 0;  // points per axis
};

// max over the grid (2 pi i / grid)^d of sum_a mass_a |K(x - a)|, K = D_N or the
// maximal kernel sup_{M <= N} |D_M|. grid = 0 picks the coarsest admissible
// grid; a grid with spacing above 1/(10 N) is rejected.
convolution_result convolve_dirichlet_sup(const atomic_measure& mu, std::int64_t n,
                                          bool maximal, std::int64_t grid = 0);

struct quadrature_result {
  double value = 0.0;
  double error_estimate = 0.0;
};

// integral over T^d of |D_N| (or sup_{M <= N} |D_M|); the d-dimensional value is
// the 1-d value to the d-th power.
quadrature_result dirichlet_l1(std::int64_t n, bool maximal, int d = 1);

// Rational times 2 pi/q for q_min <= q <= q_max plus t_i = i/(uniform+1),
// i = 1..uniform.
struct time_plan {
  std::int64_t q_min = 7;
  std::int64_t q_max = 64;
  int uniform = 64;

  std::vector<double> times() const;
  std::string describe() const;
};

// For every atom, max over the plan of |S_N(t) f(x)|, N the bandwidth of f.
std::vector<double> maximal_profile(const fourier_data& f, const atomic_measure& mu,
                                    const time_plan& plan);

double maximal_lp_norm(const fourier_data& f, const atomic_measure& mu, double p,
                       const time_plan& plan);

struct transference_result {
  double ratio = 0.0;
  double numerator = 0.0;  // maximal_lp_norm
  double frostman = 0.0;
  double sobolev = 0.0;
};

transference_result transference_ratio(const fourier_data& f, const atomic_measure& mu,
                                       double p, double s, double alpha,
                                       const time_plan& plan,
                                       const std::vector<double>& radii);

// ||max_{M in truncations} |S_M(t) f| ||_{L^2(mu)} without normalisation.
double maximal_truncation_l2(const fourier_data& f, const atomic_measure& mu, double t,
                             const std::vector<std::int64_t>& truncations);

struct carleson_result {
  double ratio = 0.0;
  double numerator = 0.0;
  double frostman = 0.0;
  double l2 = 0.0;
};

carleson_result carleson_l2_ratio(const fourier_data& f, const atomic_measure& mu, double s,
                                  double alpha, const std::vector<std::int64_t>& truncations,
                                  double t, const std::vector<double>& radii,
                                  double eps = 0.05);

double l2_norm(const fourier_data& f);

}  // namespace talbot
