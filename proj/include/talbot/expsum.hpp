#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace talbot {

using cplx = std::complex<double>;

// Moduli and interval endpoints above this are rejected; (a2 k^2 + a1 k) mod q
// is then exact in 128-bit arithmetic.
inline constexpr std::int64_t max_modulus = std::int64_t{1} << 31;

struct gauss_spec {
  std::int64_t q = 1;
  std::int64_t r = 1;
  std::int64_t p = 0;
};

struct integer_interval {
  std::int64_t left = 0;
  std::int64_t right = 0;

  std::int64_t length() const { return right - left; }
  std::int64_t count() const { return right - left + 1; }
};

// f(k) = (a2 k^2 + a1 k)/q + eps k, in cycles.
struct quadratic_phase {
  std::int64_t a2 = 0;
  std::int64_t a1 = 0;
  std::int64_t q = 1;
  double eps = 0.0;
};

// Exact residue of (a2 k^2 + a1 k) mod q in [0, q).
std::int64_t quadratic_residue(std::int64_t a2, std::int64_t a1, std::int64_t k,
                               std::int64_t q);

// e^{2 pi i n/q} for a residue n in [0,q).
cplx unit_root(std::int64_t n, std::int64_t q);

cplx gauss_sum_bruteforce(const gauss_spec& spec);
double gauss_sum_magnitude(const gauss_spec& spec);

// |gauss_sum_bruteforce({q, r, p})| for every p in [0, q), each by direct
// summation over k with exact residues; shares one root table across p.
std::vector<double> gauss_sum_bruteforce_row(std::int64_t q, std::int64_t r);

cplx weyl_sum(const quadratic_phase& phase, const integer_interval& interval);

struct perturbed_gauss {
  double magnitude = 0.0;
  double deviation = 0.0;
};

// |sum_{r<q} e^{2 pi i (r(p/q + eps) - r^2/q)}| and its distance from sqrt(2q).
perturbed_gauss perturbed_gauss_sum_check(std::int64_t q, std::int64_t p,
                                          double eps);

double vdc_second_derivative_bound(const integer_interval& interval, double m,
                                   double ratio);
double vdc_first_derivative_bound(double kappa);

struct abel_result {
  double bound = 0.0;
  double lhs = 0.0;
  double subinterval_max = 0.0;
  bool holds = false;
};

// a and b are indexed by k - interval.left and must cover the interval.
abel_result abel_bound_check(std::span<const double> a, std::span<const cplx> b,
                             const integer_interval& interval,
                             double slack = 1e-10);

}  // namespace talbot
