#include "talbot/expsum.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace talbot {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::int64_t mod(std::int64_t a, std::int64_t q) {
  std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}

void check_modulus(std::int64_t q) {
  if (q < 1)
    throw std::invalid_argument("modulus must be positive, got " + std::to_string(q));
  if (q > max_modulus)
    throw std::out_of_range("modulus " + std::to_string(q) +
                            " exceeds the 2^31 integer-width limit");
}

void check_interval(const integer_interval& iv) {
  if (iv.left > iv.right)
    throw std::invalid_argument("interval has left > right");
  if (iv.left < -max_modulus || iv.right > max_modulus)
    throw std::out_of_range("interval endpoint exceeds the 2^31 integer-width limit");
}

// Root-of-unity lookup for moduli small enough to tabulate.
class root_table {
 public:
  root_table(std::int64_t q, std::int64_t uses) : q_(q) {
    if (q <= (1 << 20) && uses >= q / 4) {
      table_.resize(static_cast<std::size_t>(q));
      for (std::int64_t n = 0; n < q; ++n) table_[n] = unit_root(n, q);
    }
  }
  cplx operator()(std::int64_t n) const {
    return table_.empty() ? unit_root(n, q_) : table_[static_cast<std::size_t>(n)];
  }

 private:
  std::int64_t q_;
  std::vector<cplx> table_;
};

}  // namespace

std::int64_t quadratic_residue(std::int64_t a2, std::int64_t a1, std::int64_t k,
                               std::int64_t q) {
  check_modulus(q);
  const __int128 km = mod(k, q);
  const __int128 sq = (km * km) % q;
  const __int128 v = (static_cast<__int128>(mod(a2, q)) * sq + mod(a1, q) * km) % q;
  return static_cast<std::int64_t>(v);
}

cplx unit_root(std::int64_t n, std::int64_t q) {
  // Map to (-q/2, q/2] so the angle passed to sin/cos is at most pi.
  std::int64_t m = mod(n, q);
  if (2 * m > q) m -= q;
  const double angle = two_pi * static_cast<double>(m) / static_cast<double>(q);
  return {std::cos(angle), std::sin(angle)};
}

cplx gauss_sum_bruteforce(const gauss_spec& spec) {
  check_modulus(spec.q);
  return weyl_sum({spec.r, spec.p, spec.q, 0.0}, {0, spec.q - 1});
}

std::vector<double> gauss_sum_bruteforce_row(std::int64_t q, std::int64_t r) {
  check_modulus(q);
  if (q > (1 << 16)) throw std::out_of_range("row evaluation limited to q <= 2^16");
  const auto n = static_cast<std::size_t>(q);
  std::vector<double> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    const cplx z = unit_root(static_cast<std::int64_t>(i), q);
    re[i] = z.real();
    im[i] = z.imag();
  }
  std::vector<std::int64_t> quad(n);
  for (std::size_t k = 0; k < n; ++k)
    quad[k] = quadratic_residue(r, 0, static_cast<std::int64_t>(k), q);

  std::vector<double> out(n);
  for (std::int64_t p = 0; p < q; ++p) {
    double sr = 0.0, si = 0.0;
    std::int64_t lin = 0;
    for (std::size_t k = 0; k < n; ++k) {
      std::int64_t idx = quad[k] + lin;
      if (idx >= q) idx -= q;
      sr += re[idx];
      si += im[idx];
      lin += p;
      if (lin >= q) lin -= q;
    }
    out[static_cast<std::size_t>(p)] = std::hypot(sr, si);
  }
  return out;
}

double gauss_sum_magnitude(const gauss_spec& spec) {
  check_modulus(spec.q);
  if (std::gcd(spec.r, spec.q) != 1)
    throw std::invalid_argument("gcd(r, q) != 1: closed form does not apply");
  const double q = static_cast<double>(spec.q);
  const bool p_even = mod(spec.p, 2) == 0;
  switch (spec.q % 4) {
    case 1:
    case 3:
      return std::sqrt(q);
    case 0:
      return p_even ? std::sqrt(2.0 * q) : 0.0;
    default:
      return p_even ? 0.0 : std::sqrt(2.0 * q);
  }
}

cplx weyl_sum(const quadratic_phase& phase, const integer_interval& interval) {
  check_modulus(phase.q);
  check_interval(interval);
  const std::int64_t q = phase.q;
  const root_table roots(q, interval.count());

  // Residue of the rational part and its first difference, updated additively.
  std::int64_t res = quadratic_residue(phase.a2, phase.a1, interval.left, q);
  std::int64_t step = quadratic_residue(0, 2 * mod(phase.a2, q), interval.left, q);
  step = mod(step + mod(phase.a2, q) + mod(phase.a1, q), q);
  const std::int64_t step_inc = mod(2 * mod(phase.a2, q), q);

  const bool perturbed = phase.eps != 0.0;
  const cplx eps_rot = perturbed ? std::polar(1.0, two_pi * phase.eps) : cplx{1.0, 0.0};
  constexpr std::int64_t chunk = 256;

  cplx total{0.0, 0.0};
  std::int64_t k = interval.left;
  while (k <= interval.right) {
    const std::int64_t stop = std::min(interval.right, k + chunk - 1);
    cplx e{1.0, 0.0};
    if (perturbed) {
      const double frac = std::fmod(phase.eps * static_cast<double>(k), 1.0);
      e = std::polar(1.0, two_pi * frac);
    }
    cplx partial{0.0, 0.0};
    for (; k <= stop; ++k) {
      partial += perturbed ? roots(res) * e : roots(res);
      res += step;
      if (res >= q) res -= q;
      step += step_inc;
      if (step >= q) step -= q;
      if (perturbed) e *= eps_rot;
    }
    total += partial;
  }
  return total;
}

perturbed_gauss perturbed_gauss_sum_check(std::int64_t q, std::int64_t p, double eps) {
  check_modulus(q);
  if (q % 4 != 0) throw std::invalid_argument("q must be divisible by 4");
  if (mod(p, 2) != 0) throw std::invalid_argument("p must be even");
  if (!(std::abs(eps) * static_cast<double>(q) < 0.1))
    throw std::invalid_argument("|eps| q must be below 1/10");
  const double magnitude = std::abs(weyl_sum({-1, p, q, eps}, {0, q - 1}));
  return {magnitude, std::abs(magnitude - std::sqrt(2.0 * static_cast<double>(q)))};
}

double vdc_second_derivative_bound(const integer_interval& interval, double m,
                                   double ratio) {
  if (!(m > 0.0)) throw std::invalid_argument("second-derivative scale M must be positive");
  if (!(ratio >= 1.0)) throw std::invalid_argument("derivative ratio must be at least 1");
  return ratio * static_cast<double>(interval.length()) * std::sqrt(m) + 1.0 / std::sqrt(m);
}

double vdc_first_derivative_bound(double kappa) {
  if (!(kappa > 0.0) || kappa > 0.5)
    throw std::invalid_argument("kappa must lie in (0, 1/2]");
  return 1.0 / kappa;
}

abel_result abel_bound_check(std::span<const double> a, std::span<const cplx> b,
                             const integer_interval& interval, double slack) {
  check_interval(interval);
  const auto n = static_cast<std::size_t>(interval.count());
  if (a.size() < n || b.size() < n)
    throw std::invalid_argument("sequences do not cover the interval");

  bool nonincreasing = true;
  bool nondecreasing = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] < 0.0) throw std::invalid_argument("weights must be nonnegative");
    if (i > 0) {
      nonincreasing = nonincreasing && a[i] <= a[i - 1];
      nondecreasing = nondecreasing && a[i] >= a[i - 1];
    }
  }
  if (!nonincreasing && !nondecreasing)
    throw std::invalid_argument("weights are not monotone");

  std::vector<cplx> prefix(n + 1);
  cplx weighted{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + b[i];
    weighted += a[i] * b[i];
  }
  double cmax = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j)
      cmax = std::max(cmax, std::abs(prefix[j] - prefix[i]));

  abel_result out;
  out.subinterval_max = cmax;
  out.bound = cmax * (nonincreasing ? a[0] : a[n - 1]);
  out.lhs = std::abs(weighted);
  out.holds = out.lhs <= out.bound + slack * (1.0 + out.bound);
  return out;
}

}  // namespace talbot
