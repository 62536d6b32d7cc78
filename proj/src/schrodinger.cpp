#include "talbot/schrodinger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace talbot {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::int64_t mod(std::int64_t a, std::int64_t q) {
  std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}

std::int64_t ipow(std::int64_t base, int e) {
  std::int64_t v = 1;
  for (int i = 0; i < e; ++i) {
    if (v > max_modulus / base) throw std::out_of_range("block endpoint exceeds 2^31");
    v *= base;
  }
  return v;
}

bool within(std::span<const std::int64_t> k, std::int64_t n) {
  return std::all_of(k.begin(), k.end(), [n](std::int64_t c) { return c <= n && c >= -n; });
}

std::int64_t norm2(std::span<const std::int64_t> k) {
  std::int64_t s = 0;
  for (auto c : k) s += c * c;
  return s;
}

void check_point(const fourier_data& f, std::size_t dim) {
  if (dim != static_cast<std::size_t>(f.dimension()))
    throw std::invalid_argument("point dimension does not match the datum");
}

}  // namespace

fourier_data::fourier_data(int d, const std::map<lattice_point, cplx>& coefficients) : d_(d) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  keys_.reserve(coefficients.size() * static_cast<std::size_t>(d));
  values_.reserve(coefficients.size());
  for (const auto& [k, v] : coefficients) {
    if (k.size() != static_cast<std::size_t>(d))
      throw std::invalid_argument("lattice point has the wrong dimension");
    if (v == cplx{0.0, 0.0}) continue;
    for (auto c : k) bandwidth_ = std::max(bandwidth_, c < 0 ? -c : c);
    keys_.insert(keys_.end(), k.begin(), k.end());
    values_.push_back(v);
  }
}

cplx fourier_data::at(const lattice_point& k) const {
  if (k.size() != static_cast<std::size_t>(d_)) return {};
  std::size_t lo = 0, hi = values_.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    auto m = mode(mid);
    if (std::lexicographical_compare(m.begin(), m.end(), k.begin(), k.end()))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < values_.size()) {
    auto m = mode(lo);
    if (std::equal(m.begin(), m.end(), k.begin())) return values_[lo];
  }
  return {};
}

fourier_data fourier_data::scaled(cplx factor) const {
  fourier_data out = *this;
  if (factor == cplx{0.0, 0.0}) {
    out.keys_.clear();
    out.values_.clear();
    out.bandwidth_ = 0;
    return out;
  }
  for (auto& v : out.values_) v *= factor;
  return out;
}

double rational_time::value() const {
  if (q < 1) throw std::invalid_argument("rational time needs q >= 1");
  return two_pi / static_cast<double>(q);
}

std::vector<double> sample_point::position() const {
  if (q < 1) throw std::invalid_argument("sample point needs q >= 1");
  if (eps.size() != p.size()) throw std::invalid_argument("anchor and offset dimensions differ");
  std::vector<double> x(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    double frac = static_cast<double>(mod(p[i], q)) / static_cast<double>(q) + eps[i];
    frac -= std::floor(frac);
    x[i] = two_pi * frac;
    if (x[i] >= two_pi) x[i] = 0.0;
  }
  return x;
}

std::int64_t dirichlet_block::lo() const { return ipow(lambda, j - 1); }
std::int64_t dirichlet_block::hi() const { return ipow(lambda, j) - 1; }

double dirichlet_kernel_1d(std::int64_t n, double x) {
  if (n < 0) return 0.0;
  const double bound = 2.0 * static_cast<double>(n) + 1.0;
  double y = std::remainder(x, two_pi);  // (-pi, pi]
  const double s = std::sin(0.5 * y);
  if (std::abs(s) < 1e-8) {
    double v = 1.0;
    for (std::int64_t k = 1; k <= n; ++k) v += 2.0 * std::cos(static_cast<double>(k) * y);
    return std::clamp(v, -bound, bound);
  }
  const double v = std::sin((static_cast<double>(n) + 0.5) * y) / s;
  return std::clamp(v, -bound, bound);
}

double dirichlet_kernel_nd(std::int64_t n, std::span<const double> x) {
  double v = 1.0;
  for (double c : x) v *= dirichlet_kernel_1d(n, c);
  return v;
}

cplx partial_sum_direct(const fourier_data& f, std::int64_t n, double t,
                        std::span<const double> x) {
  check_point(f, x.size());
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto k = f.mode(i);
    if (!within(k, n)) continue;
    double kx = 0.0;
    for (std::size_t l = 0; l < k.size(); ++l) kx += static_cast<double>(k[l]) * x[l];
    const double phase =
        std::fmod(kx, two_pi) - std::fmod(static_cast<double>(norm2(k)) * t, two_pi);
    sum += f.coefficient(i) * std::polar(1.0, phase);
  }
  return sum;
}

cplx partial_sum_direct(const fourier_data& f, std::int64_t n, const rational_time& t,
                        std::span<const double> x) {
  check_point(f, x.size());
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto k = f.mode(i);
    if (!within(k, n)) continue;
    double kx = 0.0;
    for (std::size_t l = 0; l < k.size(); ++l) kx += static_cast<double>(k[l]) * x[l];
    const cplx time_phase = std::conj(unit_root(mod(norm2(k), t.q), t.q));
    sum += f.coefficient(i) * std::polar(1.0, std::fmod(kx, two_pi)) * time_phase;
  }
  return sum;
}

cplx partial_sum_direct(const fourier_data& f, std::int64_t n, const rational_time& t,
                        const sample_point& x) {
  check_point(f, x.p.size());
  if (x.eps.size() != x.p.size()) throw std::invalid_argument("anchor and offset dimensions differ");
  cplx sum{0.0, 0.0};
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto k = f.mode(i);
    if (!within(k, n)) continue;
    std::int64_t kp = 0;
    double ke = 0.0;
    for (std::size_t l = 0; l < k.size(); ++l) {
      kp = mod(kp + mod(k[l], x.q) * mod(x.p[l], x.q), x.q);
      ke += static_cast<double>(k[l]) * x.eps[l];
    }
    ke -= std::floor(ke);
    const cplx z = unit_root(kp, x.q) * std::conj(unit_root(mod(norm2(k), t.q), t.q)) *
                   std::polar(1.0, two_pi * ke);
    sum += f.coefficient(i) * z;
  }
  return sum;
}

block_terms block_factor(std::int64_t lo, std::int64_t hi, std::int64_t q, std::int64_t p,
                         double eps) {
  if (q < 1) throw std::invalid_argument("block factor needs q >= 1");
  if (lo > hi) throw std::invalid_argument("empty block");
  block_terms out;
  out.block_left = (lo + q - 1) / q;
  out.block_right = (hi + 1) / q;
  const quadratic_phase phase{-1, p, q, eps};
  if (out.block_right <= out.block_left) {
    out.degenerate = true;
    out.left = weyl_sum(phase, {lo, hi});
    out.total = out.left;
    return out;
  }
  const std::int64_t l = out.block_left;
  const std::int64_t m = out.block_right - out.block_left;
  out.complete = weyl_sum(phase, {0, q - 1});

  double theta = static_cast<double>(q) * eps;
  theta -= std::round(theta);
  const double start = std::fmod(static_cast<double>(l) * static_cast<double>(q) * eps, 1.0);
  const cplx head = std::polar(1.0, two_pi * start);
  if (theta == 0.0) {
    out.coherent = head * static_cast<double>(m);
  } else {
    const double ratio = std::sin(std::numbers::pi * static_cast<double>(m) * theta) /
                         std::sin(std::numbers::pi * theta);
    out.coherent =
        head * ratio * std::polar(1.0, std::numbers::pi * static_cast<double>(m - 1) * theta);
  }
  if (lo < l * q) out.left = weyl_sum(phase, {lo, l * q - 1});
  if (out.block_right * q <= hi) out.right = weyl_sum(phase, {out.block_right * q, hi});
  out.total = out.complete * out.coherent + out.left + out.right;
  return out;
}

cplx evolve_rational_fast(const dirichlet_block& block, const rational_time& t,
                          const sample_point& x) {
  if (x.q != t.q) throw std::invalid_argument("sample anchor modulus differs from time modulus");
  if (x.dimension() != block.d || x.eps.size() != x.p.size())
    throw std::invalid_argument("sample dimension does not match the block");
  const std::int64_t lo = block.lo();
  const std::int64_t hi = block.hi();
  cplx v{1.0, 0.0};
  for (int l = 0; l < block.d; ++l) v *= block_factor(lo, hi, t.q, x.p[l], x.eps[l]).total;
  return v;
}

double maximal_over_times(const fourier_data& f, std::int64_t n,
                          std::span<const double> times, std::span<const double> x) {
  if (times.empty()) throw std::invalid_argument("time set is empty");
  double best = 0.0;
  for (double t : times) best = std::max(best, std::abs(partial_sum_direct(f, n, t, x)));
  return best;
}

double sobolev_norm(const fourier_data& f, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("Sobolev index must be nonnegative");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double w = std::pow(1.0 + static_cast<double>(norm2(f.mode(i))), s);
    sum += w * std::norm(f.coefficient(i));
  }
  return std::sqrt(sum);
}

}  // namespace talbot
