#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "talbot/expsum.hpp"

namespace talbot {

using lattice_point = std::vector<std::int64_t>;

// Sparse Fourier coefficients on Z^d. Immutable once built; zero coefficients
// are dropped.
class fourier_data {
 public:
  fourier_data() = default;
  fourier_data(int d, const std::map<lattice_point, cplx>& coefficients);

  int dimension() const { return d_; }
  std::size_t size() const { return values_.size(); }
  std::int64_t bandwidth() const { return bandwidth_; }
  bool empty() const { return values_.empty(); }

  std::span<const std::int64_t> mode(std::size_t i) const {
    return {keys_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  cplx coefficient(std::size_t i) const { return values_[i]; }
  // Coefficient at k, zero if absent.
  cplx at(const lattice_point& k) const;

  fourier_data scaled(cplx factor) const;

 private:
  int d_ = 1;
  std::int64_t bandwidth_ = 0;
  std::vector<std::int64_t> keys_;  // row-major, sorted lexicographically
  std::vector<cplx> values_;
};

struct rational_time {
  std::int64_t q = 1;
  double value() const;
};

// x = 2 pi (p/q + eps), one anchor shared by all coordinates' modulus.
struct sample_point {
  lattice_point p;
  std::int64_t q = 1;
  std::vector<double> eps;

  int dimension() const { return static_cast<int>(p.size()); }
  std::vector<double> position() const;  // each coordinate in [0, 2 pi)
};

// Pure product block prod_l sum_{n=lambda^{j-1}}^{lambda^j - 1} e^{i n x_l}.
struct dirichlet_block {
  int d = 1;
  std::int64_t lambda = 2;
  int j = 1;

  std::int64_t lo() const;
  std::int64_t hi() const;
};

double dirichlet_kernel_1d(std::int64_t n, double x);
double dirichlet_kernel_nd(std::int64_t n, std::span<const double> x);

cplx partial_sum_direct(const fourier_data& f, std::int64_t n, double t,
                        std::span<const double> x);
cplx partial_sum_direct(const fourier_data& f, std::int64_t n, const rational_time& t,
                        std::span<const double> x);
// Exact anchor reduction: k.x uses (k.p mod q) and k.eps separately.
cplx partial_sum_direct(const fourier_data& f, std::int64_t n, const rational_time& t,
                        const sample_point& x);

// One coordinate factor sum_{n=lo}^{hi} e^{2 pi i (n(p/q + eps) - n^2/q)} split as
// complete * coherent + left + right, n = (L + m) q + r on [Lq, Rq).
struct block_terms {
  std::int64_t block_left = 0;   // L
  std::int64_t block_right = 0;  // R
  bool degenerate = false;       // R <= L: only the direct boundary sum
  cplx complete{};               // sum over residues r in [0, q)
  cplx coherent{};               // sum over m in [0, R - L) of e^{2 pi i (L+m) q eps}
  cplx left{};                   // n in [lo, Lq)
  cplx right{};                  // n in [Rq, hi]
  cplx total{};
};

block_terms block_factor(std::int64_t lo, std::int64_t hi, std::int64_t q, std::int64_t p,
                         double eps);

cplx evolve_rational_fast(const dirichlet_block& block, const rational_time& t,
                          const sample_point& x);

double maximal_over_times(const fourier_data& f, std::int64_t n,
                          std::span<const double> times, std::span<const double> x);

double sobolev_norm(const fourier_data& f, double s);

}  // namespace talbot
