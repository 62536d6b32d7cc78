#include "talbot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "talbot/parallel.hpp"

namespace talbot {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr std::size_t atom_cap = std::size_t{1} << 22;
constexpr std::size_t grid_cap = std::size_t{1} << 26;

double reduce_angle(double x) {
  double r = std::fmod(x, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

// periodic distance on [0, 2 pi)
double torus_distance(double a, double b) {
  const double u = std::abs(a - b);
  return std::min(u, two_pi - u);
}

std::int64_t sup_norm(std::span<const std::int64_t> k) {
  std::int64_t v = 0;
  for (auto c : k) v = std::max(v, c < 0 ? -c : c);
  return v;
}

std::int64_t norm2(std::span<const std::int64_t> k) {
  std::int64_t s = 0;
  for (auto c : k) s += c * c;
  return s;
}

void check_measure(const atomic_measure& mu) {
  if (mu.d < 1) throw std::invalid_argument("measure dimension must be positive");
  if (mu.positions.size() != mu.masses.size() * static_cast<std::size_t>(mu.d))
    throw std::invalid_argument("measure positions do not match its masses");
}

void check_pair(const fourier_data& f, const atomic_measure& mu) {
  check_measure(mu);
  if (!f.empty() && f.dimension() != mu.d)
    throw std::invalid_argument("datum and measure dimensions differ");
}

// |d_n(x_i)| for x_i = x0 + i h, i in [0, count). Rotation recurrences, resynced
// every 256 steps; direct evaluation near the singularity.
void plain_row(std::int64_t n, double x0, double h, std::size_t count, double* out) {
  const double half = static_cast<double>(n) + 0.5;
  const double bound = 2.0 * static_cast<double>(n) + 1.0;
  const std::complex<double> wa = std::polar(1.0, 0.5 * h);
  const std::complex<double> wb = std::polar(1.0, std::fmod(half * h, two_pi));
  std::complex<double> za, zb;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = x0 + static_cast<double>(i) * h;
    if (i % 256 == 0) {
      const double y = std::remainder(x, two_pi);
      za = std::polar(1.0, 0.5 * y);
      zb = std::polar(1.0, std::fmod(half * y, two_pi));
    } else {
      za *= wa;
      zb *= wb;
    }
    const double s = std::abs(za.imag());
    if (s < 1e-6) {
      out[i] = std::abs(dirichlet_kernel_1d(n, x));
    } else {
      out[i] = std::min(std::abs(zb.imag()) / s, bound);
    }
  }
}

using i128 = __int128;

constexpr std::int64_t envelope_scale = std::int64_t{1} << 40;

std::pair<std::int64_t, std::int64_t> mod_range(std::int64_t n, std::int64_t m, std::int64_t a,
                                                std::int64_t b);

std::int64_t mod_min(std::int64_t n, std::int64_t m, std::int64_t a, std::int64_t b);
std::int64_t mod_max(std::int64_t n, std::int64_t m, std::int64_t a, std::int64_t b);

std::int64_t floor_mod(i128 v, std::int64_t m) {
  i128 r = v % m;
  if (r < 0) r += m;
  return static_cast<std::int64_t>(r);
}

// Each run of constant floor((a x + b)/m) increases, so minima sit at run
// starts; the run starts form a linear sequence modulo a.
std::int64_t mod_min(std::int64_t n, std::int64_t m, std::int64_t a, std::int64_t b) {
  a = floor_mod(a, m);
  b = floor_mod(b, m);
  if (a == 0 || n == 1) return b;
  if (2 * a > m) return m - 1 - mod_max(n, m, m - a, m - 1 - b);
  const auto wraps = static_cast<std::int64_t>((static_cast<i128>(a) * (n - 1) + b) / m);
  if (wraps == 0) return b;
  return std::min(b, mod_min(wraps, a, floor_mod(-static_cast<i128>(m), a),
                             floor_mod(static_cast<i128>(b) - m, a)));
}

std::int64_t mod_max(std::int64_t n, std::int64_t m, std::int64_t a, std::int64_t b) {
  a = floor_mod(a, m);
  b = floor_mod(b, m);
  const std::int64_t last = floor_mod(static_cast<i128>(a) * (n - 1) + b, m);
  if (a == 0 || n == 1) return last;
  if (2 * a > m) return m - 1 - mod_min(n, m, m - a, m - 1 - b);
  const auto wraps = static_cast<std::int64_t>((static_cast<i128>(a) * (n - 1) + b) / m);
  if (wraps == 0) return last;
  return std::max(last, m - a + mod_max(wraps, a, floor_mod(-static_cast<i128>(m), a),
                                        floor_mod(static_cast<i128>(b) - m, a)));
}

// sup_{M <= n} |d_M(u)|. With u = pi A / D, |sin((M + 1/2) u)| = |cos(pi R_M / 2D)|
// for R_M = (2A M + A - D) mod 2D, so the sup needs only the extreme residues.
double envelope_at(std::int64_t n, double u) {
  const double bound = 2.0 * static_cast<double>(n) + 1.0;
  const double y = std::abs(std::remainder(u, two_pi));
  const double s = std::sin(0.5 * y);
  double v;
  if (s < 1e-8) {
    v = bound;
  } else {
    const auto a = static_cast<std::int64_t>(
        std::llround(y / std::numbers::pi * static_cast<double>(envelope_scale)));
    const std::int64_t m = 2 * envelope_scale;
    const std::int64_t lo = mod_min(n + 1, m, 2 * a, a - envelope_scale);
    const std::int64_t hi = mod_max(n + 1, m, 2 * a, a - envelope_scale);
    const std::int64_t near = std::min(lo, m - hi);
    const double best = std::cos(std::numbers::pi * static_cast<double>(near) /
                                 static_cast<double>(m));
    v = std::min(best / s, bound);
  }
  return std::max(v, std::abs(dirichlet_kernel_1d(n, u)));
}

void envelope_batch(std::int64_t n, const double* u, std::size_t count, double* out) {
  for (std::size_t j = 0; j < count; ++j) out[j] = envelope_at(n, u[j]);
}

std::pair<std::int64_t, std::int64_t> mod_range(std::int64_t n, std::int64_t m, std::int64_t a,
                                                std::int64_t b) {
  return {mod_min(n, m, a, b), mod_max(n, m, a, b)};
}

std::vector<double> gauss_legendre_nodes(int m, std::vector<double>& weights) {
  std::vector<double> x(static_cast<std::size_t>(m));
  weights.assign(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return x;
}

// Panels [2 pi m/(2n+1), 2 pi (m+1)/(2n+1)] clipped to [0, pi], each split into
// `split` pieces with an m-point rule.
double panel_integral(std::int64_t n, bool maximal, int points, int split) {
  std::vector<double> w;
  const auto x = gauss_legendre_nodes(points, w);
  const double step = two_pi / (2.0 * static_cast<double>(n) + 1.0);
  std::vector<double> nodes, weights;
  for (std::int64_t m = 0; m <= n; ++m) {
    const double a0 = static_cast<double>(m) * step;
    const double b0 = std::min(std::numbers::pi, static_cast<double>(m + 1) * step);
    if (b0 <= a0) break;
    for (int s = 0; s < split; ++s) {
      const double a = a0 + (b0 - a0) * s / split;
      const double b = a0 + (b0 - a0) * (s + 1) / split;
      for (std::size_t i = 0; i < x.size(); ++i) {
        nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * x[i]);
        weights.push_back(0.5 * (b - a) * w[i]);
      }
    }
  }
  std::vector<double> values(nodes.size());
  if (maximal) {
    constexpr std::size_t block = 1024;
    const std::size_t blocks = (nodes.size() + block - 1) / block;
    parallel_for(blocks, [&](std::size_t b) {
      const std::size_t lo = b * block;
      const std::size_t cnt = std::min(block, nodes.size() - lo);
      envelope_batch(n, nodes.data() + lo, cnt, values.data() + lo);
    });
  } else {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      values[i] = std::abs(dirichlet_kernel_1d(n, nodes[i]));
  }
  // compensated sum
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double y = weights[i] * values[i] - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return 2.0 * sum;
}

// phases e^{i k.x} of every mode at one point
std::vector<cplx> mode_phases(const fourier_data& f, std::span<const double> x) {
  std::vector<cplx> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto k = f.mode(i);
    double kx = 0.0;
    for (std::size_t l = 0; l < k.size(); ++l)
      kx += std::fmod(static_cast<double>(k[l]) * x[l], two_pi);
    out[i] = std::polar(1.0, kx);
  }
  return out;
}

struct plan_entry {
  double t = 0.0;
  std::int64_t q = 0;  // nonzero for t = 2 pi / q
};

std::vector<plan_entry> plan_entries(const time_plan& plan) {
  std::vector<plan_entry> out;
  for (std::int64_t q = std::max<std::int64_t>(plan.q_min, 1); q <= plan.q_max; ++q)
    out.push_back({two_pi / static_cast<double>(q), q});
  for (int i = 1; i <= plan.uniform; ++i)
    out.push_back({static_cast<double>(i) / (plan.uniform + 1.0), 0});
  return out;
}

}  // namespace

std::string normalization_name(normalization n) {
  return n == normalization::probability ? "probability" : "torus_volume";
}

double atomic_measure::total_mass() const {
  double s = 0.0;
  for (double m : masses) s += m;
  return s;
}

atomic_measure atomic_measure::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("mass scaling must be positive");
  atomic_measure out = *this;
  for (double& m : out.masses) m *= factor;
  return out;
}

atomic_measure cantor_measure(int d, double ratio, int level, normalization norm) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  if (!(ratio > 0.0 && ratio < 0.5)) throw std::invalid_argument("ratio must lie in (0, 1/2)");
  if (level < 0 || level > 24) throw std::invalid_argument("level must lie in [0, 24]");
  if (static_cast<double>(d) * level > 22.0) throw std::length_error("too many atoms");

  // left endpoints of the level-L intervals in [0, 1]
  std::vector<double> left{0.0};
  double len = 1.0;
  for (int l = 0; l < level; ++l) {
    std::vector<double> next;
    next.reserve(left.size() * 2);
    for (double a : left) {
      next.push_back(a);
      next.push_back(a + len * (1.0 - ratio));
    }
    left.swap(next);
    len *= ratio;
  }
  const std::size_t per_axis = left.size();
  std::size_t count = 1;
  for (int i = 0; i < d; ++i) count *= per_axis;
  if (count > atom_cap) throw std::length_error("too many atoms");

  atomic_measure mu;
  mu.d = d;
  mu.alpha = d * std::log(2.0) / std::log(1.0 / ratio);
  mu.norm = norm;
  const double total = norm == normalization::probability ? 1.0 : std::pow(two_pi, d);
  mu.masses.assign(count, total / static_cast<double>(count));
  mu.positions.resize(count * static_cast<std::size_t>(d));
  for (std::size_t a = 0; a < count; ++a) {
    std::size_t idx = a;
    for (int l = d - 1; l >= 0; --l) {
      const double c = left[idx % per_axis] + 0.5 * len;
      mu.positions[a * static_cast<std::size_t>(d) + static_cast<std::size_t>(l)] =
          reduce_angle(two_pi * c);
      idx /= per_axis;
    }
  }
  return mu;
}

atomic_measure uniform_measure(int d, std::int64_t m, normalization norm) {
  if (d < 1 || m < 1) throw std::invalid_argument("uniform measure needs d, m >= 1");
  const double count_d = std::pow(static_cast<double>(m), d);
  if (count_d > static_cast<double>(atom_cap)) throw std::length_error("too many atoms");
  const auto count = static_cast<std::size_t>(count_d);
  atomic_measure mu;
  mu.d = d;
  mu.alpha = d;
  mu.norm = norm;
  const double total = norm == normalization::probability ? 1.0 : std::pow(two_pi, d);
  mu.masses.assign(count, total / count_d);
  mu.positions.resize(count * static_cast<std::size_t>(d));
  for (std::size_t a = 0; a < count; ++a) {
    std::size_t idx = a;
    for (int l = d - 1; l >= 0; --l) {
      mu.positions[a * static_cast<std::size_t>(d) + static_cast<std::size_t>(l)] =
          two_pi * static_cast<double>(idx % static_cast<std::size_t>(m)) / static_cast<double>(m);
      idx /= static_cast<std::size_t>(m);
    }
  }
  return mu;
}

atomic_measure point_mass(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("point mass needs a position");
  atomic_measure mu;
  mu.d = static_cast<int>(x.size());
  mu.alpha = 0.0;
  for (double c : x) mu.positions.push_back(reduce_angle(c));
  mu.masses.push_back(1.0);
  return mu;
}

std::vector<double> geometric_radii(double base, int first, int last) {
  if (!(base > 1.0) || last < first) throw std::invalid_argument("bad radius grid");
  std::vector<double> r;
  for (int m = first; m <= last; ++m) r.push_back(two_pi * std::pow(base, -m));
  return r;
}

frostman_estimate frostman_constant(const atomic_measure& mu, double alpha,
                                    const std::vector<double>& radii) {
  check_measure(mu);
  if (radii.empty()) throw std::invalid_argument("radius grid is empty");
  for (double r : radii)
    if (!(r > 0.0)) throw std::invalid_argument("radii must be positive");
  if (mu.size() == 0) throw std::invalid_argument("measure has no atoms");

  frostman_estimate est;
  est.radii = radii;
  const std::size_t n = mu.size();
  std::vector<double> best(n, -1.0), best_r(n, 0.0);

  // d = 1: sorted positions with prefix masses; otherwise a direct scan.
  std::vector<std::size_t> order(n);
  std::vector<double> sorted, prefix;
  if (mu.d == 1) {
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return mu.positions[a] < mu.positions[b]; });
    sorted.resize(n);
    prefix.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      sorted[i] = mu.positions[order[i]];
      prefix[i + 1] = prefix[i] + mu.masses[order[i]];
    }
  }
  const double total = mu.d == 1 ? prefix[n] : mu.total_mass();
  // mass of [a, b] inside [0, 2 pi)
  auto interval_mass = [&](double a, double b) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), a) - sorted.begin();
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), b) - sorted.begin();
    return hi > lo ? prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)]
                   : 0.0;
  };

  parallel_for(n, [&](std::size_t c) {
    auto x = mu.position(c);
    std::vector<double> dist;
    if (mu.d > 1) {
      dist.resize(n);
      for (std::size_t a = 0; a < n; ++a) {
        auto y = mu.position(a);
        double m = 0.0;
        for (int l = 0; l < mu.d; ++l) m = std::max(m, torus_distance(x[l], y[l]));
        dist[a] = m;
      }
    }
    for (double r : radii) {
      const double rr = r * (1.0 + 1e-12);
      double mass = 0.0;
      if (rr >= std::numbers::pi) {
        mass = total;
      } else if (mu.d == 1) {
        const double a = x[0] - rr, b = x[0] + rr;
        if (a < 0.0) {
          mass = interval_mass(0.0, b) + interval_mass(a + two_pi, two_pi);
        } else if (b >= two_pi) {
          mass = interval_mass(a, two_pi) + interval_mass(0.0, b - two_pi);
        } else {
          mass = interval_mass(a, b);
        }
      } else {
        for (std::size_t a = 0; a < n; ++a)
          if (dist[a] <= rr) mass += mu.masses[a];
      }
      const double v = mass / std::pow(r, alpha);
      if (v > best[c]) {
        best[c] = v;
        best_r[c] = r;
      }
    }
  });
  std::size_t arg = 0;
  for (std::size_t c = 1; c < n; ++c)
    if (best[c] > best[arg]) arg = c;
  est.value = best[arg];
  est.argmax_r = best_r[arg];
  auto x = mu.position(arg);
  est.argmax_x.assign(x.begin(), x.end());
  return est;
}

double dirichlet_envelope_1d(std::int64_t n, double x) {
  if (n < 0) throw std::invalid_argument("truncation must be nonnegative");
  return envelope_at(n, x);
}

std::pair<std::int64_t, std::int64_t> linear_mod_range(std::int64_t n, std::int64_t m,
                                                       std::int64_t a, std::int64_t b) {
  if (n < 1 || m < 1) throw std::invalid_argument("linear_mod_range needs n, m >= 1");
  return mod_range(n, m, a, b);
}

convolution_result convolve_dirichlet_sup(const atomic_measure& mu, std::int64_t n,
                                          bool maximal, std::int64_t grid) {
  check_measure(mu);
  if (n < 1) throw std::invalid_argument("truncation must be at least 1");
  if (mu.size() == 0) throw std::invalid_argument("measure has no atoms");
  const double fine = 10.0 * static_cast<double>(n);
  if (grid == 0) grid = static_cast<std::int64_t>(std::ceil(two_pi * fine));
  if (two_pi / static_cast<double>(grid) > 1.0 / fine)
    throw std::invalid_argument("grid does not resolve the kernel: spacing above 1/(10N)");
  const double total_points = std::pow(static_cast<double>(grid), mu.d);
  if (total_points > static_cast<double>(grid_cap)) throw std::length_error("grid too large");

  const auto g = static_cast<std::size_t>(grid);
  const double h = two_pi / static_cast<double>(grid);
  const std::size_t atoms = mu.size();
  const int d = mu.d;

  // one kernel row per atom and axis over x_i = i h
  auto row = [&](double a, std::size_t lo, std::size_t cnt, double* out) {
    const double x0 = static_cast<double>(lo) * h - a;
    plain_row(n, x0, h, cnt, out);
    if (maximal) {
      std::vector<double> u(cnt), env(cnt);
      for (std::size_t i = 0; i < cnt; ++i) u[i] = x0 + static_cast<double>(i) * h;
      envelope_batch(n, u.data(), cnt, env.data());
      for (std::size_t i = 0; i < cnt; ++i) out[i] = std::max(out[i], env[i]);
    }
  };

  std::vector<double> field(static_cast<std::size_t>(total_points), 0.0);
  constexpr std::size_t block = 4096;
  if (d == 1) {
    const std::size_t blocks = (g + block - 1) / block;
    parallel_for(blocks, [&](std::size_t b) {
      const std::size_t lo = b * block;
      const std::size_t cnt = std::min(block, g - lo);
      std::vector<double> k(cnt);
      double* f = field.data() + lo;
      for (std::size_t a = 0; a < atoms; ++a) {
        row(mu.positions[a], lo, cnt, k.data());
        const double m = mu.masses[a];
        for (std::size_t i = 0; i < cnt; ++i) f[i] += m * k[i];
      }
    });
  } else {
    const double row_doubles = static_cast<double>(atoms) * d * static_cast<double>(g);
    if (row_doubles > static_cast<double>(grid_cap)) throw std::length_error("grid too large");
    std::vector<double> rows(atoms * static_cast<std::size_t>(d) * g);
    parallel_for(atoms, [&](std::size_t a) {
      for (int l = 0; l < d; ++l)
        row(mu.positions[a * static_cast<std::size_t>(d) + static_cast<std::size_t>(l)], 0, g,
            rows.data() + (a * static_cast<std::size_t>(d) + static_cast<std::size_t>(l)) * g);
    });
    // outer index over the first axis
    const std::size_t inner = field.size() / g;
    parallel_for(g, [&](std::size_t i0) {
      double* f = field.data() + i0 * inner;
      for (std::size_t a = 0; a < atoms; ++a) {
        const double* r = rows.data() + a * static_cast<std::size_t>(d) * g;
        const double head = mu.masses[a] * r[i0];
        for (std::size_t p = 0; p < inner; ++p) {
          double v = head;
          std::size_t idx = p;
          for (int l = d - 1; l >= 1; --l) {
            v *= r[static_cast<std::size_t>(l) * g + idx % g];
            idx /= g;
          }
          f[p] += v;
        }
      }
    });
  }

  convolution_result out;
  out.grid = grid;
  const auto it = std::max_element(field.begin(), field.end());
  out.value = *it;
  std::size_t idx = static_cast<std::size_t>(it - field.begin());
  out.argmax.assign(static_cast<std::size_t>(d), 0.0);
  for (int l = d - 1; l >= 0; --l) {
    out.argmax[static_cast<std::size_t>(l)] = static_cast<double>(idx % g) * h;
    idx /= g;
  }
  return out;
}

quadrature_result dirichlet_l1(std::int64_t n, bool maximal, int d) {
  if (n < 1) throw std::invalid_argument("truncation must be at least 1");
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  double fine = 0.0, coarse = 0.0;
  if (maximal) {
    // the envelope has kinks where the maximizing M switches
    fine = panel_integral(n, true, 4, 2);
    coarse = panel_integral(n, true, 4, 1);
  } else {
    fine = panel_integral(n, false, 16, 1);
    coarse = panel_integral(n, false, 8, 1);
  }
  const double err = std::abs(fine - coarse);
  if (!std::isfinite(fine) || err > 1e-2 * fine)
    throw std::runtime_error("kernel quadrature did not converge");
  quadrature_result r;
  r.value = std::pow(fine, d);
  r.error_estimate = d * std::pow(fine, d - 1) * err;
  return r;
}

std::vector<double> time_plan::times() const {
  std::vector<double> out;
  for (const auto& e : plan_entries(*this)) out.push_back(e.t);
  return out;
}

std::string time_plan::describe() const {
  std::ostringstream s;
  s << "2pi/q for q in [" << q_min << ", " << q_max << "] plus i/" << (uniform + 1)
    << " for i in [1, " << uniform << "]";
  return s.str();
}

std::vector<double> maximal_profile(const fourier_data& f, const atomic_measure& mu,
                                    const time_plan& plan) {
  check_pair(f, mu);
  const auto entries = plan_entries(plan);
  if (entries.empty()) throw std::invalid_argument("time plan is empty");
  std::vector<double> out(mu.size(), 0.0);
  if (f.empty()) return out;

  // c_k e^{-i |k|^2 t} for every plan time; exact residues at t = 2 pi/q
  std::vector<cplx> table(entries.size() * f.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::int64_t k2 = norm2(f.mode(i));
      double phase;
      if (entries[e].q > 0) {
        const std::int64_t r = k2 % entries[e].q;
        phase = -two_pi * static_cast<double>(r) / static_cast<double>(entries[e].q);
      } else {
        phase = -std::fmod(static_cast<double>(k2) * entries[e].t, two_pi);
      }
      table[e * f.size() + i] = f.coefficient(i) * std::polar(1.0, phase);
    }
  }
  parallel_for(mu.size(), [&](std::size_t a) {
    const auto ph = mode_phases(f, mu.position(a));
    double best = 0.0;
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const cplx* g = table.data() + e * f.size();
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        re += g[i].real() * ph[i].real() - g[i].imag() * ph[i].imag();
        im += g[i].real() * ph[i].imag() + g[i].imag() * ph[i].real();
      }
      best = std::max(best, std::hypot(re, im));
    }
    out[a] = best;
  });
  return out;
}

double maximal_lp_norm(const fourier_data& f, const atomic_measure& mu, double p,
                       const time_plan& plan) {
  if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
  const auto v = maximal_profile(f, mu, plan);
  double s = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a) s += mu.masses[a] * std::pow(v[a], p);
  return std::pow(s, 1.0 / p);
}

transference_result transference_ratio(const fourier_data& f, const atomic_measure& mu,
                                       double p, double s, double alpha,
                                       const time_plan& plan,
                                       const std::vector<double>& radii) {
  if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
  check_pair(f, mu);
  const double d = mu.d;
  if (!(s > (d - alpha) / p + d / (d + 2.0)))
    throw std::invalid_argument("s must exceed (d - alpha)/p + d/(d + 2)");
  transference_result r;
  if (f.empty()) return r;
  r.numerator = maximal_lp_norm(f, mu, p, plan);
  r.frostman = frostman_constant(mu, alpha, radii).value;
  r.sobolev = sobolev_norm(f, s);
  const double den = std::pow(r.frostman, 1.0 / p) * r.sobolev;
  if (!(den > 0.0)) throw std::domain_error("transference denominator vanishes");
  r.ratio = r.numerator / den;
  return r;
}

double maximal_truncation_l2(const fourier_data& f, const atomic_measure& mu, double t,
                             const std::vector<std::int64_t>& truncations) {
  check_pair(f, mu);
  if (truncations.empty()) throw std::invalid_argument("truncation set is empty");
  if (f.empty()) return 0.0;
  std::vector<std::int64_t> cuts = truncations;
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.front() < 0) throw std::invalid_argument("truncations must be nonnegative");

  // modes ordered by shell |k|_inf
  std::vector<std::size_t> order(f.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return sup_norm(f.mode(a)) < sup_norm(f.mode(b));
  });
  std::vector<cplx> evolved(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    evolved[i] = f.coefficient(i) *
                 std::polar(1.0, -std::fmod(static_cast<double>(norm2(f.mode(i))) * t, two_pi));

  std::vector<double> v(mu.size(), 0.0);
  parallel_for(mu.size(), [&](std::size_t a) {
    const auto ph = mode_phases(f, mu.position(a));
    cplx sum{};
    double best = 0.0;
    std::size_t c = 0;
    for (std::size_t idx = 0; idx <= order.size(); ++idx) {
      const std::int64_t shell =
          idx < order.size() ? sup_norm(f.mode(order[idx])) : std::numeric_limits<std::int64_t>::max();
      while (c < cuts.size() && cuts[c] < shell) {
        best = std::max(best, std::abs(sum));
        ++c;
      }
      if (idx < order.size()) sum += evolved[order[idx]] * ph[order[idx]];
    }
    v[a] = best;
  });
  double s = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a) s += mu.masses[a] * v[a] * v[a];
  return std::sqrt(s);
}

double l2_norm(const fourier_data& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::norm(f.coefficient(i));
  return std::sqrt(s);
}

carleson_result carleson_l2_ratio(const fourier_data& f, const atomic_measure& mu, double s,
                                  double alpha, const std::vector<std::int64_t>& truncations,
                                  double t, const std::vector<double>& radii, double eps) {
  check_pair(f, mu);
  const double d = mu.d;
  if (!(s > 0.0 && s <= d / 2.0)) throw std::invalid_argument("s must lie in (0, d/2]");
  if (!(alpha > d - 2.0 * s))
    throw std::invalid_argument("alpha <= d - 2s: the maximal estimate is ill-posed");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  carleson_result r;
  if (f.empty()) return r;
  const auto n = std::max<std::int64_t>(f.bandwidth(), 1);
  r.numerator = maximal_truncation_l2(f, mu, t, truncations);
  r.frostman = frostman_constant(mu, alpha, radii).value;
  r.l2 = l2_norm(f);
  const double den = std::sqrt(r.frostman) *
                     std::pow(static_cast<double>(n), (d - alpha) / 2.0 + eps) * r.l2;
  if (!(den > 0.0)) throw std::domain_error("Carleson denominator vanishes");
  r.ratio = r.numerator / den;
  return r;
}

}  // namespace talbot
