#include "talbot/fractal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

#include "talbot/parallel.hpp"

namespace talbot {

namespace {

using rational = boost::multiprecision::cpp_rational;

constexpr double two_pi = 2.0 * std::numbers::pi;
// Relative band inside which floating-point comparisons defer to exact ones.
constexpr double fuzz = 1e-9;

rational exact(double v) { return rational(v); }

rational frac(std::int64_t p, std::int64_t q) { return rational(p, q); }

rational power(const rational& base, int e) {
  rational v = 1;
  for (int i = 0; i < e; ++i) v *= base;
  return v;
}

bool integral(double tau) { return tau == std::round(tau) && tau >= 1.0 && tau <= 16.0; }

// q^{-tau} exactly when tau is an integer.
rational radius_exact(std::int64_t q, double tau) {
  return rational(1, 1) / power(rational(q), static_cast<int>(tau));
}

// (beta/n)^{d+1}, the d-th power of the margin (beta/n)^{1+1/d}.
rational margin_power(double beta, std::int64_t n, int d) {
  return power(exact(beta) / rational(n), d + 1);
}

// a >= margin, with a rational and margin^d given.
bool at_least_margin(const rational& a, const rational& margin_d, int d) {
  return a >= 0 && power(a, d) >= margin_d;
}

double anchor(const lattice_point& p, std::int64_t q, int i) {
  return static_cast<double>(p[i]) / static_cast<double>(q);
}

void check_box(const box& c) {
  if (c.lo.empty() || c.lo.size() != c.hi.size())
    throw std::invalid_argument("box needs matching nonempty corners");
  for (std::size_t i = 0; i < c.lo.size(); ++i)
    if (!(c.lo[i] < c.hi[i])) throw std::invalid_argument("box has an empty side");
}

// Cartesian product of per-coordinate candidate lists, lexicographic.
template <class F>
void for_each_tuple(const std::vector<std::vector<std::int64_t>>& axes, F&& f) {
  for (const auto& a : axes)
    if (a.empty()) return;
  const std::size_t d = axes.size();
  std::vector<std::size_t> idx(d, 0);
  lattice_point p(d);
  while (true) {
    for (std::size_t i = 0; i < d; ++i) p[i] = axes[i][idx[i]];
    f(p);
    std::size_t i = d;
    while (i > 0) {
      --i;
      if (++idx[i] < axes[i].size()) break;
      idx[i] = 0;
      if (i == 0) return;
    }
  }
}

struct cell_hash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (auto x : v) h = (h ^ static_cast<std::size_t>(x)) * 0x100000001b3ULL;
    return h;
  }
};

// Uniform grid over anchor positions for neighbour queries at one scale.
class anchor_grid {
 public:
  anchor_grid(int d, double cell) : d_(d), cell_(cell) {}

  void insert(const std::vector<double>& x, std::size_t id) { cells_[key(x)].push_back(id); }

  template <class F>
  bool any_neighbour(const std::vector<double>& x, F&& pred) const {
    const auto base = key(x);
    std::vector<std::int64_t> k(base);
    std::vector<int> off(static_cast<std::size_t>(d_), -1);
    while (true) {
      for (int i = 0; i < d_; ++i) k[i] = base[i] + off[i];
      if (auto it = cells_.find(k); it != cells_.end())
        for (auto id : it->second)
          if (pred(id)) return true;
      int i = d_ - 1;
      while (i >= 0 && off[i] == 1) off[i--] = -1;
      if (i < 0) return false;
      ++off[i];
    }
  }

 private:
  std::vector<std::int64_t> key(const std::vector<double>& x) const {
    std::vector<std::int64_t> k(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      k[i] = static_cast<std::int64_t>(std::floor(x[i] / cell_));
    return k;
  }

  int d_;
  double cell_;
  std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, cell_hash> cells_;
};

struct separation_context {
  int d;
  std::int64_t n;
  double tau;
  double beta;
  double margin;
  rational margin_d;     // margin^d
  rational separation_d;  // (3 margin)^d
};

separation_context make_context(int d, std::int64_t n, double tau, double beta) {
  separation_context ctx{d, n, tau, beta, std::pow(beta / static_cast<double>(n), 1.0 + 1.0 / d),
                         margin_power(beta, n, d), 0};
  ctx.separation_d = power(rational(3), d) * ctx.margin_d;
  return ctx;
}

bool anchor_inside(const separation_context& ctx, const box& c, const lattice_point& p,
                   std::int64_t q) {
  for (int i = 0; i < ctx.d; ++i) {
    const double x = anchor(p, q, i);
    const double lo_gap = x - c.lo[i];
    const double hi_gap = c.hi[i] - x;
    for (int side = 0; side < 2; ++side) {
      const double g = side == 0 ? lo_gap : hi_gap;
      if (g > ctx.margin * (1.0 + fuzz)) continue;
      if (g < ctx.margin * (1.0 - fuzz)) return false;
      const rational a = side == 0 ? frac(p[i], q) - exact(c.lo[i]) : exact(c.hi[i]) - frac(p[i], q);
      if (!at_least_margin(a, ctx.margin_d, ctx.d)) return false;
    }
  }
  return true;
}

// Sup-norm anchor distance strictly above 3 margin.
bool anchors_far(const separation_context& ctx, const lattice_point& p, std::int64_t q,
                 const lattice_point& p2, std::int64_t q2) {
  const double thr = 3.0 * ctx.margin;
  double best = 0.0;
  for (int i = 0; i < ctx.d; ++i)
    best = std::max(best, std::abs(anchor(p, q, i) - anchor(p2, q2, i)));
  if (best > thr * (1.0 + fuzz)) return true;
  if (best < thr * (1.0 - fuzz)) return false;
  for (int i = 0; i < ctx.d; ++i) {
    rational delta = frac(p[i], q) - frac(p2[i], q2);
    if (delta < 0) delta = -delta;
    if (power(delta, ctx.d) > ctx.separation_d) return true;
  }
  return false;
}

std::vector<std::int64_t> axis_candidates(double lo, double hi, std::int64_t q) {
  const double qd = static_cast<double>(q);
  const auto a = static_cast<std::int64_t>(std::ceil(lo * qd)) - 1;
  const auto b = static_cast<std::int64_t>(std::floor(hi * qd)) + 1;
  std::vector<std::int64_t> out;
  for (std::int64_t p = a; p <= b; ++p) out.push_back(p);
  return out;
}

using i128 = __int128;

// x = m 2^-e exactly; values below 2^-40 are treated as 0.
struct dyadic {
  i128 m = 0;
  int e = 0;
};

dyadic to_dyadic(double x) {
  if (!(x > 0x1p-40)) return {};
  int k = 0;
  const double f = std::frexp(x, &k);
  return {static_cast<i128>(std::ldexp(f, 53)), 53 - k};
}

// sign of p/q - x
int compare(std::int64_t p, std::int64_t q, const dyadic& x) {
  const i128 lhs = static_cast<i128>(p) << x.e;
  const i128 rhs = x.m * q;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

// Reduced fractions c/d in [lo, hi] with d <= n, ascending: Stern-Brocot descent
// to the Farey neighbours of lo, then the successor walk.
std::vector<std::pair<std::int64_t, std::int64_t>> farey_range(double lo, double hi,
                                                               std::int64_t n) {
  const dyadic x = to_dyadic(std::max(lo, 0.0));
  const dyadic top = to_dyadic(std::min(hi, 1.0));
  std::int64_t lp = 0, lq = 1, rp = 1, rq = 0;  // left < x <= right
  if (x.m == 0) {
    rp = 0;
    rq = 1;
    lp = -1;
    lq = n;  // predecessor of 0/1 for the walk
  } else {
    const i128 scale = static_cast<i128>(1) << x.e;
    constexpr std::int64_t unbounded = std::numeric_limits<std::int64_t>::max();
    while (true) {
      bool moved = false;
      i128 a = rp * scale - x.m * rq;  // >= 0
      i128 b = x.m * lq - lp * scale;  // > 0
      std::int64_t k = rq > 0 ? (n - lq) / rq : unbounded;
      if (a > 0) k = static_cast<std::int64_t>(std::min<i128>(k, (b - 1) / a));
      if (k > 0) {
        lp += k * rp;
        lq += k * rq;
        moved = true;
      }
      a = rp * scale - x.m * rq;
      b = x.m * lq - lp * scale;
      k = static_cast<std::int64_t>(std::min<i128>((n - rq) / lq, a / b));
      if (k > 0) {
        rp += k * lp;
        rq += k * lq;
        moved = true;
      }
      if (!moved) break;
    }
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  std::int64_t a = lp, b = lq, c = rp, d = rq;
  while (d > 0 && c <= d && (top.m == 0 ? c == 0 : compare(c, d, top) <= 0)) {
    out.emplace_back(c, d);
    const std::int64_t k = (n + b) / d;
    const std::int64_t c2 = k * c - a, d2 = k * d - b;
    a = c;
    b = d;
    c = c2;
    d = d2;
  }
  return out;
}

// Anchor candidates p (per axis) for every q in [q_lo, n], enumerated from the
// Farey fractions of the axis interval; a superset of the admissible anchors.
using candidate_row = std::pair<std::int64_t, std::vector<std::vector<std::int64_t>>>;

std::vector<candidate_row> farey_candidates(const box& c, double margin, std::int64_t q_lo,
                                            std::int64_t n) {
  const int d = c.dimension();
  const double pad = margin * 1e-8 + 1e-14;
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> axes(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    auto& v = axes[static_cast<std::size_t>(i)];
    for (const auto& [a, b] : farey_range(c.lo[i] + margin - pad, c.hi[i] - margin + pad, n))
      for (std::int64_t m = std::max<std::int64_t>(1, (q_lo + b - 1) / b); m * b <= n; ++m)
        v.emplace_back(m * b, m * a);
    std::sort(v.begin(), v.end());
  }
  std::vector<candidate_row> out;
  std::vector<std::size_t> pos(static_cast<std::size_t>(d), 0);
  const auto& first = axes[0];
  while (pos[0] < first.size()) {
    const std::int64_t q = first[pos[0]].first;
    candidate_row row{q, std::vector<std::vector<std::int64_t>>(static_cast<std::size_t>(d))};
    bool shared = true;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      auto& k = pos[i];
      while (k < axes[i].size() && axes[i][k].first < q) ++k;
      while (k < axes[i].size() && axes[i][k].first == q) row.second[i].push_back(axes[i][k++].second);
      if (row.second[i].empty()) shared = false;
    }
    if (shared) out.push_back(std::move(row));
  }
  return out;
}

double twin_gap(const cube& a, const cube& b) {
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < a.dimension(); ++i) {
    const double g = std::max(b.lower(i) - a.upper(i), a.lower(i) - b.upper(i));
    best = std::max(best, g);
  }
  return best;
}

double min_pairwise_gap(const std::vector<cube>& cubes) {
  double best = std::numeric_limits<double>::infinity();
  if (cubes.size() < 2) return best;
  if (cubes.front().dimension() == 1) {
    std::vector<const cube*> order;
    for (const auto& c : cubes) order.push_back(&c);
    std::sort(order.begin(), order.end(),
              [](const cube* a, const cube* b) { return a->lower(0) < b->lower(0); });
    for (std::size_t i = 1; i < order.size(); ++i)
      best = std::min(best, twin_gap(*order[i - 1], *order[i]));
    return best;
  }
  for (std::size_t i = 0; i < cubes.size(); ++i)
    for (std::size_t k = i + 1; k < cubes.size(); ++k)
      best = std::min(best, twin_gap(cubes[i], cubes[k]));
  return best;
}

// Exact containment of cube b inside box c (integer tau) or long double check.
bool cube_inside(const cube& b, const box& c, double tau, bool& exact_flag) {
  if (integral(tau) && b.r2 == -b.r1) {
    bool clear = true;
    for (int i = 0; i < b.dimension() && clear; ++i) {
      const double x = anchor(b.p, b.q, i);
      clear = x - b.r2 - c.lo[i] > 1e-13 && c.hi[i] - x - b.r2 > 1e-13;
    }
    if (clear) return true;
    const rational r = radius_exact(b.q, tau);
    for (int i = 0; i < b.dimension(); ++i) {
      const rational x = frac(b.p[i], b.q);
      if (x - r < exact(c.lo[i]) || x + r > exact(c.hi[i])) return false;
    }
    return true;
  }
  exact_flag = false;
  for (int i = 0; i < b.dimension(); ++i) {
    const long double x = static_cast<long double>(b.p[i]) / static_cast<long double>(b.q);
    if (x + b.r1 < c.lo[i] || x + b.r2 > c.hi[i]) return false;
  }
  return true;
}

}  // namespace

double cube::lower(int i) const { return anchor(p, q, i) + r1; }
double cube::upper(int i) const { return anchor(p, q, i) + r2; }

box box::of(const cube& c) {
  box b;
  for (int i = 0; i < c.dimension(); ++i) {
    b.lo.push_back(c.lower(i));
    b.hi.push_back(c.upper(i));
  }
  return b;
}

cube_family gamma_level_set(const counterexample_params& params, int j, std::size_t cap) {
  const double count = gamma_level_count(params, j);
  if (count > static_cast<double>(cap))
    throw std::length_error("Gamma^" + std::to_string(j) + " has " +
                            std::to_string(static_cast<std::uint64_t>(count)) +
                            " cubes, above the cap " + std::to_string(cap));
  const auto times = time_set(params, j);
  const double scale = std::pow(static_cast<double>(params.lambda), -j);
  cube_family fam;
  fam.tag = "gamma";
  fam.level = j;
  fam.q_lo = times.front().q;
  fam.q_hi = times.back().q;
  fam.constraints = "q = 0 mod 4, p_i even in [q/4, q/2], offsets [c1, c2] lambda^-j";
  fam.cubes.reserve(static_cast<std::size_t>(count));
  for (const auto& t : times) {
    const auto anchors = anchor_window(t.q);
    std::vector<std::vector<std::int64_t>> axes(static_cast<std::size_t>(params.d), anchors);
    for_each_tuple(axes, [&](const lattice_point& p) {
      fam.cubes.push_back({p, t.q, params.c1 * scale, params.c2 * scale});
    });
  }
  return fam;
}

double gamma_level_count(const counterexample_params& params, int j) {
  const auto times = time_set(params, j);
  double total = 0.0;
  for (const auto& t : times) {
    const std::int64_t lo = (t.q + 7) / 8;
    const std::int64_t hi = t.q / 4;
    const double w = static_cast<double>(std::max<std::int64_t>(0, hi - lo + 1));
    total += std::pow(w, params.d);
  }
  return total;
}

covering_fit covering_exponent(const std::vector<std::pair<int, double>>& counts,
                               std::int64_t lambda) {
  if (counts.size() < 3) throw std::invalid_argument("covering exponent needs at least 3 levels");
  std::vector<double> x, y;
  for (const auto& [j, c] : counts) {
    if (!(c > 0.0)) throw std::invalid_argument("covering exponent needs positive counts");
    x.push_back(j * std::log(static_cast<double>(lambda)));
    y.push_back(std::log(c));
  }
  const linear_fit f = least_squares(x, y);
  return {f.slope, f.residual};
}

covering_fit covering_exponent(const std::vector<cube_family>& families, std::int64_t lambda) {
  std::vector<std::pair<int, double>> counts;
  for (const auto& f : families) counts.emplace_back(f.level, static_cast<double>(f.size()));
  return covering_exponent(counts, lambda);
}

std::vector<witness> membership_G(const std::vector<double>& x, double tau, double c1,
                                  double c2, std::int64_t q_max) {
  for (double v : x)
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("point must lie in [0,1]^d");
  std::vector<witness> out;
  for (std::int64_t q = 1; q <= q_max; ++q) {
    const long double qt = std::pow(static_cast<long double>(q), static_cast<long double>(tau));
    std::vector<std::vector<std::int64_t>> axes;
    for (double xi : x) {
      const long double top = q * static_cast<long double>(xi) - c1 * q / qt;
      const long double bottom = q * static_cast<long double>(xi) - c2 * q / qt;
      std::vector<std::int64_t> ok;
      for (auto p = static_cast<std::int64_t>(std::floor(bottom)) - 1;
           p <= static_cast<std::int64_t>(std::ceil(top)) + 1; ++p) {
        if (!(8 * p > q && 4 * p < q)) continue;
        const long double diff = static_cast<long double>(xi) - static_cast<long double>(p) / q;
        if (diff >= c1 / qt && diff <= c2 / qt) ok.push_back(p);
      }
      axes.push_back(std::move(ok));
    }
    for_each_tuple(axes, [&](const lattice_point& p) { out.push_back({p, q}); });
  }
  return out;
}

bool dirichlet_bound_holds(const std::vector<double>& x, const witness& w, std::int64_t n) {
  const int d = static_cast<int>(x.size());
  for (int i = 0; i < d; ++i) {
    rational e = exact(x[i]) * w.q - w.p[i];
    if (e < 0) e = -e;
    if (power(e, d) * n > 1) return false;
  }
  return true;
}

witness dirichlet_approx(const std::vector<double>& x, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("Dirichlet approximation needs n >= 1");
  if (x.empty()) throw std::invalid_argument("empty point");
  const int d = static_cast<int>(x.size());
  const double bound = std::pow(static_cast<double>(n), -1.0 / d);
  for (std::int64_t q = 1; q <= n; ++q) {
    witness w;
    w.q = q;
    double worst = 0.0;
    for (double xi : x) {
      const double v = xi * static_cast<double>(q);
      const auto p = static_cast<std::int64_t>(std::llround(v));
      w.p.push_back(p);
      worst = std::max(worst, std::abs(v - static_cast<double>(p)));
    }
    if (worst > bound * (1.0 + fuzz)) continue;
    if (dirichlet_bound_holds(x, w, n)) return w;
  }
  throw std::runtime_error("no Dirichlet approximation with q <= n found");
}

separated_result separated_cubes(const box& c, std::int64_t n, double tau,
                                 const separation_rule& rule) {
  check_box(c);
  if (n < 1) throw std::invalid_argument("n must be positive");
  if (!(rule.beta >= 1.0)) throw std::invalid_argument("beta must be at least 1");
  const int d = c.dimension();
  if (!(tau >= 1.0 + 1.0 / d - 1e-12))
    throw std::invalid_argument("tau below 1 + 1/d: balls B(p/q, q^-tau) exceed the margin");
  const auto q_lo = static_cast<std::int64_t>(std::ceil(static_cast<double>(n) / rule.beta - 1e-12));
  if (q_lo > n) throw std::invalid_argument("window [n/beta, n] is empty");

  const separation_context ctx = make_context(d, n, tau, rule.beta);
  separated_result out;
  out.margin = ctx.margin;
  out.guaranteed_gap = std::pow(static_cast<double>(n), -1.0 - 1.0 / d);
  out.family.tag = "separated";
  out.family.q_lo = std::max<std::int64_t>(q_lo, 1);
  out.family.q_hi = n;
  out.family.constraints = "beta=" + std::to_string(rule.beta) + ", lexicographic (q, p) greedy";

  anchor_grid grid(d, 3.0 * ctx.margin * (1.0 + 1e-6));
  std::vector<double> pos(static_cast<std::size_t>(d));
  // Small boxes hold few fractions; walking them beats scanning every q.
  bool small = true;
  for (int i = 0; i < d; ++i)
    if ((c.hi[i] - c.lo[i]) * static_cast<double>(n) >= 1.0) small = false;
  std::vector<candidate_row> sparse;
  if (small) sparse = farey_candidates(c, ctx.margin, out.family.q_lo, n);
  auto next_q = sparse.begin();
  for (std::int64_t q = out.family.q_lo; q <= n; ++q) {
    std::vector<std::vector<std::int64_t>> axes;
    if (small) {
      if (next_q == sparse.end()) break;
      q = next_q->first;
      axes = std::move(next_q->second);
      ++next_q;
    } else {
      for (int i = 0; i < d; ++i)
        axes.push_back(axis_candidates(c.lo[i] + ctx.margin, c.hi[i] - ctx.margin, q));
    }
    const double r = std::pow(static_cast<double>(q), -tau);
    for_each_tuple(axes, [&](const lattice_point& p) {
      if (!anchor_inside(ctx, c, p, q)) return;
      ++out.candidates;
      for (int i = 0; i < d; ++i) pos[i] = anchor(p, q, i);
      const auto& cubes = out.family.cubes;
      const bool clash = grid.any_neighbour(pos, [&](std::size_t id) {
        return !anchors_far(ctx, p, q, cubes[id].p, cubes[id].q);
      });
      if (clash) return;
      grid.insert(pos, out.family.cubes.size());
      out.family.cubes.push_back({p, q, -r, r});
    });
  }
  return out;
}

separation_audit audit_separated(const separated_result& r, const box& c, std::int64_t n,
                                 double tau, const separation_rule& rule) {
  separation_audit a;
  const int d = c.dimension();
  const separation_context ctx = make_context(d, n, tau, rule.beta);
  const auto& cubes = r.family.cubes;
  for (const auto& cb : cubes) {
    for (int i = 0; i < d; ++i) {
      const rational x = frac(cb.p[i], cb.q);
      if (!at_least_margin(x - exact(c.lo[i]), ctx.margin_d, d) ||
          !at_least_margin(exact(c.hi[i]) - x, ctx.margin_d, d))
        a.anchors_inside = false;
    }
    if (!cube_inside(cb, c, tau, a.exact)) a.cubes_inside = false;
  }

  // Pairs far apart in coordinate 0 are settled by a safe floating-point margin.
  std::vector<std::size_t> order(cubes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return anchor(cubes[x].p, cubes[x].q, 0) < anchor(cubes[y].p, cubes[y].q, 0);
  });
  const double r_max = cubes.empty() ? 0.0 : std::pow(static_cast<double>(r.family.q_lo), -tau);
  const double window = (3.0 * ctx.margin + 2.0 * r_max + r.guaranteed_gap) * (1.0 + 1e-6);
  const rational gap_d = power(rational(1) / rational(n), d + 1);  // (n^{-1-1/d})^d
  a.min_gap = std::numeric_limits<double>::infinity();
  const bool exact_r = integral(tau);
  if (!exact_r) a.exact = false;
  for (std::size_t s = 0; s < order.size(); ++s) {
    const cube& u = cubes[order[s]];
    for (std::size_t t = s + 1; t < order.size(); ++t) {
      const cube& v = cubes[order[t]];
      if (anchor(v.p, v.q, 0) - anchor(u.p, u.q, 0) > window) break;
      if (!anchors_far(ctx, u.p, u.q, v.p, v.q)) a.anchors_separated = false;
      a.min_gap = std::min(a.min_gap, twin_gap(u, v));
      bool ok = false;
      if (exact_r) {
        const rational ru = radius_exact(u.q, tau), rv = radius_exact(v.q, tau);
        for (int i = 0; i < d && !ok; ++i) {
          rational delta = frac(u.p[i], u.q) - frac(v.p[i], v.q);
          if (delta < 0) delta = -delta;
          const rational g = delta - ru - rv;
          ok = g >= 0 && power(g, d) >= gap_d;
        }
      } else {
        ok = twin_gap(u, v) >= r.guaranteed_gap * (1.0 - 1e-12);
      }
      if (!ok) a.gaps_ok = false;
    }
  }
  if (order.size() < 2) a.min_gap = 0.0;
  return a;
}

bool is_greedy_maximal(const separated_result& r, const box& c, std::int64_t n, double tau,
                       const separation_rule& rule) {
  const int d = c.dimension();
  const separation_context ctx = make_context(d, n, tau, rule.beta);
  bool maximal = true;
  for (std::int64_t q = r.family.q_lo; q <= n && maximal; ++q) {
    std::vector<std::vector<std::int64_t>> axes;
    for (int i = 0; i < d; ++i)
      axes.push_back(axis_candidates(c.lo[i] + ctx.margin, c.hi[i] - ctx.margin, q));
    for_each_tuple(axes, [&](const lattice_point& p) {
      if (!maximal || !anchor_inside(ctx, c, p, q)) return;
      bool blocked = false;
      for (const auto& cb : r.family.cubes) {
        if ((cb.q == q && cb.p == p) || !anchors_far(ctx, p, q, cb.p, cb.q)) {
          blocked = true;
          break;
        }
      }
      if (!blocked) maximal = false;
    });
  }
  return maximal;
}

nested_result build_nested_levels(const nested_seed& seed, int k_levels) {
  if (k_levels < 1) throw std::invalid_argument("need at least one level");
  if (seed.d < 1) throw std::invalid_argument("d must be at least 1");
  if (!(seed.c1 > 0.0 && seed.c1 < seed.c2 && seed.c2 <= 1.0))
    throw std::invalid_argument("offset window needs 0 < c1 < c2 <= 1");
  if (!(seed.growth > 1.0)) throw std::invalid_argument("growth factor must exceed 1");

  nested_result out;
  out.plan.k_levels = k_levels;
  out.plan.d = seed.d;
  out.plan.tau = seed.tau;

  auto twin = [&](const cube& b) {
    const double r = std::pow(static_cast<double>(b.q), -seed.tau);
    return cube{b.p, b.q, seed.c1 * r, seed.c2 * r};
  };

  std::vector<cube> parents;
  box e0{std::vector<double>(static_cast<std::size_t>(seed.d), 0.125),
         std::vector<double>(static_cast<std::size_t>(seed.d), 0.25)};
  std::int64_t n = seed.n1;
  for (int k = 1; k <= k_levels; ++k) {
    if (k > 1)
      n = std::min<std::int64_t>(seed.n_cap,
                                 static_cast<std::int64_t>(std::ceil(seed.growth * static_cast<double>(n))));
    const std::vector<box> boxes = [&] {
      std::vector<box> v;
      if (k == 1) v.push_back(e0);
      for (const auto& p : parents) v.push_back(box::of(p));
      return v;
    }();

    std::vector<std::vector<cube>> children(boxes.size());
    std::vector<double> sibling_gap(boxes.size());
    std::vector<char> nested(boxes.size(), 1);
    parallel_for(boxes.size(), [&](std::size_t b) {
      const separated_result r = separated_cubes(boxes[b], n, seed.tau, seed.rule);
      bool exact_flag = true;
      for (const auto& cb : r.family.cubes) {
        const cube t = twin(cb);
        // The twin sits inside the separated ball, which sits inside the parent.
        if (!cube_inside(cb, boxes[b], seed.tau, exact_flag) || t.r2 > -cb.r1 * (1.0 + 1e-12))
          nested[b] = 0;
        children[b].push_back(t);
      }
      sibling_gap[b] = min_pairwise_gap(children[b]);
    });

    cube_family fam;
    fam.tag = "nested";
    fam.level = k;
    fam.q_lo = static_cast<std::int64_t>(std::ceil(static_cast<double>(n) / seed.rule.beta - 1e-12));
    fam.q_hi = n;
    fam.constraints = "offset twins c1=" + std::to_string(seed.c1) + ", c2=" + std::to_string(seed.c2);
    double m_min = std::numeric_limits<double>::infinity();
    double gap = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> parent_of;
    for (std::size_t b = 0; b < boxes.size(); ++b) {
      m_min = std::min(m_min, static_cast<double>(children[b].size()));
      gap = std::min(gap, sibling_gap[b]);
      if (!nested[b]) out.nesting_ok = false;
      for (auto& c : children[b]) {
        fam.cubes.push_back(std::move(c));
        parent_of.push_back(b);
      }
    }
    if (m_min < 2.0)
      throw std::domain_error("level " + std::to_string(k) + " has a parent with " +
                              std::to_string(static_cast<long long>(m_min)) +
                              " children; m_k >= 2 needs a larger n_k (n_k=" + std::to_string(n) +
                              ")");
    if (k > 1) gap = std::min(gap, out.plan.eps.back());
    out.plan.n.push_back(n);
    out.plan.m.push_back(m_min);
    out.plan.eps.push_back(gap);
    parents = fam.cubes;
    out.parent = std::move(parent_of);
    out.levels.push_back(std::move(fam));
  }
  return out;
}

double cantor_lower_bound(const cantor_plan& plan) {
  const auto k_levels = static_cast<std::size_t>(plan.k_levels);
  if (plan.k_levels < 2) throw std::invalid_argument("Cantor bound needs K >= 2");
  if (plan.m.size() < k_levels || plan.eps.size() < k_levels)
    throw std::invalid_argument("plan is missing levels");
  for (std::size_t k = 0; k < k_levels; ++k) {
    if (plan.m[k] < 2.0)
      throw std::invalid_argument("m_" + std::to_string(k + 1) + " < 2: single-branch level");
    if (!(plan.eps[k] > 0.0)) throw std::invalid_argument("separations must be positive");
    if (k > 0 && !(plan.eps[k] < plan.eps[k - 1]))
      throw std::invalid_argument("separations must be strictly decreasing");
  }
  double best = std::numeric_limits<double>::infinity();
  double log_product = 0.0;
  for (std::size_t k = 1; k < k_levels; ++k) {
    log_product += std::log(plan.m[k - 1]);
    const double denom = -std::log(plan.eps[k] * std::pow(plan.m[k], 1.0 / plan.d));
    if (!(log_product > 0.0) || !(denom > 0.0))
      throw std::domain_error("nonpositive logarithm at level " + std::to_string(k + 1));
    best = std::min(best, log_product / denom);
  }
  return best;
}

cantor_plan idealized_plan(int d, double tau, std::int64_t lambda, int k_levels) {
  cantor_plan plan;
  plan.k_levels = k_levels;
  plan.d = d;
  plan.tau = tau;
  const double l = static_cast<double>(lambda);
  for (int k = 1; k <= k_levels; ++k) {
    plan.n.push_back(static_cast<std::int64_t>(std::pow(l, k)));
    plan.m.push_back(std::pow(l, d + 1));
    plan.eps.push_back(std::pow(l, -k * tau));
  }
  return plan;
}

gamma_measure gamma_measure_lower_bound(const counterexample_params& params, int j) {
  params.validate();
  if (std::abs(params.alpha - params.d) > 1e-12)
    throw std::invalid_argument("positive-measure bound needs alpha = d");
  const cube_family fam = gamma_level_set(params, j);
  if (fam.cubes.empty()) throw std::domain_error("Gamma^j is empty");
  const int d = params.d;
  const rational width =
      (exact(params.c2) - exact(params.c1)) / power(rational(params.lambda), j);
  const double w = static_cast<double>(width);

  std::vector<std::size_t> order(fam.cubes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto less = [&](std::size_t a, std::size_t b) {
    const cube& u = fam.cubes[a];
    const cube& v = fam.cubes[b];
    for (int i = 0; i < d; ++i) {
      const __int128 lhs = static_cast<__int128>(u.p[i]) * v.q;
      const __int128 rhs = static_cast<__int128>(v.p[i]) * u.q;
      if (lhs != rhs) return lhs < rhs;
    }
    return false;
  };
  std::stable_sort(order.begin(), order.end(), less);

  // Closed cubes of equal side are disjoint iff some coordinate offset exceeds it.
  auto disjoint = [&](const cube& u, const cube& v) {
    for (int i = 0; i < d; ++i) {
      rational delta = frac(u.p[i], u.q) - frac(v.p[i], v.q);
      if (delta < 0) delta = -delta;
      if (delta > width) return true;
    }
    return false;
  };

  std::vector<std::size_t> chosen;
  anchor_grid grid(d, w * (1.0 + 1e-6));
  std::vector<double> pos(static_cast<std::size_t>(d));
  for (auto idx : order) {
    const cube& u = fam.cubes[idx];
    for (int i = 0; i < d; ++i) pos[i] = anchor(u.p, u.q, i);
    const bool clash = grid.any_neighbour(
        pos, [&](std::size_t id) { return !disjoint(u, fam.cubes[chosen[id]]); });
    if (clash) continue;
    grid.insert(pos, chosen.size());
    chosen.push_back(idx);
  }
  gamma_measure out;
  out.disjoint = chosen.size();
  out.total = fam.cubes.size();
  out.side = two_pi * w;
  out.value = static_cast<double>(out.disjoint) * std::pow(out.side, d);
  return out;
}

}  // namespace talbot
