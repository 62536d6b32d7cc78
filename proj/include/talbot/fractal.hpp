#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "talbot/counterexample.hpp"

namespace talbot {

// Axis-aligned closed cube p/q + [r1, r2]^d in unit-torus coordinates
// (x / 2 pi). A centered sup-norm ball of radius r has r1 = -r, r2 = r.
struct cube {
  lattice_point p;
  std::int64_t q = 1;
  double r1 = 0.0;
  double r2 = 0.0;

  int dimension() const { return static_cast<int>(p.size()); }
  double side() const { return r2 - r1; }
  double lower(int i) const;
  double upper(int i) const;
};

// Plain box [lo_i, hi_i] in unit coordinates.
struct box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dimension() const { return static_cast<int>(lo.size()); }
  static box of(const cube& c);
};

struct cube_family {
  std::string tag;  // "gamma", "separated", "nested"
  int level = 0;
  std::vector<cube> cubes;
  std::int64_t q_lo = 0;
  std::int64_t q_hi = 0;
  std::string constraints;

  std::size_t size() const { return cubes.size(); }
};

struct cantor_plan {
  int k_levels = 0;
  int d = 1;
  double tau = 2.0;
  std::vector<std::int64_t> n;  // n_1..n_K
  std::vector<double> m;        // minimum child counts m_1..m_K
  std::vector<double> eps;      // separations eps_1..eps_K
};

// All cubes of Gamma^j. Throws std::length_error when the count exceeds cap.
cube_family gamma_level_set(const counterexample_params& params, int j,
                            std::size_t cap = 4'000'000);
// Number of cubes in Gamma^j without materializing them.
double gamma_level_count(const counterexample_params& params, int j);

struct covering_fit {
  double exponent = 0.0;  // slope of ln(count) against j ln(lambda)
  double residual = 0.0;
};

covering_fit covering_exponent(const std::vector<std::pair<int, double>>& counts,
                               std::int64_t lambda);
covering_fit covering_exponent(const std::vector<cube_family>& families,
                               std::int64_t lambda);

struct witness {
  lattice_point p;
  std::int64_t q = 1;
};

// All (p, q), q <= q_max, with q/8 < p_i < q/4 and
// c1/q^tau <= x_i - p_i/q <= c2/q^tau; x in unit coordinates.
std::vector<witness> membership_G(const std::vector<double>& x, double tau, double c1,
                                  double c2, std::int64_t q_max);

// Smallest q <= n with |x - p/q|_inf <= 1/(q n^{1/d}), checked exactly.
witness dirichlet_approx(const std::vector<double>& x, std::int64_t n);
bool dirichlet_bound_holds(const std::vector<double>& x, const witness& w, std::int64_t n);

struct separation_rule {
  double beta = 4.0;
};

struct separated_result {
  cube_family family;
  double margin = 0.0;            // (beta/n)^{1+1/d}
  double guaranteed_gap = 0.0;    // n^{-1-1/d}
  std::size_t candidates = 0;     // admissible anchors scanned
};

// Greedy maximal family of B_inf(p/q, q^{-tau}), q in [n/beta, n], in
// lexicographic (q, p) order inside c.
separated_result separated_cubes(const box& c, std::int64_t n, double tau,
                                 const separation_rule& rule = {});

struct separation_audit {
  bool anchors_inside = true;     // margin to the complement of c
  bool cubes_inside = true;
  bool anchors_separated = true;  // pairwise > 3 margin
  bool gaps_ok = true;            // pairwise cube gap >= n^{-1-1/d}
  bool exact = true;              // false when tau is not an integer
  double min_gap = 0.0;
};

// Exact rational audit of every structural postcondition.
separation_audit audit_separated(const separated_result& r, const box& c, std::int64_t n,
                                 double tau, const separation_rule& rule = {});
// Full rescan: true when no admissible anchor could still be appended.
bool is_greedy_maximal(const separated_result& r, const box& c, std::int64_t n, double tau,
                       const separation_rule& rule = {});

struct nested_seed {
  int d = 1;
  double tau = 2.0;
  std::int64_t n1 = 256;
  double growth = 32.0;           // n_k = ceil(growth * n_{k-1}), capped
  std::int64_t n_cap = std::int64_t{1} << 20;
  double c1 = 0.25;
  double c2 = 1.0;
  separation_rule rule{};
};

struct nested_result {
  std::vector<cube_family> levels;  // E_1..E_K (offset twins)
  cantor_plan plan;
  bool nesting_ok = true;           // every child inside its parent (exact)
  std::vector<std::size_t> parent;  // parent index for the last level
};

nested_result build_nested_levels(const nested_seed& seed, int k_levels);

double cantor_lower_bound(const cantor_plan& plan);
cantor_plan idealized_plan(int d, double tau, std::int64_t lambda, int k_levels);

struct gamma_measure {
  double value = 0.0;
  std::size_t disjoint = 0;
  std::size_t total = 0;
  double side = 0.0;  // radians
};

gamma_measure gamma_measure_lower_bound(const counterexample_params& params, int j);

}  // namespace talbot
