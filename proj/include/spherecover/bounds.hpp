#pragma once

#include <functional>
#include <optional>
#include <string_view>

namespace spherecover {

enum class BoundFormula { d_ball, d_sphe, d_sph, sph_as, est0, eps5_fixpoint, ref, lower };

std::string_view to_string(BoundFormula formula);
// Accepts d-ball, d-sphe, d-sph, sph-as, est0, eps5-fixpoint, ref, lower.
BoundFormula parse_bound_formula(std::string_view id);

// Closed-form density bound at integer n >= 3. `lower` needs c1. `ref` is
// the bare coefficient 1/2 + 2 lnln n/ln n + 4 lnln n/ln n.
double evaluate_bound(BoundFormula formula, int n, std::optional<double> c1 = std::nullopt);
double evaluate_bound(std::string_view id, int n, std::optional<double> c1 = std::nullopt);

// Same formulas continued to real x > e, for derivative checks.
double bound_at(BoundFormula formula, double x, double c1 = 1.0);

// Smallest n in [n_lo, n_hi] with a(n) < b(n).
std::optional<int> crossover_scan(BoundFormula a, BoundFormula b, int n_lo, int n_hi);

struct EpsilonInequality {
  double lhs = 0.0;  // (1 - 1/(n ln n))^{-n}
  double rhs = 0.0;  // 1 + 1/ln n + 1/ln^2 n
  bool holds = false;
};

EpsilonInequality epsilon_inequality(int n);

struct ModerationResult {
  // (ln f)' >= (ln g)' at every grid point, up to a relative 1e-7 allowance
  // for the difference quotients.
  bool holds = false;
  double worst_gap = 0.0;       // min over the grid of (ln f)' - (ln g)'
  double worst_x = 0.0;
  bool starts_above = false;    // f(a) >= g(a)
  bool dominates = false;       // f >= g at every grid point
  // holds && starts_above implies dominates; false only on a numerical
  // inconsistency.
  bool corollary_consistent = true;
};

// Numerical moderation test with central differences of step (b - a)/1e6
// at grid_points equally spaced points of [a, b].
ModerationResult moderates(const std::function<double(double)>& f, const std::function<double(double)>& g, double a,
                           double b, int grid_points);

struct OmegaBound {
  double omega_exact = 0.0;
  double omega_relaxed = 0.0;
  double log_omega_exact = 0.0;
  double log_omega_relaxed = 0.0;
  bool trivial = false;  // 3 ln^2 n / n >= 1: the cap is fully covered
};

// (1/(4 ln n)) (1 - 3 ln^2 n / n)^{(n-1)/2} and (1/(4 ln n)) exp(-1.5 ln^2 n).
OmegaBound uncovered_fraction_bound(int n);

struct BadCenterBreakdown {
  int n = 0;
  double h = 0.0;
  double psi = 0.0;
  double log_poisson_tail = 0.0;   // log of e^{-L} sum_{i<=s} L^i / i!, L = lambda n ln n
  double log_p_bound = 0.0;        // n h - lambda n ln n
  bool poisson_within_bound = false;
  double log_n_prime_ratio = 0.0;  // log of the N'/N bound, ln 2 + n psi
  bool n_prime_below = false;      // N'/N < 2^{-n/4}
  bool psi_declining = false;      // psi(n + 1) < psi(n)
  bool advisory = false;           // n < 100: outside the guaranteed range
};

struct GoodCenterBreakdown {
  int n = 0;
  double phi = 0.0;
  double log_n_double_prime_ratio = 0.0;  // ln 2 + n phi
  bool n_double_prime_below = false;      // N''/N < 2^{-n/2}
  bool advisory = false;
};

double h_value(double n);
double psi_value(double n);
double phi_value(double n);

struct ParamSet;

// Both take the v2 parameter set for n.
BadCenterBreakdown bad_center_breakdown(int n, const ParamSet& params);
GoodCenterBreakdown good_center_breakdown(int n, const ParamSet& params);

struct AssemblyCheck {
  double product = 0.0;  // (1/2 + 2lnln/ln + 5/(2 ln)) (1 + 1/ln + 1/ln^2)(1 + 2^{1-n/4})
  double target = 0.0;   // 1/2 + 2lnln/ln + 5/ln
  bool holds = false;
};

AssemblyCheck assembly_check(int n);
double assembly_product(double x);
double assembly_target(double x);

struct ExpansionCheck {
  double lhs = 0.0;  // (1 - 1/(n ln n) - n^{-2 beta})^{-n}
  double rhs = 0.0;
  bool holds = false;
};

ExpansionCheck expansion_check(int n);

// Two-level density bound lambda n ln n (1 + 2^{1-n/4}) theta_1/theta_d under
// the v2 schedule on S_r^n.
struct SizingBound {
  double theta_ratio = 0.0;  // theta_1 / theta_d
  double expansion_lhs = 0.0;
  double density_bound = 0.0;
  double d_sph = 0.0;
  bool below_d_sph = false;
};

SizingBound projected_sizing_bound(int n, double r);

struct BoundBreakdown {
  int n = 0;
  double delta_star = 0.0;
  double delta_fixpoint = 0.0;
  double rogers_ball = 0.0;
  double prior_sphere = 0.0;
  double new_sphere = 0.0;
  double asymptotic = 0.0;
  double refined = 0.0;
  double lower = 0.0;
  double omega_exact_form = 0.0;
  double omega_relaxed_form = 0.0;
  double log_omega_exact_form = 0.0;
  double log_omega_relaxed_form = 0.0;
  bool omega_trivial = false;
  double log_p_bad = 0.0;
  double h_n = 0.0;
  double psi = 0.0;
  double phi = 0.0;
};

// Everything evaluated at n >= 3; Psi/Phi/P use the v2 schedule.
BoundBreakdown breakdown(int n, double c1 = 1.0);

}  // namespace spherecover
