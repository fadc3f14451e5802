#include "spherecover/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "spherecover/capgeom.hpp"
#include "spherecover/schedule.hpp"
#include "spherecover/special.hpp"

namespace spherecover {
namespace {

constexpr double kSqrtE = 1.6487212707001282;
// Relative allowance for the O(h^2) error of the central differences.
constexpr double kModerationTolerance = 1e-7;

void require_n(int n, int min_n, const char* what) {
  if (n < min_n) throw std::invalid_argument(std::string(what) + ": n must be >= " + std::to_string(min_n));
}

double v2_lambda(double x) {
  const double L = std::log(x);
  return 0.5 + 2.0 * std::log(L) / L + 2.5 / L;
}

double v2_q(double x) { return 3.0 * std::log(std::log(x)); }

}  // namespace

std::string_view to_string(BoundFormula formula) {
  switch (formula) {
    case BoundFormula::d_ball: return "d-ball";
    case BoundFormula::d_sphe: return "d-sphe";
    case BoundFormula::d_sph: return "d-sph";
    case BoundFormula::sph_as: return "sph-as";
    case BoundFormula::est0: return "est0";
    case BoundFormula::eps5_fixpoint: return "eps5-fixpoint";
    case BoundFormula::ref: return "ref";
    case BoundFormula::lower: return "lower";
  }
  return "?";
}

BoundFormula parse_bound_formula(std::string_view id) {
  for (BoundFormula f : {BoundFormula::d_ball, BoundFormula::d_sphe, BoundFormula::d_sph, BoundFormula::sph_as,
                         BoundFormula::est0, BoundFormula::eps5_fixpoint, BoundFormula::ref, BoundFormula::lower}) {
    if (to_string(f) == id) return f;
  }
  throw std::invalid_argument("unknown bound formula '" + std::string(id) + "'");
}

double bound_at(BoundFormula formula, double x, double c1) {
  if (!(x > 1.0)) throw std::invalid_argument("bound_at: x must exceed 1");
  const double L = std::log(x);
  const double LL = std::log(L);
  const double nl = x * L;
  switch (formula) {
    case BoundFormula::d_ball: return (1.0 + LL / L + 5.0 / L) * nl;
    case BoundFormula::d_sphe: return (1.0 + 2.0 / L) * (1.0 + LL / L + kSqrtE / nl) * nl;
    case BoundFormula::d_sph: return (0.5 + 2.0 * LL / L + 5.0 / L) * nl;
    case BoundFormula::sph_as: return 0.5 * nl + 1.5 * x * LL;
    case BoundFormula::est0: return (1.0 + LL / L + 3.0 / L) * nl;
    case BoundFormula::eps5_fixpoint: {
      const double lambda = 1.0 + LL / L + 2.0 / x;
      return lambda * nl * (1.0 + 1.0 / L + 1.0 / (L * L)) / (1.0 - 1.0 / (x * x));
    }
    case BoundFormula::ref: return 0.5 + 2.0 * LL / L + 4.0 * LL / L;
    case BoundFormula::lower: return c1 * x;
  }
  throw std::invalid_argument("bound_at: unknown formula");
}

double evaluate_bound(BoundFormula formula, int n, std::optional<double> c1) {
  require_n(n, 3, "evaluate_bound");
  if (formula == BoundFormula::lower) {
    if (!c1) throw std::invalid_argument("evaluate_bound: the lower bound needs c1");
    return bound_at(formula, n, *c1);
  }
  return bound_at(formula, n);
}

double evaluate_bound(std::string_view id, int n, std::optional<double> c1) {
  return evaluate_bound(parse_bound_formula(id), n, c1);
}

std::optional<int> crossover_scan(BoundFormula a, BoundFormula b, int n_lo, int n_hi) {
  require_n(n_lo, 3, "crossover_scan");
  if (n_hi < n_lo) throw std::invalid_argument("crossover_scan: empty range");
  for (int n = n_lo; n <= n_hi; ++n) {
    if (bound_at(a, n) < bound_at(b, n)) return n;
    if (n == n_hi) break;
  }
  return std::nullopt;
}

EpsilonInequality epsilon_inequality(int n) {
  require_n(n, 4, "epsilon_inequality");
  const double L = std::log(static_cast<double>(n));
  EpsilonInequality out;
  out.lhs = std::exp(-n * std::log1p(-1.0 / (n * L)));
  out.rhs = 1.0 + 1.0 / L + 1.0 / (L * L);
  out.holds = out.lhs < out.rhs;
  return out;
}

ModerationResult moderates(const std::function<double(double)>& f, const std::function<double(double)>& g, double a,
                           double b, int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("moderates: need at least 2 grid points");
  if (!(b > a)) throw std::invalid_argument("moderates: need a < b");
  const double h = (b - a) / 1e6;
  auto log_of = [](const std::function<double(double)>& fn, double x) {
    const double v = fn(x);
    if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("moderates: function value is not positive");
    return std::log(v);
  };
  ModerationResult out;
  out.holds = true;
  out.dominates = true;
  out.worst_gap = std::numeric_limits<double>::infinity();
  out.starts_above = f(a) >= g(a);
  for (int i = 0; i < grid_points; ++i) {
    const double x = a + (b - a) * i / (grid_points - 1);
    const double df = (log_of(f, x + h) - log_of(f, x - h)) / (2.0 * h);
    const double dg = (log_of(g, x + h) - log_of(g, x - h)) / (2.0 * h);
    const double gap = df - dg;
    if (gap < out.worst_gap) {
      out.worst_gap = gap;
      out.worst_x = x;
    }
    if (gap < -kModerationTolerance * std::max(std::fabs(df), std::fabs(dg))) out.holds = false;
    if (f(x) < g(x)) out.dominates = false;
  }
  out.corollary_consistent = !(out.holds && out.starts_above) || out.dominates;
  return out;
}

OmegaBound uncovered_fraction_bound(int n) {
  require_n(n, 3, "uncovered_fraction_bound");
  const double L = std::log(static_cast<double>(n));
  OmegaBound out;
  const double ratio = 3.0 * L * L / n;
  if (ratio >= 1.0) {
    out.trivial = true;
    out.log_omega_exact = out.log_omega_relaxed = -std::numeric_limits<double>::infinity();
    return out;
  }
  const double prefix = -std::log(4.0 * L);
  out.log_omega_exact = prefix + 0.5 * (n - 1) * std::log1p(-ratio);
  out.log_omega_relaxed = prefix - 1.5 * L * L;
  out.omega_exact = std::exp(out.log_omega_exact);
  out.omega_relaxed = std::exp(out.log_omega_relaxed);
  return out;
}

double h_value(double n) {
  const double q = v2_q(n);
  return 1.0 / 3.0 + std::log(std::exp(1.0) * v2_lambda(n) * q) / q;
}

double psi_value(double n) { return h_value(n) - (5.0 - std::log(12.0)) / 2.0; }

double phi_value(double n) {
  const double L = std::log(n);
  const double LL = std::log(L);
  return L + LL - std::log(4.0) / (3.0 * LL) - L * L / (2.0 * LL) + std::log(2.0) - 1.0 / 3.0;
}

BadCenterBreakdown bad_center_breakdown(int n, const ParamSet& params) {
  if (params.mode != ScheduleMode::v2) throw std::invalid_argument("bad_center_breakdown: needs the v2 schedule");
  if (params.n != n) throw std::invalid_argument("bad_center_breakdown: parameter set is for another n");
  BadCenterBreakdown out;
  out.n = n;
  out.advisory = n < 100;
  const double L = std::log(static_cast<double>(n));
  const double q = params.q.value();
  out.h = 1.0 / 3.0 + std::log(std::exp(1.0) * params.lambda * q) / q;
  out.psi = out.h - (5.0 - std::log(12.0)) / 2.0;
  const double budget = params.lambda * n * L;
  const std::int64_t s = params.s_value();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(s) + 1);
  for (std::int64_t i = 0; i <= s; ++i) terms.push_back(i * std::log(budget) - std::lgamma(i + 1.0));
  out.log_poisson_tail = log_sum_exp(terms) - budget;
  out.log_p_bound = n * out.h - budget;
  out.poisson_within_bound = out.log_poisson_tail <= out.log_p_bound;
  out.log_n_prime_ratio = std::log(2.0) + n * out.psi;
  out.n_prime_below = out.log_n_prime_ratio < -0.25 * n * std::log(2.0);
  out.psi_declining = psi_value(n + 1.0) < out.psi;
  return out;
}

GoodCenterBreakdown good_center_breakdown(int n, const ParamSet& params) {
  if (params.mode != ScheduleMode::v2) throw std::invalid_argument("good_center_breakdown: needs the v2 schedule");
  if (params.n != n) throw std::invalid_argument("good_center_breakdown: parameter set is for another n");
  GoodCenterBreakdown out;
  out.n = n;
  out.advisory = n < 100;
  out.phi = phi_value(n);
  out.log_n_double_prime_ratio = std::log(2.0) + n * out.phi;
  out.n_double_prime_below = out.log_n_double_prime_ratio < -0.5 * n * std::log(2.0);
  return out;
}

double assembly_product(double x) {
  const double L = std::log(x);
  return v2_lambda(x) * (1.0 + 1.0 / L + 1.0 / (L * L)) * (1.0 + std::exp2(1.0 - x / 4.0));
}

double assembly_target(double x) {
  const double L = std::log(x);
  return 0.5 + 2.0 * std::log(L) / L + 5.0 / L;
}

AssemblyCheck assembly_check(int n) {
  require_n(n, 3, "assembly_check");
  AssemblyCheck out;
  out.product = assembly_product(n);
  out.target = assembly_target(n);
  out.holds = out.product < out.target;
  return out;
}

ExpansionCheck expansion_check(int n) {
  require_n(n, 3, "expansion_check");
  const double x = n;
  const double L = std::log(x);
  const double beta = 0.5 + 2.0 * std::log(L) / L;
  ExpansionCheck out;
  out.lhs = std::exp(-x * std::log1p(-1.0 / (x * L) - std::pow(x, -2.0 * beta)));
  out.rhs = 1.0 + 1.0 / L + 1.0 / (L * L);
  out.holds = out.lhs < out.rhs;
  return out;
}

SizingBound projected_sizing_bound(int n, double r) {
  const ParamSet p = params_v2(n, r);
  const SphereSpec sphere(n, r);
  const double log_ratio = cap_fraction(sphere, 1.0).log_theta - p.log_theta_basis;
  SizingBound out;
  out.theta_ratio = std::exp(log_ratio);
  out.expansion_lhs = expansion_check(n).lhs;
  const double L = std::log(static_cast<double>(n));
  out.density_bound = p.lambda * n * L * (1.0 + std::exp2(1.0 - n / 4.0)) * out.theta_ratio;
  out.d_sph = evaluate_bound(BoundFormula::d_sph, n);
  out.below_d_sph = out.density_bound < out.d_sph;
  return out;
}

BoundBreakdown breakdown(int n, double c1) {
  require_n(n, 3, "breakdown");
  BoundBreakdown out;
  out.n = n;
  out.delta_star = evaluate_bound(BoundFormula::est0, n);
  out.delta_fixpoint = evaluate_bound(BoundFormula::eps5_fixpoint, n);
  out.rogers_ball = evaluate_bound(BoundFormula::d_ball, n);
  out.prior_sphere = evaluate_bound(BoundFormula::d_sphe, n);
  out.new_sphere = evaluate_bound(BoundFormula::d_sph, n);
  out.asymptotic = evaluate_bound(BoundFormula::sph_as, n);
  out.refined = evaluate_bound(BoundFormula::ref, n);
  out.lower = evaluate_bound(BoundFormula::lower, n, c1);
  const OmegaBound omega = uncovered_fraction_bound(n);
  out.omega_exact_form = omega.omega_exact;
  out.omega_relaxed_form = omega.omega_relaxed;
  out.log_omega_exact_form = omega.log_omega_exact;
  out.log_omega_relaxed_form = omega.log_omega_relaxed;
  out.omega_trivial = omega.trivial;
  out.h_n = h_value(n);
  out.psi = psi_value(n);
  out.phi = phi_value(n);
  const double L = std::log(static_cast<double>(n));
  out.log_p_bad = n * out.h_n - v2_lambda(n) * n * L;
  return out;
}

}  // namespace spherecover
