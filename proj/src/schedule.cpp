#include "spherecover/schedule.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "spherecover/capgeom.hpp"

namespace spherecover {
namespace {

constexpr double kExactLimit = 9007199254740992.0;  // 2^53

void require_schedule_domain(int n, double r) {
  if (n < 3) throw std::invalid_argument("schedules need n >= 3 (ln ln n must be positive)");
  if (!(r > 1.0) || !std::isfinite(r)) throw std::invalid_argument("schedules need a finite r > 1");
}

TrialCount inexact(double log_budget, double log_theta) {
  TrialCount t;
  t.exact = false;
  t.log_count = log_budget - log_theta;
  t.count = std::exp(t.log_count);
  t.nu = std::numeric_limits<double>::quiet_NaN();
  return t;
}

void size_on_theta(ParamSet& p, const CapMeasure& basis) {
  p.theta_basis = basis.theta;
  p.log_theta_basis = basis.log_theta;
  p.trials = trial_count_log(p.lambda, p.n, basis.log_theta);
}

}  // namespace

std::string_view to_string(ScheduleMode mode) {
  switch (mode) {
    case ScheduleMode::v1: return "v1";
    case ScheduleMode::v2: return "v2";
    case ScheduleMode::asymptotic: return "asymptotic";
    case ScheduleMode::engineering: return "engineering";
  }
  return "?";
}

ScheduleMode parse_schedule_mode(std::string_view text) {
  if (text == "v1") return ScheduleMode::v1;
  if (text == "v2") return ScheduleMode::v2;
  if (text == "asymptotic") return ScheduleMode::asymptotic;
  if (text == "engineering") return ScheduleMode::engineering;
  throw std::invalid_argument("unknown schedule mode '" + std::string(text) + "'");
}

std::uint64_t TrialCount::as_integer() const {
  if (!exact) throw std::domain_error("trial count exceeds 2^53 and is not materialized");
  return static_cast<std::uint64_t>(count);
}

double ParamSet::mu_value() const {
  if (!mu) throw std::logic_error("mu is not defined for schedule " + std::string(to_string(mode)));
  return *mu;
}

double ParamSet::d_value() const {
  if (!d) throw std::logic_error("d is not defined for schedule " + std::string(to_string(mode)));
  return *d;
}

std::int64_t ParamSet::s_value() const {
  if (!s) throw std::logic_error("s is not defined for schedule " + std::string(to_string(mode)));
  return *s;
}

TrialCount trial_count_from_budget(double budget, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("trial_count: theta must be positive");
  if (!(theta < 1.0)) throw std::invalid_argument("trial_count: theta must be below 1");
  if (!(budget >= 1.0)) throw std::invalid_argument("trial_count: lambda n ln n must be >= 1");
  const double quotient = budget / theta;
  if (!(quotient <= kExactLimit)) return inexact(std::log(budget), std::log(theta));

  // theta N <= budget < theta (N + 1); fma keeps the sign of budget - theta N exact.
  double n_trials = std::floor(quotient);
  while (n_trials > 0.0 && std::fma(-theta, n_trials, budget) < 0.0) n_trials -= 1.0;
  while (std::fma(-theta, n_trials + 1.0, budget) >= 0.0) n_trials += 1.0;

  TrialCount t;
  t.count = n_trials;
  t.log_count = std::log(n_trials);
  t.nu = std::fma(-theta, n_trials, budget);
  t.exact = true;
  return t;
}

TrialCount trial_count(double lambda, int n, double theta) {
  return trial_count_from_budget(lambda * n * std::log(static_cast<double>(n)), theta);
}

TrialCount trial_count_log(double lambda, int n, double log_theta) {
  if (!(log_theta < 0.0)) throw std::invalid_argument("trial_count: theta must lie in (0, 1)");
  const double budget = lambda * n * std::log(static_cast<double>(n));
  const double theta = std::exp(log_theta);
  if (theta >= std::numeric_limits<double>::min()) return trial_count_from_budget(budget, theta);
  if (!(budget >= 1.0)) throw std::invalid_argument("trial_count: lambda n ln n must be >= 1");
  return inexact(std::log(budget), log_theta);
}

ParamSet params_v1(int n, double r) {
  require_schedule_domain(n, r);
  const double ln_n = std::log(static_cast<double>(n));
  ParamSet p;
  p.mode = ScheduleMode::v1;
  p.n = n;
  p.r = r;
  p.epsilon = 1.0 / (n * ln_n);
  p.rho = 1.0 - p.epsilon;
  p.lambda = 1.0 + std::log(ln_n) / ln_n + 2.0 / n;
  size_on_theta(p, cap_fraction(SphereSpec(n, r), p.rho));
  return p;
}

ParamSet params_v2(int n, double r) {
  require_schedule_domain(n, r);
  const double ln_n = std::log(static_cast<double>(n));
  const double lnln_n = std::log(ln_n);
  ParamSet p;
  p.mode = ScheduleMode::v2;
  p.n = n;
  p.r = r;
  p.epsilon = 1.0 / (2.0 * n * ln_n);
  p.rho = 1.0 - p.epsilon;
  p.beta = 0.5 + 2.0 * lnln_n / ln_n;
  p.lambda = *p.beta + 5.0 / (2.0 * ln_n);
  p.mu = std::pow(static_cast<double>(n), -*p.beta) / (2.0 * std::sqrt(3.0));
  p.d = 1.0 - 2.0 * p.epsilon - *p.mu * *p.mu;
  p.q = 3.0 * lnln_n;
  p.s = static_cast<std::int64_t>(std::floor(n / *p.q));
  size_on_theta(p, cap_fraction(SphereSpec(n, r), *p.d));
  return p;
}

ParamSet params_asymptotic(int n, double r, double b) {
  require_schedule_domain(n, r);
  if (!(b > 1.5) || !std::isfinite(b)) throw std::invalid_argument("asymptotic schedule needs a finite b > 3/2");
  const double ln_n = std::log(static_cast<double>(n));
  const double lnln_n = std::log(ln_n);
  ParamSet p;
  p.mode = ScheduleMode::asymptotic;
  p.n = n;
  p.r = r;
  p.b_exponent = b;
  p.epsilon = 1.0 / (2.0 * n * ln_n);
  p.rho = 1.0 - p.epsilon;
  p.beta = 0.5 + b * lnln_n / ln_n;
  p.lambda = *p.beta + 3.0 / (4.0 * ln_n);
  p.mu = 1.0 / (2.0 * std::sqrt(static_cast<double>(n)) * std::pow(ln_n, b));
  p.d = 1.0 - 2.0 * p.epsilon - *p.mu * *p.mu;
  p.q = lnln_n * lnln_n;
  p.s = static_cast<std::int64_t>(std::floor(n / *p.q));
  if (!(*p.d > 0.0)) throw std::domain_error("asymptotic schedule gives d <= 0 at this n");
  size_on_theta(p, cap_fraction(SphereSpec(n, r), *p.d));
  return p;
}

ParamSet params_engineering(int n, double r, double eps, double mu, double b,
                            std::optional<std::uint64_t> trials_override) {
  ParamSet p = params_asymptotic(n, r, b);
  if (!(eps > 0.0) || !(eps < mu)) throw std::invalid_argument("engineering schedule needs 0 < eps < mu");
  if (!(mu < 1.0 - eps)) throw std::invalid_argument("engineering schedule needs mu < rho = 1 - eps");
  if (mu + eps > 1.0) throw std::invalid_argument("engineering schedule needs mu + eps <= 1");
  p.mode = ScheduleMode::engineering;
  p.epsilon = eps;
  p.rho = 1.0 - eps;
  p.mu = mu;
  p.d = 1.0 - 2.0 * eps - mu * mu;
  if (!(*p.d > 0.0)) throw std::invalid_argument("engineering schedule needs d = 1 - 2 eps - mu^2 > 0");
  const CapMeasure basis = cap_fraction(SphereSpec(n, r), *p.d);
  if (trials_override) {
    p.theta_basis = basis.theta;
    p.log_theta_basis = basis.log_theta;
    p.trials.count = static_cast<double>(*trials_override);
    p.trials.log_count = std::log(p.trials.count);
    p.trials.exact = true;
    p.trials.overridden = true;
    p.trials.nu = p.lambda * n * std::log(static_cast<double>(n)) - basis.theta * p.trials.count;
  } else {
    size_on_theta(p, basis);
  }
  return p;
}

ParamSet make_params(ScheduleMode mode, int n, double r, double b, std::optional<double> eps,
                     std::optional<double> mu, std::optional<std::uint64_t> trials_override) {
  if (mode != ScheduleMode::engineering && (eps || mu || trials_override)) {
    throw std::invalid_argument("eps, mu and trial overrides are only accepted in engineering mode");
  }
  switch (mode) {
    case ScheduleMode::v1: return params_v1(n, r);
    case ScheduleMode::v2: return params_v2(n, r);
    case ScheduleMode::asymptotic: return params_asymptotic(n, r, b);
    case ScheduleMode::engineering:
      if (!eps || !mu) throw std::invalid_argument("engineering mode needs both eps and mu");
      return params_engineering(n, r, *eps, *mu, b, trials_override);
  }
  throw std::invalid_argument("unknown schedule mode");
}

}  // namespace spherecover
