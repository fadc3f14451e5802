#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace spherecover {

enum class ScheduleMode { v1, v2, asymptotic, engineering };

std::string_view to_string(ScheduleMode mode);
ScheduleMode parse_schedule_mode(std::string_view text);

// N with theta N = lambda n ln n - nu, nu in [0, theta).
//
// count is an exact integer only when `exact`; otherwise N exceeds 2^53,
// count is the nearest double (possibly inf) and nu is NaN.
struct TrialCount {
  double count = 0.0;
  double log_count = 0.0;
  double nu = 0.0;
  bool exact = true;
  bool overridden = false;  // N supplied by the caller; nu is then just lambda n ln n - theta N

  std::uint64_t as_integer() const;
};

struct ParamSet {
  ScheduleMode mode = ScheduleMode::v1;
  int n = 0;
  double r = 0.0;
  double epsilon = 0.0;
  double rho = 0.0;
  double lambda = 0.0;
  std::optional<double> beta;
  std::optional<double> mu;
  std::optional<double> d;
  std::optional<double> q;
  std::optional<std::int64_t> s;
  std::optional<double> b_exponent;
  TrialCount trials;
  // theta_rho for v1, theta_d otherwise; log form survives underflow.
  double theta_basis = 0.0;
  double log_theta_basis = 0.0;

  // Accessors that throw when the field is not defined for the mode.
  double mu_value() const;
  double d_value() const;
  std::int64_t s_value() const;
};

// eps = 1/(n ln n), lambda = 1 + ln ln n / ln n + 2/n, N sized on theta_rho.
ParamSet params_v1(int n, double r);

// The two-level schedule: eps = 1/(2 n ln n), beta = 1/2 + 2 ln ln n / ln n,
// lambda = beta + 5/(2 ln n), mu = n^-beta / (2 sqrt 3), d = 1 - 2 eps - mu^2,
// q = 3 ln ln n, s = floor(n/q), N sized on theta_d.
ParamSet params_v2(int n, double r);

// Large-n schedule for any b > 3/2: beta = 1/2 + b ln ln n / ln n,
// lambda = beta + 3/(4 ln n), mu = 1/(2 sqrt(n) ln^b n), q = ln^2 ln n.
ParamSet params_asymptotic(int n, double r, double b);

// Asymptotic schedule with user (eps, mu); rho, d and s keep their structural
// definitions. Requires eps < mu < rho, mu + eps <= 1 and d > 0.
ParamSet params_engineering(int n, double r, double eps, double mu, double b = 2.0,
                            std::optional<std::uint64_t> trials_override = std::nullopt);

ParamSet make_params(ScheduleMode mode, int n, double r, double b = 2.0, std::optional<double> eps = std::nullopt,
                     std::optional<double> mu = std::nullopt,
                     std::optional<std::uint64_t> trials_override = std::nullopt);

// The unique N in (lambda n ln n / theta - 1, lambda n ln n / theta].
TrialCount trial_count(double lambda, int n, double theta);

// Same with theta given as log(theta), for thetas below double range.
TrialCount trial_count_log(double lambda, int n, double log_theta);

// Core of trial_count for a precomputed budget lambda n ln n.
TrialCount trial_count_from_budget(double budget, double theta);

}  // namespace spherecover
