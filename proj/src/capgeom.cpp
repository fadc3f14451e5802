#include "spherecover/capgeom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "spherecover/schedule.hpp"
#include "spherecover/special.hpp"

namespace spherecover {
namespace {

constexpr double kNormTolerance = 1e-9;
constexpr double kAngleSlack = 1e-12;

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void require_same_dim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
}

double sample_polar_power(int n, double alpha, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (;;) {
    const double t = alpha * std::pow(unif(rng), 1.0 / n);
    if (t == 0.0) return 0.0;
    const double accept = std::pow(std::sin(t) / t, n - 1);
    if (unif(rng) <= accept) return t;
  }
}

double sample_polar_inverse(int n, double alpha, double log_theta_alpha, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  while (u == 0.0) u = unif(rng);
  const double target = std::log(u) + log_theta_alpha;
  double lo = 0.0;
  double hi = alpha;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * alpha; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cap_fraction_for_angle(n, mid).log_theta < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Writes r (cos t y^ + sin t v) with v uniform among unit vectors orthogonal to y^.
void point_at_polar(const Cap& cap, double t, Rng& rng, std::span<double> out) {
  const auto y = cap.center().view();
  const double r = cap.sphere().r;
  const std::size_t dim = y.size();
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    double dot = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      out[i] = gauss(rng);
      dot += out[i] * y[i] / r;
    }
    double len2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      out[i] -= dot * y[i] / r;
      len2 += out[i] * out[i];
    }
    if (len2 > 1e-20) {
      const double inv = 1.0 / std::sqrt(len2);
      const double ct = std::cos(t);
      const double st = std::sin(t);
      for (std::size_t i = 0; i < dim; ++i) out[i] = r * (ct * y[i] / r + st * out[i] * inv);
      return;
    }
  }
}

}  // namespace

SphereSpec::SphereSpec(int n_, double r_) : n(n_), r(r_) {
  if (n < 1) throw std::invalid_argument("sphere dimension n must be >= 1");
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("sphere radius r must be positive and finite");
}

void SphereSpec::require_construction_ready() const {
  if (n < 3) throw std::invalid_argument("constructions need n >= 3");
  if (!(r > 1.0)) throw std::invalid_argument("constructions need r > 1");
}

SurfacePoint make_surface_point(const SphereSpec& sphere, std::vector<double> coords) {
  if (coords.size() != sphere.ambient_dim()) {
    throw std::invalid_argument("point has " + std::to_string(coords.size()) + " coordinates, sphere needs " +
                                std::to_string(sphere.ambient_dim()));
  }
  if (std::fabs(norm(coords) - sphere.r) > kNormTolerance * sphere.r) {
    throw std::invalid_argument("point is not on the sphere");
  }
  return SurfacePoint{std::move(coords)};
}

SurfacePoint project_to_sphere(const SphereSpec& sphere, std::span<const double> direction) {
  if (direction.size() != sphere.ambient_dim()) throw std::invalid_argument("direction has wrong dimension");
  const double len = norm(direction);
  if (!(len > 0.0)) throw std::invalid_argument("cannot project the zero vector");
  SurfacePoint p{std::vector<double>(direction.begin(), direction.end())};
  for (double& x : p.coords) x *= sphere.r / len;
  return p;
}

Cap::Cap(const SphereSpec& sphere, SurfacePoint center, double half_chord)
    : sphere_(sphere), center_(std::move(center)), half_chord_(half_chord) {
  if (!(half_chord > 0.0) || half_chord > sphere.r) {
    throw std::invalid_argument("cap half-chord must lie in (0, r]");
  }
  center_ = make_surface_point(sphere, std::move(center_.coords));
  half_angle_ = half_angle_of(sphere, half_chord);
}

double half_angle_of(const SphereSpec& sphere, double half_chord) {
  return std::asin(std::min(1.0, half_chord / sphere.r));
}

double central_angle(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b);
  const double na = norm(a);
  const double nb = norm(b);
  double diff2 = 0.0;
  double sum2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double u = a[i] / na;
    const double v = b[i] / nb;
    diff2 += (u - v) * (u - v);
    sum2 += (u + v) * (u + v);
  }
  return 2.0 * std::atan2(std::sqrt(diff2), std::sqrt(sum2));
}

double unit_chord_sq_limit(double angle) {
  const double chord = 2.0 * std::sin(0.5 * std::min(angle, M_PI));
  return chord * chord * (1.0 + 2.0 * kAngleSlack) + 1e-300;
}

bool within_angle(std::span<const double> a, std::span<const double> b, double angle) {
  require_same_dim(a, b);
  if (angle >= M_PI) return true;
  const double na = norm(a);
  const double nb = norm(b);
  double diff2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double u = a[i] / na - b[i] / nb;
    diff2 += u * u;
  }
  return diff2 <= unit_chord_sq_limit(angle);
}

void uniform_direction(Rng& rng, std::span<double> out) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    double len2 = 0.0;
    for (double& x : out) {
      x = gauss(rng);
      len2 += x * x;
    }
    if (len2 > 1e-20) {
      const double inv = 1.0 / std::sqrt(len2);
      for (double& x : out) x *= inv;
      return;
    }
  }
}

SurfacePoint uniform_sphere_point(const SphereSpec& sphere, Rng& rng) {
  SurfacePoint p{std::vector<double>(sphere.ambient_dim())};
  uniform_direction(rng, p.coords);
  for (double& x : p.coords) x *= sphere.r;
  return p;
}

CapSampler::CapSampler(Cap cap) : cap_(std::move(cap)) {
  const int n = cap_.sphere().n;
  const double alpha = cap_.half_angle();
  const double power_rate = std::pow(std::sin(alpha) / alpha, n - 1);
  if (power_rate >= 0.05) {
    method_ = Method::power_proposal;
    return;
  }
  const CapMeasure m = cap_fraction_for_angle(n, alpha);
  log_theta_alpha_ = m.log_theta;
  method_ = m.theta >= 0.05 ? Method::whole_sphere_rejection : Method::inverse_cdf;
}

void CapSampler::sample(Rng& rng, std::span<double> out) const {
  const int n = cap_.sphere().n;
  const double alpha = cap_.half_angle();
  if (out.size() != cap_.sphere().ambient_dim()) throw std::invalid_argument("output buffer has wrong dimension");
  switch (method_) {
    case Method::power_proposal:
      point_at_polar(cap_, sample_polar_power(n, alpha, rng), rng, out);
      return;
    case Method::whole_sphere_rejection:
      for (;;) {
        uniform_direction(rng, out);
        for (double& x : out) x *= cap_.sphere().r;
        if (cap_contains(cap_, out)) return;
      }
    case Method::inverse_cdf:
      point_at_polar(cap_, sample_polar_inverse(n, alpha, log_theta_alpha_, rng), rng, out);
      return;
  }
}

SurfacePoint CapSampler::sample(Rng& rng) const {
  SurfacePoint p{std::vector<double>(cap_.sphere().ambient_dim())};
  sample(rng, p.coords);
  return p;
}

SurfacePoint uniform_cap_point(const Cap& cap, Rng& rng) { return CapSampler(cap).sample(rng); }

bool cap_contains(const Cap& cap, std::span<const double> p) {
  if (p.size() != cap.sphere().ambient_dim()) {
    throw std::invalid_argument("point dimension does not match the cap's sphere");
  }
  return within_angle(p, cap.center().view(), cap.half_angle());
}

CapMeasure cap_fraction_for_angle(int n, double alpha) {
  if (n < 1) throw std::invalid_argument("cap_fraction: n must be >= 1");
  if (!(alpha >= 0.0) || alpha > M_PI_2 + 1e-15) throw std::invalid_argument("cap angle must lie in [0, pi/2]");
  CapMeasure m;
  m.n = n;
  m.r = 1.0;
  m.alpha = std::min(alpha, M_PI_2);
  m.rho = std::sin(m.alpha);
  if (m.alpha == 0.0) {
    m.log_theta = -std::numeric_limits<double>::infinity();
    m.theta = 0.0;
    return m;
  }
  const double s = std::sin(m.alpha);
  const double c = std::cos(m.alpha);
  m.log_theta = log_ibeta(0.5 * n, 0.5, s * s, c * c) - std::log(2.0);
  m.theta = std::exp(m.log_theta);
  m.underflow = m.theta < std::numeric_limits<double>::min();
  if (m.underflow) m.theta = 0.0;
  return m;
}

CapMeasure cap_fraction(const SphereSpec& sphere, double rho) {
  if (!(rho > 0.0) || rho > sphere.r) throw std::invalid_argument("cap_fraction: rho must lie in (0, r]");
  const double s = rho / sphere.r;
  CapMeasure m;
  m.n = sphere.n;
  m.r = sphere.r;
  m.rho = rho;
  m.alpha = std::asin(s);
  m.log_theta = log_ibeta(0.5 * sphere.n, 0.5, s * s, (1.0 - s) * (1.0 + s)) - std::log(2.0);
  m.theta = std::exp(m.log_theta);
  m.underflow = m.theta < std::numeric_limits<double>::min();
  if (m.underflow) m.theta = 0.0;
  return m;
}

double cap_fraction_upper(int n, double alpha) {
  if (n < 2) throw std::invalid_argument("cap_fraction_upper: n must be >= 2");
  if (!(alpha > 0.0) || alpha >= M_PI_2) throw std::invalid_argument("cap_fraction_upper: alpha must lie in (0, pi/2)");
  return std::exp(-0.5 * std::log(2.0 * M_PI * (n - 1)) + (n - 1) * std::log(std::sin(alpha)) -
                  std::log(std::cos(alpha)));
}

double cap_ratio_lower(int n, double tau, double delta) {
  if (!(tau > 0.0) || !(tau < delta)) throw std::invalid_argument("cap_ratio_lower: need 0 < tau < delta");
  return std::pow(tau / delta, n);
}

double cap_ratio_lower_angular(int n, double tau_angle, double delta_angle) {
  if (!(tau_angle > 0.0) || !(tau_angle < delta_angle) || delta_angle > M_PI_2) {
    throw std::invalid_argument("cap_ratio_lower_angular: need 0 < tau < delta <= pi/2");
  }
  return std::pow(tau_angle / delta_angle, n);
}

bool is_d_close(const SurfacePoint& y, const SurfacePoint& z, double d, const SphereSpec& sphere) {
  if (!(d > 0.0) || d >= sphere.r) throw std::invalid_argument("is_d_close: need 0 < d < r");
  if (y.dim() != sphere.ambient_dim() || z.dim() != sphere.ambient_dim()) {
    throw std::invalid_argument("is_d_close: point dimension does not match the sphere");
  }
  return within_angle(y.view(), z.view(), std::asin(d / sphere.r));
}

std::vector<double> ball_center(const Cap& cap) {
  const double r = cap.sphere().r;
  if (std::fabs(cap.half_chord() - 1.0) > 1e-12) throw std::invalid_argument("ball_center: cap must have half-chord 1");
  if (!(r > 1.0)) throw std::invalid_argument("ball_center: need r > 1");
  const double scale = std::sqrt(r * r - 1.0) / r;
  std::vector<double> x(cap.center().coords);
  for (double& c : x) c *= scale;
  return x;
}

IntersectionGeometry intersection_geometry(const SphereSpec& sphere, double rho, double mu_layer,
                                           const ParamSet& params) {
  const double eps = params.epsilon;
  const double mu = params.mu_value();
  const double d = params.d_value();
  const double r = sphere.r;
  if (!(mu_layer > 0.0) || mu_layer > mu * (1.0 + 1e-12)) {
    throw std::invalid_argument("intersection_geometry: need 0 < mu_layer <= mu");
  }
  if (2.0 * rho - 1.0 < mu * mu) {
    throw std::domain_error("intersection_geometry: schedule inconsistent, 2 rho - 1 < mu^2");
  }
  IntersectionGeometry g;
  g.sigma_A = std::sqrt(r * r - mu_layer * mu_layer) * d / r;
  g.d_BN = std::sqrt(rho * rho - mu * mu);
  g.d_BN_lower = rho - mu * mu;
  g.d_AN = g.d_BN - g.sigma_A;
  g.d_AN_lower = rho - mu * mu - d;
  g.cos_alpha = std::clamp(g.d_AN / mu_layer, 0.0, 1.0);
  g.trivial = eps >= mu_layer;
  g.alpha_uncovered = g.trivial ? 0.0 : std::acos(g.cos_alpha);
  return g;
}

}  // namespace spherecover
