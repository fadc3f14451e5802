#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spherecover/rng.hpp"

namespace spherecover {

struct ParamSet;

// The sphere S_r^n = { z in R^{n+1} : |z| = r }.
struct SphereSpec {
  int n;
  double r;

  // Validates n >= 1 and r > 0. Radii below 1 only arise from rescaling.
  SphereSpec(int n, double r);

  std::size_t ambient_dim() const { return static_cast<std::size_t>(n) + 1; }

  // Construction algorithms need n >= 3 and r > 1.
  void require_construction_ready() const;

  bool operator==(const SphereSpec&) const = default;
};

struct SurfacePoint {
  std::vector<double> coords;

  std::span<const double> view() const { return coords; }
  std::size_t dim() const { return coords.size(); }
};

// Checks dimension and the 1e-9 relative norm invariant.
SurfacePoint make_surface_point(const SphereSpec& sphere, std::vector<double> coords);

// Scales a nonzero direction onto the sphere.
SurfacePoint project_to_sphere(const SphereSpec& sphere, std::span<const double> direction);

// Spherical cap C(rho, y): points of the sphere within the unit-ball cut of
// half-chord rho around y, i.e. central angle <= arcsin(rho / r).
class Cap {
 public:
  Cap(const SphereSpec& sphere, SurfacePoint center, double half_chord);

  const SphereSpec& sphere() const { return sphere_; }
  const SurfacePoint& center() const { return center_; }
  double half_chord() const { return half_chord_; }
  double half_angle() const { return half_angle_; }

 private:
  SphereSpec sphere_;
  SurfacePoint center_;
  double half_chord_;
  double half_angle_;
};

struct CapMeasure {
  int n = 0;
  double r = 0.0;
  double rho = 0.0;
  double alpha = 0.0;
  double theta = 0.0;      // fraction of the full sphere surface; 0 when underflowed
  double log_theta = 0.0;  // always finite for rho > 0
  bool underflow = false;
};

struct IntersectionGeometry {
  double sigma_A = 0.0;
  double d_BN = 0.0;
  double d_AN = 0.0;
  double cos_alpha = 0.0;
  double alpha_uncovered = 0.0;
  bool trivial = false;
  // The chain's lower bounds rho - mu^2 and rho - mu^2 - d.
  double d_BN_lower = 0.0;
  double d_AN_lower = 0.0;
};

// Half-angle arcsin(rho / r) of a cap with half-chord rho.
double half_angle_of(const SphereSpec& sphere, double half_chord);

// Central angle between two nonzero vectors, 2 atan2(|a^ - b^|, |a^ + b^|),
// accurate near 0 and near pi.
double central_angle(std::span<const double> a, std::span<const double> b);

// Closed membership angle(a, b) <= angle, evaluated on chords of the unit
// sphere with a 1e-12 relative rounding slack.
bool within_angle(std::span<const double> a, std::span<const double> b, double angle);

// Squared unit-sphere chord bound used by within_angle (slack included).
double unit_chord_sq_limit(double angle);

// Uniform direction on the unit sphere of R^{dim}.
void uniform_direction(Rng& rng, std::span<double> out);

SurfacePoint uniform_sphere_point(const SphereSpec& sphere, Rng& rng);

// Uniform w.r.t. surface measure restricted to the cap. The polar angle has
// density proportional to sin^{n-1} t on [0, alpha].
SurfacePoint uniform_cap_point(const Cap& cap, Rng& rng);

// Reusable sampler for one cap. Picks the polar-angle method once: a
// t^{n-1} power proposal when (sin a / a)^{n-1} is not small, rejection from
// the whole sphere for large caps, and inverse-CDF bisection otherwise.
class CapSampler {
 public:
  enum class Method { power_proposal, whole_sphere_rejection, inverse_cdf };

  explicit CapSampler(Cap cap);

  void sample(Rng& rng, std::span<double> out) const;
  SurfacePoint sample(Rng& rng) const;

  const Cap& cap() const { return cap_; }
  Method method() const { return method_; }

 private:
  Cap cap_;
  Method method_;
  double log_theta_alpha_ = 0.0;
};

bool cap_contains(const Cap& cap, std::span<const double> p);
inline bool cap_contains(const Cap& cap, const SurfacePoint& p) { return cap_contains(cap, p.view()); }

// theta = I_{sin^2 alpha}(n/2, 1/2) / 2 with alpha = arcsin(rho / r).
CapMeasure cap_fraction(const SphereSpec& sphere, double rho);

// Fraction of a cap with half-angle alpha in [0, pi/2] on any S^n (the
// fraction does not depend on the radius).
CapMeasure cap_fraction_for_angle(int n, double alpha);

// {2 pi (n-1)}^{-1/2} sin^{n-1}(alpha) / cos(alpha); dominates the fraction
// of the alpha-cap on the unit (n-1)-sphere.
double cap_fraction_upper(int n, double alpha);

// (tau / delta)^n for half-chords 0 < tau < delta.
double cap_ratio_lower(int n, double tau, double delta);

// (a_tau / a_delta)^n for half-angles 0 < a_tau < a_delta <= pi/2. Unlike the
// half-chord form this is a true lower bound on theta_tau / theta_delta.
double cap_ratio_lower_angular(int n, double tau_angle, double delta_angle);

// Centers subtend an angle <= arcsin(d / r).
bool is_d_close(const SurfacePoint& y, const SurfacePoint& z, double d, const SphereSpec& sphere);

// Center of the unit ball cutting the sphere in C(1, y): y * sqrt(r^2 - 1) / r.
std::vector<double> ball_center(const Cap& cap);

// Two-cap geometry of a mu-cap at the extreme d-close position relative to a
// rho-cap: sigma(Z) = d. mu_layer selects a boundary layer mu' <= mu.
IntersectionGeometry intersection_geometry(const SphereSpec& sphere, double rho, double mu_layer,
                                           const ParamSet& params);

}  // namespace spherecover
