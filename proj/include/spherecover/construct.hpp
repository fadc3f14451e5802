#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spherecover/capgeom.hpp"
#include "spherecover/points.hpp"
#include "spherecover/schedule.hpp"

namespace spherecover {

struct Provenance {
  std::string mode;
  std::uint64_t seed = 0;
  // Base coverings as "role:kind:half_chord:seed:fail_prob".
  std::vector<std::string> parents;

  bool operator==(const Provenance&) const = default;
};

// Equal caps of one half-chord on one sphere.
struct Covering {
  SphereSpec sphere;
  double half_chord;
  PointSet centers;
  Provenance provenance;

  Covering(SphereSpec sphere, double half_chord, PointSet centers, Provenance provenance = {});

  std::size_t size() const { return centers.size(); }
  double half_angle() const { return half_angle_of(sphere, half_chord); }

  bool operator==(const Covering&) const = default;
};

class ConstructionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parent descriptor of a generated base covering.
struct BaseSpec {
  std::string role;  // eps_net or mu_net
  std::string kind;  // grid or random
  double half_chord = 0.0;
  std::uint64_t seed = 0;
  double fail_prob = 0.0;
};

std::string format_base_spec(const BaseSpec& spec);
BaseSpec parse_base_spec(const std::string& text);
// Rebuilds the covering a descriptor names.
Covering build_base(const SphereSpec& sphere, const BaseSpec& spec);

// Cube-grid covering whose caps of half-chord rho_b contain every sphere point.
Covering grid_base_covering(const SphereSpec& sphere, double rho_b);

// Number of uniform caps planned for a random base covering.
struct RandomBasePlan {
  double eta = 0.0;          // check-net radius alpha_b / 4
  std::uint64_t net_size = 0;
  double theta_shrunk = 0.0;  // fraction of the cap of angle 3 alpha_b / 4
  std::uint64_t caps = 0;
};

RandomBasePlan plan_random_base(const SphereSpec& sphere, double rho_b, double fail_prob);

// Uniform caps certified against a cube-grid check-net; the cap count doubles
// after each failed certification, up to 5 rounds.
Covering random_base_covering(const SphereSpec& sphere, double rho_b, double fail_prob, std::uint64_t seed);

Covering rescale_covering(const Covering& cov, double factor);

// Lazy cube-grid eps-net whose covering angle is at most arcsin(eps / r).
CubeGridNet grid_eps_net(const SphereSpec& sphere, double eps);

struct EmbeddedResult {
  Covering covering;
  PointSet y_centers;
  std::vector<std::uint64_t> uncovered_eps;  // indices into the eps-net
  std::uint64_t eps_net_size = 0;

  double uncovered_fraction() const {
    return eps_net_size == 0 ? 0.0 : static_cast<double>(uncovered_eps.size()) / static_cast<double>(eps_net_size);
  }
};

// N random rho-caps plus every eps-center they miss, inflated to half-chord 1.
EmbeddedResult embedded_cover(const SphereSpec& sphere, const Covering& cov_eps, const ParamSet& params,
                              std::uint64_t seed);
EmbeddedResult embedded_cover(const SphereSpec& sphere, const CubeGridNet& eps_grid, const ParamSet& params,
                              std::uint64_t seed);

struct CenterClasses {
  std::vector<std::size_t> bad;
  std::vector<std::size_t> good;
  std::vector<std::size_t> close_counts;  // d-close y per mu-center
};

// A mu-center is bad when at most s random centers are d-close to it.
CenterClasses classify_centers(const Covering& cov_mu, const PointSet& y_centers, const ParamSet& params);

struct TwoLevelResult {
  PointSet y_centers;
  PointSet bad_centers;
  PointSet patched_centers;
  Covering final_covering;
  std::vector<std::size_t> patched_indices;  // mu-net indices, ascending
  std::uint64_t eps_net_size = 0;
  std::size_t uncovered_eps = 0;
  std::size_t n_prime_empirical = 0;
  std::size_t n_double_prime_empirical = 0;
  std::size_t n_bar_empirical = 0;
  // Every patched center is bad or contains an uncovered good eps-center,
  // and distinct patched good centers have distinct witnesses.
  bool set_algebra_ok = false;
  ParamSet params;
};

TwoLevelResult two_level_cover(const SphereSpec& sphere, const Covering& cov_mu, const Covering& cov_eps,
                               const ParamSet& params, std::uint64_t seed);
TwoLevelResult two_level_cover(const SphereSpec& sphere, const Covering& cov_mu, const CubeGridNet& eps_grid,
                               const ParamSet& params, std::uint64_t seed);

}  // namespace spherecover
