#include "spherecover/construct.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "spherecover/verify.hpp"

namespace spherecover {
namespace {

constexpr int kRandomBaseRounds = 5;

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void sample_sphere_points(const SphereSpec& sphere, std::uint64_t count, Rng& rng, PointSet& out) {
  std::vector<double> p(sphere.ambient_dim());
  out.reserve(out.size() + count);
  for (std::uint64_t i = 0; i < count; ++i) {
    uniform_direction(rng, p);
    for (double& x : p) x *= sphere.r;
    out.push_back(p);
  }
}

std::uint64_t materialized_trials(const ParamSet& params) {
  if (!params.trials.exact) {
    throw std::invalid_argument("construction needs N below 2^53; this schedule gives log N = " +
                                format_double(params.trials.log_count));
  }
  return params.trials.as_integer();
}

void require_params_match(const SphereSpec& sphere, const ParamSet& params) {
  if (params.n != sphere.n || params.r != sphere.r) {
    throw std::invalid_argument("parameter set was computed for a different sphere");
  }
}

void require_net(const SphereSpec& sphere, const Covering& net, double half_chord, const char* role) {
  if (!(net.sphere == sphere)) throw std::invalid_argument(std::string(role) + " lies on a different sphere");
  if (net.half_chord > half_chord * (1.0 + 1e-12)) {
    throw std::invalid_argument(std::string(role) + " half-chord " + format_double(net.half_chord) +
                                " exceeds the schedule value " + format_double(half_chord));
  }
  if (net.size() == 0) throw std::invalid_argument(std::string(role) + " is empty");
}

// Explicit or grid eps-net behind one interface.
class EpsNetRef {
 public:
  explicit EpsNetRef(const Covering& cov) : cov_(&cov) {}
  explicit EpsNetRef(const CubeGridNet& grid) : grid_(&grid) {}

  std::uint64_t size() const { return cov_ ? cov_->size() : grid_->size(); }

  void point(std::uint64_t i, std::vector<double>& out) const {
    if (cov_) {
      const auto p = cov_->centers[i];
      out.assign(p.begin(), p.end());
    } else {
      out.resize(static_cast<std::size_t>(grid_->n()) + 1);
      grid_->point(i, out);
    }
  }

  void require_on(const SphereSpec& sphere, double eps) const {
    if (cov_) {
      require_net(sphere, *cov_, eps, "eps-net");
      return;
    }
    if (grid_->n() != sphere.n || grid_->radius() != sphere.r) {
      throw std::invalid_argument("eps-net grid lies on a different sphere");
    }
    if (grid_->covering_angle() > half_angle_of(sphere, eps) * (1.0 + 1e-12)) {
      throw std::invalid_argument("eps-net grid is coarser than the schedule eps");
    }
  }

  // Net points farther than alpha from every y, ascending.
  std::vector<std::uint64_t> uncovered(const PointSet& y, double alpha) const {
    std::vector<std::uint64_t> out;
    if (y.empty()) {
      out.resize(size());
      for (std::uint64_t i = 0; i < out.size(); ++i) out[i] = i;
      return out;
    }
    if (grid_) return sweep_grid(*grid_, y, alpha, LeafTest::chord, true).uncovered;
    const CapIndex index(y, alpha);
    for (std::size_t u = 0; u < cov_->size(); ++u) {
      if (!index.any_within(cov_->centers[u], alpha)) out.push_back(u);
    }
    return out;
  }

  std::vector<std::string> parents() const { return cov_ ? cov_->provenance.parents : std::vector<std::string>{}; }

 private:
  const Covering* cov_ = nullptr;
  const CubeGridNet* grid_ = nullptr;
};

EmbeddedResult embedded_impl(const SphereSpec& sphere, const EpsNetRef& net, const ParamSet& params,
                             std::uint64_t seed);
TwoLevelResult two_level_impl(const SphereSpec& sphere, const Covering& cov_mu, const EpsNetRef& net,
                              const ParamSet& params, std::uint64_t seed);

}  // namespace

CubeGridNet grid_eps_net(const SphereSpec& sphere, double eps) {
  if (!(eps > 0.0) || eps > sphere.r) throw std::invalid_argument("grid_eps_net: eps must be in (0, r]");
  return CubeGridNet::with_angle(sphere.n, sphere.r, half_angle_of(sphere, eps));
}

EmbeddedResult embedded_cover(const SphereSpec& sphere, const Covering& cov_eps, const ParamSet& params,
                              std::uint64_t seed) {
  return embedded_impl(sphere, EpsNetRef(cov_eps), params, seed);
}

EmbeddedResult embedded_cover(const SphereSpec& sphere, const CubeGridNet& eps_grid, const ParamSet& params,
                              std::uint64_t seed) {
  return embedded_impl(sphere, EpsNetRef(eps_grid), params, seed);
}

TwoLevelResult two_level_cover(const SphereSpec& sphere, const Covering& cov_mu, const Covering& cov_eps,
                               const ParamSet& params, std::uint64_t seed) {
  return two_level_impl(sphere, cov_mu, EpsNetRef(cov_eps), params, seed);
}

TwoLevelResult two_level_cover(const SphereSpec& sphere, const Covering& cov_mu, const CubeGridNet& eps_grid,
                               const ParamSet& params, std::uint64_t seed) {
  return two_level_impl(sphere, cov_mu, EpsNetRef(eps_grid), params, seed);
}

Covering::Covering(SphereSpec sphere_in, double half_chord_in, PointSet centers_in, Provenance provenance_in)
    : sphere(sphere_in), half_chord(half_chord_in), centers(std::move(centers_in)), provenance(std::move(provenance_in)) {
  if (!(half_chord > 0.0) || half_chord > sphere.r) throw std::invalid_argument("Covering: half-chord must be in (0, r]");
  if (centers.dim() != sphere.ambient_dim() && !centers.empty()) {
    throw std::invalid_argument("Covering: center dimension does not match the sphere");
  }
  if (centers.empty()) centers = PointSet(sphere.ambient_dim());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    double len2 = 0.0;
    for (double x : centers[i]) len2 += x * x;
    if (std::fabs(std::sqrt(len2) - sphere.r) > 1e-9 * sphere.r) {
      throw std::invalid_argument("Covering: center " + std::to_string(i) + " is off the sphere");
    }
  }
}

std::string format_base_spec(const BaseSpec& spec) {
  char seed[32];
  std::snprintf(seed, sizeof seed, "%" PRIu64, spec.seed);
  return spec.role + ":" + spec.kind + ":" + format_double(spec.half_chord) + ":" + seed + ":" +
         format_double(spec.fail_prob);
}

BaseSpec parse_base_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 5) throw std::invalid_argument("malformed base descriptor '" + text + "'");
  BaseSpec spec;
  spec.role = parts[0];
  spec.kind = parts[1];
  try {
    std::size_t used = 0;
    spec.half_chord = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("trailing");
    spec.seed = std::stoull(parts[3], &used);
    if (used != parts[3].size()) throw std::invalid_argument("trailing");
    spec.fail_prob = std::stod(parts[4], &used);
    if (used != parts[4].size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed base descriptor '" + text + "'");
  }
  if (spec.kind != "grid" && spec.kind != "random") throw std::invalid_argument("unknown base kind '" + spec.kind + "'");
  return spec;
}

Covering build_base(const SphereSpec& sphere, const BaseSpec& spec) {
  if (spec.kind == "grid") return grid_base_covering(sphere, spec.half_chord);
  return random_base_covering(sphere, spec.half_chord, spec.fail_prob, spec.seed);
}

Covering grid_base_covering(const SphereSpec& sphere, double rho_b) {
  if (!(rho_b > 0.0) || rho_b > sphere.r) throw std::invalid_argument("grid_base_covering: rho_b must be in (0, r]");
  const CubeGridNet grid = CubeGridNet::with_angle(sphere.n, sphere.r, half_angle_of(sphere, rho_b));
  Provenance prov;
  prov.mode = "grid";
  return Covering(sphere, rho_b, grid.materialize(), prov);
}

RandomBasePlan plan_random_base(const SphereSpec& sphere, double rho_b, double fail_prob) {
  if (!(rho_b > 0.0) || rho_b > sphere.r) throw std::invalid_argument("random_base_covering: rho_b must be in (0, r]");
  if (!(fail_prob > 0.0 && fail_prob < 1.0)) throw std::invalid_argument("random_base_covering: fail_prob must be in (0, 1)");
  const double alpha = half_angle_of(sphere, rho_b);
  RandomBasePlan plan;
  plan.eta = alpha / 4.0;
  plan.net_size = CubeGridNet::with_angle(sphere.n, sphere.r, plan.eta).size();
  plan.theta_shrunk = cap_fraction_for_angle(sphere.n, alpha - plan.eta).theta;
  const double numerator = std::log(static_cast<double>(plan.net_size)) - std::log(fail_prob);
  const double caps = std::ceil(numerator / -std::log1p(-plan.theta_shrunk));
  if (!(caps < 1e12)) throw std::length_error("random_base_covering: planned cap count is impractical");
  plan.caps = std::max<std::uint64_t>(2, static_cast<std::uint64_t>(caps));
  return plan;
}

Covering random_base_covering(const SphereSpec& sphere, double rho_b, double fail_prob, std::uint64_t seed) {
  const RandomBasePlan plan = plan_random_base(sphere, rho_b, fail_prob);
  const CubeGridNet check_net = CubeGridNet::with_angle(sphere.n, sphere.r, plan.eta);
  Rng rng = make_rng(seed, "random-base");
  std::uint64_t caps = plan.caps;
  std::string diagnostics;
  for (int round = 0; round < kRandomBaseRounds; ++round) {
    PointSet centers(sphere.ambient_dim());
    sample_sphere_points(sphere, caps, rng, centers);
    Provenance prov;
    prov.mode = "random";
    prov.seed = seed;
    Covering cov(sphere, rho_b, std::move(centers), prov);
    const VerificationReport report = verify_net(cov, check_net, plan.eta);
    if (report.passed) return cov;
    diagnostics += " round " + std::to_string(round + 1) + ": " + std::to_string(caps) + " caps left " +
                   std::to_string(report.uncovered_count) + " of " + std::to_string(report.samples_or_net_size) +
                   " check points uncovered;";
    caps *= 2;
  }
  throw ConstructionFailure("random_base_covering did not certify after " + std::to_string(kRandomBaseRounds) +
                            " rounds:" + diagnostics);
}

Covering rescale_covering(const Covering& cov, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw std::invalid_argument("rescale_covering: factor must be positive");
  PointSet centers = cov.centers;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (double& x : centers.mutable_point(i)) x *= factor;
  }
  return Covering(SphereSpec(cov.sphere.n, cov.sphere.r * factor), cov.half_chord * factor, std::move(centers),
                  cov.provenance);
}

CenterClasses classify_centers(const Covering& cov_mu, const PointSet& y_centers, const ParamSet& params) {
  const double d = params.d_value();
  const std::int64_t s = params.s_value();
  const SphereSpec& sphere = cov_mu.sphere;
  if (!y_centers.empty() && y_centers.dim() != sphere.ambient_dim()) {
    throw std::invalid_argument("classify_centers: random centers have the wrong dimension");
  }
  CenterClasses out;
  out.close_counts.assign(cov_mu.size(), 0);
  if (!y_centers.empty()) {
    const double alpha_d = half_angle_of(sphere, d);
    const CapIndex index(y_centers, alpha_d);
    for (std::size_t z = 0; z < cov_mu.size(); ++z) out.close_counts[z] = index.count_within(cov_mu.centers[z], alpha_d);
  }
  for (std::size_t z = 0; z < cov_mu.size(); ++z) {
    if (static_cast<std::int64_t>(out.close_counts[z]) <= s) {
      out.bad.push_back(z);
    } else {
      out.good.push_back(z);
    }
  }
  return out;
}

namespace {

EmbeddedResult embedded_impl(const SphereSpec& sphere, const EpsNetRef& net, const ParamSet& params,
                             std::uint64_t seed) {
  sphere.require_construction_ready();
  if (params.mode != ScheduleMode::v1 && params.mode != ScheduleMode::engineering) {
    throw std::invalid_argument("embedded_cover: needs the v1 or engineering schedule");
  }
  require_params_match(sphere, params);
  net.require_on(sphere, params.epsilon);
  if (std::fabs(params.rho + params.epsilon - 1.0) > 1e-12) throw std::invalid_argument("embedded_cover: rho + eps != 1");

  const std::uint64_t trials = materialized_trials(params);
  Rng rng = make_rng(seed, "embedded-y");
  PointSet y(sphere.ambient_dim());
  sample_sphere_points(sphere, trials, rng, y);

  EmbeddedResult out{Covering(sphere, 1.0, PointSet(sphere.ambient_dim())), y, {}, net.size()};
  out.uncovered_eps = net.uncovered(y, half_angle_of(sphere, params.rho));

  PointSet x = y;
  x.reserve(y.size() + out.uncovered_eps.size());
  std::vector<double> p;
  for (std::uint64_t u : out.uncovered_eps) {
    net.point(u, p);
    x.push_back(p);
  }
  Provenance prov;
  prov.mode = "embedded";
  prov.seed = seed;
  prov.parents = net.parents();
  out.covering = Covering(sphere, 1.0, std::move(x), prov);
  return out;
}

TwoLevelResult two_level_impl(const SphereSpec& sphere, const Covering& cov_mu, const EpsNetRef& net,
                              const ParamSet& params, std::uint64_t seed) {
  sphere.require_construction_ready();
  if (params.mode == ScheduleMode::v1) throw std::invalid_argument("two_level_cover: the v1 schedule has no mu level");
  require_params_match(sphere, params);
  const double eps = params.epsilon;
  const double mu = params.mu_value();
  if (mu + eps > 1.0 + 1e-12) throw std::invalid_argument("two_level_cover: mu + eps > 1 breaks the inflation step");
  if (std::fabs(params.rho + eps - 1.0) > 1e-12) throw std::invalid_argument("two_level_cover: rho + eps != 1");
  net.require_on(sphere, eps);
  require_net(sphere, cov_mu, mu, "mu-net");

  const std::uint64_t trials = materialized_trials(params);
  Rng rng = make_rng(seed, "two-level-y");
  PointSet y(sphere.ambient_dim());
  sample_sphere_points(sphere, trials, rng, y);

  const std::vector<std::uint64_t> uncovered = net.uncovered(y, half_angle_of(sphere, params.rho));
  PointSet uncovered_points(sphere.ambient_dim());
  uncovered_points.reserve(uncovered.size());
  std::vector<double> p;
  for (std::uint64_t u : uncovered) {
    net.point(u, p);
    uncovered_points.push_back(p);
  }

  // First mu-cap containing each uncovered eps-center; witness is the
  // position in `uncovered` of the first eps-center assigned to it.
  const double alpha_mu = half_angle_of(sphere, mu);
  const CapIndex mu_index(cov_mu.centers, alpha_mu);
  std::vector<std::size_t> witness(cov_mu.size(), CapIndex::npos);
  for (std::size_t k = 0; k < uncovered.size(); ++k) {
    const std::size_t z = mu_index.first_within(uncovered_points[k], alpha_mu);
    if (z == CapIndex::npos) {
      throw ConstructionFailure("mu-net does not cover eps-center " + std::to_string(uncovered[k]));
    }
    if (witness[z] == CapIndex::npos) witness[z] = k;
  }

  const CenterClasses classes = classify_centers(cov_mu, y, params);
  std::vector<char> is_good(cov_mu.size(), 0);
  PointSet good_points(sphere.ambient_dim());
  for (std::size_t z : classes.good) {
    is_good[z] = 1;
    good_points.push_back(cov_mu.centers[z]);
  }

  TwoLevelResult out{y,
                     PointSet(sphere.ambient_dim()),
                     PointSet(sphere.ambient_dim()),
                     Covering(sphere, 1.0, PointSet(sphere.ambient_dim())),
                     {},
                     net.size(),
                     uncovered.size(),
                     classes.bad.size(),
                     0,
                     0,
                     false,
                     params};
  for (std::size_t z : classes.bad) out.bad_centers.push_back(cov_mu.centers[z]);

  std::vector<char> in_good_cap(uncovered.size(), 0);
  if (!good_points.empty()) {
    const CapIndex good_index(good_points, alpha_mu);
    for (std::size_t k = 0; k < uncovered.size(); ++k) {
      if (good_index.any_within(uncovered_points[k], alpha_mu)) {
        in_good_cap[k] = 1;
        ++out.n_double_prime_empirical;
      }
    }
  }

  bool algebra = true;
  std::size_t patched_good = 0;
  for (std::size_t z = 0; z < cov_mu.size(); ++z) {
    if (witness[z] == CapIndex::npos) continue;
    out.patched_indices.push_back(z);
    out.patched_centers.push_back(cov_mu.centers[z]);
    if (is_good[z]) {
      ++patched_good;
      if (!in_good_cap[witness[z]]) algebra = false;
    }
  }
  out.n_bar_empirical = out.patched_indices.size();
  algebra = algebra && patched_good <= out.n_double_prime_empirical &&
            out.n_bar_empirical <= out.n_prime_empirical + out.n_double_prime_empirical;
  out.set_algebra_ok = algebra;

  PointSet x = y;
  x.append(out.patched_centers);
  Provenance prov;
  prov.mode = "two-level";
  prov.seed = seed;
  prov.parents = net.parents();
  prov.parents.insert(prov.parents.end(), cov_mu.provenance.parents.begin(), cov_mu.provenance.parents.end());
  out.final_covering = Covering(sphere, 1.0, std::move(x), prov);
  return out;
}

}  // namespace

}  // namespace spherecover
