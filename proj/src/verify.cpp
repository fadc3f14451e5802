#include "spherecover/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "spherecover/bounds.hpp"

namespace spherecover {
namespace {

constexpr std::uint64_t kShardSize = 1ULL << 16;

void fill_interval(VerificationReport& report) {
  const std::uint64_t n = report.samples_or_net_size;
  report.uncovered_fraction_estimate = n == 0 ? 0.0 : static_cast<double>(report.uncovered_count) / static_cast<double>(n);
  if (n == 0) {
    report.ci_low = 0.0;
    report.ci_high = 1.0;
    return;
  }
  std::tie(report.ci_low, report.ci_high) = clopper_pearson(report.uncovered_count, n);
}

template <class NetPoint>
VerificationReport verify_net_impl(const Covering& cov, std::uint64_t net_size, double eta, double margin_required,
                                   NetPoint&& net_point) {
  if (!(margin_required >= eta)) {
    throw std::invalid_argument("verify_net: margin below the net radius gives no certificate");
  }
  VerificationReport report;
  report.mode = VerificationMode::net;
  report.samples_or_net_size = net_size;
  report.margin_required = margin_required;
  report.density = measured_density(cov);
  report.margin = std::numeric_limits<double>::infinity();
  const double alpha = cov.half_angle();
  std::vector<double> p(cov.sphere.ambient_dim());
  if (cov.size() == 0) {
    report.uncovered_count = net_size;
    report.margin = -std::numeric_limits<double>::infinity();
  } else {
    const CapIndex index(cov.centers, alpha);
    for (std::uint64_t i = 0; i < net_size; ++i) {
      net_point(i, p);
      const auto [nearest, angle] = index.nearest_within(p, alpha);
      const double slack = nearest == CapIndex::npos ? -std::numeric_limits<double>::infinity() : alpha - angle;
      report.margin = std::min(report.margin, slack);
      if (!(slack >= margin_required)) ++report.uncovered_count;
    }
  }
  fill_interval(report);
  report.threshold = 0.0;
  report.passed = report.uncovered_count == 0;
  return report;
}

// Counts uniform unit-sphere samples accepted by `hit`. Samples are cut into
// fixed shards, each with its own derived stream, so the total does not
// depend on how shards are spread over threads.
template <class Hit>
std::uint64_t sharded_count(std::uint64_t samples, std::uint64_t master, std::string_view tag, std::size_t dim,
                            Hit&& hit) {
  const std::uint64_t shards = (samples + kShardSize - 1) / kShardSize;
  std::atomic<std::uint64_t> total{0};
  std::atomic<std::uint64_t> next_shard{0};
  auto worker = [&] {
    std::vector<double> p(dim);
    for (;;) {
      const std::uint64_t shard = next_shard.fetch_add(1);
      if (shard >= shards) return;
      Rng local(derive_seed(master, tag, shard));
      const std::uint64_t begin = shard * kShardSize;
      const std::uint64_t end = std::min(samples, begin + kShardSize);
      std::uint64_t count = 0;
      for (std::uint64_t i = begin; i < end; ++i) {
        uniform_direction(local, p);
        if (hit(std::span<const double>(p))) ++count;
      }
      total += count;
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto workers = static_cast<unsigned>(std::min<std::uint64_t>(hw, shards));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return total.load();
}

}  // namespace

std::string_view to_string(VerificationMode mode) {
  switch (mode) {
    case VerificationMode::net: return "net";
    case VerificationMode::monte_carlo: return "monte_carlo";
    case VerificationMode::lemma_lower: return "lemma_lower";
  }
  return "?";
}

std::pair<double, double> clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) throw std::invalid_argument("clopper_pearson: no trials");
  if (successes > trials) throw std::invalid_argument("clopper_pearson: more successes than trials");
  using boost::math::binomial_distribution;
  const double tail = (1.0 - confidence) / 2.0;
  const auto n = static_cast<double>(trials);
  const auto k = static_cast<double>(successes);
  const double lo = successes == 0 ? 0.0
                                   : binomial_distribution<>::find_lower_bound_on_p(
                                         n, k, tail, binomial_distribution<>::clopper_pearson_exact_interval);
  const double hi = successes == trials ? 1.0
                                        : binomial_distribution<>::find_upper_bound_on_p(
                                              n, k, tail, binomial_distribution<>::clopper_pearson_exact_interval);
  return {lo, hi};
}

VerificationReport verify_net(const Covering& cov, const Covering& net, double margin_required) {
  if (!(net.sphere == cov.sphere)) throw std::invalid_argument("verify_net: net lies on a different sphere");
  return verify_net_impl(cov, net.size(), net.half_angle(), margin_required,
                         [&](std::uint64_t i, std::vector<double>& p) {
                           const auto src = net.centers[i];
                           std::copy(src.begin(), src.end(), p.begin());
                         });
}

VerificationReport verify_net(const Covering& cov, const CubeGridNet& net, double margin_required) {
  if (net.n() != cov.sphere.n) throw std::invalid_argument("verify_net: net has a different dimension");
  if (!(margin_required >= net.covering_angle())) {
    throw std::invalid_argument("verify_net: margin below the net radius gives no certificate");
  }
  VerificationReport report;
  report.mode = VerificationMode::net;
  report.samples_or_net_size = net.size();
  report.margin_required = margin_required;
  report.density = measured_density(cov);
  const double shrunk = cov.half_angle() - margin_required;
  if (cov.size() == 0 || shrunk < 0.0) {
    report.uncovered_count = net.size();
    report.margin = -std::numeric_limits<double>::infinity();
  } else {
    const GridSweep sweep = sweep_grid(net, cov.centers, shrunk, LeafTest::angle, false);
    report.uncovered_count = sweep.uncovered_count;
    report.margin = margin_required + sweep.min_slack;
  }
  fill_interval(report);
  report.threshold = 0.0;
  report.passed = report.uncovered_count == 0;
  return report;
}

VerificationReport verify_monte_carlo(const Covering& cov, std::uint64_t samples, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("verify_monte_carlo: need at least one sample");
  const std::uint64_t master = rng();
  const double alpha = cov.half_angle();
  const CapIndex index(cov.centers, alpha);
  const std::uint64_t uncovered =
      sharded_count(samples, master, "mc-verify", cov.sphere.ambient_dim(), [&](std::span<const double> p) {
        return cov.size() == 0 || !index.any_within(p, alpha);
      });

  VerificationReport report;
  report.mode = VerificationMode::monte_carlo;
  report.samples_or_net_size = samples;
  report.uncovered_count = uncovered;
  report.density = measured_density(cov);
  report.threshold = 0.0;
  fill_interval(report);
  report.passed = report.uncovered_count == 0;
  return report;
}

CapFractionOracle cap_fraction_oracle(const SphereSpec& sphere, double rho, std::uint64_t samples, std::uint64_t seed,
                                      double sigmas) {
  if (samples < 1) throw std::invalid_argument("cap_fraction_oracle: need at least one sample");
  const double alpha = half_angle_of(sphere, rho);
  std::vector<double> pole(sphere.ambient_dim(), 0.0);
  pole[0] = 1.0;
  CapFractionOracle out;
  out.samples = samples;
  out.exact = cap_fraction(sphere, rho).theta;
  out.hits = sharded_count(samples, seed, "cap-oracle", sphere.ambient_dim(),
                           [&](std::span<const double> p) { return within_angle(p, pole, alpha); });
  out.estimate = static_cast<double>(out.hits) / static_cast<double>(samples);
  out.sigma = std::sqrt(out.exact * (1.0 - out.exact) / static_cast<double>(samples));
  out.z = out.sigma > 0.0 ? (out.estimate - out.exact) / out.sigma : 0.0;
  out.agrees = std::fabs(out.estimate - out.exact) <= sigmas * out.sigma;
  return out;
}

double measured_density(const Covering& cov) {
  return static_cast<double>(cov.size()) * cap_fraction(cov.sphere, cov.half_chord).theta;
}

VerificationReport lemma_lower_check(const SphereSpec& sphere, const ParamSet& params, std::uint64_t samples, Rng& rng,
                                     std::optional<double> placement) {
  if (params.mode != ScheduleMode::v2 && params.mode != ScheduleMode::engineering) {
    throw std::invalid_argument("lemma_lower_check: needs the v2 or engineering schedule");
  }
  if (samples < 1) throw std::invalid_argument("lemma_lower_check: need at least one sample");
  if (params.n != sphere.n || params.r != sphere.r) {
    throw std::invalid_argument("lemma_lower_check: parameter set was computed for a different sphere");
  }
  const int n = sphere.n;
  const double r = sphere.r;
  const double mu = params.mu_value();
  const double sep = placement.value_or(params.d_value());
  if (!(sep > 0.0 && sep < r)) throw std::invalid_argument("lemma_lower_check: placement must be in (0, r)");

  const std::size_t dim = sphere.ambient_dim();
  std::vector<double> y(dim, 0.0);
  std::vector<double> z(dim, 0.0);
  y[0] = r;
  const double phi = std::asin(sep / r);
  z[0] = r * std::cos(phi);
  z[1] = r * std::sin(phi);
  const Cap big(sphere, make_surface_point(sphere, y), params.rho);
  const CapSampler small(Cap(sphere, make_surface_point(sphere, z), mu));

  VerificationReport report;
  report.mode = VerificationMode::lemma_lower;
  report.samples_or_net_size = samples;
  std::vector<double> p(dim);
  for (std::uint64_t i = 0; i < samples; ++i) {
    small.sample(rng, p);
    if (!cap_contains(big, p)) ++report.uncovered_count;
  }
  fill_interval(report);

  const bool trivial = params.epsilon >= mu;
  double bound = 0.0;
  if (!trivial) {
    if (params.mode == ScheduleMode::v2) {
      bound = uncovered_fraction_bound(n).omega_relaxed;
    } else {
      bound = cap_fraction_for_angle(n - 1, std::acos(params.epsilon / mu)).theta;
    }
  }
  const double sigma = std::sqrt(bound * (1.0 - bound) / static_cast<double>(samples));
  report.threshold = bound + 4.0 * sigma;
  report.passed = report.uncovered_fraction_estimate <= report.threshold;
  return report;
}

}  // namespace spherecover
