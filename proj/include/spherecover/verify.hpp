#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "spherecover/construct.hpp"
#include "spherecover/points.hpp"
#include "spherecover/rng.hpp"

namespace spherecover {

enum class VerificationMode { net, monte_carlo, lemma_lower };

std::string_view to_string(VerificationMode mode);

struct VerificationReport {
  VerificationMode mode = VerificationMode::net;
  std::uint64_t samples_or_net_size = 0;
  std::uint64_t uncovered_count = 0;
  double uncovered_fraction_estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double margin = 0.0;           // net: lower bound on the smallest angular slack (exact on explicit nets)
  double margin_required = 0.0;  // net: slack each net point needs
  double density = 0.0;
  double threshold = 0.0;        // largest uncovered fraction accepted
  bool passed = false;
};

// Two-sided Clopper-Pearson interval at the given confidence.
std::pair<double, double> clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence = 0.99);

// Passes iff every net point sits inside some cap shrunk by margin_required.
// With margin_required at least the net's covering angle this certifies that
// the caps cover the whole sphere.
VerificationReport verify_net(const Covering& cov, const Covering& net, double margin_required);
VerificationReport verify_net(const Covering& cov, const CubeGridNet& net, double margin_required);

// Uniform sphere samples split into fixed shards with derived seeds. Passes
// when no sample is uncovered.
VerificationReport verify_monte_carlo(const Covering& cov, std::uint64_t samples, Rng& rng);

double measured_density(const Covering& cov);

struct CapFractionOracle {
  double exact = 0.0;
  double estimate = 0.0;
  double sigma = 0.0;  // binomial standard error at the exact fraction
  double z = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  bool agrees = false;  // |estimate - exact| <= sigmas * sigma
};

// Monte Carlo estimate of the fraction of C(rho, .) against the exact value.
CapFractionOracle cap_fraction_oracle(const SphereSpec& sphere, double rho, std::uint64_t samples, std::uint64_t seed,
                                      double sigmas = 3.0);

// Samples C(mu, Z) with Z at sin angle(Y, Z) = placement / r from Y and counts
// points outside C(rho, Y). placement defaults to d (the worst d-close case).
VerificationReport lemma_lower_check(const SphereSpec& sphere, const ParamSet& params, std::uint64_t samples, Rng& rng,
                                     std::optional<double> placement = std::nullopt);

}  // namespace spherecover
