#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spherecover/capgeom.hpp"
#include "spherecover/construct.hpp"
#include "spherecover/schedule.hpp"
#include "spherecover/verify.hpp"

using namespace spherecover;

namespace {

// 1000 equal arcs on the unit circle leaving a total uncovered fraction of
// exactly 1e-3 in 1000 equal gaps.
Covering gapped_circle() {
  const SphereSpec s(1, 1.0);
  const double a = std::numbers::pi * (1.0 - 1e-3) / 1000.0;
  PointSet centers(2);
  for (int k = 0; k < 1000; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 1000.0;
    centers.push_back(std::vector<double>{std::cos(t), std::sin(t)});
  }
  return Covering(s, std::sin(a), centers);
}

Covering hemisphere(int n, double r) {
  const SphereSpec s(n, r);
  PointSet c(s.ambient_dim());
  std::vector<double> p(s.ambient_dim(), 0.0);
  p[0] = r;
  c.push_back(p);
  return Covering(s, r, c);
}

}  // namespace

TEST(ClopperPearson, KnownValuesAndEdges) {
  const auto [lo0, hi0] = clopper_pearson(0, 1000);
  EXPECT_EQ(lo0, 0.0);
  EXPECT_NEAR(hi0, 1.0 - std::pow(0.005, 1.0 / 1000.0), 1e-12);
  const auto [lo1, hi1] = clopper_pearson(1000, 1000);
  EXPECT_NEAR(lo1, std::pow(0.005, 1.0 / 1000.0), 1e-12);
  EXPECT_EQ(hi1, 1.0);
  const auto [lo, hi] = clopper_pearson(50, 100);
  EXPECT_LT(lo, 0.5);
  EXPECT_GT(hi, 0.5);
  EXPECT_NEAR(lo + hi, 1.0, 1e-12);  // symmetric at k = n/2
  EXPECT_THROW(clopper_pearson(1, 0), std::invalid_argument);
  EXPECT_THROW(clopper_pearson(5, 4), std::invalid_argument);
}

TEST(ClopperPearson, CoverageOverSeeds) {
  const Covering half = hemisphere(3, 1.5);
  int misses = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const VerificationReport r = verify_monte_carlo(half, 2000, rng);
    EXPECT_LE(r.ci_low, r.uncovered_fraction_estimate);
    EXPECT_GE(r.ci_high, r.uncovered_fraction_estimate);
    misses += !(r.ci_low <= 0.5 && 0.5 <= r.ci_high);
  }
  // Exact 99% intervals: P(more than 4 misses in 100) < 0.4%.
  EXPECT_LE(misses, 4);
}

TEST(MonteCarlo, HemisphereAndDeterminism) {
  const Covering half = hemisphere(5, 2.0);
  Rng a(3), b(3);
  const VerificationReport ra = verify_monte_carlo(half, 200000, a);
  const VerificationReport rb = verify_monte_carlo(half, 200000, b);
  EXPECT_EQ(ra.uncovered_count, rb.uncovered_count);
  EXPECT_NEAR(ra.uncovered_fraction_estimate, 0.5, 4.0 * 0.5 / std::sqrt(200000.0));
  EXPECT_FALSE(ra.passed);
  EXPECT_EQ(ra.mode, VerificationMode::monte_carlo);
  EXPECT_EQ(ra.samples_or_net_size, 200000u);
  EXPECT_THROW(verify_monte_carlo(half, 0, a), std::invalid_argument);
}

TEST(MonteCarlo, DetectsAThousandthGap) {
  const Covering cov = gapped_circle();
  Rng rng(17);
  const VerificationReport r = verify_monte_carlo(cov, 1000000, rng);
  EXPECT_FALSE(r.passed);
  EXPECT_LE(r.ci_low, 1e-3);
  EXPECT_GE(r.ci_high, 1e-3);
  EXPECT_GT(r.uncovered_count, 800u);
}

TEST(NetVerification, DetectsAThousandthGap) {
  const Covering cov = gapped_circle();
  const SphereSpec s(1, 1.0);
  const double eta = std::numbers::pi / 20000.0;
  const Covering net = grid_base_covering(s, std::sin(eta));
  const VerificationReport r = verify_net(cov, net, eta);
  EXPECT_FALSE(r.passed);
  EXPECT_GT(r.uncovered_count, 0u);
  EXPECT_LT(r.margin, eta);
}

TEST(NetVerification, ExplicitNetExactMargin) {
  const SphereSpec s(2, 1.5);
  const Covering net = grid_base_covering(s, 0.1);
  const double eta = net.half_angle();
  // The net's own centers with caps of angle 3 eta: every net point is a center.
  const Covering cov(s, 1.5 * std::sin(3.0 * eta), net.centers);
  const VerificationReport r = verify_net(cov, net, eta);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.margin, cov.half_angle(), 1e-12);
  EXPECT_EQ(r.margin_required, eta);
  EXPECT_EQ(r.samples_or_net_size, net.size());
  EXPECT_THROW(verify_net(cov, net, 0.5 * eta), std::invalid_argument);
}

TEST(NetVerification, GridNetAgreesWithExplicitNet) {
  const SphereSpec s(3, 1.5);
  const CubeGridNet grid = grid_eps_net(s, 0.15);
  const Covering explicit_net(s, 1.5 * std::sin(grid.covering_angle()), grid.materialize());
  const double margin = std::asin(0.15 / 1.5);
  for (std::uint64_t trials : {20u, 200u}) {
    const ParamSet p = params_engineering(3, 1.5, 0.15, 0.4, 2.0, trials);
    Covering y_only(s, 1.0, embedded_cover(s, grid, p, 4).y_centers);
    const VerificationReport g = verify_net(y_only, grid, margin);
    const VerificationReport e = verify_net(y_only, explicit_net, margin);
    EXPECT_EQ(g.uncovered_count, e.uncovered_count) << trials;
    EXPECT_EQ(g.passed, e.passed);
    EXPECT_LE(g.margin, e.margin + 1e-12);
  }
}

TEST(NetVerification, EmptyCoveringFails) {
  const SphereSpec s(3, 1.5);
  const Covering empty(s, 1.0, PointSet(4));
  const CubeGridNet grid = grid_eps_net(s, 0.3);
  const VerificationReport r = verify_net(empty, grid, std::asin(0.3 / 1.5));
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.uncovered_count, grid.size());
  EXPECT_THROW(verify_net(empty, grid, 0.01), std::invalid_argument);
}

TEST(Density, SumOfFractions) {
  const Covering half = hemisphere(4, 1.5);
  EXPECT_NEAR(measured_density(half), 0.5, 1e-15);
  const Covering arcs = gapped_circle();
  EXPECT_NEAR(measured_density(arcs), 1.0 - 1e-3, 1e-12);
}

TEST(CapOracle, AgreesWithExactFraction) {
  const CapFractionOracle o = cap_fraction_oracle(SphereSpec(3, 2.0), 1.0, 1000000, 5);
  EXPECT_NEAR(o.exact, 0.028834442811218654, 1e-15);
  EXPECT_TRUE(o.agrees);
  EXPECT_NEAR(o.sigma, std::sqrt(o.exact * (1 - o.exact) / 1e6), 1e-15);
  EXPECT_EQ(cap_fraction_oracle(SphereSpec(3, 2.0), 1.0, 1000000, 5).hits, o.hits);
}

TEST(LemmaLower, TrivialBranchBelowFortyTwo) {
  const SphereSpec s(30, 1.5);
  Rng rng(1);
  const VerificationReport r = lemma_lower_check(s, params_v2(30, 1.5), 20000, rng);
  EXPECT_EQ(r.threshold, 0.0);
  EXPECT_EQ(r.uncovered_count, 0u);
  EXPECT_TRUE(r.passed);
}

TEST(LemmaLower, NoUncoveredSamplesAtFifty) {
  const SphereSpec s(50, 1.5);
  Rng rng(2);
  const VerificationReport r = lemma_lower_check(s, params_v2(50, 1.5), 20000, rng);
  EXPECT_EQ(r.uncovered_count, 0u);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.mode, VerificationMode::lemma_lower);
}

TEST(LemmaLower, EngineeringHalfRatio) {
  // eps / mu = 1/2: a visible uncovered lune inside the mu-cap.
  const SphereSpec s(6, 1.5);
  const ParamSet p = params_engineering(6, 1.5, 0.1, 0.2);
  Rng rng(3);
  const VerificationReport r = lemma_lower_check(s, p, 200000, rng);
  EXPECT_GT(r.uncovered_count, 0u);
  EXPECT_LT(r.uncovered_fraction_estimate, cap_fraction_for_angle(5, std::acos(0.5)).theta);
  EXPECT_TRUE(r.passed);
  // Closer placements leave less uncovered.
  Rng rng2(3);
  const VerificationReport nearer = lemma_lower_check(s, p, 200000, rng2, 0.5 * p.d_value());
  EXPECT_LE(nearer.uncovered_count, r.uncovered_count);
}

TEST(LemmaLower, Validation) {
  Rng rng(1);
  EXPECT_THROW(lemma_lower_check(SphereSpec(50, 1.5), params_v1(50, 1.5), 10, rng), std::invalid_argument);
  EXPECT_THROW(lemma_lower_check(SphereSpec(50, 2.0), params_v2(50, 1.5), 10, rng), std::invalid_argument);
  EXPECT_THROW(lemma_lower_check(SphereSpec(50, 1.5), params_v2(50, 1.5), 0, rng), std::invalid_argument);
  EXPECT_THROW(lemma_lower_check(SphereSpec(50, 1.5), params_v2(50, 1.5), 10, rng, 1.5), std::invalid_argument);
}
