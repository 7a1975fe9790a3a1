#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oscnet/diagnostics.hpp"
#include "oscnet/dynamics.hpp"
#include "oscnet/errors.hpp"
#include "oscnet/gaussian_oracle.hpp"
#include "test_models.hpp"

using namespace oscnet;

namespace {

DriftConfig small_drift(std::size_t ensemble = 400) {
  DriftConfig cfg;
  cfg.theta = 0.25;
  cfg.t_star = 1.0;
  cfg.ensemble = ensemble;
  cfg.rule = TimescaleRule{0.5, 2.0, 2.0, 1.0};
  return cfg;
}

Model soft_pinned_mass() {
  return Model(NetworkTopology(1, {}, {0}), 1, {PotentialSpec::soft_power(1, 4.0)}, {}, {{1.0, 1.0}});
}

}  // namespace

TEST(ClassifyEvent, DefinitionExamples) {
  const double H0 = 10.0;
  EXPECT_EQ(classify_event(std::vector<double>(50, H0), H0), EventClass::A1);
  EXPECT_EQ(classify_event(std::vector<double>{10, 8, 2.5, 9}, H0), EventClass::A2);
  EXPECT_EQ(classify_event(std::vector<double>{10, 15, 30, 12}, H0), EventClass::A3);
  // first hit decides when both thresholds are crossed
  EXPECT_EQ(classify_event(std::vector<double>{10, 4, 25}, H0), EventClass::A2);
  EXPECT_EQ(classify_event(std::vector<double>{10, 25, 4}, H0), EventClass::A3);
  // the band is closed
  EXPECT_EQ(classify_event(std::vector<double>{10, 5, 20}, H0), EventClass::A1);
  EXPECT_THROW(classify_event(std::vector<double>{}, H0), ArgumentError);
}

TEST(ClassifyEvent, TrackerAgreesAndTreatsNanAsEscape) {
  std::mt19937_64 gen(1);
  std::lognormal_distribution<double> step(0.0, 0.3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> H{1.0};
    for (int i = 0; i < 30; ++i) H.push_back(H.back() * step(gen));
    EventTracker tracker(1.0);
    for (double h : H) tracker.observe(h);
    EXPECT_EQ(tracker.result(), classify_event(H, 1.0));
  }
  EventTracker t(1.0);
  t.observe(1.0);
  t.observe(std::numeric_limits<double>::quiet_NaN());
  EXPECT_EQ(t.result(), EventClass::A3);
}

TEST(StateAtEnergy, HitsTargetEnergy) {
  const auto m = test::chain_model(3, PotentialSpec::soft_power(1, 4.0), PotentialSpec::soft_power(1, 4.0), 1, 1);
  for (double H0 : {10.0, 1e3, 1e6}) {
    const auto zi = state_at_energy(m, H0, Placement::Interaction);
    const auto ei = hamiltonian(m, zi);
    EXPECT_NEAR(ei.H, H0, 1e-12 * H0);
    EXPECT_GE(ei.Hi, ei.H / 2);
    const auto zp = state_at_energy(m, H0, Placement::Pinning);
    const auto ep = hamiltonian(m, zp);
    EXPECT_NEAR(ep.H, H0, 1e-12 * H0);
    EXPECT_GT(ep.Hc, ep.H / 2);
  }
  EXPECT_THROW(state_at_energy(m, 2.0, Placement::Interaction), ArgumentError);  // H(0) = 5
}

TEST(Observables, ParseAndEvaluate) {
  const auto m = test::harmonic_chain(3, 1.0, 1.0);
  State s = State::zeros_like(m);
  s.p = {1.0, 2.0, 3.0};
  s.q = {0.5, -1.0, 0.0};
  EXPECT_DOUBLE_EQ(parse_observable(m, "p2:2").eval(m, s), 4.0);
  EXPECT_DOUBLE_EQ(parse_observable(m, "q2:2").eval(m, s), 1.0);
  EXPECT_DOUBLE_EQ(parse_observable(m, "pq:1").eval(m, s), 0.5);
  EXPECT_DOUBLE_EQ(parse_observable(m, "one").eval(m, s), 1.0);
  EXPECT_DOUBLE_EQ(parse_observable(m, "H").eval(m, s), hamiltonian(m, s).H);
  EXPECT_EQ(parse_observable(m, "Hi").name, "Hi");
  EXPECT_THROW(parse_observable(m, "p2:9"), ArgumentError);
  EXPECT_THROW(parse_observable(m, "energy"), ArgumentError);
}

TEST(DriftConfig, ValidationMessages) {
  const auto m = test::harmonic_chain(3, 1.0, 2.0);
  auto cfg = small_drift();
  cfg.energy_grid = {25, 50, 100};
  EXPECT_NO_THROW(cfg.validate(m));
  cfg.theta = 0.5;  // theta * T_max = 1
  EXPECT_THROW(cfg.validate(m), ArgumentError);
  cfg = small_drift();
  cfg.ensemble = 99;
  EXPECT_THROW(cfg.validate(m), ArgumentError);
  cfg = small_drift();
  cfg.energy_grid = {50, 25, 100};
  EXPECT_THROW(cfg.validate(m), ArgumentError);
  cfg = small_drift();
  cfg.rule.lambda = 0.6;  // exceeds t_star / 2 with harmonic pinning
  EXPECT_THROW(cfg.validate(m), ArgumentError);
}

TEST(DriftEstimate, HarmonicChainContractsAtHighEnergy) {
  const auto m = test::harmonic_chain(3, 1.0, 2.0);
  const auto cfg = small_drift(500);
  const auto est = drift_estimate(m, state_at_energy(m, 50.0, Placement::Interaction), cfg, 11);
  EXPECT_LT(est.ci_high, 1.0);
  EXPECT_TRUE(est.ci_excludes_one());
  EXPECT_EQ(est.counts[0] + est.counts[1] + est.counts[2], est.ensemble);
  EXPECT_NEAR(est.frequency(EventClass::A1) + est.frequency(EventClass::A2) + est.frequency(EventClass::A3), 1.0,
              1e-15);
  EXPECT_EQ(est.blowups, 0u);
  EXPECT_GT(est.mean_gamma, 0.0);
}

TEST(DriftEstimate, ZeroTemperatureIsPureDissipation) {
  const auto m = test::harmonic_chain(3, 0.0, 0.0);
  const auto cfg = small_drift(100);
  const auto est = drift_estimate(m, state_at_energy(m, 20.0, Placement::Interaction), cfg, 1);
  EXPECT_LE(est.mean, 1.0);
  EXPECT_NEAR(est.mean, std::exp(-cfg.theta * est.mean_gamma), 1e-3);
  EXPECT_EQ(est.se, 0.0);
}

TEST(DriftEstimate, ThreadCountDoesNotChangeResult) {
  const auto m = test::chain_model(3, PotentialSpec::soft_power(1, 4.0), PotentialSpec::soft_power(1, 4.0), 1, 2);
  auto cfg = small_drift(300);
  cfg.rule = TimescaleRule{1.0, 4.0, 4.0, 1.0};
  const auto z0 = state_at_energy(m, 100.0, Placement::Interaction);
  cfg.threads = 1;
  const auto a = drift_estimate(m, z0, cfg, 5, 2);
  cfg.threads = 3;
  const auto b = drift_estimate(m, z0, cfg, 5, 2);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.se, b.se);
  EXPECT_EQ(a.counts, b.counts);
  EXPECT_EQ(a.mean_gamma, b.mean_gamma);
}

TEST(DriftScan, ReportsGridSpanAndNeedsThreeLevels) {
  const auto m = test::harmonic_chain(3, 1.0, 2.0);
  auto cfg = small_drift(200);
  cfg.energy_grid = {25, 50};
  EXPECT_THROW(drift_scan(m, cfg, 1), ArgumentError);
  cfg.energy_grid = {10, 30, 100};
  const auto rep = drift_scan(m, cfg, 1);
  EXPECT_TRUE(rep.grid_spans_decade);
  EXPECT_TRUE(rep.c1);
  EXPECT_TRUE(rep.conditions_hold);
  ASSERT_EQ(rep.levels.size(), 3u);
  if (!rep.inconclusive) EXPECT_LT(rep.fit.slope, 0.0);
  cfg.energy_grid = {25, 50, 100};
  EXPECT_FALSE(drift_scan(m, cfg, 1).grid_spans_decade);
}

TEST(DriftScan, UncontrolledFixtureStillRuns) {
  const auto t = builtin_fixture("fig2_square4");
  const std::size_t N = t.vertex_count();
  std::vector<BathParams> baths(t.baths().size(), BathParams{1.0, 1.0});
  const Model m(t, 1, std::vector<std::optional<PotentialSpec>>(N, PotentialSpec::isotropic_quadratic(1, 1.0)),
                std::vector<PotentialSpec>(t.edges().size(), PotentialSpec::isotropic_quadratic(1, 1.0)), baths);
  auto cfg = small_drift(100);
  cfg.energy_grid = {50, 100, 500};
  const auto rep = drift_scan(m, cfg, 3);
  EXPECT_FALSE(rep.c1);
  EXPECT_FALSE(rep.conditions_hold);
  EXPECT_EQ(rep.levels.size(), 3u);
}

TEST(DissipationTail, HugeEpsilonIsAlwaysHit) {
  const auto m = test::harmonic_chain(3, 1.0, 2.0);
  const TimescaleRule rule{0.5, 2.0, 2.0, 1.0};
  const auto r = dissipation_tail(m, state_at_energy(m, 100.0, Placement::Interaction), rule, 1e3, 200, 4);
  EXPECT_EQ(r.hits, r.in_tilde_A);
  EXPECT_EQ(r.in_tilde_A, r.ensemble);
  EXPECT_DOUBLE_EQ(r.probability, 1.0);
  EXPECT_LE(r.ci.low, 1.0);
}

TEST(DissipationTail, SmallEpsilonAtHighEnergyIsRare) {
  const auto m = test::harmonic_chain(3, 1.0, 2.0);
  const TimescaleRule rule{0.5, 2.0, 2.0, 1.0};
  const auto r = dissipation_tail(m, state_at_energy(m, 1e4, Placement::Interaction), rule, 1e-3, 200, 5);
  EXPECT_LE(r.probability, 0.05);
  EXPECT_DOUBLE_EQ(r.tau, 0.5);
  EXPECT_LE(r.ci.low, r.probability);
  EXPECT_GE(r.ci.high, r.probability);
}

TEST(DecayFit, ConstantObservableHasNoSignal) {
  const auto m = test::harmonic_chain(3, 1.0, 2.0);
  DecayOptions opt;
  opt.reference_time = 200.0;
  opt.burn_in = 10.0;
  const auto fit = observable_decay_fit(m, parse_observable(m, "one"), State::zeros_like(m), 2.0, 16, 1, opt);
  for (double s : fit.signal) EXPECT_EQ(s, 0.0);
  EXPECT_TRUE(fit.inconclusive);
}

TEST(DecayFit, HarmonicChainRateNearOracle) {
  // baths on the middle and right masses; p_1^2 then sees the slowest mode clearly
  const auto k = PotentialSpec::isotropic_quadratic(1, 1.0);
  const Model m(test::chain_topology(3, {1, 2}), 1, {k, k, k}, {k, k}, {{1.0, 1.0}, {1.0, 2.0}});
  const double oracle = gaussian_stationary_covariance(m).second_moment_rate();
  DecayOptions opt;
  opt.reference_time = 2e4;
  opt.fit_from = 1.0;
  const auto fit = observable_decay_fit(m, parse_observable(m, "p2:1"), State::zeros_like(m), 10.0, 4000, 2, opt);
  ASSERT_FALSE(fit.inconclusive);
  EXPECT_NEAR(fit.rate / oracle, 1.0, 0.35);
}

TEST(StationaryMoments, EquilibriumChainHasUnitKineticMoments) {
  const auto m = test::harmonic_chain(3, 1.0, 1.0);
  MomentOptions opt;
  opt.thin = 20;
  const auto rep = stationary_moment_test(m, 50.0, 200000, 0.01, 3, opt);
  ASSERT_EQ(rep.p2.size(), 3u);
  for (const auto& e : rep.p2) EXPECT_NEAR(e.mean, 1.0, 0.02);
  EXPECT_NEAR(rep.balance_ratio, 1.0, 0.02);
  EXPECT_TRUE(rep.has_oracle);
  EXPECT_LT(rep.max_abs_z, 4.5);
}

TEST(StationaryMoments, RequiresConditionsUnlessOverridden) {
  const auto m = test::chain_model(3, PotentialSpec::soft_power(1, 4.0), PotentialSpec::isotropic_quadratic(1, 1.0),
                                   1.0, 1.0);  // C5 fails
  EXPECT_THROW(stationary_moment_test(m, 1.0, 1000, 0.01, 1), ArgumentError);
  MomentOptions opt;
  opt.require_conditions = false;
  const auto rep = stationary_moment_test(m, 1.0, 1000, 0.01, 1, opt);
  EXPECT_FALSE(rep.has_oracle);
}

TEST(StationaryMoments, SeedReproducesEveryField) {
  const auto m = test::harmonic_chain(3, 1.0, 2.0);
  MomentOptions one, many;
  many.threads = 4;
  const auto a = stationary_moment_test(m, 5.0, 4000, 0.01, 9, one);
  const auto b = stationary_moment_test(m, 5.0, 4000, 0.01, 9, many);
  EXPECT_EQ(a.moments, b.moments);
  EXPECT_EQ(a.moment_se, b.moment_se);
  EXPECT_EQ(a.balance.mean, b.balance.mean);
}

TEST(GibbsInvariance, QuadraticChainIsInvariant) {
  const auto m = test::harmonic_chain(3, 1.0, 1.0);
  std::vector<Observable> obs;
  for (const char* name : {"H", "p2:1", "q2:2"}) obs.push_back(parse_observable(m, name));
  const auto rep = gibbs_invariance_test(m, obs, 4000, 5.0, 21);
  EXPECT_EQ(rep.method, "exact_gaussian");
  ASSERT_EQ(rep.observables.size(), 3u);
  EXPECT_LE(rep.max_abs_z, 3.0);
}

TEST(GibbsInvariance, SoftPowerMassByRejection) {
  const auto m = soft_pinned_mass();
  const auto rep = gibbs_invariance_test(m, {parse_observable(m, "p2:v0")}, 4000, 5.0, 22);
  EXPECT_EQ(rep.method, "rejection");
  EXPECT_LE(rep.max_abs_z, 3.0);
  EXPECT_GT(rep.acceptance_rate, 0.01);
}

TEST(GibbsInvariance, WrongTemperatureDrifts) {
  const auto m = test::harmonic_chain(3, 1.0, 3.0);
  std::vector<Observable> obs{parse_observable(m, "H")};
  EXPECT_THROW(gibbs_invariance_test(m, obs, 100, 1.0, 1), ArgumentError);
  GibbsTestOptions opt;
  opt.sample_temperature = 1.0;
  const auto rep = gibbs_invariance_test(m, obs, 2000, 10.0, 23, opt);
  EXPECT_GT(std::abs(rep.observables[0].z), 3.0);
}

TEST(GibbsInvariance, ThreadCountDoesNotChangeResult) {
  const auto m = test::harmonic_chain(3, 1.0, 1.0);
  std::vector<Observable> obs{parse_observable(m, "H")};
  GibbsTestOptions one, many;
  many.threads = 3;
  const auto a = gibbs_invariance_test(m, obs, 500, 1.0, 4, one);
  const auto b = gibbs_invariance_test(m, obs, 500, 1.0, 4, many);
  EXPECT_EQ(a.observables[0].difference, b.observables[0].difference);
  EXPECT_EQ(a.observables[0].se, b.observables[0].se);
}
