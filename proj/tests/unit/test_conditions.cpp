#include <gtest/gtest.h>

#include "oscnet/conditions.hpp"
#include "oscnet/errors.hpp"
#include "test_models.hpp"

using namespace oscnet;

TEST(Conditions, HarmonicChainPassesEverything) {
  const auto model = test::harmonic_chain(5, 1.0, 2.0);
  const auto rep = check_conditions(model);
  EXPECT_TRUE(rep.c1);
  EXPECT_TRUE(rep.c2);
  EXPECT_TRUE(rep.c3);
  EXPECT_EQ(rep.c4, Verdict::True);
  EXPECT_TRUE(rep.c5);
  EXPECT_TRUE(rep.ca);
  EXPECT_TRUE(rep.all_hold());
  EXPECT_EQ(rep.control.max_depth(), 2);
}

TEST(Conditions, StifferPinningThanInteractionFailsC5) {
  const std::size_t N = 5;
  std::vector<std::optional<PotentialSpec>> pin(N, PotentialSpec::isotropic_quadratic(1, 1.0));
  pin[2] = PotentialSpec::soft_power(1, 4.0);
  const Model model(test::chain_topology(N, {0, 4}), 1, pin,
                    std::vector<PotentialSpec>(N - 1, PotentialSpec::isotropic_quadratic(1, 1.0)),
                    {{1.0, 1.0}, {1.0, 1.0}});
  const auto rep = check_conditions(model);
  EXPECT_FALSE(rep.c5);
  EXPECT_FALSE(rep.c5_note.empty());
  EXPECT_FALSE(rep.all_hold());
}

TEST(Conditions, CommonDegreesSatisfyingC5) {
  const auto model = test::chain_model(4, PotentialSpec::soft_power(1, 2.0), PotentialSpec::soft_power(1, 4.0), 1.0, 1.0);
  const auto rep = check_conditions(model);
  EXPECT_TRUE(rep.c5);
  ASSERT_TRUE(rep.interaction_degree);
  ASSERT_TRUE(rep.pinning_degree);
  EXPECT_EQ(*rep.interaction_degree, 4.0);
  EXPECT_EQ(*rep.pinning_degree, 2.0);
  EXPECT_TRUE(rep.all_hold());
}

TEST(Conditions, MixedInteractionDegreesFailWithMessage) {
  const std::size_t N = 3;
  const Model model(test::chain_topology(N, {0, 2}), 1,
                    std::vector<std::optional<PotentialSpec>>(N, PotentialSpec::soft_power(1, 2.0)),
                    {PotentialSpec::soft_power(1, 4.0), PotentialSpec::soft_power(1, 2.0)}, {{1.0, 1.0}, {1.0, 1.0}});
  const auto rep = check_conditions(model);
  EXPECT_FALSE(rep.c5);
  EXPECT_FALSE(rep.interaction_degree);
  EXPECT_NE(rep.c5_note.find("interaction"), std::string::npos);
}

TEST(Conditions, UncontrolledNetworkFailsC1) {
  const auto model = test::harmonic_chain(5, 1.0, 1.0);
  const Model star(NetworkTopology(4, {{0, 1}, {0, 2}, {0, 3}}, {0}), 1,
                   std::vector<std::optional<PotentialSpec>>(4, PotentialSpec::isotropic_quadratic(1, 1.0)),
                   std::vector<PotentialSpec>(3, PotentialSpec::isotropic_quadratic(1, 1.0)), {{1.0, 1.0}});
  EXPECT_TRUE(check_conditions(model).c1);
  EXPECT_FALSE(check_conditions(star).c1);
}

TEST(Conditions, CounterexampleHasUndecidedC4) {
  const auto fx = c4_counterexample();
  const auto rep = check_conditions(fx.model);
  EXPECT_NE(rep.c4, Verdict::True);
  EXPECT_FALSE(rep.all_hold());
}

TEST(Conditions, DegenerateInteractionFailsC2) {
  const std::size_t N = 3;
  const auto quartic_x = PotentialSpec::local_piece(2, {{1.0, {4, 0}}});
  const Model model(test::chain_topology(N, {0, 2}), 2,
                    std::vector<std::optional<PotentialSpec>>(N, PotentialSpec::soft_power(2, 2.0)),
                    std::vector<PotentialSpec>(N - 1, quartic_x), {{1.0, 1.0}, {1.0, 1.0}});
  const auto rep = check_conditions(model);
  EXPECT_FALSE(rep.c2);
  for (const auto& e : rep.c2_edges) EXPECT_FALSE(e.nondegenerate);
}

TEST(Conditions, DefaultOrderFollowsDegree) {
  EXPECT_EQ(default_nondegeneracy_order(PotentialSpec::isotropic_quadratic(2, 1.0)), 1);
  EXPECT_EQ(default_nondegeneracy_order(PotentialSpec::even_power(2, 4)), 3);
  EXPECT_EQ(default_nondegeneracy_order(PotentialSpec::even_power(2, 10)), kMaxNondegeneracyOrder);
}
