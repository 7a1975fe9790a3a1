#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixture_labels.hpp"
#include "oscnet/errors.hpp"
#include "oscnet/graph_topology.hpp"
#include "test_models.hpp"

using namespace oscnet;

namespace {

VertexSet ids(const NetworkTopology& t, std::initializer_list<const char*> names) {
  VertexSet out;
  for (const char* n : names) out.push_back(*t.find(n));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(NicelyConnectedStep, Fig1GrowsStartingSetByDAndE) {
  const auto t = builtin_fixture("fig1");
  EXPECT_EQ(t.vertex_count(), 9u);
  EXPECT_EQ(nicely_connected_step(t, ids(t, {"a", "b", "c"})), ids(t, {"a", "b", "c", "d", "e"}));
}

TEST(NicelyConnectedStep, FullSetIsFixpoint) {
  for (const auto& name : fixture_names()) {
    const auto t = builtin_fixture(name);
    VertexSet all(t.vertex_count());
    for (VertexId v = 0; v < all.size(); ++v) all[v] = v;
    EXPECT_EQ(nicely_connected_step(t, all), all) << name;
  }
}

TEST(NicelyConnectedStep, PathGrowsOneVertexPerStep) {
  const auto t = test::chain_topology(3, {0});
  const auto s1 = nicely_connected_step(t, {0});
  EXPECT_EQ(s1, (VertexSet{0, 1}));
  EXPECT_EQ(nicely_connected_step(t, s1), (VertexSet{0, 1, 2}));
}

TEST(NicelyConnectedStep, RejectsInvalidVertex) {
  const auto t = test::chain_topology(3, {0});
  EXPECT_THROW(nicely_connected_step(t, {7}), ArgumentError);
}

TEST(Controls, FixtureLabelsMatchFigures) {
  for (const auto& expected : test::expected_fixture_labels()) {
    auto t = builtin_fixture(expected.fixture);
    if (expected.fixture == "fig1") t = t.with_baths(ids(t, {"a", "b", "c"}));
    const auto rep = controls(t);
    EXPECT_EQ(rep.controlled, expected.controlled) << expected.fixture;
    ASSERT_EQ(expected.depth.size(), t.vertex_count()) << expected.fixture;
    for (const auto& [name, depth] : expected.depth) {
      const auto v = t.find(name);
      ASSERT_TRUE(v) << expected.fixture << " has no vertex " << name;
      EXPECT_EQ(rep.depth[*v], depth) << expected.fixture << " vertex " << name;
    }
  }
}

TEST(Controls, Chain11HasMaxDepthFive) {
  const auto rep = controls(builtin_fixture("fig2_chain11"));
  EXPECT_TRUE(rep.controlled);
  EXPECT_TRUE(rep.connected);
  EXPECT_EQ(rep.max_depth(), 5);
}

TEST(Controls, EmptyBathSetDoesNotControl) {
  const auto rep = controls(test::chain_topology(3, {}));
  EXPECT_FALSE(rep.controlled);
  for (int d : rep.depth) EXPECT_EQ(d, kUncontrolled);
}

TEST(Controls, ConnectivityIsReportedSeparately) {
  const NetworkTopology t(4, {{0, 1}, {2, 3}}, {0, 2});
  const auto rep = controls(t);
  EXPECT_FALSE(rep.connected);
  EXPECT_TRUE(rep.controlled);  // each component is a controlled path
}

TEST(Topology, RejectsMalformedGraphs) {
  EXPECT_THROW(NetworkTopology(0, {}, {}), ArgumentError);
  EXPECT_THROW(NetworkTopology(2, {{0, 0}}, {0}), ArgumentError);
  EXPECT_THROW(NetworkTopology(2, {{0, 1}, {1, 0}}, {0}), ArgumentError);
  EXPECT_THROW(NetworkTopology(2, {{0, 2}}, {0}), ArgumentError);
  EXPECT_THROW(NetworkTopology(2, {{0, 1}}, {5}), ArgumentError);
  EXPECT_THROW(NetworkTopology(2, {{0, 1}}, {0}, {"x", "x"}), ArgumentError);
}

TEST(Topology, UnknownFixtureListsValidNames) {
  try {
    builtin_fixture("nope");
    FAIL() << "expected ArgumentError";
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("fig2_chain11"), std::string::npos);
  }
}

TEST(Topology, DefaultNamesAndLookup) {
  const NetworkTopology t(3, {{0, 1}}, {0});
  EXPECT_EQ(t.name(2), "v2");
  EXPECT_EQ(t.find("v1"), VertexId{1});
  EXPECT_FALSE(t.find("w"));
}

// Properties over random graphs with at most 12 vertices.

TEST(ControlProperties, GrowthIncrementBoundedByBathCount) {
  std::mt19937_64 gen(20261016);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto t = test::erdos_renyi_topology(gen, 12);
    const auto profile = growth_profile(t, t.baths());
    for (std::size_t k = 0; k + 1 < profile.size(); ++k) {
      ASSERT_LE(profile[k + 1], profile[k] + t.baths().size()) << "trial " << trial;
    }
  }
}

TEST(ControlProperties, DepthInvariants) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 500; ++trial) {
    const auto t = test::random_topology(gen, 12);
    const auto rep = controls(t);
    for (VertexId b : t.baths()) EXPECT_EQ(rep.depth[b], 0);
    const bool all_reached = std::none_of(rep.depth.begin(), rep.depth.end(), [](int d) { return d == kUncontrolled; });
    EXPECT_EQ(rep.controlled, all_reached);
    if (rep.controlled) {
      EXPECT_LE(rep.max_depth(), static_cast<int>(t.vertex_count() - t.baths().size()));
    }
    EXPECT_EQ(rep.connected, is_connected(t));
  }
}

TEST(ControlProperties, EnlargingTheBathSetPreservesControl) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto t = test::random_topology(gen, 12);
    if (!controls(t).controlled) continue;
    VertexSet more = t.baths();
    more.push_back(static_cast<VertexId>(gen() % t.vertex_count()));
    std::sort(more.begin(), more.end());
    more.erase(std::unique(more.begin(), more.end()), more.end());
    EXPECT_TRUE(controls(t.with_baths(more)).controlled);
  }
}

TEST(ControlProperties, Deterministic) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 100; ++trial) {
    const auto t = test::random_topology(gen, 12);
    const auto a = controls(t);
    const auto b = controls(t);
    EXPECT_EQ(a.depth, b.depth);
    EXPECT_EQ(a.controlled, b.controlled);
  }
}
