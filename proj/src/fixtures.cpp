// Adjacency tables for the example networks. Each table lists vertex names,
// edges as name pairs and the bath vertices. Vertex numbering inside each
// drawing follows the node order of the original figure source; the expected
// depth labels are frozen in tests/unit/test_graph_topology.cpp.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "oscnet/errors.hpp"
#include "oscnet/graph_topology.hpp"

namespace oscnet {

namespace {

struct FixtureTable {
  const char* name;
  const char* description;
  std::vector<std::string> vertices;
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::string> baths;
};

std::vector<std::string> numbered(int first, int last) {
  std::vector<std::string> out;
  for (int i = first; i <= last; ++i) out.push_back(std::to_string(i));
  return out;
}

std::vector<std::pair<std::string, std::string>> pairs(
    std::initializer_list<std::pair<int, int>> list) {
  std::vector<std::pair<std::string, std::string>> out;
  for (auto [a, b] : list) out.emplace_back(std::to_string(a), std::to_string(b));
  return out;
}

const std::vector<FixtureTable>& tables() {
  static const std::vector<FixtureTable> all = [] {
    std::vector<FixtureTable> t;

    // Growth-operator illustration. a, b, c form the starting set; f, g, h
    // hang off b (g-h also linked); d and e are closed into a square by i.
    t.push_back({"fig1",
                 "nine-vertex growth example, starting set {a,b,c}",
                 {"a", "b", "c", "d", "e", "f", "g", "h", "i"},
                 {{"a", "b"}, {"a", "c"}, {"b", "f"}, {"b", "g"}, {"b", "h"}, {"g", "h"},
                  {"c", "e"}, {"a", "d"}, {"i", "e"}, {"i", "d"}},
                 {"a", "b", "c"}});

    t.push_back({"fig2_chain11",
                 "11-mass chain, baths at both ends",
                 numbered(1, 11),
                 pairs({{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {8, 9}, {9, 10}, {10, 11}}),
                 {"1", "11"}});

    // Rows 1-5, 6-10, 11-15; both ends of every row are baths.
    t.push_back({"fig2_ladder3x5",
                 "3x5 square lattice, baths on both short sides",
                 numbered(1, 15),
                 pairs({{1, 2}, {2, 3}, {4, 3}, {5, 4}, {6, 7}, {7, 8}, {9, 8}, {10, 9},
                        {11, 12}, {12, 13}, {14, 13}, {15, 14},
                        {1, 6}, {2, 7}, {3, 8}, {4, 9}, {5, 10},
                        {6, 11}, {7, 12}, {8, 13}, {9, 14}, {10, 15}}),
                 {"1", "5", "6", "10", "11", "15"}});

    // Same 3x5 lattice with four diagonal braces near the bath column.
    t.push_back({"fig2_braced3x5",
                 "3x5 lattice with diagonal braces, baths on the left column",
                 numbered(1, 15),
                 pairs({{1, 2}, {2, 3}, {3, 4}, {4, 5}, {6, 7}, {7, 8}, {8, 9}, {9, 10},
                        {11, 12}, {12, 13}, {13, 14}, {14, 15},
                        {11, 7}, {12, 8},
                        {1, 6}, {2, 7}, {3, 8}, {4, 9}, {5, 10}, {1, 7}, {2, 8},
                        {6, 11}, {7, 12}, {8, 13}, {9, 14}, {10, 15}}),
                 {"1", "6", "11"}});

    // Triangular strip: 1-3 bath column, then columns 4-6, 7-9, 10-12, 13-15.
    t.push_back({"fig2_triangular",
                 "triangular lattice strip, baths on the left column",
                 numbered(1, 15),
                 pairs({{1, 2}, {2, 3}, {1, 4}, {2, 4}, {2, 5}, {3, 5}, {3, 6}, {4, 5}, {5, 6},
                        {4, 7}, {5, 8}, {6, 9}, {5, 9}, {4, 8}, {7, 8}, {8, 9},
                        {7, 10}, {8, 10}, {8, 11}, {9, 11}, {9, 12}, {10, 11}, {11, 12},
                        {10, 13}, {11, 14}, {12, 15}, {11, 15}, {10, 14}, {14, 13}, {15, 14}}),
                 {"1", "2", "3"}});

    // Honeycomb-like strip: columns a, b, c, d of six vertices each.
    t.push_back({"fig2_hexcolumns",
                 "hexagonal strip of four columns, three baths on the first column",
                 {"a1", "a2", "a3", "a4", "a5", "a6", "b1", "b2", "b3", "b4", "b5", "b6",
                  "c1", "c2", "c3", "c4", "c5", "c6", "d1", "d2", "d3", "d4", "d5", "d6"},
                 {{"a1", "a2"}, {"a2", "a3"}, {"a2", "b1"}, {"a3", "b4"}, {"a4", "a3"}, {"a4", "a5"},
                  {"a5", "a6"}, {"a6", "b5"},
                  {"b1", "b2"}, {"b2", "b3"}, {"b2", "c1"}, {"b3", "c4"}, {"b4", "b3"}, {"b4", "b5"},
                  {"b5", "b6"}, {"b6", "c5"},
                  {"c1", "c2"}, {"c2", "c3"}, {"c2", "d1"}, {"c3", "d4"}, {"c4", "c3"}, {"c4", "c5"},
                  {"c5", "c6"}, {"c6", "d5"},
                  {"d1", "d2"}, {"d2", "d3"}, {"d4", "d3"}, {"d4", "d5"}, {"d5", "d6"}},
                 {"a1", "a4", "a5"}});

    // Four-cycle with baths on opposite corners 1 and 3.
    t.push_back({"fig2_square4",
                 "4-cycle with two opposite baths (not controlled)",
                 numbered(1, 4),
                 pairs({{1, 2}, {2, 3}, {1, 4}, {4, 3}}),
                 {"1", "3"}});

    // Rows 1-5 and 6-10 with crossed braces; baths at the four corners.
    t.push_back({"fig2_braced2x5",
                 "2x5 lattice with crossed braces, baths at the corners (not controlled)",
                 numbered(1, 10),
                 pairs({{1, 2}, {2, 3}, {4, 3}, {5, 4}, {6, 7}, {7, 8}, {9, 8}, {10, 9},
                        {1, 6}, {2, 7}, {3, 8}, {4, 9}, {5, 10},
                        {1, 7}, {3, 9}, {2, 6}, {4, 8}}),
                 {"1", "5", "6", "10"}});
    return t;
  }();
  return all;
}

VertexId lookup(const FixtureTable& table, const std::string& name) {
  auto it = std::find(table.vertices.begin(), table.vertices.end(), name);
  return static_cast<VertexId>(it - table.vertices.begin());
}

}  // namespace

std::vector<std::string> fixture_names() {
  std::vector<std::string> out;
  for (const auto& t : tables()) out.emplace_back(t.name);
  return out;
}

std::string fixture_description(std::string_view name) {
  for (const auto& t : tables()) {
    if (t.name == name) return t.description;
  }
  return {};
}

NetworkTopology builtin_fixture(std::string_view name) {
  for (const auto& t : tables()) {
    if (t.name != name) continue;
    std::vector<Edge> edges;
    for (const auto& [a, b] : t.edges) edges.push_back({lookup(t, a), lookup(t, b)});
    VertexSet baths;
    for (const auto& b : t.baths) baths.push_back(lookup(t, b));
    return NetworkTopology(t.vertices.size(), std::move(edges), std::move(baths), t.vertices);
  }
  std::string valid;
  for (const auto& n : fixture_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ArgumentError("unknown fixture '" + std::string(name) + "'; valid fixtures: " + valid);
}

}  // namespace oscnet
