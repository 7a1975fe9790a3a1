#pragma once

// Depth labels read off the figures by hand: 0 marks a bath (or the starting
// set), -1 a vertex that is never reached. Kept apart from the fixture tables
// so the tests do not read their expectations from the code under test.

#include <map>
#include <string>
#include <vector>

namespace oscnet::test {

struct ExpectedLabels {
  std::string fixture;
  bool controlled;
  std::map<std::string, int> depth;
};

inline std::vector<ExpectedLabels> expected_fixture_labels() {
  auto numbered = [](std::vector<int> labels) {
    std::map<std::string, int> out;
    for (std::size_t i = 0; i < labels.size(); ++i) out[std::to_string(i + 1)] = labels[i];
    return out;
  };
  return {
      {"fig1", false, {{"a", 0}, {"b", 0}, {"c", 0}, {"d", 1}, {"e", 1}, {"i", 2}, {"f", -1}, {"g", -1}, {"h", -1}}},
      {"fig2_chain11", true, numbered({0, 1, 2, 3, 4, 5, 4, 3, 2, 1, 0})},
      {"fig2_ladder3x5", true, numbered({0, 1, 2, 1, 0, 0, 1, 2, 1, 0, 0, 1, 2, 1, 0})},
      {"fig2_braced3x5", true, numbered({0, 2, 4, 5, 6, 0, 1, 3, 5, 6, 0, 2, 4, 5, 6})},
      {"fig2_triangular", true, numbered({0, 0, 0, 1, 2, 3, 6, 5, 4, 7, 8, 9, 12, 11, 10})},
      {"fig2_hexcolumns", true,
       {{"a1", 0}, {"a2", 1}, {"a3", 1}, {"a4", 0}, {"a5", 0}, {"a6", 1},
        {"b1", 2}, {"b2", 3}, {"b3", 3}, {"b4", 2}, {"b5", 2}, {"b6", 3},
        {"c1", 4}, {"c2", 5}, {"c3", 5}, {"c4", 4}, {"c5", 4}, {"c6", 5},
        {"d1", 6}, {"d2", 7}, {"d3", 7}, {"d4", 6}, {"d5", 6}, {"d6", 7}}},
      {"fig2_square4", false, numbered({0, -1, 0, -1})},
      {"fig2_braced2x5", false, numbered({0, -1, -1, 1, 0, 0, -1, -1, 1, 0})},
  };
}

}  // namespace oscnet::test
