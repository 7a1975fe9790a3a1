#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oscnet/graph_topology.hpp"
#include "oscnet/model.hpp"

namespace oscnet::test {

/// Path 1 - 2 - ... - N (names "1".."N"), edges oriented left to right.
inline NetworkTopology chain_topology(std::size_t N, VertexSet baths) {
  std::vector<Edge> edges;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < N; ++i) names.push_back(std::to_string(i + 1));
  for (std::size_t i = 0; i + 1 < N; ++i) edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(i + 1)});
  return NetworkTopology(N, edges, std::move(baths), names);
}

/// Chain with baths on the first and last vertex at temperatures (T_left, T_right), gamma = 1.
inline Model chain_model(std::size_t N, const std::optional<PotentialSpec>& pin, const PotentialSpec& inter,
                         double T_left, double T_right, double gamma = 1.0) {
  return Model(chain_topology(N, {0, static_cast<VertexId>(N - 1)}), inter.dimension(),
               std::vector<std::optional<PotentialSpec>>(N, pin), std::vector<PotentialSpec>(N - 1, inter),
               {{gamma, T_left}, {gamma, T_right}});
}

inline Model harmonic_chain(std::size_t N, double T_left, double T_right, double k_pin = 1.0, double k_int = 1.0) {
  return chain_model(N, PotentialSpec::isotropic_quadratic(1, k_pin), PotentialSpec::isotropic_quadratic(1, k_int),
                     T_left, T_right);
}

/// Random loop-free simple graph on at most max_vertices vertices with a random
/// non-empty bath set.
inline NetworkTopology random_topology(std::mt19937_64& gen, std::size_t max_vertices) {
  std::uniform_int_distribution<std::size_t> count(1, max_vertices);
  const std::size_t n = count(gen);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double density = u(gen);
  std::vector<Edge> edges;
  for (VertexId a = 0; a < n; ++a) {
    for (VertexId b = a + 1; b < n; ++b) {
      if (u(gen) < density) edges.push_back({a, b});
    }
  }
  VertexSet baths;
  for (VertexId v = 0; v < n; ++v) {
    if (u(gen) < 0.3) baths.push_back(v);
  }
  if (baths.empty()) baths.push_back(static_cast<VertexId>(std::uniform_int_distribution<std::size_t>(0, n - 1)(gen)));
  return NetworkTopology(n, std::move(edges), std::move(baths));
}

/// Erdos-Renyi graph with edge probability drawn from {0.1, 0.3, 0.5} on at
/// most max_vertices vertices; the bath set is a uniform non-empty subset.
inline NetworkTopology erdos_renyi_topology(std::mt19937_64& gen, std::size_t max_vertices) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_vertices)(gen);
  const double probs[] = {0.1, 0.3, 0.5};
  const double p = probs[std::uniform_int_distribution<int>(0, 2)(gen)];
  std::bernoulli_distribution edge(p), coin(0.5);
  std::vector<Edge> edges;
  for (VertexId a = 0; a < n; ++a) {
    for (VertexId b = a + 1; b < n; ++b) {
      if (edge(gen)) edges.push_back({a, b});
    }
  }
  VertexSet baths;
  while (baths.empty()) {
    for (VertexId v = 0; v < n; ++v) {
      if (coin(gen)) baths.push_back(v);
    }
  }
  return NetworkTopology(n, std::move(edges), std::move(baths));
}

}  // namespace oscnet::test
