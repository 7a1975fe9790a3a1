#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oscnet/graph_topology.hpp"
#include "oscnet/potentials.hpp"

namespace oscnet {

struct BathParams {
  double gamma = 1.0;
  double temperature = 1.0;
};

/// Complete definition of the driven oscillator network: graph, spatial
/// dimension, pinning U_v per vertex (absent means U_v = 0), interaction V_e
/// per edge (indexed like topology().edges()) and (gamma, T) per bath vertex.
/// Non-bath vertices carry gamma = T = 0. Unit masses throughout.
class Model {
 public:
  Model(NetworkTopology topology, std::size_t dim, std::vector<std::optional<PotentialSpec>> pinning,
        std::vector<PotentialSpec> interaction, std::vector<BathParams> baths);

  const NetworkTopology& topology() const { return topology_; }
  std::size_t dimension() const { return dim_; }
  std::size_t vertex_count() const { return topology_.vertex_count(); }
  /// Length of the flattened p or q array.
  std::size_t coordinate_count() const { return vertex_count() * dim_; }

  const PotentialSpec* pinning(VertexId v) const { return pinning_[v] ? &*pinning_[v] : nullptr; }
  const PotentialSpec& interaction(std::size_t edge) const { return interaction_[edge]; }
  const std::vector<std::optional<PotentialSpec>>& pinnings() const { return pinning_; }
  const std::vector<PotentialSpec>& interactions() const { return interaction_; }

  double gamma(VertexId v) const { return gamma_[v]; }
  double temperature(VertexId v) const { return temperature_[v]; }
  /// Bath parameters in topology().baths() order.
  std::vector<BathParams> bath_params() const;
  double t_max() const;
  /// n * sum_b gamma_b T_b: mean rate of energy injected by the baths.
  double injection_rate() const;
  bool equal_temperatures() const;
  bool all_quadratic() const;

  Model with_bath_params(std::vector<BathParams> baths) const;
  Model without_pinning() const;

 private:
  NetworkTopology topology_;
  std::size_t dim_;
  std::vector<std::optional<PotentialSpec>> pinning_;
  std::vector<PotentialSpec> interaction_;
  std::vector<double> gamma_;
  std::vector<double> temperature_;
};

/// Phase point z = (p, q); vertex-major flattened |G| x n arrays.
struct State {
  std::size_t vertices = 0;
  std::size_t dim = 0;
  std::vector<double> p;
  std::vector<double> q;

  State() = default;
  State(std::size_t vertices, std::size_t dim)
      : vertices(vertices), dim(dim), p(vertices * dim, 0.0), q(vertices * dim, 0.0) {}
  static State zeros_like(const Model& model) { return State(model.vertex_count(), model.dimension()); }

  std::span<double> p_of(std::size_t v) { return {p.data() + v * dim, dim}; }
  std::span<double> q_of(std::size_t v) { return {q.data() + v * dim, dim}; }
  std::span<const double> p_of(std::size_t v) const { return {p.data() + v * dim, dim}; }
  std::span<const double> q_of(std::size_t v) const { return {q.data() + v * dim, dim}; }

  bool finite() const;
  friend bool operator==(const State&, const State&) = default;
};

/// Throws ArgumentError if the state shape does not match the model.
void check_state(const Model& model, const State& state);

/// Box constraint on positions; the local-piece potentials of the C4
/// counterexample are only meaningful inside it.
struct ValidityRegion {
  std::vector<double> q_lower;
  std::vector<double> q_upper;
  bool contains(const State& state) const;
};

/// Two oscillators in R^3 whose limiting interaction force is not locally
/// injective: vertex "1" carries the bath, vertex "2" slides along x while
/// oscillator 1 stays at rest.
struct CounterexampleFixture {
  Model model;
  State initial;
  ValidityRegion region;
  std::string description;
};

CounterexampleFixture c4_counterexample();

}  // namespace oscnet
