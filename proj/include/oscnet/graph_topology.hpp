#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oscnet {

using VertexId = std::uint32_t;
using VertexSet = std::vector<VertexId>;  // sorted, unique

/// An undirected spring between two masses. The stored orientation (a, b)
/// fixes the sign of the displacement q_b - q_a fed to the edge potential.
struct Edge {
  VertexId a = 0;
  VertexId b = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Loop-free, duplicate-free undirected graph with a distinguished bath set.
/// Immutable after construction.
class NetworkTopology {
 public:
  NetworkTopology(std::size_t vertex_count, std::vector<Edge> edges, VertexSet baths,
                  std::vector<std::string> names = {});

  std::size_t vertex_count() const { return vertex_count_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const VertexSet& baths() const { return baths_; }
  bool is_bath(VertexId v) const { return is_bath_[v]; }

  /// Neighbour list of v, sorted.
  std::span<const VertexId> neighbours(VertexId v) const;
  /// Incident edge indices of v, in edge order.
  std::span<const std::size_t> incident_edges(VertexId v) const { return incident_[v]; }

  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(VertexId v) const { return names_[v]; }
  std::optional<VertexId> find(std::string_view name) const;

  /// Same graph, different bath set.
  NetworkTopology with_baths(VertexSet baths) const;

 private:
  std::size_t vertex_count_;
  std::vector<Edge> edges_;
  VertexSet baths_;
  std::vector<std::string> names_;
  std::vector<bool> is_bath_;
  std::vector<std::vector<VertexId>> adjacency_;
  std::vector<std::vector<std::size_t>> incident_;
};

inline constexpr int kUncontrolled = -1;

struct ControlReport {
  bool controlled = false;
  bool connected = false;
  /// depth[v] = k when v is in T^k B but not T^{k-1} B (baths have depth 0),
  /// kUncontrolled when v is never reached.
  std::vector<int> depth;

  int max_depth() const;
};

/// One application of the nicely-connected growth operator T to `set`.
VertexSet nicely_connected_step(const NetworkTopology& topology, const VertexSet& set);

/// Iterates T from the bath set to its fixpoint.
ControlReport controls(const NetworkTopology& topology);

/// Iterates T from an arbitrary starting set; returns |T^k B| for k = 0 .. fixpoint.
std::vector<std::size_t> growth_profile(const NetworkTopology& topology, const VertexSet& start);

bool is_connected(const NetworkTopology& topology);

// Figure transcriptions. See src/fixtures.cpp for the adjacency tables.
std::vector<std::string> fixture_names();
std::string fixture_description(std::string_view name);
NetworkTopology builtin_fixture(std::string_view name);

}  // namespace oscnet
