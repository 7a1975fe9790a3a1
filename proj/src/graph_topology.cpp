#include "oscnet/graph_topology.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "oscnet/errors.hpp"

namespace oscnet {

namespace {

void normalize(VertexSet& set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
}

void check_members(const NetworkTopology& topology, const VertexSet& set) {
  for (VertexId v : set) {
    if (v >= topology.vertex_count()) {
      throw ArgumentError("vertex id " + std::to_string(v) + " out of range (topology has " +
                          std::to_string(topology.vertex_count()) + " vertices)");
    }
  }
}

}  // namespace

NetworkTopology::NetworkTopology(std::size_t vertex_count, std::vector<Edge> edges, VertexSet baths,
                                 std::vector<std::string> names)
    : vertex_count_(vertex_count), edges_(std::move(edges)), baths_(std::move(baths)),
      names_(std::move(names)) {
  if (vertex_count_ == 0) throw ArgumentError("topology must have at least one vertex");
  if (names_.empty()) {
    names_.reserve(vertex_count_);
    for (std::size_t v = 0; v < vertex_count_; ++v) names_.push_back("v" + std::to_string(v));
  }
  if (names_.size() != vertex_count_) throw ArgumentError("vertex name count does not match vertex count");
  {
    std::set<std::string> seen(names_.begin(), names_.end());
    if (seen.size() != names_.size()) throw ArgumentError("vertex names must be unique");
  }

  adjacency_.resize(vertex_count_);
  incident_.resize(vertex_count_);
  std::set<std::pair<VertexId, VertexId>> seen;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.a >= vertex_count_ || e.b >= vertex_count_) {
      throw ArgumentError("edge " + std::to_string(i) + " references a vertex out of range");
    }
    if (e.a == e.b) throw ArgumentError("edge " + std::to_string(i) + " is a loop on vertex " + names_[e.a]);
    auto key = std::minmax(e.a, e.b);
    if (!seen.insert(key).second) {
      throw ArgumentError("duplicate edge {" + names_[e.a] + ", " + names_[e.b] + "}");
    }
    adjacency_[e.a].push_back(e.b);
    adjacency_[e.b].push_back(e.a);
    incident_[e.a].push_back(i);
    incident_[e.b].push_back(i);
  }
  for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());

  normalize(baths_);
  check_members(*this, baths_);
  is_bath_.assign(vertex_count_, false);
  for (VertexId b : baths_) is_bath_[b] = true;
}

std::span<const VertexId> NetworkTopology::neighbours(VertexId v) const { return adjacency_[v]; }

std::optional<VertexId> NetworkTopology::find(std::string_view name) const {
  for (std::size_t v = 0; v < names_.size(); ++v) {
    if (names_[v] == name) return static_cast<VertexId>(v);
  }
  return std::nullopt;
}

NetworkTopology NetworkTopology::with_baths(VertexSet baths) const {
  return NetworkTopology(vertex_count_, edges_, std::move(baths), names_);
}

int ControlReport::max_depth() const {
  int m = kUncontrolled;
  for (int d : depth) m = std::max(m, d);
  return m;
}

VertexSet nicely_connected_step(const NetworkTopology& topology, const VertexSet& set) {
  VertexSet current = set;
  normalize(current);
  check_members(topology, current);

  std::vector<bool> inside(topology.vertex_count(), false);
  for (VertexId v : current) inside[v] = true;

  VertexSet result = current;
  for (VertexId b : current) {
    // b contributes its neighbour only if that neighbour is b's unique link to the outside.
    std::optional<VertexId> outside;
    int count = 0;
    for (VertexId w : topology.neighbours(b)) {
      if (!inside[w]) {
        outside = w;
        if (++count > 1) break;
      }
    }
    if (count == 1) result.push_back(*outside);
  }
  normalize(result);
  return result;
}

std::vector<std::size_t> growth_profile(const NetworkTopology& topology, const VertexSet& start) {
  VertexSet current = start;
  normalize(current);
  std::vector<std::size_t> sizes{current.size()};
  while (true) {
    VertexSet next = nicely_connected_step(topology, current);
    if (next.size() == current.size()) break;
    sizes.push_back(next.size());
    current = std::move(next);
  }
  return sizes;
}

ControlReport controls(const NetworkTopology& topology) {
  ControlReport report;
  report.connected = is_connected(topology);
  report.depth.assign(topology.vertex_count(), kUncontrolled);

  VertexSet current = topology.baths();
  for (VertexId b : current) report.depth[b] = 0;
  for (int k = 1; !current.empty(); ++k) {
    VertexSet next = nicely_connected_step(topology, current);
    if (next.size() == current.size()) break;
    for (VertexId v : next) {
      if (report.depth[v] == kUncontrolled) report.depth[v] = k;
    }
    current = std::move(next);
  }
  report.controlled = current.size() == topology.vertex_count();
  return report;
}

bool is_connected(const NetworkTopology& topology) {
  std::vector<bool> seen(topology.vertex_count(), false);
  std::vector<VertexId> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    for (VertexId w : topology.neighbours(v)) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == topology.vertex_count();
}

}  // namespace oscnet
