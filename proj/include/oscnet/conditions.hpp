#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oscnet/graph_topology.hpp"
#include "oscnet/model.hpp"
#include "oscnet/potentials.hpp"

namespace oscnet {

enum class Verdict { True, False, Unknown };
std::string to_string(Verdict v);

struct EdgeNondegeneracy {
  std::size_t edge = 0;
  bool nondegenerate = false;
  int ell = 0;
  std::vector<int> ranks;
};

struct PotentialCoercivity {
  std::string label;  // "pinning:<vertex>" or "interaction:<a>-<b>"
  double degree = 0.0;
  double min_limit = 0.0;  // min of the limiting form on the unit sphere
  bool coercive = false;
};

struct ConditionReport {
  bool c1 = false;
  ControlReport control;

  bool c2 = false;
  std::vector<EdgeNondegeneracy> c2_edges;
  double c2_tolerance = 0.0;
  std::size_t c2_samples = 0;

  bool c3 = false;
  std::vector<PotentialCoercivity> c3_potentials;
  std::vector<std::string> c3_notes;

  Verdict c4 = Verdict::Unknown;
  std::vector<Verdict> c4_edges;

  bool c5 = false;
  std::optional<double> interaction_degree;  // l_i when common
  std::optional<double> pinning_degree;      // l_p when common
  std::string c5_note;

  bool ca = false;

  /// C1..C5 and CA all hold (C4 must be True, not Unknown).
  bool all_hold() const { return c1 && c2 && c3 && c4 == Verdict::True && c5 && ca; }
};

struct ConditionOptions {
  std::optional<int> ell;  // default: clamp(ceil(degree) - 1, 1, 6) per edge
  double rank_tolerance = kDefaultRankTolerance;
  int sphere_samples = 400;
};

/// Default derivative order for the C2 rank test of a potential.
int default_nondegeneracy_order(const PotentialSpec& spec);

ConditionReport check_conditions(const Model& model, const ConditionOptions& options = {});

}  // namespace oscnet
