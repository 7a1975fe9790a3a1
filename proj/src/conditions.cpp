#include "oscnet/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace oscnet {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::True: return "true";
    case Verdict::False: return "false";
    case Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

int default_nondegeneracy_order(const PotentialSpec& spec) {
  const int ell = static_cast<int>(std::ceil(spec.degree())) - 1;
  return std::clamp(ell, 1, kMaxNondegeneracyOrder);
}

namespace {

Verdict c4_flag(const PotentialSpec& spec) {
  switch (spec.family()) {
    // Strictly convex limiting forms have injective gradients.
    case Family::SoftPower:
    case Family::EvenPower:
    case Family::Quadratic: return Verdict::True;
    case Family::LocalPiece: return Verdict::Unknown;
  }
  return Verdict::Unknown;
}

std::optional<double> common_degree(const std::vector<double>& degrees) {
  if (degrees.empty()) return std::nullopt;
  for (double d : degrees) {
    if (d != degrees.front()) return std::nullopt;
  }
  return degrees.front();
}

}  // namespace

ConditionReport check_conditions(const Model& model, const ConditionOptions& options) {
  ConditionReport report;
  const auto& topology = model.topology();
  const auto& edges = topology.edges();

  report.control = controls(topology);
  report.c1 = report.control.connected && report.control.controlled;

  const auto samples = default_nondegeneracy_samples(model.dimension());
  report.c2_tolerance = options.rank_tolerance;
  report.c2_samples = samples.size();
  report.c2 = true;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& spec = model.interaction(e);
    const int ell = options.ell.value_or(default_nondegeneracy_order(spec));
    const auto result = check_nondegenerate(spec, samples, ell, options.rank_tolerance);
    report.c2_edges.push_back({e, result.overall, ell, result.ranks});
    report.c2 = report.c2 && result.overall;
  }

  report.c3 = true;
  std::vector<double> pin_degrees, int_degrees;
  for (std::size_t v = 0; v < model.vertex_count(); ++v) {
    const PotentialSpec* u = model.pinning(static_cast<VertexId>(v));
    if (!u) {
      report.c3 = false;
      report.c3_notes.push_back("vertex " + topology.name(v) + " has no pinning potential");
      continue;
    }
    pin_degrees.push_back(u->degree());
    const auto c = check_coercive_limit(*u, options.sphere_samples);
    report.c3_potentials.push_back({"pinning:" + topology.name(v), u->degree(), c.min_value, c.coercive});
    report.c3 = report.c3 && c.coercive;
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& spec = model.interaction(e);
    int_degrees.push_back(spec.degree());
    const auto c = check_coercive_limit(spec, options.sphere_samples);
    report.c3_potentials.push_back({"interaction:" + topology.name(edges[e].a) + "-" + topology.name(edges[e].b),
                                    spec.degree(), c.min_value, c.coercive});
    report.c3 = report.c3 && c.coercive;
  }
  for (const auto& p : report.c3_potentials) {
    if (p.degree < 2.0) {
      report.c3 = false;
      report.c3_notes.push_back(p.label + " has degree below 2");
    }
    if (!p.coercive) report.c3_notes.push_back(p.label + " limiting form is not coercive");
  }

  report.c4 = Verdict::True;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Verdict v = c4_flag(model.interaction(e));
    report.c4_edges.push_back(v);
    if (v == Verdict::False) {
      report.c4 = Verdict::False;
    } else if (v == Verdict::Unknown && report.c4 == Verdict::True) {
      report.c4 = Verdict::Unknown;
    }
  }

  report.interaction_degree = common_degree(int_degrees);
  report.pinning_degree = common_degree(pin_degrees);
  if (!int_degrees.empty() && !report.interaction_degree) {
    report.c5 = false;
    report.c5_note = "interaction potentials have mixed degrees; a common l_i is required";
  } else if (!pin_degrees.empty() && !report.pinning_degree) {
    report.c5 = false;
    report.c5_note = "pinning potentials have mixed degrees; a common l_p is required";
  } else if (report.interaction_degree && report.pinning_degree) {
    report.c5 = *report.interaction_degree >= *report.pinning_degree;
    std::ostringstream os;
    os << "l_i = " << *report.interaction_degree << (report.c5 ? " >= " : " < ") << "l_p = "
       << *report.pinning_degree;
    report.c5_note = os.str();
  } else {
    report.c5 = true;
    report.c5_note = int_degrees.empty() ? "no interaction potentials" : "no pinning potentials";
  }

  report.ca = report.c3;
  return report;
}

}  // namespace oscnet
