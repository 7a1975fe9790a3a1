#include "oscnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "oscnet/errors.hpp"

namespace oscnet {

Model::Model(NetworkTopology topology, std::size_t dim, std::vector<std::optional<PotentialSpec>> pinning,
             std::vector<PotentialSpec> interaction, std::vector<BathParams> baths)
    : topology_(std::move(topology)), dim_(dim), pinning_(std::move(pinning)), interaction_(std::move(interaction)) {
  if (dim_ == 0) throw ArgumentError("spatial dimension n must be >= 1");
  if (pinning_.size() != topology_.vertex_count()) {
    throw ArgumentError("pinning list must have one entry per vertex");
  }
  if (interaction_.size() != topology_.edges().size()) {
    throw ArgumentError("interaction list must have one potential per edge");
  }
  for (std::size_t v = 0; v < pinning_.size(); ++v) {
    if (pinning_[v] && pinning_[v]->dimension() != dim_) {
      throw ArgumentError("pinning potential of vertex " + topology_.name(v) + " has wrong dimension");
    }
  }
  for (std::size_t e = 0; e < interaction_.size(); ++e) {
    if (interaction_[e].dimension() != dim_) {
      throw ArgumentError("interaction potential of edge " + std::to_string(e) + " has wrong dimension");
    }
  }
  if (baths.size() != topology_.baths().size()) {
    throw ArgumentError("bath parameter list must match the bath set (" + std::to_string(topology_.baths().size()) +
                        " entries)");
  }
  gamma_.assign(topology_.vertex_count(), 0.0);
  temperature_.assign(topology_.vertex_count(), 0.0);
  for (std::size_t i = 0; i < baths.size(); ++i) {
    const VertexId b = topology_.baths()[i];
    if (!(baths[i].gamma > 0.0) || !std::isfinite(baths[i].gamma)) {
      throw ArgumentError("bath " + topology_.name(b) + ": gamma must be positive");
    }
    // T = 0 is admitted: pure friction, used for noise-free limits.
    if (!(baths[i].temperature >= 0.0) || !std::isfinite(baths[i].temperature)) {
      throw ArgumentError("bath " + topology_.name(b) + ": temperature must be non-negative");
    }
    gamma_[b] = baths[i].gamma;
    temperature_[b] = baths[i].temperature;
  }
}

std::vector<BathParams> Model::bath_params() const {
  std::vector<BathParams> out;
  for (VertexId b : topology_.baths()) out.push_back({gamma_[b], temperature_[b]});
  return out;
}

double Model::t_max() const {
  double t = 0.0;
  for (VertexId b : topology_.baths()) t = std::max(t, temperature_[b]);
  return t;
}

double Model::injection_rate() const {
  double s = 0.0;
  for (VertexId b : topology_.baths()) s += gamma_[b] * temperature_[b];
  return static_cast<double>(dim_) * s;
}

bool Model::equal_temperatures() const {
  const auto& baths = topology_.baths();
  return std::all_of(baths.begin(), baths.end(),
                     [&](VertexId b) { return temperature_[b] == temperature_[baths.front()]; });
}

bool Model::all_quadratic() const {
  for (const auto& u : pinning_) {
    if (u && u->family() != Family::Quadratic) return false;
  }
  return std::all_of(interaction_.begin(), interaction_.end(),
                     [](const PotentialSpec& v) { return v.family() == Family::Quadratic; });
}

Model Model::with_bath_params(std::vector<BathParams> baths) const {
  return Model(topology_, dim_, pinning_, interaction_, std::move(baths));
}

Model Model::without_pinning() const {
  return Model(topology_, dim_, std::vector<std::optional<PotentialSpec>>(vertex_count()), interaction_,
               bath_params());
}

bool State::finite() const {
  return std::all_of(p.begin(), p.end(), [](double x) { return std::isfinite(x); }) &&
         std::all_of(q.begin(), q.end(), [](double x) { return std::isfinite(x); });
}

void check_state(const Model& model, const State& state) {
  if (state.vertices != model.vertex_count() || state.dim != model.dimension() ||
      state.p.size() != model.coordinate_count() || state.q.size() != model.coordinate_count()) {
    throw ArgumentError("state shape does not match model (" + std::to_string(model.vertex_count()) + " x " +
                        std::to_string(model.dimension()) + ")");
  }
}

bool ValidityRegion::contains(const State& state) const {
  for (std::size_t i = 0; i < state.q.size(); ++i) {
    if (state.q[i] < q_lower[i] || state.q[i] > q_upper[i]) return false;
  }
  return true;
}

CounterexampleFixture c4_counterexample() {
  constexpr std::size_t n = 3;
  NetworkTopology topology(2, {Edge{0, 1}}, {0}, {"1", "2"});

  // Interaction y^4/4 + x^2 z^2/2, argument q_2 - q_1 (edge oriented 1 -> 2).
  auto interaction = PotentialSpec::local_piece(n, {{0.25, {0, 4, 0}}, {0.5, {2, 0, 2}}});
  // Pinning piece near (0,1,0): (x^4 + y^4 + z^4)/4.
  auto pin1 = PotentialSpec::local_piece(n, {{0.25, {4, 0, 0}}, {0.25, {0, 4, 0}}, {0.25, {0, 0, 4}}});
  // Pinning piece near (4,2,0): x^4/64 - y^4/32 + z^4/4. Positive on the
  // validity region (x >= 3 gives x^4/64 > 1.26 > 2.2^4/32), so no shift.
  auto pin2 = PotentialSpec::local_piece(n, {{1.0 / 64.0, {4, 0, 0}}, {-1.0 / 32.0, {0, 4, 0}}, {0.25, {0, 0, 4}}});

  Model model(std::move(topology), n, {pin1, pin2}, {interaction}, {BathParams{1.0, 1.0}});

  State initial(2, n);
  initial.q = {0.0, 1.0, 0.0, 4.0, 2.0, 0.0};

  ValidityRegion region;
  region.q_lower = {-0.2, 0.8, -0.2, 3.0, 1.8, -0.2};
  region.q_upper = {0.2, 1.2, 0.2, 5.0, 2.2, 0.2};

  return {std::move(model), std::move(initial), std::move(region),
          "two oscillators in R^3, bath on oscillator 1, interaction y^4/4 + x^2 z^2/2 (C4 fails)"};
}

}  // namespace oscnet
