#include "oscnet/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "oscnet/errors.hpp"

namespace oscnet {

Energies hamiltonian(const Model& model, const State& state) {
  check_state(model, state);
  const std::size_t N = model.vertex_count();
  const std::size_t n = model.dimension();

  std::vector<double> P(n, 0.0);
  for (std::size_t v = 0; v < N; ++v) {
    auto pv = state.p_of(v);
    for (std::size_t i = 0; i < n; ++i) P[i] += pv[i];
  }
  const double inv_n = 1.0 / static_cast<double>(N);

  double Hc = 0.0;
  for (double Pi : P) Hc += Pi * Pi;
  Hc *= 0.5 * inv_n;
  for (std::size_t v = 0; v < N; ++v) {
    if (const PotentialSpec* u = model.pinning(static_cast<VertexId>(v))) Hc += u->value(state.q_of(v));
  }

  double kinetic_rel = 0.0;
  for (std::size_t v = 0; v < N; ++v) {
    auto pv = state.p_of(v);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = pv[i] - P[i] * inv_n;
      kinetic_rel += d * d;
    }
  }
  double Hi = 0.5 * kinetic_rel;
  std::vector<double> dq(n);
  const auto& edges = model.topology().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto qa = state.q_of(edges[e].a);
    auto qb = state.q_of(edges[e].b);
    for (std::size_t i = 0; i < n; ++i) dq[i] = qb[i] - qa[i];
    Hi += model.interaction(e).value(dq);
  }
  return {Hc + Hi, Hc, Hi};
}

void forces_into(const Model& model, std::span<const double> q, std::span<double> out, ForceField field) {
  const std::size_t N = model.vertex_count();
  const std::size_t n = model.dimension();
  std::fill(out.begin(), out.end(), 0.0);
  const bool limiting = field == ForceField::Limiting;
  for (std::size_t v = 0; v < N; ++v) {
    if (const PotentialSpec* u = model.pinning(static_cast<VertexId>(v))) {
      auto qv = q.subspan(v * n, n);
      auto fv = out.subspan(v * n, n);
      if (limiting) {
        u->add_limiting_gradient(qv, -1.0, fv);
      } else {
        u->add_gradient(qv, -1.0, fv);
      }
    }
  }
  double dq_buf[16];
  std::vector<double> dq_heap;
  std::span<double> dq;
  if (n <= 16) {
    dq = std::span<double>(dq_buf, n);
  } else {
    dq_heap.resize(n);
    dq = dq_heap;
  }
  std::vector<double> g(n);
  const auto& edges = model.topology().edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::size_t a = edges[e].a, b = edges[e].b;
    for (std::size_t i = 0; i < n; ++i) dq[i] = q[b * n + i] - q[a * n + i];
    std::fill(g.begin(), g.end(), 0.0);
    if (limiting) {
      model.interaction(e).add_limiting_gradient(dq, 1.0, g);
    } else {
      model.interaction(e).add_gradient(dq, 1.0, g);
    }
    // V_e(q_b - q_a): force +grad on a, -grad on b.
    for (std::size_t i = 0; i < n; ++i) {
      out[a * n + i] += g[i];
      out[b * n + i] -= g[i];
    }
  }
}

std::vector<double> forces(const Model& model, const State& state, ForceField field) {
  check_state(model, state);
  std::vector<double> f(model.coordinate_count());
  forces_into(model, state.q, f, field);
  return f;
}

CenterOfMass com_coords(const State& state) {
  CenterOfMass c{std::vector<double>(state.dim, 0.0), std::vector<double>(state.dim, 0.0)};
  for (std::size_t v = 0; v < state.vertices; ++v) {
    for (std::size_t i = 0; i < state.dim; ++i) {
      c.P[i] += state.p[v * state.dim + i];
      c.Q[i] += state.q[v * state.dim + i];
    }
  }
  for (double& x : c.Q) x /= static_cast<double>(state.vertices);
  return c;
}

double u_infinity(const Model& model, std::span<const double> Q) {
  if (Q.size() != model.dimension()) throw ArgumentError("u_infinity: point has wrong dimension");
  double total = 0.0;
  for (std::size_t v = 0; v < model.vertex_count(); ++v) {
    if (const PotentialSpec* u = model.pinning(static_cast<VertexId>(v))) total += u->limiting_value(Q);
  }
  return total;
}

LangevinIntegrator::LangevinIntegrator(const Model& model, State initial, double h, IntegratorOptions options)
    : model_(&model), state_(std::move(initial)), h_(h), options_(options) {
  check_state(model, state_);
  if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("step size h must be positive");
  force_.resize(model.coordinate_count());
  forces_into(model, state_.q, force_, options_.field);
  const auto& baths = model.topology().baths();
  noise_size_ = options_.noise ? baths.size() * model.dimension() : 0;
  draws_.resize(noise_size_);
  for (VertexId b : baths) {
    const double gamma = model.gamma(b);
    const double temperature = model.temperature(b);
    const double decay = options_.friction ? std::exp(-gamma * h) : 1.0;
    decay_.push_back(decay);
    kick_.push_back(options_.noise ? std::sqrt(temperature * -std::expm1(-2.0 * gamma * h)) : 0.0);
    noise_amplitude_.push_back(options_.noise ? std::sqrt(2.0 * gamma * temperature) : 0.0);
  }
}

void LangevinIntegrator::step(std::span<const double> draws) {
  if (draws.size() != noise_size_) {
    throw ArgumentError("expected " + std::to_string(noise_size_) + " gaussian draws per step, got " +
                        std::to_string(draws.size()));
  }
  const Model& model = *model_;
  const std::size_t n = model.dimension();
  const std::size_t count = state_.p.size();
  const double half = 0.5 * h_;
  double* p = state_.p.data();
  double* q = state_.q.data();

  for (std::size_t k = 0; k < count; ++k) p[k] += half * force_[k];
  for (std::size_t k = 0; k < count; ++k) q[k] += half * p[k];

  const auto& baths = model.topology().baths();
  const double sqrt_h = std::sqrt(h_);
  for (std::size_t j = 0; j < baths.size(); ++j) {
    const VertexId b = baths[j];
    const double gamma = model.gamma(b);
    double pre_sq = 0.0, post_sq = 0.0, p_dot_dw = 0.0, dw_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double& pb = p[b * n + i];
      const double pre = pb;
      double post = decay_[j] * pre;
      if (options_.noise) {
        const double xi = draws[j * n + i];
        post += kick_[j] * xi;
        const double dw = xi * sqrt_h;
        p_dot_dw += pre * dw;
        dw_sq += dw * dw;
      }
      pb = post;
      pre_sq += pre * pre;
      post_sq += post * post;
    }
    gamma_integral_ += gamma * h_ * 0.5 * (pre_sq + post_sq);
    if (options_.noise) {
      // Ito sum plus the iterated-integral term sigma^2 (|dW|^2 - n h) / 2.
      const double sigma = noise_amplitude_[j];
      martingale_ += sigma * p_dot_dw + 0.5 * sigma * sigma * (dw_sq - static_cast<double>(n) * h_);
    }
  }

  for (std::size_t k = 0; k < count; ++k) q[k] += half * p[k];
  forces_into(model, state_.q, force_, options_.field);
  for (std::size_t k = 0; k < count; ++k) p[k] += half * force_[k];
  ++steps_;
}

void LangevinIntegrator::step(RngStream& rng) {
  rng.fill_normal(draws_);
  step(std::span<const double>(draws_));
}

State step_sde(const Model& model, const State& state, double h, std::span<const double> gaussian_draws) {
  LangevinIntegrator integrator(model, state, h);
  integrator.step(gaussian_draws);
  if (!integrator.state().finite()) {
    Trace partial;
    throw IntegrationBlowup(1, std::move(partial));
  }
  return integrator.state();
}

double Trace::residual(std::size_t i) const {
  return H[i] - H[0] + Gamma[i] - injection_rate * times[i] - M[i];
}

IntegrationBlowup::IntegrationBlowup(std::uint64_t step, Trace partial)
    : std::runtime_error("integration blew up at step " + std::to_string(step)), step_(step),
      partial_(std::move(partial)) {}

std::uint64_t step_count(double t_end, double h) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ArgumentError("t_end must be positive");
  if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("step size h must be positive");
  return static_cast<std::uint64_t>(std::max(1.0, std::round(t_end / h)));
}

namespace {

void record(Trace& trace, const LangevinIntegrator& integ, const Energies& en, bool keep_states) {
  trace.times.push_back(integ.time());
  trace.H.push_back(en.H);
  trace.Hc.push_back(en.Hc);
  trace.Hi.push_back(en.Hi);
  trace.Gamma.push_back(integ.dissipation());
  trace.M.push_back(integ.martingale());
  if (keep_states) trace.states.push_back(integ.state());
}

Trace run(const Model& model, const State& state0, double t_end, double h, IntegratorOptions options,
          const NoiseSource* noise, RecordOptions rec) {
  const std::uint64_t steps = step_count(t_end, h);
  if (rec.record_every == 0) throw ArgumentError("record_every must be >= 1");
  LangevinIntegrator integ(model, state0, h, options);
  Trace trace;
  trace.injection_rate = options.noise ? model.injection_rate() : 0.0;
  Energies en = hamiltonian(model, integ.state());
  const double limit = kBlowupFactor * std::max(en.H, 1.0);
  record(trace, integ, en, rec.keep_states);

  std::vector<double> draws(integ.noise_size());
  for (std::uint64_t s = 1; s <= steps; ++s) {
    if (!draws.empty()) (*noise)(draws);
    integ.step(std::span<const double>(draws));
    const bool finite = integ.state().finite();
    if (finite) en = hamiltonian(model, integ.state());
    if (!finite || !std::isfinite(en.H) || en.H > limit) throw IntegrationBlowup(s, std::move(trace));
    if (s % rec.record_every == 0 || s == steps) record(trace, integ, en, rec.keep_states);
  }
  return trace;
}

}  // namespace

Trace integrate(const Model& model, const State& state0, double t_end, double h, RngStream& rng, RecordOptions rec) {
  NoiseSource source = [&rng](std::span<double> out) { rng.fill_normal(out); };
  Trace trace = run(model, state0, t_end, h, {}, &source, rec);
  trace.seed = rng.seed();
  trace.stream_index = rng.index();
  return trace;
}

Trace integrate(const Model& model, const State& state0, double t_end, double h, const NoiseSource& noise,
                RecordOptions rec) {
  return run(model, state0, t_end, h, {}, &noise, rec);
}

Trace integrate_deterministic(const Model& model, const State& state0, double t_end, double h,
                              DeterministicOptions options) {
  IntegratorOptions io{options.field, options.friction, false};
  return run(model, state0, t_end, h, io, nullptr, options.record);
}

void TimescaleRule::validate() const {
  if (!(lambda > 0.0)) throw ArgumentError("time-scale lambda must be positive");
  if (!(li >= 2.0) || !(lp >= 2.0)) throw ArgumentError("time-scale degrees must be >= 2");
  if (lp == 2.0 && t_star && lambda > *t_star / 2.0) {
    throw ArgumentError("with pinning degree 2, lambda must not exceed t_star / 2");
  }
}

double tau(const TimescaleRule& rule, double H, double Hc, double Hi) {
  if (!(H > 0.0)) throw ArgumentError("tau requires positive energy H");
  (void)Hc;
  const double degree = Hi >= H / 2.0 ? rule.li : rule.lp;
  return rule.lambda * std::pow(H, 1.0 / degree - 0.5);
}

State rescale_state(const State& state, double E, RescaleMode mode, double li, double lp) {
  if (!(E > 0.0)) throw ArgumentError("rescaling energy must be positive");
  const double ell = mode == RescaleMode::Interaction ? li : lp;
  const double ps = std::pow(E, -0.5);
  const double qs = std::pow(E, -1.0 / ell);
  State out = state;
  for (double& x : out.p) x *= ps;
  for (double& x : out.q) x *= qs;
  return out;
}

double energy_adaptive_step(double h0, double H0, double li) {
  if (!(H0 > 0.0)) return h0;
  return h0 * std::min(1.0, std::pow(H0, 1.0 / li - 0.5));
}

}  // namespace oscnet
