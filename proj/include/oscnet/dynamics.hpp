#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "oscnet/model.hpp"
#include "oscnet/rng.hpp"

namespace oscnet {

struct Energies {
  double H = 0.0;
  double Hc = 0.0;  // centre-of-mass kinetic energy + pinning
  double Hi = 0.0;  // relative kinetic energy + interactions
};

/// H, H_c and H_i. H is assembled as H_c + H_i, so the split identity is exact.
Energies hamiltonian(const Model& model, const State& state);

enum class ForceField { Raw, Limiting };

/// Conservative forces -grad_q H (friction and noise excluded).
std::vector<double> forces(const Model& model, const State& state, ForceField field = ForceField::Raw);
void forces_into(const Model& model, std::span<const double> q, std::span<double> out,
                 ForceField field = ForceField::Raw);

struct CenterOfMass {
  std::vector<double> P;  // total momentum
  std::vector<double> Q;  // mean position
};
CenterOfMass com_coords(const State& state);

/// Sum of limiting pinning forms evaluated at the single point Q.
double u_infinity(const Model& model, std::span<const double> Q);

struct IntegratorOptions {
  ForceField field = ForceField::Raw;
  bool friction = true;  // O-step damping on bath vertices
  bool noise = true;     // O-step fluctuation on bath vertices
};

/// B(h/2) A(h/2) O(h) A(h/2) B(h/2) splitting. The O sub-step is the exact
/// Ornstein-Uhlenbeck map on bath momenta; the rest is velocity Verlet.
/// Alongside the state it accumulates the dissipation integral
/// Gamma = sum_b gamma_b int p_b^2 dt (trapezoid across the O sub-step) and the
/// bath martingale M = sum_b sqrt(2 gamma_b T_b) int p_b . dW_b.
class LangevinIntegrator {
 public:
  LangevinIntegrator(const Model& model, State initial, double h, IntegratorOptions options = {});

  /// Number of standard normals consumed per step (n per bath vertex).
  std::size_t noise_size() const { return noise_size_; }
  /// Advances one step; `draws` must hold noise_size() standard normals.
  void step(std::span<const double> draws);
  void step(RngStream& rng);

  const State& state() const { return state_; }
  const Model& model() const { return *model_; }
  double h() const { return h_; }
  double time() const { return static_cast<double>(steps_) * h_; }
  std::uint64_t steps() const { return steps_; }
  double dissipation() const { return gamma_integral_; }
  double martingale() const { return martingale_; }

 private:
  const Model* model_;
  State state_;
  double h_;
  IntegratorOptions options_;
  std::vector<double> force_;
  std::vector<double> draws_;
  std::size_t noise_size_ = 0;
  std::uint64_t steps_ = 0;
  double gamma_integral_ = 0.0;
  double martingale_ = 0.0;
  // per-bath O-step constants
  std::vector<double> decay_;
  std::vector<double> kick_;
  std::vector<double> noise_amplitude_;  // sqrt(2 gamma T)
};

/// One step of the splitting scheme from `state`.
State step_sde(const Model& model, const State& state, double h, std::span<const double> gaussian_draws);

struct Trace {
  std::vector<double> times;
  std::vector<double> H, Hc, Hi;
  std::vector<double> Gamma;
  std::vector<double> M;
  std::vector<State> states;  // empty unless requested
  double injection_rate = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;

  std::size_t size() const { return times.size(); }
  /// H(t) - H(0) + Gamma(t) - n sum_b gamma_b T_b t - M(t).
  double residual(std::size_t i) const;
};

/// Raised when a coordinate turns non-finite or H exceeds 1e12 x H(0).
class IntegrationBlowup : public std::runtime_error {
 public:
  IntegrationBlowup(std::uint64_t step, Trace partial);
  std::uint64_t step() const { return step_; }
  const Trace& partial() const { return partial_; }

 private:
  std::uint64_t step_;
  Trace partial_;
};

inline constexpr double kBlowupFactor = 1e12;

struct RecordOptions {
  std::size_t record_every = 1;
  bool keep_states = false;
};

/// Supplies noise_size() standard normals per step.
using NoiseSource = std::function<void(std::span<double>)>;

Trace integrate(const Model& model, const State& state0, double t_end, double h, RngStream& rng,
                RecordOptions record = {});
Trace integrate(const Model& model, const State& state0, double t_end, double h, const NoiseSource& noise,
                RecordOptions record = {});

struct DeterministicOptions {
  bool friction = false;
  ForceField field = ForceField::Raw;
  RecordOptions record{};
};

/// Noise-free dynamics (velocity Verlet, optionally with bath friction).
Trace integrate_deterministic(const Model& model, const State& state0, double t_end, double h,
                              DeterministicOptions options = {});

/// Number of steps covering [0, t_end] with step h (rounded to nearest).
std::uint64_t step_count(double t_end, double h);

/// Time-scale rule: lambda H^{1/l_i - 1/2} when interactions dominate
/// (H_i >= H/2), lambda H^{1/l_p - 1/2} otherwise.
struct TimescaleRule {
  double lambda = 1.0;
  double li = 2.0;
  double lp = 2.0;
  std::optional<double> t_star;  // when set, l_p == 2 requires lambda <= t_star / 2

  void validate() const;
};

double tau(const TimescaleRule& rule, double H, double Hc, double Hi);

enum class RescaleMode { Interaction, Pinning };

/// p -> E^{-1/2} p, q -> E^{-1/l} q with l = l_i or l_p.
State rescale_state(const State& state, double E, RescaleMode mode, double li, double lp);

/// h0 * min(1, H0^{1/l_i - 1/2}): constant number of steps per time-scale window.
double energy_adaptive_step(double h0, double H0, double li);

}  // namespace oscnet
