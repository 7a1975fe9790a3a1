#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "oscnet/conditions.hpp"
#include "oscnet/dynamics.hpp"
#include "oscnet/model.hpp"
#include "oscnet/stats.hpp"

namespace oscnet {

// ---------------------------------------------------------------------------
// Events and initial states

enum class EventClass { A1, A2, A3 };
std::string to_string(EventClass c);

/// First-hit classification of an energy path: A2 when H < H0/2 happens
/// before any H > 2 H0, A3 in the opposite order, A1 when neither happens.
EventClass classify_event(std::span<const double> H, double H0);
EventClass classify_event(const Trace& trace, double H0);

/// Incremental form of classify_event for paths that are not stored.
class EventTracker {
 public:
  explicit EventTracker(double H0) : H0_(H0) {}
  void observe(double H);
  EventClass result() const { return result_; }

 private:
  double H0_;
  EventClass result_ = EventClass::A1;
  bool decided_ = false;
};

enum class Placement { Interaction, Pinning };
std::string to_string(Placement p);

/// Phase point with H = H0 built from q = 0 by adding momentum. Interaction
/// placement uses the zero-sum profile p_v ~ (v - (|G|-1)/2) e_1, so the
/// added energy is relative kinetic energy (H_i >= H/2 for large H0).
/// Pinning placement gives every vertex the same momentum, so it is pure
/// centre-of-mass energy. Throws when H0 does not exceed H at the origin.
State state_at_energy(const Model& model, double H0, Placement placement);

// ---------------------------------------------------------------------------
// Observables

struct Observable {
  std::string name;
  std::function<double(const Model&, const State&)> eval;
};

/// "H", "Hc", "Hi", "one", "p2:<v>" (|p_v|^2), "q2:<v>", "pq:<v>" (p_v . q_v),
/// with <v> a vertex name.
Observable parse_observable(const Model& model, std::string_view text);

// ---------------------------------------------------------------------------
// Lyapunov drift

struct DriftConfig {
  double theta = 0.25;
  double t_star = 1.0;
  std::size_t ensemble = 2000;
  std::vector<double> energy_grid;
  TimescaleRule rule{};
  double h0 = 0.005;
  bool energy_adaptive = true;
  Placement placement = Placement::Interaction;
  unsigned threads = 1;

  /// Enforces 0 < theta T_max < 1, t_star > 0, ensemble >= 100 and a positive
  /// strictly increasing grid.
  void validate(const Model& model) const;
};

struct DriftEstimate {
  double H0 = 0.0;
  double mean = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::array<std::size_t, 3> counts{};  // A1, A2, A3
  std::size_t blowups = 0;
  double mean_gamma = 0.0;
  std::size_t ensemble = 0;
  double h = 0.0;
  std::uint64_t steps = 0;

  bool ci_excludes_one() const { return ci_high < 1.0 || ci_low > 1.0; }
  double frequency(EventClass c) const;
};

/// Blown-up trajectories contribute exp(theta * 2 H0).
DriftEstimate drift_estimate(const Model& model, const State& z0, const DriftConfig& config, std::uint64_t seed,
                             std::uint32_t stream_group = 0);

struct DriftReport {
  std::vector<DriftEstimate> levels;
  std::vector<std::size_t> qualifying;  // indices of levels whose CI excludes 1
  bool inconclusive = true;
  LinearFit fit{};            // log(mean) against H0 over qualifying levels
  double c1_estimate = 0.0;   // -slope
  std::optional<LinearFit> exponent_fit;  // exploratory: log(-log mean) against log H0
  bool grid_spans_decade = false;
  bool c1 = false;
  bool conditions_hold = false;
  std::uint64_t seed = 0;
};

DriftReport drift_scan(const Model& model, const DriftConfig& config, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Dissipation tail

struct DissipationOptions {
  double h0 = 0.005;
  bool energy_adaptive = true;
  unsigned threads = 1;
  std::uint32_t stream_group = 0;
};

struct DissipationTail {
  double H0 = 0.0;
  double tau = 0.0;
  double epsilon = 0.0;
  std::size_t ensemble = 0;
  std::size_t in_tilde_A = 0;  // trajectories with H <= 4 H0 on the window
  std::size_t hits = 0;        // ... that also dissipated less than eps H0 tau
  std::size_t blowups = 0;
  double probability = 0.0;
  Interval ci{};
  double mean_gamma = 0.0;
  double h = 0.0;
  std::uint64_t steps = 0;
};

DissipationTail dissipation_tail(const Model& model, const State& z0, const TimescaleRule& rule, double epsilon,
                                 std::size_t ensemble, std::uint64_t seed, const DissipationOptions& options = {});

// ---------------------------------------------------------------------------
// Relaxation of expectations

struct DecayOptions {
  double h = 0.01;
  double grid_dt = 0.1;             // spacing of the recorded curve
  double reference_time = 2.0e4;    // length of the long stationary run
  std::optional<double> burn_in;    // default: 10 / spectral gap for quadratic models, else 200
  double fit_from = 0.0;            // earliest time admitted into the fit
  std::size_t min_fit_points = 5;
  unsigned threads = 1;
};

struct DecayFit {
  std::vector<double> times;
  std::vector<double> mean;    // ensemble mean of f(z_t)
  std::vector<double> se;
  std::vector<double> signal;  // |mean - reference|
  std::vector<double> noise;   // sqrt(se^2 + reference_se^2)
  double reference = 0.0;
  double reference_se = 0.0;
  double burn_in = 0.0;
  bool inconclusive = true;
  double rate = 0.0;  // -slope of log(signal) on the fit window
  LinearFit fit{};
  std::size_t fit_begin = 0;
  std::size_t fit_end = 0;  // one past the last fitted grid point
};

DecayFit observable_decay_fit(const Model& model, const Observable& observable, const State& z0, double horizon,
                              std::size_t ensemble, std::uint64_t seed, const DecayOptions& options = {});

// ---------------------------------------------------------------------------
// Stationary moments

struct MomentOptions {
  std::size_t chains = 4;
  std::size_t thin = 10;              // integrator steps between samples
  std::size_t batches_per_chain = 25;
  bool require_conditions = true;
  unsigned threads = 1;
};

struct MomentReport {
  std::size_t samples = 0;
  std::size_t chains = 0;
  std::size_t batches = 0;
  std::vector<MeanEstimate> p2;  // per-vertex |p_v|^2 / n
  MeanEstimate balance;          // sum_b gamma_b |p_b|^2
  double balance_target = 0.0;   // n sum_b gamma_b T_b
  double balance_ratio = 0.0;
  double balance_n_eff = 0.0;
  // Quadratic models only: second moments of z = (p, q) against the oracle.
  bool has_oracle = false;
  Eigen::MatrixXd moments;
  Eigen::MatrixXd moment_se;
  Eigen::MatrixXd oracle;
  Eigen::MatrixXd z_scores;
  double max_abs_z = 0.0;
  double min_n_eff = 0.0;
};

/// Time averages along `chains` independent runs, each burned in for
/// `burn_in` time units and then sampled every `thin` steps. Standard errors
/// come from batch means.
MomentReport stationary_moment_test(const Model& model, double burn_in, std::size_t n_samples, double h,
                                    std::uint64_t seed, const MomentOptions& options = {});

// ---------------------------------------------------------------------------
// Gibbs invariance

struct GibbsTestOptions {
  /// Temperature of the initial Gibbs law. Required when baths disagree.
  std::optional<double> sample_temperature;
  double h = 0.01;
  unsigned threads = 1;
};

struct ObservableShift {
  std::string name;
  double mean0 = 0.0;
  double mean_t = 0.0;
  double difference = 0.0;
  double se = 0.0;  // of the paired difference
  double z = 0.0;
};

struct GibbsReport {
  double temperature = 0.0;
  std::string method;
  double acceptance_rate = 1.0;
  std::size_t samples = 0;
  double t_check = 0.0;
  std::vector<ObservableShift> observables;
  double max_abs_z = 0.0;
};

GibbsReport gibbs_invariance_test(const Model& model, const std::vector<Observable>& observables,
                                  std::size_t n_samples, double t_check, std::uint64_t seed,
                                  const GibbsTestOptions& options = {});

}  // namespace oscnet
