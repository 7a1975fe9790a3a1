#include "oscnet/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oscnet/errors.hpp"
#include "oscnet/gaussian_oracle.hpp"
#include "oscnet/gibbs_sampler.hpp"
#include "oscnet/parallel.hpp"
#include "oscnet/rng.hpp"

namespace oscnet {

namespace {

constexpr double kZ95 = 1.959963984540054;

double blowup_limit(double H0) { return kBlowupFactor * std::max(H0, 1.0); }

bool blown_up(double H, double limit) { return !std::isfinite(H) || H > limit; }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Grid-adjusted step: an integer number of steps lands exactly on t_end.
std::pair<double, std::uint64_t> fit_step(double t_end, double h) {
  const std::uint64_t steps = step_count(t_end, h);
  return {t_end / static_cast<double>(steps), steps};
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(EventClass c) {
  switch (c) {
    case EventClass::A1: return "A1";
    case EventClass::A2: return "A2";
    case EventClass::A3: return "A3";
  }
  return "?";
}

std::string to_string(Placement p) { return p == Placement::Interaction ? "interaction" : "pinning"; }

void EventTracker::observe(double H) {
  if (decided_) return;
  if (H < 0.5 * H0_) {
    result_ = EventClass::A2;
    decided_ = true;
  } else if (!(H <= 2.0 * H0_)) {  // NaN counts as an upward excursion
    result_ = EventClass::A3;
    decided_ = true;
  }
}

EventClass classify_event(std::span<const double> H, double H0) {
  if (H.empty()) throw ArgumentError("cannot classify an empty trace");
  EventTracker tracker(H0);
  for (double h : H) tracker.observe(h);
  return tracker.result();
}

EventClass classify_event(const Trace& trace, double H0) { return classify_event(trace.H, H0); }

State state_at_energy(const Model& model, double H0, Placement placement) {
  State z = State::zeros_like(model);
  const double base = hamiltonian(model, z).H;
  if (!(H0 > base) || !std::isfinite(H0)) {
    throw ArgumentError("target energy " + std::to_string(H0) + " must exceed H at the origin (" +
                        std::to_string(base) + ")");
  }
  const std::size_t N = model.vertex_count();
  std::vector<double> profile(N, 1.0);
  if (placement == Placement::Interaction && N > 1) {
    for (std::size_t v = 0; v < N; ++v) profile[v] = static_cast<double>(v) - 0.5 * static_cast<double>(N - 1);
  }
  double norm2 = 0.0;
  for (double d : profile) norm2 += d * d;
  const double s = std::sqrt(2.0 * (H0 - base) / norm2);
  for (std::size_t v = 0; v < N; ++v) z.p_of(v)[0] = s * profile[v];
  return z;
}

// ---------------------------------------------------------------------------

Observable parse_observable(const Model& model, std::string_view text) {
  const std::string name(text);
  if (text == "H") return {name, [](const Model& m, const State& z) { return hamiltonian(m, z).H; }};
  if (text == "Hc") return {name, [](const Model& m, const State& z) { return hamiltonian(m, z).Hc; }};
  if (text == "Hi") return {name, [](const Model& m, const State& z) { return hamiltonian(m, z).Hi; }};
  if (text == "one") return {name, [](const Model&, const State&) { return 1.0; }};
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ArgumentError("unknown observable '" + name + "' (expected H, Hc, Hi, one, p2:<v>, q2:<v> or pq:<v>)");
  }
  const auto kind = text.substr(0, colon);
  const auto vertex = model.topology().find(text.substr(colon + 1));
  if (!vertex) throw ArgumentError("observable '" + name + "' names an unknown vertex");
  const VertexId v = *vertex;
  if (kind == "p2") return {name, [v](const Model&, const State& z) { return dot(z.p_of(v), z.p_of(v)); }};
  if (kind == "q2") return {name, [v](const Model&, const State& z) { return dot(z.q_of(v), z.q_of(v)); }};
  if (kind == "pq") return {name, [v](const Model&, const State& z) { return dot(z.p_of(v), z.q_of(v)); }};
  throw ArgumentError("unknown observable kind '" + std::string(kind) + "'");
}

// ---------------------------------------------------------------------------

void DriftConfig::validate(const Model& model) const {
  if (!(theta > 0.0) || !(theta * model.t_max() < 1.0)) {
    throw ArgumentError("theta must satisfy 0 < theta * T_max < 1 (theta=" + std::to_string(theta) +
                        ", T_max=" + std::to_string(model.t_max()) + ")");
  }
  if (!(t_star > 0.0)) throw ArgumentError("t_star must be positive");
  if (ensemble < 100) throw ArgumentError("drift ensemble must have at least 100 trajectories");
  if (!(h0 > 0.0)) throw ArgumentError("h0 must be positive");
  for (std::size_t i = 0; i < energy_grid.size(); ++i) {
    if (!(energy_grid[i] > 0.0) || (i > 0 && !(energy_grid[i] > energy_grid[i - 1]))) {
      throw ArgumentError("energy grid must be positive and strictly increasing");
    }
  }
  TimescaleRule r = rule;
  r.t_star = t_star;
  r.validate();
}

double DriftEstimate::frequency(EventClass c) const {
  return ensemble == 0 ? 0.0 : static_cast<double>(counts[static_cast<int>(c)]) / static_cast<double>(ensemble);
}

DriftEstimate drift_estimate(const Model& model, const State& z0, const DriftConfig& config, std::uint64_t seed,
                             std::uint32_t stream_group) {
  config.validate(model);
  check_state(model, z0);
  if (!z0.finite()) throw ArgumentError("initial state must be finite");
  const double H0 = hamiltonian(model, z0).H;
  if (!(H0 > 0.0)) throw ArgumentError("drift estimate needs H(z0) > 0");
  const double h_nominal = config.energy_adaptive ? energy_adaptive_step(config.h0, H0, config.rule.li) : config.h0;
  const auto [h, steps] = fit_step(config.t_star, h_nominal);
  const double limit = blowup_limit(H0);
  const double cap = std::exp(config.theta * 2.0 * H0);

  const std::size_t N = config.ensemble;
  std::vector<double> value(N), gamma(N);
  std::vector<EventClass> cls(N);
  std::vector<char> blown(N, 0);
  parallel_for(N, config.threads, [&](std::size_t i) {
    RngStream rng(seed, stream_index(stream_group, static_cast<std::uint32_t>(i)));
    LangevinIntegrator integ(model, z0, h);
    EventTracker tracker(H0);
    double H = H0;
    for (std::uint64_t s = 0; s < steps; ++s) {
      integ.step(rng);
      H = hamiltonian(model, integ.state()).H;
      if (blown_up(H, limit)) {
        blown[i] = 1;
        break;
      }
      tracker.observe(H);
    }
    if (blown[i]) {
      value[i] = cap;
      cls[i] = EventClass::A3;
      gamma[i] = 0.0;
    } else {
      value[i] = std::exp(config.theta * (H - H0));
      cls[i] = tracker.result();
      gamma[i] = integ.dissipation();
    }
  });

  DriftEstimate est;
  est.H0 = H0;
  est.ensemble = N;
  est.h = h;
  est.steps = steps;
  const MeanEstimate m = mean_estimate(value);
  est.mean = m.mean;
  est.se = m.se;
  est.ci_low = m.mean - kZ95 * m.se;
  est.ci_high = m.mean + kZ95 * m.se;
  CompensatedSum g;
  for (std::size_t i = 0; i < N; ++i) {
    ++est.counts[static_cast<int>(cls[i])];
    if (blown[i]) {
      ++est.blowups;
    } else {
      g.add(gamma[i]);
    }
  }
  if (est.blowups < N) est.mean_gamma = g.value() / static_cast<double>(N - est.blowups);
  return est;
}

DriftReport drift_scan(const Model& model, const DriftConfig& config, std::uint64_t seed) {
  config.validate(model);
  if (config.energy_grid.size() < 3) throw ArgumentError("drift scan needs at least 3 energy levels");
  DriftReport report;
  report.seed = seed;
  report.grid_spans_decade = config.energy_grid.back() >= 10.0 * config.energy_grid.front();
  const ConditionReport conditions = check_conditions(model);
  report.c1 = conditions.c1;
  report.conditions_hold = conditions.all_hold();

  for (std::size_t k = 0; k < config.energy_grid.size(); ++k) {
    const State z0 = state_at_energy(model, config.energy_grid[k], config.placement);
    report.levels.push_back(drift_estimate(model, z0, config, seed, static_cast<std::uint32_t>(k)));
    const auto& lvl = report.levels.back();
    if (lvl.ci_excludes_one() && lvl.mean > 0.0) report.qualifying.push_back(k);
  }
  if (report.qualifying.size() < 3) return report;

  report.inconclusive = false;
  std::vector<double> x, y;
  for (std::size_t k : report.qualifying) {
    x.push_back(report.levels[k].H0);
    y.push_back(std::log(report.levels[k].mean));
  }
  report.fit = least_squares(x, y);
  report.c1_estimate = -report.fit.slope;

  // Exploratory only: the exponent r in a drift of the form exp(-C H^r).
  if (std::all_of(y.begin(), y.end(), [](double v) { return v < 0.0; })) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(-y[i]));
    }
    report.exponent_fit = least_squares(lx, ly);
  }
  return report;
}

// ---------------------------------------------------------------------------

DissipationTail dissipation_tail(const Model& model, const State& z0, const TimescaleRule& rule, double epsilon,
                                 std::size_t ensemble, std::uint64_t seed, const DissipationOptions& options) {
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (ensemble == 0) throw ArgumentError("ensemble must be non-empty");
  rule.validate();
  check_state(model, z0);
  const Energies e0 = hamiltonian(model, z0);
  const double H0 = e0.H;
  const double window = tau(rule, e0.H, e0.Hc, e0.Hi);
  const double h_nominal = options.energy_adaptive ? energy_adaptive_step(options.h0, H0, rule.li) : options.h0;
  const auto [h, steps] = fit_step(window, h_nominal);
  const double limit = blowup_limit(H0);
  const double threshold = epsilon * H0 * window;

  // 0: left the energy window, 1: stayed but dissipated enough, 2: hit.
  std::vector<int> outcome(ensemble, 0);
  std::vector<char> blown(ensemble, 0);
  std::vector<double> gamma(ensemble, 0.0);
  parallel_for(ensemble, options.threads, [&](std::size_t i) {
    RngStream rng(seed, stream_index(options.stream_group, static_cast<std::uint32_t>(i)));
    LangevinIntegrator integ(model, z0, h);
    for (std::uint64_t s = 0; s < steps; ++s) {
      integ.step(rng);
      const double H = hamiltonian(model, integ.state()).H;
      if (blown_up(H, limit)) {
        blown[i] = 1;
        return;
      }
      if (H > 4.0 * H0) return;
    }
    gamma[i] = integ.dissipation();
    outcome[i] = gamma[i] < threshold ? 2 : 1;
  });

  DissipationTail tail;
  tail.H0 = H0;
  tail.tau = window;
  tail.epsilon = epsilon;
  tail.ensemble = ensemble;
  tail.h = h;
  tail.steps = steps;
  CompensatedSum g;
  for (std::size_t i = 0; i < ensemble; ++i) {
    tail.blowups += blown[i] ? 1 : 0;
    if (outcome[i] > 0) {
      ++tail.in_tilde_A;
      g.add(gamma[i]);
    }
    if (outcome[i] == 2) ++tail.hits;
  }
  tail.probability = static_cast<double>(tail.hits) / static_cast<double>(ensemble);
  tail.ci = wilson_interval(tail.hits, ensemble);
  if (tail.in_tilde_A > 0) tail.mean_gamma = g.value() / static_cast<double>(tail.in_tilde_A);
  return tail;
}

// ---------------------------------------------------------------------------

DecayFit observable_decay_fit(const Model& model, const Observable& observable, const State& z0, double horizon,
                              std::size_t ensemble, std::uint64_t seed, const DecayOptions& options) {
  check_state(model, z0);
  if (!(horizon > 0.0)) throw ArgumentError("horizon must be positive");
  if (ensemble < 2) throw ArgumentError("decay fit needs at least 2 trajectories");
  if (!(options.h > 0.0) || !(options.grid_dt >= options.h)) throw ArgumentError("need 0 < h <= grid_dt");
  const double h = options.h;
  const auto every = static_cast<std::uint64_t>(std::max(1.0, std::round(options.grid_dt / h)));
  const std::uint64_t total = step_count(horizon, h);
  const std::size_t points = static_cast<std::size_t>(total / every) + 1;

  DecayFit out;
  if (options.burn_in) {
    out.burn_in = *options.burn_in;
  } else {
    out.burn_in = 200.0;
    if (model.all_quadratic()) {
      try {
        out.burn_in = 10.0 / gaussian_stationary_covariance(model).spectral_gap();
      } catch (const DiagnosticError&) {
      }
    }
  }

  for (std::size_t k = 0; k < points; ++k) out.times.push_back(static_cast<double>(k * every) * h);

  // Ensemble curve, reduced block by block in trajectory order.
  std::vector<CompensatedSum> sum(points), sum_sq(points);
  constexpr std::size_t kBlock = 1024;
  std::vector<double> block_values;
  for (std::size_t start = 0; start < ensemble; start += kBlock) {
    const std::size_t count = std::min(kBlock, ensemble - start);
    block_values.assign(count * points, 0.0);
    parallel_for(count, options.threads, [&](std::size_t j) {
      const std::size_t i = start + j;
      RngStream rng(seed, stream_index(0, static_cast<std::uint32_t>(i)));
      LangevinIntegrator integ(model, z0, h);
      double* row = block_values.data() + j * points;
      row[0] = observable.eval(model, integ.state());
      for (std::size_t k = 1; k < points; ++k) {
        for (std::uint64_t s = 0; s < every; ++s) integ.step(rng);
        if (!integ.state().finite()) throw DiagnosticError("trajectory blew up in decay ensemble");
        row[k] = observable.eval(model, integ.state());
      }
    });
    for (std::size_t j = 0; j < count; ++j) {
      for (std::size_t k = 0; k < points; ++k) {
        const double v = block_values[j * points + k];
        sum[k].add(v);
        sum_sq[k].add(v * v);
      }
    }
  }
  const double n = static_cast<double>(ensemble);
  for (std::size_t k = 0; k < points; ++k) {
    const double m = sum[k].value() / n;
    const double var = std::max(0.0, (sum_sq[k].value() - n * m * m) / (n - 1.0));
    out.mean.push_back(m);
    out.se.push_back(std::sqrt(var / n));
  }

  // Stationary reference: one long run after burn-in, batch-means error.
  {
    RngStream rng(seed, stream_index(1, 0));
    LangevinIntegrator integ(model, z0, h);
    const std::uint64_t burn = out.burn_in > 0.0 ? step_count(out.burn_in, h) : 0;
    for (std::uint64_t s = 0; s < burn; ++s) integ.step(rng);
    constexpr std::size_t kBatches = 50;
    const std::uint64_t samples = std::max<std::uint64_t>(kBatches, step_count(options.reference_time, h) / every);
    const std::uint64_t per_batch = samples / kBatches;
    std::vector<double> batch_means;
    for (std::size_t b = 0; b < kBatches; ++b) {
      CompensatedSum s;
      for (std::uint64_t k = 0; k < per_batch; ++k) {
        for (std::uint64_t t = 0; t < every; ++t) integ.step(rng);
        s.add(observable.eval(model, integ.state()));
      }
      if (!integ.state().finite()) throw DiagnosticError("reference run blew up");
      batch_means.push_back(s.value() / static_cast<double>(per_batch));
    }
    const MeanEstimate ref = mean_estimate(batch_means);
    out.reference = ref.mean;
    out.reference_se = ref.se;
  }

  for (std::size_t k = 0; k < points; ++k) {
    out.signal.push_back(std::abs(out.mean[k] - out.reference));
    out.noise.push_back(std::sqrt(out.se[k] * out.se[k] + out.reference_se * out.reference_se));
  }

  // Fit window: the first run of grid points past fit_from where the signal
  // stands above three times the noise.
  std::size_t begin = 0;
  while (begin < points && (out.times[begin] < options.fit_from || !(out.signal[begin] > 3.0 * out.noise[begin]))) {
    ++begin;
  }
  std::size_t end = begin;
  while (end < points && out.signal[end] > 3.0 * out.noise[end]) ++end;
  out.fit_begin = begin;
  out.fit_end = end;
  if (end - begin < std::max<std::size_t>(options.min_fit_points, 2)) return out;

  std::vector<double> x, y;
  for (std::size_t k = begin; k < end; ++k) {
    x.push_back(out.times[k]);
    y.push_back(std::log(out.signal[k]));
  }
  out.fit = least_squares(x, y);
  out.rate = -out.fit.slope;
  out.inconclusive = false;
  return out;
}

// ---------------------------------------------------------------------------

MomentReport stationary_moment_test(const Model& model, double burn_in, std::size_t n_samples, double h,
                                    std::uint64_t seed, const MomentOptions& options) {
  if (!(h > 0.0)) throw ArgumentError("step size must be positive");
  if (!(burn_in >= 0.0)) throw ArgumentError("burn-in must be non-negative");
  if (options.chains == 0 || options.batches_per_chain < 2 || options.thin == 0) {
    throw ArgumentError("need chains >= 1, batches_per_chain >= 2 and thin >= 1");
  }
  const std::size_t per_batch = n_samples / (options.chains * options.batches_per_chain);
  if (per_batch == 0) throw ArgumentError("n_samples too small for the requested batches");
  if (options.require_conditions) {
    const ConditionReport c = check_conditions(model);
    if (!c.all_hold()) {
      throw ArgumentError("model does not satisfy the standing conditions; pass require_conditions=false to override");
    }
  }

  const std::size_t N = model.vertex_count();
  const std::size_t n = model.dimension();
  const std::size_t m = 2 * model.coordinate_count();
  const bool quadratic = model.all_quadratic();
  // Layout of one accumulator row: p2 per vertex, balance, then the upper
  // triangle of z z^T when an oracle exists.
  const std::size_t tri = quadratic ? m * (m + 1) / 2 : 0;
  const std::size_t width = N + 1 + tri;
  const std::size_t batches = options.chains * options.batches_per_chain;

  std::vector<double> batch_mean(batches * width, 0.0);
  std::vector<double> chain_sq(options.chains * width, 0.0);
  const std::uint64_t burn = burn_in > 0.0 ? step_count(burn_in, h) : 0;
  const auto& baths = model.topology().baths();

  parallel_for(options.chains, options.threads, [&](std::size_t c) {
    RngStream rng(seed, stream_index(0, static_cast<std::uint32_t>(c)));
    LangevinIntegrator integ(model, State::zeros_like(model), h);
    for (std::uint64_t s = 0; s < burn; ++s) integ.step(rng);
    std::vector<double> row(width), z(m);
    std::vector<CompensatedSum> sq(width);
    for (std::size_t b = 0; b < options.batches_per_chain; ++b) {
      std::vector<CompensatedSum> acc(width);
      for (std::size_t k = 0; k < per_batch; ++k) {
        for (std::size_t t = 0; t < options.thin; ++t) integ.step(rng);
        const State& st = integ.state();
        if (!st.finite()) {
          throw DiagnosticError("blowup during stationary sampling (chain " + std::to_string(c) + ", batch " +
                                std::to_string(b) + ", sample " + std::to_string(k) + ")");
        }
        for (std::size_t v = 0; v < N; ++v) row[v] = dot(st.p_of(v), st.p_of(v)) / static_cast<double>(n);
        double bal = 0.0;
        for (VertexId v : baths) bal += model.gamma(v) * dot(st.p_of(v), st.p_of(v));
        row[N] = bal;
        if (quadratic) {
          std::copy(st.p.begin(), st.p.end(), z.begin());
          std::copy(st.q.begin(), st.q.end(), z.begin() + static_cast<std::ptrdiff_t>(st.p.size()));
          std::size_t idx = N + 1;
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i; j < m; ++j) row[idx++] = z[i] * z[j];
          }
        }
        for (std::size_t w = 0; w < width; ++w) {
          acc[w].add(row[w]);
          sq[w].add(row[w] * row[w]);
        }
      }
      double* out = batch_mean.data() + (c * options.batches_per_chain + b) * width;
      for (std::size_t w = 0; w < width; ++w) out[w] = acc[w].value() / static_cast<double>(per_batch);
    }
    for (std::size_t w = 0; w < width; ++w) chain_sq[c * width + w] = sq[w].value();
  });

  const double total = static_cast<double>(batches * per_batch);
  std::vector<MeanEstimate> est(width);
  std::vector<double> n_eff(width, std::numeric_limits<double>::infinity());
  std::vector<double> column(batches);
  for (std::size_t w = 0; w < width; ++w) {
    for (std::size_t b = 0; b < batches; ++b) column[b] = batch_mean[b * width + w];
    est[w] = mean_estimate(column);
    CompensatedSum sq;
    for (std::size_t c = 0; c < options.chains; ++c) sq.add(chain_sq[c * width + w]);
    const double var = std::max(0.0, (sq.value() - total * est[w].mean * est[w].mean) / (total - 1.0));
    if (est[w].se > 0.0) n_eff[w] = var / (est[w].se * est[w].se);
  }

  MomentReport r;
  r.samples = static_cast<std::size_t>(total);
  r.chains = options.chains;
  r.batches = batches;
  r.p2.assign(est.begin(), est.begin() + static_cast<std::ptrdiff_t>(N));
  r.balance = est[N];
  r.balance_target = model.injection_rate();
  r.balance_ratio = r.balance_target > 0.0 ? r.balance.mean / r.balance_target : 0.0;
  r.balance_n_eff = n_eff[N];
  r.min_n_eff = *std::min_element(n_eff.begin(), n_eff.end());
  if (quadratic) {
    r.has_oracle = true;
    r.oracle = gaussian_stationary_covariance(model).covariance;
    const auto M = static_cast<Eigen::Index>(m);
    r.moments.resize(M, M);
    r.moment_se.resize(M, M);
    r.z_scores.resize(M, M);
    std::size_t idx = N + 1;
    for (Eigen::Index i = 0; i < M; ++i) {
      for (Eigen::Index j = i; j < M; ++j, ++idx) {
        r.moments(i, j) = r.moments(j, i) = est[idx].mean;
        r.moment_se(i, j) = r.moment_se(j, i) = est[idx].se;
        const double z = est[idx].se > 0.0 ? (est[idx].mean - r.oracle(i, j)) / est[idx].se : 0.0;
        r.z_scores(i, j) = r.z_scores(j, i) = z;
        r.max_abs_z = std::max(r.max_abs_z, std::abs(z));
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

GibbsReport gibbs_invariance_test(const Model& model, const std::vector<Observable>& observables,
                                  std::size_t n_samples, double t_check, std::uint64_t seed,
                                  const GibbsTestOptions& options) {
  if (n_samples < 2) throw ArgumentError("Gibbs test needs at least 2 samples");
  if (observables.empty()) throw ArgumentError("Gibbs test needs at least one observable");
  double T = 0.0;
  if (options.sample_temperature) {
    T = *options.sample_temperature;
  } else {
    const auto& baths = model.topology().baths();
    if (baths.empty() || !model.equal_temperatures()) {
      throw ArgumentError("Gibbs invariance needs equal bath temperatures (or an explicit sample temperature)");
    }
    T = model.temperature(baths.front());
  }
  const GibbsSampler prototype(model, T);
  const auto [h, steps] = fit_step(t_check, options.h);
  const std::size_t K = observables.size();

  std::vector<double> before(n_samples * K), after(n_samples * K);
  std::vector<std::uint64_t> proposals(n_samples);
  parallel_for(n_samples, options.threads, [&](std::size_t i) {
    RngStream rng(seed, stream_index(0, static_cast<std::uint32_t>(i)));
    GibbsSampler sampler = prototype;
    const State z0 = sampler.sample(rng);
    proposals[i] = sampler.proposals();
    for (std::size_t k = 0; k < K; ++k) before[i * K + k] = observables[k].eval(model, z0);
    LangevinIntegrator integ(model, z0, h);
    for (std::uint64_t s = 0; s < steps; ++s) integ.step(rng);
    if (!integ.state().finite()) throw DiagnosticError("trajectory blew up in Gibbs invariance test");
    for (std::size_t k = 0; k < K; ++k) after[i * K + k] = observables[k].eval(model, integ.state());
  });

  GibbsReport report;
  report.temperature = T;
  report.method = prototype.method() == GibbsSampler::Method::ExactGaussian ? "exact_gaussian" : "rejection";
  report.samples = n_samples;
  report.t_check = t_check;
  std::uint64_t total_proposals = 0;
  for (auto p : proposals) total_proposals += p;
  report.acceptance_rate = static_cast<double>(n_samples) / static_cast<double>(total_proposals);
  if (report.acceptance_rate < GibbsSampler::kAcceptanceFloor) {
    throw DiagnosticError("rejection sampler acceptance rate fell below 1%");
  }
  std::vector<double> x0(n_samples), x1(n_samples), d(n_samples);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t i = 0; i < n_samples; ++i) {
      x0[i] = before[i * K + k];
      x1[i] = after[i * K + k];
      d[i] = x1[i] - x0[i];
    }
    ObservableShift s;
    s.name = observables[k].name;
    s.mean0 = mean_estimate(x0).mean;
    s.mean_t = mean_estimate(x1).mean;
    const MeanEstimate diff = mean_estimate(d);
    s.difference = diff.mean;
    s.se = diff.se;
    s.z = diff.se > 0.0 ? diff.mean / diff.se : 0.0;
    report.max_abs_z = std::max(report.max_abs_z, std::abs(s.z));
    report.observables.push_back(s);
  }
  return report;
}

}  // namespace oscnet
