#include "oscnet/runner.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "oscnet/gaussian_oracle.hpp"

namespace oscnet {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

/// Tracks the files of one run so they can be inventoried or withdrawn.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  const fs::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& content, bool deterministic = true) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw DiagnosticError("cannot write " + (dir_ / name).string());
    if (std::find(all_.begin(), all_.end(), name) == all_.end()) all_.push_back(name);
    if (deterministic) {
      const auto it = std::find_if(files_.begin(), files_.end(), [&](const auto& f) { return f.first == name; });
      if (it == files_.end()) {
        files_.emplace_back(name, content);
      } else {
        it->second = content;
      }
    }
  }

  void withdraw() {
    std::error_code ec;
    for (const auto& name : all_) fs::remove(dir_ / name, ec);
  }

  json inventory() const {
    json list = json::array();
    for (const auto& [name, content] : files_) {
      if (name == "manifest.json") continue;
      list.push_back(json{{"name", name}, {"bytes", content.size()}, {"fnv1a", hex64(fnv1a(content))}});
    }
    return list;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& f : files_) out.push_back(f.first);
    return out;
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
  std::vector<std::string> all_;
};

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_double(values[i]);
    out_ << '\n';
  }
  void row(const std::string& label, const std::vector<double>& values) {
    out_ << label;
    for (double v : values) out_ << ',' << format_double(v);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::string trace_csv(const Trace& trace) {
  Csv csv({"t", "H", "Hc", "Hi", "Gamma", "M", "residual"});
  for (std::size_t i = 0; i < trace.size(); ++i) {
    csv.row({trace.times[i], trace.H[i], trace.Hc[i], trace.Hi[i], trace.Gamma[i], trace.M[i], trace.residual(i)});
  }
  return csv.str();
}

std::string states_csv(const Model& model, const Trace& trace) {
  std::vector<std::string> header{"t"};
  for (const char* kind : {"p", "q"}) {
    for (VertexId v = 0; v < model.vertex_count(); ++v) {
      for (std::size_t c = 0; c < model.dimension(); ++c) {
        header.push_back(std::string(kind) + "_" + model.topology().name(v) + "_" + std::to_string(c));
      }
    }
  }
  Csv csv(header);
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    std::vector<double> row{trace.times[i]};
    row.insert(row.end(), trace.states[i].p.begin(), trace.states[i].p.end());
    row.insert(row.end(), trace.states[i].q.begin(), trace.states[i].q.end());
    csv.row(row);
  }
  return csv.str();
}

json trace_summary(const Trace& trace) {
  double max_res = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) max_res = std::max(max_res, std::abs(trace.residual(i)));
  json j;
  j["records"] = trace.size();
  if (trace.size() > 0) {
    j["t_final"] = number(trace.times.back());
    j["H_initial"] = number(trace.H.front());
    j["H_final"] = number(trace.H.back());
    j["Hc_final"] = number(trace.Hc.back());
    j["Hi_final"] = number(trace.Hi.back());
    j["Gamma_final"] = number(trace.Gamma.back());
    j["M_final"] = number(trace.M.back());
  }
  j["max_abs_residual"] = number(max_res);
  j["injection_rate"] = number(trace.injection_rate);
  j["stream_index"] = trace.stream_index;
  return j;
}

json condition_json(const Model& model, const ConditionReport& c) {
  const auto& topo = model.topology();
  auto edge_name = [&](std::size_t e) { return topo.name(topo.edges()[e].a) + "-" + topo.name(topo.edges()[e].b); };
  json depth = json::object();
  for (VertexId v = 0; v < topo.vertex_count(); ++v) {
    depth[topo.name(v)] = c.control.depth[v] == kUncontrolled ? json(nullptr) : json(c.control.depth[v]);
  }
  json c2_edges = json::array();
  for (const auto& e : c.c2_edges) {
    c2_edges.push_back({{"edge", edge_name(e.edge)}, {"nondegenerate", e.nondegenerate}, {"ell", e.ell}, {"ranks", e.ranks}});
  }
  json c3 = json::array();
  for (const auto& p : c.c3_potentials) {
    c3.push_back({{"potential", p.label}, {"degree", p.degree}, {"min_limit", number(p.min_limit)}, {"coercive", p.coercive}});
  }
  json c4_edges = json::object();
  for (std::size_t e = 0; e < c.c4_edges.size(); ++e) c4_edges[edge_name(e)] = to_string(c.c4_edges[e]);
  json j;
  j["c1"] = c.c1;
  j["c2"] = c.c2;
  j["c3"] = c.c3;
  j["c4"] = to_string(c.c4);
  j["c5"] = c.c5;
  j["ca"] = c.ca;
  j["all_hold"] = c.all_hold();
  j["control"] = {{"controlled", c.control.controlled},
                  {"connected", c.control.connected},
                  {"max_depth", c.control.controlled ? json(c.control.max_depth()) : json(nullptr)},
                  {"depth", depth}};
  j["nondegeneracy"] = {{"sampled", true}, {"tolerance", c.c2_tolerance}, {"samples", c.c2_samples}, {"edges", c2_edges}};
  j["coercivity"] = {{"sampled", true}, {"potentials", c3}, {"notes", c.c3_notes}};
  j["c4_edges"] = c4_edges;
  j["degrees"] = {{"interaction", c.interaction_degree ? json(*c.interaction_degree) : json(nullptr)},
                  {"pinning", c.pinning_degree ? json(*c.pinning_degree) : json(nullptr)},
                  {"note", c.c5_note}};
  return j;
}

json estimate_json(const MeanEstimate& m) {
  return {{"mean", number(m.mean)}, {"se", number(m.se)}, {"count", m.count}};
}

// ---------------------------------------------------------------------------

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& options;
  Outputs& out;
  json& report;
  int status = kExitOk;
};

void run_check(Context& ctx) {
  const Model& model = *ctx.cfg.model;
  ctx.report["conditions"] = condition_json(model, check_conditions(model, ctx.cfg.check.options));
}

void run_simulate(Context& ctx) {
  const Model& model = *ctx.cfg.model;
  const auto& p = ctx.cfg.simulate;
  const State z0 = build_initial(model, p.initial);
  RngStream rng(ctx.cfg.seed, stream_index(0, 0));
  const RecordOptions rec{ctx.cfg.record_every, ctx.cfg.keep_states};
  Trace trace;
  try {
    trace = integrate(model, z0, p.t_end, ctx.cfg.h, rng, rec);
  } catch (const IntegrationBlowup& e) {
    trace = e.partial();
    ctx.report["partial"] = true;
    ctx.report["blowup_step"] = e.step();
    ctx.status = kExitNumerical;
  }
  ctx.report["trace"] = trace_summary(trace);
  ctx.report["h"] = ctx.cfg.h;
  ctx.out.write("trace_simulate.csv", trace_csv(trace));
  if (ctx.cfg.keep_states) ctx.out.write("trace_states.csv", states_csv(model, trace));
}

void run_equilibrium(Context& ctx) {
  const Model& model = *ctx.cfg.model;
  const auto& p = ctx.cfg.equilibrium;
  const auto& topo = model.topology();
  if (p.test == EquilibriumParams::Test::Moments) {
    MomentOptions opts = p.moments;
    opts.threads = ctx.options.threads;
    const MomentReport r = stationary_moment_test(model, p.burn_in, p.samples, ctx.cfg.h, ctx.cfg.seed, opts);
    json per_vertex = json::object();
    Csv csv({"vertex", "p2_mean", "p2_se"});
    for (VertexId v = 0; v < model.vertex_count(); ++v) {
      per_vertex[topo.name(v)] = estimate_json(r.p2[v]);
      csv.row(topo.name(v), {r.p2[v].mean, r.p2[v].se});
    }
    json j;
    j["test"] = "moments";
    j["samples"] = r.samples;
    j["chains"] = r.chains;
    j["batches"] = r.batches;
    j["p2_per_vertex"] = per_vertex;
    j["balance"] = {{"estimate", estimate_json(r.balance)},
                    {"target", number(r.balance_target)},
                    {"ratio", number(r.balance_ratio)},
                    {"n_eff", number(r.balance_n_eff)},
                    {"within_2_percent", std::abs(r.balance_ratio - 1.0) <= 0.02}};
    j["min_n_eff"] = number(r.min_n_eff);
    if (r.has_oracle) {
      j["oracle"] = {{"max_abs_z", number(r.max_abs_z)},
                     {"within_3_se", r.max_abs_z <= 3.0},
                     {"moments", matrix(r.moments)},
                     {"moment_se", matrix(r.moment_se)},
                     {"covariance", matrix(r.oracle)}};
    }
    ctx.report["equilibrium"] = j;
    ctx.out.write("trace_moments.csv", csv.str());
    return;
  }
  std::vector<Observable> obs;
  for (const auto& name : p.observables) obs.push_back(parse_observable(model, name));
  GibbsTestOptions opts;
  opts.sample_temperature = p.sample_temperature;
  opts.h = ctx.cfg.h;
  opts.threads = ctx.options.threads;
  const GibbsReport r = gibbs_invariance_test(model, obs, p.samples, p.t_check, ctx.cfg.seed, opts);
  json list = json::array();
  Csv csv({"observable", "mean0", "mean_t", "difference", "se", "z"});
  for (const auto& s : r.observables) {
    list.push_back({{"name", s.name},
                    {"mean0", number(s.mean0)},
                    {"mean_t", number(s.mean_t)},
                    {"difference", number(s.difference)},
                    {"se", number(s.se)},
                    {"z", number(s.z)}});
    csv.row(s.name, {s.mean0, s.mean_t, s.difference, s.se, s.z});
  }
  ctx.report["equilibrium"] = {{"test", "gibbs"},
                               {"temperature", r.temperature},
                               {"sampler", r.method},
                               {"acceptance_rate", number(r.acceptance_rate)},
                               {"samples", r.samples},
                               {"t_check", r.t_check},
                               {"observables", list},
                               {"max_abs_z", number(r.max_abs_z)},
                               {"within_3_se", r.max_abs_z <= 3.0}};
  ctx.out.write("trace_gibbs.csv", csv.str());
}

void run_lyapunov(Context& ctx) {
  const Model& model = *ctx.cfg.model;
  DriftConfig cfg = ctx.cfg.drift;
  cfg.threads = ctx.options.threads;
  const DriftReport r = drift_scan(model, cfg, ctx.cfg.seed);
  Csv csv({"H0", "mean", "se", "ci_low", "ci_high", "freq_A1", "freq_A2", "freq_A3", "blowups", "mean_gamma", "h",
           "steps"});
  json levels = json::array();
  for (const auto& l : r.levels) {
    csv.row({l.H0, l.mean, l.se, l.ci_low, l.ci_high, l.frequency(EventClass::A1), l.frequency(EventClass::A2),
             l.frequency(EventClass::A3), static_cast<double>(l.blowups), l.mean_gamma, l.h,
             static_cast<double>(l.steps)});
    levels.push_back({{"H0", l.H0},
                      {"mean", number(l.mean)},
                      {"se", number(l.se)},
                      {"ci95", {number(l.ci_low), number(l.ci_high)}},
                      {"ci_excludes_one", l.ci_excludes_one()},
                      {"events", {{"A1", l.counts[0]}, {"A2", l.counts[1]}, {"A3", l.counts[2]}}},
                      {"blowups", l.blowups},
                      {"mean_gamma", number(l.mean_gamma)},
                      {"ensemble", l.ensemble},
                      {"h", l.h},
                      {"steps", l.steps}});
  }
  json j;
  j["theta"] = cfg.theta;
  j["t_star"] = cfg.t_star;
  j["placement"] = to_string(cfg.placement);
  j["levels"] = levels;
  j["qualifying_levels"] = r.qualifying;
  j["inconclusive"] = r.inconclusive;
  j["grid_spans_decade"] = r.grid_spans_decade;
  j["c1"] = r.c1;
  j["conditions_hold"] = r.conditions_hold;
  if (!r.inconclusive) {
    j["fit"] = {{"slope", number(r.fit.slope)},
                {"intercept", number(r.fit.intercept)},
                {"r_squared", number(r.fit.r_squared)},
                {"points", r.fit.points},
                {"c1_estimate", number(r.c1_estimate)}};
  }
  if (r.exponent_fit) {
    j["exploratory_exponent"] = {{"exponent", number(r.exponent_fit->slope)}, {"r_squared", number(r.exponent_fit->r_squared)}};
  }
  ctx.report["drift"] = j;
  ctx.out.write("trace_levels.csv", csv.str());
  if (r.inconclusive) ctx.status = kExitInconclusive;
}

void run_dissipation(Context& ctx) {
  const Model& model = *ctx.cfg.model;
  const auto& p = ctx.cfg.dissipation;
  DissipationOptions opts;
  opts.h0 = ctx.cfg.h;
  opts.energy_adaptive = ctx.cfg.energy_adaptive;
  opts.threads = ctx.options.threads;
  Csv csv({"H0", "tau", "probability", "ci_low", "ci_high", "hits", "in_tilde_A", "blowups", "mean_gamma", "h", "steps"});
  json levels = json::array();
  std::vector<DissipationTail> tails;
  for (std::size_t k = 0; k < p.energy_grid.size(); ++k) {
    opts.stream_group = static_cast<std::uint32_t>(k);
    const State z0 = state_at_energy(model, p.energy_grid[k], p.placement);
    tails.push_back(dissipation_tail(model, z0, p.rule, p.epsilon, p.ensemble, ctx.cfg.seed, opts));
    const auto& t = tails.back();
    csv.row({t.H0, t.tau, t.probability, t.ci.low, t.ci.high, static_cast<double>(t.hits),
             static_cast<double>(t.in_tilde_A), static_cast<double>(t.blowups), t.mean_gamma, t.h,
             static_cast<double>(t.steps)});
    levels.push_back({{"H0", t.H0},
                      {"tau", t.tau},
                      {"probability", t.probability},
                      {"ci95", {t.ci.low, t.ci.high}},
                      {"hits", t.hits},
                      {"in_tilde_A", t.in_tilde_A},
                      {"blowups", t.blowups},
                      {"ensemble", t.ensemble},
                      {"mean_gamma", number(t.mean_gamma)},
                      {"h", t.h},
                      {"steps", t.steps}});
  }
  bool monotone = true;
  for (std::size_t k = 1; k < tails.size(); ++k) monotone = monotone && tails[k].ci.low <= tails[k - 1].ci.high;
  ctx.report["dissipation"] = {{"epsilon", p.epsilon},
                               {"lambda", p.rule.lambda},
                               {"placement", to_string(p.placement)},
                               {"levels", levels},
                               {"non_increasing_within_ci", monotone}};
  ctx.out.write("trace_levels.csv", csv.str());
}

void run_decay(Context& ctx) {
  const Model& model = *ctx.cfg.model;
  const auto& p = ctx.cfg.decay;
  DecayOptions opts = p.options;
  opts.threads = ctx.options.threads;
  const Observable obs = parse_observable(model, p.observable);
  const State z0 = build_initial(model, p.initial);
  const DecayFit f = observable_decay_fit(model, obs, z0, p.horizon, p.ensemble, ctx.cfg.seed, opts);
  Csv csv({"t", "mean", "se", "signal", "noise"});
  for (std::size_t k = 0; k < f.times.size(); ++k) csv.row({f.times[k], f.mean[k], f.se[k], f.signal[k], f.noise[k]});
  json j;
  j["observable"] = p.observable;
  j["ensemble"] = p.ensemble;
  j["horizon"] = p.horizon;
  j["reference"] = {{"mean", number(f.reference)}, {"se", number(f.reference_se)}, {"burn_in", f.burn_in}};
  j["inconclusive"] = f.inconclusive;
  if (!f.inconclusive) {
    j["rate"] = number(f.rate);
    j["fit"] = {{"r_squared", number(f.fit.r_squared)},
                {"points", f.fit.points},
                {"t_begin", f.times[f.fit_begin]},
                {"t_end", f.times[f.fit_end - 1]}};
  }
  if (model.all_quadratic()) {
    try {
      const GaussianOracle o = gaussian_stationary_covariance(model);
      j["oracle"] = {{"spectral_gap", o.spectral_gap()}, {"second_moment_rate", o.second_moment_rate()}};
    } catch (const DiagnosticError&) {
    }
  }
  ctx.report["decay"] = j;
  ctx.out.write("trace_decay.csv", csv.str());
  if (f.inconclusive) ctx.status = kExitInconclusive;
}

void run_counterexample(Context& ctx) {
  const auto& p = ctx.cfg.counterexample;
  const CounterexampleFixture fx = c4_counterexample();
  DeterministicOptions opts;
  opts.record = RecordOptions{ctx.cfg.record_every, true};
  const Trace trace = integrate_deterministic(fx.model, fx.initial, p.t_end, p.h, opts);

  const std::size_t n = fx.model.dimension();
  const auto q1_0 = fx.initial.q_of(0);
  double max_p1 = 0.0, max_dq1 = 0.0, max_force_dev = 0.0;
  bool inside = true, x2_monotone = true;
  std::size_t first_outside = trace.states.size();
  std::vector<double> dq(n);
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    const State& s = trace.states[i];
    double np = 0.0, nq = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      np += s.p_of(0)[c] * s.p_of(0)[c];
      nq += (s.q_of(0)[c] - q1_0[c]) * (s.q_of(0)[c] - q1_0[c]);
      dq[c] = s.q_of(1)[c] - s.q_of(0)[c];
    }
    max_p1 = std::max(max_p1, std::sqrt(np));
    max_dq1 = std::max(max_dq1, std::sqrt(nq));
    // Interaction force on oscillator 1 is +grad V(q2 - q1).
    const auto f = grad(fx.model.interaction(0), dq);
    const double dev = std::max({std::abs(f[0]), std::abs(f[1] - 1.0), std::abs(f[2])});
    max_force_dev = std::max(max_force_dev, dev);
    if (i > 0 && s.q_of(1)[0] > trace.states[i - 1].q_of(1)[0]) x2_monotone = false;
    if (inside && !fx.region.contains(s)) {
      inside = false;
      first_outside = i;
    }
  }
  ctx.report["counterexample"] = {
      {"description", fx.description},
      {"t_end", p.t_end},
      {"h", p.h},
      {"max_norm_p1", max_p1},
      {"max_norm_q1_displacement", max_dq1},
      {"max_interaction_force_deviation", max_force_dev},
      {"x2_initial", trace.states.front().q_of(1)[0]},
      {"x2_final", trace.states.back().q_of(1)[0]},
      {"x2_non_increasing", x2_monotone},
      {"inside_validity_region", inside},
      {"trace", trace_summary(trace)}};
  ctx.out.write("trace_counterexample.csv", trace_csv(trace));
  ctx.out.write("trace_states.csv", states_csv(fx.model, trace));
  if (!inside) {
    ctx.report["partial"] = true;
    ctx.report["left_validity_region_at"] = trace.times[first_outside];
    ctx.status = kExitNumerical;
  }
}

json manifest(const ExperimentConfig& cfg, const std::string& status, int exit_status, const json& files) {
  return {{"tool", "oscnet"},
          {"version", kToolVersion},
          {"command", to_string(cfg.command)},
          {"config_hash", hex64(config_hash(cfg))},
          {"seed", cfg.seed},
          {"config", cfg.echo},
          {"status", status},
          {"exit_status", exit_status},
          {"files", files},
          {"timing_file", "timing.json"}};
}

}  // namespace

RunResult run(ExperimentConfig config, const RunOptions& options) {
  if (options.seed) {
    config.seed = *options.seed;
    config.echo["seed"] = config.seed;
  }
  RunResult result;
  result.directory = options.output_directory ? fs::path(*options.output_directory) : fs::path(config.output_directory);
  std::error_code ec;
  fs::create_directories(result.directory, ec);
  if (ec) {
    result.exit_status = kExitValidation;
    result.message = "cannot create output directory " + result.directory.string() + ": " + ec.message();
    return result;
  }

  Outputs out(result.directory);
  out.write("manifest.json", manifest(config, "running", -1, json::array()).dump(2) + "\n");
  json report = {{"command", to_string(config.command)},
                 {"seed", config.seed},
                 {"config_hash", hex64(config_hash(config))},
                 {"partial", false}};
  Context ctx{config, options, out, report};

  const auto start = std::chrono::steady_clock::now();
  try {
    switch (config.command) {
      case Command::Check: run_check(ctx); break;
      case Command::Simulate: run_simulate(ctx); break;
      case Command::EquilibriumTest: run_equilibrium(ctx); break;
      case Command::LyapunovScan: run_lyapunov(ctx); break;
      case Command::DissipationScan: run_dissipation(ctx); break;
      case Command::DecayFit: run_decay(ctx); break;
      case Command::CounterexampleC4: run_counterexample(ctx); break;
    }
  } catch (const ArgumentError& e) {
    out.withdraw();
    result.exit_status = kExitValidation;
    result.message = e.what();
    return result;
  } catch (const IntegrationBlowup& e) {
    ctx.status = kExitNumerical;
    report["partial"] = true;
    report["error"] = e.what();
    report["blowup_step"] = e.step();
  } catch (const std::runtime_error& e) {  // DiagnosticError and other numerical failures
    ctx.status = kExitNumerical;
    report["partial"] = true;
    report["error"] = e.what();
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  out.write("report.json", report.dump(2) + "\n");
  out.write("timing.json", json{{"wall_seconds", wall}, {"threads", options.threads}}.dump(2) + "\n", false);
  const std::string status = ctx.status == kExitOk             ? "complete"
                             : ctx.status == kExitInconclusive ? "inconclusive"
                                                               : "partial";
  out.write("manifest.json", manifest(config, status, ctx.status, out.inventory()).dump(2) + "\n");

  result.exit_status = ctx.status;
  result.files = out.names();
  result.message = status;
  if (report.contains("error")) result.message += ": " + report["error"].get<std::string>();
  return result;
}

}  // namespace oscnet
