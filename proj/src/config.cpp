#include "oscnet/config.hpp"

#include "oscnet/gibbs_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace oscnet {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Command, const char*>, 7> kCommands{{
    {Command::Check, "check"},
    {Command::Simulate, "simulate"},
    {Command::EquilibriumTest, "equilibrium-test"},
    {Command::LyapunovScan, "lyapunov-scan"},
    {Command::DissipationScan, "dissipation-scan"},
    {Command::DecayFit, "decay-fit"},
    {Command::CounterexampleC4, "counterexample-c4"},
}};

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

/// Collects errors while walking the document. Every getter records the value
/// it settled on (given or default) into the echo object.
class Reader {
 public:
  std::vector<std::string> errors;

  void error(const std::string& path, const std::string& message) { errors.push_back(path + ": " + message); }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    error(path, "expected an object");
    return false;
  }

  void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    if (!j.is_object()) return;
    for (const auto& [key, value] : j.items()) {
      (void)value;
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
        error(path + "." + key, "unknown key (allowed: " + join(std::vector<std::string>(keys.begin(), keys.end()), ", ") +
                                    ")");
      }
    }
  }

  double real(const json& obj, const char* key, const std::string& path, double fallback, json& echo,
              const std::function<std::optional<std::string>(double)>& check = {}) {
    double value = fallback;
    if (obj.is_object() && obj.contains(key)) {
      const json& j = obj.at(key);
      if (!j.is_number()) {
        error(path + "." + key, "expected a number");
        echo[key] = fallback;
        return fallback;
      }
      value = j.get<double>();
    }
    if (!std::isfinite(value)) {
      error(path + "." + key, "must be finite");
    } else if (check) {
      if (auto msg = check(value)) error(path + "." + key, *msg);
    }
    echo[key] = value;
    return value;
  }

  std::optional<double> required_real(const json& obj, const char* key, const std::string& path, json& echo,
                                      const std::function<std::optional<std::string>(double)>& check = {}) {
    if (!obj.is_object() || !obj.contains(key)) {
      error(path + "." + key, "required");
      return std::nullopt;
    }
    return real(obj, key, path, 0.0, echo, check);
  }

  std::size_t count(const json& obj, const char* key, const std::string& path, std::size_t fallback, json& echo,
                    std::size_t minimum = 0) {
    std::size_t value = fallback;
    if (obj.is_object() && obj.contains(key)) {
      const json& j = obj.at(key);
      if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
        error(path + "." + key, "expected a non-negative integer");
      } else {
        value = j.get<std::size_t>();
      }
    }
    if (value < minimum) error(path + "." + key, "must be >= " + std::to_string(minimum));
    echo[key] = value;
    return value;
  }

  bool boolean(const json& obj, const char* key, const std::string& path, bool fallback, json& echo) {
    bool value = fallback;
    if (obj.is_object() && obj.contains(key)) {
      if (!obj.at(key).is_boolean()) {
        error(path + "." + key, "expected true or false");
      } else {
        value = obj.at(key).get<bool>();
      }
    }
    echo[key] = value;
    return value;
  }

  std::string string(const json& obj, const char* key, const std::string& path, const std::string& fallback,
                     json& echo) {
    std::string value = fallback;
    if (obj.is_object() && obj.contains(key)) {
      if (!obj.at(key).is_string()) {
        error(path + "." + key, "expected a string");
      } else {
        value = obj.at(key).get<std::string>();
      }
    }
    echo[key] = value;
    return value;
  }

  std::vector<double> real_list(const json& obj, const char* key, const std::string& path, json& echo) {
    std::vector<double> out;
    if (!obj.is_object() || !obj.contains(key)) {
      error(path + "." + key, "required");
      return out;
    }
    const json& j = obj.at(key);
    if (!j.is_array()) {
      error(path + "." + key, "expected a list of numbers");
      return out;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number() || !std::isfinite(j[i].get<double>())) {
        error(path + "." + key + "[" + std::to_string(i) + "]", "expected a finite number");
      } else {
        out.push_back(j[i].get<double>());
      }
    }
    echo[key] = out;
    return out;
  }
};

auto positive = [](double v) -> std::optional<std::string> {
  if (v > 0.0) return std::nullopt;
  return "must be > 0";
};

auto non_negative = [](double v) -> std::optional<std::string> {
  if (v >= 0.0) return std::nullopt;
  return "must be >= 0";
};

std::optional<Placement> parse_placement(const std::string& s) {
  if (s == "interaction") return Placement::Interaction;
  if (s == "pinning") return Placement::Pinning;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::optional<PotentialSpec> parse_potential(Reader& r, const json& j, std::size_t dim, const std::string& path,
                                             json& echo) {
  if (!r.object(j, path)) return std::nullopt;
  echo = json::object();
  const std::string family = r.string(j, "family", path, "", echo);
  try {
    if (family == "soft_power") {
      r.allow_keys(j, path, {"family", "degree"});
      const double degree = r.real(j, "degree", path, 2.0, echo);
      return PotentialSpec::soft_power(dim, degree);
    }
    if (family == "even_power") {
      r.allow_keys(j, path, {"family", "degree"});
      if (!j.contains("degree") || !j.at("degree").is_number_integer()) {
        r.error(path + ".degree", "even_power needs an integer degree");
        return std::nullopt;
      }
      const int degree = j.at("degree").get<int>();
      echo["degree"] = degree;
      return PotentialSpec::even_power(dim, degree);
    }
    if (family == "quadratic") {
      r.allow_keys(j, path, {"family", "stiffness"});
      const json k = j.contains("stiffness") ? j.at("stiffness") : json(1.0);
      echo["stiffness"] = k;
      if (k.is_number()) return PotentialSpec::isotropic_quadratic(dim, k.get<double>());
      std::vector<double> flat;
      if (!k.is_array() || k.size() != dim) {
        r.error(path + ".stiffness", "expected a number or a " + std::to_string(dim) + "x" + std::to_string(dim) +
                                         " matrix");
        return std::nullopt;
      }
      for (const auto& row : k) {
        if (!row.is_array() || row.size() != dim) {
          r.error(path + ".stiffness", "every row must have " + std::to_string(dim) + " entries");
          return std::nullopt;
        }
        for (const auto& v : row) {
          if (!v.is_number()) {
            r.error(path + ".stiffness", "entries must be numbers");
            return std::nullopt;
          }
          flat.push_back(v.get<double>());
        }
      }
      return PotentialSpec::quadratic(dim, std::move(flat));
    }
    if (family == "local_piece") {
      r.allow_keys(j, path, {"family", "terms", "shift"});
      const double shift = r.real(j, "shift", path, 0.0, echo);
      std::vector<Monomial> terms;
      const json t = j.contains("terms") ? j.at("terms") : json::array();
      if (!t.is_array() || t.empty()) {
        r.error(path + ".terms", "expected a non-empty list of {coefficient, powers}");
        return std::nullopt;
      }
      json terms_echo = json::array();
      for (std::size_t i = 0; i < t.size(); ++i) {
        const std::string tp = path + ".terms[" + std::to_string(i) + "]";
        if (!r.object(t[i], tp)) continue;
        r.allow_keys(t[i], tp, {"coefficient", "powers"});
        json te = json::object();
        Monomial m;
        m.coefficient = r.real(t[i], "coefficient", tp, 0.0, te);
        if (!t[i].contains("powers") || !t[i].at("powers").is_array()) {
          r.error(tp + ".powers", "expected a list of " + std::to_string(dim) + " exponents");
          continue;
        }
        for (const auto& p : t[i].at("powers")) {
          if (!p.is_number_integer()) {
            r.error(tp + ".powers", "exponents must be integers");
            break;
          }
          m.powers.push_back(p.get<int>());
        }
        te["powers"] = m.powers;
        terms_echo.push_back(te);
        terms.push_back(std::move(m));
      }
      echo["terms"] = terms_echo;
      return PotentialSpec::local_piece(dim, std::move(terms), shift);
    }
    r.error(path + ".family", "unknown family '" + family + "' (soft_power, even_power, quadratic, local_piece)");
  } catch (const ArgumentError& e) {
    r.error(path, e.what());
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::optional<NetworkTopology> parse_topology(Reader& r, const json& j, const std::string& path, json& echo) {
  if (!r.object(j, path)) return std::nullopt;
  echo = json::object();
  std::optional<NetworkTopology> topo;
  if (j.contains("fixture")) {
    r.allow_keys(j, path, {"fixture", "baths"});
    const std::string name = r.string(j, "fixture", path, "", echo);
    try {
      topo = builtin_fixture(name);
    } catch (const ArgumentError& e) {
      r.error(path + ".fixture", e.what());
      return std::nullopt;
    }
  } else {
    r.allow_keys(j, path, {"vertices", "edges", "baths"});
    std::vector<std::string> names;
    if (!j.contains("vertices")) {
      r.error(path + ".vertices", "required (a count or a list of names)");
      return std::nullopt;
    }
    const json& v = j.at("vertices");
    if (v.is_number_integer() && v.get<std::int64_t>() >= 1) {
      for (std::int64_t i = 0; i < v.get<std::int64_t>(); ++i) names.push_back("v" + std::to_string(i));
    } else if (v.is_array() && !v.empty()) {
      for (const auto& n : v) {
        if (!n.is_string()) {
          r.error(path + ".vertices", "vertex names must be strings");
          return std::nullopt;
        }
        names.push_back(n.get<std::string>());
      }
    } else {
      r.error(path + ".vertices", "expected a positive count or a non-empty list of names");
      return std::nullopt;
    }
    echo["vertices"] = names;
    auto lookup = [&](const json& n) -> std::optional<VertexId> {
      if (!n.is_string()) return std::nullopt;
      const auto it = std::find(names.begin(), names.end(), n.get<std::string>());
      if (it == names.end()) return std::nullopt;
      return static_cast<VertexId>(it - names.begin());
    };
    std::vector<Edge> edges;
    json edges_echo = json::array();
    const json e = j.contains("edges") ? j.at("edges") : json::array();
    if (!e.is_array()) r.error(path + ".edges", "expected a list of [a, b] name pairs");
    for (std::size_t i = 0; e.is_array() && i < e.size(); ++i) {
      const std::string ep = path + ".edges[" + std::to_string(i) + "]";
      if (!e[i].is_array() || e[i].size() != 2) {
        r.error(ep, "expected a pair [a, b]");
        continue;
      }
      const auto a = lookup(e[i][0]);
      const auto b = lookup(e[i][1]);
      if (!a || !b) {
        r.error(ep, "edge " + e[i].dump() + " references unknown vertex " + (a ? e[i][1] : e[i][0]).dump());
        continue;
      }
      edges.push_back({*a, *b});
      edges_echo.push_back(e[i]);
    }
    echo["edges"] = edges_echo;
    VertexSet baths;
    if (j.contains("baths")) {
      const json& b = j.at("baths");
      for (std::size_t i = 0; b.is_array() && i < b.size(); ++i) {
        if (const auto id = lookup(b[i])) {
          baths.push_back(*id);
        } else {
          r.error(path + ".baths[" + std::to_string(i) + "]", "unknown vertex " + b[i].dump());
        }
      }
      if (!b.is_array()) r.error(path + ".baths", "expected a list of vertex names");
    }
    std::sort(baths.begin(), baths.end());
    baths.erase(std::unique(baths.begin(), baths.end()), baths.end());
    try {
      topo = NetworkTopology(names.size(), edges, baths, names);
    } catch (const ArgumentError& ex) {
      r.error(path, ex.what());
      return std::nullopt;
    }
  }
  if (j.contains("fixture") && j.contains("baths")) {
    VertexSet baths;
    const json& b = j.at("baths");
    for (std::size_t i = 0; b.is_array() && i < b.size(); ++i) {
      const auto id = b[i].is_string() ? topo->find(b[i].get<std::string>()) : std::nullopt;
      if (id) {
        baths.push_back(*id);
      } else {
        r.error(path + ".baths[" + std::to_string(i) + "]", "unknown vertex " + b[i].dump());
      }
    }
    if (!b.is_array()) r.error(path + ".baths", "expected a list of vertex names");
    std::sort(baths.begin(), baths.end());
    baths.erase(std::unique(baths.begin(), baths.end()), baths.end());
    topo = topo->with_baths(baths);
  }
  json baths_echo = json::array();
  for (VertexId b : topo->baths()) baths_echo.push_back(topo->name(b));
  echo["baths"] = baths_echo;
  return topo;
}

std::optional<Model> parse_model(Reader& r, const json& j, json& echo) {
  const std::string path = "model";
  if (!r.object(j, path)) return std::nullopt;
  r.allow_keys(j, path, {"dimension", "topology", "baths", "bath_defaults", "pinning", "interaction"});
  echo = json::object();
  const std::size_t dim = r.count(j, "dimension", path, 1, echo, 1);

  json topo_echo;
  const auto topo = parse_topology(r, j.contains("topology") ? j.at("topology") : json(), path + ".topology", topo_echo);
  echo["topology"] = topo_echo;
  if (!topo || dim == 0) return std::nullopt;

  // Bath parameters: explicit per-bath entries over bath_defaults.
  json defaults_echo = json::object();
  const json defaults = j.contains("bath_defaults") ? j.at("bath_defaults") : json::object();
  r.object(defaults, path + ".bath_defaults");
  r.allow_keys(defaults, path + ".bath_defaults", {"gamma", "temperature"});
  const double g0 = r.real(defaults, "gamma", path + ".bath_defaults", 1.0, defaults_echo, positive);
  const double t0 = r.real(defaults, "temperature", path + ".bath_defaults", 1.0, defaults_echo, positive);
  const json given = j.contains("baths") ? j.at("baths") : json::object();
  r.object(given, path + ".baths");
  for (const auto& [name, value] : given.items()) {
    (void)value;
    const auto id = topo->find(name);
    if (!id || !topo->is_bath(*id)) r.error(path + ".baths." + name, "not a bath vertex of the topology");
  }
  std::vector<BathParams> bath_params;
  json baths_echo = json::object();
  for (VertexId b : topo->baths()) {
    const std::string name = topo->name(b);
    const std::string bp = path + ".baths." + name;
    const json entry = given.is_object() && given.contains(name) ? given.at(name) : json::object();
    r.object(entry, bp);
    r.allow_keys(entry, bp, {"gamma", "temperature"});
    json e = json::object();
    const double g = r.real(entry, "gamma", bp, g0, e, positive);
    const double t = r.real(entry, "temperature", bp, t0, e, positive);
    baths_echo[name] = e;
    bath_params.push_back({g, t});
  }
  echo["baths"] = baths_echo;

  // Pinning.
  std::vector<std::optional<PotentialSpec>> pinning(topo->vertex_count());
  {
    const std::string pp = path + ".pinning";
    json pin = j.contains("pinning") ? j.at("pinning") : json(nullptr);
    if (pin.is_object() && pin.contains("family")) pin = json{{"default", pin}};
    json pin_echo = json::object();
    if (!pin.is_null() && r.object(pin, pp)) {
      r.allow_keys(pin, pp, {"default", "per_vertex"});
      std::optional<PotentialSpec> def;
      pin_echo["default"] = nullptr;
      if (pin.contains("default") && !pin.at("default").is_null()) {
        json de;
        def = parse_potential(r, pin.at("default"), dim, pp + ".default", de);
        pin_echo["default"] = de;
      }
      std::fill(pinning.begin(), pinning.end(), def);
      json per_echo = json::object();
      const json per = pin.contains("per_vertex") ? pin.at("per_vertex") : json::object();
      if (r.object(per, pp + ".per_vertex")) {
        for (const auto& [name, value] : per.items()) {
          const auto id = topo->find(name);
          if (!id) {
            r.error(pp + ".per_vertex." + name, "unknown vertex");
            continue;
          }
          if (value.is_null()) {
            pinning[*id].reset();
            per_echo[name] = nullptr;
          } else {
            json ve;
            pinning[*id] = parse_potential(r, value, dim, pp + ".per_vertex." + name, ve);
            per_echo[name] = ve;
          }
        }
      }
      pin_echo["per_vertex"] = per_echo;
    } else {
      pin_echo = json{{"default", nullptr}, {"per_vertex", json::object()}};
    }
    echo["pinning"] = pin_echo;
  }

  // Interaction.
  const auto& edges = topo->edges();
  std::vector<std::optional<PotentialSpec>> interaction(edges.size());
  {
    const std::string ip = path + ".interaction";
    json in = j.contains("interaction") ? j.at("interaction") : json::object();
    if (in.is_object() && in.contains("family")) in = json{{"default", in}};
    json in_echo = json::object();
    const std::size_t errors_before = r.errors.size();
    if (r.object(in, ip)) {
      r.allow_keys(in, ip, {"default", "per_edge"});
      in_echo["default"] = nullptr;
      if (in.contains("default") && !in.at("default").is_null()) {
        json de;
        const auto def = parse_potential(r, in.at("default"), dim, ip + ".default", de);
        std::fill(interaction.begin(), interaction.end(), def);
        in_echo["default"] = de;
      }
      json per_echo = json::array();
      const json per = in.contains("per_edge") ? in.at("per_edge") : json::array();
      if (!per.is_array()) r.error(ip + ".per_edge", "expected a list of {edge, potential}");
      for (std::size_t i = 0; per.is_array() && i < per.size(); ++i) {
        const std::string ep = ip + ".per_edge[" + std::to_string(i) + "]";
        if (!r.object(per[i], ep)) continue;
        r.allow_keys(per[i], ep, {"edge", "potential"});
        const json& e = per[i].contains("edge") ? per[i].at("edge") : json();
        std::optional<std::size_t> index;
        if (e.is_array() && e.size() == 2 && e[0].is_string() && e[1].is_string()) {
          const auto a = topo->find(e[0].get<std::string>());
          const auto b = topo->find(e[1].get<std::string>());
          for (std::size_t k = 0; a && b && k < edges.size(); ++k) {
            if ((edges[k].a == *a && edges[k].b == *b) || (edges[k].a == *b && edges[k].b == *a)) index = k;
          }
        }
        if (!index) {
          r.error(ep + ".edge", "edge " + e.dump() + " is not an edge of the topology");
          continue;
        }
        json pe;
        interaction[*index] = parse_potential(r, per[i].contains("potential") ? per[i].at("potential") : json(),
                                              dim, ep + ".potential", pe);
        per_echo.push_back(json{{"edge", e}, {"potential", pe}});
      }
      in_echo["per_edge"] = per_echo;
    }
    echo["interaction"] = in_echo;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (!interaction[k] && r.errors.size() == errors_before) {
        r.error(ip, "edge " + topo->name(edges[k].a) + "-" + topo->name(edges[k].b) +
                        " has no interaction potential (set a default or a per_edge entry)");
      }
    }
  }
  if (!r.errors.empty()) return std::nullopt;

  std::vector<PotentialSpec> in_specs;
  for (auto& v : interaction) in_specs.push_back(*v);
  try {
    return Model(*topo, dim, pinning, in_specs, bath_params);
  } catch (const ArgumentError& e) {
    r.error(path, e.what());
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

InitialSpec parse_initial(Reader& r, const json& obj, const std::string& parent, const std::optional<Model>& model,
                          json& echo) {
  const std::string path = parent + ".initial";
  InitialSpec spec;
  json j = obj.is_object() && obj.contains("initial") ? obj.at("initial") : json{{"kind", "zero"}};
  json e = json::object();
  if (!r.object(j, path)) return spec;
  const std::string kind = r.string(j, "kind", path, "zero", e);
  if (kind == "zero") {
    r.allow_keys(j, path, {"kind"});
  } else if (kind == "energy") {
    r.allow_keys(j, path, {"kind", "energy", "placement"});
    spec.kind = InitialSpec::Kind::Energy;
    spec.energy = r.required_real(j, "energy", path, e, positive).value_or(1.0);
    const std::string pl = r.string(j, "placement", path, "interaction", e);
    if (const auto p = parse_placement(pl)) {
      spec.placement = *p;
    } else {
      r.error(path + ".placement", "expected interaction or pinning");
    }
    if (model) {
      const double base = hamiltonian(*model, State::zeros_like(*model)).H;
      if (!(spec.energy > base)) r.error(path + ".energy", "must exceed H at the origin (" + std::to_string(base) + ")");
    }
  } else if (kind == "explicit") {
    r.allow_keys(j, path, {"kind", "p", "q"});
    spec.kind = InitialSpec::Kind::Explicit;
    for (const char* key : {"p", "q"}) {
      auto& dest = key[0] == 'p' ? spec.p : spec.q;
      const json rows = j.contains(key) ? j.at(key) : json();
      const bool shape_ok = model && rows.is_array() && rows.size() == model->vertex_count() &&
                            std::all_of(rows.begin(), rows.end(), [&](const json& row) {
                              return row.is_array() && row.size() == model->dimension() &&
                                     std::all_of(row.begin(), row.end(), [](const json& x) {
                                       return x.is_number() && std::isfinite(x.get<double>());
                                     });
                            });
      if (!shape_ok) {
        if (model) {
          r.error(path + "." + key, "expected " + std::to_string(model->vertex_count()) + " rows of " +
                                        std::to_string(model->dimension()) + " finite numbers");
        }
        continue;
      }
      for (const auto& row : rows) {
        for (const auto& x : row) dest.push_back(x.get<double>());
      }
      e[key] = rows;
    }
  } else {
    r.error(path + ".kind", "expected zero, energy or explicit");
  }
  echo["initial"] = e;
  return spec;
}

/// Common degree of a family of potentials, if there is one.
std::optional<double> common_degree(const std::vector<const PotentialSpec*>& specs) {
  if (specs.empty()) return std::nullopt;
  const double d = specs.front()->degree();
  for (const auto* s : specs) {
    if (s->degree() != d) return std::nullopt;
  }
  return d;
}

void parse_rule(Reader& r, const json& j, const std::string& path, const Model& model, std::optional<double> t_star,
                double default_lambda, TimescaleRule& rule, json& echo) {
  std::vector<const PotentialSpec*> in, pin;
  for (const auto& v : model.interactions()) in.push_back(&v);
  for (const auto& u : model.pinnings()) {
    if (u) pin.push_back(&*u);
  }
  const auto li = common_degree(in);
  const auto lp = common_degree(pin);
  rule.lambda = r.real(j, "lambda", path, default_lambda, echo, positive);
  if (j.contains("li") || li) {
    rule.li = r.real(j, "li", path, li.value_or(2.0), echo);
  } else {
    r.error(path + ".li", "required: interaction degrees are mixed or absent");
  }
  if (j.contains("lp") || lp) {
    rule.lp = r.real(j, "lp", path, lp.value_or(2.0), echo);
  } else {
    r.error(path + ".lp", "required: pinning degrees are mixed or absent");
  }
  rule.t_star = t_star;
  try {
    rule.validate();
  } catch (const ArgumentError& e) {
    r.error(path, e.what());
  }
}

void check_grid(Reader& r, const std::vector<double>& grid, const std::string& path, const Model& model,
                std::size_t min_levels) {
  if (grid.size() < min_levels) r.error(path, "needs at least " + std::to_string(min_levels) + " energy levels");
  const double base = hamiltonian(model, State::zeros_like(model)).H;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      r.error(path, "energy levels must be positive and strictly increasing");
      return;
    }
    if (!(grid[i] > base)) {
      r.error(path, "energy level " + std::to_string(grid[i]) + " does not exceed H at the origin (" +
                        std::to_string(base) + ")");
      return;
    }
  }
}

void parse_experiment(Reader& r, const json& j, ExperimentConfig& cfg, json& echo) {
  const std::string path = "experiment";
  echo = json::object();
  echo["command"] = to_string(cfg.command);
  const auto& model = cfg.model;
  switch (cfg.command) {
    case Command::Check: {
      r.allow_keys(j, path, {"command", "ell", "rank_tolerance", "sphere_samples"});
      if (j.contains("ell")) {
        if (!j.at("ell").is_number_integer() || j.at("ell").get<int>() < 1 ||
            j.at("ell").get<int>() > kMaxNondegeneracyOrder) {
          r.error(path + ".ell", "must be an integer in [1, " + std::to_string(kMaxNondegeneracyOrder) + "]");
        } else {
          cfg.check.options.ell = j.at("ell").get<int>();
          echo["ell"] = *cfg.check.options.ell;
        }
      }
      cfg.check.options.rank_tolerance = r.real(j, "rank_tolerance", path, kDefaultRankTolerance, echo, positive);
      cfg.check.options.sphere_samples = static_cast<int>(r.count(j, "sphere_samples", path, 400, echo, 100));
      return;
    }
    case Command::Simulate: {
      r.allow_keys(j, path, {"command", "t_end", "initial"});
      cfg.simulate.t_end = r.real(j, "t_end", path, 10.0, echo, positive);
      cfg.simulate.initial = parse_initial(r, j, path, model, echo);
      return;
    }
    case Command::EquilibriumTest: {
      r.allow_keys(j, path, {"command", "test", "burn_in", "samples", "chains", "thin", "batches_per_chain",
                             "require_conditions", "observables", "t_check", "sample_temperature"});
      auto& p = cfg.equilibrium;
      const std::string test = r.string(j, "test", path, "moments", echo);
      if (test == "moments") {
        p.test = EquilibriumParams::Test::Moments;
        p.burn_in = r.real(j, "burn_in", path, 100.0, echo, non_negative);
        p.samples = r.count(j, "samples", path, 100000, echo, 1);
        p.moments.chains = r.count(j, "chains", path, 4, echo, 1);
        p.moments.thin = r.count(j, "thin", path, 10, echo, 1);
        p.moments.batches_per_chain = r.count(j, "batches_per_chain", path, 25, echo, 2);
        p.moments.require_conditions = r.boolean(j, "require_conditions", path, true, echo);
        if (p.samples < p.moments.chains * p.moments.batches_per_chain) {
          r.error(path + ".samples", "must be at least chains * batches_per_chain");
        }
        if (model && p.moments.require_conditions && !check_conditions(*model).all_hold()) {
          r.error(path + ".require_conditions",
                  "the model fails the standing conditions (run check); set false to override");
        }
      } else if (test == "gibbs") {
        p.test = EquilibriumParams::Test::Gibbs;
        p.samples = r.count(j, "samples", path, 10000, echo, 2);
        p.t_check = r.real(j, "t_check", path, 10.0, echo, positive);
        if (j.contains("sample_temperature")) {
          p.sample_temperature = r.real(j, "sample_temperature", path, 1.0, echo, positive);
        } else if (model && (model->topology().baths().empty() || !model->equal_temperatures())) {
          r.error(path + ".sample_temperature", "required when bath temperatures differ");
        }
        const json obs = j.contains("observables") ? j.at("observables") : json::array({"H"});
        if (!obs.is_array() || obs.empty()) r.error(path + ".observables", "expected a non-empty list of names");
        for (std::size_t i = 0; obs.is_array() && i < obs.size(); ++i) {
          if (!obs[i].is_string()) {
            r.error(path + ".observables[" + std::to_string(i) + "]", "expected a string");
            continue;
          }
          p.observables.push_back(obs[i].get<std::string>());
          if (model) {
            try {
              parse_observable(*model, p.observables.back());
            } catch (const ArgumentError& e) {
              r.error(path + ".observables[" + std::to_string(i) + "]", e.what());
            }
          }
        }
        echo["observables"] = p.observables;
        if (model) {
          try {
            GibbsSampler(*model, p.sample_temperature.value_or(model->t_max() > 0 ? model->t_max() : 1.0));
          } catch (const ArgumentError& e) {
            r.error(path, e.what());
          }
        }
      } else {
        r.error(path + ".test", "expected moments or gibbs");
      }
      return;
    }
    case Command::LyapunovScan: {
      r.allow_keys(j, path, {"command", "theta", "t_star", "ensemble", "energy_grid", "lambda", "li", "lp",
                             "placement"});
      auto& d = cfg.drift;
      d.theta = r.real(j, "theta", path, 0.25, echo, positive);
      if (model && !(d.theta * model->t_max() < 1.0)) {
        r.error(path + ".theta", "theta*T_max must be < 1 (theta=" + std::to_string(d.theta) +
                                     ", T_max=" + std::to_string(model->t_max()) + ")");
      }
      d.t_star = r.real(j, "t_star", path, 1.0, echo, positive);
      d.ensemble = r.count(j, "ensemble", path, 2000, echo, 100);
      d.energy_grid = r.real_list(j, "energy_grid", path, echo);
      const std::string pl = r.string(j, "placement", path, "interaction", echo);
      if (const auto p = parse_placement(pl)) {
        d.placement = *p;
      } else {
        r.error(path + ".placement", "expected interaction or pinning");
      }
      if (model) {
        check_grid(r, d.energy_grid, path + ".energy_grid", *model, 3);
        parse_rule(r, j, path, *model, d.t_star, d.t_star / 2.0, d.rule, echo);
      }
      d.h0 = cfg.h;
      d.energy_adaptive = cfg.energy_adaptive;
      return;
    }
    case Command::DissipationScan: {
      r.allow_keys(j, path, {"command", "epsilon", "ensemble", "energy_grid", "lambda", "li", "lp", "t_star",
                             "placement"});
      auto& d = cfg.dissipation;
      d.epsilon = r.real(j, "epsilon", path, 1e-3, echo, positive);
      d.ensemble = r.count(j, "ensemble", path, 1000, echo, 1);
      d.energy_grid = r.real_list(j, "energy_grid", path, echo);
      const double t_star = r.real(j, "t_star", path, 1.0, echo, positive);
      const std::string pl = r.string(j, "placement", path, "interaction", echo);
      if (const auto p = parse_placement(pl)) {
        d.placement = *p;
      } else {
        r.error(path + ".placement", "expected interaction or pinning");
      }
      if (model) {
        check_grid(r, d.energy_grid, path + ".energy_grid", *model, 1);
        parse_rule(r, j, path, *model, t_star, t_star / 2.0, d.rule, echo);
      }
      return;
    }
    case Command::DecayFit: {
      r.allow_keys(j, path, {"command", "observable", "horizon", "ensemble", "initial", "grid_dt",
                             "reference_time", "burn_in", "fit_from", "min_fit_points"});
      auto& d = cfg.decay;
      d.observable = r.string(j, "observable", path, "", echo);
      if (!j.contains("observable")) r.error(path + ".observable", "required");
      if (model && j.contains("observable")) {
        try {
          parse_observable(*model, d.observable);
        } catch (const ArgumentError& e) {
          r.error(path + ".observable", e.what());
        }
      }
      d.horizon = r.real(j, "horizon", path, 20.0, echo, positive);
      d.ensemble = r.count(j, "ensemble", path, 1000, echo, 2);
      d.initial = parse_initial(r, j, path, model, echo);
      d.options.h = cfg.h;
      d.options.grid_dt = r.real(j, "grid_dt", path, 0.1, echo, positive);
      if (d.options.grid_dt < cfg.h) r.error(path + ".grid_dt", "must be >= integrator.h");
      d.options.reference_time = r.real(j, "reference_time", path, 2.0e4, echo, positive);
      if (j.contains("burn_in")) d.options.burn_in = r.real(j, "burn_in", path, 0.0, echo, non_negative);
      d.options.fit_from = r.real(j, "fit_from", path, 0.0, echo, non_negative);
      d.options.min_fit_points = r.count(j, "min_fit_points", path, 5, echo, 2);
      return;
    }
    case Command::CounterexampleC4: {
      r.allow_keys(j, path, {"command", "t_end", "h"});
      cfg.counterexample.t_end = r.real(j, "t_end", path, 0.6, echo, positive);
      cfg.counterexample.h = r.real(j, "h", path, 1e-4, echo, positive);
      return;
    }
  }
}

std::string position(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& [cmd, n] : kCommands) {
    if (name == n) return cmd;
  }
  return std::nullopt;
}

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& entry : kCommands) out.emplace_back(entry.second);
  return out;
}

State build_initial(const Model& model, const InitialSpec& spec) {
  switch (spec.kind) {
    case InitialSpec::Kind::Zero: return State::zeros_like(model);
    case InitialSpec::Kind::Energy: return state_at_energy(model, spec.energy, spec.placement);
    case InitialSpec::Kind::Explicit: {
      State z = State::zeros_like(model);
      if (spec.p.size() != z.p.size() || spec.q.size() != z.q.size()) {
        throw ArgumentError("explicit initial state has the wrong shape");
      }
      z.p = spec.p;
      z.q = spec.q;
      return z;
    }
  }
  return State::zeros_like(model);
}

ConfigError::ConfigError(std::vector<std::string> errors)
    : ArgumentError("invalid configuration:\n  " + join(errors, "\n  ")), errors_(std::move(errors)) {}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string what = e.what();
    // Strip the library prefix; keep the reason.
    if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError({"syntax error at " + position(text, e.byte) + ": " + what});
  }
  Reader r;
  ExperimentConfig cfg;
  json echo = json::object();
  if (!doc.is_object()) throw ConfigError({"<root>: expected a JSON object"});
  r.allow_keys(doc, "<root>", {"seed", "model", "integrator", "experiment", "output"});

  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) {
      r.error("seed", "expected a non-negative 64-bit integer");
    } else {
      cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
  }
  echo["seed"] = cfg.seed;

  const json exp = doc.contains("experiment") ? doc.at("experiment") : json();
  std::optional<Command> command;
  if (!exp.is_object()) {
    r.error("experiment", "required object with a command");
  } else if (!exp.contains("command") || !exp.at("command").is_string()) {
    r.error("experiment.command", "required (one of " + join(command_names(), ", ") + ")");
  } else if (!(command = parse_command(exp.at("command").get<std::string>()))) {
    r.error("experiment.command",
            "unknown command '" + exp.at("command").get<std::string>() + "' (one of " + join(command_names(), ", ") + ")");
  }

  const json integ = doc.contains("integrator") ? doc.at("integrator") : json::object();
  json integ_echo = json::object();
  if (r.object(integ, "integrator")) {
    r.allow_keys(integ, "integrator", {"h", "energy_adaptive"});
    cfg.h = r.real(integ, "h", "integrator", 0.01, integ_echo, positive);
    cfg.energy_adaptive = r.boolean(integ, "energy_adaptive", "integrator", true, integ_echo);
  }
  echo["integrator"] = integ_echo;

  const json out = doc.contains("output") ? doc.at("output") : json::object();
  json out_echo = json::object();
  if (r.object(out, "output")) {
    r.allow_keys(out, "output", {"directory", "record_every", "keep_states"});
    cfg.output_directory = r.string(out, "directory", "output", "out", out_echo);
    cfg.record_every = r.count(out, "record_every", "output", 1, out_echo, 1);
    cfg.keep_states = r.boolean(out, "keep_states", "output", false, out_echo);
  }
  echo["output"] = out_echo;

  if (command == Command::CounterexampleC4) {
    if (doc.contains("model")) r.error("model", "counterexample-c4 uses its built-in model; remove this section");
  } else if (!doc.contains("model")) {
    r.error("model", "required");
  } else {
    json model_echo;
    cfg.model = parse_model(r, doc.at("model"), model_echo);
    echo["model"] = model_echo;
  }

  if (command) {
    cfg.command = *command;
    json exp_echo;
    // Checks that need the model are skipped when it failed to build.
    parse_experiment(r, exp, cfg, exp_echo);
    echo["experiment"] = exp_echo;
  }

  if (!r.errors.empty()) throw ConfigError(r.errors);
  cfg.echo = std::move(echo);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path + ": cannot open config file"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : config.echo.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace oscnet
