#include "latlin/config.hpp"

#include "latlin/error.hpp"

#include <fstream>
#include <initializer_list>

namespace latlin {

namespace {

void expect_object(const Json& j, const std::string& where) {
  require(j.is_object(), ErrorCode::config, where + ": expected a JSON object");
}

void expect_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  expect_object(j, where);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    require(ok, ErrorCode::config, where + ": unknown key '" + it.key() + "'");
  }
}

const Json& at(const Json& j, const char* key, const std::string& where) {
  require(j.contains(key), ErrorCode::config, where + ": missing key '" + std::string(key) + "'");
  return j.at(key);
}

double number(const Json& j, const std::string& where) {
  require(j.is_number(), ErrorCode::config, where + ": expected a number");
  return j.get<double>();
}

double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j.at(key), where + "." + key) : fallback;
}

int integer_or(const Json& j, const char* key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  require(j.at(key).is_number_integer(), ErrorCode::config, where + "." + key + ": expected an integer");
  return j.at(key).get<int>();
}

std::vector<double> vector_of(const Json& j, const std::string& where) {
  require(j.is_array(), ErrorCode::config, where + ": expected an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(number(v, where));
  return out;
}

std::vector<double> vector_dim(const Json& j, int dim, const std::string& where) {
  if (j.is_number()) return std::vector<double>(dim, j.get<double>());
  auto v = vector_of(j, where);
  require(static_cast<int>(v.size()) == dim, ErrorCode::config,
          where + ": expected " + std::to_string(dim) + " entries");
  return v;
}

std::string string_of(const Json& j, const std::string& where) {
  require(j.is_string(), ErrorCode::config, where + ": expected a string");
  return j.get<std::string>();
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open config file '" + path + "'");
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::config, "config file '" + path + "' is not valid JSON: " + e.what());
  }
}

Box box_from_json(const Json& j, int dim) {
  expect_keys(j, {"lo", "hi"}, "box");
  Box b;
  b.lo = vector_dim(at(j, "lo", "box"), dim, "box.lo");
  b.hi = vector_dim(at(j, "hi", "box"), dim, "box.hi");
  for (int a = 0; a < dim; ++a) require(b.lo[a] < b.hi[a], ErrorCode::config, "box: lo must be below hi");
  return b;
}

Json box_to_json(const Box& b) { return {{"lo", b.lo}, {"hi", b.hi}}; }

Geometry geometry_from_json(const Json& j) {
  const std::string w = "lattice";
  expect_keys(j, {"dim", "basis", "omega", "omega_tilde", "margin_cells", "epsilon"}, w);
  Geometry g;
  g.dim = integer_or(j, "dim", 1, w);
  require(g.dim >= 1 && g.dim <= 3, ErrorCode::unsupported_dimension, "lattice.dim must be 1, 2 or 3");
  if (j.contains("basis")) {
    const Json& B = j.at("basis");
    require(B.is_array() && static_cast<int>(B.size()) == g.dim, ErrorCode::config,
            "lattice.basis: expected " + std::to_string(g.dim) + " rows");
    g.basis.resize(g.dim, g.dim);
    for (int r = 0; r < g.dim; ++r) {
      const auto row = vector_dim(B[r], g.dim, "lattice.basis row");
      for (int c = 0; c < g.dim; ++c) g.basis(r, c) = row[c];
    }
  } else {
    g.basis = Eigen::MatrixXd::Identity(g.dim, g.dim);
  }
  g.omega = j.contains("omega") ? box_from_json(j.at("omega"), g.dim) : Box::unit(g.dim);
  if (j.contains("omega_tilde")) g.omega_tilde = box_from_json(j.at("omega_tilde"), g.dim);
  g.margin_cells = number_or(j, "margin_cells", 2.0, w);
  return g;
}

Json geometry_to_json(const Geometry& g) {
  Json basis = Json::array();
  for (int r = 0; r < g.dim; ++r) {
    std::vector<double> row(g.dim);
    for (int c = 0; c < g.dim; ++c) row[c] = g.basis(r, c);
    basis.push_back(row);
  }
  Json j = {{"dim", g.dim}, {"basis", basis}, {"omega", box_to_json(g.omega)}, {"margin_cells", g.margin_cells}};
  if (g.omega_tilde) j["omega_tilde"] = box_to_json(*g.omega_tilde);
  return j;
}

ModelSpec model_from_json(const Json& j) {
  ModelSpec m;
  if (j.is_string()) {
    m.name = j.get<std::string>();
    m.params.clear();
    return m;
  }
  expect_keys(j, {"name", "params"}, "model");
  m.name = string_of(at(j, "name", "model"), "model.name");
  m.params.clear();
  if (j.contains("params")) {
    expect_object(j.at("params"), "model.params");
    for (auto it = j.at("params").begin(); it != j.at("params").end(); ++it) {
      m.params[it.key()] = number(it.value(), "model.params." + it.key());
    }
  }
  return m;
}

Json model_to_json(const ModelSpec& m) {
  Json p = Json::object();
  for (const auto& [k, v] : m.params) p[k] = v;
  return {{"name", m.name}, {"params", p}};
}

SmoothFieldSpec field_from_json(const Json& j, int dim) {
  const std::string w = "field";
  expect_keys(j, {"shape", "center", "radius", "amplitude", "frequency"}, w);
  SmoothFieldSpec f;
  f.shape = j.contains("shape") ? string_of(j.at("shape"), "field.shape") : "bump";
  f.center = j.contains("center") ? vector_dim(j.at("center"), dim, "field.center") : std::vector<double>(dim, 0.5);
  f.radius = j.contains("radius") ? vector_dim(j.at("radius"), dim, "field.radius") : std::vector<double>(dim, 0.4);
  f.amplitude =
      j.contains("amplitude") ? vector_dim(j.at("amplitude"), dim, "field.amplitude") : std::vector<double>(dim, 1.0);
  f.frequency = number_or(j, "frequency", 1.0, w);
  return f;
}

Json field_to_json(const SmoothFieldSpec& f) {
  return {{"shape", f.shape},
          {"center", f.center},
          {"radius", f.radius},
          {"amplitude", f.amplitude},
          {"frequency", f.frequency}};
}

DeltaRule delta_rule_from_json(const Json& j) {
  DeltaRule r;
  if (j.is_string()) {
    require(j.get<std::string>() == "equal", ErrorCode::config, "delta_rule: string form must be \"equal\"");
    return r;
  }
  expect_keys(j, {"kind", "p", "delta"}, "delta_rule");
  const std::string kind = string_of(at(j, "kind", "delta_rule"), "delta_rule.kind");
  if (kind == "equal") {
    r.kind = DeltaRule::Kind::equal;
  } else if (kind == "power") {
    r.kind = DeltaRule::Kind::power;
    r.value = number(at(j, "p", "delta_rule"), "delta_rule.p");
    require(r.value > 0.0, ErrorCode::config, "delta_rule.p must be positive");
  } else if (kind == "fixed") {
    r.kind = DeltaRule::Kind::fixed;
    r.value = number(at(j, "delta", "delta_rule"), "delta_rule.delta");
    require(r.value > 0.0, ErrorCode::config, "delta_rule.delta must be positive");
  } else {
    fail(ErrorCode::config, "delta_rule.kind must be equal, power or fixed");
  }
  return r;
}

Json delta_rule_to_json(const DeltaRule& r) {
  switch (r.kind) {
    case DeltaRule::Kind::equal: return {{"kind", "equal"}};
    case DeltaRule::Kind::power: return {{"kind", "power"}, {"p", r.value}};
    case DeltaRule::Kind::fixed: return {{"kind", "fixed"}, {"delta", r.value}};
  }
  return {};
}

CellQuadrature quadrature_from_json(const Json& j) {
  expect_keys(j, {"points_per_axis", "subdivisions"}, "quadrature");
  CellQuadrature q;
  q.points_per_axis = integer_or(j, "points_per_axis", q.points_per_axis, "quadrature");
  q.subdivisions = integer_or(j, "subdivisions", q.subdivisions, "quadrature");
  require(q.points_per_axis >= 1 && q.subdivisions >= 1, ErrorCode::config, "quadrature: counts must be >= 1");
  return q;
}

Json quadrature_to_json(const CellQuadrature& q) {
  return {{"points_per_axis", q.points_per_axis}, {"subdivisions", q.subdivisions}};
}

ExecutionMode mode_from_string(const std::string& s) {
  if (s == "audit") return ExecutionMode::audit;
  if (s == "fast") return ExecutionMode::fast;
  fail(ErrorCode::config, "mode must be 'audit' or 'fast', got '" + s + "'");
}

const char* to_string(ExecutionMode m) { return m == ExecutionMode::fast ? "fast" : "audit"; }

SweepSpec sweep_from_json(const Json& j) {
  expect_keys(j, {"lattice", "model", "physics", "sweep", "initial_data", "gateaux_fields", "quadrature", "tolerances"},
              "sweep config");
  SweepSpec s;
  s.geometry = geometry_from_json(at(j, "lattice", "sweep config"));
  const int d = s.geometry.dim;
  s.model = model_from_json(at(j, "model", "sweep config"));

  const Json& ph = at(j, "physics", "sweep config");
  expect_keys(ph, {"rho", "nu", "t_end", "integrator"}, "physics");
  s.rho = number_or(ph, "rho", s.rho, "physics");
  s.nu = number_or(ph, "nu", s.nu, "physics");
  s.t_end = number_or(ph, "t_end", s.t_end, "physics");
  if (ph.contains("integrator")) {
    s.integrator = integrator_from_string(string_of(ph.at("integrator"), "physics.integrator"));
  } else {
    s.integrator = s.rho == 0.0 ? Integrator::viscous_rk4 : Integrator::rk4;
  }

  const Json& sw = at(j, "sweep", "sweep config");
  expect_keys(sw,
              {"eps_seq", "delta_rule", "dt_factor", "stiff_dt_factor", "sample_interval", "audit_samples_per_interval", "spectral_modes",
               "reference_refinement", "mode"},
              "sweep");
  s.eps_seq = vector_of(at(sw, "eps_seq", "sweep"), "sweep.eps_seq");
  if (sw.contains("delta_rule")) s.delta_rule = delta_rule_from_json(sw.at("delta_rule"));
  s.dt_factor = number_or(sw, "dt_factor", s.dt_factor, "sweep");
  s.stiff_dt_factor = number_or(sw, "stiff_dt_factor", s.stiff_dt_factor, "sweep");
  s.sample_interval = number_or(sw, "sample_interval", s.sample_interval, "sweep");
  s.audit_samples_per_interval = integer_or(sw, "audit_samples_per_interval", s.audit_samples_per_interval, "sweep");
  s.spectral_modes = integer_or(sw, "spectral_modes", s.spectral_modes, "sweep");
  s.reference_refinement = integer_or(sw, "reference_refinement", s.reference_refinement, "sweep");
  if (sw.contains("mode")) s.mode = mode_from_string(string_of(sw.at("mode"), "sweep.mode"));

  const Json& init = at(j, "initial_data", "sweep config");
  expect_keys(init, {"w0", "w1"}, "initial_data");
  s.w0 = field_from_json(at(init, "w0", "initial_data"), d);
  if (init.contains("w1")) {
    s.w1 = field_from_json(init.at("w1"), d);
  } else {
    s.w1 = s.w0;
    s.w1.shape = "zero";
  }
  if (j.contains("gateaux_fields")) {
    require(j.at("gateaux_fields").is_array(), ErrorCode::config, "gateaux_fields: expected an array");
    for (const auto& f : j.at("gateaux_fields")) s.gateaux_fields.push_back(field_from_json(f, d));
  }
  if (j.contains("quadrature")) s.quadrature = quadrature_from_json(j.at("quadrature"));
  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    expect_keys(t, {"ac_ceiling", "edie_tolerance"}, "tolerances");
    s.ac_ceiling = number_or(t, "ac_ceiling", s.ac_ceiling, "tolerances");
    s.edie_tolerance = number_or(t, "edie_tolerance", s.edie_tolerance, "tolerances");
  }
  validate(s);
  return s;
}

Json sweep_to_json(const SweepSpec& s) {
  Json gf = Json::array();
  for (const auto& f : s.gateaux_fields) gf.push_back(field_to_json(f));
  return {{"lattice", geometry_to_json(s.geometry)},
          {"model", model_to_json(s.model)},
          {"physics", {{"rho", s.rho}, {"nu", s.nu}, {"t_end", s.t_end}, {"integrator", to_string(s.integrator)}}},
          {"sweep",
           {{"eps_seq", s.eps_seq},
            {"delta_rule", delta_rule_to_json(s.delta_rule)},
            {"dt_factor", s.dt_factor},
            {"stiff_dt_factor", s.stiff_dt_factor},
            {"sample_interval", s.sample_interval},
            {"audit_samples_per_interval", s.audit_samples_per_interval},
            {"spectral_modes", s.spectral_modes},
            {"reference_refinement", s.reference_refinement},
            {"mode", to_string(s.mode)}}},
          {"initial_data", {{"w0", field_to_json(s.w0)}, {"w1", field_to_json(s.w1)}}},
          {"gateaux_fields", gf},
          {"quadrature", quadrature_to_json(s.quadrature)},
          {"tolerances", {{"ac_ceiling", s.ac_ceiling}, {"edie_tolerance", s.edie_tolerance}}}};
}

SimulationRequest simulation_from_json(const Json& j) {
  expect_keys(j, {"lattice", "model", "delta_rule", "physics", "initial_data", "quadrature", "mode", "output"},
              "simulation config");
  SimulationRequest r;
  const Json& lat = at(j, "lattice", "simulation config");
  r.geometry = geometry_from_json(lat);
  r.epsilon = number(at(lat, "epsilon", "lattice"), "lattice.epsilon");
  require(r.epsilon > 0.0, ErrorCode::config, "lattice.epsilon must be positive");
  const int d = r.geometry.dim;
  r.model = model_from_json(at(j, "model", "simulation config"));
  if (j.contains("delta_rule")) r.delta_rule = delta_rule_from_json(j.at("delta_rule"));

  const Json& ph = at(j, "physics", "simulation config");
  expect_keys(ph,
              {"rho", "nu", "dt", "t_end", "integrator", "sample_every", "enforce_dt_bound", "on_instability",
               "implicit_tol", "implicit_max_newton", "implicit_max_cg"},
              "physics");
  SimulationConfig& c = r.config;
  c.rho = number_or(ph, "rho", c.rho, "physics");
  c.nu = number_or(ph, "nu", c.nu, "physics");
  c.t_end = number_or(ph, "t_end", c.t_end, "physics");
  c.dt = ph.contains("dt") ? number(ph.at("dt"), "physics.dt") : r.epsilon / 200.0;
  if (ph.contains("integrator")) {
    c.integrator = integrator_from_string(string_of(ph.at("integrator"), "physics.integrator"));
  } else {
    c.integrator = c.rho == 0.0 ? Integrator::viscous_rk4 : Integrator::rk4;
  }
  c.sample_every = integer_or(ph, "sample_every", c.sample_every, "physics");
  if (ph.contains("enforce_dt_bound")) {
    require(ph.at("enforce_dt_bound").is_boolean(), ErrorCode::config, "physics.enforce_dt_bound: expected bool");
    c.enforce_dt_bound = ph.at("enforce_dt_bound").get<bool>();
  }
  if (ph.contains("on_instability")) {
    const std::string p = string_of(ph.at("on_instability"), "physics.on_instability");
    require(p == "abort" || p == "truncate", ErrorCode::config, "physics.on_instability: abort or truncate");
    c.on_instability = p == "abort" ? InstabilityPolicy::abort : InstabilityPolicy::truncate;
  }
  c.implicit_tol = number_or(ph, "implicit_tol", c.implicit_tol, "physics");
  c.implicit_max_newton = integer_or(ph, "implicit_max_newton", c.implicit_max_newton, "physics");
  c.implicit_max_cg = integer_or(ph, "implicit_max_cg", c.implicit_max_cg, "physics");
  validate(c);

  const Json& init = at(j, "initial_data", "simulation config");
  expect_keys(init, {"w0", "w1"}, "initial_data");
  r.w0 = field_from_json(at(init, "w0", "initial_data"), d);
  if (init.contains("w1")) {
    r.w1 = field_from_json(init.at("w1"), d);
  } else {
    r.w1 = r.w0;
    r.w1.shape = "zero";
  }
  if (j.contains("quadrature")) r.quadrature = quadrature_from_json(j.at("quadrature"));
  if (j.contains("mode")) r.mode = mode_from_string(string_of(j.at("mode"), "mode"));
  if (j.contains("output")) {
    const Json& o = j.at("output");
    expect_keys(o, {"trajectory", "csv"}, "output");
    if (o.contains("trajectory")) r.trajectory_path = string_of(o.at("trajectory"), "output.trajectory");
    if (o.contains("csv")) r.csv_path = string_of(o.at("csv"), "output.csv");
  }
  return r;
}

Json simulation_to_json(const SimulationRequest& r) {
  Json lat = geometry_to_json(r.geometry);
  lat["epsilon"] = r.epsilon;
  const SimulationConfig& c = r.config;
  Json j = {{"lattice", lat},
            {"model", model_to_json(r.model)},
            {"delta_rule", delta_rule_to_json(r.delta_rule)},
            {"physics",
             {{"rho", c.rho},
              {"nu", c.nu},
              {"dt", c.dt},
              {"t_end", c.t_end},
              {"integrator", to_string(c.integrator)},
              {"sample_every", c.sample_every},
              {"enforce_dt_bound", c.enforce_dt_bound},
              {"on_instability", c.on_instability == InstabilityPolicy::abort ? "abort" : "truncate"},
              {"implicit_tol", c.implicit_tol},
              {"implicit_max_newton", c.implicit_max_newton},
              {"implicit_max_cg", c.implicit_max_cg}}},
            {"initial_data", {{"w0", field_to_json(r.w0)}, {"w1", field_to_json(r.w1)}}},
            {"quadrature", quadrature_to_json(r.quadrature)},
            {"mode", to_string(r.mode)}};
  Json out = Json::object();
  if (!r.trajectory_path.empty()) out["trajectory"] = r.trajectory_path;
  if (!r.csv_path.empty()) out["csv"] = r.csv_path;
  if (!out.empty()) j["output"] = out;
  return j;
}

RecoveryRequest recovery_from_json(const Json& j) {
  expect_keys(j, {"lattice", "model", "sweep", "fields", "quadrature"}, "recovery config");
  RecoveryRequest r;
  r.geometry = geometry_from_json(at(j, "lattice", "recovery config"));
  r.model = model_from_json(at(j, "model", "recovery config"));
  const Json& sw = at(j, "sweep", "recovery config");
  expect_keys(sw, {"eps_seq", "delta_rule"}, "sweep");
  r.eps_seq = vector_of(at(sw, "eps_seq", "sweep"), "sweep.eps_seq");
  require(!r.eps_seq.empty(), ErrorCode::config, "sweep.eps_seq must not be empty");
  for (std::size_t k = 0; k < r.eps_seq.size(); ++k) {
    require(r.eps_seq[k] > 0.0 && (k == 0 || r.eps_seq[k] < r.eps_seq[k - 1]), ErrorCode::config,
            "sweep.eps_seq must be positive and decreasing");
  }
  if (sw.contains("delta_rule")) r.delta_rule = delta_rule_from_json(sw.at("delta_rule"));
  const Json& f = at(j, "fields", "recovery config");
  require(f.is_array() && !f.empty(), ErrorCode::config, "fields: expected a non-empty array");
  for (const auto& x : f) r.fields.push_back(field_from_json(x, r.geometry.dim));
  if (j.contains("quadrature")) r.quadrature = quadrature_from_json(j.at("quadrature"));
  return r;
}

Json recovery_to_json(const RecoveryRequest& r) {
  Json f = Json::array();
  for (const auto& x : r.fields) f.push_back(field_to_json(x));
  return {{"lattice", geometry_to_json(r.geometry)},
          {"model", model_to_json(r.model)},
          {"sweep", {{"eps_seq", r.eps_seq}, {"delta_rule", delta_rule_to_json(r.delta_rule)}}},
          {"fields", f},
          {"quadrature", quadrature_to_json(r.quadrature)}};
}

}  // namespace latlin
