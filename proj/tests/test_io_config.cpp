#include "doctest.h"
#include "support.hpp"

#include "latlin/config.hpp"
#include "latlin/error.hpp"
#include "latlin/io.hpp"

#include <filesystem>
#include <fstream>

using namespace latlin;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "latlin_io_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::string config_path(const std::string& name) { return std::string(LATLIN_CONFIG_DIR) + "/" + name; }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal;
}

GridField sample_grid(int dim, int ncomp, Centering c) {
  GridField g = GridField::zeros(dim, ncomp, c, {5, dim > 1 ? 4 : 1, dim > 2 ? 3 : 1}, {-0.5, 0.25, 1.0},
                                 {0.125, 0.2, 0.3});
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = std::sin(0.37 * static_cast<double>(i)) / 3.0;
  return g;
}

void check_same(const GridField& a, const GridField& b) {
  CHECK(a.dim == b.dim);
  CHECK(a.ncomp == b.ncomp);
  CHECK(a.centering == b.centering);
  CHECK(a.shape == b.shape);
  for (int i = 0; i < a.dim; ++i) {
    CHECK(a.origin[i] == b.origin[i]);
    CHECK(a.spacing[i] == b.spacing[i]);
  }
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

SimulationRequest small_request() {
  SimulationRequest r;
  r.epsilon = 0.125;
  r.config.rho = 1.0;
  r.config.nu = 0.5;
  r.config.dt = 0.01;
  r.config.t_end = 0.2;
  r.config.sample_every = 5;
  r.w0.shape = "bump_sine";
  r.w0.center = {0.5};
  r.w0.radius = {0.4};
  r.w0.amplitude = {1.0};
  r.w1 = r.w0;
  r.w1.shape = "zero";
  return r;
}

}  // namespace

TEST_CASE("grid fields round-trip through CSV and binary") {
  for (int d : {1, 2, 3}) {
    for (int ncomp : {1, 2}) {
      for (Centering c : {Centering::node, Centering::cell}) {
        const GridField g = sample_grid(d, ncomp, c);
        const std::string csv = temp_path("grid.csv");
        const std::string bin = temp_path("grid.bin");
        write_grid_csv(g, csv);
        write_grid_binary(g, bin);
        check_same(g, read_grid_csv(csv));
        check_same(g, read_grid_binary(bin));
      }
    }
  }
}

TEST_CASE("binary readers reject wrong magic and missing files") {
  const std::string bad = temp_path("bad.bin");
  {
    std::ofstream out(bad, std::ios::binary);
    out << "NOTAGRID and some more bytes";
  }
  CHECK(code_of([&] { read_grid_binary(bad); }) == ErrorCode::io);
  CHECK(code_of([&] { read_trajectory_binary(bad); }) == ErrorCode::io);
  CHECK(code_of([&] { read_grid_binary(temp_path("does_not_exist.bin")); }) == ErrorCode::io);
  const std::string traj = temp_path("traj_for_grid.bin");
  const SimulationRequest r = small_request();
  const LatticePtr lat = Lattice::build(r.geometry.spec(r.epsilon));
  const EnergyParams p{r.epsilon, r.model.build(lat->Z()), lat, ExecutionMode::audit};
  const Trajectory tr = simulate(LatticeField(lat), LatticeField(lat), r.config, p);
  write_trajectory_binary(tr, r, traj);
  CHECK(code_of([&] { read_grid_binary(traj); }) == ErrorCode::io);
}

TEST_CASE("trajectory binary round trip keeps samples, metadata and the dissipation integral") {
  const SimulationRequest r = small_request();
  const LatticePtr lat = Lattice::build(r.geometry.spec(r.epsilon));
  const EnergyParams p{r.epsilon, r.model.build(lat->Z()), lat, ExecutionMode::audit};
  const auto w0 = make_smooth_field(r.w0);
  const LatticeField u0 = project(w0->value_fn(), r.geometry.omega, lat, {}, true);
  const Trajectory tr = simulate(u0, LatticeField(lat), r.config, p);
  const std::string path = temp_path("traj.bin");
  write_trajectory_binary(tr, r, path);
  const LoadedTrajectory L = read_trajectory_binary(path);

  CHECK(L.request.epsilon == r.epsilon);
  CHECK(L.request.model.name == r.model.name);
  CHECK(L.params.delta == p.delta);
  CHECK(L.params.lattice->num_points() == lat->num_points());
  CHECK(L.traj.dt_used == tr.dt_used);
  CHECK(L.traj.steps == tr.steps);
  CHECK(L.traj.aborted == tr.aborted);
  CHECK(L.traj.config.rho == tr.config.rho);
  CHECK(L.traj.config.nu == tr.config.nu);
  REQUIRE(L.traj.size() == tr.size());
  REQUIRE(L.traj.int_v2.size() == tr.int_v2.size());
  for (std::size_t s = 0; s < tr.size(); ++s) {
    CHECK(L.traj.times[s] == tr.times[s]);
    CHECK(L.traj.int_v2[s] == tr.int_v2[s]);
    CHECK(testing::max_abs_diff(L.traj.u[s], tr.u[s]) == 0.0);
    CHECK(testing::max_abs_diff(L.traj.v[s], tr.v[s]) == 0.0);
  }
  const EdieAudit a = edie_audit(tr, p);
  const EdieAudit b = edie_audit(L.traj, L.params);
  CHECK(a.substitution.max_relative_residual() == b.substitution.max_relative_residual());

  const std::string csv = temp_path("traj.csv");
  write_trajectory_csv(tr, a, csv);
  std::ifstream in(csv);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == static_cast<int>(tr.size()) + 1);
}

TEST_CASE("shipped configuration files parse") {
  for (const char* name : {"sweep_1d.json", "sweep_1d_viscous.json", "sweep_2d.json"}) {
    CAPTURE(name);
    const SweepSpec s = sweep_from_json(load_json_file(config_path(name)));
    CHECK_NOTHROW(validate(s));
    const SweepSpec back = sweep_from_json(sweep_to_json(s));
    CHECK(back.eps_seq == s.eps_seq);
    CHECK(back.rho == s.rho);
    CHECK(back.integrator == s.integrator);
    CHECK(back.gateaux_fields.size() == s.gateaux_fields.size());
  }
  const SweepSpec s1 = sweep_from_json(load_json_file(config_path("sweep_1d.json")));
  CHECK(s1.eps_seq == std::vector<double>{0.0625, 0.03125, 0.015625});
  CHECK(s1.delta_rule.kind == DeltaRule::Kind::equal);
  CHECK(s1.audit_samples_per_interval == 50);
  CHECK(s1.gateaux_fields.size() == 2);

  const SimulationRequest sim = simulation_from_json(load_json_file(config_path("simulate_1d.json")));
  CHECK(sim.epsilon == 0.03125);
  CHECK(sim.config.sample_every == 20);
  CHECK(sim.trajectory_path == "trajectory_1d.bin");
  const SimulationRequest sim_back = simulation_from_json(simulation_to_json(sim));
  CHECK(sim_back.config.dt == sim.config.dt);
  CHECK(sim_back.csv_path == sim.csv_path);

  const RecoveryRequest rec = recovery_from_json(load_json_file(config_path("recover_1d.json")));
  CHECK(rec.fields.size() == 3);
  CHECK(rec.eps_seq.size() == 4);
  CHECK(recovery_from_json(recovery_to_json(rec)).eps_seq == rec.eps_seq);
}

TEST_CASE("simulation config defaults") {
  Json j = load_json_file(config_path("simulate_1d.json"));
  j.erase("output");
  j.erase("delta_rule");
  j["physics"] = {{"rho", 0.0}};
  j["initial_data"].erase("w1");
  const SimulationRequest r = simulation_from_json(j);
  CHECK(r.config.dt == doctest::Approx(0.03125 / 200.0));
  CHECK(r.config.integrator == Integrator::viscous_rk4);
  CHECK(r.config.nu == 1.0);
  CHECK(r.config.t_end == 1.0);
  CHECK(r.delta_rule.kind == DeltaRule::Kind::equal);
  CHECK(r.w1.shape == "zero");
  CHECK(r.trajectory_path.empty());
  CHECK(r.mode == ExecutionMode::audit);
}

TEST_CASE("configuration errors") {
  const Json base = load_json_file(config_path("sweep_1d.json"));
  auto rejects = [](const Json& j) { return code_of([&] { sweep_from_json(j); }); };

  Json j = base;
  j["surprise"] = 1;
  CHECK(rejects(j) == ErrorCode::config);
  j = base;
  j["sweep"]["dt_factr"] = 0.1;
  CHECK(rejects(j) == ErrorCode::config);
  j = base;
  j["physics"]["integrator"] = "leapfrog";
  CHECK(rejects(j) == ErrorCode::config);
  j = base;
  j["lattice"]["omega"]["lo"] = Json::array({0.0, 0.0});
  CHECK(rejects(j) == ErrorCode::config);
  j = base;
  j["sweep"]["eps_seq"] = "fine";
  CHECK(rejects(j) == ErrorCode::config);
  j = base;
  j.erase("model");
  CHECK(rejects(j) == ErrorCode::config);
  j = base;
  j["sweep"]["mode"] = "turbo";
  CHECK(rejects(j) == ErrorCode::config);

  CHECK(code_of([] { load_json_file(temp_path("missing.json")); }) == ErrorCode::io);
  const std::string broken = temp_path("broken.json");
  {
    std::ofstream out(broken);
    out << "{ \"lattice\": ";
  }
  CHECK(code_of([&] { load_json_file(broken); }) == ErrorCode::config);
  CHECK(code_of([] { simulation_from_json(load_json_file(config_path("sweep_1d.json"))); }) == ErrorCode::config);
}

TEST_CASE("model, field and delta-rule JSON helpers round trip") {
  ModelSpec m;
  m.name = "cauchy_born_split";
  m.params = {{"mu", 0.7}, {"k", 1.2}};
  const ModelSpec m2 = model_from_json(model_to_json(m));
  CHECK(m2.name == m.name);
  CHECK(m2.params == m.params);

  SmoothFieldSpec f;
  f.shape = "bump_cos";
  f.center = {0.5, 0.4};
  f.radius = {0.3, 0.2};
  f.amplitude = {1.0, -0.5};
  f.frequency = 2.5;
  const SmoothFieldSpec f2 = field_from_json(field_to_json(f), 2);
  CHECK(f2.shape == f.shape);
  CHECK(f2.center == f.center);
  CHECK(f2.amplitude == f.amplitude);
  CHECK(f2.frequency == f.frequency);
  CHECK(code_of([&] { field_from_json(field_to_json(f), 1); }) == ErrorCode::config);

  DeltaRule r;
  r.kind = DeltaRule::Kind::power;
  r.value = 1.5;
  const DeltaRule r2 = delta_rule_from_json(delta_rule_to_json(r));
  CHECK(r2.kind == r.kind);
  CHECK(r2.value == r.value);

  CHECK(mode_from_string("fast") == ExecutionMode::fast);
  CHECK(std::string(to_string(ExecutionMode::audit)) == "audit");
}
