#include "doctest.h"
#include "support.hpp"

#include "latlin/config.hpp"
#include "latlin/convergence.hpp"
#include "latlin/error.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace latlin;

namespace {

SmoothFieldSpec field(const std::string& shape, double c, double r, double a, double freq = 1.0) {
  SmoothFieldSpec f;
  f.shape = shape;
  f.center = {c};
  f.radius = {r};
  f.amplitude = {a};
  f.frequency = freq;
  return f;
}

SweepSpec small_sweep() {
  SweepSpec s;
  s.eps_seq = {0.125, 0.0625};
  s.t_end = 0.5;
  s.sample_interval = 0.25;
  s.audit_samples_per_interval = 10;
  s.spectral_modes = 64;
  s.w0 = field("bump_sine", 0.5, 0.4, 1.0);
  s.w1 = field("bump", 0.5, 0.3, 0.5);
  s.gateaux_fields = {field("bump", 0.45, 0.35, 1.0)};
  return s;
}

std::string temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("latlin_test_" + name);
  std::filesystem::remove_all(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("strictly decreasing with a zero floor") {
  CHECK(strictly_decreasing({3.0, 2.0, 1.0}));
  CHECK_FALSE(strictly_decreasing({3.0, 3.0, 1.0}));
  CHECK_FALSE(strictly_decreasing({1.0, 2.0}));
  CHECK(strictly_decreasing({0.0, 0.0, 0.0}));
  CHECK(strictly_decreasing({1e-16, 1e-15}));
  CHECK_FALSE(strictly_decreasing({1e-16, 1e-3}));
  CHECK(strictly_decreasing({}));
  CHECK(strictly_decreasing({5.0}));
}

TEST_CASE("delta rules and sample times") {
  DeltaRule r;
  CHECK(r.delta(0.25) == 0.25);
  r.kind = DeltaRule::Kind::power;
  r.value = 2.0;
  CHECK(r.delta(0.25) == doctest::Approx(0.0625));
  r.kind = DeltaRule::Kind::fixed;
  r.value = 0.3;
  CHECK(r.delta(0.25) == 0.3);

  SweepSpec s = small_sweep();
  const auto t = s.sample_times();
  REQUIRE(t.size() == 3);
  CHECK(t[0] == 0.0);
  CHECK(t[1] == doctest::Approx(0.25));
  CHECK(t[2] == doctest::Approx(0.5));
}

TEST_CASE("sweep validation") {
  auto expect = [](const SweepSpec& s) {
    try {
      validate(s);
      FAIL("expected a config error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::config);
    }
  };
  validate(small_sweep());
  SweepSpec s = small_sweep();
  s.eps_seq = {0.0625, 0.125};
  expect(s);
  s = small_sweep();
  s.eps_seq.clear();
  expect(s);
  s = small_sweep();
  s.sample_interval = 0.3;
  expect(s);
  s = small_sweep();
  s.reference_refinement = 4;
  expect(s);
  s = small_sweep();
  s.audit_samples_per_interval = 0;
  expect(s);
}

TEST_CASE("zero initial data gives zero errors on every level") {
  SweepSpec s = small_sweep();
  s.w0 = field("zero", 0.5, 0.4, 0.0);
  s.w1 = field("zero", 0.5, 0.4, 0.0);
  const ConvergenceReport r = run_sweep(s);
  REQUIRE(r.levels.size() == 2);
  REQUIRE(r.rows.size() == 6);
  for (const auto& row : r.rows) {
    CHECK(row.ac_error == 0.0);
    CHECK(row.energy_atomistic == 0.0);
    CHECK(row.energy_continuum == 0.0);
    CHECK(row.grad_error == 0.0);
  }
  for (const auto& g : r.gateaux) {
    CHECK(g.atomistic == 0.0);
    CHECK(g.continuum == 0.0);
  }
  for (const auto& L : r.levels) {
    CHECK_FALSE(L.aborted);
    CHECK(L.edie_substitution == 0.0);
  }
}

TEST_CASE("small sweep: rows, levels and reference metadata") {
  const SweepSpec s = small_sweep();
  const ConvergenceReport r = run_sweep(s);
  REQUIRE(r.levels.size() == 2);
  CHECK(r.rows.size() == 6);
  CHECK(r.gateaux.size() == 6);
  CHECK(r.reference.kind == "spectral");
  CHECK(r.reference.modes == 64);
  for (const auto& L : r.levels) {
    CHECK_FALSE(L.aborted);
    CHECK(L.apriori_ok);
    CHECK(L.edie_substitution < 1e-6);
    // dt divides every comparison interval.
    const double q = s.sample_interval / L.dt;
    CHECK(std::abs(q - std::round(q)) < 1e-9);
  }
  CHECK(r.levels[1].sup_ac_error < r.levels[0].sup_ac_error);
  for (const auto& g : r.gateaux) CHECK(g.cell_sum == doctest::Approx(g.atomistic).epsilon(1e-10));
  CHECK_FALSE(r.assertions.empty());
  CHECK(r.tolerances.count("edie_tolerance") == 1);
}

TEST_CASE("report files: header-only on empty report and CSV round trip") {
  const std::string empty = temp_dir("empty_report");
  report_emit(ConvergenceReport{}, empty);
  CHECK(read_report_csv(empty + "/report.csv").empty());
  for (const char* f : {"gateaux.csv", "levels.csv"}) {
    const std::string text = slurp(empty + "/" + f);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  }

  SweepSpec s = small_sweep();
  ConvergenceReport r = run_sweep(s);
  r.config_echo = sweep_to_json(s).dump();
  const std::string dir = temp_dir("small_report");
  report_emit(r, dir);
  const auto rows = read_report_csv(dir + "/report.csv");
  REQUIRE(rows.size() == r.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].k == r.rows[i].k);
    CHECK(rows[i].eps == r.rows[i].eps);
    CHECK(rows[i].t == r.rows[i].t);
    CHECK(rows[i].ac_error == r.rows[i].ac_error);
    CHECK(rows[i].energy_error == r.rows[i].energy_error);
    CHECK(rows[i].grad_error == r.rows[i].grad_error);
  }

  const Json j = load_json_file(dir + "/summary.json");
  for (const char* key :
       {"schema", "config", "environment", "reference", "tolerances", "levels", "assertions", "passed"}) {
    CAPTURE(key);
    CHECK(j.contains(key));
  }
  CHECK(j["reference"]["kind"] == "spectral");
  CHECK(j["levels"].size() == 2);
  CHECK(j["passed"].get<bool>() == r.passed());
  CHECK(sweep_from_json(j["config"]).eps_seq == s.eps_seq);

  CHECK_THROWS_AS(read_report_csv(dir + "/missing.csv"), Error);
  CHECK_THROWS_AS(read_report_csv(dir + "/levels.csv"), Error);
}

TEST_CASE("gateaux pairing: Riesz identity and convergence to the continuum form") {
  const auto w = make_smooth_field(field("bump_sine", 0.5, 0.4, 1.0));
  const auto v = make_smooth_field(field("bump_cos", 0.55, 0.35, 1.0, 1.5));
  const Box omega = Box::unit(1);
  std::vector<double> gaps;
  for (double eps : {0.125, 0.0625, 0.03125}) {
    const auto lat = testing::unit_lattice(1, eps);
    const EnergyParams p{eps, harmonic_chain(1.0, lat->Z()), lat, ExecutionMode::audit};
    const ElasticityTensor C = elasticity_tensor(hessian_at_Z(*p.model), lat->Z());
    const LatticeField u = project(w->value_fn(), omega, lat, {}, true);
    const GateauxPair g = gateaux_consistency_check(u, p, *w, *v, C, omega);
    CHECK(g.cell_sum == doctest::Approx(g.atomistic).epsilon(1e-10));
    gaps.push_back(std::abs(g.atomistic - g.continuum));
  }
  CAPTURE(gaps[0]);
  CAPTURE(gaps[2]);
  CHECK(strictly_decreasing(gaps));
}

TEST_CASE("gradient error of the projection decreases and the sup stays bounded") {
  const auto w = make_smooth_field(field("bump_poly", 0.45, 0.35, 0.7));
  const Box omega = Box::unit(1);
  std::vector<double> err, sup;
  for (double eps : {0.125, 0.0625, 0.03125, 0.015625}) {
    const auto lat = testing::unit_lattice(1, eps);
    const LatticeField u = project(w->value_fn(), omega, lat, {}, true);
    err.push_back(gradient_error(u, *w));
    sup.push_back(gradient_sup(u));
  }
  CHECK(strictly_decreasing(err));
  const double smax = *std::max_element(sup.begin(), sup.end());
  const double smin = *std::min_element(sup.begin(), sup.end());
  CHECK(smax < 2.0 * smin);
}

TEST_CASE("recovery check on the zero field and on smooth fields") {
  Geometry g;
  ModelSpec m;
  const auto zero = recovery_check({field("zero", 0.5, 0.4, 0.0)}, {0.125, 0.0625}, g, m, DeltaRule{});
  for (const auto& row : zero.rows) {
    CHECK(row.energy_atomistic == 0.0);
    CHECK(row.energy_continuum == 0.0);
    CHECK(row.grad_error == 0.0);
    CHECK(row.grad_sup == 0.0);
  }

  const auto rep = recovery_check({field("bump", 0.5, 0.4, 1.0)}, {0.125, 0.0625, 0.03125}, g, m, DeltaRule{});
  CHECK(rep.rows.size() == 3);
  CHECK(rep.passed());
  CHECK(rep.fitted_constant <= rep.constant_bound);
  CHECK(rep.constant_bound == doctest::Approx(std::sqrt(2.0)));
}
