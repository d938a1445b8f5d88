#include "latlin/app.hpp"

#include "latlin/error.hpp"
#include "latlin/io.hpp"

#include <cmath>
#include <random>

namespace latlin {

namespace {

Json apriori_json(const AprioriReport& r) {
  Json b = Json::array();
  for (const auto& x : r.bounds) {
    b.push_back({{"name", x.name}, {"value", x.value}, {"bound", x.bound}, {"holds", x.holds}});
  }
  return {{"energy0", r.energy0}, {"bounds", b}, {"all_hold", r.all_hold()}};
}

Json audit_json(const Trajectory& traj, const EnergyParams& p, double tol) {
  const EdieAudit audit = edie_audit(traj, p);
  const AprioriReport ap = apriori_bounds(audit, traj.config);
  const double sub = audit.substitution.max_relative_residual();
  const double force = audit.force.max_relative_residual();
  Json assertions = Json::array();
  assertions.push_back({{"name", "trajectory reached t_end"}, {"passed", !traj.aborted}});
  assertions.push_back({{"name", "EDIE residual within tolerance"}, {"passed", sub <= tol}});
  assertions.push_back({{"name", "a-priori bounds hold"}, {"passed", ap.all_hold()}});
  bool ok = true;
  for (const auto& a : assertions) ok = ok && a["passed"].get<bool>();
  return {{"samples", traj.size()},
          {"dt_used", traj.dt_used},
          {"steps", traj.steps},
          {"aborted", traj.aborted},
          {"abort_reason", traj.abort_reason},
          {"edie",
           {{"substitution_max_relative_residual", sub},
            {"force_max_relative_residual", force},
            {"rhs", audit.substitution.rhs},
            {"tolerance", tol},
            {"dissipation_monotone",
             audit.substitution.dissipation_monotone() && audit.force.dissipation_monotone()}}},
          {"apriori", apriori_json(ap)},
          {"assertions", assertions},
          {"passed", ok}};
}

struct ModelSetup {
  Geometry geometry;
  ModelSpec model;
  Eigen::MatrixXd Z;
  ModelPtr built;
};

ModelSetup model_setup(const Json& request, std::initializer_list<const char*> extra) {
  require(request.is_object(), ErrorCode::config, "request: expected a JSON object");
  for (auto it = request.begin(); it != request.end(); ++it) {
    bool ok = it.key() == "model" || it.key() == "lattice";
    for (const char* e : extra) ok = ok || it.key() == e;
    require(ok, ErrorCode::config, "request: unknown key '" + it.key() + "'");
  }
  require(request.contains("model"), ErrorCode::config, "request: missing key 'model'");
  ModelSetup s;
  s.model = model_from_json(request.at("model"));
  if (request.contains("lattice")) {
    s.geometry = geometry_from_json(request.at("lattice"));
  } else {
    s.geometry.dim = s.model.name == "cauchy_born_split" ? 2 : 1;
    s.geometry.basis = Eigen::MatrixXd::Identity(s.geometry.dim, s.geometry.dim);
  }
  s.Z = corner_labels(s.geometry.dim, s.geometry.basis);
  s.built = s.model.build(s.Z);
  return s;
}

}  // namespace

Json app_simulate(const Json& config) {
  const SimulationRequest r = simulation_from_json(config);
  const LatticePtr lat = Lattice::build(r.geometry.spec(r.epsilon));
  EnergyParams p{r.delta_rule.delta(r.epsilon), r.model.build(lat->Z()), lat, r.mode};
  const SmoothFieldPtr w0 = make_smooth_field(r.w0);
  const SmoothFieldPtr w1 = make_smooth_field(r.w1);
  const LatticeField u0 = project(w0->value_fn(), r.geometry.omega, lat, r.quadrature, true);
  const LatticeField u1 = project(w1->value_fn(), r.geometry.omega, lat, r.quadrature, true);
  const Trajectory traj = simulate(u0, u1, r.config, p);
  Json out = audit_json(traj, p, 1e-6);
  out["lattice"] = {{"points", lat->num_points()}, {"cells", lat->num_cells()}, {"epsilon", r.epsilon}};
  out["delta"] = p.delta;
  out["final"] = {{"t", traj.times.back()},
                  {"norm_u", norm(traj.u.back())},
                  {"norm_v", norm(traj.v.back())},
                  {"energy", atomistic_energy(traj.u.back(), p)}};
  if (!r.trajectory_path.empty()) {
    write_trajectory_binary(traj, r, r.trajectory_path);
    out["trajectory"] = r.trajectory_path;
  }
  if (!r.csv_path.empty()) {
    write_trajectory_csv(traj, edie_audit(traj, p), r.csv_path);
    out["csv"] = r.csv_path;
  }
  return out;
}

Json app_converge(const Json& config, const std::string& out_dir) {
  const SweepSpec s = sweep_from_json(config);
  const ConvergenceReport rep = run_sweep(s);
  report_emit(rep, out_dir);
  Json a = Json::array();
  for (const auto& x : rep.assertions) a.push_back({{"name", x.name}, {"passed", x.passed}, {"detail", x.detail}});
  Json levels = Json::array();
  for (const auto& L : rep.levels) {
    levels.push_back({{"k", L.k},
                      {"eps", L.eps},
                      {"sup_ac_error", L.sup_ac_error},
                      {"edie_substitution", L.edie_substitution},
                      {"runtime_seconds", L.runtime_seconds}});
  }
  return {{"out", out_dir}, {"levels", levels}, {"assertions", a}, {"passed", rep.passed()}};
}

Json app_tensor(const Json& request) {
  const ModelSetup s = model_setup(request, {"skew_samples", "seed"});
  const int d = s.geometry.dim;
  const int samples = request.value("skew_samples", 100);
  const std::uint64_t seed = request.value("seed", 1);
  const ElasticityTensor C = elasticity_tensor(hessian_at_Z(*s.built), s.Z);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double skew = 0.0;
  for (int n = 0; n < samples; ++n) {
    Eigen::MatrixXd M(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) M(i, j) = g(rng);
    const Eigen::MatrixXd S = 0.5 * (M - M.transpose());
    skew = std::max(skew, C.contract(S).norm() / std::max(1.0, S.norm()));
  }
  const double tol = 1e-10 * std::max(1.0, C.max_abs());
  Json comps = Json::array();
  const Eigen::MatrixXd Cm = C.as_matrix();
  for (int r = 0; r < Cm.rows(); ++r) {
    std::vector<double> row(Cm.cols());
    for (int c = 0; c < Cm.cols(); ++c) row[c] = Cm(r, c);
    comps.push_back(row);
  }
  const bool ok = C.minor_asymmetry() <= tol && C.major_asymmetry() <= tol && skew <= tol;
  return {{"model", model_to_json(s.model)},
          {"dim", d},
          {"C", comps},
          {"symmetry",
           {{"minor_asymmetry", C.minor_asymmetry()},
            {"major_asymmetry", C.major_asymmetry()},
            {"max_skew_response", skew},
            {"skew_samples", samples},
            {"tolerance", tol}}},
          {"passed", ok}};
}

Json app_check_model(const Json& request) {
  const ModelSetup s = model_setup(request, {"trials", "seed"});
  const int trials = request.value("trials", 200);
  const std::uint64_t seed = request.value("seed", 1);
  const AssumptionReport r = check_assumptions(*s.built, trials, seed);
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"id", c.id},
                      {"description", c.description},
                      {"passed", c.passed},
                      {"metric", c.metric},
                      {"witness", c.witness}});
  }
  return {{"model", model_to_json(s.model)},
          {"dim", s.geometry.dim},
          {"trials", r.trials},
          {"seed", r.seed},
          {"checks", checks},
          {"fitted_gradient_constant", r.fitted_gradient_constant},
          {"passed", r.all_passed()}};
}

Json app_audit(const std::string& trajectory_path, double edie_tolerance) {
  const LoadedTrajectory L = read_trajectory_binary(trajectory_path);
  Json out = audit_json(L.traj, L.params, edie_tolerance);
  out["trajectory"] = trajectory_path;
  return out;
}

Json app_recover(const Json& config) {
  const RecoveryRequest r = recovery_from_json(config);
  const RecoveryReport rep = recovery_check(r.fields, r.eps_seq, r.geometry, r.model, r.delta_rule, r.quadrature);
  Json rows = Json::array();
  for (const auto& x : rep.rows) {
    rows.push_back({{"field", x.field},
                    {"k", x.k},
                    {"eps", x.eps},
                    {"delta", x.delta},
                    {"energy_atomistic", x.energy_atomistic},
                    {"energy_continuum", x.energy_continuum},
                    {"gap", x.gap},
                    {"grad_error", x.grad_error},
                    {"grad_sup", x.grad_sup},
                    {"continuum_grad_sup", x.continuum_grad_sup},
                    {"ratio", x.ratio}});
  }
  Json a = Json::array();
  for (const auto& x : rep.assertions) a.push_back({{"name", x.name}, {"passed", x.passed}, {"detail", x.detail}});
  return {{"rows", rows},
          {"fitted_constant", rep.fitted_constant},
          {"constant_bound", rep.constant_bound},
          {"assertions", a},
          {"passed", rep.passed()}};
}

}  // namespace latlin
