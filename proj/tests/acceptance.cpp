// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include "support.hpp"

#include "latlin/config.hpp"
#include "latlin/convergence.hpp"
#include "latlin/dynamics.hpp"
#include "latlin/error.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace latlin;

namespace {

// Pinned tolerances.
constexpr double kSbpTol = 1e-12;          // relative to |g| |grad v|
constexpr double kSbpSeconds = 10.0;
constexpr double kTensorTol = 1e-10;
constexpr double kChainTensorTol = 1e-12;  // |C - k|
constexpr double kForceTol = 1e-6;         // relative, central differences
constexpr double kForceStep = 1e-5;
constexpr double kModalTol = 1e-6;         // sup-norm over points and samples
constexpr double kEdieTol = 1e-6;          // relative to the ledger right-hand side
constexpr double kHalvingRatio = 3.5;
constexpr double kMonotoneFloor = 1e-14;   // I(t_s) <= I(t_{s-1}) + floor * max(1, I(t_{s-1}))
constexpr double kAcCeiling = 0.1;         // 1D sweeps, fraction of |P w0|
constexpr double k2dAcCeiling = 0.5;       // 2D smoke, fraction of |P w0|
constexpr double k2dSeconds = 900.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

int g_failures = 0;

void report(int id, const char* title, const Outcome& o) {
  std::printf("C%-2d %s  %s | %s\n", id, o.pass ? "PASS" : "FAIL", title, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++g_failures;
}

std::string config_path(const char* name) { return std::string(LATLIN_CONFIG_DIR) + "/" + name; }

double cell_norm(const CellField& g) {
  double s = 0.0;
  for (double x : g.values()) s += x * x;
  return std::sqrt(g.lattice()->cell_volume() * s);
}

double cell_inner(const CellField& g, const CellField& h) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.values().size(); ++i) s += g.values()[i] * h.values()[i];
  return g.lattice()->cell_volume() * s;
}

EnergyParams params_for(const LatticePtr& lat, const std::string& model, double delta) {
  ModelPtr W = model == "harmonic_chain" ? harmonic_chain(1.3, lat->Z()) : cauchy_born_split(0.8, 1.1, lat->Z());
  return EnergyParams{delta, W, lat, ExecutionMode::audit};
}

// ---------------------------------------------------------------------------

// Max of |(g, grad v) + (grad* g, v)| / (|g| |grad v|) over n pairs.
double sbp_worst(int d, double eps, int n, std::mt19937_64& rng) {
  const auto L = testing::unit_lattice(d, eps);
  double worst = 0.0;
  for (int t = 0; t < n; ++t) {
    const auto v = testing::random_field(L, rng);
    const auto g = testing::random_cells(L, rng);
    const CellField gv = discrete_gradient(v);
    const double lhs = cell_inner(g, gv) + inner_product(discrete_divergence(g), v);
    worst = std::max(worst, std::abs(lhs) / (cell_norm(g) * cell_norm(gv)));
  }
  return worst;
}

Outcome criterion_sbp() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  const auto t0 = Clock::now();
  double worst = 0.0;
  int pairs = 0;
  for (int d : {1, 2})
    for (double eps : {1.0 / 8, 1.0 / 16}) {
      worst = std::max(worst, sbp_worst(d, eps, 50, rng));
      pairs += 50;
    }
  const double secs = seconds_since(t0);
  o.require(pairs == 200, "200 pairs");
  o.require(worst <= kSbpTol, "relative defect " + fmt(worst) + " <= " + fmt(kSbpTol));
  o.require(secs < kSbpSeconds, "runtime " + fmt(secs) + " s < 10 s");
  o.note(std::to_string(pairs) + " pairs, worst relative defect " + fmt(worst) + ", " + fmt(secs) + " s");
  return o;
}

struct TensorStats {
  double minor = 0.0, major = 0.0, skew = 0.0;
};

TensorStats tensor_stats(const ElasticityTensor& C, int samples, std::mt19937_64& rng) {
  TensorStats s{C.minor_asymmetry(), C.major_asymmetry(), 0.0};
  std::normal_distribution<double> N;
  const int d = C.dim;
  for (int n = 0; n < samples; ++n) {
    Eigen::MatrixXd M(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) M(i, j) = N(rng);
    Eigen::MatrixXd S = 0.5 * (M - M.transpose());
    if (S.norm() > 0.0) S /= S.norm();
    s.skew = std::max(s.skew, C.contract(S).norm());
  }
  return s;
}

Outcome criterion_tensor() {
  Outcome o;
  std::mt19937_64 rng(7);
  const double k = 1.7;
  const Eigen::MatrixXd Z1 = corner_labels(1, Eigen::MatrixXd::Identity(1, 1));
  const ElasticityTensor C1 = elasticity_tensor(hessian_at_Z(*harmonic_chain(k, Z1)), Z1);
  const TensorStats s1 = tensor_stats(C1, 100, rng);
  o.require(std::abs(C1(0, 0, 0, 0) - k) <= kChainTensorTol, "chain C = k");
  o.require(s1.minor <= kTensorTol && s1.major <= kTensorTol && s1.skew <= kTensorTol, "chain symmetries");
  o.note("chain C = " + fmt(C1(0, 0, 0, 0)) + " (k = 1.7)");
  for (int d : {1, 2, 3}) {
    const Eigen::MatrixXd Z = corner_labels(d, Eigen::MatrixXd::Identity(d, d));
    const ElasticityTensor C = elasticity_tensor(hessian_at_Z(*cauchy_born_split(0.8, 1.1, Z)), Z);
    const TensorStats s = tensor_stats(C, 100, rng);
    const std::string tag = "cauchy-born d=" + std::to_string(d);
    o.require(s.minor <= kTensorTol, tag + " minor " + fmt(s.minor));
    o.require(s.major <= kTensorTol, tag + " major " + fmt(s.major));
    o.require(s.skew <= kTensorTol, tag + " |C:S| " + fmt(s.skew));
    o.note(tag + ": minor " + fmt(s.minor) + ", major " + fmt(s.major) + ", max |C:S| " + fmt(s.skew));
  }
  return o;
}

Outcome criterion_force(const std::vector<int>& dims_cb, bool with_chain) {
  Outcome o;
  std::mt19937_64 rng(99);
  std::vector<std::pair<int, std::string>> cases;
  if (with_chain) cases.push_back({1, "harmonic_chain"});
  for (int d : dims_cb) cases.push_back({d, "cauchy_born_split"});
  for (const auto& [d, model] : cases) {
    const double eps = 0.125;
    const auto L = testing::unit_lattice(d, eps);
    const EnergyParams p = params_for(L, model, eps);
    const auto u = testing::random_field(L, rng, 0.3 * eps);
    const auto f = atomistic_force(u, p);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const auto v = testing::random_field(L, rng);
      const double h = kForceStep;
      const double fd = (atomistic_energy(u + h * v, p) - atomistic_energy(u - h * v, p)) / (2.0 * h);
      const double an = inner_product(f, v);
      worst = std::max(worst, std::abs(fd - an) / std::abs(an));
    }
    const std::string tag = model + " d=" + std::to_string(d);
    o.require(worst <= kForceTol, tag + " relative error " + fmt(worst));
    o.note(tag + ": max relative error " + fmt(worst) + " over 50 directions");
  }
  return o;
}

// ---------------------------------------------------------------------------

struct ModalRun {
  double sup_error = 0.0;
  double edie = 0.0;
  bool apriori = true;
  bool energy_nonincreasing = true;
};

ModalRun modal_run(double rho, int n) {
  const double eps = 1.0 / 32;
  const auto L = testing::unit_lattice(1, eps);
  const EnergyParams p{eps, harmonic_chain(1.0, L->Z()), L, ExecutionMode::audit};
  SimulationConfig c;
  c.rho = rho;
  c.nu = 1.0;
  c.dt = eps / 200.0;
  c.t_end = 1.0;
  c.integrator = rho == 0.0 ? Integrator::viscous_rk4 : Integrator::rk4;
  c.sample_every = 8;
  const LatticeField phi = testing::sine_mode(L, n);
  const double a0 = 1.0, b0 = rho == 0.0 ? 0.0 : 0.5;
  const Trajectory tr = simulate(a0 * phi, b0 * phi, c, p);
  const double lambda = testing::chain_eigenvalue(1.0, eps, n);
  ModalRun r;
  for (std::size_t s = 0; s < tr.size(); ++s) {
    const double a = testing::modal_ode(rho, c.nu, lambda, a0, b0, tr.times[s]);
    r.sup_error = std::max(r.sup_error, testing::max_abs_diff(tr.u[s], a * phi));
  }
  const EdieAudit audit = edie_audit(tr, p);
  r.edie = audit.substitution.max_relative_residual();
  r.apriori = apriori_bounds(audit, c).all_hold() && !tr.aborted;
  const auto& pot = audit.substitution.potential;
  for (std::size_t s = 1; s < pot.size(); ++s) {
    if (pot[s] > pot[s - 1] + kMonotoneFloor * std::max(1.0, pot[s - 1])) r.energy_nonincreasing = false;
  }
  return r;
}

Outcome criterion_modal(const std::vector<double>& rhos, std::vector<ModalRun>* runs) {
  Outcome o;
  for (double rho : rhos)
    for (int n : {1, 3}) {
      const ModalRun r = modal_run(rho, n);
      if (runs) runs->push_back(r);
      const std::string tag = "rho=" + fmt(rho) + " n=" + std::to_string(n);
      o.require(r.sup_error <= kModalTol, tag + " sup error " + fmt(r.sup_error));
      o.note(tag + ": sup error " + fmt(r.sup_error));
    }
  return o;
}

// Force-route residuals for dt halving on a coarse lattice.
std::vector<double> halving_residuals(int d, const std::string& model, std::vector<double>* sub) {
  const double eps = 0.25;
  const auto L = testing::unit_lattice(d, eps);
  const EnergyParams p = params_for(L, model, eps);
  LatticeField u0(L), u1(L);
  for (Index q = 0; q < L->num_points(); ++q) {
    if (!L->in_omega(q)) continue;
    const auto x = L->point(q);
    double s1 = 1.0, s2 = 1.0;
    for (int a = 0; a < d; ++a) {
      s1 *= std::sin(M_PI * x[a]);
      s2 *= std::sin(2.0 * M_PI * x[a]);
    }
    for (int i = 0; i < d; ++i) {
      u0.at(q)[i] = 0.1 * (s1 + 0.4 * s2) / (i + 1);
      u1.at(q)[i] = 0.05 * s2;
    }
  }
  std::vector<double> frc;
  for (double dt : {0.1, 0.05, 0.025, 0.0125}) {
    SimulationConfig c;
    c.rho = 1.0;
    c.nu = 0.5;
    c.dt = dt;
    c.t_end = 2.0;
    c.integrator = Integrator::rk4;
    c.sample_every = 1;
    const Trajectory tr = simulate(u0, u1, c, p);
    const EdieAudit a = edie_audit(tr, p);
    frc.push_back(a.force.max_relative_residual());
    if (sub) sub->push_back(a.substitution.max_relative_residual());
  }
  return frc;
}

void check_halving(Outcome& o, const std::string& tag, const std::vector<double>& frc) {
  std::string seq;
  for (std::size_t i = 0; i < frc.size(); ++i) seq += (i ? ", " : "") + fmt(frc[i]);
  for (std::size_t i = 0; i + 1 < frc.size(); ++i)
    o.require(frc[i] / frc[i + 1] >= kHalvingRatio, tag + " halving ratio " + fmt(frc[i] / frc[i + 1]));
  o.note(tag + " force-route residuals under halving: " + seq);
}

// ---------------------------------------------------------------------------

const Assertion* find_assertion(const ConvergenceReport& r, const std::string& name) {
  for (const auto& a : r.assertions)
    if (a.name == name) return &a;
  return nullptr;
}

void require_assertion(Outcome& o, const ConvergenceReport& r, const std::string& name) {
  const Assertion* a = find_assertion(r, name);
  if (!a) {
    o.require(false, "missing assertion '" + name + "'");
    return;
  }
  o.require(a->passed, name + " (" + a->detail + ")");
}

struct Sweep {
  SweepSpec spec;
  ConvergenceReport report;
  double seconds = 0.0;
};

Sweep run_config(const char* name, double ceiling) {
  Sweep s;
  s.spec = sweep_from_json(load_json_file(config_path(name)));
  s.spec.ac_ceiling = ceiling;
  s.spec.edie_tolerance = kEdieTol;
  const auto t0 = Clock::now();
  s.report = run_sweep(s.spec);
  s.seconds = seconds_since(t0);
  return s;
}

std::string level_summary(const Sweep& s) {
  std::ostringstream os;
  os << "sup ac_error";
  for (const auto& L : s.report.levels) os << ' ' << fmt(L.sup_ac_error);
  os << " (|P w0| " << fmt(s.report.levels.back().initial_norm) << "), " << fmt(s.seconds) << " s";
  return os.str();
}

bool same_eps(const std::vector<double>& a, const std::vector<double>& b) { return a == b; }

Outcome criterion_solutions(const Sweep& s) {
  Outcome o;
  o.require(same_eps(s.spec.eps_seq, {1.0 / 16, 1.0 / 32, 1.0 / 64}), "eps sequence 1/16, 1/32, 1/64");
  o.require(s.spec.delta_rule.kind == DeltaRule::Kind::equal, "delta = eps");
  require_assertion(o, s.report, "no instability aborts");
  require_assertion(o, s.report, "sup_t ac_error strictly decreasing in k");
  require_assertion(o, s.report, "final sup ac_error below ceiling");
  o.note(level_summary(s));
  return o;
}

Outcome criterion_energy_gradient(const Sweep& s) {
  Outcome o;
  require_assertion(o, s.report, "energy_error strictly decreasing in k at every sample time");
  require_assertion(o, s.report, "grad_error strictly decreasing in k at every sample time");
  std::ostringstream os;
  for (const auto& r : s.report.rows)
    if (std::abs(r.t - s.spec.t_end) < 1e-12) os << " k" << r.k << ": " << fmt(r.energy_error) << "/" << fmt(r.grad_error);
  o.note("energy/grad error at t_end" + os.str());
  return o;
}

Outcome criterion_gateaux(const Sweep& s) {
  Outcome o;
  o.require(s.spec.gateaux_fields.size() == 2, "two test fields");
  for (int f = 0; f < 2; ++f) {
    require_assertion(o, s.report, "gateaux gap strictly decreasing in k (field " + std::to_string(f) + ")");
    require_assertion(o, s.report, "Riesz identity (dI, v)_eps = <dI, v> (field " + std::to_string(f) + ")");
  }
  std::ostringstream os;
  for (const auto& g : s.report.gateaux)
    if (std::abs(g.t - s.spec.t_end) < 1e-12) os << " f" << g.field << "k" << g.k << ": " << fmt(g.gap);
  o.note("gaps at t_end" + os.str());
  return o;
}

Outcome criterion_recovery() {
  Outcome o;
  const RecoveryRequest r = recovery_from_json(load_json_file(config_path("recover_1d.json")));
  o.require(same_eps(r.eps_seq, {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}), "eps sequence 1/8 .. 1/64");
  o.require(r.fields.size() == 3, "three test fields");
  const RecoveryReport rep = recovery_check(r.fields, r.eps_seq, r.geometry, r.model, r.delta_rule, r.quadrature);
  for (const auto& a : rep.assertions) o.require(a.passed, a.name + " (" + a.detail + ")");
  o.note("fitted c " + fmt(rep.fitted_constant) + " <= bound " + fmt(rep.constant_bound));
  std::ostringstream os;
  for (const auto& row : rep.rows)
    if (row.field == 0) os << ' ' << fmt(row.gap);
  o.note("field 0 energy gaps" + os.str());
  return o;
}

void sweep_energy_checks(Outcome& o, const Sweep& s, const std::string& tag) {
  double worst = 0.0;
  bool apriori = true;
  for (const auto& L : s.report.levels) {
    worst = std::max(worst, L.edie_substitution);
    apriori = apriori && L.apriori_ok;
  }
  o.require(worst <= kEdieTol, tag + " EDIE " + fmt(worst));
  o.require(apriori, tag + " a-priori bounds");
  o.note(tag + " sweep EDIE " + fmt(worst));
}

}  // namespace

int main() {
  try {
    std::printf("acceptance: tolerances sbp %g, tensor %g, force %g, modal %g, edie %g, halving %g\n", kSbpTol,
                kTensorTol, kForceTol, kModalTol, kEdieTol, kHalvingRatio);

    report(1, "summation by parts", criterion_sbp());
    report(2, "tensor symmetries", criterion_tensor());
    report(3, "force vs energy differences", criterion_force({1, 2}, true));

    std::vector<ModalRun> modal;
    report(4, "modal oracle", criterion_modal({0.0, 1.0}, &modal));

    const auto t_sweeps = Clock::now();
    const Sweep s1 = run_config("sweep_1d.json", kAcCeiling);
    const Sweep sv = run_config("sweep_1d_viscous.json", kAcCeiling);

    {
      Outcome o;
      double worst = 0.0;
      bool ap = true;
      for (const auto& r : modal) {
        worst = std::max(worst, r.edie);
        ap = ap && r.apriori;
      }
      o.require(worst <= kEdieTol, "modal EDIE " + fmt(worst));
      o.require(ap, "a-priori bounds on modal runs");
      o.note("modal runs EDIE " + fmt(worst));
      std::vector<double> sub;
      check_halving(o, "chain", halving_residuals(1, "harmonic_chain", &sub));
      o.require(sub.front() / sub.back() >= kHalvingRatio * kHalvingRatio * kHalvingRatio,
                "substitution route overall drop " + fmt(sub.front() / sub.back()));
      o.note("substitution route " + fmt(sub.front()) + " -> " + fmt(sub.back()));
      sweep_energy_checks(o, s1, "sweep_1d");
      sweep_energy_checks(o, sv, "sweep_1d_viscous");
      const SimulationRequest req = simulation_from_json(load_json_file(config_path("simulate_1d.json")));
      const LatticePtr lat = Lattice::build(req.geometry.spec(req.epsilon));
      const EnergyParams p{req.delta_rule.delta(req.epsilon), req.model.build(lat->Z()), lat, req.mode};
      const LatticeField u0 = project(make_smooth_field(req.w0)->value_fn(), req.geometry.omega, lat, req.quadrature);
      const LatticeField u1 = project(make_smooth_field(req.w1)->value_fn(), req.geometry.omega, lat, req.quadrature);
      const Trajectory tr = simulate(u0, u1, req.config, p);
      const EdieAudit a = edie_audit(tr, p);
      o.require(a.substitution.max_relative_residual() <= kEdieTol, "simulate_1d EDIE");
      o.require(apriori_bounds(a, req.config).all_hold(), "simulate_1d a-priori bounds");
      o.note("simulate_1d EDIE " + fmt(a.substitution.max_relative_residual()));
      report(5, "energy-dissipation identity and a-priori bounds", o);
    }

    report(6, "convergence of solutions (sweep_1d)", criterion_solutions(s1));
    report(7, "energy and gradient convergence (sweep_1d)", criterion_energy_gradient(s1));
    report(8, "recovery sequence", criterion_recovery());
    report(9, "Gateaux consistency (sweep_1d)", criterion_gateaux(s1));

    {
      Outcome o;
      o.require(sv.spec.rho == 0.0, "rho = 0");
      double worst_modal = 0.0, worst_edie = 0.0;
      bool mono = true, ap = true;
      for (int n : {1, 3}) {
        const ModalRun r = modal_run(0.0, n);
        worst_modal = std::max(worst_modal, r.sup_error);
        worst_edie = std::max(worst_edie, r.edie);
        mono = mono && r.energy_nonincreasing;
        ap = ap && r.apriori;
      }
      o.require(worst_modal <= kModalTol, "modal sup error " + fmt(worst_modal));
      o.require(worst_edie <= kEdieTol, "modal EDIE " + fmt(worst_edie));
      o.require(mono, "modal energy nonincreasing");
      o.require(ap, "modal a-priori bounds");
      sweep_energy_checks(o, sv, "viscous");
      const Outcome a = criterion_solutions(sv);
      const Outcome b = criterion_energy_gradient(sv);
      o.require(a.pass, "solutions: " + a.detail);
      o.require(b.pass, "energy/gradient: " + b.detail);
      require_assertion(o, sv.report, "energy nonincreasing in time (rho = 0)");
      require_assertion(o, sv.report, "a-priori bounds hold");
      o.note("modal sup error " + fmt(worst_modal) + ", " + level_summary(sv));
      report(10, "purely viscous regime", o);
    }
    std::printf("    (1D sweeps took %s s)\n", fmt(seconds_since(t_sweeps)).c_str());

    {
      Outcome o;
      const auto t0 = Clock::now();
      std::mt19937_64 rng(11);
      double sbp = 0.0;
      for (double eps : {1.0 / 8, 1.0 / 16}) sbp = std::max(sbp, sbp_worst(2, eps, 20, rng));
      o.require(sbp <= kSbpTol, "2D summation by parts " + fmt(sbp));
      const Eigen::MatrixXd Z = corner_labels(2, Eigen::MatrixXd::Identity(2, 2));
      const TensorStats ts = tensor_stats(elasticity_tensor(hessian_at_Z(*cauchy_born_split(1.0, 1.0, Z)), Z), 100, rng);
      o.require(ts.minor <= kTensorTol && ts.major <= kTensorTol && ts.skew <= kTensorTol, "2D tensor symmetries");
      const Outcome f = criterion_force({2}, false);
      o.require(f.pass, f.detail);
      check_halving(o, "2D cauchy-born", halving_residuals(2, "cauchy_born_split", nullptr));
      const Sweep s2 = run_config("sweep_2d.json", k2dAcCeiling);
      o.require(same_eps(s2.spec.eps_seq, {1.0 / 8, 1.0 / 16}), "eps = delta in {1/8, 1/16}");
      o.require(s2.spec.model.name == "cauchy_born_split", "Cauchy-Born model");
      sweep_energy_checks(o, s2, "sweep_2d");
      require_assertion(o, s2.report, "no instability aborts");
      require_assertion(o, s2.report, "sup_t ac_error strictly decreasing in k");
      require_assertion(o, s2.report, "final sup ac_error below ceiling");
      const double secs = seconds_since(t0);
      o.require(secs < k2dSeconds, "runtime " + fmt(secs) + " s < 900 s");
      o.note("sbp " + fmt(sbp) + ", " + level_summary(s2) + ", reference " + s2.report.reference.kind +
             " EDIE " + fmt(s2.report.reference.edie_residual) + ", total " + fmt(secs) + " s");
      report(11, "2D smoke (Cauchy-Born)", o);
    }
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 2;
  }
  std::printf("acceptance: %d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
