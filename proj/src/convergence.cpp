#include "latlin/convergence.hpp"

#include "latlin/config.hpp"
#include "latlin/error.hpp"
#include "latlin/quadrature.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace latlin {

double DeltaRule::delta(double eps) const {
  switch (kind) {
    case Kind::equal: return eps;
    case Kind::power: return std::pow(eps, value);
    case Kind::fixed: return value;
  }
  return eps;
}

LatticeSpec Geometry::spec(double eps) const {
  LatticeSpec s;
  s.dim = dim;
  s.basis = basis;
  s.epsilon = eps;
  s.omega = omega;
  if (omega_tilde) {
    s.omega_tilde = *omega_tilde;
  } else {
    double reach = 0.0;
    for (int a = 0; a < dim; ++a) reach = std::max(reach, basis.row(a).cwiseAbs().sum());
    const double m = margin_cells * eps * reach;
    s.omega_tilde = omega;
    for (int a = 0; a < dim; ++a) {
      s.omega_tilde.lo[a] -= m;
      s.omega_tilde.hi[a] += m;
    }
  }
  return s;
}

ModelPtr ModelSpec::build(const Eigen::MatrixXd& Z) const { return make_model(name, params, Z); }

std::vector<double> SweepSpec::sample_times() const {
  const long n = std::lround(t_end / sample_interval);
  std::vector<double> out;
  for (long j = 0; j <= n; ++j) out.push_back(static_cast<double>(j) * sample_interval);
  return out;
}

void validate(const SweepSpec& s) {
  require(!s.eps_seq.empty(), ErrorCode::config, "sweep: eps_seq must not be empty");
  for (std::size_t k = 0; k < s.eps_seq.size(); ++k) {
    require(s.eps_seq[k] > 0.0, ErrorCode::config, "sweep: eps must be positive");
    if (k > 0) require(s.eps_seq[k] < s.eps_seq[k - 1], ErrorCode::config, "sweep: eps_seq must decrease");
  }
  require(s.t_end > 0.0 && s.sample_interval > 0.0, ErrorCode::config, "sweep: t_end and sample_interval > 0");
  const double ratio = s.t_end / s.sample_interval;
  require(std::abs(ratio - std::round(ratio)) < 1e-9 * std::max(1.0, ratio), ErrorCode::config,
          "sweep: t_end must be a multiple of sample_interval");
  require(s.audit_samples_per_interval >= 1, ErrorCode::config, "sweep: audit_samples_per_interval >= 1");
  require(s.dt_factor > 0.0 && s.stiff_dt_factor > 0.0, ErrorCode::config, "sweep: dt factors must be positive");
  require(s.geometry.omega.dim() == s.geometry.dim, ErrorCode::config, "sweep: omega dimension");
  require(s.reference_refinement >= 8, ErrorCode::config,
          "sweep: the continuum reference needs h <= eps_min / 8 (reference_refinement >= 8)");
  SimulationConfig probe;
  probe.rho = s.rho;
  probe.nu = s.nu;
  probe.t_end = s.t_end;
  probe.integrator = s.integrator;
  validate(probe);
}

bool strictly_decreasing(const std::vector<double>& x, double floor) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i - 1] <= floor && x[i] <= floor) continue;
    if (!(x[i] < x[i - 1])) return false;
  }
  return true;
}

bool ConvergenceReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

bool RecoveryReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

namespace {

FieldFunction extended_gradient(const SmoothField& w, const Box& omega) {
  return [&w, &omega](std::span<const double> x, std::span<double> out) {
    if (omega.contains(x)) {
      w.gradient(x, out);
    } else {
      std::fill(out.begin(), out.end(), 0.0);
    }
  };
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string join(const std::vector<double>& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + fmt(x[i]);
  return s;
}

ElasticityTensor tensor_for(const Geometry& g, const ModelSpec& m) {
  const Eigen::MatrixXd Z = corner_labels(g.dim, g.basis);
  const ModelPtr model = m.build(Z);
  return elasticity_tensor(hessian_at_Z(*model), Z);
}

}  // namespace

double gradient_error(const LatticeField& u, const SmoothField& w, const CellQuadrature& rule) {
  const Lattice& lat = *u.lattice();
  const int d = lat.dim();
  const int n = lat.corners();
  const Box& omega = lat.spec().omega;
  const CellField g = discrete_gradient(u);
  const FieldFunction grad = extended_gradient(w, omega);
  const Eigen::MatrixXd& Z = lat.Z();
  std::vector<double> mean(d * d);
  double sum = 0.0;
  for (Index c = 0; c < lat.num_cells(); ++c) {
    cell_mean(lat, lat.point(lat.cell_corner(c, 0)), grad, d * d, rule, mean);
    Eigen::MatrixXd G(d, d);
    for (int i = 0; i < d; ++i)
      for (int p = 0; p < d; ++p) G(i, p) = mean[i * d + p];
    const Eigen::MatrixXd diff = g.cell(c) - G * Z;
    (void)n;
    sum += diff.squaredNorm();
  }
  return std::sqrt(lat.cell_volume() * sum);
}

double gradient_sup(const LatticeField& u) {
  const CellField g = discrete_gradient(u);
  double m = 0.0;
  for (Index c = 0; c < g.size(); ++c) m = std::max(m, g.cell(c).norm());
  return m;
}

GateauxPair gateaux_consistency_check(const LatticeField& u, const EnergyParams& p, const SmoothField& w,
                                      const SmoothField& v, const ElasticityTensor& C, const Box& omega,
                                      const CellQuadrature& rule) {
  GateauxPair out;
  const LatticeField vk = project(v.value_fn(), omega, p.lattice, rule, true);
  out.atomistic = inner_product(atomistic_force(u, p), vk);
  const CellField g = cell_stress(u, p);
  const CellField gv = discrete_gradient(vk);
  double s = 0.0;
  for (std::size_t i = 0; i < g.values().size(); ++i) s += g.values()[i] * gv.values()[i];
  out.cell_sum = p.lattice->cell_volume() * s;
  out.continuum = continuum_bilinear(w, v, C, omega);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Continuum reference at the comparison times.
struct Reference {
  std::vector<SmoothFieldPtr> snapshots;
  std::vector<double> energies;
  ReferenceInfo info;
};

Reference continuum_reference(const SweepSpec& s, const ElasticityTensor& C, const SmoothFieldPtr& w0,
                              const SmoothFieldPtr& w1) {
  ContinuumProblem pr;
  pr.C = C;
  pr.rho = s.rho;
  pr.nu = s.nu;
  pr.omega = s.geometry.omega;
  pr.w0 = w0;
  pr.w1 = w1;
  pr.t_end = s.t_end;
  const auto times = s.sample_times();
  Reference ref;
  if (s.geometry.dim == 1) {
    const SpectralSolution1D sol = solve_1d_spectral(pr, s.spectral_modes);
    ref.info.kind = "spectral";
    ref.info.modes = sol.modes();
    for (double t : times) {
      ref.snapshots.push_back(sol.snapshot(t));
      ref.energies.push_back(sol.energy(t));
    }
    return ref;
  }
  FdOptions opt;
  const double h = s.eps_seq.back() / s.reference_refinement;
  for (int a = 0; a < s.geometry.dim; ++a) {
    const double L = s.geometry.omega.hi[a] - s.geometry.omega.lo[a];
    opt.cells[a] = static_cast<Index>(std::ceil(L / h - 1e-9));
    require(opt.cells[a] <= 4096, ErrorCode::resolution_budget, "continuum reference grid too fine");
  }
  opt.snapshot_times = times;
  const FdSolution sol = solve_fd(pr, opt);
  ref.info.kind = "finite_difference";
  ref.info.cells = opt.cells;
  ref.info.dt = sol.dt;
  ref.info.edie_residual = sol.max_relative_edie_residual();
  for (std::size_t j = 0; j < times.size(); ++j) {
    ref.snapshots.push_back(sol.snapshot(j));
    ref.energies.push_back(sol.potential[j]);
  }
  return ref;
}

}  // namespace

ConvergenceReport run_sweep(const SweepSpec& s) {
  validate(s);
  ConvergenceReport report;
  report.config_echo = sweep_to_json(s).dump();
  report.tolerances = {{"ac_ceiling", s.ac_ceiling},
                       {"edie_tolerance", s.edie_tolerance},
                       {"decrease_floor", 1e-14},
                       {"riesz_tolerance", 1e-10}};

  const int d = s.geometry.dim;
  const ElasticityTensor C = tensor_for(s.geometry, s.model);
  const SmoothFieldPtr w0 = make_smooth_field(s.w0);
  const SmoothFieldPtr w1 = make_smooth_field(s.w1);
  require(w0->dim() == d && w1->dim() == d, ErrorCode::config, "sweep: initial data dimension");
  std::vector<SmoothFieldPtr> vfields;
  for (const auto& f : s.gateaux_fields) {
    vfields.push_back(make_smooth_field(f));
    require(vfields.back()->dim() == d, ErrorCode::config, "sweep: gateaux field dimension");
  }
  const Reference ref = continuum_reference(s, C, w0, w1);
  report.reference = ref.info;
  const auto times = s.sample_times();
  const Box& omega = s.geometry.omega;

  for (std::size_t k = 0; k < s.eps_seq.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    const double eps = s.eps_seq[k];
    SweepLevel L;
    L.k = static_cast<int>(k);
    L.eps = eps;
    L.delta = s.delta_rule.delta(eps);

    const LatticePtr lat = Lattice::build(s.geometry.spec(eps));
    EnergyParams p{L.delta, s.model.build(lat->Z()), lat, s.mode};
    L.points = lat->num_points();
    L.cells = lat->num_cells();

    const LatticeField u0 = project(w0->value_fn(), omega, lat, s.quadrature, true);
    const LatticeField u1 = project(w1->value_fn(), omega, lat, s.quadrature, true);
    L.initial_norm = norm(u0);
    L.initial_energy_gap = std::abs(atomistic_energy(u0, p) - ref.energies.front());

    SimulationConfig cfg;
    cfg.rho = s.rho;
    cfg.nu = s.nu;
    cfg.t_end = s.t_end;
    cfg.integrator = s.integrator;
    double dt_target = s.dt_factor * eps;
    if (s.rho == 0.0) {
      const double lambda = power_iteration_lambda_max(LinearizedForce(u0, p)) * 1.02;
      if (lambda > 0.0) dt_target = std::min(dt_target, s.stiff_dt_factor * s.nu / lambda);
    }
    const int m = s.audit_samples_per_interval;
    const long q = std::max(1L, static_cast<long>(std::ceil(s.sample_interval / (m * dt_target) - 1e-9)));
    cfg.dt = s.sample_interval / static_cast<double>(m * q);
    cfg.sample_every = static_cast<int>(q);
    cfg.on_instability = InstabilityPolicy::truncate;

    const Trajectory traj = simulate(u0, u1, cfg, p);
    L.dt = traj.dt_used;
    L.steps = traj.steps;
    L.aborted = traj.aborted;
    L.abort_reason = traj.abort_reason;
    const EdieAudit audit = edie_audit(traj, p);
    L.edie_substitution = audit.substitution.max_relative_residual();
    L.edie_force = audit.force.max_relative_residual();
    L.dissipation_monotone = audit.substitution.dissipation_monotone() && audit.force.dissipation_monotone();
    L.apriori_ok = apriori_bounds(audit, cfg).all_hold();
    if (s.rho == 0.0) {
      for (std::size_t i = 1; i < audit.substitution.potential.size(); ++i) {
        const double prev = audit.substitution.potential[i - 1];
        if (audit.substitution.potential[i] > prev + 1e-14 * std::max(1.0, prev)) L.energy_nonincreasing = false;
      }
    }

    for (std::size_t j = 0; j < times.size(); ++j) {
      const std::size_t sidx = j * static_cast<std::size_t>(m);
      if (sidx >= traj.size()) break;
      require(std::abs(traj.times[sidx] - times[j]) <= 1e-9 * std::max(1.0, times[j]), ErrorCode::internal,
              "sweep: trajectory samples are misaligned with the comparison times");
      const LatticeField& u = traj.u[sidx];
      const SmoothField& wt = *ref.snapshots[j];
      SweepRow row;
      row.k = L.k;
      row.eps = eps;
      row.delta = L.delta;
      row.t = times[j];
      row.ac_error = ac_distance(u, wt.value_fn(), omega, s.quadrature);
      row.energy_atomistic = atomistic_energy(u, p);
      row.energy_continuum = ref.energies[j];
      row.energy_error = std::abs(row.energy_atomistic - row.energy_continuum);
      row.grad_error = gradient_error(u, wt, s.quadrature);
      L.sup_ac_error = std::max(L.sup_ac_error, row.ac_error);
      report.rows.push_back(row);
      for (std::size_t f = 0; f < vfields.size(); ++f) {
        const GateauxPair gp = gateaux_consistency_check(u, p, wt, *vfields[f], C, omega, s.quadrature);
        GateauxRow gr;
        gr.k = L.k;
        gr.eps = eps;
        gr.t = times[j];
        gr.field = static_cast<int>(f);
        gr.atomistic = gp.atomistic;
        gr.cell_sum = gp.cell_sum;
        gr.continuum = gp.continuum;
        gr.gap = std::abs(gp.atomistic - gp.continuum);
        report.gateaux.push_back(gr);
      }
    }
    L.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.levels.push_back(L);
  }

  // Assertions.
  const std::size_t K = report.levels.size();
  auto add = [&](std::string name, bool ok, std::string detail) {
    report.assertions.push_back({std::move(name), ok, std::move(detail)});
  };
  {
    bool aborted = false;
    std::string why;
    for (const auto& L : report.levels) {
      if (L.aborted) {
        aborted = true;
        why = L.abort_reason;
      }
    }
    add("no instability aborts", !aborted, aborted ? why : "all levels reached t_end");
  }
  {
    std::vector<double> sup;
    for (const auto& L : report.levels) sup.push_back(L.sup_ac_error);
    add("sup_t ac_error strictly decreasing in k", strictly_decreasing(sup), "sup ac_error: " + join(sup));
    const double ceiling = s.ac_ceiling * report.levels.back().initial_norm;
    add("final sup ac_error below ceiling", sup.back() <= ceiling,
        fmt(sup.back()) + " <= " + fmt(s.ac_ceiling) + " x |P w0| = " + fmt(ceiling));
  }
  auto per_time = [&](const char* name, double SweepRow::*field) {
    bool ok = true;
    std::string detail;
    for (std::size_t j = 0; j < times.size(); ++j) {
      std::vector<double> x;
      for (const auto& r : report.rows) {
        if (std::abs(r.t - times[j]) < 1e-12) x.push_back(r.*field);
      }
      const bool dec = x.size() == K && strictly_decreasing(x);
      if (!dec) {
        ok = false;
        detail += "t=" + fmt(times[j]) + ": " + join(x) + "; ";
      }
    }
    add(name, ok, ok ? "decreasing at all " + std::to_string(times.size()) + " sample times" : detail);
  };
  per_time("energy_error strictly decreasing in k at every sample time", &SweepRow::energy_error);
  per_time("grad_error strictly decreasing in k at every sample time", &SweepRow::grad_error);
  {
    std::vector<double> gaps;
    for (const auto& L : report.levels) gaps.push_back(L.initial_energy_gap);
    add("well-prepared initial data: |I_k(P w0) - I(w0)| strictly decreasing", strictly_decreasing(gaps),
        join(gaps));
  }
  {
    double worst = 0.0;
    for (const auto& L : report.levels) worst = std::max(worst, L.edie_substitution);
    add("EDIE residual within tolerance", worst <= s.edie_tolerance,
        "max relative residual " + fmt(worst) + " <= " + fmt(s.edie_tolerance));
  }
  {
    bool ok = true;
    bool mono = true;
    for (const auto& L : report.levels) {
      ok = ok && L.apriori_ok;
      mono = mono && L.dissipation_monotone;
    }
    add("a-priori bounds hold", ok, ok ? "all levels" : "violated on some level");
    add("dissipation integrals nondecreasing", mono, mono ? "all levels" : "decrease detected");
  }
  if (s.rho == 0.0) {
    bool ok = true;
    for (const auto& L : report.levels) ok = ok && L.energy_nonincreasing;
    add("energy nonincreasing in time (rho = 0)", ok, ok ? "all trajectories" : "increase detected");
  }
  for (std::size_t f = 0; f < vfields.size(); ++f) {
    bool ok = true;
    bool riesz = true;
    std::string detail;
    for (std::size_t j = 0; j < times.size(); ++j) {
      std::vector<double> x;
      for (const auto& g : report.gateaux) {
        if (g.field != static_cast<int>(f) || std::abs(g.t - times[j]) >= 1e-12) continue;
        x.push_back(g.gap);
        const double scale = std::max({1.0, std::abs(g.atomistic), std::abs(g.cell_sum)});
        if (std::abs(g.atomistic - g.cell_sum) > 1e-10 * scale) riesz = false;
      }
      if (!(x.size() == K && strictly_decreasing(x))) {
        ok = false;
        detail += "t=" + fmt(times[j]) + ": " + join(x) + "; ";
      }
    }
    add("gateaux gap strictly decreasing in k (field " + std::to_string(f) + ")", ok,
        ok ? "decreasing at every sample time" : detail);
    add("Riesz identity (dI, v)_eps = <dI, v> (field " + std::to_string(f) + ")", riesz, "relative 1e-10");
  }
  return report;
}

// ---------------------------------------------------------------------------

RecoveryReport recovery_check(const std::vector<SmoothFieldSpec>& fields, const std::vector<double>& eps_seq,
                              const Geometry& geometry, const ModelSpec& model, const DeltaRule& rule,
                              const CellQuadrature& quadrature) {
  RecoveryReport rep;
  const int d = geometry.dim;
  const ElasticityTensor C = tensor_for(geometry, model);
  // c(d, A) = sqrt(2^d) diam(A [0,1]^d)
  double diam = 0.0;
  {
    Index total = 1;
    for (int a = 0; a < d; ++a) total *= 3;
    for (Index t = 0; t < total; ++t) {
      Index rem = t;
      Eigen::VectorXd s(d);
      for (int a = 0; a < d; ++a) {
        s[a] = static_cast<double>(rem % 3) - 1.0;
        rem /= 3;
      }
      diam = std::max(diam, (geometry.basis * s).norm());
    }
  }
  rep.constant_bound = std::sqrt(static_cast<double>(1 << d)) * diam;
  const Box& omega = geometry.omega;

  for (std::size_t f = 0; f < fields.size(); ++f) {
    const SmoothFieldPtr w = make_smooth_field(fields[f]);
    require(w->dim() == d, ErrorCode::config, "recovery: field dimension");
    const double Iw = continuum_energy(*w, C, omega);
    // |grad w|_inf on the composite Gauss nodes.
    double gsup = 0.0;
    {
      const GaussRule g = composite_gauss(4, d == 1 ? 512 : 96);
      const Index nq = static_cast<Index>(g.nodes.size());
      Index total = 1;
      for (int a = 0; a < d; ++a) total *= nq;
      std::vector<double> x(d);
      std::vector<double> G(d * d);
      for (Index q = 0; q < total; ++q) {
        Index rem = q;
        for (int a = d - 1; a >= 0; --a) {
          x[a] = omega.lo[a] + (omega.hi[a] - omega.lo[a]) * g.nodes[rem % nq];
          rem /= nq;
        }
        w->gradient(x, G);
        double n2 = 0.0;
        for (double v : G) n2 += v * v;
        gsup = std::max(gsup, std::sqrt(n2));
      }
    }
    for (std::size_t k = 0; k < eps_seq.size(); ++k) {
      const double eps = eps_seq[k];
      const LatticePtr lat = Lattice::build(geometry.spec(eps));
      EnergyParams p{rule.delta(eps), model.build(lat->Z()), lat, ExecutionMode::audit};
      const LatticeField v = project(w->value_fn(), omega, lat, quadrature, true);
      RecoveryRow r;
      r.field = static_cast<int>(f);
      r.k = static_cast<int>(k);
      r.eps = eps;
      r.delta = p.delta;
      r.energy_atomistic = atomistic_energy(v, p);
      r.energy_continuum = Iw;
      r.gap = std::abs(r.energy_atomistic - Iw);
      r.grad_error = gradient_error(v, *w, quadrature);
      r.grad_sup = gradient_sup(v);
      r.continuum_grad_sup = gsup;
      r.ratio = gsup > 0.0 ? r.grad_sup / gsup : 0.0;
      rep.fitted_constant = std::max(rep.fitted_constant, r.ratio);
      rep.rows.push_back(r);
    }
  }
  for (std::size_t f = 0; f < fields.size(); ++f) {
    std::vector<double> gaps;
    std::vector<double> gerr;
    for (const auto& r : rep.rows) {
      if (r.field != static_cast<int>(f)) continue;
      gaps.push_back(r.gap);
      gerr.push_back(r.grad_error);
    }
    rep.assertions.push_back({"energy gap strictly decreasing (field " + std::to_string(f) + ")",
                              strictly_decreasing(gaps), join(gaps)});
    rep.assertions.push_back({"gradient error strictly decreasing (field " + std::to_string(f) + ")",
                              strictly_decreasing(gerr), join(gerr)});
  }
  rep.assertions.push_back({"|grad P w|_inf <= c |grad w|_inf with k-independent c",
                            rep.fitted_constant <= rep.constant_bound,
                            "fitted c = " + fmt(rep.fitted_constant) + ", c(d,A) = " + fmt(rep.constant_bound)});
  return rep;
}

// ---------------------------------------------------------------------------
// Report files

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* kReportHeader = "k,eps,delta,t,ac_error,energy_atomistic,energy_continuum,energy_error,grad_error";

}  // namespace

void report_emit(const ConvergenceReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorCode::io, "report_emit: cannot create directory '" + dir + "': " + ec.message());
  auto open = [&](const std::string& name) {
    std::ofstream out(fs::path(dir) / name);
    require(out.good(), ErrorCode::io, "report_emit: cannot write '" + (fs::path(dir) / name).string() + "'");
    return out;
  };
  {
    auto out = open("report.csv");
    out << kReportHeader << '\n';
    for (const auto& r : report.rows) {
      out << r.k << ',' << g17(r.eps) << ',' << g17(r.delta) << ',' << g17(r.t) << ',' << g17(r.ac_error) << ','
          << g17(r.energy_atomistic) << ',' << g17(r.energy_continuum) << ',' << g17(r.energy_error) << ','
          << g17(r.grad_error) << '\n';
    }
  }
  {
    auto out = open("gateaux.csv");
    out << "k,eps,t,field,atomistic,cell_sum,continuum,gap\n";
    for (const auto& g : report.gateaux) {
      out << g.k << ',' << g17(g.eps) << ',' << g17(g.t) << ',' << g.field << ',' << g17(g.atomistic) << ','
          << g17(g.cell_sum) << ',' << g17(g.continuum) << ',' << g17(g.gap) << '\n';
    }
  }
  {
    auto out = open("levels.csv");
    out << "k,eps,delta,points,cells,dt,steps,initial_norm,initial_energy_gap,sup_ac_error,edie_substitution,"
           "edie_force,apriori_ok,aborted,runtime_seconds\n";
    for (const auto& L : report.levels) {
      out << L.k << ',' << g17(L.eps) << ',' << g17(L.delta) << ',' << L.points << ',' << L.cells << ','
          << g17(L.dt) << ',' << L.steps << ',' << g17(L.initial_norm) << ',' << g17(L.initial_energy_gap) << ','
          << g17(L.sup_ac_error) << ',' << g17(L.edie_substitution) << ',' << g17(L.edie_force) << ','
          << (L.apriori_ok ? 1 : 0) << ',' << (L.aborted ? 1 : 0) << ',' << g17(L.runtime_seconds) << '\n';
    }
  }
  {
    using json = nlohmann::ordered_json;
    json j;
    j["schema"] = "latlin.convergence.summary/1";
    j["config"] = report.config_echo.empty() ? json(nullptr) : json::parse(report.config_echo);
    j["environment"] = {{"compiler", __VERSION__},
                        {"cxx_standard", static_cast<long>(__cplusplus)},
                        {"hardware_threads", std::thread::hardware_concurrency()}};
    const ReferenceInfo& R = report.reference;
    j["reference"] = {{"kind", R.kind}, {"modes", R.modes}, {"cells", R.cells}, {"dt", R.dt},
                      {"edie_residual", R.edie_residual}};
    json tol = json::object();
    for (const auto& [k, v] : report.tolerances) tol[k] = v;
    j["tolerances"] = tol;
    json levels = json::array();
    for (const auto& L : report.levels) {
      levels.push_back({{"k", L.k},
                        {"eps", L.eps},
                        {"delta", L.delta},
                        {"points", L.points},
                        {"cells", L.cells},
                        {"dt", L.dt},
                        {"steps", L.steps},
                        {"initial_norm", L.initial_norm},
                        {"initial_energy_gap", L.initial_energy_gap},
                        {"sup_ac_error", L.sup_ac_error},
                        {"edie_substitution", L.edie_substitution},
                        {"edie_force", L.edie_force},
                        {"dissipation_monotone", L.dissipation_monotone},
                        {"apriori_ok", L.apriori_ok},
                        {"energy_nonincreasing", L.energy_nonincreasing},
                        {"aborted", L.aborted},
                        {"abort_reason", L.abort_reason},
                        {"runtime_seconds", L.runtime_seconds}});
    }
    j["levels"] = levels;
    json asserts = json::array();
    for (const auto& a : report.assertions) {
      asserts.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
    }
    j["assertions"] = asserts;
    j["passed"] = report.passed();
    auto out = open("summary.json");
    out << j.dump(2) << '\n';
  }
}

std::vector<SweepRow> read_report_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "read_report_csv: cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  require(line == kReportHeader, ErrorCode::io, "read_report_csv: unexpected header in '" + path + "'");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    require(cells.size() == 9, ErrorCode::io, "read_report_csv: malformed row '" + line + "'");
    SweepRow r;
    r.k = std::stoi(cells[0]);
    r.eps = std::stod(cells[1]);
    r.delta = std::stod(cells[2]);
    r.t = std::stod(cells[3]);
    r.ac_error = std::stod(cells[4]);
    r.energy_atomistic = std::stod(cells[5]);
    r.energy_continuum = std::stod(cells[6]);
    r.energy_error = std::stod(cells[7]);
    r.grad_error = std::stod(cells[8]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace latlin
