#include "latlin/dynamics.hpp"

#include "latlin/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace latlin {

const char* to_string(Integrator integrator) {
  switch (integrator) {
    case Integrator::rk4: return "rk4";
    case Integrator::semi_implicit_euler: return "semi_implicit_euler";
    case Integrator::viscous_explicit: return "viscous_explicit";
    case Integrator::viscous_implicit: return "viscous_implicit";
    case Integrator::viscous_rk4: return "viscous_rk4";
  }
  return "unknown";
}

Integrator integrator_from_string(const std::string& name) {
  for (Integrator i : {Integrator::rk4, Integrator::semi_implicit_euler, Integrator::viscous_explicit,
                       Integrator::viscous_implicit, Integrator::viscous_rk4}) {
    if (name == to_string(i)) return i;
  }
  fail(ErrorCode::config, "unknown integrator '" + name + "'");
}

bool is_viscous(Integrator integrator) {
  return integrator == Integrator::viscous_explicit || integrator == Integrator::viscous_implicit ||
         integrator == Integrator::viscous_rk4;
}

void validate(const SimulationConfig& c) {
  require(c.nu > 0.0 && std::isfinite(c.nu), ErrorCode::invalid_argument, "nu must be positive");
  require(c.rho >= 0.0 && std::isfinite(c.rho), ErrorCode::invalid_argument, "rho must be nonnegative");
  require(c.dt > 0.0 && std::isfinite(c.dt), ErrorCode::invalid_argument, "dt must be positive");
  require(c.t_end > 0.0 && std::isfinite(c.t_end), ErrorCode::invalid_argument, "t_end must be positive");
  require(c.sample_every >= 1, ErrorCode::invalid_argument, "sample_every must be >= 1");
  if (c.rho == 0.0) {
    require(is_viscous(c.integrator), ErrorCode::invalid_argument,
            "rho = 0 requires a viscous integrator (viscous_explicit, viscous_implicit, viscous_rk4)");
  } else {
    require(!is_viscous(c.integrator), ErrorCode::invalid_argument,
            std::string("integrator ") + to_string(c.integrator) + " integrates the rho = 0 gradient flow");
  }
}

namespace {

double euclid_dot(const LatticeField& a, const LatticeField& b) {
  double s = 0.0;
  const auto& x = a.values();
  const auto& y = b.values();
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double max_abs(const LatticeField& a) {
  double m = 0.0;
  for (double x : a.values()) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(x));
  }
  return m;
}

LatticeField acceleration(const LatticeField& u, const LatticeField& v, const SimulationConfig& c,
                          const EnergyParams& p) {
  LatticeField a = atomistic_force(u, p);
  a.axpy(c.nu, v);
  a.scale(-1.0 / c.rho);
  return a;
}

LatticeField flow(const LatticeField& u, const SimulationConfig& c, const EnergyParams& p) {
  LatticeField f = atomistic_force(u, p);
  f.scale(-1.0 / c.nu);
  return f;
}

// Solves (nu/dt) s + J s = b by conjugate gradients.
LatticeField cg_solve(const LinearizedForce& J, double shift, const LatticeField& b, double rtol, int max_iter) {
  LatticeField x(b.lattice());
  LatticeField r = b;
  LatticeField pdir = r;
  double rr = euclid_dot(r, r);
  const double stop = rtol * rtol * rr;
  for (int it = 0; it < max_iter && rr > stop && rr > 0.0; ++it) {
    LatticeField Ap = J.apply(pdir);
    Ap.axpy(shift, pdir);
    const double pAp = euclid_dot(pdir, Ap);
    if (!(pAp > 0.0)) fail(ErrorCode::no_convergence, "implicit step: Jacobian is not positive definite");
    const double alpha = rr / pAp;
    x.axpy(alpha, pdir);
    r.axpy(-alpha, Ap);
    const double rr_new = euclid_dot(r, r);
    pdir.scale(rr_new / rr).axpy(1.0, r);
    rr = rr_new;
  }
  if (rr > stop && rr > 0.0) fail(ErrorCode::no_convergence, "implicit step: CG did not converge");
  return x;
}

}  // namespace

State step(const State& s, const SimulationConfig& c, const EnergyParams& p, double dt) {
  require(c.rho > 0.0, ErrorCode::invalid_argument, "step: inertial integrators need rho > 0");
  switch (c.integrator) {
    case Integrator::rk4: {
      const LatticeField& u = s.u;
      const LatticeField& v = s.v;
      const LatticeField k1u = v;
      const LatticeField k1v = acceleration(u, v, c, p);
      const LatticeField u2 = LatticeField(u).axpy(0.5 * dt, k1u);
      const LatticeField v2 = LatticeField(v).axpy(0.5 * dt, k1v);
      const LatticeField k2v = acceleration(u2, v2, c, p);
      const LatticeField u3 = LatticeField(u).axpy(0.5 * dt, v2);
      const LatticeField v3 = LatticeField(v).axpy(0.5 * dt, k2v);
      const LatticeField k3v = acceleration(u3, v3, c, p);
      const LatticeField u4 = LatticeField(u).axpy(dt, v3);
      const LatticeField v4 = LatticeField(v).axpy(dt, k3v);
      const LatticeField k4v = acceleration(u4, v4, c, p);
      State out{u, v};
      out.u.axpy(dt / 6.0, k1u).axpy(dt / 3.0, v2).axpy(dt / 3.0, v3).axpy(dt / 6.0, v4);
      out.v.axpy(dt / 6.0, k1v).axpy(dt / 3.0, k2v).axpy(dt / 3.0, k3v).axpy(dt / 6.0, k4v);
      return out;
    }
    case Integrator::semi_implicit_euler: {
      State out{s.u, s.v};
      out.v.axpy(dt, acceleration(s.u, s.v, c, p));
      out.u.axpy(dt, out.v);
      return out;
    }
    default:
      fail(ErrorCode::invalid_argument, std::string("step: ") + to_string(c.integrator) + " is a viscous scheme");
  }
}

LatticeField step_viscous(const LatticeField& u, const SimulationConfig& c, const EnergyParams& p, double dt) {
  switch (c.integrator) {
    case Integrator::viscous_explicit:
      return LatticeField(u).axpy(dt, flow(u, c, p));
    case Integrator::viscous_rk4: {
      const LatticeField k1 = flow(u, c, p);
      const LatticeField k2 = flow(LatticeField(u).axpy(0.5 * dt, k1), c, p);
      const LatticeField k3 = flow(LatticeField(u).axpy(0.5 * dt, k2), c, p);
      const LatticeField k4 = flow(LatticeField(u).axpy(dt, k3), c, p);
      return LatticeField(u).axpy(dt / 6.0, k1).axpy(dt / 3.0, k2).axpy(dt / 3.0, k3).axpy(dt / 6.0, k4);
    }
    case Integrator::viscous_implicit: {
      // Newton on r(x) = nu (x - u)/dt + dI(x) = 0.
      const double shift = c.nu / dt;
      LatticeField x = u;
      const double scale = std::max({shift * std::sqrt(euclid_dot(u, u)),
                                     std::sqrt(euclid_dot(atomistic_force(u, p), atomistic_force(u, p))),
                                     std::numeric_limits<double>::min()});
      for (int it = 0; it <= c.implicit_max_newton; ++it) {
        LatticeField r = atomistic_force(x, p);
        r.axpy(shift, x).axpy(-shift, u);
        const double rn = std::sqrt(euclid_dot(r, r));
        if (rn <= c.implicit_tol * scale) return x;
        if (it == c.implicit_max_newton) break;
        const LinearizedForce J(x, p);
        r.scale(-1.0);
        x.axpy(1.0, cg_solve(J, shift, r, 1e-13, c.implicit_max_cg));
      }
      std::ostringstream msg;
      msg << "implicit step did not converge in " << c.implicit_max_newton << " Newton iterations";
      fail(ErrorCode::no_convergence, msg.str());
    }
    default:
      fail(ErrorCode::invalid_argument,
           std::string("step_viscous: ") + to_string(c.integrator) + " is an inertial scheme");
  }
}

double power_iteration_lambda_max(const LinearizedForce& J, int iterations, double tol) {
  const Lattice& lat = *J.lattice();
  LatticeField x(J.lattice());
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (Index p = 0; p < lat.num_points(); ++p) {
    if (!lat.in_omega(p)) continue;
    for (double& v : x.at(p)) v = uni(rng);
  }
  double nx = std::sqrt(euclid_dot(x, x));
  if (nx == 0.0) return 0.0;
  x.scale(1.0 / nx);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    LatticeField y = J.apply(x);
    const double rayleigh = euclid_dot(x, y);
    const double ny = std::sqrt(euclid_dot(y, y));
    if (ny == 0.0) return 0.0;
    y.scale(1.0 / ny);
    x = std::move(y);
    if (it > 5 && std::abs(rayleigh - lambda) <= tol * std::abs(rayleigh)) {
      lambda = rayleigh;
      break;
    }
    lambda = rayleigh;
  }
  return lambda;
}

StabilityBound stability_bound(const LatticeField& u, const SimulationConfig& c, const EnergyParams& p) {
  StabilityBound b;
  const LinearizedForce J(u, p);
  // Power iteration approaches lambda_max from below.
  b.lambda_max = 1.02 * power_iteration_lambda_max(J);
  const double inf = std::numeric_limits<double>::infinity();
  if (b.lambda_max <= 0.0) {
    b.dt_max = inf;
    return b;
  }
  switch (c.integrator) {
    case Integrator::rk4:
      b.dt_max = 0.5 / std::sqrt(b.lambda_max / c.rho);
      break;
    case Integrator::semi_implicit_euler:
      b.dt_max = 1.8 / std::sqrt(b.lambda_max / c.rho);
      break;
    case Integrator::viscous_explicit:
      b.dt_max = 1.8 * c.nu / b.lambda_max;
      break;
    case Integrator::viscous_rk4:
      b.dt_max = 2.5 * c.nu / b.lambda_max;
      break;
    case Integrator::viscous_implicit:
      b.dt_max = inf;
      break;
  }
  return b;
}

Trajectory simulate(const LatticeField& u0, const LatticeField& u1, const SimulationConfig& c,
                    const EnergyParams& p) {
  validate(c);
  validate(p);
  require(u0.lattice() && u0.lattice()->same_as(*p.lattice), ErrorCode::lattice_mismatch,
          "simulate: u0 lives on a different lattice");
  require(u0.is_admissible(), ErrorCode::invalid_argument, "simulate: u0 must vanish outside omega");
  const bool viscous = c.rho == 0.0;
  if (!viscous) {
    require(u1.lattice() && u1.lattice()->same_as(*p.lattice), ErrorCode::lattice_mismatch,
            "simulate: u1 lives on a different lattice");
    require(u1.is_admissible(), ErrorCode::invalid_argument, "simulate: u1 must vanish outside omega");
  }

  Trajectory traj;
  traj.config = c;
  traj.delta = p.delta;
  traj.model = p.model->name();
  const long n = std::max(1L, static_cast<long>(std::ceil(c.t_end / c.dt - 1e-9)));
  const double dt = c.t_end / static_cast<double>(n);
  traj.dt_used = dt;

  if (c.enforce_dt_bound) {
    const StabilityBound b = stability_bound(u0, c, p);
    if (dt > b.dt_max) {
      std::ostringstream msg;
      msg << "dt = " << dt << " exceeds the stability bound " << b.dt_max << " (lambda_max = " << b.lambda_max
          << ")";
      fail(ErrorCode::cfl_violation, msg.str());
    }
  }

  State s{u0, viscous ? flow(u0, c, p) : u1};
  const double scale0 = max_abs(u0) + (viscous ? 0.0 : max_abs(u1));
  const double limit = 1e6 * scale0;

  // |v|^2 and d/dt |v|^2 = 2 (v, v') with v' from the equation of motion.
  auto rate = [&](const State& x) {
    LatticeField vdot(p.lattice);
    if (viscous) {
      vdot = LinearizedForce(x.u, p).apply(x.v);
      vdot.scale(-1.0 / c.nu);
    } else {
      vdot = acceleration(x.u, x.v, c, p);
    }
    return std::array<double, 2>{inner_product(x.v, x.v), 2.0 * inner_product(x.v, vdot)};
  };
  double int_v2 = 0.0;
  auto r_prev = rate(s);

  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.u.push_back(s.u);
    traj.v.push_back(s.v);
    traj.int_v2.push_back(int_v2);
  };
  record(0.0);

  for (long k = 1; k <= n; ++k) {
    if (viscous) {
      s.u = step_viscous(s.u, c, p, dt);
    } else {
      s = step(s, c, p, dt);
    }
    traj.steps = k;
    const double t = static_cast<double>(k) * dt;
    const double size = std::max(max_abs(s.u), viscous ? 0.0 : max_abs(s.v));
    if (size <= limit) {
      if (viscous) s.v = flow(s.u, c, p);
      const auto r = rate(s);
      int_v2 += 0.5 * dt * (r_prev[0] + r[0]) + dt * dt / 12.0 * (r_prev[1] - r[1]);
      r_prev = r;
    }
    if (!(size <= limit)) {
      std::ostringstream msg;
      msg << "instability at step " << k << " (t = " << t << "): max |state| = " << size << " exceeds 1e6 x "
          << scale0 << "; dt = " << dt;
      if (c.on_instability == InstabilityPolicy::abort) fail(ErrorCode::instability, msg.str());
      if (viscous && std::isfinite(size)) s.v = flow(s.u, c, p);
      record(t);
      traj.aborted = true;
      traj.abort_reason = msg.str();
      return traj;
    }
    if (k % c.sample_every == 0 || k == n) record(t);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Energy-dissipation-inertia audit

double EdieLedger::max_relative_residual() const {
  double m = 0.0;
  for (double r : residual) m = std::max(m, std::abs(r));
  return rhs > 0.0 ? m / rhs : m;
}

bool EdieLedger::dissipation_monotone() const {
  auto monotone = [](const std::vector<double>& x) {
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (x[i] < x[i - 1] - 1e-14 * std::max(1.0, std::abs(x[i - 1]))) return false;
    }
    return true;
  };
  return monotone(dissipation_visc) && monotone(dissipation_force);
}

namespace {

// Derivative weights at t[at] of the quadratic through (t[0], t[1], t[2]).
std::array<double, 3> lagrange_derivative(const double* t, int at) {
  std::array<double, 3> w{};
  const double x = t[at];
  for (int j = 0; j < 3; ++j) {
    double s = 0.0;
    for (int m = 0; m < 3; ++m) {
      if (m == j) continue;
      double prod = 1.0 / (t[j] - t[m]);
      for (int k = 0; k < 3; ++k) {
        if (k == j || k == m) continue;
        prod *= (x - t[k]) / (t[j] - t[k]);
      }
      s += prod;
    }
    w[j] = s;
  }
  return w;
}

// Time derivative of sampled fields at every sample (second order).
std::vector<LatticeField> sample_derivative(const std::vector<double>& t, const std::vector<LatticeField>& y) {
  const std::size_t K = t.size();
  std::vector<LatticeField> out;
  out.reserve(K);
  if (K == 1) {
    out.emplace_back(y[0].lattice());
    return out;
  }
  if (K == 2) {
    LatticeField d = y[1] - y[0];
    d.scale(1.0 / (t[1] - t[0]));
    out.push_back(d);
    out.push_back(d);
    return out;
  }
  for (std::size_t s = 0; s < K; ++s) {
    const std::size_t b = s == 0 ? 0 : (s == K - 1 ? K - 3 : s - 1);
    const int at = static_cast<int>(s - b);
    const auto w = lagrange_derivative(t.data() + b, at);
    LatticeField d(y[0].lattice());
    for (int j = 0; j < 3; ++j) d.axpy(w[j], y[b + j]);
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

EdieAudit edie_audit(const Trajectory& traj, const EnergyParams& p) {
  validate(p);
  const SimulationConfig& c = traj.config;
  const std::size_t K = traj.size();
  require(K >= 1, ErrorCode::invalid_argument, "edie_audit: empty trajectory");
  const double rho = c.rho;
  const double nu = c.nu;

  std::vector<double> pot(K);
  std::vector<double> vv(K);
  std::vector<LatticeField> force;
  force.reserve(K);
  for (std::size_t s = 0; s < K; ++s) {
    pot[s] = atomistic_energy(traj.u[s], p);
    vv[s] = inner_product(traj.v[s], traj.v[s]);
    force.push_back(atomistic_force(traj.u[s], p));
  }
  const double rhs = 0.5 * rho * vv[0] + pot[0];

  EdieAudit audit;
  auto init = [&](EdieLedger& L, const char* route) {
    L.route = route;
    L.times = traj.times;
    L.rhs = rhs;
    L.kinetic.resize(K);
    L.potential = pot;
    L.dissipation_visc.assign(K, 0.0);
    L.dissipation_force.assign(K, 0.0);
    L.residual.resize(K);
    for (std::size_t s = 0; s < K; ++s) L.kinetic[s] = 0.5 * rho * vv[s];
  };

  // Substitution route: both dissipation integrands equal (nu/2)|v|^2. Uses the
  // step-resolution integral recorded by simulate when present.
  {
    EdieLedger& L = audit.substitution;
    init(L, "substitution");
    const bool stepwise = traj.int_v2.size() == K;
    std::vector<double> dvv(K);
    for (std::size_t s = 0; s < K && !stepwise; ++s) {
      LatticeField vdot(p.lattice);
      if (rho > 0.0) {
        vdot = force[s];
        vdot.axpy(nu, traj.v[s]).scale(-1.0 / rho);
      } else {
        vdot = LinearizedForce(traj.u[s], p).apply(traj.v[s]);
        vdot.scale(-1.0 / nu);
      }
      dvv[s] = 2.0 * inner_product(traj.v[s], vdot);
    }
    double integral = 0.0;
    for (std::size_t s = 1; s < K; ++s) {
      if (stepwise) {
        L.dissipation_visc[s] = 0.5 * nu * traj.int_v2[s];
        L.dissipation_force[s] = 0.5 * nu * traj.int_v2[s];
        continue;
      }
      const double h = traj.times[s] - traj.times[s - 1];
      integral += 0.5 * h * (vv[s - 1] + vv[s]) + h * h / 12.0 * (dvv[s - 1] - dvv[s]);
      L.dissipation_visc[s] = 0.5 * nu * integral;
      L.dissipation_force[s] = 0.5 * nu * integral;
    }
  }

  // Force route: independent reconstruction from samples.
  {
    EdieLedger& L = audit.force;
    init(L, "force");
    std::vector<double> visc(K);
    std::vector<double> res(K);
    if (rho > 0.0) {
      const auto acc = sample_derivative(traj.times, traj.v);
      for (std::size_t s = 0; s < K; ++s) {
        visc[s] = vv[s];
        LatticeField r = force[s];
        r.axpy(rho, acc[s]);
        res[s] = inner_product(r, r);
      }
    } else {
      const auto vel = sample_derivative(traj.times, traj.u);
      for (std::size_t s = 0; s < K; ++s) {
        visc[s] = inner_product(vel[s], vel[s]);
        res[s] = inner_product(force[s], force[s]);
      }
    }
    double iv = 0.0;
    double ir = 0.0;
    for (std::size_t s = 1; s < K; ++s) {
      const double h = traj.times[s] - traj.times[s - 1];
      iv += 0.5 * h * (visc[s - 1] + visc[s]);
      ir += 0.5 * h * (res[s - 1] + res[s]);
      L.dissipation_visc[s] = 0.5 * nu * iv;
      L.dissipation_force[s] = ir / (2.0 * nu);
    }
  }

  for (EdieLedger* L : {&audit.substitution, &audit.force}) {
    for (std::size_t s = 0; s < K; ++s) {
      L->residual[s] = L->kinetic[s] + L->potential[s] + L->dissipation_visc[s] + L->dissipation_force[s] - rhs;
    }
  }
  return audit;
}

bool AprioriReport::all_hold() const {
  return std::all_of(bounds.begin(), bounds.end(), [](const AprioriBound& b) { return b.holds; });
}

AprioriReport apriori_bounds(const EdieAudit& audit, const SimulationConfig& c) {
  const EdieLedger& sub = audit.substitution;
  const EdieLedger& frc = audit.force;
  AprioriReport r;
  r.energy0 = sub.rhs;
  const double E0 = sub.rhs;
  double max_kin = 0.0;
  double max_pot = 0.0;
  for (std::size_t s = 0; s < sub.times.size(); ++s) {
    max_kin = std::max(max_kin, sub.kinetic[s]);
    max_pot = std::max(max_pot, sub.potential[s]);
  }
  const double int_v2 = sub.dissipation_visc.empty() ? 0.0 : 2.0 * sub.dissipation_visc.back() / c.nu;
  const double int_res = frc.dissipation_force.empty() ? 0.0 : 2.0 * c.nu * frc.dissipation_force.back();
  auto add = [&](const char* name, double value, double bound) {
    const double slack = 1e-9 * std::abs(bound) + 1e-300;
    r.bounds.push_back({name, value, bound, std::isfinite(value) && value <= bound + slack});
  };
  add("sqrt(rho) max |u'|", std::sqrt(2.0 * max_kin), std::sqrt(2.0 * E0));
  add("max I(u)", max_pot, E0);
  add("int |u'|^2", int_v2, 2.0 * E0 / c.nu);
  add("int |rho u'' + dI(u)|^2", int_res, 2.0 * c.nu * E0);
  return r;
}

}  // namespace latlin
