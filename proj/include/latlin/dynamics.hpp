#pragma once

#include "latlin/discrete_ops.hpp"

#include <string>
#include <vector>

namespace latlin {

/// rk4 and semi_implicit_euler integrate rho u'' + nu u' + dI(u) = 0 as a
/// first-order system and need rho > 0. The viscous_* schemes integrate the
/// gradient flow nu u' = -dI(u) and need rho = 0.
enum class Integrator { rk4, semi_implicit_euler, viscous_explicit, viscous_implicit, viscous_rk4 };

const char* to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);
bool is_viscous(Integrator integrator);

enum class InstabilityPolicy { abort, truncate };

struct SimulationConfig {
  double rho = 1.0;
  double nu = 1.0;
  double dt = 1e-3;
  double t_end = 1.0;
  Integrator integrator = Integrator::rk4;
  int sample_every = 10;
  /// Reject dt above the estimated stability bound before stepping.
  bool enforce_dt_bound = false;
  InstabilityPolicy on_instability = InstabilityPolicy::abort;
  /// Newton/CG controls for viscous_implicit.
  double implicit_tol = 1e-10;
  int implicit_max_newton = 30;
  int implicit_max_cg = 2000;
};

void validate(const SimulationConfig& config);

struct State {
  LatticeField u;
  LatticeField v;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<LatticeField> u;
  std::vector<LatticeField> v;
  SimulationConfig config;
  double delta = 1.0;
  std::string model;
  double dt_used = 0.0;  // dt after rounding the step count to hit t_end
  long steps = 0;
  bool aborted = false;
  std::string abort_reason;
  /// Running int_0^t |u'|^2 at each sample, accumulated every step with the
  /// Hermite-corrected trapezoid rule (u'' from the equation of motion).
  std::vector<double> int_v2;

  std::size_t size() const { return times.size(); }
};

/// One dt advance for the inertial integrators.
State step(const State& s, const SimulationConfig& config, const EnergyParams& p, double dt);
/// One dt advance of the gradient flow.
LatticeField step_viscous(const LatticeField& u, const SimulationConfig& config, const EnergyParams& p,
                          double dt);

struct StabilityBound {
  double lambda_max = 0.0;  // largest eigenvalue of the linearized force
  double dt_max = 0.0;      // +inf for unconditionally stable schemes
};

/// Power iteration on the linearized force at u; per-scheme bound:
/// rk4 0.5/omega_max, semi-implicit Euler 1.8/omega_max, explicit viscous
/// 1.8 nu/lambda_max, viscous rk4 2.5 nu/lambda_max, omega_max = sqrt(lambda_max/rho).
StabilityBound stability_bound(const LatticeField& u, const SimulationConfig& config, const EnergyParams& p);
double power_iteration_lambda_max(const LinearizedForce& J, int iterations = 200, double tol = 1e-8);

/// Samples at t = 0, every sample_every steps, and t_end. For rho = 0 the
/// stored velocity is -dI(u)/nu and u1 is ignored.
Trajectory simulate(const LatticeField& u0, const LatticeField& u1, const SimulationConfig& config,
                    const EnergyParams& p);

/// Per-sample energy bookkeeping of
///   (rho/2)|u'|^2 + I(u) + (nu/2) int |u'|^2 + (1/2nu) int |rho u'' + dI(u)|^2 = (rho/2)|u1|^2 + I(u0).
struct EdieLedger {
  std::string route;
  std::vector<double> times;
  std::vector<double> kinetic;
  std::vector<double> potential;
  std::vector<double> dissipation_visc;
  std::vector<double> dissipation_force;
  std::vector<double> residual;
  double rhs = 0.0;

  /// max_t |residual| / rhs (absolute when rhs = 0).
  double max_relative_residual() const;
  bool dissipation_monotone() const;
};

struct EdieAudit {
  /// rho u'' + dI = -nu u' substituted; time integral by the Hermite-corrected
  /// trapezoid with derivatives taken from the equation of motion.
  EdieLedger substitution;
  /// rho u'' by finite differences of sampled velocities (for rho = 0, u' by
  /// finite differences of sampled u) plus the lattice force; trapezoid rule.
  EdieLedger force;
};

EdieAudit edie_audit(const Trajectory& traj, const EnergyParams& p);

struct AprioriBound {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool holds = true;
};

struct AprioriReport {
  double energy0 = 0.0;  // (rho/2)|u1|^2 + I(u0)
  std::vector<AprioriBound> bounds;
  bool all_hold() const;
};

/// sqrt(rho) max|u'| <= sqrt(2 E0), max I <= E0, int |u'|^2 <= 2 E0/nu,
/// int |rho u'' + dI|^2 <= 2 nu E0, the last from the force-route ledger.
AprioriReport apriori_bounds(const EdieAudit& audit, const SimulationConfig& config);

}  // namespace latlin
