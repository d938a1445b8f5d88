#pragma once

#include "latlin/continuum.hpp"
#include "latlin/dynamics.hpp"
#include "latlin/smooth_fields.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace latlin {

/// delta_k as a function of eps_k: equal (delta = eps), power (delta = eps^p),
/// fixed (delta = value).
struct DeltaRule {
  enum class Kind { equal, power, fixed };
  Kind kind = Kind::equal;
  double value = 1.0;
  double delta(double eps) const;
};

/// Lattice geometry shared by every level of a sweep.
struct Geometry {
  int dim = 1;
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(1, 1);
  Box omega = Box::unit(1);
  /// Explicit enlarged box; when absent omega is widened on every side by
  /// margin_cells * eps * max_a sum_b |A_ab|.
  std::optional<Box> omega_tilde;
  double margin_cells = 2.0;

  LatticeSpec spec(double eps) const;
};

struct ModelSpec {
  std::string name = "harmonic_chain";
  std::map<std::string, double> params{{"k", 1.0}};
  ModelPtr build(const Eigen::MatrixXd& Z) const;
};

struct SweepSpec {
  Geometry geometry;
  ModelSpec model;
  std::vector<double> eps_seq;
  DeltaRule delta_rule;
  double rho = 1.0;
  double nu = 1.0;
  double t_end = 1.0;
  Integrator integrator = Integrator::rk4;
  /// Target dt = dt_factor * eps, reduced so that samples land on the grid.
  double dt_factor = 1.0 / 200.0;
  /// rho = 0 only: target dt also capped at stiff_dt_factor * nu / lambda_max.
  double stiff_dt_factor = 0.05;
  /// Comparison times are the multiples of sample_interval in [0, t_end].
  double sample_interval = 0.25;
  /// Trajectory samples (for the energy audit) per comparison interval.
  int audit_samples_per_interval = 10;
  SmoothFieldSpec w0;
  SmoothFieldSpec w1;
  std::vector<SmoothFieldSpec> gateaux_fields;
  /// Continuum reference: spectral modes in 1D, FD grid h = eps_min / reference_refinement otherwise.
  int spectral_modes = 256;
  int reference_refinement = 16;
  CellQuadrature quadrature;
  ExecutionMode mode = ExecutionMode::audit;
  /// Acceptance ceilings.
  double ac_ceiling = 0.1;   // final sup ac_error / |P w0|
  double edie_tolerance = 1e-6;

  std::vector<double> sample_times() const;
};

void validate(const SweepSpec& spec);

struct SweepRow {
  int k = 0;
  double eps = 0.0;
  double delta = 0.0;
  double t = 0.0;
  double ac_error = 0.0;
  double energy_atomistic = 0.0;
  double energy_continuum = 0.0;
  double energy_error = 0.0;
  double grad_error = 0.0;
};

struct GateauxRow {
  int k = 0;
  double eps = 0.0;
  double t = 0.0;
  int field = 0;
  double atomistic = 0.0;   // (dI_k(u_k(t)), v_k)_eps
  double cell_sum = 0.0;    // eps^d det A sum g : grad v_k
  double continuum = 0.0;   // int grad w : C : grad v
  double gap = 0.0;
};

struct SweepLevel {
  int k = 0;
  double eps = 0.0;
  double delta = 0.0;
  Index points = 0;
  Index cells = 0;
  double dt = 0.0;
  long steps = 0;
  double initial_norm = 0.0;          // |P w0|_eps
  double initial_energy_gap = 0.0;    // |I_k(u0) - I(w0)|
  double sup_ac_error = 0.0;
  double edie_substitution = 0.0;     // max relative residual
  double edie_force = 0.0;
  bool dissipation_monotone = true;
  bool apriori_ok = true;
  bool energy_nonincreasing = true;   // checked when rho = 0
  bool aborted = false;
  std::string abort_reason;
  double runtime_seconds = 0.0;
};

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// How the continuum reference was computed.
struct ReferenceInfo {
  std::string kind;            // "spectral" or "finite_difference"
  int modes = 0;               // spectral
  std::array<Index, 3> cells{0, 0, 0};  // finite difference
  double dt = 0.0;
  double edie_residual = 0.0;  // finite difference energy balance
};

struct ConvergenceReport {
  std::string config_echo;  // JSON text of the sweep that produced the report
  ReferenceInfo reference;
  std::vector<SweepLevel> levels;
  std::vector<SweepRow> rows;
  std::vector<GateauxRow> gateaux;
  std::vector<Assertion> assertions;
  std::map<std::string, double> tolerances;

  bool passed() const;
};

/// Builds each lattice, sets u0 = P w0 and u1 = P w1 (zero outside omega),
/// simulates, audits, and compares with the continuum reference.
ConvergenceReport run_sweep(const SweepSpec& spec);

/// "strictly decreasing" with an absolute floor below which values count as zero.
bool strictly_decreasing(const std::vector<double>& x, double floor = 1e-14);

/// sqrt( sum_cells eps^d det A |grad u(c) - mean_c(grad w) Z|^2 ), grad w of
/// the zero extension of w outside omega.
double gradient_error(const LatticeField& u, const SmoothField& w, const CellQuadrature& rule = {});

/// max over cells of |grad u(c)| (Frobenius).
double gradient_sup(const LatticeField& u);

struct RecoveryRow {
  int field = 0;
  int k = 0;
  double eps = 0.0;
  double delta = 0.0;
  double energy_atomistic = 0.0;   // I_k(P w)
  double energy_continuum = 0.0;   // I(w)
  double gap = 0.0;
  double grad_error = 0.0;
  double grad_sup = 0.0;           // |grad P w|_inf
  double continuum_grad_sup = 0.0; // |grad w|_inf (sampled)
  double ratio = 0.0;              // grad_sup / continuum_grad_sup
};

struct RecoveryReport {
  std::vector<RecoveryRow> rows;
  double fitted_constant = 0.0;  // max ratio over all rows
  double constant_bound = 0.0;   // sqrt(2^d) diam(A [0,1]^d)
  std::vector<Assertion> assertions;
  bool passed() const;
};

RecoveryReport recovery_check(const std::vector<SmoothFieldSpec>& fields, const std::vector<double>& eps_seq,
                              const Geometry& geometry, const ModelSpec& model, const DeltaRule& rule,
                              const CellQuadrature& quadrature = {});

struct GateauxPair {
  double atomistic = 0.0;
  double cell_sum = 0.0;
  double continuum = 0.0;
};

/// <dI_k(u), P v> two ways and int grad w : C : grad v.
GateauxPair gateaux_consistency_check(const LatticeField& u, const EnergyParams& p, const SmoothField& w,
                                      const SmoothField& v, const ElasticityTensor& C, const Box& omega,
                                      const CellQuadrature& rule = {});

/// report.csv (one row per (k, t)), gateaux.csv, levels.csv and summary.json in `dir`.
void report_emit(const ConvergenceReport& report, const std::string& dir);
/// Reads report.csv back into rows.
std::vector<SweepRow> read_report_csv(const std::string& path);

}  // namespace latlin
