#pragma once

#include "latlin/cell_energy.hpp"
#include "latlin/fields.hpp"
#include "latlin/smooth_fields.hpp"

#include <vector>

namespace latlin {

/// rho w_tt + nu w_t - div(C : sym grad w) = 0 on a box with w = 0 on the boundary.
struct ContinuumProblem {
  ElasticityTensor C;
  double rho = 1.0;
  double nu = 1.0;
  Box omega;
  SmoothFieldPtr w0;
  SmoothFieldPtr w1;  // ignored when rho = 0
  double t_end = 1.0;
};

/// Full gradient of a nodal grid field, ncomp = d*d, component i*d + p = d w_i/d x_p.
/// Central differences inside, second-order one-sided stencils on the boundary.
GridField grid_gradient(const GridField& w);

/// (grad w + grad w^T)/2 with the stencils of grid_gradient.
GridField symmetrized_gradient(const GridField& w);

/// 1/2 int sym grad w : C : sym grad w, gradients at grid-cell centers
/// (exact for multilinear interpolants), midpoint rule.
double continuum_energy(const GridField& w, const ElasticityTensor& C);

/// 1/2 int grad w : C : grad w for a closed-form field by tensor Gauss
/// quadrature over the box (panels per axis, points per panel).
double continuum_energy(const SmoothField& w, const ElasticityTensor& C, const Box& omega, int panels = 64,
                        int points = 4);

/// int grad w : C : grad v over the box by tensor Gauss quadrature.
double continuum_bilinear(const SmoothField& w, const SmoothField& v, const ElasticityTensor& C,
                          const Box& omega, int panels = 64, int points = 4);

/// -div(C : sym grad w) at interior nodes by the compact second-difference
/// stencil (mixed central differences off the diagonal); zero on boundary nodes.
GridField continuum_force(const GridField& w, const ElasticityTensor& C);

/// Sample a closed-form field on the nodes of a grid; boundary nodes of a grid
/// spanning omega are set to zero.
GridField sample_on_grid(const SmoothField& w, const GridField& like, bool zero_boundary = true);

/// Exact modal solution of the 1D problem on (a, a + L) with sine modes.
class SpectralSolution1D {
 public:
  SpectralSolution1D(const ContinuumProblem& problem, int modes, int panels);

  int modes() const { return static_cast<int>(a0_.size()); }
  /// Modal amplitudes a_n(t) and their time derivatives.
  void amplitudes(double t, std::vector<double>& a, std::vector<double>& adot) const;

  double value(double t, double x) const;
  double derivative(double t, double x) const;
  /// Exact 1/2 C int w_x^2.
  double energy(double t) const;
  /// Exact int w_t^2.
  double velocity_norm2(double t) const;
  /// Closed-form field w(t, .) with its x-derivative.
  SmoothFieldPtr snapshot(double t) const;

  const std::vector<double>& initial_displacement_coefficients() const { return a0_; }

 private:
  double amplitude(int n, double t, double* rate) const;

  double rho_;
  double nu_;
  double c_;
  double lo_;
  double length_;
  std::vector<double> a0_;
  std::vector<double> b0_;
};

SpectralSolution1D solve_1d_spectral(const ContinuumProblem& problem, int modes = 256, int panels = 0);

struct FdOptions {
  std::array<Index, 3> cells{64, 64, 64};  // grid intervals per axis over omega
  double dt = 0.0;                          // 0: dt_fraction x the stability bound
  double dt_fraction = 0.9;
  std::vector<double> snapshot_times;       // ascending, in [0, t_end]
};

struct FdSolution {
  GridField grid;  // geometry of the nodal grid (values unused)
  std::vector<double> times;
  std::vector<GridField> w;
  std::vector<GridField> wt;
  std::vector<double> potential;   // 1/2 h^d w.K w
  std::vector<double> kinetic;     // rho/2 h^d |w_t|^2
  std::vector<double> dissipation; // nu int h^d |w_t|^2
  double energy0 = 0.0;            // kinetic + potential at t = 0
  double dt = 0.0;
  double dt_bound = 0.0;
  double lambda_max = 0.0;

  /// max over snapshots of |kinetic + potential + dissipation - energy0| / energy0.
  double max_relative_edie_residual() const;
  /// Multilinear interpolant of snapshot s with interpolated nodal gradients.
  SmoothFieldPtr snapshot(std::size_t s) const;
};

/// Second-order FD in space, rk4 in time (gradient-flow rk4 for rho = 0).
/// Throws cfl_violation when the requested dt exceeds h_min / c_max or the
/// rk4 stability bound of the discrete operator.
FdSolution solve_fd(const ContinuumProblem& problem, const FdOptions& options);

}  // namespace latlin
