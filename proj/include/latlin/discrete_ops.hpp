#pragma once

#include "latlin/cell_energy.hpp"
#include "latlin/fields.hpp"

#include <functional>

namespace latlin {

/// audit: sequential, fixed-order reductions (bit-reproducible).
/// fast: std::thread work split above a size threshold; reductions are merged
/// in chunk order, so results differ from audit mode only by rounding.
enum class ExecutionMode { audit, fast };

/// Runs body(begin, end) over [0, n), chunked across threads in fast mode.
void parallel_for(Index n, ExecutionMode mode, const std::function<void(Index, Index)>& body);

struct EnergyParams {
  double delta = 1.0;
  ModelPtr model;
  LatticePtr lattice;
  ExecutionMode mode = ExecutionMode::audit;
};

/// Throws invalid_argument / malformed_model when params are inconsistent.
void validate(const EnergyParams& p);

/// grad u(xbar) = (u_1 - ubar, ..., u_{2^d} - ubar) / eps per stored cell.
CellField discrete_gradient(const LatticeField& u, ExecutionMode mode = ExecutionMode::audit);

/// Conjugate operator
///   grad* g(x) = (1/eps) sum_i ( -g_i(x - eps z_i) + 2^-d sum_j g_i(x - eps z_j) )
/// at points of omega (zero elsewhere); absent cells contribute zero.
LatticeField discrete_divergence(const CellField& g, ExecutionMode mode = ExecutionMode::audit);

/// Per-cell stress g = (1/delta) DW(Z + delta grad u).
CellField cell_stress(const LatticeField& u, const EnergyParams& p);

/// I(u) = eps^d det A / delta^2 sum_cells W(Z + delta grad u).
double atomistic_energy(const LatticeField& u, const EnergyParams& p);

/// dI(u) = -grad*(g) with g the cell stress; zero outside omega.
LatticeField atomistic_force(const LatticeField& u, const EnergyParams& p);

/// Linearization of the force at a fixed state: J w = -grad*(D^2W(Z + delta grad u) : grad w).
/// Cell Hessians are evaluated once at construction.
class LinearizedForce {
 public:
  LinearizedForce(const LatticeField& u, const EnergyParams& p);
  LatticeField apply(const LatticeField& w) const;
  const LatticePtr& lattice() const { return lattice_; }

 private:
  LatticePtr lattice_;
  ExecutionMode mode_;
  int block_ = 0;
  bool shared_ = false;  // one Hessian for every cell
  std::vector<double> hessians_;
};

}  // namespace latlin
