#pragma once

// Test helpers and independent oracles. Nothing here calls the library
// routine it is used to check.

#include "latlin/cell_energy.hpp"
#include "latlin/discrete_ops.hpp"
#include "latlin/fields.hpp"
#include "latlin/lattice.hpp"

#include <cmath>
#include <complex>
#include <random>

namespace testing {

using namespace latlin;

inline LatticeSpec box_spec(int d, double eps, const Eigen::MatrixXd& A, double lo, double hi, double tlo,
                            double thi) {
  LatticeSpec s;
  s.dim = d;
  s.basis = A;
  s.epsilon = eps;
  s.omega.lo.assign(d, lo);
  s.omega.hi.assign(d, hi);
  s.omega_tilde.lo.assign(d, tlo);
  s.omega_tilde.hi.assign(d, thi);
  return s;
}

/// Unit box omega with an enlarged box two cells wider on every side.
inline LatticePtr unit_lattice(int d, double eps, Eigen::MatrixXd A = {}) {
  if (A.size() == 0) A = Eigen::MatrixXd::Identity(d, d);
  double reach = 0.0;
  for (int a = 0; a < d; ++a) reach = std::max(reach, A.row(a).cwiseAbs().sum());
  const double m = 2.0 * eps * reach;
  return Lattice::build(box_spec(d, eps, A, 0.0, 1.0, -m, 1.0 + m));
}

/// Uniform random admissible field with entries in [-amp, amp].
inline LatticeField random_field(const LatticePtr& lat, std::mt19937_64& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> U(-amp, amp);
  LatticeField u(lat);
  for (double& x : u.values()) x = U(rng);
  u.zero_exterior();
  return u;
}

inline CellField random_cells(const LatticePtr& lat, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  CellField g(lat);
  for (double& x : g.values()) x = U(rng);
  return g;
}

/// Per-cell discrete gradient straight from the definition.
inline Eigen::MatrixXd gradient_oracle(const LatticeField& u, Index c) {
  const Lattice& L = *u.lattice();
  const int d = L.dim();
  const int n = L.corners();
  Eigen::MatrixXd U(d, n);
  for (int i = 0; i < n; ++i) {
    const auto v = u.at(L.cell_corner(c, i));
    for (int a = 0; a < d; ++a) U(a, i) = v[a];
  }
  const Eigen::VectorXd mean = U.rowwise().mean();
  return (U.colwise() - mean) / L.epsilon();
}

/// Energy by direct summation of W over cells.
inline double energy_oracle(const LatticeField& u, const CellEnergyModel& W, double delta) {
  const Lattice& L = *u.lattice();
  double s = 0.0;
  for (Index c = 0; c < L.num_cells(); ++c) s += W.eval(L.Z() + delta * gradient_oracle(u, c));
  return L.cell_volume() / (delta * delta) * s;
}

/// Force by scattering each cell's stress to its corners (the library gathers).
inline LatticeField force_oracle(const LatticeField& u, const CellEnergyModel& W, double delta) {
  const Lattice& L = *u.lattice();
  const int d = L.dim();
  const int n = L.corners();
  LatticeField f(u.lattice());
  Eigen::MatrixXd G(d, n);
  for (Index c = 0; c < L.num_cells(); ++c) {
    W.grad(L.Z() + delta * gradient_oracle(u, c), G);
    const Eigen::VectorXd mean = G.rowwise().mean();
    for (int i = 0; i < n; ++i) {
      auto fx = f.at(L.cell_corner(c, i));
      for (int a = 0; a < d; ++a) fx[a] += (G(a, i) - mean[a]) / (delta * L.epsilon());
    }
  }
  f.zero_exterior();
  return f;
}

/// Solution of rho a'' + nu a' + lambda a = 0 with a(0) = a0, a'(0) = b0,
/// from the roots of the characteristic polynomial (rho = 0: first order).
inline double modal_ode(double rho, double nu, double lambda, double a0, double b0, double t) {
  if (rho == 0.0) return a0 * std::exp(-lambda / nu * t);
  using C = std::complex<double>;
  const C disc = std::sqrt(C(nu * nu - 4.0 * rho * lambda, 0.0));
  const C r1 = (-nu + disc) / (2.0 * rho);
  const C r2 = (-nu - disc) / (2.0 * rho);
  if (std::abs(r1 - r2) < 1e-9 * (1.0 + std::abs(r1))) {
    const double r = r1.real();
    return std::exp(r * t) * (a0 + (b0 - r * a0) * t);
  }
  const C c1 = (b0 - r2 * a0) / (r1 - r2);
  const C c2 = (r1 * a0 - b0) / (r1 - r2);
  return (c1 * std::exp(r1 * t) + c2 * std::exp(r2 * t)).real();
}

/// Eigenvalue of -k * (second difference) / eps^2 for sin(n pi x) on (0, 1).
inline double chain_eigenvalue(double k, double eps, int n) {
  const double s = std::sin(n * M_PI * eps / 2.0);
  return 4.0 * k * s * s / (eps * eps);
}

inline LatticeField sine_mode(const LatticePtr& lat, int n) {
  LatticeField u(lat);
  for (Index p = 0; p < lat->num_points(); ++p) u.at(p)[0] = std::sin(n * M_PI * lat->point(p)[0]);
  u.zero_exterior();
  return u;
}

inline double max_abs_diff(const LatticeField& a, const LatticeField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace testing
