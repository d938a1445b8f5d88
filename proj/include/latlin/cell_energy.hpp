#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace latlin {

/// Cell energy W: R^{d x 2^d} -> [0, inf) with its first and second
/// derivatives. F holds the 2^d corner positions as columns, in the corner
/// order of corner_labels().
///
/// Hessians are flattened column-major: row/column i + d*j addresses F(i, j),
/// so hess(F)(i + d*j, k + d*l) = d^2 W / dF_ij dF_kl.
class CellEnergyModel {
 public:
  using ConstRef = Eigen::Ref<const Eigen::MatrixXd>;

  virtual ~CellEnergyModel() = default;

  virtual std::string name() const = 0;
  virtual double eval(ConstRef F) const = 0;
  virtual void grad(ConstRef F, Eigen::Ref<Eigen::MatrixXd> out) const = 0;
  /// Default: central differences of grad with step 1e-5 * (1 + |F|).
  virtual Eigen::MatrixXd hess(ConstRef F) const;

  /// Model parameters plus where grad/hess come from ("analytic",
  /// "finite-difference", or a description of the split).
  virtual std::map<std::string, double> parameters() const = 0;
  virtual std::string grad_source() const { return "analytic"; }
  virtual std::string hess_source() const { return "finite-difference"; }
  /// True when D^2 W does not depend on F.
  virtual bool constant_hessian() const { return false; }

  int dim() const { return static_cast<int>(Z_.rows()); }
  int corners() const { return static_cast<int>(Z_.cols()); }
  const Eigen::MatrixXd& reference() const { return Z_; }

 protected:
  explicit CellEnergyModel(Eigen::MatrixXd Z) : Z_(std::move(Z)) {}
  Eigen::MatrixXd finite_difference_hess(ConstRef F) const;

 private:
  Eigen::MatrixXd Z_;
};

using ModelPtr = std::shared_ptr<const CellEnergyModel>;

/// d = 1 chain, W(F) = (k/2) (F_2 - F_1 - a)^2 with a = Z_2 - Z_1 the
/// reference bond length. All derivatives closed-form.
ModelPtr harmonic_chain(double k, const Eigen::MatrixXd& Z);
ModelPtr harmonic_chain(double k);

/// W(F) = (k/2) dist^2(M(F), SO(d)) + (mu/2) |F^ - M(F) Z^|^2 where F^ and Z^
/// are column-centered and M(F) = F^ Z^T (Z^ Z^T)^-1 is the best affine fit.
/// dist^2 uses the SVD with the smallest singular value flipped when
/// det M < 0. Gradient analytic; Hessian analytic on det M > 0 (polar
/// factor derivative), central differences otherwise.
ModelPtr cauchy_born_split(double mu, double k, const Eigen::MatrixXd& Z);

/// W(F) = |F^|^4. Violates the growth bound on DW; exists to exercise the
/// assumption checker.
ModelPtr quartic_probe(const Eigen::MatrixXd& Z);

/// Factory by name: "harmonic_chain" {k}, "cauchy_born_split" {mu, k},
/// "quartic_probe" {}.
ModelPtr make_model(const std::string& name, const std::map<std::string, double>& params,
                    const Eigen::MatrixXd& Z);

/// H = D^2 W(Z), symmetrized. Throws symmetry_violation when the raw Hessian
/// is asymmetric beyond 1e-6 relative.
Eigen::MatrixXd hessian_at_Z(const CellEnergyModel& model);

/// Fourth-order d x d x d x d tensor stored row-major in (i, j, k, l).
struct ElasticityTensor {
  int dim = 1;
  std::vector<double> c;

  double operator()(int i, int j, int k, int l) const {
    return c[((i * dim + j) * dim + k) * dim + l];
  }
  double& operator()(int i, int j, int k, int l) { return c[((i * dim + j) * dim + k) * dim + l]; }

  /// (C : S)_ij = C_ijkl S_kl.
  Eigen::MatrixXd contract(const Eigen::MatrixXd& S) const;
  /// G : C : G'.
  double bilinear(const Eigen::MatrixXd& G, const Eigen::MatrixXd& Gp) const;
  double minor_asymmetry() const;  // max |C_ijkl - C_jikl|
  double major_asymmetry() const;  // max |C_ijkl - C_klij|
  double max_abs() const;
  /// d^2 x d^2 matrix, row i*d+j, column k*d+l.
  Eigen::MatrixXd as_matrix() const;
  /// Largest eigenvalue over unit n of the acoustic tensor C_ipkq n_p n_q.
  double max_acoustic_eigenvalue(int samples = 2000) const;
};

/// C_ipkq = Z_pj H_ijkl Z_ql. Throws symmetry_violation when minor or major
/// symmetry fails beyond 1e-10 relative to max |C|.
ElasticityTensor elasticity_tensor(const Eigen::MatrixXd& H, const Eigen::MatrixXd& Z);

/// Orthonormal basis (columns) of the infinitesimal translations and rotations
/// of Z in the flattened F space.
Eigen::MatrixXd rigid_motion_basis(const Eigen::MatrixXd& Z);

struct AssumptionCheck {
  std::string id;  // "i" .. "v"
  std::string description;
  bool passed = false;
  double metric = 0.0;  // worst observed value of the tested quantity
  std::string witness;
};

struct AssumptionReport {
  std::string model;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<AssumptionCheck> checks;
  double fitted_gradient_constant = 0.0;  // c in |DW(F)| <= c (1 + |F|^2)

  bool all_passed() const;
};

/// Sampled checks of frame invariance, the zero set, Hessian positivity off
/// the rigid motions, quadratic growth on centered F, and quadratic gradient
/// growth. Deterministic for a given seed.
AssumptionReport check_assumptions(const CellEnergyModel& model, int trials, std::uint64_t seed);

/// Uniformly random rotation (QR of a Gaussian matrix, det fixed to +1).
template <class Rng>
Eigen::MatrixXd random_rotation(int d, Rng& rng);

}  // namespace latlin

#include <random>

namespace latlin {

template <class Rng>
Eigen::MatrixXd random_rotation(int d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  }
  if (Q.determinant() < 0) Q.col(0) *= -1.0;
  return Q;
}

}  // namespace latlin
