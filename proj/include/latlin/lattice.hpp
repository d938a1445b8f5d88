#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace latlin {

using Index = std::ptrdiff_t;

/// Axis-aligned box. `contains` is the open box, `contains_closed` the closed one.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(std::span<const double> x, double tol = 0.0) const;
  bool contains_closed(std::span<const double> x, double tol = 0.0) const;
  double volume() const;

  static Box unit(int dim);
};

struct LatticeSpec {
  int dim = 1;
  Eigen::MatrixXd basis;  // columns are the lattice vectors, det > 0
  double epsilon = 0.0;
  Box omega;        // reference domain, open
  Box omega_tilde;  // enlarged box holding the Dirichlet fringe, closed
};

/// Corner offsets of the centered reference cell, basis * {-1/2, 1/2}^d.
/// Column i corresponds to the i-th sign vector in lexicographic order
/// (-1/2 before +1/2, last coordinate fastest).
Eigen::MatrixXd corner_labels(int dim, const Eigen::MatrixXd& basis);

/// The {0,1}^d offsets of the cell corners relative to the lower corner,
/// in the same order as the columns of corner_labels. Row i = corner i.
std::vector<std::vector<int>> corner_offsets(int dim);

/// Scaled Bravais lattice eps*A*Z^d clipped to the closed box omega_tilde,
/// together with every cell whose closure lies in omega_tilde.
///
/// Points and cells are keyed by integer multi-indices. A point lambda sits at
/// eps*A*lambda; the cell with lower-corner key mu has barycenter
/// eps*A*(mu + 1/2) and corners mu + corner_offsets(d)[i].
class Lattice {
 public:
  static std::shared_ptr<const Lattice> build(const LatticeSpec& spec);

  const LatticeSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  int corners() const { return corners_; }
  double epsilon() const { return spec_.epsilon; }
  double cell_volume() const { return cell_volume_; }
  const Eigen::MatrixXd& Z() const { return Z_; }

  Index num_points() const { return static_cast<Index>(in_omega_.size()); }
  Index num_cells() const { return static_cast<Index>(cell_corners_.size()) / corners_; }

  std::span<const double> point(Index p) const {
    return {points_.data() + p * dim(), static_cast<std::size_t>(dim())};
  }
  std::span<const int> point_key(Index p) const {
    return {point_keys_.data() + p * dim(), static_cast<std::size_t>(dim())};
  }
  bool in_omega(Index p) const { return in_omega_[p] != 0; }
  Index num_omega_points() const { return num_omega_points_; }

  std::span<const double> barycenter(Index c) const {
    return {barycenters_.data() + c * dim(), static_cast<std::size_t>(dim())};
  }
  std::span<const int> cell_key(Index c) const {
    return {cell_keys_.data() + c * dim(), static_cast<std::size_t>(dim())};
  }

  /// Point index of corner i of cell c.
  Index cell_corner(Index c, int i) const { return cell_corners_[c * corners_ + i]; }
  std::span<const Index> cell_corner_table() const { return cell_corners_; }

  /// Cell whose corner j is point p, i.e. the cell with barycenter x - eps*z_j;
  /// -1 when that cell is not stored.
  Index adjacent_cell(Index p, int j) const { return point_cells_[p * corners_ + j]; }

  /// Point with the given key, or -1.
  Index find_point(std::span<const int> key) const;
  /// Cell with the given lower-corner key, or -1.
  Index find_cell(std::span<const int> key) const;

  /// Cell Q(xbar) = xbar + A[-eps/2, eps/2)^d containing x. Throws fringe_point
  /// when x is outside the union of stored cells.
  Index cell_of(std::span<const double> x) const;

  /// Position eps*A*s for reference coordinates s (not necessarily integer).
  Eigen::VectorXd to_physical(const Eigen::VectorXd& s) const;

  /// Stored cell Q(x) = x + A[0,eps)^d of lattice point p (lower corner at p), or -1.
  Index cell_above_point(Index p) const { return point_lower_cell_[p]; }

  bool same_as(const Lattice& other) const { return this == &other; }

 private:
  Lattice() = default;
  Index flat_point(std::span<const int> key) const;
  Index flat_cell(std::span<const int> key) const;

  LatticeSpec spec_;
  int corners_ = 2;
  double cell_volume_ = 0.0;
  Eigen::MatrixXd Z_;
  Eigen::MatrixXd scaled_basis_;      // eps*A
  Eigen::MatrixXd scaled_basis_inv_;  // (eps*A)^-1
  std::vector<int> key_lo_;
  std::vector<int> key_extent_;
  std::vector<Index> point_lookup_;
  std::vector<Index> cell_lookup_;
  std::vector<double> points_;
  std::vector<int> point_keys_;
  std::vector<char> in_omega_;
  Index num_omega_points_ = 0;
  std::vector<double> barycenters_;
  std::vector<int> cell_keys_;
  std::vector<Index> cell_corners_;
  std::vector<Index> point_cells_;
  std::vector<Index> point_lower_cell_;
};

using LatticePtr = std::shared_ptr<const Lattice>;

}  // namespace latlin
