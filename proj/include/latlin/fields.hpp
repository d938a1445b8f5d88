#pragma once

#include "latlin/lattice.hpp"
#include "latlin/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace latlin {

/// R^d-valued function of a point in R^d: f(x, out).
using FieldFunction = std::function<void(std::span<const double>, std::span<double>)>;

/// One R^d vector per lattice point, stored point-major. Admissible fields
/// vanish at every point outside omega.
class LatticeField {
 public:
  LatticeField() = default;
  explicit LatticeField(LatticePtr lattice);
  LatticeField(LatticePtr lattice, std::vector<double> values);

  const LatticePtr& lattice() const { return lattice_; }
  int dim() const { return lattice_->dim(); }
  Index size() const { return lattice_->num_points(); }

  std::span<double> at(Index p) { return {values_.data() + p * dim(), static_cast<std::size_t>(dim())}; }
  std::span<const double> at(Index p) const {
    return {values_.data() + p * dim(), static_cast<std::size_t>(dim())};
  }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  void zero_exterior();
  bool is_admissible() const;

  LatticeField& axpy(double a, const LatticeField& x);
  LatticeField& scale(double a);

 private:
  LatticePtr lattice_;
  std::vector<double> values_;
};

LatticeField operator+(const LatticeField& a, const LatticeField& b);
LatticeField operator-(const LatticeField& a, const LatticeField& b);
LatticeField operator*(double s, const LatticeField& a);

/// One d x 2^d matrix per stored cell (column-major per cell).
class CellField {
 public:
  CellField() = default;
  explicit CellField(LatticePtr lattice);

  const LatticePtr& lattice() const { return lattice_; }
  Index size() const { return lattice_->num_cells(); }
  Index block() const { return static_cast<Index>(lattice_->dim()) * lattice_->corners(); }

  Eigen::Map<Eigen::MatrixXd> cell(Index c) {
    return {values_.data() + c * block(), lattice_->dim(), lattice_->corners()};
  }
  Eigen::Map<const Eigen::MatrixXd> cell(Index c) const {
    return {values_.data() + c * block(), lattice_->dim(), lattice_->corners()};
  }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

 private:
  LatticePtr lattice_;
  std::vector<double> values_;
};

enum class Centering { node, cell };

/// Field sampled on a uniform Cartesian grid. Values are row-major over the
/// grid (last axis fastest) with `ncomp` interleaved components per sample.
/// Node-centered samples sit at origin + h*i; cell-centered grids store one
/// value per grid cell with `origin` at the first cell center.
struct GridField {
  int dim = 1;
  int ncomp = 1;
  Centering centering = Centering::node;
  std::array<Index, 3> shape{1, 1, 1};
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::vector<double> values;

  static GridField zeros(int dim, int ncomp, Centering centering, std::array<Index, 3> shape,
                         std::array<double, 3> origin, std::array<double, 3> spacing);
  /// Nodal grid over a box with `cells_per_axis[a]` grid intervals on axis a.
  static GridField over_box(const Box& box, int ncomp, std::array<Index, 3> cells_per_axis);

  Index num_samples() const;
  Index flat(std::array<Index, 3> idx) const;
  std::array<Index, 3> unflat(Index flat) const;
  std::array<double, 3> position(Index flat) const;
  std::span<double> at(Index flat) { return {values.data() + flat * ncomp, static_cast<std::size_t>(ncomp)}; }
  std::span<const double> at(Index flat) const {
    return {values.data() + flat * ncomp, static_cast<std::size_t>(ncomp)};
  }
  double cell_measure() const;

  /// Multilinear interpolation for nodal grids, piecewise constant for
  /// cell-centered grids; zero outside the sampled box.
  void interpolate(std::span<const double> x, std::span<double> out) const;
  FieldFunction as_function() const;

  /// Trapezoid weights for nodal grids, midpoint weights for cell-centered ones.
  double l2_norm() const;
};

/// Atomistic inner product (u, v)_eps = eps^d det A sum_x u(x).v(x).
double inner_product(const LatticeField& u, const LatticeField& v);
double norm(const LatticeField& u);
/// max_x |u(x)| (Euclidean per point).
double max_norm(const LatticeField& u);

struct CellQuadrature {
  int points_per_axis = 6;
  int subdivisions = 1;
};

/// Mean of f over the cell x + eps*A*[0,1)^d, f with `ncomp` outputs.
void cell_mean(const Lattice& lattice, std::span<const double> lower_corner, const FieldFunction& f,
               int ncomp, const CellQuadrature& rule, std::span<double> out);

/// Local means P_eps w(x) over Q(x) = x + A[0,eps)^d of the zero extension of
/// w outside `support`. With `zero_exterior` the result is made admissible.
LatticeField project(const FieldFunction& w, const Box& support, const LatticePtr& lattice,
                     const CellQuadrature& rule = {}, bool zero_exterior = true);

/// Local means of a nodal grid field by cell-aligned sums. Requires a diagonal
/// basis with eps*A_aa an integer multiple of the grid spacing and lattice
/// points on grid nodes; the grid is extended by zero.
LatticeField project(const GridField& w, const LatticePtr& lattice, bool zero_exterior = true);

/// Piecewise-constant interpolation u~ = u(x) on Q(x), sampled on a
/// cell-centered grid with `subdivisions` samples per cell edge over the
/// union of stored cells. Requires a diagonal basis.
GridField pw_const_interp(const LatticeField& u, int subdivisions = 1);

/// Exact integral of u~ . v~ over omega_tilde.
double pw_const_inner(const LatticeField& u, const LatticeField& v);

/// ||u - P_eps w||_eps.
double ac_distance(const LatticeField& u, const FieldFunction& w, const Box& support,
                   const CellQuadrature& rule = {});
double ac_distance(const LatticeField& u, const GridField& w);

void require_same_lattice(const LatticeField& a, const LatticeField& b, const char* what);

}  // namespace latlin
