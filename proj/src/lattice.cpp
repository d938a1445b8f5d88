#include "latlin/lattice.hpp"

#include "latlin/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace latlin {

bool Box::contains(std::span<const double> x, double tol) const {
  for (int a = 0; a < dim(); ++a) {
    if (!(x[a] > lo[a] + tol && x[a] < hi[a] - tol)) return false;
  }
  return true;
}

bool Box::contains_closed(std::span<const double> x, double tol) const {
  for (int a = 0; a < dim(); ++a) {
    if (x[a] < lo[a] - tol || x[a] > hi[a] + tol) return false;
  }
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= hi[a] - lo[a];
  return v;
}

Box Box::unit(int dim) {
  return Box{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

std::vector<std::vector<int>> corner_offsets(int dim) {
  const int n = 1 << dim;
  std::vector<std::vector<int>> out(n, std::vector<int>(dim));
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < dim; ++a) {
      // first coordinate is the most significant bit: last coordinate fastest
      out[i][a] = (i >> (dim - 1 - a)) & 1;
    }
  }
  return out;
}

Eigen::MatrixXd corner_labels(int dim, const Eigen::MatrixXd& basis) {
  require(dim >= 1 && dim <= 3, ErrorCode::unsupported_dimension,
          "corner_labels: dimension must be 1, 2 or 3, got " + std::to_string(dim));
  require(basis.rows() == dim && basis.cols() == dim, ErrorCode::invalid_argument,
          "corner_labels: basis must be d x d");
  require(basis.determinant() > 0.0, ErrorCode::invalid_argument,
          "corner_labels: det A must be positive");
  const auto offsets = corner_offsets(dim);
  Eigen::MatrixXd signs(dim, 1 << dim);
  for (int i = 0; i < (1 << dim); ++i) {
    for (int a = 0; a < dim; ++a) signs(a, i) = offsets[i][a] - 0.5;
  }
  return basis * signs;
}

namespace {

void validate_box(const Box& b, int dim, const char* name) {
  require(b.dim() == dim && static_cast<int>(b.hi.size()) == dim, ErrorCode::invalid_argument,
          std::string(name) + " must have the lattice dimension");
  for (int a = 0; a < dim; ++a) {
    require(b.hi[a] > b.lo[a], ErrorCode::invalid_argument,
            std::string(name) + " must have positive extent on every axis");
  }
}

}  // namespace

std::shared_ptr<const Lattice> Lattice::build(const LatticeSpec& spec) {
  const int d = spec.dim;
  require(d >= 1 && d <= 3, ErrorCode::unsupported_dimension,
          "lattice dimension must be 1, 2 or 3");
  require(spec.epsilon > 0.0 && std::isfinite(spec.epsilon), ErrorCode::invalid_argument,
          "epsilon must be positive");
  validate_box(spec.omega, d, "omega");
  validate_box(spec.omega_tilde, d, "omega_tilde");

  std::shared_ptr<Lattice> lat(new Lattice());
  lat->spec_ = spec;
  lat->corners_ = 1 << d;
  lat->Z_ = corner_labels(d, spec.basis);
  lat->scaled_basis_ = spec.epsilon * spec.basis;
  lat->scaled_basis_inv_ = lat->scaled_basis_.inverse();
  lat->cell_volume_ = std::pow(spec.epsilon, d) * spec.basis.determinant();

  const double tol = 1e-9 * spec.epsilon * std::max(1.0, spec.basis.cwiseAbs().maxCoeff());
  const Box& tilde = spec.omega_tilde;

  // Key range covering omega_tilde: map the box corners to reference coordinates.
  std::vector<double> smin(d, std::numeric_limits<double>::infinity());
  std::vector<double> smax(d, -std::numeric_limits<double>::infinity());
  for (int c = 0; c < (1 << d); ++c) {
    Eigen::VectorXd x(d);
    for (int a = 0; a < d; ++a) x[a] = ((c >> a) & 1) ? tilde.hi[a] : tilde.lo[a];
    const Eigen::VectorXd s = lat->scaled_basis_inv_ * x;
    for (int a = 0; a < d; ++a) {
      smin[a] = std::min(smin[a], s[a]);
      smax[a] = std::max(smax[a], s[a]);
    }
  }
  lat->key_lo_.resize(d);
  lat->key_extent_.resize(d);
  Index total = 1;
  for (int a = 0; a < d; ++a) {
    const double lo = std::floor(smin[a]) - 1.0;
    const double hi = std::ceil(smax[a]) + 1.0;
    require(hi - lo < 1e7, ErrorCode::resolution_budget, "lattice too large");
    lat->key_lo_[a] = static_cast<int>(lo);
    lat->key_extent_[a] = static_cast<int>(hi - lo) + 1;
    total *= lat->key_extent_[a];
  }
  require(total < (Index{1} << 31), ErrorCode::resolution_budget, "lattice too large");

  // Points, in lexicographic key order.
  lat->point_lookup_.assign(total, -1);
  std::vector<int> key(d);
  for (Index flat = 0; flat < total; ++flat) {
    Index rem = flat;
    for (int a = d - 1; a >= 0; --a) {
      key[a] = lat->key_lo_[a] + static_cast<int>(rem % lat->key_extent_[a]);
      rem /= lat->key_extent_[a];
    }
    Eigen::VectorXd lam(d);
    for (int a = 0; a < d; ++a) lam[a] = key[a];
    const Eigen::VectorXd x = lat->scaled_basis_ * lam;
    if (!tilde.contains_closed({x.data(), static_cast<std::size_t>(d)}, tol)) continue;
    const Index p = lat->num_points();
    lat->point_lookup_[flat] = p;
    lat->points_.insert(lat->points_.end(), x.data(), x.data() + d);
    lat->point_keys_.insert(lat->point_keys_.end(), key.begin(), key.end());
    const bool inside = spec.omega.contains({x.data(), static_cast<std::size_t>(d)}, tol);
    lat->in_omega_.push_back(inside ? 1 : 0);
    if (inside) ++lat->num_omega_points_;
  }

  // Cells: every lower-corner key whose 2^d corners are stored points.
  const auto offsets = corner_offsets(d);
  lat->cell_lookup_.assign(total, -1);
  std::vector<int> ck(d);
  for (Index p = 0; p < lat->num_points(); ++p) {
    const auto base = lat->point_key(p);
    bool complete = true;
    std::vector<Index> corner_ids(lat->corners_);
    for (int i = 0; i < lat->corners_ && complete; ++i) {
      for (int a = 0; a < d; ++a) ck[a] = base[a] + offsets[i][a];
      corner_ids[i] = lat->find_point(ck);
      complete = corner_ids[i] >= 0;
    }
    if (!complete) continue;
    const Index c = lat->num_cells();
    lat->cell_lookup_[lat->flat_cell(base)] = c;
    lat->cell_keys_.insert(lat->cell_keys_.end(), base.begin(), base.end());
    lat->cell_corners_.insert(lat->cell_corners_.end(), corner_ids.begin(), corner_ids.end());
    Eigen::VectorXd s(d);
    for (int a = 0; a < d; ++a) s[a] = base[a] + 0.5;
    const Eigen::VectorXd xb = lat->scaled_basis_ * s;
    lat->barycenters_.insert(lat->barycenters_.end(), xb.data(), xb.data() + d);
  }

  if (lat->num_cells() == 0) {
    fail(ErrorCode::empty_lattice,
         "empty lattice: no cell of size epsilon fits inside omega_tilde");
  }

  // Every atom of omega must see all of its 2^d adjacent cells inside omega_tilde:
  // per axis the reach of eps*A*[-1,1]^d is eps * sum_b |A_ab|.
  for (int a = 0; a < d; ++a) {
    const double reach = spec.epsilon * spec.basis.row(a).cwiseAbs().sum();
    const double lo_margin = spec.omega.lo[a] - tilde.lo[a];
    const double hi_margin = tilde.hi[a] - spec.omega.hi[a];
    if (lo_margin < reach - tol || hi_margin < reach - tol) {
      std::ostringstream msg;
      msg << "margin violation on axis " << a << ": omega_tilde must extend omega by at least "
          << reach << " (have " << lo_margin << ", " << hi_margin << ")";
      fail(ErrorCode::margin_violation, msg.str());
    }
  }

  lat->point_cells_.assign(lat->num_points() * lat->corners_, -1);
  lat->point_lower_cell_.assign(lat->num_points(), -1);
  for (Index p = 0; p < lat->num_points(); ++p) {
    const auto base = lat->point_key(p);
    for (int j = 0; j < lat->corners_; ++j) {
      for (int a = 0; a < d; ++a) ck[a] = base[a] - offsets[j][a];
      lat->point_cells_[p * lat->corners_ + j] = lat->find_cell(ck);
    }
    lat->point_lower_cell_[p] = lat->find_cell(base);
  }
  return lat;
}

Index Lattice::flat_point(std::span<const int> key) const {
  Index flat = 0;
  for (int a = 0; a < dim(); ++a) {
    const int k = key[a] - key_lo_[a];
    if (k < 0 || k >= key_extent_[a]) return -1;
    flat = flat * key_extent_[a] + k;
  }
  return flat;
}

Index Lattice::flat_cell(std::span<const int> key) const { return flat_point(key); }

Index Lattice::find_point(std::span<const int> key) const {
  const Index flat = flat_point(key);
  return flat < 0 ? -1 : point_lookup_[flat];
}

Index Lattice::find_cell(std::span<const int> key) const {
  const Index flat = flat_cell(key);
  return flat < 0 ? -1 : cell_lookup_[flat];
}

Index Lattice::cell_of(std::span<const double> x) const {
  const int d = dim();
  require(static_cast<int>(x.size()) == d, ErrorCode::invalid_argument,
          "cell_of: point has wrong dimension");
  Eigen::VectorXd xv(d);
  for (int a = 0; a < d; ++a) xv[a] = x[a];
  const Eigen::VectorXd s = scaled_basis_inv_ * xv;
  std::vector<int> key(d);
  for (int a = 0; a < d; ++a) {
    double sa = s[a];
    // Snap roundoff so that faces land on the included (lower) side.
    const double r = std::round(sa);
    if (std::abs(sa - r) < 1e-10 * std::max(1.0, std::abs(r))) sa = r;
    key[a] = static_cast<int>(std::floor(sa));
  }
  const Index c = find_cell(key);
  if (c < 0) fail(ErrorCode::fringe_point, "cell_of: fringe point outside the stored cells");
  return c;
}

Eigen::VectorXd Lattice::to_physical(const Eigen::VectorXd& s) const {
  return scaled_basis_ * s;
}

}  // namespace latlin
