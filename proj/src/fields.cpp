#include "latlin/fields.hpp"

#include "latlin/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace latlin {

void require_same_lattice(const LatticeField& a, const LatticeField& b, const char* what) {
  require(a.lattice() && b.lattice() && a.lattice()->same_as(*b.lattice()),
          ErrorCode::lattice_mismatch, std::string(what) + ": fields live on different lattices");
}

LatticeField::LatticeField(LatticePtr lattice)
    : lattice_(std::move(lattice)),
      values_(static_cast<std::size_t>(lattice_->num_points() * lattice_->dim()), 0.0) {}

LatticeField::LatticeField(LatticePtr lattice, std::vector<double> values)
    : lattice_(std::move(lattice)), values_(std::move(values)) {
  require(static_cast<Index>(values_.size()) == lattice_->num_points() * lattice_->dim(),
          ErrorCode::invalid_argument, "LatticeField: value count does not match the lattice");
}

void LatticeField::zero_exterior() {
  const int d = dim();
  for (Index p = 0; p < size(); ++p) {
    if (!lattice_->in_omega(p)) std::fill_n(values_.begin() + p * d, d, 0.0);
  }
}

bool LatticeField::is_admissible() const {
  const int d = dim();
  for (Index p = 0; p < size(); ++p) {
    if (lattice_->in_omega(p)) continue;
    for (int a = 0; a < d; ++a) {
      if (values_[p * d + a] != 0.0) return false;
    }
  }
  return true;
}

LatticeField& LatticeField::axpy(double a, const LatticeField& x) {
  require_same_lattice(*this, x, "axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * x.values_[i];
  return *this;
}

LatticeField& LatticeField::scale(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

LatticeField operator+(const LatticeField& a, const LatticeField& b) {
  LatticeField out = a;
  return out.axpy(1.0, b);
}

LatticeField operator-(const LatticeField& a, const LatticeField& b) {
  LatticeField out = a;
  return out.axpy(-1.0, b);
}

LatticeField operator*(double s, const LatticeField& a) {
  LatticeField out = a;
  return out.scale(s);
}

CellField::CellField(LatticePtr lattice)
    : lattice_(std::move(lattice)),
      values_(static_cast<std::size_t>(lattice_->num_cells() * lattice_->dim() * lattice_->corners()),
              0.0) {}

// ---------------------------------------------------------------------------
// GridField

GridField GridField::zeros(int dim, int ncomp, Centering centering, std::array<Index, 3> shape,
                           std::array<double, 3> origin, std::array<double, 3> spacing) {
  require(dim >= 1 && dim <= 3, ErrorCode::unsupported_dimension, "GridField: dim in 1..3");
  GridField g;
  g.dim = dim;
  g.ncomp = ncomp;
  g.centering = centering;
  for (int a = dim; a < 3; ++a) {
    shape[a] = 1;
    origin[a] = 0.0;
    spacing[a] = 1.0;
  }
  g.shape = shape;
  g.origin = origin;
  g.spacing = spacing;
  g.values.assign(static_cast<std::size_t>(g.num_samples() * ncomp), 0.0);
  return g;
}

GridField GridField::over_box(const Box& box, int ncomp, std::array<Index, 3> cells_per_axis) {
  std::array<Index, 3> shape{1, 1, 1};
  std::array<double, 3> origin{0, 0, 0};
  std::array<double, 3> h{1, 1, 1};
  for (int a = 0; a < box.dim(); ++a) {
    require(cells_per_axis[a] >= 1, ErrorCode::invalid_argument, "GridField: need >= 1 cell per axis");
    shape[a] = cells_per_axis[a] + 1;
    origin[a] = box.lo[a];
    h[a] = (box.hi[a] - box.lo[a]) / static_cast<double>(cells_per_axis[a]);
  }
  return zeros(box.dim(), ncomp, Centering::node, shape, origin, h);
}

Index GridField::num_samples() const { return shape[0] * shape[1] * shape[2]; }

Index GridField::flat(std::array<Index, 3> idx) const {
  return (idx[0] * shape[1] + idx[1]) * shape[2] + idx[2];
}

std::array<Index, 3> GridField::unflat(Index f) const {
  std::array<Index, 3> idx{};
  idx[2] = f % shape[2];
  f /= shape[2];
  idx[1] = f % shape[1];
  idx[0] = f / shape[1];
  return idx;
}

std::array<double, 3> GridField::position(Index f) const {
  const auto idx = unflat(f);
  std::array<double, 3> x{0, 0, 0};
  for (int a = 0; a < dim; ++a) x[a] = origin[a] + spacing[a] * static_cast<double>(idx[a]);
  return x;
}

double GridField::cell_measure() const {
  double m = 1.0;
  for (int a = 0; a < dim; ++a) m *= spacing[a];
  return m;
}

void GridField::interpolate(std::span<const double> x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (centering == Centering::cell) {
    std::array<Index, 3> idx{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      const double s = (x[a] - origin[a]) / spacing[a] + 0.5;
      const double fl = std::floor(s);
      if (fl < 0 || fl >= static_cast<double>(shape[a])) return;
      idx[a] = static_cast<Index>(fl);
    }
    const auto v = at(flat(idx));
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  std::array<Index, 3> base{0, 0, 0};
  std::array<double, 3> frac{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    const double s = (x[a] - origin[a]) / spacing[a];
    const double top = static_cast<double>(shape[a] - 1);
    if (s < -1e-12 || s > top + 1e-12) return;
    const double sc = std::clamp(s, 0.0, top);
    Index b = static_cast<Index>(std::floor(sc));
    if (b >= shape[a] - 1) b = std::max<Index>(shape[a] - 2, 0);
    base[a] = b;
    frac[a] = shape[a] > 1 ? sc - static_cast<double>(b) : 0.0;
  }
  for (int corner = 0; corner < (1 << dim); ++corner) {
    double w = 1.0;
    std::array<Index, 3> idx{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      const int bit = (corner >> a) & 1;
      if (bit && shape[a] == 1) {
        w = 0.0;
        break;
      }
      idx[a] = base[a] + bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (w == 0.0) continue;
    const auto v = at(flat(idx));
    for (int c = 0; c < ncomp; ++c) out[c] += w * v[c];
  }
}

FieldFunction GridField::as_function() const {
  return [this](std::span<const double> x, std::span<double> out) { interpolate(x, out); };
}

double GridField::l2_norm() const {
  double sum = 0.0;
  const double measure = cell_measure();
  for (Index f = 0; f < num_samples(); ++f) {
    double w = measure;
    if (centering == Centering::node) {
      const auto idx = unflat(f);
      for (int a = 0; a < dim; ++a) {
        if (shape[a] > 1 && (idx[a] == 0 || idx[a] == shape[a] - 1)) w *= 0.5;
      }
    }
    const auto v = at(f);
    for (int c = 0; c < ncomp; ++c) sum += w * v[c] * v[c];
  }
  return std::sqrt(sum);
}

// ---------------------------------------------------------------------------
// Atomistic inner product and projections

double inner_product(const LatticeField& u, const LatticeField& v) {
  require_same_lattice(u, v, "inner_product");
  double sum = 0.0;
  const auto& a = u.values();
  const auto& b = v.values();
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return u.lattice()->cell_volume() * sum;
}

double norm(const LatticeField& u) { return std::sqrt(inner_product(u, u)); }

double max_norm(const LatticeField& u) {
  double m = 0.0;
  for (Index p = 0; p < u.size(); ++p) {
    double s = 0.0;
    for (double x : u.at(p)) s += x * x;
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

void cell_mean(const Lattice& lattice, std::span<const double> lower_corner, const FieldFunction& f,
               int ncomp, const CellQuadrature& rule, std::span<double> out) {
  const int d = lattice.dim();
  const GaussRule g = composite_gauss(rule.points_per_axis, rule.subdivisions);
  const int nq = static_cast<int>(g.nodes.size());
  const Eigen::MatrixXd& A = lattice.spec().basis;
  const double eps = lattice.epsilon();
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> x(d);
  std::vector<double> val(ncomp);
  Index total = 1;
  for (int a = 0; a < d; ++a) total *= nq;
  Eigen::VectorXd s(d);
  for (Index q = 0; q < total; ++q) {
    Index rem = q;
    double w = 1.0;
    for (int a = d - 1; a >= 0; --a) {
      const int i = static_cast<int>(rem % nq);
      rem /= nq;
      s[a] = g.nodes[i];
      w *= g.weights[i];
    }
    const Eigen::VectorXd off = eps * (A * s);
    for (int a = 0; a < d; ++a) x[a] = lower_corner[a] + off[a];
    f(x, val);
    for (int c = 0; c < ncomp; ++c) out[c] += w * val[c];
  }
}

LatticeField project(const FieldFunction& w, const Box& support, const LatticePtr& lattice,
                     const CellQuadrature& rule, bool zero_exterior) {
  const int d = lattice->dim();
  require(support.dim() == d, ErrorCode::invalid_argument, "project: support box dimension");
  LatticeField out(lattice);
  const FieldFunction extended = [&](std::span<const double> x, std::span<double> v) {
    if (support.contains(x)) {
      w(x, v);
    } else {
      std::fill(v.begin(), v.end(), 0.0);
    }
  };
  for (Index p = 0; p < lattice->num_points(); ++p) {
    if (zero_exterior && !lattice->in_omega(p)) continue;
    cell_mean(*lattice, lattice->point(p), extended, d, rule, out.at(p));
  }
  return out;
}

namespace {

bool is_diagonal(const Eigen::MatrixXd& A) {
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      if (i != j && A(i, j) != 0.0) return false;
    }
  }
  return true;
}

Index snap_integer(double s, const char* what) {
  const double r = std::round(s);
  require(std::abs(s - r) <= 1e-8 * std::max(1.0, std::abs(r)), ErrorCode::quadrature_misalignment,
          std::string("grid misaligned with lattice cells: ") + what);
  return static_cast<Index>(r);
}

}  // namespace

LatticeField project(const GridField& w, const LatticePtr& lattice, bool zero_exterior) {
  const int d = lattice->dim();
  require(w.dim == d && w.ncomp == d, ErrorCode::invalid_argument,
          "project: grid field must be R^d valued on R^d");
  require(w.centering == Centering::node, ErrorCode::quadrature_misalignment,
          "project: grid projection needs a nodal grid");
  const Eigen::MatrixXd& A = lattice->spec().basis;
  require(is_diagonal(A), ErrorCode::quadrature_misalignment,
          "project: grid projection needs a diagonal lattice basis");
  std::array<Index, 3> m{1, 1, 1};
  for (int a = 0; a < d; ++a) {
    m[a] = snap_integer(lattice->epsilon() * A(a, a) / w.spacing[a], "cell edge / spacing");
    require(m[a] >= 1, ErrorCode::quadrature_misalignment, "grid coarser than the lattice");
  }
  // Composite trapezoid weights along one cell edge, normalized to a mean.
  std::array<std::vector<double>, 3> wts;
  for (int a = 0; a < 3; ++a) {
    if (a >= d) {
      wts[a] = {1.0};
      continue;
    }
    wts[a].assign(static_cast<std::size_t>(m[a] + 1), 1.0 / static_cast<double>(m[a]));
    wts[a].front() *= 0.5;
    wts[a].back() *= 0.5;
  }
  LatticeField out(lattice);
  for (Index p = 0; p < lattice->num_points(); ++p) {
    if (zero_exterior && !lattice->in_omega(p)) continue;
    const auto x = lattice->point(p);
    std::array<Index, 3> i0{0, 0, 0};
    for (int a = 0; a < d; ++a) i0[a] = snap_integer((x[a] - w.origin[a]) / w.spacing[a], "lattice point");
    auto acc = out.at(p);
    for (std::size_t i = 0; i < wts[0].size(); ++i) {
      for (std::size_t j = 0; j < wts[1].size(); ++j) {
        for (std::size_t k = 0; k < wts[2].size(); ++k) {
          const std::array<Index, 3> idx{i0[0] + static_cast<Index>(i), i0[1] + static_cast<Index>(j),
                                         i0[2] + static_cast<Index>(k)};
          bool inside = true;
          for (int a = 0; a < d; ++a) inside = inside && idx[a] >= 0 && idx[a] < w.shape[a];
          if (!inside) continue;
          const double weight = wts[0][i] * wts[1][j] * wts[2][k];
          const auto v = w.at(w.flat(idx));
          for (int c = 0; c < d; ++c) acc[c] += weight * v[c];
        }
      }
    }
  }
  return out;
}

GridField pw_const_interp(const LatticeField& u, int subdivisions) {
  const Lattice& lat = *u.lattice();
  const int d = lat.dim();
  require(subdivisions >= 1, ErrorCode::invalid_argument, "pw_const_interp: subdivisions >= 1");
  const Eigen::MatrixXd& A = lat.spec().basis;
  require(is_diagonal(A), ErrorCode::quadrature_misalignment,
          "pw_const_interp: grid sampling needs a diagonal lattice basis");
  std::vector<int> kmin(d, std::numeric_limits<int>::max());
  std::vector<int> kmax(d, std::numeric_limits<int>::min());
  for (Index c = 0; c < lat.num_cells(); ++c) {
    const auto key = lat.cell_key(c);
    for (int a = 0; a < d; ++a) {
      kmin[a] = std::min(kmin[a], key[a]);
      kmax[a] = std::max(kmax[a], key[a]);
    }
  }
  std::array<Index, 3> shape{1, 1, 1};
  std::array<double, 3> origin{0, 0, 0};
  std::array<double, 3> h{1, 1, 1};
  for (int a = 0; a < d; ++a) {
    const double edge = lat.epsilon() * A(a, a);
    h[a] = edge / subdivisions;
    shape[a] = static_cast<Index>(kmax[a] - kmin[a] + 1) * subdivisions;
    origin[a] = edge * kmin[a] + 0.5 * h[a];
  }
  GridField g = GridField::zeros(d, d, Centering::cell, shape, origin, h);
  std::vector<int> key(d);
  for (Index f = 0; f < g.num_samples(); ++f) {
    const auto idx = g.unflat(f);
    for (int a = 0; a < d; ++a) key[a] = kmin[a] + static_cast<int>(idx[a] / subdivisions);
    if (lat.find_cell(key) < 0) continue;
    // u~ = u(x) on Q(x) = x + A[0,eps)^d; x is the lower corner of the cell.
    const Index p = lat.find_point(key);
    const auto v = u.at(p);
    std::copy(v.begin(), v.end(), g.at(f).begin());
  }
  return g;
}

double pw_const_inner(const LatticeField& u, const LatticeField& v) {
  require_same_lattice(u, v, "pw_const_inner");
  const Lattice& lat = *u.lattice();
  double sum = 0.0;
  for (Index c = 0; c < lat.num_cells(); ++c) {
    const Index p = lat.find_point(lat.cell_key(c));
    const auto a = u.at(p);
    const auto b = v.at(p);
    for (int i = 0; i < lat.dim(); ++i) sum += a[i] * b[i];
  }
  return lat.cell_volume() * sum;
}

double ac_distance(const LatticeField& u, const FieldFunction& w, const Box& support,
                   const CellQuadrature& rule) {
  const LatticeField pw = project(w, support, u.lattice(), rule, true);
  return norm(u - pw);
}

double ac_distance(const LatticeField& u, const GridField& w) {
  const LatticeField pw = project(w, u.lattice(), true);
  return norm(u - pw);
}

}  // namespace latlin
