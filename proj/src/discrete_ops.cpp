#include "latlin/discrete_ops.hpp"

#include "latlin/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace latlin {

namespace {

constexpr Index kParallelThreshold = 4096;

unsigned worker_count(Index n) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<Index>(hw, std::max<Index>(1, n / (kParallelThreshold / 4))));
}

}  // namespace

void parallel_for(Index n, ExecutionMode mode, const std::function<void(Index, Index)>& body) {
  if (n <= 0) return;
  if (mode == ExecutionMode::audit || n < kParallelThreshold) {
    body(0, n);
    return;
  }
  const unsigned workers = worker_count(n);
  if (workers <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const Index chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const Index b = w * chunk;
    const Index e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  for (auto& t : pool) t.join();
}

void validate(const EnergyParams& p) {
  require(p.lattice != nullptr, ErrorCode::invalid_argument, "energy params: missing lattice");
  require(p.model != nullptr, ErrorCode::malformed_model, "energy params: missing model");
  require(p.delta > 0.0 && std::isfinite(p.delta), ErrorCode::invalid_argument, "delta must be positive");
  require(p.model->dim() == p.lattice->dim(), ErrorCode::malformed_model,
          "model dimension does not match the lattice");
  require((p.model->reference() - p.lattice->Z()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + p.lattice->Z().norm()),
          ErrorCode::malformed_model, "model reference configuration differs from the lattice corner labels");
}

namespace {

void require_lattice(const LatticeField& u, const EnergyParams& p) {
  validate(p);
  require(u.lattice() && u.lattice()->same_as(*p.lattice), ErrorCode::lattice_mismatch,
          "field lives on a different lattice than the energy");
}

// Writes grad u of cell c into out (d x 2^d).
void cell_gradient(const Lattice& lat, const std::vector<double>& u, Index c, double* out) {
  const int d = lat.dim();
  const int n = lat.corners();
  const double inv_eps = 1.0 / lat.epsilon();
  double mean[3] = {0.0, 0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const double* ui = u.data() + lat.cell_corner(c, i) * d;
    for (int a = 0; a < d; ++a) mean[a] += ui[a];
  }
  for (int a = 0; a < d; ++a) mean[a] /= n;
  for (int i = 0; i < n; ++i) {
    const double* ui = u.data() + lat.cell_corner(c, i) * d;
    for (int a = 0; a < d; ++a) out[i * d + a] = (ui[a] - mean[a]) * inv_eps;
  }
}

// Conjugate operator on raw cell-major storage; result is -grad* g.
void gather_divergence(const Lattice& lat, const std::vector<double>& g, ExecutionMode mode,
                       std::vector<double>& out) {
  const int d = lat.dim();
  const int n = lat.corners();
  const Index block = static_cast<Index>(d) * n;
  const double inv_eps = 1.0 / lat.epsilon();
  const double inv_n = 1.0 / n;
  out.assign(static_cast<std::size_t>(lat.num_points() * d), 0.0);
  parallel_for(lat.num_points(), mode, [&](Index begin, Index end) {
    for (Index p = begin; p < end; ++p) {
      if (!lat.in_omega(p)) continue;
      double acc[3] = {0.0, 0.0, 0.0};
      for (int j = 0; j < n; ++j) {
        const Index c = lat.adjacent_cell(p, j);
        if (c < 0) continue;
        const double* gc = g.data() + c * block;
        for (int a = 0; a < d; ++a) {
          double colsum = 0.0;
          for (int i = 0; i < n; ++i) colsum += gc[i * d + a];
          acc[a] += gc[j * d + a] - inv_n * colsum;
        }
      }
      for (int a = 0; a < d; ++a) out[p * d + a] = acc[a] * inv_eps;
    }
  });
}

}  // namespace

CellField discrete_gradient(const LatticeField& u, ExecutionMode mode) {
  const Lattice& lat = *u.lattice();
  CellField out(u.lattice());
  const Index block = out.block();
  parallel_for(lat.num_cells(), mode, [&](Index begin, Index end) {
    for (Index c = begin; c < end; ++c) cell_gradient(lat, u.values(), c, out.values().data() + c * block);
  });
  return out;
}

LatticeField discrete_divergence(const CellField& g, ExecutionMode mode) {
  LatticeField out(g.lattice());
  gather_divergence(*g.lattice(), g.values(), mode, out.values());
  for (double& v : out.values()) v = -v;
  return out;
}

CellField cell_stress(const LatticeField& u, const EnergyParams& p) {
  require_lattice(u, p);
  const Lattice& lat = *p.lattice;
  const CellEnergyModel& W = *p.model;
  const int d = lat.dim();
  const int n = lat.corners();
  CellField g(p.lattice);
  const Index block = g.block();
  const Eigen::MatrixXd& Z = lat.Z();
  parallel_for(lat.num_cells(), p.mode, [&](Index begin, Index end) {
    Eigen::MatrixXd F(d, n);
    Eigen::MatrixXd dw(d, n);
    for (Index c = begin; c < end; ++c) {
      cell_gradient(lat, u.values(), c, F.data());
      F = Z + p.delta * F;
      W.grad(F, dw);
      Eigen::Map<Eigen::MatrixXd>(g.values().data() + c * block, d, n) = dw / p.delta;
    }
  });
  return g;
}

double atomistic_energy(const LatticeField& u, const EnergyParams& p) {
  require_lattice(u, p);
  const Lattice& lat = *p.lattice;
  const CellEnergyModel& W = *p.model;
  const int d = lat.dim();
  const int n = lat.corners();
  const Eigen::MatrixXd& Z = lat.Z();
  const Index ncell = lat.num_cells();
  std::vector<double> per_cell(static_cast<std::size_t>(ncell));
  parallel_for(ncell, p.mode, [&](Index begin, Index end) {
    Eigen::MatrixXd F(d, n);
    for (Index c = begin; c < end; ++c) {
      cell_gradient(lat, u.values(), c, F.data());
      F = Z + p.delta * F;
      per_cell[c] = W.eval(F);
    }
  });
  double sum = 0.0;
  for (Index c = 0; c < ncell; ++c) {
    if (!std::isfinite(per_cell[c])) {
      std::ostringstream msg;
      msg << "atomistic_energy: non-finite cell energy at cell " << c << " (barycenter";
      for (double x : lat.barycenter(c)) msg << ' ' << x;
      msg << ")";
      fail(ErrorCode::non_finite, msg.str());
    }
    sum += per_cell[c];
  }
  return lat.cell_volume() / (p.delta * p.delta) * sum;
}

LatticeField atomistic_force(const LatticeField& u, const EnergyParams& p) {
  const CellField g = cell_stress(u, p);
  LatticeField out(p.lattice);
  gather_divergence(*p.lattice, g.values(), p.mode, out.values());
  return out;
}

LinearizedForce::LinearizedForce(const LatticeField& u, const EnergyParams& p)
    : lattice_(p.lattice), mode_(p.mode) {
  require_lattice(u, p);
  const Lattice& lat = *p.lattice;
  const CellEnergyModel& W = *p.model;
  const int d = lat.dim();
  const int n = lat.corners();
  block_ = d * n;
  const Index m2 = static_cast<Index>(block_) * block_;
  const Eigen::MatrixXd& Z = lat.Z();
  if (W.constant_hessian()) {
    shared_ = true;
    const Eigen::MatrixXd H = W.hess(Z);
    hessians_.assign(H.data(), H.data() + m2);
    return;
  }
  hessians_.assign(static_cast<std::size_t>(lat.num_cells() * m2), 0.0);
  parallel_for(lat.num_cells(), mode_, [&](Index begin, Index end) {
    Eigen::MatrixXd F(d, n);
    for (Index c = begin; c < end; ++c) {
      cell_gradient(lat, u.values(), c, F.data());
      F = Z + p.delta * F;
      const Eigen::MatrixXd H = W.hess(F);
      std::copy(H.data(), H.data() + m2, hessians_.begin() + c * m2);
    }
  });
}

LatticeField LinearizedForce::apply(const LatticeField& w) const {
  require(w.lattice() && w.lattice()->same_as(*lattice_), ErrorCode::lattice_mismatch,
          "LinearizedForce: field on a different lattice");
  const Lattice& lat = *lattice_;
  const Index ncell = lat.num_cells();
  const Index m2 = static_cast<Index>(block_) * block_;
  std::vector<double> s(static_cast<std::size_t>(ncell * block_));
  parallel_for(ncell, mode_, [&](Index begin, Index end) {
    Eigen::VectorXd gw(block_);
    for (Index c = begin; c < end; ++c) {
      cell_gradient(lat, w.values(), c, gw.data());
      const double* h = shared_ ? hessians_.data() : hessians_.data() + c * m2;
      Eigen::Map<Eigen::VectorXd>(s.data() + c * block_, block_) =
          Eigen::Map<const Eigen::MatrixXd>(h, block_, block_) * gw;
    }
  });
  LatticeField out(lattice_);
  gather_divergence(lat, s, mode_, out.values());
  return out;
}

}  // namespace latlin
