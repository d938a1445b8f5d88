#include "latlin/continuum.hpp"

#include "latlin/error.hpp"
#include "latlin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace latlin {

namespace {

void require_nodal(const GridField& w, const char* who) {
  require(w.centering == Centering::node, ErrorCode::invalid_argument, std::string(who) + ": needs a nodal grid");
  for (int a = 0; a < w.dim; ++a) {
    require(w.shape[a] >= 3, ErrorCode::invalid_argument,
            std::string(who) + ": grid too coarse (need >= 3 nodes per axis)");
  }
}

std::array<Index, 3> stride_of(const GridField& g) {
  return {g.shape[1] * g.shape[2], g.shape[2], 1};
}

bool on_boundary(const GridField& g, const std::array<Index, 3>& idx) {
  for (int a = 0; a < g.dim; ++a) {
    if (idx[a] == 0 || idx[a] == g.shape[a] - 1) return true;
  }
  return false;
}

// (K w) at every interior node of a nodal grid, zero on the boundary;
// K w = -sum_{k,p,q} C_ipkq D_pq w_k.
void apply_stiffness(const GridField& g, const ElasticityTensor& C, const std::vector<double>& w,
                     std::vector<double>& out) {
  const int d = g.dim;
  const auto st = stride_of(g);
  out.assign(w.size(), 0.0);
  const Index n = g.num_samples();
  for (Index f = 0; f < n; ++f) {
    const auto idx = g.unflat(f);
    if (on_boundary(g, idx)) continue;
    double D[3][3][3];  // D[p][q][k]
    for (int p = 0; p < d; ++p) {
      const Index sp = st[p];
      const double hp = g.spacing[p];
      for (int k = 0; k < d; ++k) {
        D[p][p][k] = (w[(f + sp) * d + k] - 2.0 * w[f * d + k] + w[(f - sp) * d + k]) / (hp * hp);
      }
      for (int q = p + 1; q < d; ++q) {
        const Index sq = st[q];
        const double hq = g.spacing[q];
        for (int k = 0; k < d; ++k) {
          const double v = (w[(f + sp + sq) * d + k] - w[(f + sp - sq) * d + k] - w[(f - sp + sq) * d + k] +
                            w[(f - sp - sq) * d + k]) /
                           (4.0 * hp * hq);
          D[p][q][k] = v;
          D[q][p][k] = v;
        }
      }
    }
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int p = 0; p < d; ++p)
        for (int k = 0; k < d; ++k)
          for (int q = 0; q < d; ++q) s += C(i, p, k, q) * D[p][q][k];
      out[f * d + i] = -s;
    }
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Gradient (d x d, row-major i*d+p) at the center of the grid cell with lower node `base`.
void cell_center_gradient(const GridField& w, const std::array<Index, 3>& base, double* G) {
  const int d = w.dim;
  std::fill(G, G + d * d, 0.0);
  const int nc = 1 << d;
  const double inv = 1.0 / (1 << (d - 1));
  for (int p = 0; p < d; ++p) {
    for (int corner = 0; corner < nc; ++corner) {
      if ((corner >> p) & 1) continue;
      std::array<Index, 3> lo = base;
      for (int a = 0; a < d; ++a) lo[a] += (corner >> a) & 1;
      std::array<Index, 3> hi = lo;
      hi[p] += 1;
      const auto wl = w.at(w.flat(lo));
      const auto wh = w.at(w.flat(hi));
      for (int i = 0; i < d; ++i) G[i * d + p] += inv * (wh[i] - wl[i]) / w.spacing[p];
    }
  }
}

template <class Body>
void for_each_grid_cell(const GridField& w, Body&& body) {
  std::array<Index, 3> n{1, 1, 1};
  for (int a = 0; a < w.dim; ++a) n[a] = w.shape[a] - 1;
  for (Index i = 0; i < n[0]; ++i)
    for (Index j = 0; j < n[1]; ++j)
      for (Index k = 0; k < n[2]; ++k) body(std::array<Index, 3>{i, j, k});
}

double gcg(const ElasticityTensor& C, const double* G, const double* H) {
  const int d = C.dim;
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int p = 0; p < d; ++p)
      for (int k = 0; k < d; ++k)
        for (int q = 0; q < d; ++q) s += G[i * d + p] * C(i, p, k, q) * H[k * d + q];
  return s;
}

template <class Integrand>
double box_integral(const Box& omega, int panels, int points, Integrand&& f) {
  const int d = omega.dim();
  const GaussRule g = composite_gauss(points, panels);
  const Index nq = static_cast<Index>(g.nodes.size());
  Index total = 1;
  for (int a = 0; a < d; ++a) total *= nq;
  double vol = omega.volume();
  double sum = 0.0;
  std::vector<double> x(d);
  for (Index q = 0; q < total; ++q) {
    Index rem = q;
    double w = 1.0;
    for (int a = d - 1; a >= 0; --a) {
      const Index i = rem % nq;
      rem /= nq;
      x[a] = omega.lo[a] + (omega.hi[a] - omega.lo[a]) * g.nodes[i];
      w *= g.weights[i];
    }
    sum += w * f(x);
  }
  return vol * sum;
}

}  // namespace

GridField grid_gradient(const GridField& w) {
  require_nodal(w, "grid_gradient");
  const int d = w.dim;
  require(w.ncomp == d, ErrorCode::invalid_argument, "grid_gradient: field must be R^d valued");
  GridField out = GridField::zeros(d, d * d, Centering::node, w.shape, w.origin, w.spacing);
  const auto st = stride_of(w);
  for (Index f = 0; f < w.num_samples(); ++f) {
    const auto idx = w.unflat(f);
    auto G = out.at(f);
    for (int p = 0; p < d; ++p) {
      const Index s = st[p];
      const double h = w.spacing[p];
      const Index N = w.shape[p];
      for (int i = 0; i < d; ++i) {
        double g;
        if (idx[p] == 0) {
          g = (-3.0 * w.values[f * d + i] + 4.0 * w.values[(f + s) * d + i] - w.values[(f + 2 * s) * d + i]) /
              (2.0 * h);
        } else if (idx[p] == N - 1) {
          g = (3.0 * w.values[f * d + i] - 4.0 * w.values[(f - s) * d + i] + w.values[(f - 2 * s) * d + i]) /
              (2.0 * h);
        } else {
          g = (w.values[(f + s) * d + i] - w.values[(f - s) * d + i]) / (2.0 * h);
        }
        G[i * d + p] = g;
      }
    }
  }
  return out;
}

GridField symmetrized_gradient(const GridField& w) {
  GridField g = grid_gradient(w);
  const int d = w.dim;
  for (Index f = 0; f < g.num_samples(); ++f) {
    auto G = g.at(f);
    for (int i = 0; i < d; ++i) {
      for (int p = i + 1; p < d; ++p) {
        const double s = 0.5 * (G[i * d + p] + G[p * d + i]);
        G[i * d + p] = s;
        G[p * d + i] = s;
      }
    }
  }
  return g;
}

double continuum_energy(const GridField& w, const ElasticityTensor& C) {
  require_nodal(w, "continuum_energy");
  require(C.dim == w.dim && w.ncomp == w.dim, ErrorCode::invalid_argument,
          "continuum_energy: field and tensor dimensions differ");
  const double measure = w.cell_measure();
  double sum = 0.0;
  double G[9];
  for_each_grid_cell(w, [&](const std::array<Index, 3>& base) {
    cell_center_gradient(w, base, G);
    sum += gcg(C, G, G);
  });
  return 0.5 * measure * sum;
}

double continuum_bilinear(const SmoothField& w, const SmoothField& v, const ElasticityTensor& C,
                          const Box& omega, int panels, int points) {
  const int d = omega.dim();
  require(w.dim() == d && v.dim() == d && C.dim == d, ErrorCode::invalid_argument,
          "continuum_bilinear: dimension mismatch");
  std::vector<double> Gw(d * d);
  std::vector<double> Gv(d * d);
  return box_integral(omega, panels, points, [&](const std::vector<double>& x) {
    w.gradient(x, Gw);
    v.gradient(x, Gv);
    return gcg(C, Gw.data(), Gv.data());
  });
}

double continuum_energy(const SmoothField& w, const ElasticityTensor& C, const Box& omega, int panels,
                        int points) {
  return 0.5 * continuum_bilinear(w, w, C, omega, panels, points);
}

GridField continuum_force(const GridField& w, const ElasticityTensor& C) {
  require_nodal(w, "continuum_force");
  require(C.dim == w.dim && w.ncomp == w.dim, ErrorCode::invalid_argument,
          "continuum_force: field and tensor dimensions differ");
  GridField out = w;
  apply_stiffness(w, C, w.values, out.values);
  return out;
}

GridField sample_on_grid(const SmoothField& w, const GridField& like, bool zero_boundary) {
  GridField g = GridField::zeros(like.dim, w.dim(), Centering::node, like.shape, like.origin, like.spacing);
  for (Index f = 0; f < g.num_samples(); ++f) {
    if (zero_boundary && on_boundary(g, g.unflat(f))) continue;
    const auto x = g.position(f);
    w.value(std::span<const double>(x.data(), static_cast<std::size_t>(g.dim)), g.at(f));
  }
  return g;
}

// ---------------------------------------------------------------------------
// 1D spectral solution

SpectralSolution1D::SpectralSolution1D(const ContinuumProblem& pr, int modes, int panels)
    : rho_(pr.rho), nu_(pr.nu) {
  require(pr.C.dim == 1 && pr.omega.dim() == 1, ErrorCode::unsupported_dimension,
          "solve_1d_spectral: problem must be one-dimensional");
  require(modes >= 1, ErrorCode::invalid_argument, "solve_1d_spectral: need at least one mode");
  require(pr.w0 != nullptr, ErrorCode::invalid_argument, "solve_1d_spectral: missing w0");
  require(pr.nu >= 0.0 && pr.rho >= 0.0 && (pr.rho > 0.0 || pr.nu > 0.0), ErrorCode::invalid_argument,
          "solve_1d_spectral: need rho > 0 or nu > 0");
  c_ = pr.C(0, 0, 0, 0);
  require(c_ > 0.0, ErrorCode::invalid_argument, "solve_1d_spectral: C must be positive");
  lo_ = pr.omega.lo[0];
  length_ = pr.omega.hi[0] - lo_;
  if (panels <= 0) panels = std::max(256, 4 * modes);
  const GaussRule g = composite_gauss(8, panels);
  const std::size_t nq = g.nodes.size();
  std::vector<double> x(nq);
  std::vector<double> f0(nq);
  std::vector<double> f1(nq, 0.0);
  for (std::size_t q = 0; q < nq; ++q) {
    x[q] = lo_ + length_ * g.nodes[q];
    double val = 0.0;
    pr.w0->value(std::span<const double>(&x[q], 1), std::span<double>(&val, 1));
    f0[q] = val;
    if (pr.w1 && rho_ > 0.0) {
      pr.w1->value(std::span<const double>(&x[q], 1), std::span<double>(&val, 1));
      f1[q] = val;
    }
  }
  a0_.assign(modes, 0.0);
  b0_.assign(modes, 0.0);
  for (int n = 1; n <= modes; ++n) {
    double s0 = 0.0;
    double s1 = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
      const double phi = std::sin(n * std::numbers::pi * g.nodes[q]);
      s0 += g.weights[q] * f0[q] * phi;
      s1 += g.weights[q] * f1[q] * phi;
    }
    // (2/L) int_0^L f phi dx = 2 int_0^1 f phi ds
    a0_[n - 1] = 2.0 * s0;
    b0_[n - 1] = 2.0 * s1;
  }
}

double SpectralSolution1D::amplitude(int n, double t, double* rate) const {
  const double a0 = a0_[n - 1];
  const double kn = n * std::numbers::pi / length_;
  const double kappa = c_ * kn * kn;
  if (rho_ == 0.0) {
    const double a = a0 * std::exp(-kappa * t / nu_);
    *rate = -kappa / nu_ * a;
    return a;
  }
  const double b0 = b0_[n - 1];
  const double alpha = nu_ / (2.0 * rho_);
  const double disc = alpha * alpha - kappa / rho_;
  const double B = b0 + alpha * a0;
  // ECf = e^{-alpha t} Cf(t), ESf = e^{-alpha t} Sf(t) with Cf'' = disc Cf, Sf' = Cf.
  double ECf;
  double ESf;
  const double x = disc * t * t;
  if (std::abs(x) < 1e-6) {
    const double E = std::exp(-alpha * t);
    ECf = E * (1.0 + x / 2.0 + x * x / 24.0);
    ESf = E * t * (1.0 + x / 6.0 + x * x / 120.0);
  } else if (disc < 0.0) {
    const double om = std::sqrt(-disc);
    const double E = std::exp(-alpha * t);
    ECf = E * std::cos(om * t);
    ESf = E * std::sin(om * t) / om;
  } else {
    const double beta = std::sqrt(disc);
    const double ep = std::exp((beta - alpha) * t);
    const double em = std::exp(-(alpha + beta) * t);
    ECf = 0.5 * (ep + em);
    ESf = 0.5 * (ep - em) / beta;
  }
  const double a = a0 * ECf + B * ESf;
  *rate = -alpha * a + a0 * disc * ESf + B * ECf;
  return a;
}

void SpectralSolution1D::amplitudes(double t, std::vector<double>& a, std::vector<double>& adot) const {
  a.resize(a0_.size());
  adot.resize(a0_.size());
  for (int n = 1; n <= modes(); ++n) a[n - 1] = amplitude(n, t, &adot[n - 1]);
}

namespace {

// sum_n a_n sin(n theta) and sum_n a_n n cos(n theta) by the Chebyshev recurrence.
void sine_series(const std::vector<double>& a, double theta, double* value, double* deriv) {
  const double c2 = 2.0 * std::cos(theta);
  double s_prev = 0.0;
  double s_cur = std::sin(theta);
  double c_prev = 1.0;
  double c_cur = std::cos(theta);
  double v = 0.0;
  double dv = 0.0;
  for (std::size_t n = 1; n <= a.size(); ++n) {
    v += a[n - 1] * s_cur;
    dv += a[n - 1] * static_cast<double>(n) * c_cur;
    const double s_next = c2 * s_cur - s_prev;
    const double c_next = c2 * c_cur - c_prev;
    s_prev = s_cur;
    s_cur = s_next;
    c_prev = c_cur;
    c_cur = c_next;
  }
  *value = v;
  if (deriv) *deriv = dv;
}

}  // namespace

double SpectralSolution1D::value(double t, double x) const {
  if (x <= lo_ || x >= lo_ + length_) return 0.0;
  std::vector<double> a;
  std::vector<double> ad;
  amplitudes(t, a, ad);
  double v;
  sine_series(a, std::numbers::pi * (x - lo_) / length_, &v, nullptr);
  return v;
}

double SpectralSolution1D::derivative(double t, double x) const {
  if (x < lo_ || x > lo_ + length_) return 0.0;
  std::vector<double> a;
  std::vector<double> ad;
  amplitudes(t, a, ad);
  double v;
  double dv;
  sine_series(a, std::numbers::pi * (x - lo_) / length_, &v, &dv);
  return dv * std::numbers::pi / length_;
}

double SpectralSolution1D::energy(double t) const {
  std::vector<double> a;
  std::vector<double> ad;
  amplitudes(t, a, ad);
  double s = 0.0;
  for (int n = 1; n <= modes(); ++n) {
    const double kn = n * std::numbers::pi / length_;
    s += a[n - 1] * a[n - 1] * kn * kn;
  }
  return 0.5 * c_ * s * length_ / 2.0;
}

double SpectralSolution1D::velocity_norm2(double t) const {
  std::vector<double> a;
  std::vector<double> ad;
  amplitudes(t, a, ad);
  double s = 0.0;
  for (double x : ad) s += x * x;
  return s * length_ / 2.0;
}

SmoothFieldPtr SpectralSolution1D::snapshot(double t) const {
  auto a = std::make_shared<std::vector<double>>();
  std::vector<double> ad;
  amplitudes(t, *a, ad);
  const double lo = lo_;
  const double L = length_;
  FieldFunction value = [a, lo, L](std::span<const double> x, std::span<double> out) {
    if (x[0] <= lo || x[0] >= lo + L) {
      out[0] = 0.0;
      return;
    }
    sine_series(*a, std::numbers::pi * (x[0] - lo) / L, &out[0], nullptr);
  };
  FieldFunction grad = [a, lo, L](std::span<const double> x, std::span<double> out) {
    if (x[0] < lo || x[0] > lo + L) {
      out[0] = 0.0;
      return;
    }
    double v;
    double dv;
    sine_series(*a, std::numbers::pi * (x[0] - lo) / L, &v, &dv);
    out[0] = dv * std::numbers::pi / L;
  };
  return std::make_shared<FunctionField>(1, std::move(value), std::move(grad));
}

SpectralSolution1D solve_1d_spectral(const ContinuumProblem& problem, int modes, int panels) {
  return SpectralSolution1D(problem, modes, panels);
}

// ---------------------------------------------------------------------------
// Finite-difference solver

double FdSolution::max_relative_edie_residual() const {
  if (times.empty()) return 0.0;
  const double e0 = energy0;
  double m = 0.0;
  for (std::size_t s = 0; s < times.size(); ++s) {
    m = std::max(m, std::abs(kinetic[s] + potential[s] + dissipation[s] - e0));
  }
  return e0 > 0.0 ? m / e0 : m;
}

SmoothFieldPtr FdSolution::snapshot(std::size_t s) const {
  require(s < w.size(), ErrorCode::invalid_argument, "FdSolution::snapshot: index out of range");
  auto field = std::make_shared<GridField>(w[s]);
  auto grad = std::make_shared<GridField>(grid_gradient(w[s]));
  FieldFunction value = [field](std::span<const double> x, std::span<double> out) { field->interpolate(x, out); };
  FieldFunction gradient = [grad](std::span<const double> x, std::span<double> out) {
    grad->interpolate(x, out);
  };
  return std::make_shared<FunctionField>(field->dim, std::move(value), std::move(gradient));
}

FdSolution solve_fd(const ContinuumProblem& pr, const FdOptions& opt) {
  const int d = pr.C.dim;
  require(pr.omega.dim() == d, ErrorCode::invalid_argument, "solve_fd: domain and tensor dimension differ");
  require(pr.w0 != nullptr, ErrorCode::invalid_argument, "solve_fd: missing w0");
  require(pr.nu >= 0.0 && pr.rho >= 0.0 && (pr.rho > 0.0 || pr.nu > 0.0), ErrorCode::invalid_argument,
          "solve_fd: need rho > 0 or nu > 0");
  const double tol = 1e-10 * std::max(1.0, pr.C.max_abs());
  require(pr.C.minor_asymmetry() <= tol && pr.C.major_asymmetry() <= tol, ErrorCode::symmetry_violation,
          "solve_fd: elasticity tensor is not symmetric");
  for (int a = 0; a < d; ++a) {
    require(opt.cells[a] >= 2, ErrorCode::invalid_argument, "solve_fd: need >= 2 grid intervals per axis");
  }

  FdSolution sol;
  sol.grid = GridField::over_box(pr.omega, d, opt.cells);
  const GridField& g = sol.grid;
  const double measure = g.cell_measure();
  const bool viscous = pr.rho == 0.0;

  auto K = [&](const std::vector<double>& w, std::vector<double>& out) { apply_stiffness(g, pr.C, w, out); };

  // Largest eigenvalue of K by power iteration.
  {
    std::vector<double> x(g.values.size(), 0.0);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (Index f = 0; f < g.num_samples(); ++f) {
      if (on_boundary(g, g.unflat(f))) continue;
      for (int i = 0; i < d; ++i) x[f * d + i] = uni(rng);
    }
    std::vector<double> y;
    double lambda = 0.0;
    double nx = std::sqrt(dot(x, x));
    for (double& v : x) v /= nx;
    for (int it = 0; it < 500; ++it) {
      K(x, y);
      const double r = dot(x, y);
      const double ny = std::sqrt(dot(y, y));
      if (ny == 0.0) break;
      for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] / ny;
      if (it > 5 && std::abs(r - lambda) <= 1e-8 * std::abs(r)) {
        lambda = r;
        break;
      }
      lambda = r;
    }
    sol.lambda_max = 1.02 * lambda;
  }

  double hmin = std::numeric_limits<double>::infinity();
  for (int a = 0; a < d; ++a) hmin = std::min(hmin, g.spacing[a]);
  double bound;
  if (viscous) {
    bound = 2.5 * pr.nu / sol.lambda_max;
  } else {
    const double cmax = std::sqrt(pr.C.max_acoustic_eigenvalue() / pr.rho);
    const double disc = pr.nu * pr.nu - 4.0 * pr.rho * sol.lambda_max;
    const double mu = disc >= 0.0 ? (pr.nu + std::sqrt(disc)) / (2.0 * pr.rho) : std::sqrt(sol.lambda_max / pr.rho);
    bound = std::min(hmin / cmax, 2.0 / mu);
  }
  sol.dt_bound = bound;
  double dt_target = opt.dt;
  if (dt_target <= 0.0) {
    require(opt.dt_fraction > 0.0 && opt.dt_fraction <= 1.0, ErrorCode::invalid_argument,
            "solve_fd: dt_fraction must lie in (0, 1]");
    dt_target = opt.dt_fraction * bound;
  } else if (dt_target > bound) {
    std::ostringstream msg;
    msg << "solve_fd: dt = " << dt_target << " violates the stability bound " << bound;
    fail(ErrorCode::cfl_violation, msg.str());
  }

  std::vector<double> snaps = opt.snapshot_times;
  if (snaps.empty()) snaps = {0.0, pr.t_end};
  require(std::is_sorted(snaps.begin(), snaps.end()) && snaps.front() >= 0.0, ErrorCode::invalid_argument,
          "solve_fd: snapshot times must be ascending and nonnegative");

  std::vector<double> w = sample_on_grid(*pr.w0, g).values;
  std::vector<double> wt(w.size(), 0.0);
  if (!viscous && pr.w1) wt = sample_on_grid(*pr.w1, g).values;
  std::vector<double> Kw;
  K(w, Kw);
  if (viscous) {
    for (std::size_t i = 0; i < w.size(); ++i) wt[i] = -Kw[i] / pr.nu;
  }

  auto wtt_dot = [&](const std::vector<double>& wt_, const std::vector<double>& Kw_) {
    // d/dt |w_t|^2 = 2 w_t . w_tt
    if (viscous) {
      std::vector<double> Kwt;
      K(wt_, Kwt);
      return 2.0 * dot(wt_, Kwt) * (-1.0 / pr.nu);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < wt_.size(); ++i) s += wt_[i] * (-(pr.nu * wt_[i] + Kw_[i]) / pr.rho);
    return 2.0 * s;
  };

  sol.energy0 = 0.5 * measure * (dot(w, Kw) + pr.rho * dot(wt, wt));
  double t = 0.0;
  double diss = 0.0;
  double f_prev = measure * dot(wt, wt);
  double df_prev = measure * wtt_dot(wt, Kw);
  double dt_used = 0.0;

  auto record = [&]() {
    sol.times.push_back(t);
    GridField gw = g;
    gw.values = w;
    GridField gv = g;
    gv.values = wt;
    sol.w.push_back(std::move(gw));
    sol.wt.push_back(std::move(gv));
    sol.potential.push_back(0.5 * measure * dot(w, Kw));
    sol.kinetic.push_back(0.5 * pr.rho * measure * dot(wt, wt));
    sol.dissipation.push_back(pr.nu * diss);
  };

  const std::size_t m = w.size();
  std::vector<double> k1u(m), k1v(m), k2u(m), k2v(m), k3u(m), k3v(m), k4u(m), k4v(m), tu(m), tv(m), Kt;
  auto rhs = [&](const std::vector<double>& u, const std::vector<double>& v, std::vector<double>& du,
                 std::vector<double>& dv) {
    K(u, Kt);
    if (viscous) {
      for (std::size_t i = 0; i < m; ++i) du[i] = -Kt[i] / pr.nu;
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        du[i] = v[i];
        dv[i] = -(pr.nu * v[i] + Kt[i]) / pr.rho;
      }
    }
  };

  for (double target : snaps) {
    require(target <= pr.t_end + 1e-12 && target >= t - 1e-12, ErrorCode::invalid_argument,
            "solve_fd: snapshot time outside [0, t_end]");
    const double span = target - t;
    const long nsteps = span > 0.0 ? std::max(1L, static_cast<long>(std::ceil(span / dt_target - 1e-9))) : 0;
    const double h = nsteps > 0 ? span / static_cast<double>(nsteps) : 0.0;
    if (nsteps > 0) dt_used = std::max(dt_used, h);
    for (long s = 0; s < nsteps; ++s) {
      rhs(w, wt, k1u, k1v);
      for (std::size_t i = 0; i < m; ++i) {
        tu[i] = w[i] + 0.5 * h * k1u[i];
        tv[i] = wt[i] + 0.5 * h * k1v[i];
      }
      rhs(tu, tv, k2u, k2v);
      for (std::size_t i = 0; i < m; ++i) {
        tu[i] = w[i] + 0.5 * h * k2u[i];
        tv[i] = wt[i] + 0.5 * h * k2v[i];
      }
      rhs(tu, tv, k3u, k3v);
      for (std::size_t i = 0; i < m; ++i) {
        tu[i] = w[i] + h * k3u[i];
        tv[i] = wt[i] + h * k3v[i];
      }
      rhs(tu, tv, k4u, k4v);
      for (std::size_t i = 0; i < m; ++i) {
        w[i] += h / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
        if (!viscous) wt[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
      }
      K(w, Kw);
      if (viscous) {
        for (std::size_t i = 0; i < m; ++i) wt[i] = -Kw[i] / pr.nu;
      }
      t += h;
      const double f = measure * dot(wt, wt);
      const double df = measure * wtt_dot(wt, Kw);
      diss += 0.5 * h * (f_prev + f) + h * h / 12.0 * (df_prev - df);
      f_prev = f;
      df_prev = df;
    }
    t = target;
    record();
  }
  sol.dt = dt_used > 0.0 ? dt_used : dt_target;
  return sol;
}

}  // namespace latlin
