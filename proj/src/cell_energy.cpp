#include "latlin/cell_energy.hpp"

#include "latlin/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace latlin {

Eigen::MatrixXd CellEnergyModel::hess(ConstRef F) const { return finite_difference_hess(F); }

Eigen::MatrixXd CellEnergyModel::finite_difference_hess(ConstRef F) const {
  const int d = dim();
  const int n = corners();
  const int m = d * n;
  const double h = 1e-5 * (1.0 + F.norm());
  Eigen::MatrixXd H(m, m);
  Eigen::MatrixXd Fp = F;
  Eigen::MatrixXd Fm = F;
  Eigen::MatrixXd gp(d, n);
  Eigen::MatrixXd gm(d, n);
  for (int col = 0; col < m; ++col) {
    const int i = col % d;
    const int j = col / d;
    Fp(i, j) += h;
    Fm(i, j) -= h;
    grad(Fp, gp);
    grad(Fm, gm);
    Fp(i, j) = F(i, j);
    Fm(i, j) = F(i, j);
    const Eigen::MatrixXd diff = (gp - gm) / (2.0 * h);
    H.col(col) = Eigen::Map<const Eigen::VectorXd>(diff.data(), m);
  }
  return H;
}

namespace {

Eigen::MatrixXd centered(const Eigen::MatrixXd& F) {
  return F.colwise() - F.rowwise().mean();
}

void validate_reference(const Eigen::MatrixXd& Z, const char* who) {
  const int d = static_cast<int>(Z.rows());
  require(d >= 1 && d <= 3, ErrorCode::unsupported_dimension, std::string(who) + ": d must be 1..3");
  require(Z.cols() == (1 << d), ErrorCode::malformed_model,
          std::string(who) + ": reference configuration must be d x 2^d");
  require(Z.allFinite(), ErrorCode::malformed_model, std::string(who) + ": non-finite reference");
}

// ---------------------------------------------------------------------------

class HarmonicChain final : public CellEnergyModel {
 public:
  HarmonicChain(double k, Eigen::MatrixXd Z) : CellEnergyModel(std::move(Z)), k_(k) {
    rest_ = reference()(0, 1) - reference()(0, 0);
  }
  std::string name() const override { return "harmonic_chain"; }

  double eval(ConstRef F) const override {
    const double s = F(0, 1) - F(0, 0) - rest_;
    return 0.5 * k_ * s * s;
  }
  void grad(ConstRef F, Eigen::Ref<Eigen::MatrixXd> out) const override {
    const double s = k_ * (F(0, 1) - F(0, 0) - rest_);
    out(0, 0) = -s;
    out(0, 1) = s;
  }
  Eigen::MatrixXd hess(ConstRef) const override {
    Eigen::MatrixXd H(2, 2);
    H << k_, -k_, -k_, k_;
    return H;
  }
  std::map<std::string, double> parameters() const override { return {{"k", k_}, {"rest_length", rest_}}; }
  std::string hess_source() const override { return "analytic"; }
  bool constant_hessian() const override { return true; }

 private:
  double k_;
  double rest_;
};

// ---------------------------------------------------------------------------

class CauchyBornSplit final : public CellEnergyModel {
 public:
  CauchyBornSplit(double mu, double k, Eigen::MatrixXd Z) : CellEnergyModel(std::move(Z)), mu_(mu), k_(k) {
    const int n = corners();
    const Eigen::MatrixXd Zh = centered(reference());
    const Eigen::MatrixXd G = Zh * Zh.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
    const auto& s = svd.singularValues();
    require(s.minCoeff() > 1e-12 * std::max(1.0, s.maxCoeff()), ErrorCode::malformed_model,
            "cauchy_born_split: singular Z^ Z^T");
    P_ = Zh.transpose() * G.inverse();
    // Q = centering projector minus the affine projector; symmetric, idempotent.
    Q_ = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / n) - P_ * Zh;
    Q_ = 0.5 * (Q_ + Q_.transpose());
  }

  std::string name() const override { return "cauchy_born_split"; }

  double eval(ConstRef F) const override {
    const Eigen::MatrixXd M = F * P_;
    const Eigen::MatrixXd N = F * Q_;
    return 0.5 * k_ * dist2_so(M) + 0.5 * mu_ * N.squaredNorm();
  }

  void grad(ConstRef F, Eigen::Ref<Eigen::MatrixXd> out) const override {
    const Eigen::MatrixXd M = F * P_;
    const Eigen::MatrixXd R = nearest_rotation(M);
    out = k_ * (M - R) * P_.transpose() + mu_ * F * Q_;
  }

  Eigen::MatrixXd hess(ConstRef F) const override {
    const int d = dim();
    const int n = corners();
    const Eigen::MatrixXd M = F * P_;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::VectorXd sig = svd.singularValues();
    const double min_pair = d == 1 ? 2.0 * sig[0] : sig[d - 1] + sig[d - 2];
    if (M.determinant() <= 0.0 || min_pair <= 1e-8 * std::max(1.0, sig[0])) {
      return finite_difference_hess(F);
    }
    const Eigen::MatrixXd& U = svd.matrixU();
    const Eigen::MatrixXd& V = svd.matrixV();
    const Eigen::MatrixXd R = U * V.transpose();
    const int m = d * n;
    Eigen::MatrixXd H(m, m);
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(d, n);
    for (int col = 0; col < m; ++col) {
      const int i = col % d;
      const int j = col / d;
      E(i, j) = 1.0;
      const Eigen::MatrixXd dM = E * P_;
      const Eigen::MatrixXd B = V.transpose() * (R.transpose() * dM - dM.transpose() * R) * V;
      Eigen::MatrixXd Om(d, d);
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) Om(a, b) = B(a, b) / (sig[a] + sig[b]);
      }
      const Eigen::MatrixXd dR = R * V * Om * V.transpose();
      const Eigen::MatrixXd dG = k_ * (dM - dR) * P_.transpose() + mu_ * E * Q_;
      H.col(col) = Eigen::Map<const Eigen::VectorXd>(dG.data(), m);
      E(i, j) = 0.0;
    }
    return H;
  }

  std::map<std::string, double> parameters() const override { return {{"k", k_}, {"mu", mu_}}; }
  std::string hess_source() const override {
    return "analytic for det M > 0, finite-difference otherwise";
  }

 private:
  static double dist2_so(const Eigen::MatrixXd& M) {
    const int d = static_cast<int>(M.rows());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    Eigen::VectorXd s = svd.singularValues();
    if (M.determinant() < 0.0) s[d - 1] = -s[d - 1];
    return (s.array() - 1.0).square().sum();
  }

  // Closest rotation to M (polar factor with the sign-corrected SVD).
  static Eigen::MatrixXd nearest_rotation(const Eigen::MatrixXd& M) {
    const int d = static_cast<int>(M.rows());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::MatrixXd U = svd.matrixU();
    const Eigen::MatrixXd& V = svd.matrixV();
    if ((U * V.transpose()).determinant() < 0.0) U.col(d - 1) *= -1.0;
    return U * V.transpose();
  }

  double mu_;
  double k_;
  Eigen::MatrixXd P_;  // n x d
  Eigen::MatrixXd Q_;  // n x n
};

// ---------------------------------------------------------------------------

class QuarticProbe final : public CellEnergyModel {
 public:
  explicit QuarticProbe(Eigen::MatrixXd Z) : CellEnergyModel(std::move(Z)) {}
  std::string name() const override { return "quartic_probe"; }
  double eval(ConstRef F) const override {
    const double s = centered(F).squaredNorm();
    return s * s;
  }
  void grad(ConstRef F, Eigen::Ref<Eigen::MatrixXd> out) const override {
    const Eigen::MatrixXd Fh = centered(F);
    out = 4.0 * Fh.squaredNorm() * Fh;
  }
  std::map<std::string, double> parameters() const override { return {}; }
};

}  // namespace

ModelPtr harmonic_chain(double k, const Eigen::MatrixXd& Z) {
  require(k > 0.0 && std::isfinite(k), ErrorCode::malformed_model, "harmonic_chain: k must be positive");
  validate_reference(Z, "harmonic_chain");
  require(Z.rows() == 1, ErrorCode::unsupported_dimension, "harmonic_chain: d must be 1");
  require(Z(0, 1) > Z(0, 0), ErrorCode::malformed_model, "harmonic_chain: reference bond must be positive");
  return std::make_shared<HarmonicChain>(k, Z);
}

ModelPtr harmonic_chain(double k) {
  Eigen::MatrixXd Z(1, 2);
  Z << -0.5, 0.5;
  return harmonic_chain(k, Z);
}

ModelPtr cauchy_born_split(double mu, double k, const Eigen::MatrixXd& Z) {
  require(mu > 0.0 && k > 0.0 && std::isfinite(mu) && std::isfinite(k), ErrorCode::malformed_model,
          "cauchy_born_split: mu and k must be positive");
  validate_reference(Z, "cauchy_born_split");
  return std::make_shared<CauchyBornSplit>(mu, k, Z);
}

ModelPtr quartic_probe(const Eigen::MatrixXd& Z) {
  validate_reference(Z, "quartic_probe");
  return std::make_shared<QuarticProbe>(Z);
}

ModelPtr make_model(const std::string& name, const std::map<std::string, double>& params,
                    const Eigen::MatrixXd& Z) {
  auto get = [&](const char* key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "harmonic_chain") return harmonic_chain(get("k", 1.0), Z);
  if (name == "cauchy_born_split") return cauchy_born_split(get("mu", 1.0), get("k", 1.0), Z);
  if (name == "quartic_probe") return quartic_probe(Z);
  fail(ErrorCode::malformed_model, "unknown cell energy model '" + name + "'");
}

Eigen::MatrixXd hessian_at_Z(const CellEnergyModel& model) {
  const Eigen::MatrixXd H = model.hess(model.reference());
  require(H.allFinite(), ErrorCode::non_finite, "hessian_at_Z: non-finite Hessian");
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-6 * scale) {
    std::ostringstream msg;
    msg << "hessian_at_Z: Hessian of '" << model.name() << "' is not symmetric (max |H - H^T| = " << asym
        << ")";
    fail(ErrorCode::symmetry_violation, msg.str());
  }
  return 0.5 * (H + H.transpose());
}

// ---------------------------------------------------------------------------
// Elasticity tensor

Eigen::MatrixXd ElasticityTensor::contract(const Eigen::MatrixXd& S) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l) out(i, j) += (*this)(i, j, k, l) * S(k, l);
  return out;
}

double ElasticityTensor::bilinear(const Eigen::MatrixXd& G, const Eigen::MatrixXd& Gp) const {
  return (G.array() * contract(Gp).array()).sum();
}

double ElasticityTensor::minor_asymmetry() const {
  double m = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l) m = std::max(m, std::abs((*this)(i, j, k, l) - (*this)(j, i, k, l)));
  return m;
}

double ElasticityTensor::major_asymmetry() const {
  double m = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l) m = std::max(m, std::abs((*this)(i, j, k, l) - (*this)(k, l, i, j)));
  return m;
}

double ElasticityTensor::max_abs() const {
  double m = 0.0;
  for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

Eigen::MatrixXd ElasticityTensor::as_matrix() const {
  const int d2 = dim * dim;
  Eigen::MatrixXd out(d2, d2);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l) out(i * dim + j, k * dim + l) = (*this)(i, j, k, l);
  return out;
}

double ElasticityTensor::max_acoustic_eigenvalue(int samples) const {
  auto acoustic_max = [&](const Eigen::VectorXd& n) {
    Eigen::MatrixXd Aq = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int k = 0; k < dim; ++k)
        for (int p = 0; p < dim; ++p)
          for (int q = 0; q < dim; ++q) Aq(i, k) += (*this)(i, p, k, q) * n[p] * n[q];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Aq + Aq.transpose()));
    return es.eigenvalues().maxCoeff();
  };
  if (dim == 1) return (*this)(0, 0, 0, 0);
  double best = 0.0;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int a = 0; a < dim; ++a) best = std::max(best, acoustic_max(Eigen::VectorXd::Unit(dim, a)));
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd n(dim);
    for (int a = 0; a < dim; ++a) n[a] = normal(rng);
    if (n.norm() == 0.0) continue;
    best = std::max(best, acoustic_max(n / n.norm()));
  }
  return best;
}

ElasticityTensor elasticity_tensor(const Eigen::MatrixXd& H, const Eigen::MatrixXd& Z) {
  const int d = static_cast<int>(Z.rows());
  const int n = static_cast<int>(Z.cols());
  require(H.rows() == d * n && H.cols() == d * n, ErrorCode::invalid_argument,
          "elasticity_tensor: H must be (d 2^d) x (d 2^d)");
  ElasticityTensor C;
  C.dim = d;
  C.c.assign(static_cast<std::size_t>(d * d * d * d), 0.0);
  // C_ipkq = sum_{j,l} Z_pj H(i + d j, k + d l) Z_ql
  for (int i = 0; i < d; ++i)
    for (int p = 0; p < d; ++p)
      for (int k = 0; k < d; ++k)
        for (int q = 0; q < d; ++q) {
          double s = 0.0;
          for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) s += Z(p, j) * H(i + d * j, k + d * l) * Z(q, l);
          C(i, p, k, q) = s;
        }
  const double tol = 1e-10 * std::max(1.0, C.max_abs());
  if (C.minor_asymmetry() > tol || C.major_asymmetry() > tol) {
    std::ostringstream msg;
    msg << "elasticity_tensor: symmetry violation (minor " << C.minor_asymmetry() << ", major "
        << C.major_asymmetry() << ")";
    fail(ErrorCode::symmetry_violation, msg.str());
  }
  return C;
}

Eigen::MatrixXd rigid_motion_basis(const Eigen::MatrixXd& Z) {
  const int d = static_cast<int>(Z.rows());
  const int n = static_cast<int>(Z.cols());
  const int m = d * n;
  std::vector<Eigen::VectorXd> dirs;
  for (int a = 0; a < d; ++a) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(d, n);
    T.row(a).setOnes();
    dirs.emplace_back(Eigen::Map<const Eigen::VectorXd>(T.data(), m));
  }
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d);
      S(a, b) = 1.0;
      S(b, a) = -1.0;
      const Eigen::MatrixXd SZ = S * Z;
      dirs.emplace_back(Eigen::Map<const Eigen::VectorXd>(SZ.data(), m));
    }
  }
  Eigen::MatrixXd B(m, static_cast<Eigen::Index>(dirs.size()));
  for (std::size_t c = 0; c < dirs.size(); ++c) B.col(static_cast<Eigen::Index>(c)) = dirs[c];
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m, B.cols());
}

// ---------------------------------------------------------------------------
// Assumption checks

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed; });
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

Eigen::MatrixXd gaussian(int rows, int cols, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, sigma);
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = normal(rng);
  return M;
}

}  // namespace

AssumptionReport check_assumptions(const CellEnergyModel& model, int trials, std::uint64_t seed) {
  require(trials >= 1, ErrorCode::invalid_argument, "check_assumptions: trials >= 1");
  const int d = model.dim();
  const int n = model.corners();
  const Eigen::MatrixXd& Z = model.reference();
  std::mt19937_64 rng(seed);
  AssumptionReport report;
  report.model = model.name();
  report.trials = trials;
  report.seed = seed;

  // (i) frame invariance
  {
    AssumptionCheck c{"i", "W(R F + c 1^T) = W(F) for sampled rotations R and translations c", true, 0.0, ""};
    for (int t = 0; t < trials; ++t) {
      const Eigen::MatrixXd F = Z + gaussian(d, n, 0.3, rng);
      const Eigen::MatrixXd R = random_rotation(d, rng);
      const Eigen::VectorXd shift = gaussian(d, 1, 1.0, rng);
      const Eigen::MatrixXd G = (R * F).colwise() + shift;
      const double w = model.eval(F);
      const double err = std::abs(model.eval(G) - w) / (1.0 + std::abs(w));
      if (err > c.metric) {
        c.metric = err;
        c.witness = "trial " + std::to_string(t) + ": relative change " + fmt(err);
      }
    }
    c.passed = c.metric <= 1e-10;
    report.checks.push_back(c);
  }

  // (ii) zero set is exactly the rigid orbit of Z
  {
    AssumptionCheck c{"ii", "W = 0 on the rigid orbit of Z and W > 0 off it", true, 0.0, ""};
    double worst_orbit = 0.0;
    double min_off = std::numeric_limits<double>::infinity();
    std::string off_witness;
    for (int t = 0; t < trials; ++t) {
      const Eigen::MatrixXd R = random_rotation(d, rng);
      const Eigen::VectorXd shift = gaussian(d, 1, 1.0, rng);
      const Eigen::MatrixXd G = (R * Z).colwise() + shift;
      worst_orbit = std::max(worst_orbit, model.eval(G));
      const Eigen::MatrixXd F = Z + gaussian(d, n, 0.3, rng);
      const double w = model.eval(F);
      if (w < min_off) {
        min_off = w;
        off_witness = "off-orbit trial " + std::to_string(t) + ": W = " + fmt(w);
      }
    }
    c.metric = worst_orbit;
    c.passed = worst_orbit < 1e-12 && min_off > 0.0;
    c.witness = "max W on orbit " + fmt(worst_orbit) + "; min W off orbit " + fmt(min_off) + " (" +
                off_witness + ")";
    report.checks.push_back(c);
  }

  // (iii) Hessian positive definite off translations and rotations
  {
    AssumptionCheck c{"iii", "D^2 W(Z) positive definite on the complement of rigid motions", true, 0.0, ""};
    const Eigen::MatrixXd H = model.hess(Z);
    const Eigen::MatrixXd B = rigid_motion_basis(Z);
    const int m = d * n;
    Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(B);
    const Eigen::MatrixXd full = qr.matrixQ();
    const Eigen::MatrixXd comp = full.rightCols(m - B.cols());
    const Eigen::MatrixXd Hp = comp.transpose() * (0.5 * (H + H.transpose())) * comp;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hp);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    const double kernel = (H * B).cwiseAbs().maxCoeff();
    c.metric = lmin;
    c.passed = lmin > 1e-8 * lmax && kernel <= 1e-6 * lmax;
    c.witness = "min projected eigenvalue " + fmt(lmin) + "; |H b| on rigid motions " + fmt(kernel);
    report.checks.push_back(c);
  }

  // (iv) quadratic growth from below on V = {sum_i F_i = 0}
  {
    AssumptionCheck c{"iv", "W(F)/|F|^2 bounded below along rays in V at |F| = 10, 100, 1000", true, 0.0, ""};
    const double radii[3] = {10.0, 100.0, 1000.0};
    double min_ratio[3] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                           std::numeric_limits<double>::infinity()};
    double worst_decay = std::numeric_limits<double>::infinity();
    std::string witness;
    for (int t = 0; t < trials; ++t) {
      Eigen::MatrixXd D = centered(gaussian(d, n, 1.0, rng));
      D /= D.norm();
      double ratio[3];
      for (int r = 0; r < 3; ++r) {
        ratio[r] = model.eval(radii[r] * D) / (radii[r] * radii[r]);
        min_ratio[r] = std::min(min_ratio[r], ratio[r]);
      }
      const double decay = ratio[2] / std::max(ratio[1], std::numeric_limits<double>::min());
      if (decay < worst_decay) {
        worst_decay = decay;
        witness = "ray " + std::to_string(t) + ": ratios " + fmt(ratio[0]) + ", " + fmt(ratio[1]) + ", " +
                  fmt(ratio[2]);
      }
    }
    c.metric = min_ratio[2];
    c.passed = min_ratio[0] > 1e-6 && min_ratio[1] > 1e-6 && min_ratio[2] > 1e-6 && worst_decay >= 0.5;
    c.witness = witness + "; min ratio per radius " + fmt(min_ratio[0]) + ", " + fmt(min_ratio[1]) + ", " +
                fmt(min_ratio[2]);
    report.checks.push_back(c);
  }

  // (v) |DW(F)| <= c (1 + |F|^2)
  {
    AssumptionCheck c{"v", "|DW(F)| <= c (1 + |F|^2) with c independent of |F|", true, 0.0, ""};
    const double radii[3] = {10.0, 100.0, 1000.0};
    double cfit[3] = {0.0, 0.0, 0.0};
    double worst_growth = 0.0;
    std::string witness;
    double c_near = 0.0;
    Eigen::MatrixXd g(d, n);
    for (int t = 0; t < trials; ++t) {
      const Eigen::MatrixXd F = Z + gaussian(d, n, 1.0, rng);
      model.grad(F, g);
      c_near = std::max(c_near, g.norm() / (1.0 + F.squaredNorm()));
      Eigen::MatrixXd D = gaussian(d, n, 1.0, rng);
      D /= D.norm();
      double ratio[3];
      for (int r = 0; r < 3; ++r) {
        const Eigen::MatrixXd Fr = Z + radii[r] * D;
        model.grad(Fr, g);
        ratio[r] = g.norm() / (1.0 + Fr.squaredNorm());
        cfit[r] = std::max(cfit[r], ratio[r]);
      }
      const double growth = ratio[2] / std::max(ratio[1], std::numeric_limits<double>::min());
      if (growth > worst_growth) {
        worst_growth = growth;
        witness = "ray " + std::to_string(t) + ": |DW|/(1+|F|^2) = " + fmt(ratio[0]) + ", " + fmt(ratio[1]) +
                  ", " + fmt(ratio[2]) + " at |F| ~ 10, 100, 1000";
      }
    }
    report.fitted_gradient_constant = std::max({c_near, cfit[0], cfit[1], cfit[2]});
    c.metric = report.fitted_gradient_constant;
    // A bounded ratio cannot grow by more than the sampling noise between radii.
    c.passed = cfit[2] <= 2.0 * cfit[1] && cfit[1] <= 2.0 * std::max(cfit[0], c_near);
    c.witness = witness + "; fitted c = " + fmt(report.fitted_gradient_constant);
    report.checks.push_back(c);
  }
  return report;
}

}  // namespace latlin
