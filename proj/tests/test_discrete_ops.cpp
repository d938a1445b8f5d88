#include "doctest.h"
#include "support.hpp"

#include "latlin/error.hpp"

#include <cmath>

using namespace latlin;

namespace {

// eps^d det A sum_cells g : h.
double cell_inner(const CellField& g, const CellField& h) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.values().size(); ++i) s += g.values()[i] * h.values()[i];
  return g.lattice()->cell_volume() * s;
}

Index point_at(const Lattice& L, double x) {
  for (Index p = 0; p < L.num_points(); ++p)
    if (std::abs(L.point(p)[0] - x) < 1e-12) return p;
  return -1;
}

Index cell_at(const Lattice& L, double xbar) {
  for (Index c = 0; c < L.num_cells(); ++c)
    if (std::abs(L.barycenter(c)[0] - xbar) < 1e-12) return c;
  return -1;
}

struct Setup {
  LatticePtr lat;
  EnergyParams p;
};

Setup make_setup(int d, double eps, const std::string& model, Eigen::MatrixXd A = {}) {
  if (A.size() == 0) A = Eigen::MatrixXd::Identity(d, d);
  Setup s;
  s.lat = testing::unit_lattice(d, eps, A);
  const ModelPtr W = model == "harmonic_chain" ? harmonic_chain(1.3, s.lat->Z())
                                               : cauchy_born_split(0.7, 1.2, s.lat->Z());
  s.p = EnergyParams{eps, W, s.lat, ExecutionMode::audit};
  return s;
}

}  // namespace

TEST_CASE("discrete gradient on a short 1D profile") {
  const auto L = testing::unit_lattice(1, 0.25);
  LatticeField u(L);
  u.at(point_at(*L, 0.25))[0] = 0.1;
  u.at(point_at(*L, 0.5))[0] = 0.3;
  const CellField g = discrete_gradient(u);
  const double expect[3][3] = {{0.125, -0.2, 0.2}, {0.375, -0.4, 0.4}, {0.625, 0.6, -0.6}};
  for (const auto& e : expect) {
    const Index c = cell_at(*L, e[0]);
    REQUIRE(c >= 0);
    CHECK(g.cell(c)(0, 0) == doctest::Approx(e[1]).epsilon(1e-14));
    CHECK(g.cell(c)(0, 1) == doctest::Approx(e[2]).epsilon(1e-14));
  }
  CHECK(g.cell(cell_at(*L, 0.875)).norm() == 0.0);
  CHECK(g.cell(cell_at(*L, -0.125)).norm() == 0.0);
}

TEST_CASE("discrete gradient of constant and affine fields") {
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 0.4, 0.0, 0.9;
  const auto L = testing::unit_lattice(2, 0.125, A);
  Eigen::Matrix2d M;
  M << 0.3, -1.2, 0.7, 0.25;
  LatticeField c(L), affine(L);
  for (Index p = 0; p < L->num_points(); ++p) {
    const auto x = L->point(p);
    c.at(p)[0] = 2.0;
    c.at(p)[1] = -1.0;
    affine.at(p)[0] = M(0, 0) * x[0] + M(0, 1) * x[1];
    affine.at(p)[1] = M(1, 0) * x[0] + M(1, 1) * x[1];
  }
  const CellField gc = discrete_gradient(c);
  const CellField ga = discrete_gradient(affine);
  const Eigen::MatrixXd MZ = M * L->Z();
  for (Index k = 0; k < L->num_cells(); ++k) {
    CHECK(gc.cell(k).norm() < 1e-14);
    CHECK((ga.cell(k) - MZ).norm() < 1e-13);
  }
}

TEST_CASE("divergence of zero and constant stress") {
  const auto L = testing::unit_lattice(2, 0.125);
  CellField g(L);
  const LatticeField z = discrete_divergence(g);
  CHECK(testing::max_abs_diff(z, LatticeField(L)) == 0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::MatrixXd G(2, 4);
  for (Index i = 0; i < G.size(); ++i) G.data()[i] = U(rng);
  for (Index c = 0; c < L->num_cells(); ++c) g.cell(c) = G;
  const LatticeField div = discrete_divergence(g);
  for (Index p = 0; p < L->num_points(); ++p) {
    bool full = L->in_omega(p);
    for (int j = 0; j < L->corners(); ++j) full = full && L->adjacent_cell(p, j) >= 0;
    if (full) CHECK(std::abs(div.at(p)[0]) + std::abs(div.at(p)[1]) < 1e-12);
  }
}

TEST_CASE("summation by parts: (g, grad u) = -(u, grad* g)") {
  std::mt19937_64 rng(31);
  Eigen::MatrixXd A2(2, 2);
  A2 << 1.0, 0.5, 0.0, 1.0;
  for (const auto& A : {Eigen::MatrixXd(Eigen::MatrixXd::Identity(1, 1)), A2, Eigen::MatrixXd(Eigen::MatrixXd::Identity(3, 3))}) {
    const int d = static_cast<int>(A.rows());
    const auto L = testing::unit_lattice(d, d == 3 ? 0.25 : 0.0625, A);
    for (int t = 0; t < 5; ++t) {
      const auto u = testing::random_field(L, rng);
      const auto g = testing::random_cells(L, rng);
      const double lhs = cell_inner(g, discrete_gradient(u));
      const double rhs = -inner_product(u, discrete_divergence(g));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("harmonic chain energy and force are the discrete Dirichlet form and Laplacian") {
  const double k = 1.3;
  for (double delta : {1.0, 0.1, 1e-3}) {
    auto s = make_setup(1, 1.0 / 32, "harmonic_chain");
    s.p.delta = delta;
    std::mt19937_64 rng(2);
    const auto u = testing::random_field(s.lat, rng);
    const Lattice& L = *s.lat;
    const double eps = L.epsilon();
    double dir = 0.0;
    for (Index c = 0; c < L.num_cells(); ++c) {
      const double du = u.at(L.cell_corner(c, 1))[0] - u.at(L.cell_corner(c, 0))[0];
      dir += 0.5 * k * eps * (du / eps) * (du / eps);
    }
    CHECK(atomistic_energy(u, s.p) == doctest::Approx(dir).epsilon(1e-12));
    const LatticeField f = atomistic_force(u, s.p);
    for (Index p = 0; p < L.num_points(); ++p) {
      if (!L.in_omega(p)) {
        CHECK(f.at(p)[0] == 0.0);
        continue;
      }
      const double x = L.point(p)[0];
      const double lap = (u.at(point_at(L, x - eps))[0] - 2.0 * u.at(p)[0] + u.at(point_at(L, x + eps))[0]) /
                         (eps * eps);
      CHECK(f.at(p)[0] == doctest::Approx(-k * lap).epsilon(1e-10).scale(1.0 / (eps * eps)));
    }
  }
}

TEST_CASE("energy and force match the independent oracles") {
  std::mt19937_64 rng(44);
  for (const auto& [d, model] : {std::pair{1, "cauchy_born_split"}, std::pair{2, "cauchy_born_split"},
                                 std::pair{3, "cauchy_born_split"}}) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(d, d);
    if (d == 2) A(0, 1) = 0.3;
    auto s = make_setup(d, d == 3 ? 0.25 : 0.125, model, A);
    s.p.delta = 0.2;
    const auto u = testing::random_field(s.lat, rng, 0.3);
    CHECK(atomistic_energy(u, s.p) == doctest::Approx(testing::energy_oracle(u, *s.p.model, s.p.delta)).epsilon(1e-12));
    const auto f = atomistic_force(u, s.p);
    const auto fo = testing::force_oracle(u, *s.p.model, s.p.delta);
    CHECK(testing::max_abs_diff(f, fo) <= 1e-11 * std::max(1.0, max_norm(fo)));
    CHECK(f.is_admissible());
  }
}

TEST_CASE("force is the Riesz representative of the energy derivative") {
  std::mt19937_64 rng(5);
  for (int d : {1, 2}) {
    auto s = make_setup(d, 0.125, "cauchy_born_split");
    s.p.delta = 0.5;
    const auto u = testing::random_field(s.lat, rng, 0.2);
    const auto f = atomistic_force(u, s.p);
    for (int t = 0; t < 10; ++t) {
      const auto v = testing::random_field(s.lat, rng);
      const double h = 1e-5;
      const double fd = (atomistic_energy(u + h * v, s.p) - atomistic_energy(u - h * v, s.p)) / (2.0 * h);
      const double an = inner_product(f, v);
      CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("energy is nonnegative and vanishes at zero") {
  std::mt19937_64 rng(6);
  auto s = make_setup(2, 0.125, "cauchy_born_split");
  CHECK(atomistic_energy(LatticeField(s.lat), s.p) == 0.0);
  CHECK(max_norm(atomistic_force(LatticeField(s.lat), s.p)) == 0.0);
  for (int t = 0; t < 20; ++t) CHECK(atomistic_energy(testing::random_field(s.lat, rng, 3.0), s.p) >= 0.0);
}

TEST_CASE("interior cell energies are unchanged by shifting a compact support") {
  // u supported well inside omega; adding a constant on the support region
  // changes only cells that straddle its edge.
  auto s = make_setup(2, 1.0 / 16, "cauchy_born_split");
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(-0.1, 0.1);
  LatticeField u(s.lat), shifted(s.lat);
  auto in_box = [](std::span<const double> x, double lo, double hi) {
    return x[0] > lo && x[0] < hi && x[1] > lo && x[1] < hi;
  };
  for (Index p = 0; p < s.lat->num_points(); ++p) {
    const auto x = s.lat->point(p);
    if (in_box(x, 0.3, 0.7)) {
      u.at(p)[0] = U(rng);
      u.at(p)[1] = U(rng);
    }
    shifted.at(p)[0] = u.at(p)[0] + (in_box(x, 0.2, 0.8) ? 0.05 : 0.0);
    shifted.at(p)[1] = u.at(p)[1] + (in_box(x, 0.2, 0.8) ? -0.02 : 0.0);
  }
  const CellField g0 = cell_stress(u, s.p);
  const CellField g1 = cell_stress(shifted, s.p);
  Index compared = 0;
  for (Index c = 0; c < s.lat->num_cells(); ++c) {
    if (!in_box(s.lat->barycenter(c), 0.25, 0.75)) continue;
    CHECK((g0.cell(c) - g1.cell(c)).norm() < 1e-12);
    ++compared;
  }
  CHECK(compared > 0);
}

TEST_CASE("fast mode agrees with audit mode") {
  std::mt19937_64 rng(77);
  auto s = make_setup(2, 1.0 / 96, "cauchy_born_split");
  REQUIRE(s.lat->num_cells() > 8192);
  const auto u = testing::random_field(s.lat, rng, 0.1);
  EnergyParams fast = s.p;
  fast.mode = ExecutionMode::fast;
  const double e0 = atomistic_energy(u, s.p);
  CHECK(atomistic_energy(u, fast) == doctest::Approx(e0).epsilon(1e-12));
  const auto f0 = atomistic_force(u, s.p);
  CHECK(testing::max_abs_diff(f0, atomistic_force(u, fast)) <= 1e-12 * max_norm(f0));
  const auto g = testing::random_cells(s.lat, rng);
  const auto d0 = discrete_divergence(g);
  CHECK(testing::max_abs_diff(d0, discrete_divergence(g, ExecutionMode::fast)) <= 1e-12 * max_norm(d0));
  // Audit mode is bit-reproducible.
  CHECK(atomistic_energy(u, s.p) == e0);
}

TEST_CASE("linearized force matches the force at a quadratic model") {
  std::mt19937_64 rng(3);
  auto s = make_setup(1, 1.0 / 16, "harmonic_chain");
  const auto u = testing::random_field(s.lat, rng);
  const auto w = testing::random_field(s.lat, rng);
  const LinearizedForce J(u, s.p);
  CHECK(testing::max_abs_diff(J.apply(w), atomistic_force(w, s.p)) < 1e-10);
}

TEST_CASE("parameter validation") {
  auto s = make_setup(2, 0.125, "cauchy_born_split");
  EnergyParams bad = s.p;
  bad.delta = 0.0;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = s.p;
  bad.model = harmonic_chain(1.0);
  CHECK_THROWS_AS(validate(bad), Error);
}
