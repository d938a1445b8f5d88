#include "latlin/smooth_fields.hpp"

#include "latlin/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace latlin {

FieldFunction SmoothField::value_fn() const {
  return [this](std::span<const double> x, std::span<double> out) { value(x, out); };
}

FieldFunction SmoothField::gradient_fn() const {
  return [this](std::span<const double> x, std::span<double> out) { gradient(x, out); };
}

namespace {

// beta(s) = exp(1 - 1/(1-s^2)) and its derivative.
void bump1d(double s, double& b, double& db) {
  if (std::abs(s) >= 1.0) {
    b = 0.0;
    db = 0.0;
    return;
  }
  const double q = 1.0 - s * s;
  b = std::exp(1.0 - 1.0 / q);
  db = b * (-2.0 * s / (q * q));
}

class ShapedField final : public SmoothField {
 public:
  explicit ShapedField(SmoothFieldSpec spec) : spec_(std::move(spec)) {}

  int dim() const override { return static_cast<int>(spec_.center.size()); }

  void value(std::span<const double> x, std::span<double> out) const override {
    double phi = 0.0;
    std::array<double, 3> dphi{};
    eval(x, phi, dphi);
    for (int i = 0; i < dim(); ++i) out[i] = spec_.amplitude[i] * phi;
  }

  void gradient(std::span<const double> x, std::span<double> out) const override {
    double phi = 0.0;
    std::array<double, 3> dphi{};
    eval(x, phi, dphi);
    const int d = dim();
    for (int i = 0; i < d; ++i) {
      for (int p = 0; p < d; ++p) out[i * d + p] = spec_.amplitude[i] * dphi[p];
    }
  }

 private:
  // phi and its gradient with respect to x.
  void eval(std::span<const double> x, double& phi, std::array<double, 3>& dphi) const {
    const int d = dim();
    dphi.fill(0.0);
    phi = 0.0;
    if (spec_.shape == "zero") return;
    std::array<double, 3> s{}, b{}, db{};
    double bump = 1.0;
    for (int a = 0; a < d; ++a) {
      s[a] = (x[a] - spec_.center[a]) / spec_.radius[a];
      bump1d(s[a], b[a], db[a]);
      bump *= b[a];
    }
    if (bump == 0.0) return;
    std::array<double, 3> dbump{};  // d bump / d s_a
    for (int a = 0; a < d; ++a) {
      double prod = db[a];
      for (int c = 0; c < d; ++c) {
        if (c != a) prod *= b[c];
      }
      dbump[a] = prod;
    }
    double m = 1.0;
    double dm = 0.0;  // d m / d s_0
    const double pf = std::numbers::pi * spec_.frequency;
    if (spec_.shape == "bump") {
    } else if (spec_.shape == "bump_sine") {
      m = std::sin(pf * s[0]);
      dm = pf * std::cos(pf * s[0]);
    } else if (spec_.shape == "bump_cos") {
      m = std::cos(pf * s[0]);
      dm = -pf * std::sin(pf * s[0]);
    } else if (spec_.shape == "bump_poly") {
      m = 1.0 + s[0] + s[0] * s[0];
      dm = 1.0 + 2.0 * s[0];
    }
    phi = bump * m;
    for (int a = 0; a < d; ++a) {
      double ds = dbump[a] * m;
      if (a == 0) ds += bump * dm;
      dphi[a] = ds / spec_.radius[a];
    }
  }

  SmoothFieldSpec spec_;
};

}  // namespace

SmoothFieldPtr make_smooth_field(const SmoothFieldSpec& spec) {
  static const char* shapes[] = {"zero", "bump", "bump_sine", "bump_cos", "bump_poly"};
  require(std::find(std::begin(shapes), std::end(shapes), spec.shape) != std::end(shapes),
          ErrorCode::config, "unknown smooth field shape '" + spec.shape + "'");
  const std::size_t d = spec.center.size();
  require(d >= 1 && d <= 3, ErrorCode::unsupported_dimension, "smooth field dimension must be 1..3");
  require(spec.radius.size() == d && spec.amplitude.size() == d, ErrorCode::config,
          "smooth field: center, radius and amplitude need the same length");
  for (double r : spec.radius) require(r > 0.0, ErrorCode::config, "smooth field radius must be positive");
  return std::make_shared<ShapedField>(spec);
}

}  // namespace latlin
