#include "latlin/quadrature.hpp"

#include "latlin/error.hpp"

#include <cmath>
#include <numbers>

namespace latlin {

GaussRule gauss_legendre(int n) {
  require(n >= 1 && n <= 64, ErrorCode::invalid_argument, "gauss_legendre: 1 <= n <= 64");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pm = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    }
    const double w = n == 1 ? 2.0 : 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

GaussRule composite_gauss(int n, int panels) {
  require(panels >= 1, ErrorCode::invalid_argument, "composite_gauss: panels >= 1");
  const GaussRule base = gauss_legendre(n);
  GaussRule out;
  out.nodes.reserve(static_cast<std::size_t>(n) * panels);
  out.weights.reserve(static_cast<std::size_t>(n) * panels);
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    for (int i = 0; i < n; ++i) {
      out.nodes.push_back((p + base.nodes[i]) * h);
      out.weights.push_back(base.weights[i] * h);
    }
  }
  return out;
}

}  // namespace latlin
