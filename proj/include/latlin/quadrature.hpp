#pragma once

#include <vector>

namespace latlin {

/// Gauss-Legendre rule on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

/// Composite rule on [0, 1]: `panels` equal panels with an n-point rule each.
GaussRule composite_gauss(int n, int panels);

}  // namespace latlin
