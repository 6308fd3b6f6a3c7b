#pragma once

#include <vector>

namespace arealaw {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Hermite rule for weight exp(-x^2), via Golub-Welsch.
QuadratureRule gauss_hermite(int n);

// Nodes t_k and weights w_k with sum_k w_k f(t_k) approximating
//   (gap / sqrt(2 pi q)) int dt f(t) exp(-(t gap)^2 / (2 q)),
// restricted to |t| <= window * sqrt(q) / gap. Weights are renormalized to
// sum to one after the window cut.
QuadratureRule gaussian_time_rule(double q, double gap, int n = 64, double window = 8.0);

} // namespace arealaw
