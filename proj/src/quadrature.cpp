#include "arealaw/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "arealaw/errors.hpp"

namespace arealaw {

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw ConfigError("quadrature order must be positive");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) jacobi(i, i - 1) = jacobi(i - 1, i) = std::sqrt(i / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  QuadratureRule rule;
  const double mu0 = std::sqrt(std::numbers::pi);
  for (int i = 0; i < n; ++i) {
    rule.nodes.push_back(es.eigenvalues()(i));
    double v = es.eigenvectors()(0, i);
    rule.weights.push_back(mu0 * v * v);
  }
  return rule;
}

QuadratureRule gaussian_time_rule(double q, double gap, int n, double window) {
  if (q <= 0.0 || gap <= 0.0) throw ConfigError("gaussian_time_rule: q and gap must be positive");
  // t = sqrt(2q)/gap * x turns the Gaussian into exp(-x^2) / sqrt(pi).
  QuadratureRule base = gauss_hermite(n);
  const double scale = std::sqrt(2.0 * q) / gap;
  const double cut = window * std::sqrt(q) / gap;
  QuadratureRule rule;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double t = scale * base.nodes[i];
    if (std::abs(t) > cut) continue;
    double w = base.weights[i] / std::sqrt(std::numbers::pi);
    rule.nodes.push_back(t);
    rule.weights.push_back(w);
    total += w;
  }
  for (double& w : rule.weights) w /= total;
  return rule;
}

} // namespace arealaw
