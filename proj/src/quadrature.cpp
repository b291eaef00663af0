#include "rmt/quadrature.hpp"

#include <cmath>

#include "rmt/error.hpp"

namespace rmt {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw InvalidSpec("gauss_legendre: need at least one node");
  // Symmetric Jacobi matrix of the Legendre recurrence.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = 2.0 * solver.eigenvectors().row(0).array().square().transpose();
  // Exact symmetry removes the last-bit asymmetry of the eigensolver.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes(j) - rule.nodes(i));
    const double w = 0.5 * (rule.weights(i) + rule.weights(j));
    rule.nodes(i) = -x;
    rule.nodes(j) = x;
    rule.weights(i) = w;
    rule.weights(j) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0.0;
  return rule;
}

GaussRule gauss_legendre(int n, double a, double b) {
  GaussRule rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  rule.nodes = (mid + half * rule.nodes.array()).matrix();
  rule.weights *= half;
  return rule;
}

GaussRule composite_gauss_legendre(int n, const Eigen::VectorXd& breakpoints) {
  const Eigen::Index panels = breakpoints.size() - 1;
  if (panels < 1) throw InvalidSpec("composite_gauss_legendre: need at least two breakpoints");
  const GaussRule base = gauss_legendre(n);
  GaussRule rule;
  rule.nodes.resize(panels * n);
  rule.weights.resize(panels * n);
  for (Eigen::Index p = 0; p < panels; ++p) {
    const double a = breakpoints(p);
    const double b = breakpoints(p + 1);
    if (!(b > a)) throw InvalidSpec("composite_gauss_legendre: breakpoints must increase");
    const double half = 0.5 * (b - a);
    rule.nodes.segment(p * n, n) = (0.5 * (a + b) + half * base.nodes.array()).matrix();
    rule.weights.segment(p * n, n) = half * base.weights;
  }
  return rule;
}

}  // namespace rmt
