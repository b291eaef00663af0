#pragma once

#include <Eigen/Dense>

namespace rmt {

/// Gauss-Legendre nodes and weights.
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// n-point rule on [-1, 1] via the Golub-Welsch eigenproblem.
GaussRule gauss_legendre(int n);

/// n-point rule mapped affinely onto [a, b].
GaussRule gauss_legendre(int n, double a, double b);

/// Concatenation of per-panel rules (n nodes each) on consecutive panels
/// given by ascending breakpoints.
GaussRule composite_gauss_legendre(int n, const Eigen::VectorXd& breakpoints);

}  // namespace rmt
