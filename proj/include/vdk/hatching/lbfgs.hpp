#pragma once

#include <functional>

#include <Eigen/Core>

namespace vdk {

struct LbfgsOptions {
  int history = 8;
  int maxIterations = 500;
  double gradientTolerance = 1e-6;  ///< on the infinity norm
  double armijo = 1e-4;
  int maxLineSearchSteps = 40;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double gradientNorm = 0.0;  ///< infinity norm at x
  int iterations = 0;
  bool converged = false;
};

/// f(x, grad) returns the objective and writes the gradient.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS with two-loop recursion and backtracking Armijo line
/// search. Returns the best iterate seen; converged is false when the
/// iteration cap, a failed line search or ten iterations without a
/// decrease above rounding stopped it first.
LbfgsResult minimizeLbfgs(const Objective& f, Eigen::VectorXd x0, const LbfgsOptions& options = {});

}  // namespace vdk
