#pragma once

#include <Eigen/Dense>
#include <functional>

namespace causal_pulse {

struct BoxBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct MinimizeOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
  double value_tolerance = 1e-11;
  double fd_step = 1e-5;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Projected BFGS with central finite-difference gradients and an Armijo
/// backtracking search along the projected path. Never returns a point
/// worse than the (clamped) starting point.
MinimizeResult minimize_box(const std::function<double(const Eigen::VectorXd&)>& objective, Eigen::VectorXd x0,
                            const BoxBounds& bounds, const MinimizeOptions& options = {});

}  // namespace causal_pulse
