#include "causal_pulse/optimize.hpp"

#include <cmath>
#include <limits>

#include "causal_pulse/errors.hpp"

namespace causal_pulse {
namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const BoxBounds& b) { return x.cwiseMax(b.lower).cwiseMin(b.upper); }

}  // namespace

MinimizeResult minimize_box(const std::function<double(const Eigen::VectorXd&)>& objective, Eigen::VectorXd x0,
                            const BoxBounds& bounds, const MinimizeOptions& options) {
  const Eigen::Index n = x0.size();
  if (bounds.lower.size() != n || bounds.upper.size() != n) throw ArgumentError("minimize_box: bound size mismatch");

  MinimizeResult res;
  auto f = [&](const Eigen::VectorXd& x) {
    ++res.evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  Eigen::VectorXd x = clamp(x0, bounds);
  double fx = f(x);
  res.x = x;
  res.value = fx;
  if (!std::isfinite(fx)) return res;

  auto gradient = [&](const Eigen::VectorXd& at) {
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = options.fd_step * std::max(1.0, std::fabs(at(i)));
      Eigen::VectorXd up = at, dn = at;
      up(i) = std::min(at(i) + h, bounds.upper(i));
      dn(i) = std::max(at(i) - h, bounds.lower(i));
      const double width = up(i) - dn(i);
      if (width <= 0.0) {
        g(i) = 0.0;
        continue;
      }
      const double fu = up(i) == at(i) ? fx : f(up);
      const double fd = dn(i) == at(i) ? fx : f(dn);
      g(i) = (fu - fd) / width;
      if (!std::isfinite(g(i))) g(i) = 0.0;
    }
    return g;
  };

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g = gradient(x);
  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    Eigen::VectorXd active = Eigen::VectorXd::Zero(n);
    const double edge = 1e-12;
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((x(i) <= bounds.lower(i) + edge && g(i) > 0.0) || (x(i) >= bounds.upper(i) - edge && g(i) < 0.0)) active(i) = 1.0;
    }
    Eigen::VectorXd pg = g;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active(i) != 0.0) pg(i) = 0.0;
    }
    if (pg.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd d = -(h_inv * pg);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active(i) != 0.0) d(i) = 0.0;
    }
    if (d.dot(pg) >= 0.0) {
      h_inv.setIdentity();
      d = -pg;
    }

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = fx;
    for (int k = 0; k < 50; ++k) {
      x_new = clamp(x + step * d, bounds);
      f_new = f(x_new);
      if (f_new <= fx + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || !(f_new < fx) ) {
      if (!h_inv.isIdentity()) {
        h_inv.setIdentity();
        continue;
      }
      res.converged = accepted;
      break;
    }

    const double previous = fx;
    const Eigen::VectorXd s = x_new - x;
    x = x_new;
    fx = f_new;
    const Eigen::VectorXd g_new = gradient(x);
    const Eigen::VectorXd y = g_new - g;
    g = g_new;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
      h_inv = (eye - rho * s * y.transpose()) * h_inv * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    if (std::fabs(previous - fx) <= options.value_tolerance * (1.0 + std::fabs(fx))) {
      res.converged = true;
      break;
    }
  }
  res.x = x;
  res.value = fx;
  return res;
}

}  // namespace causal_pulse
