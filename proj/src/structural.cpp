#include "causal_pulse/structural.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "causal_pulse/errors.hpp"
#include "causal_pulse/optimize.hpp"

namespace causal_pulse {
namespace {

constexpr double kLowerVarianceRatio = 1e-10;
constexpr double kUpperVarianceRatio = 10.0;

// Starting points as fractions of the target variance: (obs, level, slope).
constexpr std::array<std::array<double, 3>, kMleRestarts> kStarts{{
    {0.5, 0.1, 1e-2},
    {0.1, 0.5, 1e-3},
    {0.9, 1e-2, 1e-4},
    {5e-2, 5e-2, 1e-5},
    {0.3, 0.3, 5e-2},
}};

// P <- T P T' for the trend transition (level += slope), then add Q.
void predict_covariance(Eigen::MatrixXd& p, double q_level, double q_slope) {
  p.row(0) += p.row(1);
  p.col(0) += p.col(1);
  p(0, 0) += q_level;
  p(1, 1) += q_slope;
}

}  // namespace

StructuralModel make_structural_model(const Eigen::VectorXd& target, std::vector<std::string> regressor_names) {
  if (target.size() == 0) throw ArgumentError("make_structural_model: empty target");
  StructuralModel model;
  model.regressor_names = std::move(regressor_names);
  const double n = static_cast<double>(target.size());
  const double mean = target.mean();
  const double var = target.size() > 1 ? (target.array() - mean).square().sum() / (n - 1.0) : 0.0;
  double scale = std::max(var, 1e-8 * mean * mean);
  if (!(scale > 0.0)) scale = 1.0;
  model.scale = scale;
  model.diffuse_variance = kDiffuseMultiplier * scale;
  model.initial_level = target(0);
  const double ls = std::log(scale);
  model.log_variances << ls + std::log(kStarts[0][0]), ls + std::log(kStarts[0][1]), ls + std::log(kStarts[0][2]);
  return model;
}

FilterOutput kalman_filter(const StructuralModel& model, const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                           bool track_psd) {
  const auto n = y.size();
  const auto r = static_cast<Eigen::Index>(model.regressor_names.size());
  const auto m = static_cast<Eigen::Index>(model.state_dim());
  if (x.rows() != n || x.cols() != r) throw ArgumentError("kalman_filter: design does not match target/regressors");

  const double h = model.obs_variance();
  const double q_level = model.level_variance();
  const double q_slope = model.slope_variance();
  const auto burn = static_cast<Eigen::Index>(model.burn_in());

  FilterOutput out;
  out.innovations.resize(n);
  out.innovation_variances.resize(n);
  out.one_step_predictions.resize(n);
  out.min_relative_eigenvalue = std::numeric_limits<double>::infinity();

  Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
  a(0) = model.initial_level;
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(m, m) * model.diffuse_variance;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  z(0) = 1.0;

  constexpr double kLog2Pi = 1.8378770664093453;  // ln(2 pi)
  double ll = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (r > 0) z.tail(r) = x.row(t).transpose();
    const double pred = z.dot(a);
    const double v = y(t) - pred;
    const Eigen::VectorXd pz = p * z;
    const double f = z.dot(pz) + h;
    if (!(f > 0.0) || !std::isfinite(f) || !std::isfinite(v)) {
      out.log_likelihood = -std::numeric_limits<double>::infinity();
      return out;
    }
    out.innovations(t) = v;
    out.innovation_variances(t) = f;
    out.one_step_predictions(t) = pred;
    if (t >= burn) ll -= 0.5 * (kLog2Pi + std::log(f) + v * v / f);

    a.noalias() += pz * (v / f);
    p.noalias() -= pz * pz.transpose() / f;
    p = 0.5 * (p + p.transpose()).eval();
    if (track_psd) {
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p, Eigen::EigenvaluesOnly);
      const double top = es.eigenvalues().cwiseAbs().maxCoeff();
      if (top > 0.0) out.min_relative_eigenvalue = std::min(out.min_relative_eigenvalue, es.eigenvalues()(0) / top);
    }

    a(0) += a(1);
    predict_covariance(p, q_level, q_slope);
  }
  out.log_likelihood = ll;
  out.predicted_state = a;
  out.predicted_cov = p;
  return out;
}

StructuralModel fit_mle(StructuralModel model, const Eigen::VectorXd& target, const Eigen::MatrixXd& design) {
  if (!target.allFinite()) throw NonAnalysableError("fit failure: target contains non-finite values");
  if (static_cast<std::size_t>(target.size()) <= model.burn_in() + 3) {
    throw NonAnalysableError("fit failure: " + std::to_string(target.size()) + " observations for " +
                             std::to_string(model.state_dim()) + " diffuse states");
  }
  const double ls = std::log(model.scale);
  BoxBounds bounds{Eigen::Vector3d::Constant(ls + std::log(kLowerVarianceRatio)),
                   Eigen::Vector3d::Constant(ls + std::log(kUpperVarianceRatio))};
  const double n_eff = static_cast<double>(static_cast<std::size_t>(target.size()) - model.burn_in());

  StructuralModel trial = model;
  auto objective = [&](const Eigen::VectorXd& theta) {
    trial.log_variances = theta;
    const double ll = kalman_filter(trial, target, design).log_likelihood;
    return std::isfinite(ll) ? -ll / n_eff : std::numeric_limits<double>::infinity();
  };

  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_theta = model.log_variances;
  int converged = 0;
  for (const auto& start : kStarts) {
    Eigen::VectorXd theta0(3);
    theta0 << ls + std::log(start[0]), ls + std::log(start[1]), ls + std::log(start[2]);
    const MinimizeResult res = minimize_box(objective, theta0, bounds);
    if (res.converged) ++converged;
    if (std::isfinite(res.value) && res.value < best) {
      best = res.value;
      best_theta = res.x;
    }
  }
  if (!std::isfinite(best)) throw NonAnalysableError("fit failure: likelihood is non-finite at every restart");

  model.log_variances = best_theta;
  const FilterOutput fo = kalman_filter(model, target, design);
  model.log_likelihood = fo.log_likelihood;
  model.state = fo.predicted_state;
  model.state_cov = fo.predicted_cov;
  model.n_obs = static_cast<std::size_t>(target.size());
  model.restarts_converged = converged;
  model.fitted = true;
  return model;
}

StructuralForecast forecast(const StructuralModel& fitted, const Eigen::MatrixXd& post_design) {
  if (!fitted.fitted) throw ArgumentError("forecast: model has not been fitted");
  const auto r = static_cast<Eigen::Index>(fitted.regressor_names.size());
  if (post_design.cols() != r) throw ArgumentError("forecast: post design has the wrong number of columns");
  const auto horizon = post_design.rows();
  const auto m = static_cast<Eigen::Index>(fitted.state_dim());

  StructuralForecast out;
  out.mean.resize(horizon);
  out.variance.resize(horizon);
  Eigen::VectorXd a = fitted.state;
  Eigen::MatrixXd p = fitted.state_cov;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  z(0) = 1.0;
  for (Eigen::Index h = 0; h < horizon; ++h) {
    if (r > 0) z.tail(r) = post_design.row(h).transpose();
    out.mean(h) = z.dot(a);
    out.variance(h) = z.dot(p * z) + fitted.obs_variance();
    a(0) += a(1);
    predict_covariance(p, fitted.level_variance(), fitted.slope_variance());
  }
  return out;
}

Eigen::MatrixXd simulate_paths(const StructuralModel& fitted, const Eigen::MatrixXd& post_design, std::size_t draws,
                               std::mt19937_64& rng) {
  if (!fitted.fitted) throw ArgumentError("simulate_paths: model has not been fitted");
  const auto r = static_cast<Eigen::Index>(fitted.regressor_names.size());
  if (post_design.cols() != r) throw ArgumentError("simulate_paths: post design has the wrong number of columns");
  const auto horizon = post_design.rows();
  const auto m = static_cast<Eigen::Index>(fitted.state_dim());

  // Symmetric square root of the (PSD) state covariance.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fitted.state_cov);
  const Eigen::MatrixXd root =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  const double sd_obs = std::sqrt(fitted.obs_variance());
  const double sd_level = std::sqrt(fitted.level_variance());
  const double sd_slope = std::sqrt(fitted.slope_variance());

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd paths(static_cast<Eigen::Index>(draws), horizon);
  Eigen::VectorXd xi(m);
  Eigen::VectorXd alpha(m);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(m);
  z(0) = 1.0;
  for (Eigen::Index d = 0; d < static_cast<Eigen::Index>(draws); ++d) {
    for (Eigen::Index i = 0; i < m; ++i) xi(i) = normal(rng);
    alpha = fitted.state + root * xi;
    for (Eigen::Index h = 0; h < horizon; ++h) {
      if (r > 0) z.tail(r) = post_design.row(h).transpose();
      paths(d, h) = z.dot(alpha) + sd_obs * normal(rng);
      alpha(0) += alpha(1) + sd_level * normal(rng);
      alpha(1) += sd_slope * normal(rng);
    }
  }
  return paths;
}

}  // namespace causal_pulse
