#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

namespace causal_pulse {

/// Local linear trend with static regression, in state-space form.
///
///   y_t       = level_t + x_t' beta + eps_t,       eps_t   ~ N(0, s2_obs)
///   level_t+1 = level_t + slope_t + eta_t,         eta_t   ~ N(0, s2_level)
///   slope_t+1 = slope_t + zeta_t,                  zeta_t  ~ N(0, s2_slope)
///   beta_t+1  = beta_t
///
/// State layout is [level, slope, beta...]. Variances are stored as logs.
/// The filter starts from a large-variance (approximately diffuse) prior and
/// the first state_dim() prediction errors are excluded from the likelihood.
struct StructuralModel {
  std::vector<std::string> regressor_names;
  Eigen::Vector3d log_variances = Eigen::Vector3d::Zero();  // obs, level, slope
  double scale = 1.0;             // sample variance of the fitting target (guarded)
  double diffuse_variance = 1e6;  // prior variance of every state
  double initial_level = 0.0;

  bool fitted = false;
  double log_likelihood = 0.0;
  std::size_t n_obs = 0;
  int restarts_converged = 0;
  // Predicted state and covariance for the first period after the sample.
  Eigen::VectorXd state;
  Eigen::MatrixXd state_cov;

  std::size_t state_dim() const noexcept { return 2 + regressor_names.size(); }
  std::size_t burn_in() const noexcept { return state_dim(); }
  double obs_variance() const { return std::exp(log_variances(0)); }
  double level_variance() const { return std::exp(log_variances(1)); }
  double slope_variance() const { return std::exp(log_variances(2)); }
};

/// Multiplier applied to the target's sample variance to form the diffuse
/// prior variance.
inline constexpr double kDiffuseMultiplier = 1e6;
inline constexpr int kMleRestarts = 5;

/// Model skeleton for a target/design pair: sets scale, diffuse prior and
/// regressor names; variances at a neutral starting point.
StructuralModel make_structural_model(const Eigen::VectorXd& target, std::vector<std::string> regressor_names);

struct FilterOutput {
  double log_likelihood = 0.0;
  Eigen::VectorXd innovations;           // v_t
  Eigen::VectorXd innovation_variances;  // F_t
  Eigen::VectorXd one_step_predictions;  // y_t - v_t
  Eigen::VectorXd predicted_state;       // a_{n+1}
  Eigen::MatrixXd predicted_cov;         // P_{n+1}
  /// Smallest eigenvalue of any filtered covariance divided by its largest
  /// absolute eigenvalue. Only computed when requested.
  double min_relative_eigenvalue = 0.0;
};

FilterOutput kalman_filter(const StructuralModel& model, const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                           bool track_psd = false);

/// Maximises the prediction-error likelihood over the three log-variances
/// (box-constrained quasi-Newton, kMleRestarts starting points). Throws
/// NonAnalysableError if no restart yields a finite likelihood.
StructuralModel fit_mle(StructuralModel model, const Eigen::VectorXd& target, const Eigen::MatrixXd& design);

struct StructuralForecast {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;  // includes observation noise
};

/// h-step forecasts from the model's terminal state with no updating.
StructuralForecast forecast(const StructuralModel& fitted, const Eigen::MatrixXd& post_design);

/// Joint sample paths of y over the post period (draws x h), drawing the
/// initial state from N(state, state_cov) and adding process and
/// observation noise at every step.
Eigen::MatrixXd simulate_paths(const StructuralModel& fitted, const Eigen::MatrixXd& post_design, std::size_t draws,
                               std::mt19937_64& rng);

}  // namespace causal_pulse
