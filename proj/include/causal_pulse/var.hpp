#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "causal_pulse/series.hpp"

namespace causal_pulse {

/// Bivariate VAR-X(p) fitted by equation-wise least squares:
///   y_t = nu + A_1 y_{t-1} + ... + A_p y_{t-p} + B x_t + u_t
/// Design columns are ordered [1, y1_{t-1}, y2_{t-1}, ..., y1_{t-p}, y2_{t-p}, x_t].
struct VarModel {
  static constexpr std::size_t k = 2;

  std::array<std::string, 2> names;
  std::size_t p = 0;
  Eigen::Vector2d nu = Eigen::Vector2d::Zero();
  std::vector<Eigen::Matrix2d> a;
  Eigen::MatrixXd b;  // 2 x m
  std::vector<std::string> exog_labels;

  Eigen::MatrixXd coef;     // q x 2, design-column order
  Eigen::MatrixXd coef_se;  // q x 2
  Eigen::MatrixXd residuals;  // n_obs x 2
  Eigen::Matrix2d sigma = Eigen::Matrix2d::Zero();      // RSS / (n_obs - q)
  Eigen::Matrix2d sigma_mle = Eigen::Matrix2d::Zero();  // RSS / n_obs
  std::size_t n_obs = 0;
  double log_likelihood = 0.0;

  // Retained so restricted models can be refitted on the identical sample.
  Eigen::MatrixXd design;
  Eigen::MatrixXd targets;
  std::vector<std::string> column_names;

  std::size_t m() const noexcept { return exog_labels.size(); }
  std::size_t params_per_equation() const noexcept { return 1 + k * p + m(); }
  /// Design column of variable `var` (0 or 1) at lag `lag` (1-based).
  static std::size_t lag_column(std::size_t lag, std::size_t var) noexcept { return 1 + k * (lag - 1) + var; }
  std::size_t index_of(const std::string& name) const;
};

/// Per-observation information criteria computed from the MLE residual
/// covariance: ln|Sigma| + c(n) * (p k^2 + k (1 + m)) / n.
struct InformationCriteria {
  double aic = 0.0;
  double bic = 0.0;
  double hqic = 0.0;
};

InformationCriteria information_criteria(const VarModel& model);

/// Matrix-level fit. `endo` is T x 2; `exog` is T x m (m may be 0) and
/// aligned row-for-row with `endo`. Rows before `sample_start` only supply
/// lags; sample_start defaults to p.
VarModel fit_varx(const Eigen::MatrixXd& endo, const Eigen::MatrixXd& exog, std::size_t p,
                  std::array<std::string, 2> names = {"y1", "y2"},
                  std::vector<std::string> exog_labels = {},
                  std::optional<std::size_t> sample_start = std::nullopt);

/// Series-level fit. Both series must share start, frequency and length and
/// be gap-free; exogenous rows are matched to the series dates.
VarModel fit_varx(const TimeSeries& first, const TimeSeries& second, const ExogenousBlock* exo, std::size_t p);

enum class LagRule { majority, aic_fallback };

struct LagSelection {
  std::size_t p_max = 0;
  std::vector<std::optional<InformationCriteria>> criteria;  // index p-1
  std::size_t aic_lag = 0;
  std::size_t bic_lag = 0;
  std::size_t hqic_lag = 0;
  std::size_t chosen = 0;
  LagRule rule = LagRule::majority;
};

std::string to_string(LagRule rule);

/// Fits p = 1..p_max on the common sample (observations p_max+1..T) and
/// combines AIC/BIC/HQIC by majority, falling back to AIC when all differ.
LagSelection select_lag(const Eigen::MatrixXd& endo, const Eigen::MatrixXd& exog, std::size_t p_max);
LagSelection select_lag(const TimeSeries& first, const TimeSeries& second, const ExogenousBlock* exo,
                        std::size_t p_max);

/// Majority vote of three lag choices with AIC fallback.
std::pair<std::size_t, LagRule> majority_lag(std::size_t aic, std::size_t bic, std::size_t hqic);

/// Endogenous and exogenous matrices aligned to the series index.
struct VarInputs {
  Eigen::MatrixXd endo;
  Eigen::MatrixXd exog;
  std::vector<std::string> exog_labels;
};
VarInputs align_inputs(const TimeSeries& first, const TimeSeries& second, const ExogenousBlock* exo);

}  // namespace causal_pulse
