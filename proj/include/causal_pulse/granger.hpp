#pragma once

#include <optional>
#include <string>
#include <vector>

#include "causal_pulse/stat_tests.hpp"
#include "causal_pulse/var.hpp"

namespace causal_pulse {

/// Cross-lag coefficient of the stimulus in the response equation.
struct LagCoefficient {
  std::size_t lag = 0;
  double coefficient = 0.0;
  double std_error = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
  bool significant = false;  // two-sided t-test at 5%
  char sign() const noexcept { return coefficient >= 0.0 ? '+' : '-'; }
};

struct ResidualDiagnostics {
  TestResult ljung_box_stimulus;
  TestResult ljung_box_response;
  TestResult adf_stimulus;
  TestResult adf_response;
  TestResult kpss_stimulus;
  TestResult kpss_response;
  bool ljung_box_stimulus_pass = false;
  bool ljung_box_response_pass = false;
  bool resid_adf_pass = false;
  bool resid_kpss_pass = false;

  /// Number of residual series failing Ljung-Box (0, 1 or 2).
  int ljung_box_failures() const noexcept {
    return static_cast<int>(!ljung_box_stimulus_pass) + static_cast<int>(!ljung_box_response_pass);
  }
  /// "", "†" or "††".
  std::string daggers() const;
};

struct GrangerResult {
  std::string stimulus;
  std::string response;
  double f_statistic = 0.0;
  double p_value = 1.0;
  std::size_t lag_order = 0;
  std::size_t df_num = 0;
  std::size_t df_den = 0;
  double rss_restricted = 0.0;
  double rss_unrestricted = 0.0;
  std::vector<LagCoefficient> per_lag;
  std::optional<ResidualDiagnostics> diagnostics;

  std::size_t significant_lags() const;
  /// Lag annotation such as "1+-5+ (5/6)" or "3+,4+ (2/6)"; "-- (0/3)"
  /// when no cross-lag coefficient is individually significant.
  std::string annotation() const;
};

/// Effective sample must exceed k p + m by at least this many observations.
inline constexpr std::size_t kMinGrangerSurplus = 30;

/// F-test that the stimulus lags add nothing to the response equation.
/// Exogenous columns stay in both restricted and unrestricted regressions.
GrangerResult granger_test(const VarModel& model, const std::string& stimulus, const std::string& response);

/// Ljung-Box (lags p + min(10, n/5), p degrees of freedom absorbed) and
/// ADF/KPSS on each residual column. Column `stimulus_col` is the stimulus.
ResidualDiagnostics diagnose_residuals(const Eigen::MatrixXd& residuals, std::size_t lag_order,
                                       std::size_t stimulus_col);

GrangerResult diagnose(const VarModel& model, GrangerResult granger);

/// Significance stars: "***" p<.001, "**" p<.01, "*" p<.05.
std::string stars(double p);

}  // namespace causal_pulse
