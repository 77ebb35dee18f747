#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace causal_pulse {

/// Least-squares fit of one or more responses sharing a design matrix.
struct OlsFit {
  Eigen::MatrixXd coef;       // k x q
  Eigen::MatrixXd residuals;  // n x q
  Eigen::MatrixXd xtx_inv;    // (X'X)^-1, k x k
  Eigen::VectorXd rss;        // per response
  Eigen::Index n = 0;
  Eigen::Index k = 0;

  Eigen::Index df_resid() const { return n - k; }
  /// Conventional standard errors for response j (RSS / (n - k) scaling).
  Eigen::VectorXd standard_errors(Eigen::Index j) const;
};

/// Column-pivoted QR solve. Throws CollinearityError naming the dependent
/// columns when X is rank deficient, InsufficientDataError when n <= k.
OlsFit ols(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
           const std::vector<std::string>& column_names = {});

/// Gaussian log-likelihood of a single-equation OLS fit (MLE variance).
double ols_log_likelihood(double rss, Eigen::Index n);

}  // namespace causal_pulse
