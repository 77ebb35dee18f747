#include "causal_pulse/ols.hpp"

#include <cmath>
#include <numbers>

#include "causal_pulse/errors.hpp"

namespace causal_pulse {

Eigen::VectorXd OlsFit::standard_errors(Eigen::Index j) const {
  const double s2 = rss(j) / static_cast<double>(df_resid());
  return (xtx_inv.diagonal().array() * s2).sqrt().matrix();
}

OlsFit ols(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const std::vector<std::string>& column_names) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  if (y.rows() != n) throw ArgumentError("ols: design and response row counts differ");
  if (n <= k) {
    throw InsufficientDataError("ols: " + std::to_string(n) + " observations for " + std::to_string(k) +
                                " regressors");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    std::string names;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < k; ++i) {
      const auto col = perm(i);
      if (!names.empty()) names += ", ";
      names += static_cast<std::size_t>(col) < column_names.size()
                   ? column_names[static_cast<std::size_t>(col)]
                   : "column " + std::to_string(col);
    }
    throw CollinearityError("rank-deficient regressor matrix (rank " + std::to_string(qr.rank()) + " of " +
                            std::to_string(k) + "); linearly dependent: " + names);
  }

  OlsFit fit;
  fit.n = n;
  fit.k = k;
  fit.coef = qr.solve(y);
  fit.residuals = y - x * fit.coef;
  fit.rss = fit.residuals.colwise().squaredNorm().transpose();

  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd inner = r_inv * r_inv.transpose();
  const auto& p = qr.colsPermutation();
  fit.xtx_inv = p * inner * p.transpose();
  return fit;
}

double ols_log_likelihood(double rss, Eigen::Index n) {
  const double nn = static_cast<double>(n);
  return -0.5 * nn * (std::log(2.0 * std::numbers::pi) + std::log(rss / nn) + 1.0);
}

}  // namespace causal_pulse
