#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

Eigen::MatrixXd normal_equations(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const Eigen::MatrixXd xtx = x.transpose() * x;
  return xtx.inverse() * (x.transpose() * y);
}

double rss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd e = y - x * normal_equations(x, y);
  return e.squaredNorm();
}

double granger_f(const Eigen::MatrixXd& endo, const Eigen::MatrixXd& exog, std::size_t p, int stimulus,
                 int response) {
  const auto t_total = endo.rows();
  const auto n = t_total - static_cast<Eigen::Index>(p);
  const auto m = exog.cols();
  const auto pk = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd full(n, 1 + 2 * pk + m);
  Eigen::MatrixXd restricted(n, 1 + pk + m);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index t = r + pk;
    y(r) = endo(t, response);
    full(r, 0) = 1.0;
    restricted(r, 0) = 1.0;
    for (Eigen::Index lag = 1; lag <= pk; ++lag) {
      full(r, 1 + 2 * (lag - 1)) = endo(t - lag, 0);
      full(r, 2 + 2 * (lag - 1)) = endo(t - lag, 1);
      restricted(r, lag) = endo(t - lag, 1 - stimulus);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      full(r, 1 + 2 * pk + j) = exog(t, j);
      restricted(r, 1 + pk + j) = exog(t, j);
    }
  }
  const double rss_u = rss(full, y);
  const double rss_r = rss(restricted, y);
  const double df_den = static_cast<double>(n - full.cols());
  return ((rss_r - rss_u) / static_cast<double>(p)) / (rss_u / df_den);
}

double npmi(double ct, double t, double cr, double r, double v) {
  const double p_w_given_c = ct / t;
  const double p_w = cr > 0 ? cr / r : 1.0 / (r + v);
  const double p_wc = ct / (t + r);
  if (ct == 0) return -1.0;
  const double pmi = std::log(p_w_given_c) - std::log(p_w);
  return pmi / (-std::log(p_wc));
}

double ks_uniform_p(std::vector<double> s) {
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double u = std::clamp(s[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - u, u - static_cast<double>(i) / n});
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

double ljung_box_q(std::span<const double> x, std::size_t lags) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  auto acov = [&](std::size_t k) {
    double s = 0.0;
    for (std::size_t t = k; t < x.size(); ++t) s += (x[t] - mean) * (x[t - k] - mean);
    return s / n;
  };
  const double c0 = acov(0);
  double q = 0.0;
  for (std::size_t k = 1; k <= lags; ++k) {
    const double rho = acov(k) / c0;
    q += rho * rho / (n - static_cast<double>(k));
  }
  return n * (n + 2.0) * q;
}

Eigen::MatrixXd simulate_var(const std::vector<Eigen::Matrix2d>& a, std::size_t n, std::mt19937_64& rng,
                             std::size_t burn) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t total = n + burn;
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(total), 2);
  for (std::size_t t = 0; t < total; ++t) {
    Eigen::Vector2d v(normal(rng), normal(rng));
    for (std::size_t i = 0; i < a.size() && i < t; ++i) {
      v += a[i] * y.row(static_cast<Eigen::Index>(t - i - 1)).transpose();
    }
    y.row(static_cast<Eigen::Index>(t)) = v.transpose();
  }
  return y.bottomRows(static_cast<Eigen::Index>(n));
}

std::vector<double> white_noise(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = normal(rng);
  return x;
}

std::vector<double> random_walk(std::size_t n, std::mt19937_64& rng) {
  auto x = white_noise(n, rng);
  for (std::size_t t = 1; t < n; ++t) x[t] += x[t - 1];
  return x;
}

std::vector<double> ar1(std::size_t n, double phi, std::mt19937_64& rng) {
  auto x = white_noise(n, rng);
  for (std::size_t t = 1; t < n; ++t) x[t] += phi * x[t - 1];
  return x;
}

}  // namespace oracle
