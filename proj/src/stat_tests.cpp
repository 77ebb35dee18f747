#include "causal_pulse/stat_tests.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "causal_pulse/distributions.hpp"
#include "causal_pulse/errors.hpp"
#include "causal_pulse/ols.hpp"

namespace causal_pulse {
namespace {

void check_input(std::span<const double> x, const char* test) {
  if (x.size() < kMinStationarityLength) {
    throw InsufficientDataError(std::string(test) + ": series length " + std::to_string(x.size()) +
                                " is below the minimum of " + std::to_string(kMinStationarityLength));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError(std::string(test) + ": non-finite observation");
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*lo == *hi) throw DegenerateSeriesError(std::string(test) + ": degenerate series (zero variance)");
}

// ADF regression of dx[t] on [1, x[t], dx[t-1..t-lags]] for t in [first, n-2].
Eigen::MatrixXd adf_design(std::span<const double> x, std::span<const double> dx, std::size_t lags,
                           std::size_t first) {
  const auto rows = static_cast<Eigen::Index>(dx.size() - first);
  Eigen::MatrixXd z(rows, static_cast<Eigen::Index>(2 + lags));
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::size_t t = first + static_cast<std::size_t>(i);
    z(i, 0) = 1.0;
    z(i, 1) = x[t];
    for (std::size_t j = 1; j <= lags; ++j) z(i, static_cast<Eigen::Index>(1 + j)) = dx[t - j];
  }
  return z;
}

Eigen::VectorXd adf_target(std::span<const double> dx, std::size_t first) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(dx.size() - first));
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = dx[first + static_cast<std::size_t>(i)];
  return y;
}

}  // namespace

double mackinnon_p_value(double tau) {
  // Constant-only, one-variable coefficients of MacKinnon (1994).
  constexpr double kTauMax = 2.74;
  constexpr double kTauMin = -18.83;
  constexpr double kTauStar = -1.61;
  constexpr std::array<double, 3> kSmall{2.1659, 1.4412, 3.8269e-2};
  constexpr std::array<double, 4> kLarge{1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2};
  if (tau > kTauMax) return 1.0;
  if (tau < kTauMin) return 0.0;
  double z = 0.0;
  if (tau <= kTauStar) {
    z = kSmall[0] + tau * (kSmall[1] + tau * kSmall[2]);
  } else {
    z = kLarge[0] + tau * (kLarge[1] + tau * (kLarge[2] + tau * kLarge[3]));
  }
  return dist::normal_cdf(z);
}

TestResult adf_test(std::span<const double> x) {
  check_input(x, "adf_test");
  const std::size_t n = x.size();
  std::vector<double> dx(n - 1);
  for (std::size_t t = 0; t + 1 < n; ++t) dx[t] = x[t + 1] - x[t];

  const auto schwert = static_cast<std::size_t>(std::floor(12.0 * std::pow(n / 100.0, 0.25)));
  const std::size_t max_lag = std::min(schwert, n / 2 - 2);

  // Lag search on the common sample t in [max_lag, n-2].
  std::size_t best_lag = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  const Eigen::VectorXd y_common = adf_target(dx, max_lag);
  for (std::size_t lags = 0; lags <= max_lag; ++lags) {
    const Eigen::MatrixXd z = adf_design(x, dx, lags, max_lag);
    const OlsFit fit = ols(z, y_common);
    const double aic = -2.0 * ols_log_likelihood(fit.rss(0), fit.n) + 2.0 * static_cast<double>(fit.k);
    if (aic < best_aic) {
      best_aic = aic;
      best_lag = lags;
    }
  }

  const Eigen::MatrixXd z = adf_design(x, dx, best_lag, best_lag);
  const Eigen::VectorXd y = adf_target(dx, best_lag);
  const OlsFit fit = ols(z, y);
  const double se = fit.standard_errors(0)(1);

  TestResult r;
  r.statistic = fit.coef(1, 0) / se;
  r.p_value = mackinnon_p_value(r.statistic);
  r.lags_used = best_lag;
  r.nobs = static_cast<std::size_t>(fit.n);
  r.reject_at_5pct = r.p_value < 0.05;
  return r;
}

TestResult adf_test(const TimeSeries& series) {
  const auto v = series.dense();
  return adf_test(std::span<const double>(v));
}

TestResult kpss_test(std::span<const double> x) {
  check_input(x, "kpss_test");
  const std::size_t n = x.size();
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  std::vector<double> e(n);
  for (std::size_t t = 0; t < n; ++t) e[t] = x[t] - mean;

  double partial = 0.0;
  double eta = 0.0;
  for (double v : e) {
    partial += v;
    eta += partial * partial;
  }
  eta /= static_cast<double>(n) * static_cast<double>(n);

  const auto lags = static_cast<std::size_t>(std::floor(4.0 * std::pow(n / 100.0, 0.25)));
  double s = 0.0;
  for (double v : e) s += v * v;
  for (std::size_t i = 1; i <= lags; ++i) {
    double prod = 0.0;
    for (std::size_t t = i; t < n; ++t) prod += e[t] * e[t - i];
    s += 2.0 * prod * (1.0 - static_cast<double>(i) / (static_cast<double>(lags) + 1.0));
  }
  s /= static_cast<double>(n);

  constexpr std::array<double, 4> kCrit{0.347, 0.463, 0.574, 0.739};
  constexpr std::array<double, 4> kPvals{0.10, 0.05, 0.025, 0.01};

  TestResult r;
  r.statistic = eta / s;
  r.lags_used = lags;
  r.nobs = n;
  if (r.statistic <= kCrit.front()) {
    r.p_value = kPvals.front();
    r.p_value_clamped = true;
  } else if (r.statistic >= kCrit.back()) {
    r.p_value = kPvals.back();
    r.p_value_clamped = true;
  } else {
    std::size_t i = 0;
    while (r.statistic > kCrit[i + 1]) ++i;
    const double w = (r.statistic - kCrit[i]) / (kCrit[i + 1] - kCrit[i]);
    r.p_value = kPvals[i] + w * (kPvals[i + 1] - kPvals[i]);
  }
  r.reject_at_5pct = r.p_value < 0.05;
  return r;
}

TestResult kpss_test(const TimeSeries& series) {
  const auto v = series.dense();
  return kpss_test(std::span<const double>(v));
}

StationarityScreen screen_pair(const TimeSeries& stimulus, const TimeSeries& response) {
  StationarityScreen s;
  s.stimulus_adf = adf_test(stimulus);
  s.stimulus_kpss = kpss_test(stimulus);
  s.response_adf = adf_test(response);
  s.response_kpss = kpss_test(response);
  s.retained = s.stimulus_adf.reject_at_5pct && !s.stimulus_kpss.reject_at_5pct &&
               s.response_adf.reject_at_5pct && !s.response_kpss.reject_at_5pct;
  return s;
}

bool retain_pair(const TimeSeries& stimulus, const TimeSeries& response) {
  return screen_pair(stimulus, response).retained;
}

TestResult ljung_box(std::span<const double> residuals, std::size_t lags, std::size_t model_df) {
  if (lags == 0) throw ArgumentError("ljung_box: lags must be at least 1");
  if (model_df >= lags) throw ArgumentError("ljung_box: model_df must be smaller than lags");
  const std::size_t n = residuals.size();
  if (n <= lags + 1) {
    throw InsufficientDataError("ljung_box: " + std::to_string(n) + " residuals for " + std::to_string(lags) +
                                " lags");
  }
  const double mean = std::accumulate(residuals.begin(), residuals.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double v : residuals) c0 += (v - mean) * (v - mean);
  if (c0 == 0.0) throw DegenerateSeriesError("ljung_box: residuals have zero variance");

  double q = 0.0;
  for (std::size_t k = 1; k <= lags; ++k) {
    double ck = 0.0;
    for (std::size_t t = k; t < n; ++t) ck += (residuals[t] - mean) * (residuals[t - k] - mean);
    const double rk = ck / c0;
    q += rk * rk / static_cast<double>(n - k);
  }
  q *= static_cast<double>(n) * static_cast<double>(n + 2);

  TestResult r;
  r.statistic = q;
  r.lags_used = lags;
  r.nobs = n;
  r.p_value = dist::chi2_sf(q, static_cast<double>(lags - model_df));
  r.reject_at_5pct = r.p_value < 0.05;
  return r;
}

std::size_t default_ljung_box_horizon(std::size_t n) { return std::max<std::size_t>(1, std::min<std::size_t>(10, n / 5)); }

FdrResult bh_fdr(const PValueFamily& family) {
  if (!(family.q > 0.0 && family.q < 1.0)) throw ArgumentError("bh_fdr: q must lie in (0, 1)");
  const std::size_t n = family.entries.size();
  FdrResult out;
  out.label = family.label;
  out.family_size = n;
  out.adjusted.assign(n, 1.0);
  out.rejected.assign(n, false);
  if (n == 0) return out;

  for (const auto& [id, p] : family.entries) {
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("bh_fdr: p-value outside [0,1] for '" + id + "'");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return family.entries[a].second < family.entries[b].second; });

  const double nn = static_cast<double>(n);
  std::size_t k_star = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (family.entries[order[i]].second <= static_cast<double>(i + 1) * family.q / nn) k_star = i + 1;
  }
  double running = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    const double scaled = family.entries[order[i]].second * nn / static_cast<double>(i + 1);
    running = std::min(running, scaled);
    out.adjusted[order[i]] = std::min(1.0, running);
  }
  for (std::size_t i = 0; i < k_star; ++i) {
    out.rejected[order[i]] = true;
    out.rejected_ids.push_back(family.entries[order[i]].first);
  }
  return out;
}

}  // namespace causal_pulse
