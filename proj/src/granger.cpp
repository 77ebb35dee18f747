#include "causal_pulse/granger.hpp"

#include <algorithm>

#include "causal_pulse/distributions.hpp"
#include "causal_pulse/errors.hpp"
#include "causal_pulse/ols.hpp"

namespace causal_pulse {

std::string ResidualDiagnostics::daggers() const {
  switch (ljung_box_failures()) {
    case 1: return "†";
    case 2: return "††";
    default: return "";
  }
}

std::size_t GrangerResult::significant_lags() const {
  return static_cast<std::size_t>(
      std::count_if(per_lag.begin(), per_lag.end(), [](const LagCoefficient& c) { return c.significant; }));
}

std::string GrangerResult::annotation() const {
  std::vector<const LagCoefficient*> sig;
  for (const auto& c : per_lag) {
    if (c.significant) sig.push_back(&c);
  }
  const std::string tail = " (" + std::to_string(sig.size()) + "/" + std::to_string(lag_order) + ")";
  if (sig.empty()) return "--" + tail;

  auto label = [](const LagCoefficient& c) { return std::to_string(c.lag) + c.sign(); };
  std::string out;
  std::size_t i = 0;
  while (i < sig.size()) {
    std::size_t j = i;
    while (j + 1 < sig.size() && sig[j + 1]->lag == sig[j]->lag + 1 && sig[j + 1]->sign() == sig[i]->sign()) ++j;
    if (!out.empty()) out += ',';
    if (j - i + 1 >= 3) {
      out += label(*sig[i]) + "-" + label(*sig[j]);
    } else {
      for (std::size_t r = i; r <= j; ++r) {
        if (r > i) out += ',';
        out += label(*sig[r]);
      }
    }
    i = j + 1;
  }
  return out + tail;
}

GrangerResult granger_test(const VarModel& model, const std::string& stimulus, const std::string& response) {
  if (model.p == 0) throw ArgumentError("granger_test: model has no lags");
  const std::size_t s = model.index_of(stimulus);
  const std::size_t r = model.index_of(response);
  if (s == r) throw ArgumentError("granger_test: stimulus and response are the same series");
  if (model.n_obs < kMinGrangerSurplus + VarModel::k * model.p + model.m()) {
    throw InsufficientDataError("granger_test: " + std::to_string(model.n_obs) + " effective observations, need " +
                                std::to_string(kMinGrangerSurplus + VarModel::k * model.p + model.m()));
  }

  const auto q = static_cast<Eigen::Index>(model.params_per_equation());
  const auto n = static_cast<Eigen::Index>(model.n_obs);
  const auto req = static_cast<Eigen::Index>(r);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < q; ++c) {
    bool stimulus_lag = false;
    for (std::size_t lag = 1; lag <= model.p; ++lag) {
      if (c == static_cast<Eigen::Index>(VarModel::lag_column(lag, s))) stimulus_lag = true;
    }
    if (!stimulus_lag) keep.push_back(c);
  }
  Eigen::MatrixXd restricted(n, static_cast<Eigen::Index>(keep.size()));
  std::vector<std::string> names;
  for (std::size_t j = 0; j < keep.size(); ++j) {
    restricted.col(static_cast<Eigen::Index>(j)) = model.design.col(keep[j]);
    names.push_back(model.column_names[static_cast<std::size_t>(keep[j])]);
  }

  OlsFit restricted_fit;
  try {
    restricted_fit = ols(restricted, model.targets.col(req), names);
  } catch (const Error& e) {
    throw Error(std::string("granger_test: restricted fit failed: ") + e.what());
  }

  GrangerResult out;
  out.stimulus = stimulus;
  out.response = response;
  out.lag_order = model.p;
  out.df_num = model.p;
  out.df_den = static_cast<std::size_t>(n - q);
  out.rss_unrestricted = model.residuals.col(req).squaredNorm();
  out.rss_restricted = restricted_fit.rss(0);
  const double gain = std::max(0.0, out.rss_restricted - out.rss_unrestricted);
  out.f_statistic = (gain / static_cast<double>(out.df_num)) /
                    (out.rss_unrestricted / static_cast<double>(out.df_den));
  out.p_value = dist::f_sf(out.f_statistic, static_cast<double>(out.df_num), static_cast<double>(out.df_den));

  for (std::size_t lag = 1; lag <= model.p; ++lag) {
    const auto col = static_cast<Eigen::Index>(VarModel::lag_column(lag, s));
    LagCoefficient c;
    c.lag = lag;
    c.coefficient = model.coef(col, req);
    c.std_error = model.coef_se(col, req);
    c.t_stat = c.coefficient / c.std_error;
    c.p_value = dist::t_two_sided(c.t_stat, static_cast<double>(out.df_den));
    c.significant = c.p_value < 0.05;
    out.per_lag.push_back(c);
  }
  return out;
}

ResidualDiagnostics diagnose_residuals(const Eigen::MatrixXd& residuals, std::size_t lag_order,
                                       std::size_t stimulus_col) {
  if (residuals.cols() != 2 || stimulus_col > 1) throw ArgumentError("diagnose_residuals: expected two residual columns");
  const std::size_t n = static_cast<std::size_t>(residuals.rows());
  const std::size_t lags = lag_order + default_ljung_box_horizon(n);

  auto column = [&](std::size_t c) {
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) v[t] = residuals(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c));
    return v;
  };
  const auto stim = column(stimulus_col);
  const auto resp = column(1 - stimulus_col);

  ResidualDiagnostics d;
  d.ljung_box_stimulus = ljung_box(stim, lags, lag_order);
  d.ljung_box_response = ljung_box(resp, lags, lag_order);
  d.adf_stimulus = adf_test(stim);
  d.adf_response = adf_test(resp);
  d.kpss_stimulus = kpss_test(stim);
  d.kpss_response = kpss_test(resp);
  d.ljung_box_stimulus_pass = !d.ljung_box_stimulus.reject_at_5pct;
  d.ljung_box_response_pass = !d.ljung_box_response.reject_at_5pct;
  d.resid_adf_pass = d.adf_stimulus.reject_at_5pct && d.adf_response.reject_at_5pct;
  d.resid_kpss_pass = !d.kpss_stimulus.reject_at_5pct && !d.kpss_response.reject_at_5pct;
  return d;
}

GrangerResult diagnose(const VarModel& model, GrangerResult granger) {
  granger.diagnostics = diagnose_residuals(model.residuals, model.p, model.index_of(granger.stimulus));
  return granger;
}

std::string stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

}  // namespace causal_pulse
