#include "causal_pulse/var.hpp"

#include <cmath>
#include <numbers>

#include "causal_pulse/errors.hpp"
#include "causal_pulse/ols.hpp"

namespace causal_pulse {

std::size_t VarModel::index_of(const std::string& name) const {
  if (names[0] == name) return 0;
  if (names[1] == name) return 1;
  throw ArgumentError("series '" + name + "' is not part of the model (" + names[0] + ", " + names[1] + ")");
}

InformationCriteria information_criteria(const VarModel& model) {
  const double n = static_cast<double>(model.n_obs);
  const double free = static_cast<double>(model.p * VarModel::k * VarModel::k + VarModel::k * (1 + model.m()));
  const double ld = std::log(model.sigma_mle.determinant());
  return {ld + 2.0 * free / n, ld + std::log(n) * free / n, ld + 2.0 * std::log(std::log(n)) * free / n};
}

VarModel fit_varx(const Eigen::MatrixXd& endo, const Eigen::MatrixXd& exog, std::size_t p,
                  std::array<std::string, 2> names, std::vector<std::string> exog_labels,
                  std::optional<std::size_t> sample_start) {
  constexpr std::size_t k = VarModel::k;
  if (p == 0) throw ArgumentError("fit_varx: lag order must be at least 1");
  if (endo.cols() != static_cast<Eigen::Index>(k)) throw ArgumentError("fit_varx: expected two endogenous columns");
  const auto total = static_cast<std::size_t>(endo.rows());
  const auto m = static_cast<std::size_t>(exog.cols());
  if (m > 0 && exog.rows() != endo.rows()) throw AlignmentError("fit_varx: exogenous rows do not match endogenous rows");
  if (exog_labels.size() != m) {
    exog_labels.clear();
    for (std::size_t j = 0; j < m; ++j) exog_labels.push_back("x" + std::to_string(j + 1));
  }
  if (total <= k * p + m + 5) {
    throw InsufficientDataError("fit_varx: series length " + std::to_string(total) + " too short for p=" +
                                std::to_string(p) + " with " + std::to_string(m) + " exogenous columns");
  }
  const std::size_t start = sample_start.value_or(p);
  if (start < p || start >= total) throw ArgumentError("fit_varx: invalid sample start");

  const std::size_t q = 1 + k * p + m;
  const auto rows = static_cast<Eigen::Index>(total - start);
  Eigen::MatrixXd z(rows, static_cast<Eigen::Index>(q));
  Eigen::MatrixXd y(rows, static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto t = static_cast<Eigen::Index>(start) + i;
    z(i, 0) = 1.0;
    for (std::size_t lag = 1; lag <= p; ++lag) {
      for (std::size_t v = 0; v < k; ++v) {
        z(i, static_cast<Eigen::Index>(VarModel::lag_column(lag, v))) =
            endo(t - static_cast<Eigen::Index>(lag), static_cast<Eigen::Index>(v));
      }
    }
    for (std::size_t j = 0; j < m; ++j) z(i, static_cast<Eigen::Index>(1 + k * p + j)) = exog(t, static_cast<Eigen::Index>(j));
    y.row(i) = endo.row(t);
  }

  std::vector<std::string> columns{"const"};
  for (std::size_t lag = 1; lag <= p; ++lag) {
    for (std::size_t v = 0; v < k; ++v) columns.push_back(names[v] + ".L" + std::to_string(lag));
  }
  for (const auto& label : exog_labels) columns.push_back(label);

  const OlsFit fit = ols(z, y, columns);

  VarModel model;
  model.names = std::move(names);
  model.p = p;
  model.exog_labels = std::move(exog_labels);
  model.coef = fit.coef;
  model.coef_se.resize(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(k));
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(k); ++j) model.coef_se.col(j) = fit.standard_errors(j);
  model.nu = fit.coef.row(0).transpose();
  for (std::size_t lag = 1; lag <= p; ++lag) {
    Eigen::Matrix2d a;
    for (std::size_t eq = 0; eq < k; ++eq) {
      for (std::size_t v = 0; v < k; ++v) {
        a(static_cast<Eigen::Index>(eq), static_cast<Eigen::Index>(v)) =
            fit.coef(static_cast<Eigen::Index>(VarModel::lag_column(lag, v)), static_cast<Eigen::Index>(eq));
      }
    }
    model.a.push_back(a);
  }
  model.b = fit.coef.bottomRows(static_cast<Eigen::Index>(m)).transpose();
  model.residuals = fit.residuals;
  model.n_obs = static_cast<std::size_t>(rows);
  const Eigen::Matrix2d cross = fit.residuals.transpose() * fit.residuals;
  model.sigma_mle = cross / static_cast<double>(rows);
  model.sigma = cross / static_cast<double>(rows - static_cast<Eigen::Index>(q));
  const double n = static_cast<double>(rows);
  model.log_likelihood =
      -0.5 * n * (static_cast<double>(k) * std::log(2.0 * std::numbers::pi) + std::log(model.sigma_mle.determinant()) +
                  static_cast<double>(k));
  model.design = std::move(z);
  model.targets = std::move(y);
  model.column_names = std::move(columns);
  return model;
}

VarInputs align_inputs(const TimeSeries& first, const TimeSeries& second, const ExogenousBlock* exo) {
  if (first.start() != second.start() || first.size() != second.size() ||
      first.frequency() != second.frequency()) {
    throw AlignmentError("endogenous series '" + first.name() + "' and '" + second.name() +
                         "' do not share an index");
  }
  const auto v1 = first.dense();
  const auto v2 = second.dense();
  VarInputs in;
  in.endo.resize(static_cast<Eigen::Index>(v1.size()), 2);
  for (std::size_t t = 0; t < v1.size(); ++t) {
    in.endo(static_cast<Eigen::Index>(t), 0) = v1[t];
    in.endo(static_cast<Eigen::Index>(t), 1) = v2[t];
  }
  if (exo != nullptr && exo->cols() > 0) {
    if (first.frequency() != Frequency::daily) throw AlignmentError("exogenous blocks are daily only");
    const ExogenousBlock aligned = exo->slice(first.start(), first.end());
    in.exog = aligned.values;
    in.exog_labels = aligned.labels;
  } else {
    in.exog.resize(in.endo.rows(), 0);
  }
  return in;
}

VarModel fit_varx(const TimeSeries& first, const TimeSeries& second, const ExogenousBlock* exo, std::size_t p) {
  const VarInputs in = align_inputs(first, second, exo);
  return fit_varx(in.endo, in.exog, p, {first.name(), second.name()}, in.exog_labels);
}

std::string to_string(LagRule rule) { return rule == LagRule::majority ? "majority" : "aic_fallback"; }

std::pair<std::size_t, LagRule> majority_lag(std::size_t aic, std::size_t bic, std::size_t hqic) {
  if (aic == bic || aic == hqic) return {aic, LagRule::majority};
  if (bic == hqic) return {bic, LagRule::majority};
  return {aic, LagRule::aic_fallback};
}

LagSelection select_lag(const Eigen::MatrixXd& endo, const Eigen::MatrixXd& exog, std::size_t p_max) {
  if (p_max == 0) throw ArgumentError("select_lag: p_max must be at least 1");
  LagSelection sel;
  sel.p_max = p_max;
  sel.criteria.resize(p_max);
  std::string last_error;
  double best_aic = 0, best_bic = 0, best_hqic = 0;
  for (std::size_t p = 1; p <= p_max; ++p) {
    try {
      const VarModel model = fit_varx(endo, exog, p, {"y1", "y2"}, {}, p_max);
      const auto ic = information_criteria(model);
      sel.criteria[p - 1] = ic;
      if (sel.aic_lag == 0 || ic.aic < best_aic) best_aic = ic.aic, sel.aic_lag = p;
      if (sel.bic_lag == 0 || ic.bic < best_bic) best_bic = ic.bic, sel.bic_lag = p;
      if (sel.hqic_lag == 0 || ic.hqic < best_hqic) best_hqic = ic.hqic, sel.hqic_lag = p;
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  if (sel.aic_lag == 0) throw SelectionError("select_lag: no candidate lag could be fitted (" + last_error + ")");
  std::tie(sel.chosen, sel.rule) = majority_lag(sel.aic_lag, sel.bic_lag, sel.hqic_lag);
  return sel;
}

LagSelection select_lag(const TimeSeries& first, const TimeSeries& second, const ExogenousBlock* exo,
                        std::size_t p_max) {
  const VarInputs in = align_inputs(first, second, exo);
  return select_lag(in.endo, in.exog, p_max);
}

}  // namespace causal_pulse
