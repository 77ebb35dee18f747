#include "causal_pulse/impact.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "causal_pulse/distributions.hpp"
#include "causal_pulse/errors.hpp"
#include "causal_pulse/seed.hpp"
#include "causal_pulse/stat_tests.hpp"

namespace causal_pulse {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      out += s[i];
      if (s[i] == '"' && i + 1 < s.size() && s[i + 1] == '"') ++i;
    }
    return out;
  }
  return s;
}

// Linear interpolation between order statistics.
double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::nan("");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

double to_original(double v, EffectScale scale) { return scale == EffectScale::log1p ? std::expm1(v) : v; }

Eigen::VectorXd to_original(const Eigen::VectorXd& v, EffectScale scale) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = to_original(v(i), scale);
  return out;
}

struct Coverage {
  const TimeSeries& signal;

  // Throws with the missing sub-range of [first, last], if any.
  void require(Date first, Date last, const std::string& what) const {
    std::optional<Date> gap_first;
    std::optional<Date> gap_last;
    for (Date d = first; d <= last; d += std::chrono::days{1}) {
      const auto k = signal.index_of(d);
      if (!k || !signal[*k]) {
        if (!gap_first) gap_first = d;
        gap_last = d;
      }
    }
    if (gap_first) {
      throw NonAnalysableError("non-analysable: " + signal.name() + " lacks " + what + " data for " +
                               format_date(*gap_first) + ".." + format_date(*gap_last));
    }
  }
};

}  // namespace

std::vector<EventSpec> parse_events_csv(std::string_view text, const std::string& source) {
  std::vector<EventSpec> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (header) {
      header = false;
      if (comma == std::string::npos || trim(row.substr(0, comma)) != "date" || trim(row.substr(comma + 1)) != "name") {
        throw IngestionError(source, lineno, "expected header 'date,name'");
      }
      continue;
    }
    if (comma == std::string::npos) throw IngestionError(source, lineno, "expected 'date,name'");
    EventSpec ev;
    try {
      ev.date = parse_date(trim(row.substr(0, comma)));
    } catch (const Error& e) {
      throw IngestionError(source, lineno, e.what());
    }
    ev.name = unquote(trim(row.substr(comma + 1)));
    if (ev.name.empty()) throw IngestionError(source, lineno, "event name is empty");
    out.push_back(std::move(ev));
  }
  if (header) throw IngestionError(source, 0, "empty events file");
  return out;
}

std::vector<EventSpec> read_events_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_events_csv(ss.str(), path.string());
}

ImpactDesign assemble_design(const TimeSeries& signal, const EventSpec& event, const ExogenousBlock* exo,
                             const ImpactSettings& settings) {
  if (signal.frequency() != Frequency::daily) throw ArgumentError("assemble_design: signal must be daily");
  if (settings.pre_days <= 0 || settings.post_days <= 0) throw ArgumentError("assemble_design: empty window");
  const Date first = add_days(event.date, -settings.pre_days);
  const Date last = add_days(event.date, settings.post_days - 1);

  const Coverage cov{signal};
  cov.require(first, last, "analysis-window");
  cov.require(add_days(first, -settings.year_lag_days), add_days(last, -settings.year_lag_days), "year-ago");
  cov.require(add_days(first, -settings.seasonal_lag_days), add_days(last, -settings.seasonal_lag_days),
              "seasonal-lag");

  std::optional<ExogenousBlock> ex;
  if (exo != nullptr) {
    try {
      ex = exo->slice(first, last);
    } catch (const AlignmentError& e) {
      throw NonAnalysableError(std::string("non-analysable: exogenous coverage: ") + e.what());
    }
  }

  ImpactDesign d;
  d.event = event;
  d.regressor_names = {"year_ago", "seasonal_lag"};
  if (ex) d.regressor_names.insert(d.regressor_names.end(), ex->labels.begin(), ex->labels.end());
  const auto total = static_cast<Eigen::Index>(settings.pre_days + settings.post_days);
  const auto r = static_cast<Eigen::Index>(d.regressor_names.size());
  Eigen::VectorXd y(total);
  Eigen::MatrixXd x(total, r);
  auto value_at = [&](Date day) { return *signal[*signal.index_of(day)]; };
  for (Eigen::Index t = 0; t < total; ++t) {
    const Date day = add_days(first, static_cast<long>(t));
    y(t) = value_at(day);
    x(t, 0) = value_at(add_days(day, -settings.year_lag_days));
    x(t, 1) = value_at(add_days(day, -settings.seasonal_lag_days));
    if (ex) x.row(t).tail(r - 2) = ex->values.row(t);
    (t < settings.pre_days ? d.pre_dates : d.post_dates).push_back(day);
  }
  const auto pre = static_cast<Eigen::Index>(settings.pre_days);
  d.target = y.head(pre);
  d.pre_design = x.topRows(pre);
  d.observed_post = y.tail(total - pre);
  d.post_design = x.bottomRows(total - pre);
  return d;
}

ImpactResult forecast_and_effect(const StructuralModel& fitted, const Eigen::VectorXd& observed_post,
                                 const Eigen::MatrixXd& post_design, const EffectOptions& options,
                                 std::uint64_t seed) {
  if (!fitted.fitted) throw ArgumentError("forecast_and_effect: model has not been fitted");
  if (observed_post.size() != post_design.rows()) {
    throw ArgumentError("forecast_and_effect: observed post period and design differ in length");
  }
  if (!(options.interval_level > 0.0 && options.interval_level < 1.0)) {
    throw ArgumentError("forecast_and_effect: interval level must lie in (0,1)");
  }
  if (options.draws < 2) throw ArgumentError("forecast_and_effect: need at least two draws");

  ImpactResult res;
  res.interval_level = options.interval_level;
  res.observed = to_original(observed_post, options.scale);
  const double total = res.observed.sum();
  if (total == 0.0 || !std::isfinite(total)) {
    throw NonAnalysableError("undefined effect: observed post-period total is zero");
  }

  const StructuralForecast fc = forecast(fitted, post_design);
  const double z = dist::normal_quantile(0.5 + 0.5 * options.interval_level);
  const Eigen::VectorXd sd = fc.variance.cwiseSqrt();
  res.forecast = to_original(fc.mean, options.scale);
  res.lower = to_original(fc.mean - z * sd, options.scale);
  res.upper = to_original(fc.mean + z * sd, options.scale);
  res.relative_effect = (res.observed - res.forecast).sum() / total;

  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd paths = simulate_paths(fitted, post_design, options.draws, rng);
  std::vector<double> effects(options.draws);
  std::size_t le = 0;
  std::size_t ge = 0;
  for (std::size_t i = 0; i < options.draws; ++i) {
    double counterfactual = 0.0;
    for (Eigen::Index h = 0; h < paths.cols(); ++h) {
      counterfactual += to_original(paths(static_cast<Eigen::Index>(i), h), options.scale);
    }
    const double e = (total - counterfactual) / total;
    effects[i] = e;
    if (e <= 0.0) ++le;
    if (e >= 0.0) ++ge;
  }
  std::sort(effects.begin(), effects.end());
  const double alpha = 1.0 - options.interval_level;
  res.effect_lower = quantile(effects, alpha / 2.0);
  res.effect_upper = quantile(effects, 1.0 - alpha / 2.0);
  res.effect_lower95 = quantile(effects, 0.025);
  res.effect_upper95 = quantile(effects, 0.975);
  const double n = static_cast<double>(options.draws);
  res.tail_probability = std::min(1.0, std::min(2.0 * static_cast<double>(le) / n, 2.0 * static_cast<double>(ge) / n));
  res.significant = res.effect_lower > 0.0 || res.effect_upper < 0.0;
  res.significant95 = res.effect_lower95 > 0.0 || res.effect_upper95 < 0.0;
  res.model = fitted;
  return res;
}

ImpactResult analyse_event(const TimeSeries& signal, const EventSpec& event, const ExogenousBlock* exo,
                           const ImpactSettings& settings, EffectScale scale, std::uint64_t seed) {
  const TimeSeries modelled =
      scale == EffectScale::log1p ? apply_transforms(signal, TransformSpec{TransformStep::log1p}) : signal;
  const ImpactDesign design = assemble_design(modelled, event, exo, settings);
  StructuralModel model = make_structural_model(design.target, design.regressor_names);
  model = fit_mle(std::move(model), design.target, design.pre_design);

  EffectOptions opts;
  opts.interval_level = settings.interval_level;
  opts.draws = settings.mc_draws;
  opts.scale = scale;
  ImpactResult res = forecast_and_effect(model, design.observed_post, design.post_design, opts, seed);
  res.event = event;
  res.signal = signal.name();
  res.post_dates = design.post_dates;
  res.pre_dates = design.pre_dates;
  res.pre_observed = to_original(design.target, scale);
  const FilterOutput fo = kalman_filter(model, design.target, design.pre_design);
  res.pre_fitted = to_original(fo.one_step_predictions, scale);
  return res;
}

std::vector<std::string> overlap_warnings(const std::vector<EventSpec>& events, int post_days) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      const long gap = std::labs((events[j].date - events[i].date).count());
      if (gap < post_days) {
        out.push_back("post windows overlap: " + events[i].name + " (" + format_date(events[i].date) + ") and " +
                      events[j].name + " (" + format_date(events[j].date) + ")");
      }
    }
  }
  return out;
}

PlaceboTable placebo_run(const std::vector<EventSpec>& events, const TimeSeries& signal, const ExogenousBlock* exo,
                         const ImpactSettings& settings, EffectScale scale, int shift_days, std::uint64_t seed,
                         double q) {
  if (shift_days == 0) throw ArgumentError("placebo must not coincide with real events");
  PlaceboTable table;
  table.signal = signal.name();
  table.shift_days = shift_days;
  table.n_events = events.size();
  for (const auto& ev : events) {
    EventSpec pseudo{"placebo: " + ev.name, add_days(ev.date, shift_days)};
    const std::uint64_t s = derive_seed(seed, "placebo/" + signal.name() + "/" + format_date(ev.date) + "/" + ev.name);
    try {
      table.results.push_back(analyse_event(signal, pseudo, exo, settings, scale, s));
    } catch (const NonAnalysableError& e) {
      table.skipped.push_back({pseudo, e.what()});
    }
  }
  if (table.results.empty()) {
    table.note = "no analysable pseudo-events";
    return table;
  }
  PValueFamily family;
  family.label = "placebo/" + signal.name();
  family.q = q;
  for (std::size_t i = 0; i < table.results.size(); ++i) {
    family.entries.emplace_back(std::to_string(i), table.results[i].tail_probability);
  }
  const FdrResult fdr = bh_fdr(family);
  table.adjusted_p = fdr.adjusted;
  for (double p : fdr.adjusted) {
    if (p < 0.05) ++table.significant95;
    if (p < 0.01) ++table.significant99;
  }
  const double n = static_cast<double>(table.results.size());
  table.fpr95 = static_cast<double>(table.significant95) / n;
  table.fpr99 = static_cast<double>(table.significant99) / n;
  return table;
}

}  // namespace causal_pulse
