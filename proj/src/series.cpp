#include "causal_pulse/series.hpp"

#include <algorithm>
#include <cmath>

#include "causal_pulse/errors.hpp"

namespace causal_pulse {

TimeSeries::TimeSeries(std::string name, Frequency frequency, Date start, std::vector<Value> values)
    : name_(std::move(name)), frequency_(frequency), start_(start), values_(std::move(values)) {}

TimeSeries TimeSeries::from_dense(std::string name, Frequency frequency, Date start,
                                  std::span<const double> values) {
  std::vector<Value> v(values.begin(), values.end());
  return TimeSeries(std::move(name), frequency, start, std::move(v));
}

Date TimeSeries::date_at(std::size_t k) const {
  return add_days(start_, static_cast<long>(k) * step_days());
}

Date TimeSeries::end() const {
  if (values_.empty()) return add_days(start_, -step_days());
  return date_at(values_.size() - 1);
}

std::optional<std::size_t> TimeSeries::index_of(Date d) const {
  const long offset = (d - start_).count();
  if (offset < 0 || offset % step_days() != 0) return std::nullopt;
  const auto k = static_cast<std::size_t>(offset / step_days());
  if (k >= values_.size()) return std::nullopt;
  return k;
}

bool TimeSeries::has_missing() const {
  return std::any_of(values_.begin(), values_.end(), [](const Value& v) { return !v; });
}

std::size_t TimeSeries::missing_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](const Value& v) { return !v; }));
}

std::vector<double> TimeSeries::dense() const {
  std::vector<double> out;
  out.reserve(values_.size());
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!values_[k]) {
      throw UntransformableError("series '" + name_ + "' has a missing value at " +
                                 format_date(date_at(k)));
    }
    out.push_back(*values_[k]);
  }
  return out;
}

Eigen::VectorXd TimeSeries::to_vector() const {
  const auto d = dense();
  return Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()));
}

TimeSeries TimeSeries::slice(Date first, Date last) const {
  std::vector<Value> out;
  Date new_start = first;
  bool started = false;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const Date d = date_at(k);
    if (d < first || d > last) continue;
    if (!started) {
      new_start = d;
      started = true;
    }
    out.push_back(values_[k]);
  }
  return TimeSeries(name_, frequency_, new_start, std::move(out));
}

TimeSeries TimeSeries::renamed(std::string name) const {
  TimeSeries copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

// ---------------------------------------------------------------------------

TransformSpec::TransformSpec(std::initializer_list<TransformStep> steps)
    : TransformSpec(std::vector<TransformStep>(steps)) {}

TransformSpec::TransformSpec(std::vector<TransformStep> steps) : steps_(std::move(steps)) {
  const auto diffs = std::count(steps_.begin(), steps_.end(), TransformStep::first_difference);
  if (diffs > 1) throw ArgumentError("transform spec has more than one differencing step");
  if (diffs == 1) {
    const auto diff_at = std::find(steps_.begin(), steps_.end(), TransformStep::first_difference);
    for (auto it = diff_at; it != steps_.end(); ++it) {
      if (*it == TransformStep::log || *it == TransformStep::log1p) {
        throw ArgumentError("log transform must precede differencing");
      }
    }
  }
}

bool TransformSpec::contains(TransformStep s) const {
  return std::find(steps_.begin(), steps_.end(), s) != steps_.end();
}

TransformStep parse_transform_step(std::string_view name) {
  if (name == "locf") return TransformStep::locf;
  if (name == "log1p") return TransformStep::log1p;
  if (name == "log") return TransformStep::log;
  if (name == "first_difference" || name == "diff") return TransformStep::first_difference;
  if (name == "weekly_aggregate") return TransformStep::weekly_aggregate;
  throw ConfigurationError("unknown transform step '" + std::string(name) + "'");
}

std::string to_string(TransformStep step) {
  switch (step) {
    case TransformStep::locf: return "locf";
    case TransformStep::log1p: return "log1p";
    case TransformStep::log: return "log";
    case TransformStep::first_difference: return "first_difference";
    case TransformStep::weekly_aggregate: return "weekly_aggregate";
  }
  return "?";
}

TimeSeries locf(const TimeSeries& series) {
  if (series.empty()) return series;
  if (!series[0]) {
    throw UntransformableError("untransformable: leading gap in series '" + series.name() +
                               "' starting " + format_date(series.start()));
  }
  std::vector<TimeSeries::Value> out(series.values());
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (!out[k]) out[k] = out[k - 1];
  }
  return TimeSeries(series.name(), series.frequency(), series.start(), std::move(out));
}

TimeSeries first_difference(const TimeSeries& series) {
  std::vector<TimeSeries::Value> out;
  if (series.size() >= 2) out.reserve(series.size() - 1);
  for (std::size_t k = 1; k < series.size(); ++k) {
    if (series[k] && series[k - 1]) {
      out.emplace_back(*series[k] - *series[k - 1]);
    } else {
      out.emplace_back(std::nullopt);
    }
  }
  return TimeSeries(series.name(), series.frequency(), series.date_at(1), std::move(out));
}

namespace {

TimeSeries map_values(const TimeSeries& series, double (*f)(double), const char* what,
                      double lower_exclusive) {
  std::vector<TimeSeries::Value> out;
  out.reserve(series.size());
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& v = series[k];
    if (!v) {
      out.emplace_back(std::nullopt);
      continue;
    }
    if (!(*v > lower_exclusive)) {
      throw DomainError(std::string(what) + " of out-of-domain value " + std::to_string(*v) +
                        " in series '" + series.name() + "' at " + format_date(series.date_at(k)));
    }
    out.emplace_back(f(*v));
  }
  return TimeSeries(series.name(), series.frequency(), series.start(), std::move(out));
}

double log_fn(double v) { return std::log(v); }
double log1p_fn(double v) { return std::log1p(v); }

}  // namespace

TimeSeries apply_transforms(const TimeSeries& series, const TransformSpec& spec) {
  TimeSeries out = series;
  for (const auto step : spec.steps()) {
    switch (step) {
      case TransformStep::locf: out = locf(out); break;
      case TransformStep::log: out = map_values(out, log_fn, "log", 0.0); break;
      case TransformStep::log1p: out = map_values(out, log1p_fn, "log1p", -1.0); break;
      case TransformStep::first_difference: out = first_difference(out); break;
      case TransformStep::weekly_aggregate: out = weekly_aggregate(out, Reducer::sum); break;
    }
  }
  return out;
}

TimeSeries weekly_aggregate(const TimeSeries& series, Reducer reducer) {
  if (series.frequency() != Frequency::daily) {
    throw ArgumentError("weekly_aggregate expects a daily series, got '" + series.name() + "'");
  }
  // First Monday on or after the start.
  const unsigned wd = iso_weekday(series.start());
  const long lead = wd == 1 ? 0 : static_cast<long>(8 - wd);
  const long n = static_cast<long>(series.size());
  const long weeks = n > lead ? (n - lead) / 7 : 0;
  if (weeks <= 0) {
    throw InsufficientDataError("insufficient data: series '" + series.name() +
                                "' contains no complete ISO week");
  }
  std::vector<TimeSeries::Value> out;
  out.reserve(static_cast<std::size_t>(weeks));
  for (long w = 0; w < weeks; ++w) {
    double acc = 0.0;
    int present = 0;
    for (long d = 0; d < 7; ++d) {
      const auto& v = series[static_cast<std::size_t>(lead + 7 * w + d)];
      if (v) {
        acc += *v;
        ++present;
      }
    }
    if (present == 0) {
      out.emplace_back(std::nullopt);
    } else {
      out.emplace_back(reducer == Reducer::sum ? acc : acc / present);
    }
  }
  return TimeSeries(series.name(), Frequency::weekly, add_days(series.start(), lead), std::move(out));
}

TimeSeries cumulative_sum(const TimeSeries& differences, double first_value, Date first_date) {
  std::vector<TimeSeries::Value> out;
  out.reserve(differences.size() + 1);
  double level = first_value;
  out.emplace_back(level);
  for (const auto& v : differences.values()) {
    if (!v) throw UntransformableError("cannot integrate a differenced series with gaps");
    level += *v;
    out.emplace_back(level);
  }
  return TimeSeries(differences.name(), differences.frequency(), first_date, std::move(out));
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> ExogenousBlock::row_of(Date d) const {
  const long offset = (d - start).count();
  if (offset < 0 || offset >= static_cast<long>(rows())) return std::nullopt;
  return static_cast<std::size_t>(offset);
}

ExogenousBlock ExogenousBlock::slice(Date first, Date last) const {
  const auto a = row_of(first);
  const auto b = row_of(last);
  if (!a || !b || *b < *a) {
    throw AlignmentError("exogenous block does not cover " + format_date(first) + " .. " +
                         format_date(last));
  }
  ExogenousBlock out;
  out.start = first;
  out.labels = labels;
  out.values = values.middleRows(static_cast<Eigen::Index>(*a), static_cast<Eigen::Index>(*b - *a + 1));
  return out;
}

ExogenousBlock build_exogenous(const DateRange& index, const TimeSeries& news_volume) {
  static const char* const kWeekdays[] = {"dow_tue", "dow_wed", "dow_thu", "dow_fri", "dow_sat", "dow_sun"};
  if (index.empty()) throw ArgumentError("build_exogenous: empty index");

  // Carry the last observed volume forward; a leading gap stays missing and
  // surfaces below as an alignment error.
  std::vector<TimeSeries::Value> filled(news_volume.values());
  for (std::size_t k = 1; k < filled.size(); ++k) {
    if (!filled[k]) filled[k] = filled[k - 1];
  }
  const TimeSeries volume(news_volume.name(), news_volume.frequency(), news_volume.start(), std::move(filled));

  const auto rows = static_cast<Eigen::Index>(index.days());
  ExogenousBlock block;
  block.start = index.first;
  block.labels.assign(std::begin(kWeekdays), std::end(kWeekdays));
  block.labels.emplace_back("log_news_volume");
  block.values = Eigen::MatrixXd::Zero(rows, 7);

  std::vector<Date> missing;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Date d = add_days(index.first, static_cast<long>(r));
    const unsigned wd = iso_weekday(d);
    if (wd != 1) block.values(r, static_cast<Eigen::Index>(wd - 2)) = 1.0;
    const auto k = volume.index_of(d);
    if (!k || !volume[*k]) {
      missing.push_back(d);
      continue;
    }
    if (*volume[*k] < 0.0) throw DomainError("negative news volume on " + format_date(d));
    block.values(r, 6) = std::log1p(*volume[*k]);
  }
  if (!missing.empty()) {
    std::string msg = "news volume does not cover " + std::to_string(missing.size()) + " date(s): ";
    for (std::size_t i = 0; i < missing.size() && i < 5; ++i) {
      if (i) msg += ", ";
      msg += format_date(missing[i]);
    }
    if (missing.size() > 5) msg += ", ...";
    throw AlignmentError(msg);
  }
  return block;
}

}  // namespace causal_pulse
