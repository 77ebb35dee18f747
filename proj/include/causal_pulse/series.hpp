#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "causal_pulse/date.hpp"

namespace causal_pulse {

enum class Frequency { daily, weekly };

/// A named, calendar-indexed series with one slot per period and no gaps in
/// the index. Missing observations are empty optionals.
class TimeSeries {
 public:
  using Value = std::optional<double>;

  TimeSeries() = default;
  TimeSeries(std::string name, Frequency frequency, Date start, std::vector<Value> values);
  static TimeSeries from_dense(std::string name, Frequency frequency, Date start,
                               std::span<const double> values);

  const std::string& name() const noexcept { return name_; }
  Frequency frequency() const noexcept { return frequency_; }
  Date start() const noexcept { return start_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  const std::vector<Value>& values() const noexcept { return values_; }
  const Value& operator[](std::size_t k) const { return values_[k]; }

  /// Days per period (1 or 7).
  long step_days() const noexcept { return frequency_ == Frequency::daily ? 1 : 7; }
  Date date_at(std::size_t k) const;
  /// Last covered date (start of the last period for weekly series).
  Date end() const;
  std::optional<std::size_t> index_of(Date d) const;

  bool has_missing() const;
  std::size_t missing_count() const;
  /// Values as doubles. Throws UntransformableError if any value is missing.
  std::vector<double> dense() const;
  Eigen::VectorXd to_vector() const;

  /// Sub-series covering [first, last] (clipped to the index).
  TimeSeries slice(Date first, Date last) const;
  TimeSeries renamed(std::string name) const;

 private:
  std::string name_;
  Frequency frequency_ = Frequency::daily;
  Date start_{};
  std::vector<Value> values_;
};

enum class TransformStep { locf, log1p, log, first_difference, weekly_aggregate };

/// Ordered transform pipeline. Validated on construction: at most one
/// differencing step, and any log step precedes it.
class TransformSpec {
 public:
  TransformSpec() = default;
  TransformSpec(std::initializer_list<TransformStep> steps);
  explicit TransformSpec(std::vector<TransformStep> steps);

  const std::vector<TransformStep>& steps() const noexcept { return steps_; }
  bool contains(TransformStep s) const;

 private:
  std::vector<TransformStep> steps_;
};

TransformStep parse_transform_step(std::string_view name);
std::string to_string(TransformStep step);

enum class Reducer { sum, mean };

TimeSeries apply_transforms(const TimeSeries& series, const TransformSpec& spec);

TimeSeries locf(const TimeSeries& series);
TimeSeries first_difference(const TimeSeries& series);

/// ISO weeks (Monday start); partial leading and trailing weeks are dropped.
TimeSeries weekly_aggregate(const TimeSeries& series, Reducer reducer);

/// Inverse of first differencing given the original first value.
TimeSeries cumulative_sum(const TimeSeries& differences, double first_value, Date first_date);

/// Regressor columns aligned row-for-row with a daily index.
struct ExogenousBlock {
  Date start{};
  std::vector<std::string> labels;
  Eigen::MatrixXd values;  // rows = days, cols = labels

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values.cols()); }
  std::optional<std::size_t> row_of(Date d) const;
  /// Rows covering [first, last]; throws AlignmentError outside coverage.
  ExogenousBlock slice(Date first, Date last) const;
};

/// Six weekday dummies (Monday baseline) plus ln(1 + news volume). The
/// volume series is LOCF-imputed before alignment.
ExogenousBlock build_exogenous(const DateRange& index, const TimeSeries& news_volume);

}  // namespace causal_pulse
