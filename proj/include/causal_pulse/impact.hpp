#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "causal_pulse/series.hpp"
#include "causal_pulse/structural.hpp"

namespace causal_pulse {

struct EventSpec {
  std::string name;
  Date date{};
};

/// CSV with header `date,name`. Names may be double-quoted.
std::vector<EventSpec> read_events_csv(const std::filesystem::path& path);
std::vector<EventSpec> parse_events_csv(std::string_view text, const std::string& source = "<events>");

struct ImpactSettings {
  int pre_days = 77;
  int post_days = 7;
  int year_lag_days = 365;
  int seasonal_lag_days = 161;
  double interval_level = 0.99;
  std::size_t mc_draws = 10000;
};

/// Pre/post regression data for one event. Rows 0..pre_days-1 are the
/// fitting sample; the post block holds the event day and the following
/// post_days-1 days.
struct ImpactDesign {
  EventSpec event;
  std::vector<std::string> regressor_names;
  std::vector<Date> pre_dates;
  std::vector<Date> post_dates;
  Eigen::VectorXd target;
  Eigen::MatrixXd pre_design;
  Eigen::VectorXd observed_post;
  Eigen::MatrixXd post_design;
};

/// Builds the design: year-ago and seasonal-lag copies of the signal plus
/// the exogenous columns (if any). Throws NonAnalysableError naming the
/// first uncovered range.
ImpactDesign assemble_design(const TimeSeries& signal, const EventSpec& event, const ExogenousBlock* exo,
                             const ImpactSettings& settings = {});

enum class EffectScale { identity, log1p };

struct EffectOptions {
  double interval_level = 0.99;
  std::size_t draws = 10000;
  /// Scale the model was fitted on. log1p paths are mapped back with expm1
  /// before the effect is computed.
  EffectScale scale = EffectScale::identity;
};

struct ImpactResult {
  EventSpec event;
  std::string signal;
  std::vector<Date> post_dates;
  // Pointwise, on the original scale.
  Eigen::VectorXd observed;
  Eigen::VectorXd forecast;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double relative_effect = 0.0;
  double effect_lower = 0.0;
  double effect_upper = 0.0;
  double effect_lower95 = 0.0;
  double effect_upper95 = 0.0;
  double tail_probability = 1.0;
  bool significant = false;    // interval at interval_level excludes 0
  bool significant95 = false;  // 95% interval excludes 0
  double interval_level = 0.99;
  // One-step-ahead fit over the pre-period, for plotting.
  std::vector<Date> pre_dates;
  Eigen::VectorXd pre_observed;
  Eigen::VectorXd pre_fitted;
  StructuralModel model;
};

/// Forecast distribution, Monte Carlo effect distribution and verdicts.
/// Throws NonAnalysableError when the observed post-period total is zero.
ImpactResult forecast_and_effect(const StructuralModel& fitted, const Eigen::VectorXd& observed_post,
                                 const Eigen::MatrixXd& post_design, const EffectOptions& options,
                                 std::uint64_t seed);

/// assemble_design + fit_mle + forecast_and_effect for one event.
ImpactResult analyse_event(const TimeSeries& signal, const EventSpec& event, const ExogenousBlock* exo,
                           const ImpactSettings& settings, EffectScale scale, std::uint64_t seed);

/// Pairs of events whose post windows overlap, as warning strings.
std::vector<std::string> overlap_warnings(const std::vector<EventSpec>& events, int post_days);

struct SkippedEvent {
  EventSpec event;
  std::string reason;
};

struct PlaceboTable {
  std::string signal;
  int shift_days = -21;
  std::size_t n_events = 0;
  std::vector<ImpactResult> results;
  std::vector<SkippedEvent> skipped;
  std::vector<double> adjusted_p;  // BH over tail probabilities, aligned with results
  std::size_t significant95 = 0;
  std::size_t significant99 = 0;
  std::optional<double> fpr95;
  std::optional<double> fpr99;
  std::string note;
};

/// Shifts every event by shift_days and reruns the impact analysis. A
/// pseudo-event counts as a false positive at level a when its
/// BH-adjusted tail probability is below 1 - a.
PlaceboTable placebo_run(const std::vector<EventSpec>& events, const TimeSeries& signal, const ExogenousBlock* exo,
                         const ImpactSettings& settings, EffectScale scale, int shift_days, std::uint64_t seed,
                         double q = 0.05);

}  // namespace causal_pulse
