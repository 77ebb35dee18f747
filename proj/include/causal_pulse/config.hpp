#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causal_pulse/date.hpp"
#include "causal_pulse/series.hpp"

namespace causal_pulse {

enum class Analysis { impact, granger_news, diffusion, lexicon, placebo };

std::string to_string(Analysis a);
Analysis parse_analysis(std::string_view name);
const std::vector<Analysis>& all_analyses();

struct AnalysisParameters {
  std::size_t p_max_daily = 14;
  std::size_t p_max_weekly = 6;
  int pre_weeks = 11;
  int post_days = 7;
  double q = 0.05;
  std::size_t k = 100;
  std::uint64_t min_freq = 50;
  double sparsity = 0.25;
  std::size_t mc_draws = 10000;
  double interval_level = 0.99;
  int placebo_shift_days = -21;
  int year_lag_days = 365;
  int seasonal_lag_days = 161;  // 23 weeks
  /// Entities tracked in the news analysis; each forum x response family
  /// then holds 2 x news_entities tests.
  std::size_t news_entities = 50;
};

/// A community supplies raw posts, pre-aggregated daily series, or both.
struct CommunitySource {
  std::string name;
  std::optional<std::filesystem::path> posts;
  std::optional<std::filesystem::path> posters;
  std::optional<std::filesystem::path> posts_per_poster;
  std::map<std::string, std::filesystem::path> affect;  // label -> daily series CSV
  std::optional<Date> start;
  std::optional<Date> end;
};

struct EntitySource {
  std::string name;
  std::filesystem::path series;
};

/// Response metric for the news analysis with its transform pipeline.
struct MetricSpec {
  std::string name;  // "posters", "posts_per_poster" or an affect label
  TransformSpec transforms;
};

struct AnalysisConfig {
  std::filesystem::path source;    // config file
  std::filesystem::path base_dir;  // relative paths resolve against this
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 20240713;
  std::size_t jobs = 1;
  std::vector<Analysis> analyses;
  std::vector<CommunitySource> communities;
  std::vector<EntitySource> entities;
  std::optional<std::filesystem::path> events;
  std::optional<std::filesystem::path> news_volume;
  std::optional<std::filesystem::path> stopwords;
  std::vector<MetricSpec> metrics;
  TransformSpec entity_transforms{TransformStep::locf, TransformStep::log1p, TransformStep::first_difference};
  AnalysisParameters parameters;

  bool wants(Analysis a) const;
  const CommunitySource& community(const std::string& name) const;
};

/// Default transforms for a news-analysis response metric: counts are
/// log1p'd before differencing, bounded scores are differenced directly.
TransformSpec default_metric_transforms(const std::string& metric);

/// Parses a JSON configuration. Unknown keys are ConfigurationErrors;
/// relative paths resolve against `base_dir`.
AnalysisConfig parse_config(std::string_view text, const std::filesystem::path& base_dir,
                            const std::string& source = "<config>");
AnalysisConfig load_config(const std::filesystem::path& path);

/// Canonical JSON echo of the effective configuration (sorted keys).
std::string config_json(const AnalysisConfig& config, int indent = 2);
/// 16-hex-digit FNV-1a hash of the compact canonical JSON.
std::string config_hash(const AnalysisConfig& config);

}  // namespace causal_pulse
