#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causal_pulse/config.hpp"
#include "causal_pulse/impact.hpp"
#include "causal_pulse/ingest.hpp"
#include "causal_pulse/lexicon.hpp"
#include "causal_pulse/report.hpp"

namespace causal_pulse {

struct CommunityData {
  std::string name;
  DateRange window{};
  std::optional<std::vector<PostRecord>> posts;
  TimeSeries posters;
  TimeSeries posts_per_poster;
  std::map<std::string, TimeSeries> affect;
  std::vector<std::string> warnings;
};

struct PipelineData {
  std::vector<CommunityData> communities;
  std::vector<EventSpec> events;
  std::optional<TimeSeries> news_volume;
  std::vector<TimeSeries> entities;
  StopwordSet stopwords;
};

/// Reads every input the requested analyses need. All I/O and validation
/// errors surface here, before any analysis starts.
PipelineData load_data(const AnalysisConfig& config, const std::vector<Analysis>& analyses);

struct SectionOutput {
  Section section;
  std::vector<Artifact> artifacts;
};

/// Lexicons for every ordered pair (community, partner) of communities with
/// posts, each contrasted against all other communities pooled.
struct LexiconSet {
  std::vector<Lexicon> lexicons;
  std::map<std::string, DateRange> windows;
  std::vector<std::string> notes;

  const Lexicon* find(const std::string& community, const std::string& partner) const;
};

LexiconSet build_lexicons(const AnalysisConfig& config, const PipelineData& data);

SectionOutput run_impact(const AnalysisConfig& config, const PipelineData& data);
SectionOutput run_placebo(const AnalysisConfig& config, const PipelineData& data);
SectionOutput run_granger_news(const AnalysisConfig& config, const PipelineData& data);
SectionOutput run_lexicon(const AnalysisConfig& config, const PipelineData& data, const LexiconSet& lexicons);
SectionOutput run_diffusion(const AnalysisConfig& config, const PipelineData& data, const LexiconSet& lexicons);

/// Loads data and runs the requested analyses in canonical order.
RunReport run_analyses(const AnalysisConfig& config, const std::vector<Analysis>& analyses);
RunReport run_all(const AnalysisConfig& config);

/// LOCF that leaves a leading gap in place instead of failing.
TimeSeries carry_forward(const TimeSeries& series);

}  // namespace causal_pulse
