#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "causal_pulse/date.hpp"
#include "causal_pulse/series.hpp"

namespace causal_pulse {

struct PostRecord {
  std::string author;
  Instant timestamp;
  std::string text;
  std::map<std::string, double> scores;  // precomputed affect intensities
};

/// Reads JSON-lines posts (author, timestamp, text, optional scores object).
/// Blank lines are skipped; any malformed record raises IngestionError with
/// its 1-based line number.
std::vector<PostRecord> read_posts_jsonl(const std::filesystem::path& path);
std::vector<PostRecord> parse_posts_jsonl(std::istream& in, const std::string& source = "<stream>");

/// Reads a `date,value` CSV. Empty value cells are missing. Dates must be
/// contiguous at the given frequency.
TimeSeries read_series_csv(const std::filesystem::path& path, std::string name,
                           Frequency frequency = Frequency::daily);
TimeSeries parse_series_csv(std::istream& in, std::string name, Frequency frequency,
                            const std::string& source = "<stream>");
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series);
void write_series_csv(std::ostream& out, const TimeSeries& series);

struct Engagement {
  TimeSeries posters;           // distinct authors per day
  TimeSeries posts_per_poster;  // posts / posters, missing on zero-poster days
  std::vector<std::string> warnings;
};

/// Daily engagement over the window. Posts outside the window are ignored.
Engagement compute_engagement(const std::vector<PostRecord>& posts, const DateRange& window);

/// Daily unweighted mean of per-post scores for `label`. A day is missing if
/// it has no posts or any of its posts lacks the label. Throws
/// ConfigurationError if no post carries the label.
TimeSeries compute_affect_series(const std::vector<PostRecord>& posts, const std::string& label,
                                 const DateRange& window);

}  // namespace causal_pulse
