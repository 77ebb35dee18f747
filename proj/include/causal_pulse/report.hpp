#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causal_pulse/config.hpp"

namespace causal_pulse {

struct Skip {
  std::string item;
  std::string reason;
};

struct FamilySummary {
  std::string label;
  std::size_t size = 0;
  std::size_t rejected = 0;
  double q = 0.05;
};

/// One analysis section: a result table plus its accounting.
struct Section {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<Skip> skips;
  std::vector<FamilySummary> families;
  std::vector<std::string> notes;
  std::vector<std::string> warnings;
  std::size_t requested = 0;  // analysis units (events, pairs, terms, ...)
  std::size_t completed = 0;  // units that produced rows; completed + skips == requested
};

/// An auxiliary file produced alongside a section (plot, plot data, per-pair
/// lexicon table). Path is relative to the output directory.
struct Artifact {
  std::string path;
  std::string content;
};

struct RunReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string config_echo;
  std::vector<Section> sections;
  std::vector<Artifact> artifacts;
};

/// Shortest round-trip-stable text for report cells ("{:.10g}"); NaN and
/// infinities become empty cells.
std::string format_number(double v);

std::string csv_escape(const std::string& cell);
std::string section_csv(const Section& s);
std::string section_json(const Section& s, const RunReport& report);

/// Seconds since the epoch taken from SOURCE_DATE_EPOCH when set, else now.
std::int64_t build_timestamp();

/// Writes <name>.csv and <name>.json per section, all artifacts, and
/// run_manifest.json. Returns the written paths relative to `dir`.
std::vector<std::string> write_report(const RunReport& report, const std::filesystem::path& dir);

/// Lowercase alphanumeric slug for file names.
std::string slug(std::string_view text);

}  // namespace causal_pulse
