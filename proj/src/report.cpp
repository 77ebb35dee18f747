#include "causal_pulse/report.hpp"

#include <fmt/format.h>

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>

#include "causal_pulse/errors.hpp"
#include "causal_pulse/seed.hpp"

#ifndef CAUSAL_PULSE_VERSION
#define CAUSAL_PULSE_VERSION "0.0.0"
#endif

namespace causal_pulse {
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

std::string iso_utc(std::int64_t seconds) {
  const auto tp = std::chrono::sys_seconds{std::chrono::seconds{seconds}};
  const auto day = std::chrono::floor<std::chrono::days>(tp);
  const std::chrono::hh_mm_ss hms{tp - day};
  return fmt::format("{}T{:02}:{:02}:{:02}Z", format_date(day), hms.hours().count(), hms.minutes().count(),
                     hms.seconds().count());
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) return "";
  if (v == 0.0) return "0";
  return fmt::format("{:.10g}", v);
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string section_csv(const Section& s) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out += ',';
      out += csv_escape(cells[i]);
    }
    out += '\n';
  };
  line(s.columns);
  for (const auto& r : s.rows) line(r);
  return out;
}

std::string section_json(const Section& s, const RunReport& report) {
  ojson j;
  j["section"] = s.name;
  j["config_hash"] = report.config_hash;
  j["seed"] = report.seed;
  if (!report.config_echo.empty()) j["parameters"] = ojson::parse(report.config_echo).at("parameters");
  j["requested"] = s.requested;
  j["completed"] = s.completed;
  j["rows"] = s.rows.size();
  j["skipped"] = s.skips.size();
  ojson fams = ojson::array();
  for (const auto& f : s.families) {
    fams.push_back(ojson{{"family", f.label}, {"size", f.size}, {"rejected", f.rejected}, {"q", f.q}});
  }
  j["families"] = fams;
  j["notes"] = s.notes;
  j["warnings"] = s.warnings;
  ojson skips = ojson::array();
  for (const auto& sk : s.skips) skips.push_back(ojson{{"item", sk.item}, {"reason", sk.reason}});
  j["skips"] = skips;
  ojson rows = ojson::array();
  for (const auto& r : s.rows) {
    ojson o;
    for (std::size_t i = 0; i < s.columns.size() && i < r.size(); ++i) o[s.columns[i]] = r[i];
    rows.push_back(o);
  }
  j["table"] = rows;
  return j.dump(2) + "\n";
}

std::int64_t build_timestamp() {
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != nullptr && *end == '\0') return v;
  }
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

std::string slug(std::string_view text) {
  std::string out;
  bool dash = false;
  for (unsigned char c : text) {
    if (std::isalnum(c) != 0) {
      out += static_cast<char>(std::tolower(c));
      dash = false;
    } else if (!out.empty() && !dash) {
      out += '-';
      dash = true;
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "x" : out;
}

std::vector<std::string> write_report(const RunReport& report, const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& s : report.sections) {
    files.emplace_back(s.name + ".csv", section_csv(s));
    files.emplace_back(s.name + ".json", section_json(s, report));
  }
  for (const auto& a : report.artifacts) files.emplace_back(a.path, a.content);

  std::vector<std::string> written;
  ojson listing = ojson::array();
  for (const auto& [path, content] : files) {
    write_file(dir / path, content);
    written.push_back(path);
    listing.push_back(ojson{{"path", path}, {"bytes", content.size()}, {"fnv1a64", fmt::format("{:016x}", fnv1a64(content))}});
  }

  const bool pinned = std::getenv("SOURCE_DATE_EPOCH") != nullptr;
  ojson manifest;
  manifest["tool"] = "causal-pulse";
  manifest["version"] = CAUSAL_PULSE_VERSION;
  manifest["created"] = iso_utc(build_timestamp());
  manifest["created_from_source_date_epoch"] = pinned;
  manifest["seed"] = report.seed;
  manifest["config_hash"] = report.config_hash;
  manifest["config"] = ojson::parse(report.config_echo);
  ojson sections = ojson::array();
  for (const auto& s : report.sections) {
    sections.push_back(ojson{{"name", s.name},
                             {"requested", s.requested},
                             {"completed", s.completed},
                             {"rows", s.rows.size()},
                             {"skipped", s.skips.size()}});
  }
  manifest["sections"] = sections;
  manifest["files"] = listing;
  write_file(dir / "run_manifest.json", manifest.dump(2) + "\n");
  written.emplace_back("run_manifest.json");
  return written;
}

}  // namespace causal_pulse
