#include "causal_pulse/ingest.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <unordered_set>

#include "causal_pulse/errors.hpp"

namespace causal_pulse {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError(path.string(), 0, "cannot open file");
  return in;
}

}  // namespace

std::vector<PostRecord> parse_posts_jsonl(std::istream& in, const std::string& source) {
  std::vector<PostRecord> posts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw IngestionError(source, lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw IngestionError(source, lineno, "record is not a JSON object");
    PostRecord post;
    try {
      post.author = obj.at("author").get<std::string>();
      post.timestamp = parse_timestamp(obj.at("timestamp").get<std::string>());
      post.text = obj.value("text", std::string{});
      if (auto it = obj.find("scores"); it != obj.end() && !it->is_null()) {
        for (const auto& [label, value] : it->items()) post.scores[label] = value.get<double>();
      }
    } catch (const json::exception& e) {
      throw IngestionError(source, lineno, e.what());
    } catch (const ArgumentError& e) {
      throw IngestionError(source, lineno, e.what());
    }
    if (post.author.empty()) throw IngestionError(source, lineno, "empty author");
    posts.push_back(std::move(post));
  }
  return posts;
}

std::vector<PostRecord> read_posts_jsonl(const fs::path& path) {
  auto in = open_input(path);
  return parse_posts_jsonl(in, path.string());
}

TimeSeries parse_series_csv(std::istream& in, std::string name, Frequency frequency,
                            const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw IngestionError(source, 1, "empty series file");
  ++lineno;
  if (trim(line) != "date,value") throw IngestionError(source, lineno, "expected header 'date,value'");

  const long step = frequency == Frequency::daily ? 1 : 7;
  std::vector<TimeSeries::Value> values;
  Date start{};
  Date expected{};
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos) throw IngestionError(source, lineno, "expected two columns");
    Date d;
    try {
      d = parse_date(trim(row.substr(0, comma)));
    } catch (const ArgumentError& e) {
      throw IngestionError(source, lineno, e.what());
    }
    if (values.empty()) {
      start = d;
    } else if (d != expected) {
      throw IngestionError(source, lineno,
                           "non-contiguous date " + format_date(d) + ", expected " + format_date(expected));
    }
    expected = add_days(d, step);

    const auto cell = trim(row.substr(comma + 1));
    if (cell.empty()) {
      values.emplace_back(std::nullopt);
      continue;
    }
    const std::string cell_str(cell);
    char* end = nullptr;
    const double v = std::strtod(cell_str.c_str(), &end);
    if (end != cell_str.c_str() + cell_str.size()) {
      throw IngestionError(source, lineno, "invalid number '" + cell_str + "'");
    }
    values.emplace_back(v);
  }
  return TimeSeries(std::move(name), frequency, start, std::move(values));
}

TimeSeries read_series_csv(const fs::path& path, std::string name, Frequency frequency) {
  auto in = open_input(path);
  return parse_series_csv(in, std::move(name), frequency, path.string());
}

void write_series_csv(std::ostream& out, const TimeSeries& series) {
  out << "date,value\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    out << format_date(series.date_at(k)) << ',';
    if (series[k]) out << fmt::format("{:.17g}", *series[k]);
    out << '\n';
  }
}

void write_series_csv(const fs::path& path, const TimeSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write '" + path.string() + "'");
  write_series_csv(out, series);
}

Engagement compute_engagement(const std::vector<PostRecord>& posts, const DateRange& window) {
  if (window.empty()) throw ArgumentError("compute_engagement: empty window");
  const auto n = static_cast<std::size_t>(window.days());
  std::vector<std::unordered_set<std::string_view>> authors(n);
  std::vector<double> counts(n, 0.0);
  for (const auto& post : posts) {
    const Date d = day_of(post.timestamp);
    if (!window.contains(d)) continue;
    const auto k = static_cast<std::size_t>((d - window.first).count());
    authors[k].insert(post.author);
    counts[k] += 1.0;
  }

  std::vector<TimeSeries::Value> posters(n), ratio(n);
  std::size_t missing = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto users = static_cast<double>(authors[k].size());
    posters[k] = users;
    if (users > 0) {
      ratio[k] = counts[k] / users;
    } else {
      ++missing;
    }
  }
  Engagement out{TimeSeries("posters", Frequency::daily, window.first, std::move(posters)),
                 TimeSeries("posts_per_poster", Frequency::daily, window.first, std::move(ratio)),
                 {}};
  if (missing == n) {
    out.warnings.push_back("no posts fall inside " + format_date(window.first) + " .. " +
                           format_date(window.last) + "; engagement series are empty");
  }
  return out;
}

TimeSeries compute_affect_series(const std::vector<PostRecord>& posts, const std::string& label,
                                 const DateRange& window) {
  if (window.empty()) throw ArgumentError("compute_affect_series: empty window");
  const auto n = static_cast<std::size_t>(window.days());
  std::vector<double> sum(n, 0.0);
  std::vector<int> count(n, 0);
  std::vector<bool> incomplete(n, false);
  std::set<std::string> available;
  bool seen = false;

  for (const auto& post : posts) {
    for (const auto& [name, value] : post.scores) available.insert(name);
    const Date d = day_of(post.timestamp);
    if (!window.contains(d)) continue;
    const auto k = static_cast<std::size_t>((d - window.first).count());
    const auto it = post.scores.find(label);
    if (it == post.scores.end()) {
      incomplete[k] = true;
      continue;
    }
    seen = true;
    sum[k] += it->second;
    ++count[k];
  }
  if (!seen && available.count(label) == 0) {
    std::string listing;
    for (const auto& a : available) listing += (listing.empty() ? "" : ", ") + a;
    throw ConfigurationError("unknown affect label '" + label + "'; available labels: " +
                             (listing.empty() ? "(none)" : listing));
  }

  std::vector<TimeSeries::Value> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (count[k] > 0 && !incomplete[k]) out[k] = sum[k] / count[k];
  }
  return TimeSeries(label, Frequency::daily, window.first, std::move(out));
}

}  // namespace causal_pulse
