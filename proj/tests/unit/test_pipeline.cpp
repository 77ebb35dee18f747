#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "causal_pulse/config.hpp"
#include "causal_pulse/errors.hpp"
#include "causal_pulse/parallel.hpp"
#include "causal_pulse/pipeline.hpp"
#include "causal_pulse/report.hpp"
#include "causal_pulse/synthetic.hpp"

using namespace causal_pulse;
namespace fs = std::filesystem;

namespace {

struct Fixture {
  SyntheticDataset dataset;
  AnalysisConfig config;
  RunReport report;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    const fs::path dir = fs::temp_directory_path() / "causal_pulse_pipeline_unit";
    fs::remove_all(dir);
    out.dataset = write_synthetic_dataset(dir);
    out.config = load_config(out.dataset.config);
    out.config.parameters.mc_draws = 2000;
    out.report = run_all(out.config);
    return out;
  }();
  return f;
}

const Section& section(const RunReport& r, const std::string& name) {
  for (const auto& s : r.sections) {
    if (s.name == name) return s;
  }
  throw std::runtime_error("no section " + name);
}

std::size_t col(const Section& s, const std::string& name) {
  const auto it = std::find(s.columns.begin(), s.columns.end(), name);
  if (it == s.columns.end()) throw std::runtime_error("no column " + name);
  return static_cast<std::size_t>(it - s.columns.begin());
}

std::string cell(const Section& s, const std::vector<std::string>& row, const std::string& name) {
  return row[col(s, name)];
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config defaults and strict keys") {
  const auto c = parse_config("{}", "/data");
  CHECK(c.parameters.p_max_daily == 14);
  CHECK(c.parameters.p_max_weekly == 6);
  CHECK(c.parameters.pre_weeks == 11);
  CHECK(c.parameters.post_days == 7);
  CHECK(c.parameters.q == 0.05);
  CHECK(c.parameters.k == 100);
  CHECK(c.parameters.min_freq == 50);
  CHECK(c.parameters.sparsity == 0.25);
  CHECK(c.parameters.interval_level == 0.99);
  CHECK(c.parameters.placebo_shift_days == -21);
  CHECK(c.analyses == all_analyses());
  CHECK_THROWS_AS(parse_config("{\"sed\": 1}", "/data"), ConfigurationError);
  CHECK_THROWS_AS(parse_config("{\"parameters\": {\"q\": 2}}", "/data"), ConfigurationError);
  CHECK_THROWS_AS(parse_config("{\"parameters\": {\"lag\": 2}}", "/data"), ConfigurationError);
  CHECK_THROWS_AS(parse_config("{\"analyses\": [\"granger\"]}", "/data"), ConfigurationError);
  CHECK_THROWS_AS(parse_config("[1, 2", "/data"), ConfigurationError);

  const auto r = parse_config(R"({"events": "ev.csv", "communities": [{"name": "a", "posts": "a.jsonl"}]})", "/data");
  CHECK(r.events == fs::path("/data/ev.csv"));
  CHECK(r.communities[0].posts == fs::path("/data/a.jsonl"));
  CHECK(parse_analysis("granger-news") == Analysis::granger_news);
}

TEST_CASE("config hash ignores output location and parallelism") {
  auto a = parse_config(R"({"seed": 5, "output_dir": "x", "jobs": 1})", "/data");
  auto b = parse_config(R"({"seed": 5, "output_dir": "y", "jobs": 8})", "/data");
  auto c = parse_config(R"({"seed": 6})", "/data");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("carry forward keeps a leading gap") {
  const TimeSeries s("s", Frequency::daily, parse_date("2022-01-03"), {std::nullopt, 1.0, std::nullopt, 4.0});
  const auto f = carry_forward(s);
  CHECK_FALSE(f[0].has_value());
  CHECK(*f[2] == 1.0);
}

TEST_CASE("parallel map keeps order and reports the first failure") {
  const auto v = parallel_map<int>(50, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
  CHECK_THROWS_WITH(parallel_map<int>(20, 4,
                                      [](std::size_t i) -> int {
                                        if (i == 7 || i == 13) throw std::runtime_error(std::to_string(i));
                                        return 0;
                                      }),
                    "7");
}

TEST_CASE("report helpers") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333");
  CHECK(format_number(std::nan("")).empty());
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(slug("Capitol Attack, DC!") == "capitol-attack-dc");
}

TEST_CASE("missing inputs fail before any analysis") {
  const fs::path dir = fs::temp_directory_path() / "causal_pulse_pipeline_missing";
  fs::create_directories(dir);
  auto c = parse_config(R"({"analyses": ["impact"], "communities": [{"name": "a", "posts": "nope.jsonl"}]})", dir);
  CHECK_THROWS_AS(run_all(c), ConfigurationError);
  c = parse_config(R"({"analyses": ["impact"], "events": "e.csv", "news_volume": "n.csv",
                       "communities": [{"name": "a", "posts": "nope.jsonl"}]})",
                   dir);
  CHECK_THROWS_AS(run_all(c), IngestionError);
}

TEST_CASE("injected lifts are the significant events") {
  const auto& f = fixture();
  const auto& s = section(f.report, "impact");
  std::set<std::string> significant;
  for (const auto& row : s.rows) {
    if (cell(s, row, "community") == "forum_a" && cell(s, row, "signal") == "posters" &&
        cell(s, row, "significant_interval") == "true") {
      significant.insert(cell(s, row, "event"));
    }
  }
  CHECK(significant == std::set<std::string>(f.dataset.lifted_event_names.begin(), f.dataset.lifted_event_names.end()));
  for (const auto& fam : s.families) CHECK(fam.size == f.dataset.event_dates.size());
}

TEST_CASE("driver entity leads the planted metric") {
  const auto& f = fixture();
  const auto& s = section(f.report, "granger_news");
  bool found = false;
  for (const auto& row : s.rows) {
    if (cell(s, row, "community") != "forum_a" || cell(s, row, "metric") != "posts_per_poster") continue;
    if (cell(s, row, "stimulus") == f.dataset.driver_entity) {
      found = true;
      CHECK(cell(s, row, "significant_fdr") == "true");
    }
    if (cell(s, row, "response") == f.dataset.driver_entity) CHECK(cell(s, row, "significant_fdr") == "false");
  }
  CHECK(found);
  for (const auto& fam : s.families) CHECK(fam.size == 100);
}

TEST_CASE("planted term diffuses forward with a positive third lag") {
  const auto& f = fixture();
  const auto& s = section(f.report, "diffusion");
  bool found = false;
  for (const auto& row : s.rows) {
    if (row[col(s, "term")] != "zorblat") continue;
    if (cell(s, row, "stimulus") == "forum_a" && cell(s, row, "response") == "forum_b") {
      found = true;
      CHECK(cell(s, row, "significant_fdr") == "true");
      CHECK(cell(s, row, "lags").find("3+") != std::string::npos);
    }
    if (cell(s, row, "stimulus") == "forum_b" && cell(s, row, "response") == "forum_a") {
      CHECK(cell(s, row, "significant_fdr") == "false");
    }
  }
  CHECK(found);
}

TEST_CASE("accounting and family membership") {
  const auto& f = fixture();
  for (const auto& s : f.report.sections) {
    CAPTURE(s.name);
    CHECK(s.completed + s.skips.size() == s.requested);
    if (std::find(s.columns.begin(), s.columns.end(), "p_adjusted") == s.columns.end()) continue;
    std::size_t with_p = 0;
    for (const auto& row : s.rows) {
      if (!row[col(s, "p_adjusted")].empty()) ++with_p;
    }
    std::size_t members = 0;
    for (const auto& fam : s.families) members += fam.size;
    CHECK(members == with_p);
  }
  const auto& placebo = section(f.report, "placebo");
  for (const auto& row : placebo.rows) CHECK(cell(placebo, row, "n_events") == "8");
}

TEST_CASE("written report is self-describing") {
  const auto& f = fixture();
  const fs::path out = fs::temp_directory_path() / "causal_pulse_pipeline_unit_out";
  fs::remove_all(out);
  const auto files = write_report(f.report, out);
  CHECK(std::find(files.begin(), files.end(), "run_manifest.json") != files.end());
  std::ifstream in(out / "impact.json");
  const auto j = nlohmann::json::parse(in);
  CHECK(j.at("section") == "impact");
  CHECK(j.at("config_hash") == f.report.config_hash);
  CHECK(j.at("parameters").at("p_max_daily") == 14);
  CHECK(j.at("rows").get<std::size_t>() == section(f.report, "impact").rows.size());
  CHECK(fs::exists(out / "lexicon" / "forum-a__forum-b.csv"));
  bool svg = false;
  for (const auto& a : f.report.artifacts) svg = svg || a.path.ends_with(".svg");
  CHECK(svg);
}

}

TEST_CASE("bundled data files" * doctest::test_suite("pipeline")) {
  const auto events = read_events_csv(CAUSAL_PULSE_DATA_DIR "/events.csv");
  CHECK(events.size() == 36);
  CHECK(events.front().name == "New Zealand mosque attack");
  CHECK(std::any_of(events.begin(), events.end(), [](const EventSpec& e) {
    return e.name == "Glendale, Arizona incel attack" && e.date == parse_date("2020-05-20");
  }));
  const auto stop = read_stopwords(CAUSAL_PULSE_DATA_DIR "/stopwords_en.txt");
  CHECK(stop.size() == 179);
  CHECK(stop.count("the") == 1);
}
