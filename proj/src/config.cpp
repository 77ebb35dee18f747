#include "causal_pulse/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "causal_pulse/errors.hpp"
#include "causal_pulse/seed.hpp"

namespace causal_pulse {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigurationError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (allowed.count(key) == 0) throw ConfigurationError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigurationError(where + "." + key + ": " + e.what());
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string relative_to(const fs::path& base, const fs::path& p) {
  if (base.empty()) return p.generic_string();
  const fs::path rel = p.lexically_relative(base);
  return rel.empty() ? p.generic_string() : rel.generic_string();
}

TransformSpec parse_transforms(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ConfigurationError(where + ": expected an array of transform names");
  std::vector<TransformStep> steps;
  try {
    for (const auto& s : arr) steps.push_back(parse_transform_step(s.get<std::string>()));
    return TransformSpec(std::move(steps));
  } catch (const json::exception& e) {
    throw ConfigurationError(where + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigurationError(where + ": " + e.what());
  }
}

json transforms_json(const TransformSpec& spec) {
  json arr = json::array();
  for (auto s : spec.steps()) arr.push_back(to_string(s));
  return arr;
}

std::optional<Date> optional_date(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  try {
    return parse_date(get<std::string>(obj, key, where));
  } catch (const ConfigurationError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigurationError(where + "." + key + ": " + e.what());
  }
}

void parse_parameters(const json& j, AnalysisParameters& p) {
  const std::string where = "parameters";
  check_keys(j, {"p_max_daily", "p_max_weekly", "pre_weeks", "post_days", "q", "k", "min_freq", "sparsity",
                 "mc_draws", "interval_level", "placebo_shift_days", "year_lag_days", "seasonal_lag_days",
                 "news_entities"},
             where);
  if (j.contains("p_max_daily")) p.p_max_daily = get<std::size_t>(j, "p_max_daily", where);
  if (j.contains("p_max_weekly")) p.p_max_weekly = get<std::size_t>(j, "p_max_weekly", where);
  if (j.contains("pre_weeks")) p.pre_weeks = get<int>(j, "pre_weeks", where);
  if (j.contains("post_days")) p.post_days = get<int>(j, "post_days", where);
  if (j.contains("q")) p.q = get<double>(j, "q", where);
  if (j.contains("k")) p.k = get<std::size_t>(j, "k", where);
  if (j.contains("min_freq")) p.min_freq = get<std::uint64_t>(j, "min_freq", where);
  if (j.contains("sparsity")) p.sparsity = get<double>(j, "sparsity", where);
  if (j.contains("mc_draws")) p.mc_draws = get<std::size_t>(j, "mc_draws", where);
  if (j.contains("interval_level")) p.interval_level = get<double>(j, "interval_level", where);
  if (j.contains("placebo_shift_days")) p.placebo_shift_days = get<int>(j, "placebo_shift_days", where);
  if (j.contains("year_lag_days")) p.year_lag_days = get<int>(j, "year_lag_days", where);
  if (j.contains("seasonal_lag_days")) p.seasonal_lag_days = get<int>(j, "seasonal_lag_days", where);
  if (j.contains("news_entities")) p.news_entities = get<std::size_t>(j, "news_entities", where);

  if (p.p_max_daily < 1 || p.p_max_weekly < 1) throw ConfigurationError("parameters: p_max must be at least 1");
  if (p.pre_weeks < 1 || p.post_days < 1) throw ConfigurationError("parameters: empty impact window");
  if (!(p.q > 0.0 && p.q < 1.0)) throw ConfigurationError("parameters.q must lie in (0,1)");
  if (!(p.sparsity > 0.0 && p.sparsity <= 1.0)) throw ConfigurationError("parameters.sparsity must lie in (0,1]");
  if (!(p.interval_level > 0.0 && p.interval_level < 1.0)) {
    throw ConfigurationError("parameters.interval_level must lie in (0,1)");
  }
  if (p.mc_draws < 2) throw ConfigurationError("parameters.mc_draws must be at least 2");
  if (p.k < 1) throw ConfigurationError("parameters.k must be at least 1");
  if (p.year_lag_days < 1 || p.seasonal_lag_days < 1) throw ConfigurationError("parameters: lags must be positive");
}

json parameters_json(const AnalysisParameters& p) {
  return json{{"p_max_daily", p.p_max_daily},
              {"p_max_weekly", p.p_max_weekly},
              {"pre_weeks", p.pre_weeks},
              {"post_days", p.post_days},
              {"q", p.q},
              {"k", p.k},
              {"min_freq", p.min_freq},
              {"sparsity", p.sparsity},
              {"mc_draws", p.mc_draws},
              {"interval_level", p.interval_level},
              {"placebo_shift_days", p.placebo_shift_days},
              {"year_lag_days", p.year_lag_days},
              {"seasonal_lag_days", p.seasonal_lag_days},
              {"news_entities", p.news_entities}};
}

// Everything except output location and parallelism, which must not change results.
json effective_json(const AnalysisConfig& c) {
  const fs::path& base = c.base_dir;
  json j;
  j["seed"] = c.seed;
  json analyses = json::array();
  for (auto a : c.analyses) analyses.push_back(to_string(a));
  j["analyses"] = analyses;
  json comms = json::array();
  for (const auto& cs : c.communities) {
    json o{{"name", cs.name}};
    if (cs.posts) o["posts"] = relative_to(base, *cs.posts);
    if (cs.posters) o["posters"] = relative_to(base, *cs.posters);
    if (cs.posts_per_poster) o["posts_per_poster"] = relative_to(base, *cs.posts_per_poster);
    if (!cs.affect.empty()) {
      json a = json::object();
      for (const auto& [label, path] : cs.affect) a[label] = relative_to(base, path);
      o["affect"] = a;
    }
    if (cs.start) o["start"] = format_date(*cs.start);
    if (cs.end) o["end"] = format_date(*cs.end);
    comms.push_back(o);
  }
  j["communities"] = comms;
  json ents = json::array();
  for (const auto& e : c.entities) ents.push_back(json{{"name", e.name}, {"series", relative_to(base, e.series)}});
  j["entities"] = ents;
  if (c.events) j["events"] = relative_to(base, *c.events);
  if (c.news_volume) j["news_volume"] = relative_to(base, *c.news_volume);
  if (c.stopwords) j["stopwords"] = relative_to(base, *c.stopwords);
  json metrics = json::array();
  for (const auto& m : c.metrics) metrics.push_back(json{{"name", m.name}, {"transforms", transforms_json(m.transforms)}});
  j["metrics"] = metrics;
  j["entity_transforms"] = transforms_json(c.entity_transforms);
  j["parameters"] = parameters_json(c.parameters);
  return j;
}

}  // namespace

std::string to_string(Analysis a) {
  switch (a) {
    case Analysis::impact: return "impact";
    case Analysis::granger_news: return "granger_news";
    case Analysis::diffusion: return "diffusion";
    case Analysis::lexicon: return "lexicon";
    case Analysis::placebo: return "placebo";
  }
  return "?";
}

Analysis parse_analysis(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '-', '_');
  for (auto a : all_analyses()) {
    if (to_string(a) == n) return a;
  }
  throw ConfigurationError("unknown analysis '" + std::string(name) + "'");
}

const std::vector<Analysis>& all_analyses() {
  static const std::vector<Analysis> all{Analysis::impact, Analysis::granger_news, Analysis::diffusion,
                                         Analysis::lexicon, Analysis::placebo};
  return all;
}

bool AnalysisConfig::wants(Analysis a) const { return std::find(analyses.begin(), analyses.end(), a) != analyses.end(); }

const CommunitySource& AnalysisConfig::community(const std::string& name) const {
  for (const auto& c : communities) {
    if (c.name == name) return c;
  }
  throw ConfigurationError("unknown community '" + name + "'");
}

TransformSpec default_metric_transforms(const std::string& metric) {
  if (metric == "posters" || metric == "posts_per_poster") {
    return {TransformStep::locf, TransformStep::log1p, TransformStep::first_difference};
  }
  return {TransformStep::locf, TransformStep::first_difference};
}

AnalysisConfig parse_config(std::string_view text, const fs::path& base_dir, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigurationError(source + ": invalid JSON: " + e.what());
  }
  check_keys(j, {"output_dir", "seed", "jobs", "analyses", "communities", "entities", "events", "news_volume",
                 "stopwords", "metrics", "entity_transforms", "parameters"},
             source);

  AnalysisConfig c;
  c.base_dir = base_dir;
  if (j.contains("output_dir")) c.output_dir = resolve(base_dir, get<std::string>(j, "output_dir", source));
  else c.output_dir = resolve(base_dir, "out");
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", source);
  if (j.contains("jobs")) c.jobs = get<std::size_t>(j, "jobs", source);
  if (c.jobs == 0) throw ConfigurationError(source + ": jobs must be at least 1");

  if (j.contains("analyses")) {
    for (const auto& a : j.at("analyses")) {
      if (!a.is_string()) throw ConfigurationError(source + ".analyses: expected strings");
      const Analysis parsed = parse_analysis(a.get<std::string>());
      if (!c.wants(parsed)) c.analyses.push_back(parsed);
    }
  } else {
    c.analyses = all_analyses();
  }

  if (j.contains("communities")) {
    const auto& arr = j.at("communities");
    if (!arr.is_array()) throw ConfigurationError(source + ".communities: expected an array");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = fmt::format("communities[{}]", i);
      const auto& o = arr[i];
      check_keys(o, {"name", "posts", "posters", "posts_per_poster", "affect", "start", "end"}, where);
      CommunitySource cs;
      cs.name = get<std::string>(o, "name", where);
      if (cs.name.empty()) throw ConfigurationError(where + ": empty name");
      if (!seen.insert(cs.name).second) throw ConfigurationError(where + ": duplicate community '" + cs.name + "'");
      if (o.contains("posts")) cs.posts = resolve(base_dir, get<std::string>(o, "posts", where));
      if (o.contains("posters")) cs.posters = resolve(base_dir, get<std::string>(o, "posters", where));
      if (o.contains("posts_per_poster")) {
        cs.posts_per_poster = resolve(base_dir, get<std::string>(o, "posts_per_poster", where));
      }
      if (o.contains("affect")) {
        const auto& a = o.at("affect");
        if (!a.is_object()) throw ConfigurationError(where + ".affect: expected an object");
        for (const auto& [label, path] : a.items()) {
          cs.affect[label] = resolve(base_dir, path.get<std::string>());
        }
      }
      cs.start = optional_date(o, "start", where);
      cs.end = optional_date(o, "end", where);
      if (cs.start && cs.end && *cs.end < *cs.start) throw ConfigurationError(where + ": end precedes start");
      if (!cs.posts && (!cs.posters || !cs.posts_per_poster)) {
        throw ConfigurationError(where + ": needs 'posts' or both 'posters' and 'posts_per_poster'");
      }
      c.communities.push_back(std::move(cs));
    }
  }

  if (j.contains("entities")) {
    const auto& arr = j.at("entities");
    if (!arr.is_array()) throw ConfigurationError(source + ".entities: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = fmt::format("entities[{}]", i);
      check_keys(arr[i], {"name", "series"}, where);
      c.entities.push_back({get<std::string>(arr[i], "name", where),
                            resolve(base_dir, get<std::string>(arr[i], "series", where))});
    }
  }
  if (j.contains("events")) c.events = resolve(base_dir, get<std::string>(j, "events", source));
  if (j.contains("news_volume")) c.news_volume = resolve(base_dir, get<std::string>(j, "news_volume", source));
  if (j.contains("stopwords")) c.stopwords = resolve(base_dir, get<std::string>(j, "stopwords", source));

  if (j.contains("metrics")) {
    const auto& arr = j.at("metrics");
    if (!arr.is_array()) throw ConfigurationError(source + ".metrics: expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = fmt::format("metrics[{}]", i);
      if (arr[i].is_string()) {
        const auto name = arr[i].get<std::string>();
        c.metrics.push_back({name, default_metric_transforms(name)});
      } else {
        check_keys(arr[i], {"name", "transforms"}, where);
        MetricSpec m;
        m.name = get<std::string>(arr[i], "name", where);
        m.transforms = arr[i].contains("transforms") ? parse_transforms(arr[i].at("transforms"), where + ".transforms")
                                                     : default_metric_transforms(m.name);
        c.metrics.push_back(std::move(m));
      }
    }
  } else {
    for (const char* name : {"posters", "posts_per_poster"}) c.metrics.push_back({name, default_metric_transforms(name)});
  }
  if (j.contains("entity_transforms")) {
    c.entity_transforms = parse_transforms(j.at("entity_transforms"), "entity_transforms");
  }
  if (j.contains("parameters")) parse_parameters(j.at("parameters"), c.parameters);
  return c;
}

AnalysisConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const fs::path abs = fs::absolute(path).lexically_normal();
  AnalysisConfig c = parse_config(ss.str(), abs.parent_path(), path.string());
  c.source = abs;
  return c;
}

std::string config_json(const AnalysisConfig& config, int indent) { return effective_json(config).dump(indent); }

std::string config_hash(const AnalysisConfig& config) {
  return fmt::format("{:016x}", fnv1a64(effective_json(config).dump()));
}

}  // namespace causal_pulse
