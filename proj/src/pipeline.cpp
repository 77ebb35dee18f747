#include "causal_pulse/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <variant>

#include "causal_pulse/errors.hpp"
#include "causal_pulse/granger.hpp"
#include "causal_pulse/parallel.hpp"
#include "causal_pulse/seed.hpp"
#include "causal_pulse/stat_tests.hpp"
#include "causal_pulse/svg.hpp"
#include "causal_pulse/var.hpp"

namespace causal_pulse {
namespace {

const char* kArrow = "\xE2\x86\x92";  // U+2192

std::string num(double v) { return format_number(v); }
std::string pct(double v) { return std::isfinite(v) ? fmt::format("{:.2f}", 100.0 * v) : ""; }
std::string flag(bool b) { return b ? "true" : "false"; }

struct Signal {
  const char* name;
  EffectScale scale;
};
constexpr Signal kSignals[] = {{"posters", EffectScale::log1p}, {"posts_per_poster", EffectScale::identity}};

const TimeSeries& signal_series(const CommunityData& c, const std::string& name) {
  if (name == "posters") return c.posters;
  if (name == "posts_per_poster") return c.posts_per_poster;
  const auto it = c.affect.find(name);
  if (it == c.affect.end()) {
    std::string available = "posters, posts_per_poster";
    for (const auto& [label, s] : c.affect) available += ", " + label;
    throw ConfigurationError("community " + c.name + " has no metric '" + name + "' (available: " + available + ")");
  }
  return it->second;
}

bool has_series(const CommunityData& c) { return !c.posters.empty() && !c.posts_per_poster.empty(); }

DateRange range_of(const TimeSeries& s) { return {s.start(), s.end()}; }

DateRange intersect(const DateRange& a, const DateRange& b) {
  return {std::max(a.first, b.first), std::min(a.last, b.last)};
}

TimeSeries clip(const TimeSeries& s, const DateRange& w) {
  if (s.empty()) return s;
  return s.slice(w.first, w.last);
}

ImpactSettings impact_settings(const AnalysisParameters& p) {
  ImpactSettings s;
  s.pre_days = 7 * p.pre_weeks;
  s.post_days = p.post_days;
  s.year_lag_days = p.year_lag_days;
  s.seasonal_lag_days = p.seasonal_lag_days;
  s.interval_level = p.interval_level;
  s.mc_draws = p.mc_draws;
  return s;
}

std::optional<ExogenousBlock> community_exogenous(const CommunityData& c, const PipelineData& data) {
  if (!data.news_volume || data.news_volume->empty()) return std::nullopt;
  const DateRange w = intersect(c.window, range_of(*data.news_volume));
  if (w.empty()) return std::nullopt;
  return build_exogenous(w, *data.news_volume);
}

FamilySummary summarise(const FdrResult& fdr, double q) {
  return {fdr.label, fdr.family_size, fdr.rejected_ids.size(), q};
}

// Two Granger directions from one fitted pair, with their accounting.
struct PairOutcome {
  std::optional<std::string> skip;
  LagSelection selection;
  GrangerResult forward;
  GrangerResult reverse;
};

PairOutcome analyse_pair(TimeSeries a, TimeSeries b, const ExogenousBlock* exo, std::size_t p_max) {
  PairOutcome out;
  try {
    const StationarityScreen screen = screen_pair(a, b);
    if (!screen.retained) {
      out.skip = fmt::format(
          "retention gate: ADF p {}/{} (stat {}/{}), KPSS p {}/{} (stat {}/{})", num(screen.stimulus_adf.p_value),
          num(screen.response_adf.p_value), num(screen.stimulus_adf.statistic), num(screen.response_adf.statistic),
          num(screen.stimulus_kpss.p_value), num(screen.response_kpss.p_value), num(screen.stimulus_kpss.statistic),
          num(screen.response_kpss.statistic));
      return out;
    }
    out.selection = select_lag(a, b, exo, p_max);
    const VarModel model = fit_varx(a, b, exo, out.selection.chosen);
    out.forward = diagnose(model, granger_test(model, a.name(), b.name()));
    out.reverse = diagnose(model, granger_test(model, b.name(), a.name()));
  } catch (const Error& e) {
    out.skip = e.what();
  }
  return out;
}

std::vector<std::string> granger_columns(std::vector<std::string> head) {
  for (const char* c : {"stimulus", "response", "f_statistic", "p_value", "p_adjusted", "stars_raw", "stars_adjusted",
                        "significant_fdr", "lag_order", "lag_rule", "aic_lag", "bic_lag", "hqic_lag", "lags",
                        "daggers", "resid_adf_pass", "resid_kpss_pass"}) {
    head.emplace_back(c);
  }
  return head;
}

std::vector<std::string> granger_cells(const GrangerResult& g, const LagSelection& sel, double adjusted, double q) {
  const auto& d = *g.diagnostics;
  return {g.stimulus,
          g.response,
          num(g.f_statistic),
          num(g.p_value),
          num(adjusted),
          stars(g.p_value),
          stars(adjusted),
          flag(adjusted < q),
          std::to_string(g.lag_order),
          to_string(sel.rule),
          std::to_string(sel.aic_lag),
          std::to_string(sel.bic_lag),
          std::to_string(sel.hqic_lag),
          g.annotation(),
          d.daggers(),
          flag(d.resid_adf_pass),
          flag(d.resid_kpss_pass)};
}

// Restricts weekly counts to the full weeks inside `w`.
WeeklyTermCounts restrict_weeks(const WeeklyTermCounts& in, const DateRange& w) {
  WeeklyTermCounts out;
  std::size_t first = 0;
  while (first < in.weeks && add_days(in.first_week, 7 * static_cast<long>(first)) < w.first) ++first;
  std::size_t last = first;
  while (last < in.weeks && add_days(in.first_week, 7 * static_cast<long>(last) + 6) <= w.last) ++last;
  out.first_week = add_days(in.first_week, 7 * static_cast<long>(first));
  out.weeks = last - first;
  out.posts_per_week.assign(in.posts_per_week.begin() + static_cast<long>(first),
                            in.posts_per_week.begin() + static_cast<long>(last));
  for (const auto& [term, counts] : in.counts) {
    out.counts[term].assign(counts.begin() + static_cast<long>(first), counts.begin() + static_cast<long>(last));
  }
  return out;
}

}  // namespace

TimeSeries carry_forward(const TimeSeries& series) {
  std::vector<TimeSeries::Value> v = series.values();
  std::optional<double> last;
  for (auto& x : v) {
    if (x) last = x;
    else if (last) x = last;
  }
  return TimeSeries(series.name(), series.frequency(), series.start(), std::move(v));
}

PipelineData load_data(const AnalysisConfig& config, const std::vector<Analysis>& analyses) {
  auto wants = [&](Analysis a) { return std::find(analyses.begin(), analyses.end(), a) != analyses.end(); };
  const bool need_series = wants(Analysis::impact) || wants(Analysis::placebo) || wants(Analysis::granger_news);
  const bool need_text = wants(Analysis::lexicon) || wants(Analysis::diffusion);
  const bool need_volume = wants(Analysis::impact) || wants(Analysis::placebo) || wants(Analysis::granger_news);

  const bool need_affect = std::any_of(config.metrics.begin(), config.metrics.end(), [](const MetricSpec& m) {
    return m.name != "posters" && m.name != "posts_per_poster";
  });

  if ((wants(Analysis::impact) || wants(Analysis::placebo)) && !config.events) {
    throw ConfigurationError("impact/placebo analyses need an 'events' file");
  }
  if (need_volume && !config.news_volume) {
    throw ConfigurationError("impact, placebo and granger_news need a 'news_volume' series");
  }
  if (need_text && !config.stopwords) throw ConfigurationError("lexicon/diffusion analyses need a 'stopwords' file");

  PipelineData data;
  for (const auto& cs : config.communities) {
    CommunityData c;
    c.name = cs.name;
    if (cs.posts && (need_text || !(cs.posters && cs.posts_per_poster) || (need_series && need_affect))) {
      c.posts = read_posts_jsonl(*cs.posts);
    }
    if (cs.posters && cs.posts_per_poster) {
      c.posters = read_series_csv(*cs.posters, "posters");
      c.posts_per_poster = read_series_csv(*cs.posts_per_poster, "posts_per_poster");
      if (c.posters.start() != c.posts_per_poster.start() || c.posters.size() != c.posts_per_poster.size()) {
        throw ConfigurationError("community " + cs.name + ": posters and posts_per_poster cover different dates");
      }
      c.window = c.posters.empty() ? DateRange{} : range_of(c.posters);
    } else if (c.posts && !c.posts->empty()) {
      auto [lo, hi] = std::minmax_element(c.posts->begin(), c.posts->end(), [](const auto& x, const auto& y) {
        return x.timestamp < y.timestamp;
      });
      c.window = {day_of(lo->timestamp), day_of(hi->timestamp)};
    } else if (c.posts) {
      c.warnings.push_back("community " + cs.name + ": posts file is empty");
    }
    if (cs.start) c.window.first = std::max(c.window.first, *cs.start);
    if (cs.end) c.window.last = c.window.last == Date{} ? *cs.end : std::min(c.window.last, *cs.end);
    if (c.window.empty() && (c.posts ? !c.posts->empty() : true)) {
      throw ConfigurationError("community " + cs.name + ": empty observation window");
    }
    if (!cs.posters && c.posts && !c.window.empty()) {
      Engagement e = compute_engagement(*c.posts, c.window);
      c.posters = std::move(e.posters);
      c.posts_per_poster = std::move(e.posts_per_poster);
      for (auto& w : e.warnings) c.warnings.push_back(cs.name + ": " + w);
    } else if (!c.posters.empty()) {
      c.posters = clip(c.posters, c.window);
      c.posts_per_poster = clip(c.posts_per_poster, c.window);
    }
    for (const auto& [label, path] : cs.affect) c.affect[label] = clip(read_series_csv(path, label), c.window);
    if (c.posts && need_series) {
      for (const auto& m : config.metrics) {
        if (m.name == "posters" || m.name == "posts_per_poster" || c.affect.count(m.name) != 0) continue;
        c.affect[m.name] = compute_affect_series(*c.posts, m.name, c.window);
      }
    }
    data.communities.push_back(std::move(c));
  }

  if (wants(Analysis::impact) || wants(Analysis::placebo)) {
    data.events = read_events_csv(*config.events);
  }
  if (need_volume) {
    data.news_volume = read_series_csv(*config.news_volume, "news_volume");
  }
  if (wants(Analysis::granger_news)) {
    std::set<std::string> names;
    for (const auto& e : config.entities) {
      if (!names.insert(e.name).second) throw ConfigurationError("duplicate entity '" + e.name + "'");
      data.entities.push_back(read_series_csv(e.series, e.name));
    }
    for (const auto& c : data.communities) {
      if (!has_series(c)) continue;
      for (const auto& m : config.metrics) (void)signal_series(c, m.name);
    }
  }
  if (need_text) {
    data.stopwords = read_stopwords(*config.stopwords);
  }
  return data;
}

const Lexicon* LexiconSet::find(const std::string& community, const std::string& partner) const {
  for (const auto& l : lexicons) {
    if (l.community == community && l.partner == partner) return &l;
  }
  return nullptr;
}

LexiconSet build_lexicons(const AnalysisConfig& config, const PipelineData& data) {
  LexiconSet set;
  std::vector<const CommunityData*> text;
  for (const auto& c : data.communities) {
    if (c.posts && !c.posts->empty() && !c.window.empty()) text.push_back(&c);
  }
  if (text.size() < 2) {
    set.notes.push_back("fewer than two communities with posts; no lexicon pairs");
    return set;
  }

  const std::size_t jobs = config.jobs;
  auto windowed = [](const CommunityData& c) {
    std::vector<PostRecord> out;
    for (const auto& p : *c.posts) {
      if (c.window.contains(day_of(p.timestamp))) out.push_back(p);
    }
    return out;
  };
  const auto corpora = parallel_map<TokenCorpus>(text.size(), jobs, [&](std::size_t i) {
    return tokenize(windowed(*text[i]), data.stopwords, text[i]->name);
  });
  std::vector<TokenCorpus> rests;
  std::vector<std::vector<ScoredTerm>> ranked;
  std::unordered_set<std::string> candidates;
  for (std::size_t i = 0; i < text.size(); ++i) {
    std::vector<const TokenCorpus*> others;
    for (std::size_t j = 0; j < text.size(); ++j) {
      if (j != i) others.push_back(&corpora[j]);
    }
    rests.push_back(pool(others, "rest"));
    ranked.push_back(rank_terms(corpora[i], rests.back(), config.parameters.min_freq));
    for (const auto& t : ranked.back()) candidates.insert(t.term);
  }

  const auto weekly = parallel_map<WeeklyTermCounts>(text.size(), jobs, [&](std::size_t i) {
    return weekly_term_counts(windowed(*text[i]), data.stopwords, text[i]->window, &candidates);
  });
  for (const auto* c : text) set.windows[c->name] = c->window;

  LexiconOptions opts;
  opts.k = config.parameters.k;
  opts.min_freq = config.parameters.min_freq;
  opts.sparsity = config.parameters.sparsity;
  for (std::size_t i = 0; i < text.size(); ++i) {
    for (std::size_t j = 0; j < text.size(); ++j) {
      if (i == j) continue;
      const DateRange w = intersect(text[i]->window, text[j]->window);
      if (w.days() < 7) {
        Lexicon lex;
        lex.community = text[i]->name;
        lex.partner = text[j]->name;
        lex.warnings.push_back("no overlapping full week between " + text[i]->name + " and " + text[j]->name);
        set.lexicons.push_back(std::move(lex));
        continue;
      }
      set.lexicons.push_back(build_lexicon(corpora[i], rests[i], restrict_weeks(weekly[i], w),
                                           restrict_weeks(weekly[j], w), opts, text[j]->name));
    }
  }
  return set;
}

SectionOutput run_impact(const AnalysisConfig& config, const PipelineData& data) {
  SectionOutput out;
  Section& s = out.section;
  s.name = "impact";
  s.columns = {"community", "signal", "event", "date", "effect_pct", "lower_pct", "upper_pct", "lower95_pct",
               "upper95_pct", "tail_p", "p_adjusted", "stars_raw", "stars_adjusted", "significant_interval",
               "significant_fdr"};
  const auto& p = config.parameters;
  const ImpactSettings settings = impact_settings(p);
  s.notes.push_back(fmt::format("signals: posters modelled on log1p scale, posts_per_poster on raw scale; "
                                "lag predictors share the target transform; effects on the original scale; "
                                "{}% intervals from {} simulated paths",
                                num(100.0 * p.interval_level), p.mc_draws));
  if (data.events.empty()) s.notes.push_back("events file lists no events");
  for (auto& w : overlap_warnings(data.events, p.post_days)) s.warnings.push_back(std::move(w));

  struct Task {
    const CommunityData* community;
    std::size_t signal;
    const EventSpec* event;
  };
  std::vector<Task> tasks;
  std::vector<std::optional<ExogenousBlock>> exo(data.communities.size());
  std::vector<TimeSeries> prepared;
  for (std::size_t ci = 0; ci < data.communities.size(); ++ci) {
    const auto& c = data.communities[ci];
    for (const auto& w : c.warnings) s.warnings.push_back(w);
    if (!has_series(c)) {
      s.notes.push_back("community " + c.name + " has no engagement series");
      continue;
    }
    exo[ci] = community_exogenous(c, data);
    for (std::size_t si = 0; si < std::size(kSignals); ++si) {
      for (const auto& ev : data.events) tasks.push_back({&c, si, &ev});
    }
  }
  s.requested = tasks.size();

  using Outcome = std::variant<ImpactResult, std::string>;
  const auto outcomes = parallel_map<Outcome>(tasks.size(), config.jobs, [&](std::size_t i) -> Outcome {
    const Task& t = tasks[i];
    const auto ci = static_cast<std::size_t>(t.community - data.communities.data());
    const Signal sig = kSignals[t.signal];
    const TimeSeries series = carry_forward(signal_series(*t.community, sig.name));
    const std::uint64_t seed = derive_seed(
        config.seed, fmt::format("impact/{}/{}/{}/{}", t.community->name, sig.name, format_date(t.event->date),
                                 t.event->name));
    try {
      if (!exo[ci]) throw NonAnalysableError("non-analysable: no news-volume coverage");
      return analyse_event(series, *t.event, &*exo[ci], settings, sig.scale, seed);
    } catch (const Error& e) {
      return std::string(e.what());
    }
  });

  // Families: one per community x signal over its analysable events.
  std::size_t i = 0;
  while (i < tasks.size()) {
    std::size_t j = i;
    while (j < tasks.size() && tasks[j].community == tasks[i].community && tasks[j].signal == tasks[i].signal) ++j;
    const std::string cname = tasks[i].community->name;
    const std::string sname = kSignals[tasks[i].signal].name;
    PValueFamily fam;
    fam.label = cname + "/" + sname;
    fam.q = p.q;
    for (std::size_t k = i; k < j; ++k) {
      if (const auto* r = std::get_if<ImpactResult>(&outcomes[k])) {
        fam.entries.emplace_back(format_date(r->event.date) + " " + r->event.name, r->tail_probability);
      }
    }
    const FdrResult fdr = bh_fdr(fam);
    s.families.push_back(summarise(fdr, p.q));
    std::size_t member = 0;
    for (std::size_t k = i; k < j; ++k) {
      const EventSpec& ev = *tasks[k].event;
      if (const auto* reason = std::get_if<std::string>(&outcomes[k])) {
        s.skips.push_back({fmt::format("{}/{}/{} {}", cname, sname, format_date(ev.date), ev.name), *reason});
        continue;
      }
      const auto& r = std::get<ImpactResult>(outcomes[k]);
      const double adj = fdr.adjusted[member++];
      ++s.completed;
      s.rows.push_back({cname, sname, ev.name, format_date(ev.date), pct(r.relative_effect), pct(r.effect_lower),
                        pct(r.effect_upper), pct(r.effect_lower95), pct(r.effect_upper95), num(r.tail_probability),
                        num(adj), stars(r.tail_probability), stars(adj), flag(r.significant), flag(adj < p.q)});
      const std::string stem =
          fmt::format("plots/impact/{}/{}/{}-{}", slug(cname), sname, format_date(ev.date), slug(ev.name));
      const std::string title = fmt::format("{} | {} | {} ({}) effect {}%", cname, sname, ev.name,
                                            format_date(ev.date), pct(r.relative_effect));
      out.artifacts.push_back({stem + ".svg", impact_svg(r, title)});
      out.artifacts.push_back({stem + ".csv", impact_plot_csv(r)});
    }
    i = j;
  }
  return out;
}

SectionOutput run_placebo(const AnalysisConfig& config, const PipelineData& data) {
  SectionOutput out;
  Section& s = out.section;
  s.name = "placebo";
  s.columns = {"community", "signal", "shift_days", "n_events", "n_analysable", "n_dropped",
               "significant95", "significant99", "fpr95_pct", "fpr99_pct", "note"};
  const auto& p = config.parameters;
  if (p.placebo_shift_days == 0) throw ArgumentError("placebo must not coincide with real events");
  const ImpactSettings settings = impact_settings(p);
  s.notes.push_back(fmt::format("pseudo-events shifted {} days; false positives counted on BH-adjusted tail "
                                "probabilities within each community x signal family",
                                p.placebo_shift_days));

  struct Task {
    std::size_t community;
    std::size_t signal;
  };
  std::vector<Task> tasks;
  for (std::size_t ci = 0; ci < data.communities.size(); ++ci) {
    if (!has_series(data.communities[ci])) continue;
    for (std::size_t si = 0; si < std::size(kSignals); ++si) tasks.push_back({ci, si});
  }
  s.requested = tasks.size();

  // One work item per pseudo-event so parallelism is not limited by the number of families.
  struct Item {
    std::size_t task;
    const EventSpec* event;
  };
  std::vector<Item> items;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (const auto& ev : data.events) items.push_back({t, &ev});
  }
  using Outcome = std::variant<PlaceboTable, std::string>;
  const auto tables = parallel_map<Outcome>(items.size(), config.jobs, [&](std::size_t i) -> Outcome {
    const Task& t = tasks[items[i].task];
    const CommunityData& c = data.communities[t.community];
    const Signal sig = kSignals[t.signal];
    try {
      const auto ex = community_exogenous(c, data);
      if (!ex) return std::string("no news-volume coverage");
      return placebo_run({*items[i].event}, carry_forward(signal_series(c, sig.name)), &*ex, settings, sig.scale,
                         p.placebo_shift_days, derive_seed(config.seed, "placebo/" + c.name + "/" + sig.name), p.q);
    } catch (const Error& e) {
      return std::string(e.what());
    }
  });

  std::string detail = "community,signal,event,event_date,pseudo_date,effect_pct,lower_pct,upper_pct,tail_p,"
                       "p_adjusted,significant95,significant99\n";
  std::size_t cursor = 0;
  for (const Task& t : tasks) {
    const CommunityData& c = data.communities[t.community];
    const Signal sig = kSignals[t.signal];
    PlaceboTable merged;
    merged.signal = sig.name;
    merged.shift_days = p.placebo_shift_days;
    std::vector<std::string> failures;
    std::vector<const EventSpec*> originals;
    for (const auto& ev : data.events) {
      const Outcome& o = tables[cursor++];
      ++merged.n_events;
      if (const auto* msg = std::get_if<std::string>(&o)) {
        merged.skipped.push_back({ev, *msg});
        continue;
      }
      const auto& tbl = std::get<PlaceboTable>(o);
      for (const auto& r : tbl.results) {
        merged.results.push_back(r);
        originals.push_back(&ev);
      }
      for (const auto& sk : tbl.skipped) merged.skipped.push_back(sk);
    }
    PValueFamily fam;
    fam.label = "placebo/" + c.name + "/" + sig.name;
    fam.q = p.q;
    for (std::size_t k = 0; k < merged.results.size(); ++k) {
      fam.entries.emplace_back(format_date(merged.results[k].event.date), merged.results[k].tail_probability);
    }
    const FdrResult fdr = bh_fdr(fam);
    s.families.push_back(summarise(fdr, p.q));
    for (std::size_t k = 0; k < merged.results.size(); ++k) {
      const double adj = fdr.adjusted[k];
      if (adj < 0.05) ++merged.significant95;
      if (adj < 0.01) ++merged.significant99;
      const auto& r = merged.results[k];
      detail += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_escape(c.name), sig.name,
                            csv_escape(originals[k]->name), format_date(originals[k]->date), format_date(r.event.date),
                            pct(r.relative_effect), pct(r.effect_lower), pct(r.effect_upper), num(r.tail_probability),
                            num(adj), flag(adj < 0.05), flag(adj < 0.01));
    }
    for (const auto& sk : merged.skipped) {
      s.warnings.push_back(fmt::format("placebo {}/{}: dropped {} ({})", c.name, sig.name, sk.event.name, sk.reason));
    }
    const std::size_t n = merged.results.size();
    std::string note;
    std::string fpr95;
    std::string fpr99;
    if (n == 0) {
      note = "no analysable pseudo-events";
    } else {
      fpr95 = pct(static_cast<double>(merged.significant95) / static_cast<double>(n));
      fpr99 = pct(static_cast<double>(merged.significant99) / static_cast<double>(n));
    }
    ++s.completed;
    s.rows.push_back({c.name, sig.name, std::to_string(p.placebo_shift_days), std::to_string(merged.n_events),
                      std::to_string(n), std::to_string(merged.skipped.size()), std::to_string(merged.significant95),
                      std::to_string(merged.significant99), fpr95, fpr99, note});
  }
  out.artifacts.push_back({"placebo_events.csv", detail});
  return out;
}

SectionOutput run_granger_news(const AnalysisConfig& config, const PipelineData& data) {
  SectionOutput out;
  Section& s = out.section;
  s.name = "granger_news";
  s.columns = granger_columns({"community", "metric"});
  const auto& p = config.parameters;
  s.notes.push_back(fmt::format("daily VAR-X with weekday dummies and log news volume, p_max {}; BH per "
                                "community x metric over both directions; stars_raw use raw p, stars_adjusted "
                                "use BH-adjusted p; daggers mark residual Ljung-Box failures",
                                p.p_max_daily));
  if (data.entities.size() != p.news_entities) {
    s.notes.push_back(fmt::format("{} entities configured; expected {} (family size {})", data.entities.size(),
                                  p.news_entities, 2 * p.news_entities));
  }

  std::vector<std::optional<TimeSeries>> entity_series;
  std::vector<std::string> entity_errors;
  for (const auto& e : data.entities) {
    try {
      entity_series.push_back(apply_transforms(carry_forward(e), config.entity_transforms));
      entity_errors.emplace_back();
    } catch (const Error& err) {
      entity_series.emplace_back();
      entity_errors.emplace_back(err.what());
    }
  }

  struct Task {
    std::size_t community;
    std::size_t metric;
    std::size_t entity;
  };
  std::vector<Task> tasks;
  std::vector<std::vector<std::optional<TimeSeries>>> responses(data.communities.size());
  std::vector<std::vector<std::string>> response_errors(data.communities.size());
  for (std::size_t ci = 0; ci < data.communities.size(); ++ci) {
    const auto& c = data.communities[ci];
    if (!has_series(c)) continue;
    for (std::size_t mi = 0; mi < config.metrics.size(); ++mi) {
      const auto& m = config.metrics[mi];
      try {
        TimeSeries r = apply_transforms(carry_forward(signal_series(c, m.name)), m.transforms);
        responses[ci].push_back(r.renamed(m.name));
        response_errors[ci].emplace_back();
      } catch (const Error& err) {
        responses[ci].emplace_back();
        response_errors[ci].emplace_back(err.what());
      }
      for (std::size_t ei = 0; ei < data.entities.size(); ++ei) tasks.push_back({ci, mi, ei});
    }
  }
  s.requested = tasks.size();

  const auto outcomes = parallel_map<PairOutcome>(tasks.size(), config.jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    PairOutcome o;
    const auto& resp = responses[t.community][t.metric];
    const auto& ent = entity_series[t.entity];
    if (!resp) {
      o.skip = "response untransformable: " + response_errors[t.community][t.metric];
      return o;
    }
    if (!ent) {
      o.skip = "entity untransformable: " + entity_errors[t.entity];
      return o;
    }
    if (ent->name() == resp->name()) {
      o.skip = "entity and metric share a name";
      return o;
    }
    const DateRange w = intersect(range_of(*ent), range_of(*resp));
    if (w.days() < static_cast<long>(kMinStationarityLength)) {
      o.skip = "insufficient overlap between entity and metric series";
      return o;
    }
    const TimeSeries a = ent->slice(w.first, w.last);
    const TimeSeries b = resp->slice(w.first, w.last);
    if (a.has_missing() || b.has_missing()) {
      o.skip = "leading gap remains after LOCF";
      return o;
    }
    try {
      const ExogenousBlock exo = build_exogenous(w, *data.news_volume);
      return analyse_pair(a, b, &exo, p.p_max_daily);
    } catch (const Error& e) {
      o.skip = e.what();
      return o;
    }
  });

  std::size_t i = 0;
  while (i < tasks.size()) {
    std::size_t j = i;
    while (j < tasks.size() && tasks[j].community == tasks[i].community && tasks[j].metric == tasks[i].metric) ++j;
    const std::string cname = data.communities[tasks[i].community].name;
    const std::string mname = config.metrics[tasks[i].metric].name;
    PValueFamily fam;
    fam.label = cname + "/" + mname;
    fam.q = p.q;
    for (std::size_t k = i; k < j; ++k) {
      const auto& o = outcomes[k];
      if (o.skip) continue;
      fam.entries.emplace_back(o.forward.stimulus + kArrow + o.forward.response, o.forward.p_value);
      fam.entries.emplace_back(o.reverse.stimulus + kArrow + o.reverse.response, o.reverse.p_value);
    }
    const FdrResult fdr = bh_fdr(fam);
    s.families.push_back(summarise(fdr, p.q));
    std::size_t member = 0;
    for (std::size_t k = i; k < j; ++k) {
      const auto& o = outcomes[k];
      const std::string& ename = data.entities[tasks[k].entity].name();
      if (o.skip) {
        s.skips.push_back({cname + "/" + mname + "/" + ename, *o.skip});
        continue;
      }
      ++s.completed;
      for (const GrangerResult* g : {&o.forward, &o.reverse}) {
        std::vector<std::string> row{cname, mname};
        auto cells = granger_cells(*g, o.selection, fdr.adjusted[member++], p.q);
        row.insert(row.end(), cells.begin(), cells.end());
        s.rows.push_back(std::move(row));
      }
    }
    i = j;
  }
  return out;
}

SectionOutput run_lexicon(const AnalysisConfig& config, const PipelineData&, const LexiconSet& lexicons) {
  SectionOutput out;
  Section& s = out.section;
  s.name = "lexicon";
  s.columns = {"community", "partner", "rank", "term", "npmi", "freq_target", "freq_rest", "sparsity_target",
               "sparsity_rest"};
  const auto& p = config.parameters;
  s.notes.push_back(fmt::format("one-vs-all NPMI, min target frequency {}, top {}, sparsity below {} in both "
                                "communities of the pair",
                                p.min_freq, p.k, num(p.sparsity)));
  for (const auto& n : lexicons.notes) s.notes.push_back(n);
  s.requested = lexicons.lexicons.size();
  for (const auto& lex : lexicons.lexicons) {
    for (const auto& w : lex.warnings) s.warnings.push_back(w);
    ++s.completed;
    std::string csv = "term,npmi,freq_target,freq_rest,sparsity_target,sparsity_rest\n";
    for (std::size_t r = 0; r < lex.entries.size(); ++r) {
      const auto& e = lex.entries[r];
      s.rows.push_back({lex.community, lex.partner, std::to_string(r + 1), e.term, num(e.npmi),
                        std::to_string(e.freq_target), std::to_string(e.freq_rest), num(e.sparsity_target),
                        num(e.sparsity_partner)});
      csv += fmt::format("{},{},{},{},{},{}\n", csv_escape(e.term), num(e.npmi), e.freq_target, e.freq_rest,
                         num(e.sparsity_target), num(e.sparsity_partner));
    }
    out.artifacts.push_back({fmt::format("lexicon/{}__{}.csv", slug(lex.community), slug(lex.partner)), csv});
  }
  return out;
}

SectionOutput run_diffusion(const AnalysisConfig& config, const PipelineData& data, const LexiconSet& lexicons) {
  SectionOutput out;
  Section& s = out.section;
  s.name = "diffusion";
  s.columns = granger_columns({"pair", "term", "lexicon"});
  const auto& p = config.parameters;
  s.notes.push_back(fmt::format("weekly ln(1+count) series, LOCF then first difference; endogenous-only VAR, "
                                "p_max {}; BH per community pair",
                                p.p_max_weekly));
  for (const auto& n : lexicons.notes) s.notes.push_back(n);

  std::vector<std::string> names;
  for (const auto& c : data.communities) {
    if (lexicons.windows.count(c.name) != 0) names.push_back(c.name);
  }
  struct Task {
    std::size_t pair;
    std::string term;
    std::string origin;
    TimeSeries a;
    TimeSeries b;
  };
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      const Lexicon* ab = lexicons.find(names[i], names[j]);
      const Lexicon* ba = lexicons.find(names[j], names[i]);
      if (ab == nullptr || ba == nullptr) continue;
      const std::size_t pi = pairs.size();
      pairs.emplace_back(names[i], names[j]);
      std::map<std::string, std::size_t> index;
      for (const auto& e : ab->entries) {
        index[e.term] = tasks.size();
        tasks.push_back({pi, e.term, names[i], e.weekly_target.renamed(names[i]), e.weekly_partner.renamed(names[j])});
      }
      for (const auto& e : ba->entries) {
        if (const auto it = index.find(e.term); it != index.end()) {
          tasks[it->second].origin = "both";
          continue;
        }
        tasks.push_back({pi, e.term, names[j], e.weekly_partner.renamed(names[i]), e.weekly_target.renamed(names[j])});
      }
    }
  }
  s.requested = tasks.size();

  const auto outcomes = parallel_map<PairOutcome>(tasks.size(), config.jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    PairOutcome o;
    try {
      const TransformSpec spec{TransformStep::locf, TransformStep::first_difference};
      return analyse_pair(apply_transforms(t.a, spec), apply_transforms(t.b, spec), nullptr, p.p_max_weekly);
    } catch (const Error& e) {
      o.skip = e.what();
      return o;
    }
  });

  std::size_t i = 0;
  while (i < tasks.size()) {
    std::size_t j = i;
    while (j < tasks.size() && tasks[j].pair == tasks[i].pair) ++j;
    const auto& [a, b] = pairs[tasks[i].pair];
    const std::string label = a + "|" + b;
    PValueFamily fam;
    fam.label = label;
    fam.q = p.q;
    for (std::size_t k = i; k < j; ++k) {
      const auto& o = outcomes[k];
      if (o.skip) continue;
      fam.entries.emplace_back(tasks[k].term + ":" + a + kArrow + b, o.forward.p_value);
      fam.entries.emplace_back(tasks[k].term + ":" + b + kArrow + a, o.reverse.p_value);
    }
    const FdrResult fdr = bh_fdr(fam);
    s.families.push_back(summarise(fdr, p.q));
    std::size_t member = 0;
    for (std::size_t k = i; k < j; ++k) {
      const auto& o = outcomes[k];
      if (o.skip) {
        s.skips.push_back({label + "/" + tasks[k].term, *o.skip});
        continue;
      }
      ++s.completed;
      for (const GrangerResult* g : {&o.forward, &o.reverse}) {
        std::vector<std::string> row{label, tasks[k].term, tasks[k].origin};
        auto cells = granger_cells(*g, o.selection, fdr.adjusted[member++], p.q);
        row.insert(row.end(), cells.begin(), cells.end());
        s.rows.push_back(std::move(row));
      }
    }
    i = j;
  }
  if (pairs.empty()) s.notes.push_back("no community pairs with lexicons");
  return out;
}

RunReport run_analyses(const AnalysisConfig& config, const std::vector<Analysis>& analyses) {
  const PipelineData data = load_data(config, analyses);
  RunReport report;
  report.seed = config.seed;
  report.config_hash = config_hash(config);
  report.config_echo = config_json(config);

  auto add = [&](SectionOutput so) {
    report.sections.push_back(std::move(so.section));
    for (auto& a : so.artifacts) report.artifacts.push_back(std::move(a));
  };
  auto wants = [&](Analysis a) { return std::find(analyses.begin(), analyses.end(), a) != analyses.end(); };
  std::optional<LexiconSet> lexicons;
  if (wants(Analysis::lexicon) || wants(Analysis::diffusion)) lexicons = build_lexicons(config, data);
  for (Analysis a : all_analyses()) {
    if (!wants(a)) continue;
    switch (a) {
      case Analysis::impact: add(run_impact(config, data)); break;
      case Analysis::granger_news: add(run_granger_news(config, data)); break;
      case Analysis::diffusion: add(run_diffusion(config, data, *lexicons)); break;
      case Analysis::lexicon: add(run_lexicon(config, data, *lexicons)); break;
      case Analysis::placebo: add(run_placebo(config, data)); break;
    }
  }
  return report;
}

RunReport run_all(const AnalysisConfig& config) { return run_analyses(config, config.analyses); }

}  // namespace causal_pulse
