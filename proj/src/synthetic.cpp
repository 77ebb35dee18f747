#include "causal_pulse/synthetic.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>

#include "causal_pulse/errors.hpp"
#include "causal_pulse/seed.hpp"

namespace causal_pulse {
namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 16> kSyllables{"ba", "ko", "ri", "mu", "ze", "ta", "lo", "ni",
                                                 "vu", "sa", "pe", "go", "fi", "da", "ru", "xo"};
constexpr std::array<const char*, 30> kStopwords{"the", "a",   "an",   "and", "or",   "but",  "of",   "to",
                                                 "in",  "on",  "is",   "it",  "that", "this", "was",  "for",
                                                 "with", "as", "at",   "by",  "be",   "are",  "i",    "you",
                                                 "he",  "she", "they", "we",  "not",  "so"};
constexpr std::array<const char*, 3> kSignatureSuffix{"nar", "tek", "vol"};
constexpr std::size_t kSharedWords = 400;
constexpr std::size_t kSignatureWords = 40;
constexpr int kAuthorPool = 600;

std::string shared_word(std::size_t i) {
  const std::size_t j = (i * 7919 + 123) % 4096;
  return std::string(kSyllables[j / 256]) + kSyllables[(j / 16) % 16] + kSyllables[j % 16];
}

std::string signature_word(std::size_t community, std::size_t k) {
  return std::string(kSyllables[k / 16 % 16]) + kSyllables[k % 16] + kSignatureSuffix[community % 3] +
         (community >= 3 ? std::to_string(community) : "");
}

struct Post {
  int day;
  int second;
  int author;
  std::vector<std::string> words;
};

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::vector<double> ar1(std::mt19937_64& rng, std::size_t n, double phi, double sd) {
  std::normal_distribution<double> normal(0.0, sd);
  std::vector<double> x(n);
  double v = normal(rng) / std::sqrt(1.0 - phi * phi);
  for (auto& xi : x) {
    v = phi * v + normal(rng);
    xi = v;
  }
  return x;
}

}  // namespace

SyntheticDataset write_synthetic_dataset(const fs::path& dir, const SyntheticOptions& o) {
  if (o.days < 500) throw ArgumentError("synthetic dataset needs at least 500 days");
  if (o.communities.size() < 2 || o.posters_base.size() != o.communities.size()) {
    throw ArgumentError("synthetic dataset needs at least two communities with a posters base each");
  }
  const auto days = static_cast<std::size_t>(o.days);
  fs::create_directories(dir / "posts");
  fs::create_directories(dir / "entities");

  SyntheticDataset ds;
  ds.dir = dir;

  // News volume.
  std::mt19937_64 news_rng(derive_seed(o.seed, "news"));
  const auto news_ar = ar1(news_rng, days, 0.8, 0.3);
  constexpr std::array<double, 7> kNewsDow{1.05, 1.1, 1.1, 1.05, 1.0, 0.8, 0.75};
  std::string csv = "date,value\n";
  for (std::size_t d = 0; d < days; ++d) {
    const Date day = add_days(o.start, static_cast<long>(d));
    const double v = std::round(5000.0 * kNewsDow[iso_weekday(day) - 1] * std::exp(0.2 * news_ar[d]));
    csv += fmt::format("{},{}\n", format_date(day), v);
  }
  write_text(dir / "news_volume.csv", csv);

  // Entity mention counts.
  std::vector<double> driver(days, 0.0);
  std::string entities_json;
  for (std::size_t e = 0; e < o.entities; ++e) {
    const std::string name = fmt::format("entity_{:02}", e + 1);
    ds.entity_names.push_back(name);
    std::mt19937_64 rng(derive_seed(o.seed, "entity/" + name));
    const auto x = ar1(rng, days, 0.6, 0.45);
    const double base = std::log(20.0 + static_cast<double>(3 * (e % 17)));
    csv = "date,value\n";
    for (std::size_t d = 0; d < days; ++d) {
      std::poisson_distribution<long> pois(std::exp(base + x[d]));
      const long count = pois(rng);
      if (e == o.driver_entity) driver[d] = std::log1p(static_cast<double>(count));
      csv += fmt::format("{},{}\n", format_date(add_days(o.start, static_cast<long>(d))), count);
    }
    write_text(dir / "entities" / (name + ".csv"), csv);
    entities_json += fmt::format("{}    {{\"name\": \"{}\", \"series\": \"entities/{}.csv\"}}", e == 0 ? "" : ",\n",
                                 name, name);
  }
  if (o.driver_entity < o.entities) ds.driver_entity = ds.entity_names[o.driver_entity];
  const double driver_mean = std::accumulate(driver.begin(), driver.end(), 0.0) / static_cast<double>(days);

  // Events.
  std::vector<int> event_days;
  csv = "date,name\n";
  for (std::size_t k = 0; k < o.events; ++k) {
    const int d = o.first_event_day + static_cast<int>(k) * o.event_spacing;
    if (d + 7 > o.days) break;
    event_days.push_back(d);
    const Date day = add_days(o.start, d);
    ds.event_dates.push_back(day);
    const std::string name = fmt::format("Synthetic event {}", k + 1);
    if (std::find(o.lifted_events.begin(), o.lifted_events.end(), k) != o.lifted_events.end()) {
      ds.lifted_event_names.push_back(name);
    }
    csv += fmt::format("{},{}\n", format_date(day), name);
  }
  write_text(dir / "events.csv", csv);

  std::string stop;
  for (const char* w : kStopwords) stop += std::string(w) + "\n";
  write_text(dir / "stopwords.txt", stop);

  // Weekly diffusion intensities.
  const std::size_t weeks = days / 7 + 1;
  std::mt19937_64 diff_rng(derive_seed(o.seed, "diffusion"));
  const auto z = ar1(diff_rng, weeks, 0.5, 0.6);

  std::vector<double> zipf(kSharedWords);
  for (std::size_t r = 0; r < kSharedWords; ++r) zipf[r] = 1.0 / static_cast<double>(r + 1);

  std::string communities_json;
  for (std::size_t c = 0; c < o.communities.size(); ++c) {
    const std::string& cname = o.communities[c];
    std::mt19937_64 rng(derive_seed(o.seed, "community/" + cname));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::discrete_distribution<std::size_t> shared(zipf.begin(), zipf.end());
    std::uniform_int_distribution<std::size_t> sig(0, kSignatureWords - 1);
    std::uniform_int_distribution<std::size_t> stopword(0, kStopwords.size() - 1);
    std::uniform_int_distribution<int> length(4, 9);
    std::uniform_int_distribution<int> second(0, 86399);

    std::array<double, 7> dow{};
    for (std::size_t k = 0; k < 7; ++k) dow[k] = 1.0 + 0.15 * std::sin(static_cast<double>(k + c));

    std::vector<Post> posts;
    std::vector<int> authors(kAuthorPool);
    for (std::size_t d = 0; d < days; ++d) {
      const Date day = add_days(o.start, static_cast<long>(d));
      double lambda = o.posters_base[c] * dow[iso_weekday(day) - 1] *
                      (1.0 + 0.08 * std::sin(2.0 * std::numbers::pi * static_cast<double>(d) / 365.25 +
                                             static_cast<double>(c))) *
                      std::exp(0.1 * news_ar[d]);
      if (c == 0) {
        for (std::size_t k = 0; k < event_days.size(); ++k) {
          const bool lifted = std::find(o.lifted_events.begin(), o.lifted_events.end(), k) != o.lifted_events.end();
          const int e = event_days[k];
          if (lifted && static_cast<int>(d) >= e && static_cast<int>(d) < e + 7) lambda *= 1.0 + o.lift;
        }
      }
      std::poisson_distribution<int> n_posters(lambda);
      const int n = std::min(n_posters(rng), kAuthorPool);
      std::iota(authors.begin(), authors.end(), 0);
      for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<int> pick(i, kAuthorPool - 1);
        std::swap(authors[static_cast<std::size_t>(i)], authors[static_cast<std::size_t>(pick(rng))]);
      }
      double mu = 0.5;
      if (c == 0 && static_cast<int>(d) >= o.driver_lag && o.driver_entity < o.entities) {
        mu = 0.5 * std::exp(o.driver_strength * (driver[d - static_cast<std::size_t>(o.driver_lag)] - driver_mean));
      }
      std::poisson_distribution<int> extra(mu);
      for (int i = 0; i < n; ++i) {
        const int count = 1 + extra(rng);
        for (int k = 0; k < count; ++k) {
          Post p{static_cast<int>(d), second(rng), authors[static_cast<std::size_t>(i)], {}};
          const int len = length(rng);
          for (int w = 0; w < len; ++w) {
            const double u = unif(rng);
            if (u < 0.3) {
              p.words.emplace_back(kStopwords[stopword(rng)]);
            } else if (u < 0.38) {
              p.words.push_back(signature_word(c, sig(rng)));
            } else if (u < 0.40) {
              std::size_t other = c;
              while (other == c) other = static_cast<std::size_t>(unif(rng) * static_cast<double>(o.communities.size()));
              p.words.push_back(signature_word(other, sig(rng)));
            } else {
              p.words.push_back(shared_word(shared(rng)));
            }
          }
          posts.push_back(std::move(p));
        }
      }
    }

    // Diffusing term: community 0 leads, community 1 follows.
    std::size_t cursor = 0;
    for (std::size_t w = 0; w < weeks && cursor < posts.size(); ++w) {
      const std::size_t begin = cursor;
      while (cursor < posts.size() && static_cast<std::size_t>(posts[cursor].day) < 7 * (w + 1)) ++cursor;
      if (cursor == begin) continue;
      double rate = 1.5;
      if (c == 0) rate = 20.0 * std::exp(z[w]);
      if (c == 1) rate = 12.0 * std::exp(w >= static_cast<std::size_t>(o.diffusion_lag) ? z[w - static_cast<std::size_t>(o.diffusion_lag)] : 0.0);
      std::poisson_distribution<int> n_term(rate);
      std::uniform_int_distribution<std::size_t> which(begin, cursor - 1);
      const int n = n_term(rng);
      for (int k = 0; k < n; ++k) posts[which(rng)].words.push_back(o.diffusion_term);
    }

    std::stable_sort(posts.begin(), posts.end(),
                     [](const Post& a, const Post& b) { return a.day != b.day ? a.day < b.day : a.second < b.second; });
    std::string jsonl;
    jsonl.reserve(posts.size() * 96);
    for (const auto& p : posts) {
      const Date day = add_days(o.start, p.day);
      std::string text;
      for (const auto& w : p.words) {
        if (!text.empty()) text += ' ';
        text += w;
      }
      jsonl += fmt::format("{{\"author\":\"{}_{}\",\"timestamp\":\"{}T{:02}:{:02}:{:02}Z\",\"text\":\"{}\"}}\n", cname,
                           p.author, format_date(day), p.second / 3600, p.second / 60 % 60, p.second % 60, text);
    }
    write_text(dir / "posts" / (cname + ".jsonl"), jsonl);
    communities_json += fmt::format("{}    {{\"name\": \"{}\", \"posts\": \"posts/{}.jsonl\"}}",
                                    c == 0 ? "" : ",\n", cname, cname);
  }

  const std::string config = fmt::format(
      "{{\n"
      "  \"output_dir\": \"out\",\n"
      "  \"seed\": {},\n"
      "  \"analyses\": [\"impact\", \"granger_news\", \"diffusion\", \"lexicon\", \"placebo\"],\n"
      "  \"communities\": [\n{}\n  ],\n"
      "  \"entities\": [\n{}\n  ],\n"
      "  \"events\": \"events.csv\",\n"
      "  \"news_volume\": \"news_volume.csv\",\n"
      "  \"stopwords\": \"stopwords.txt\"\n"
      "}}\n",
      o.seed, communities_json, entities_json);
  ds.config = dir / "config.json";
  write_text(ds.config, config);
  return ds;
}

}  // namespace causal_pulse
