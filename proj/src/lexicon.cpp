#include "causal_pulse/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "causal_pulse/errors.hpp"

namespace causal_pulse {
namespace {

bool word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

std::vector<std::string> raw_words(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (unsigned char c : text) {
    if (word_byte(c)) {
      cur += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

Date monday_on_or_after(Date d) {
  const unsigned wd = iso_weekday(d);
  return wd == 1 ? d : add_days(d, 8 - static_cast<long>(wd));
}

}  // namespace

StopwordSet parse_stopwords(std::string_view text) {
  StopwordSet out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    std::string w = line.substr(b, e - b + 1);
    std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.insert(std::move(w));
  }
  return out;
}

StopwordSet read_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_stopwords(ss.str());
}

std::vector<std::string> tokenize_text(std::string_view text, const StopwordSet& stopwords) {
  const auto words = raw_words(text);
  std::vector<char> stop(words.size());
  std::vector<std::string> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    stop[i] = stopwords.count(words[i]) != 0;
    if (!stop[i]) out.push_back(words[i]);
  }
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    if (!stop[i] && !stop[i + 1]) out.push_back(words[i] + "_" + words[i + 1]);
  }
  return out;
}

std::uint64_t TokenCorpus::count(const std::string& term) const {
  const auto it = counts.find(term);
  return it == counts.end() ? 0 : it->second;
}

void TokenCorpus::add(const std::string& term, std::uint64_t n) {
  counts[term] += n;
  total += n;
}

void TokenCorpus::merge(const TokenCorpus& other) {
  for (const auto& [term, n] : other.counts) counts[term] += n;
  total += other.total;
}

TokenCorpus tokenize(const std::vector<PostRecord>& posts, const StopwordSet& stopwords, std::string community) {
  TokenCorpus corpus;
  corpus.community = std::move(community);
  for (const auto& post : posts) {
    for (const auto& tok : tokenize_text(post.text, stopwords)) corpus.add(tok);
  }
  return corpus;
}

TokenCorpus pool(const std::vector<const TokenCorpus*>& corpora, std::string label) {
  TokenCorpus out;
  out.community = std::move(label);
  for (const auto* c : corpora) out.merge(*c);
  return out;
}

std::size_t vocabulary_size(const TokenCorpus& a, const TokenCorpus& b) {
  std::size_t v = a.counts.size();
  for (const auto& [term, n] : b.counts) {
    if (a.counts.find(term) == a.counts.end()) ++v;
  }
  return v;
}

std::optional<double> npmi_from_counts(std::uint64_t count_target, std::uint64_t total_target,
                                       std::uint64_t count_rest, std::uint64_t total_rest, std::uint64_t vocabulary) {
  if (total_target == 0 || count_target > total_target || count_rest > total_rest) {
    throw ArgumentError("npmi: inconsistent counts");
  }
  const double ct = static_cast<double>(count_target);
  const double t = static_cast<double>(total_target);
  const double r = static_cast<double>(total_rest);
  const double joint = ct / (t + r);
  if (joint >= 1.0) return std::nullopt;
  if (count_target == 0) return -1.0;
  double p_w;
  if (count_rest > 0) {
    p_w = static_cast<double>(count_rest) / r;
  } else {
    if (total_rest + vocabulary == 0) throw ArgumentError("npmi: empty rest corpus and vocabulary");
    p_w = 1.0 / (r + static_cast<double>(vocabulary));
  }
  const double pmi = std::log((ct / t) / p_w);
  return pmi / -std::log(joint);
}

std::optional<double> npmi_score(const std::string& term, const TokenCorpus& target, const TokenCorpus& rest) {
  return npmi_from_counts(target.count(term), target.total, rest.count(term), rest.total,
                          vocabulary_size(target, rest));
}

double WeeklyTermCounts::sparsity(const std::string& term) const {
  if (weeks == 0) return 1.0;
  const auto it = counts.find(term);
  std::size_t sparse = 0;
  for (std::size_t w = 0; w < weeks; ++w) {
    if (week_missing(w) || it == counts.end() || it->second[w] == 0) ++sparse;
  }
  return static_cast<double>(sparse) / static_cast<double>(weeks);
}

std::uint32_t WeeklyTermCounts::count(const std::string& term, std::size_t w) const {
  const auto it = counts.find(term);
  return it == counts.end() ? 0 : it->second[w];
}

TimeSeries WeeklyTermCounts::log_series(const std::string& term, const std::string& name) const {
  std::vector<TimeSeries::Value> v(weeks);
  for (std::size_t w = 0; w < weeks; ++w) {
    if (!week_missing(w)) v[w] = std::log1p(static_cast<double>(count(term, w)));
  }
  return TimeSeries(name, Frequency::weekly, first_week, std::move(v));
}

WeeklyTermCounts weekly_term_counts(const std::vector<PostRecord>& posts, const StopwordSet& stopwords,
                                    const DateRange& window, const std::unordered_set<std::string>* terms) {
  WeeklyTermCounts out;
  out.first_week = monday_on_or_after(window.first);
  const long span = (window.last - out.first_week).count() + 1;
  out.weeks = span >= 7 ? static_cast<std::size_t>(span / 7) : 0;
  if (out.weeks == 0) throw InsufficientDataError("weekly_term_counts: window holds no complete week");
  out.posts_per_week.assign(out.weeks, 0);
  const Date end = add_days(out.first_week, static_cast<long>(out.weeks) * 7);
  for (const auto& post : posts) {
    const Date d = day_of(post.timestamp);
    if (d < out.first_week || d >= end) continue;
    const auto w = static_cast<std::size_t>((d - out.first_week).count() / 7);
    ++out.posts_per_week[w];
    for (const auto& tok : tokenize_text(post.text, stopwords)) {
      if (terms != nullptr && terms->count(tok) == 0) continue;
      auto& series = out.counts[tok];
      if (series.empty()) series.assign(out.weeks, 0);
      ++series[w];
    }
  }
  return out;
}

std::vector<ScoredTerm> rank_terms(const TokenCorpus& target, const TokenCorpus& rest, std::uint64_t min_freq) {
  const std::size_t vocab = vocabulary_size(target, rest);
  std::vector<ScoredTerm> out;
  for (const auto& [term, ct] : target.counts) {
    if (ct < min_freq) continue;
    const std::uint64_t cr = rest.count(term);
    const auto score = npmi_from_counts(ct, target.total, cr, rest.total, vocab);
    if (!score) continue;
    out.push_back({term, *score, ct, cr});
  }
  std::sort(out.begin(), out.end(), [](const ScoredTerm& a, const ScoredTerm& b) {
    if (a.npmi != b.npmi) return a.npmi > b.npmi;
    if (a.freq_target != b.freq_target) return a.freq_target > b.freq_target;
    return a.term < b.term;
  });
  return out;
}

Lexicon build_lexicon(const TokenCorpus& target, const TokenCorpus& rest, const WeeklyTermCounts& target_weeks,
                      const WeeklyTermCounts& partner_weeks, const LexiconOptions& options,
                      const std::string& partner) {
  if (!(options.sparsity > 0.0 && options.sparsity <= 1.0)) throw ArgumentError("build_lexicon: sparsity must lie in (0,1]");
  Lexicon lex;
  lex.community = target.community;
  lex.partner = partner;
  const auto ranked = rank_terms(target, rest, options.min_freq);
  lex.candidates = ranked.size();
  for (const auto& st : ranked) {
    if (lex.entries.size() >= options.k) break;
    const double s_target = target_weeks.sparsity(st.term);
    const double s_partner = partner_weeks.sparsity(st.term);
    if (s_target >= options.sparsity || s_partner >= options.sparsity) {
      ++lex.dropped_sparse;
      continue;
    }
    LexiconEntry e;
    e.term = st.term;
    e.npmi = st.npmi;
    e.freq_target = st.freq_target;
    e.freq_rest = st.freq_rest;
    e.sparsity_target = s_target;
    e.sparsity_partner = s_partner;
    e.weekly_target = target_weeks.log_series(st.term, target.community + ":" + st.term);
    e.weekly_partner = partner_weeks.log_series(st.term, partner + ":" + st.term);
    lex.entries.push_back(std::move(e));
  }
  if (lex.entries.size() < options.k) {
    lex.warnings.push_back("lexicon " + target.community + (partner.empty() ? "" : "/" + partner) + ": only " +
                           std::to_string(lex.entries.size()) + " of " + std::to_string(options.k) +
                           " terms survive the frequency and sparsity filters");
  }
  return lex;
}

}  // namespace causal_pulse
