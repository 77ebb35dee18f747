#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "causal_pulse/ingest.hpp"
#include "causal_pulse/series.hpp"

namespace causal_pulse {

using StopwordSet = std::unordered_set<std::string>;

/// One word per line; blank lines and lines starting with '#' are ignored.
StopwordSet parse_stopwords(std::string_view text);
StopwordSet read_stopwords(const std::filesystem::path& path);

/// Lowercased unigrams (stopwords removed) followed by underscore-joined
/// adjacent bigrams whose parts are both non-stopwords.
std::vector<std::string> tokenize_text(std::string_view text, const StopwordSet& stopwords);

struct TokenCorpus {
  std::string community;
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  std::uint64_t count(const std::string& term) const;
  void add(const std::string& term, std::uint64_t n = 1);
  void merge(const TokenCorpus& other);
};

TokenCorpus tokenize(const std::vector<PostRecord>& posts, const StopwordSet& stopwords,
                     std::string community = {});

/// Pools several corpora into one (the "rest" side of a one-vs-all contrast).
TokenCorpus pool(const std::vector<const TokenCorpus*>& corpora, std::string label);

/// Number of distinct terms across both corpora.
std::size_t vocabulary_size(const TokenCorpus& a, const TokenCorpus& b);

/// NPMI from raw counts. P(w|c) = ct/T, P(w) = cr/R (or 1/(R+V) when
/// cr = 0), P(w,c) = ct/(T+R). Returns nullopt when P(w,c) = 1.
std::optional<double> npmi_from_counts(std::uint64_t count_target, std::uint64_t total_target,
                                       std::uint64_t count_rest, std::uint64_t total_rest, std::uint64_t vocabulary);

std::optional<double> npmi_score(const std::string& term, const TokenCorpus& target, const TokenCorpus& rest);

/// Per-term counts in consecutive ISO weeks. A week in which the community
/// has no posts at all is missing.
struct WeeklyTermCounts {
  Date first_week{};
  std::size_t weeks = 0;
  std::vector<std::uint64_t> posts_per_week;
  std::unordered_map<std::string, std::vector<std::uint32_t>> counts;

  bool week_missing(std::size_t w) const { return posts_per_week[w] == 0; }
  /// Fraction of weeks whose count is zero or missing.
  double sparsity(const std::string& term) const;
  /// ln(1 + count), missing where the week is missing.
  TimeSeries log_series(const std::string& term, const std::string& name) const;
  std::uint32_t count(const std::string& term, std::size_t w) const;
};

/// Full ISO weeks inside the window; posts outside are ignored. When
/// `terms` is given only those terms are counted.
WeeklyTermCounts weekly_term_counts(const std::vector<PostRecord>& posts, const StopwordSet& stopwords,
                                    const DateRange& window, const std::unordered_set<std::string>* terms = nullptr);

struct LexiconOptions {
  std::size_t k = 100;
  std::uint64_t min_freq = 50;
  double sparsity = 0.25;
};

struct LexiconEntry {
  std::string term;
  double npmi = 0.0;
  std::uint64_t freq_target = 0;
  std::uint64_t freq_rest = 0;
  double sparsity_target = 0.0;
  double sparsity_partner = 0.0;
  TimeSeries weekly_target;
  TimeSeries weekly_partner;
};

struct ScoredTerm {
  std::string term;
  double npmi = 0.0;
  std::uint64_t freq_target = 0;
  std::uint64_t freq_rest = 0;
};

/// Terms with target frequency >= min_freq, ranked by NPMI descending, then
/// target frequency descending, then term.
std::vector<ScoredTerm> rank_terms(const TokenCorpus& target, const TokenCorpus& rest, std::uint64_t min_freq);

struct Lexicon {
  std::string community;
  std::string partner;
  std::vector<LexiconEntry> entries;
  std::size_t candidates = 0;
  std::size_t dropped_sparse = 0;
  std::vector<std::string> warnings;
};

/// Top-k ranked terms that are not sparse in either the target's or the
/// partner's weekly counts.
Lexicon build_lexicon(const TokenCorpus& target, const TokenCorpus& rest, const WeeklyTermCounts& target_weeks,
                      const WeeklyTermCounts& partner_weeks, const LexiconOptions& options = {},
                      const std::string& partner = {});

}  // namespace causal_pulse
