#include <doctest.h>

#include <cmath>
#include <random>

#include "causal_pulse/lexicon.hpp"
#include "oracles.hpp"

using namespace causal_pulse;

namespace {

TokenCorpus corpus(std::initializer_list<std::pair<const char*, std::uint64_t>> counts, std::uint64_t filler = 0) {
  TokenCorpus c;
  for (auto [t, n] : counts) c.add(t, n);
  if (filler > 0) c.add("filler", filler);
  return c;
}

WeeklyTermCounts weeks(std::size_t n, std::initializer_list<std::pair<const char*, std::size_t>> present_weeks) {
  WeeklyTermCounts w;
  w.first_week = parse_date("2022-01-03");
  w.weeks = n;
  w.posts_per_week.assign(n, 10);
  for (auto [term, k] : present_weeks) {
    auto& v = w.counts[term];
    v.assign(n, 0);
    for (std::size_t i = 0; i < k; ++i) v[i] = 3;
  }
  return w;
}

PostRecord post(std::string_view ts, std::string text) {
  return {"a", parse_timestamp(ts), std::move(text), {}};
}

}  // namespace

TEST_SUITE("lexicon") {

TEST_CASE("tokenization") {
  const StopwordSet stop{"the"};
  CHECK(tokenize_text("The police arrived", stop) == std::vector<std::string>{"police", "arrived", "police_arrived"});
  CHECK(tokenize_text("", stop).empty());
  CHECK(tokenize_text("LAW enforcement", {}) == std::vector<std::string>{"law", "enforcement", "law_enforcement"});
  CHECK(tokenize_text("law and order", {"and"}) == std::vector<std::string>{"law", "order"});
  CHECK(tokenize_text("re-election!!", {}) == std::vector<std::string>{"re", "election", "re_election"});

  const auto sw = parse_stopwords("# comment\nThe\n\nand\n");
  CHECK(sw.size() == 2);
  CHECK(sw.count("the") == 1);

  const auto c = tokenize({post("2022-01-03T00:00:00Z", "a b"), post("2022-01-03T00:00:00Z", "")}, {}, "x");
  CHECK(c.total == 3);
  CHECK(c.count("a_b") == 1);
}

TEST_CASE("npmi closed forms") {
  CHECK(*npmi_from_counts(10, 100, 90, 900, 50) == doctest::Approx(0.0).epsilon(1e-15));
  const double expected = std::log(0.5 / (50.0 / 900.0)) / -std::log(50.0 / 1000.0);
  CHECK(*npmi_from_counts(50, 100, 50, 900, 10) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(*npmi_from_counts(50, 100, 50, 900, 10) == doctest::Approx(oracle::npmi(50, 100, 50, 900, 10)).epsilon(1e-14));
  // Unseen in the rest: add-one style smoothing over the shared vocabulary.
  CHECK(*npmi_from_counts(60, 100, 0, 900, 40) == doctest::Approx(oracle::npmi(60, 100, 0, 900, 40)).epsilon(1e-14));
  CHECK(*npmi_from_counts(0, 100, 5, 900, 40) == -1.0);
  CHECK_FALSE(npmi_from_counts(100, 100, 0, 0, 1).has_value());

  const auto t = corpus({{"w", 50}}, 50);
  const auto r = corpus({{"w", 50}}, 850);
  CHECK(*npmi_score("w", t, r) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("identical corpora tie-break") {
  const auto a = corpus({{"beta", 80}, {"alpha", 80}, {"gamma", 120}});
  const auto ranked = rank_terms(a, a, 50);
  REQUIRE(ranked.size() == 3);
  for (const auto& s : ranked) CHECK(std::abs(s.npmi) < 1e-12);
  CHECK(ranked[0].term == "gamma");
  CHECK(ranked[1].term == "alpha");
  CHECK(ranked[2].term == "beta");
}

TEST_CASE("frequency threshold") {
  const auto t = corpus({{"rare", 49}, {"common", 50}}, 1000);
  const auto r = corpus({{"rare", 1}, {"common", 1}}, 1000);
  const auto ranked = rank_terms(t, r, 50);
  CHECK(std::none_of(ranked.begin(), ranked.end(), [](const ScoredTerm& s) { return s.term == "rare"; }));
}

TEST_CASE("sparsity filter and shortfall warning") {
  const auto t = corpus({{"dense", 200}, {"sparse", 200}, {"partner_sparse", 200}}, 5000);
  const auto r = corpus({{"dense", 20}, {"sparse", 20}, {"partner_sparse", 20}}, 50000);
  const auto tw = weeks(100, {{"dense", 100}, {"sparse", 10}, {"partner_sparse", 100}, {"filler", 100}});
  const auto pw = weeks(100, {{"dense", 80}, {"sparse", 100}, {"partner_sparse", 70}, {"filler", 100}});
  CHECK(tw.sparsity("sparse") == doctest::Approx(0.9));

  LexiconOptions opts;
  const auto lex = build_lexicon(t, r, tw, pw, opts, "b");
  std::vector<std::string> terms;
  for (const auto& e : lex.entries) terms.push_back(e.term);
  CHECK(std::find(terms.begin(), terms.end(), "dense") != terms.end());
  CHECK(std::find(terms.begin(), terms.end(), "sparse") == terms.end());
  CHECK(std::find(terms.begin(), terms.end(), "partner_sparse") == terms.end());
  CHECK(lex.entries.size() < opts.k);
  CHECK_FALSE(lex.warnings.empty());
  CHECK(lex.partner == "b");
  for (const auto& e : lex.entries) {
    CHECK(e.freq_target >= opts.min_freq);
    CHECK(e.sparsity_target < opts.sparsity);
    CHECK(e.sparsity_partner < opts.sparsity);
    CHECK(e.weekly_target.size() == 100);
    CHECK(*e.weekly_target[0] == doctest::Approx(std::log1p(3.0)));
  }
}

TEST_CASE("forty survivors out of a hundred requested") {
  TokenCorpus t;
  TokenCorpus r;
  WeeklyTermCounts tw = weeks(20, {});
  for (int i = 0; i < 40; ++i) {
    const std::string term = "t" + std::to_string(i);
    t.add(term, 60 + static_cast<std::uint64_t>(i));
    r.add(term, 5);
    tw.counts[term].assign(20, 1);
  }
  r.add("other", 10000);
  const auto lex = build_lexicon(t, r, tw, tw);
  CHECK(lex.entries.size() == 40);
  CHECK(lex.warnings.size() == 1);
}

TEST_CASE("ranking is invariant under document duplication") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> n(0, 300);
  TokenCorpus t;
  TokenCorpus r;
  for (int i = 0; i < 60; ++i) {
    const std::string term = "w" + std::to_string(i);
    t.add(term, static_cast<std::uint64_t>(n(rng)));
    r.add(term, static_cast<std::uint64_t>(n(rng)));
  }
  TokenCorpus t2 = t;
  t2.merge(t);
  TokenCorpus r2 = r;
  r2.merge(r);
  const auto a = rank_terms(t, r, 1);
  const auto b = rank_terms(t2, r2, 1);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].term == b[i].term);
}

TEST_CASE("weekly term counts") {
  const std::vector<PostRecord> posts{post("2022-01-03T10:00:00Z", "alpha beta"), post("2022-01-04T10:00:00Z", "alpha"),
                                      post("2022-01-19T10:00:00Z", "beta"), post("2022-01-26T10:00:00Z", "alpha")};
  const auto w = weekly_term_counts(posts, {}, {parse_date("2022-01-01"), parse_date("2022-01-30")});
  CHECK(w.first_week == parse_date("2022-01-03"));
  CHECK(w.weeks == 4);
  CHECK(w.count("alpha", 0) == 2);
  CHECK(w.week_missing(1));
  CHECK(w.sparsity("alpha") == doctest::Approx(0.5));
  const auto s = w.log_series("alpha", "alpha");
  CHECK(s.frequency() == Frequency::weekly);
  CHECK_FALSE(s[1].has_value());
  CHECK(*s[3] == doctest::Approx(std::log1p(1.0)));
}

}
