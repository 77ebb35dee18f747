// Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "causal_pulse/config.hpp"
#include "causal_pulse/impact.hpp"
#include "causal_pulse/lexicon.hpp"
#include "causal_pulse/pipeline.hpp"
#include "causal_pulse/report.hpp"
#include "causal_pulse/stat_tests.hpp"
#include "causal_pulse/synthetic.hpp"
#include "causal_pulse/var.hpp"
#include "causal_pulse/granger.hpp"
#include "oracles.hpp"

using namespace causal_pulse;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome var_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Eigen::Matrix2d> a{(Eigen::Matrix2d() << 0.5, 0.2, 0.0, 0.4).finished(),
                                       (Eigen::Matrix2d() << 0.2, 0.0, 0.15, 0.3).finished()};
  int within = 0;
  int lag_two = 0;
  for (int seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    const Eigen::MatrixXd endo = oracle::simulate_var(a, 2000, rng);
    const Eigen::MatrixXd none(endo.rows(), 0);
    const auto m = fit_varx(endo, none, 2);
    const double err = std::max((m.a[0] - a[0]).cwiseAbs().maxCoeff(), (m.a[1] - a[1]).cwiseAbs().maxCoeff());
    if (err <= 0.05) ++within;
    if (select_lag(endo, none, 14).chosen == 2) ++lag_two;
  }
  const double secs = seconds_since(t0);
  return {within >= 95 && lag_two >= 80 && secs < 60.0,
          fmt::format("coefficients within 0.05 in {}/100 seeds (need 95), p=2 chosen in {}/100 (need 80), {:.1f}s",
                      within, lag_two, secs)};
}

Eigen::MatrixXd coupled_pair(std::size_t n, double coupling, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd endo(static_cast<Eigen::Index>(n), 2);
  double y = 0.0;
  double x_prev = 0.0;
  for (Eigen::Index t = 0; t < endo.rows(); ++t) {
    const double x = normal(rng);
    y = 0.5 * y + coupling * x_prev + normal(rng);
    endo.row(t) << x, y;
    x_prev = x;
  }
  return endo;
}

std::pair<double, double> granger_both(const Eigen::MatrixXd& endo) {
  const Eigen::MatrixXd none(endo.rows(), 0);
  const auto sel = select_lag(endo, none, 14);
  const auto m = fit_varx(endo, none, sel.chosen, {"x", "y"});
  return {granger_test(m, "x", "y").p_value, granger_test(m, "y", "x").p_value};
}

Outcome granger_power_size() {
  int forward = 0;
  int reverse = 0;
  for (int seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(seed));
    const auto [f, r] = granger_both(coupled_pair(500, 0.4, rng));
    if (f < 0.01) ++forward;
    if (r > 0.05) ++reverse;
  }
  std::vector<double> null_p;
  for (int rep = 0; rep < 500; ++rep) {
    std::mt19937_64 rng(50000 + static_cast<std::uint64_t>(rep));
    null_p.push_back(granger_both(coupled_pair(500, 0.0, rng)).first);
  }
  const double ks = oracle::ks_uniform_p(null_p);
  return {forward >= 90 && reverse >= 80 && ks > 0.01,
          fmt::format("forward p<0.01 in {}/100 (need 90), reverse p>0.05 in {}/100 (need 80), null KS p={:.4f}",
                      forward, reverse, ks)};
}

Outcome fdr_control() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double fdp_sum = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    PValueFamily f{"null", {}, 0.05};
    for (int i = 0; i < 100; ++i) f.entries.emplace_back(std::to_string(i), u(rng));
    const auto r = bh_fdr(f);
    fdp_sum += r.rejected_ids.empty() ? 0.0 : 1.0;  // every rejection is false
  }
  const double fdr = fdp_sum / 1000.0;
  return {fdr <= 0.07, fmt::format("empirical FDR {:.3f} at q=0.05 (limit 0.07)", fdr)};
}

TimeSeries weekly_cycle(std::mt19937_64& rng, std::size_t event, double lift) {
  std::normal_distribution<double> noise(0.0, 5.0);
  const std::size_t n = event + 30;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = 100.0 + 15.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(i % 7) / 7.0) + noise(rng);
    if (i >= event) v[i] *= 1.0 + lift;
  }
  return TimeSeries::from_dense("signal", Frequency::daily, parse_date("2020-01-06"), v);
}

Outcome lift_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::size_t kEvent = 800;
  const double truth = 0.3 / 1.3;
  int recovered = 0;
  int false_positive = 0;
  for (int seed = 1; seed <= 100; ++seed) {
    const EventSpec ev{"step", add_days(parse_date("2020-01-06"), kEvent)};
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    const auto lifted = analyse_event(weekly_cycle(rng, kEvent, 0.3), ev, nullptr, {}, EffectScale::identity,
                                      static_cast<std::uint64_t>(seed));
    if (std::abs(lifted.relative_effect - truth) <= 0.10) ++recovered;
    std::mt19937_64 rng0(100000 + static_cast<std::uint64_t>(seed));
    const auto flat = analyse_event(weekly_cycle(rng0, kEvent, 0.0), ev, nullptr, {}, EffectScale::identity,
                                    static_cast<std::uint64_t>(seed));
    if (flat.significant) ++false_positive;
  }
  const double secs = seconds_since(t0);
  return {recovered >= 90 && false_positive <= 10 && secs < 300.0,
          fmt::format("effect within 10pp of {:.1f}% in {}/100 (need 90), zero-lift significant at 99% in {}/100 "
                      "(limit 10), {:.1f}s",
                      100.0 * truth, recovered, false_positive, secs)};
}

Outcome statistic_oracles() {
  std::ifstream in(CAUSAL_PULSE_REFERENCE_DIR "/stat_reference.json");
  if (!in) return {false, "reference fixtures not found"};
  const auto ref = nlohmann::json::parse(in);
  double worst = 0.0;
  std::size_t n = 0;
  for (const auto& f : ref.at("fixtures")) {
    const auto x = f.at("x").get<std::vector<double>>();
    const auto& lb = f.at("ljung_box");
    worst = std::max({worst, std::abs(adf_test(x).statistic - f.at("adf").at("statistic").get<double>()),
                      std::abs(kpss_test(x).statistic - f.at("kpss").at("statistic").get<double>()),
                      std::abs(ljung_box(x, lb.at("lags").get<std::size_t>(), lb.at("model_df").get<std::size_t>())
                                   .statistic -
                               lb.at("statistic").get<double>())});
    ++n;
  }
  return {n == 20 && worst <= 1e-6,
          fmt::format("{} fixtures vs {}, max abs difference {:.2e}", n, ref.at("generator").get<std::string>(), worst)};
}

Outcome npmi_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::uint64_t> total(100, 1000000);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  double worst = 0.0;
  int out_of_range = 0;
  double max_value = -1.0;
  for (int i = 0; i < 10000; ++i) {
    const std::uint64_t t = total(rng);
    const std::uint64_t r = total(rng);
    const auto ct = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(frac(rng) * static_cast<double>(t)));
    const auto cr = static_cast<std::uint64_t>(frac(rng) * frac(rng) * static_cast<double>(r));
    const std::uint64_t v = 1000 + static_cast<std::uint64_t>(frac(rng) * 50000.0);
    const auto got = npmi_from_counts(ct, t, cr, r, v);
    if (!got) continue;
    const double want = oracle::npmi(static_cast<double>(ct), static_cast<double>(t), static_cast<double>(cr),
                                     static_cast<double>(r), static_cast<double>(v));
    worst = std::max(worst, std::abs(*got - want));
    max_value = std::max(max_value, *got);
    if (*got < -1.0 || *got > 1.0) ++out_of_range;
  }
  return {worst <= 1e-10 && out_of_range == 0,
          fmt::format("max abs difference {:.2e}; {} of 10000 values outside [-1,1] (max {:.4f})", worst,
                      out_of_range, max_value)};
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), dir).generic_string()] = ss.str();
  }
  return files;
}

Outcome pipeline_determinism() {
  const fs::path root = fs::temp_directory_path() / "causal_pulse_acceptance";
  fs::remove_all(root);
  const auto ds = write_synthetic_dataset(root / "data");
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  auto run = [&](const std::string& name, std::size_t jobs) {
    AnalysisConfig c = load_config(ds.config);
    c.jobs = jobs;
    c.output_dir = root / name;
    write_report(run_analyses(c, c.analyses), c.output_dir);
    return read_tree(c.output_dir);
  };
  const auto a = run("first", 1);
  const auto b = run("second", 1);
  const auto c = run("parallel", 8);
  std::size_t svgs = 0;
  for (const auto& [path, _] : a) svgs += path.ends_with(".svg") ? 1 : 0;
  return {a == b && a == c && svgs > 0,
          fmt::format("{} files ({} SVG); rerun {}, jobs=1 vs jobs=8 {}", a.size(), svgs,
                      a == b ? "identical" : "DIFFERENT", a == c ? "identical" : "DIFFERENT")};
}

Outcome default_constants() {
  const AnalysisConfig c = parse_config("{}", fs::temp_directory_path());
  const auto& p = c.parameters;
  const ImpactSettings impact;
  const LexiconOptions lex;
  std::vector<std::string> bad;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) bad.emplace_back(what);
  };
  expect(p.p_max_daily == 14, "p_max daily 14");
  expect(p.p_max_weekly == 6, "p_max weekly 6");
  expect(p.pre_weeks == 11 && impact.pre_days == 77, "11 pre-weeks");
  expect(p.post_days == 7 && impact.post_days == 7, "7 post-days");
  expect(p.interval_level == 0.99 && impact.interval_level == 0.99, "99% interval");
  expect(p.q == 0.05, "q 0.05");
  expect(2 * p.news_entities == 100, "family of 100");
  expect(p.k == 100 && lex.k == 100, "top-100 terms");
  expect(p.min_freq == 50 && lex.min_freq == 50, "min frequency 50");
  expect(p.sparsity == 0.25 && lex.sparsity == 0.25, "25% sparsity");
  expect(p.placebo_shift_days == -21, "-21 day placebo");
  expect(p.year_lag_days == 365 && impact.year_lag_days == 365, "year-ago predictor");
  expect(p.seasonal_lag_days == 161 && impact.seasonal_lag_days == 161, "23-week predictor");

  const auto snapshot = nlohmann::json::parse(config_json(c)).at("parameters");
  const auto expected = nlohmann::json::parse(R"({
    "p_max_daily": 14, "p_max_weekly": 6, "pre_weeks": 11, "post_days": 7, "q": 0.05, "k": 100,
    "min_freq": 50, "sparsity": 0.25, "mc_draws": 10000, "interval_level": 0.99, "placebo_shift_days": -21,
    "year_lag_days": 365, "seasonal_lag_days": 161, "news_entities": 50})");
  expect(snapshot == expected, "config snapshot");
  std::string detail = bad.empty() ? "all defaults match" : "mismatch:";
  for (const auto& b : bad) detail += " " + b + ";";
  return {bad.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"VAR recovery", var_recovery},
      {"Granger power and size", granger_power_size},
      {"FDR control", fdr_control},
      {"counterfactual lift recovery", lift_recovery},
      {"test-statistic oracles", statistic_oracles},
      {"NPMI oracle", npmi_oracle},
      {"pipeline determinism", pipeline_determinism},
      {"default-constant conformance", default_constants},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    fmt::print("criterion {} {}: {} ({})\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
