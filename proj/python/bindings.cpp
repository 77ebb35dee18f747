#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "causal_pulse/config.hpp"
#include "causal_pulse/errors.hpp"
#include "causal_pulse/granger.hpp"
#include "causal_pulse/impact.hpp"
#include "causal_pulse/lexicon.hpp"
#include "causal_pulse/pipeline.hpp"
#include "causal_pulse/report.hpp"
#include "causal_pulse/stat_tests.hpp"
#include "causal_pulse/synthetic.hpp"
#include "causal_pulse/var.hpp"

namespace py = pybind11;
namespace cp = causal_pulse;

namespace {

py::dict test_dict(const cp::TestResult& r) {
  py::dict d;
  d["statistic"] = r.statistic;
  d["p_value"] = r.p_value;
  d["lags"] = r.lags_used;
  d["nobs"] = r.nobs;
  d["reject_at_5pct"] = r.reject_at_5pct;
  d["p_value_clamped"] = r.p_value_clamped;
  return d;
}

py::dict granger_dict(const cp::GrangerResult& g) {
  py::dict d;
  d["stimulus"] = g.stimulus;
  d["response"] = g.response;
  d["f_statistic"] = g.f_statistic;
  d["p_value"] = g.p_value;
  d["lag_order"] = g.lag_order;
  d["df"] = py::make_tuple(g.df_num, g.df_den);
  d["lags"] = g.annotation();
  if (g.diagnostics) d["daggers"] = g.diagnostics->daggers();
  return d;
}

cp::TimeSeries daily(const std::vector<double>& values, const std::string& start, const std::string& name) {
  return cp::TimeSeries::from_dense(name, cp::Frequency::daily, cp::parse_date(start), values);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Event impact, news Granger and lexicon diffusion analysis";

  py::register_exception<cp::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<cp::ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
  py::register_exception<cp::ArgumentError>(m, "ArgumentError", PyExc_ValueError);

  m.def("adf_test", [](const std::vector<double>& x) { return test_dict(cp::adf_test(x)); }, py::arg("x"));
  m.def("kpss_test", [](const std::vector<double>& x) { return test_dict(cp::kpss_test(x)); }, py::arg("x"));
  m.def(
      "ljung_box",
      [](const std::vector<double>& x, std::size_t lags, std::size_t model_df) {
        return test_dict(cp::ljung_box(x, lags, model_df));
      },
      py::arg("x"), py::arg("lags"), py::arg("model_df") = 0);

  m.def(
      "bh_fdr",
      [](const std::vector<double>& p, double q) {
        cp::PValueFamily f{"family", {}, q};
        for (std::size_t i = 0; i < p.size(); ++i) f.entries.emplace_back(std::to_string(i), p[i]);
        const auto r = cp::bh_fdr(f);
        return py::make_tuple(r.adjusted, r.rejected);
      },
      py::arg("p_values"), py::arg("q") = 0.05, "Returns (adjusted p-values, rejected flags).");

  m.def(
      "select_lag",
      [](const Eigen::MatrixXd& endo, std::size_t p_max) {
        const auto s = cp::select_lag(endo, Eigen::MatrixXd(endo.rows(), 0), p_max);
        py::dict d;
        d["chosen"] = s.chosen;
        d["rule"] = cp::to_string(s.rule);
        d["aic"] = s.aic_lag;
        d["bic"] = s.bic_lag;
        d["hqic"] = s.hqic_lag;
        return d;
      },
      py::arg("endo"), py::arg("p_max"));

  m.def(
      "granger",
      [](const Eigen::MatrixXd& endo, std::size_t p, const std::optional<Eigen::MatrixXd>& exog, std::string first,
         std::string second) {
        const Eigen::MatrixXd x = exog ? *exog : Eigen::MatrixXd(endo.rows(), 0);
        const auto model = cp::fit_varx(endo, x, p, {first, second});
        py::dict d;
        d["coef"] = model.coef;
        d["sigma"] = model.sigma;
        d["n_obs"] = model.n_obs;
        d["forward"] = granger_dict(cp::diagnose(model, cp::granger_test(model, first, second)));
        d["reverse"] = granger_dict(cp::diagnose(model, cp::granger_test(model, second, first)));
        return d;
      },
      py::arg("endo"), py::arg("p"), py::arg("exog") = std::nullopt, py::arg("first") = "y1", py::arg("second") = "y2",
      "Fits a VAR-X(p) on the two columns of `endo` and tests both directions.");

  m.def(
      "analyse_event",
      [](const std::vector<double>& values, const std::string& start, const std::string& event_date,
         bool log_scale, std::size_t draws, std::uint64_t seed) {
        cp::ImpactSettings settings;
        settings.mc_draws = draws;
        const auto r = cp::analyse_event(daily(values, start, "signal"), {"event", cp::parse_date(event_date)},
                                         nullptr, settings,
                                         log_scale ? cp::EffectScale::log1p : cp::EffectScale::identity, seed);
        py::dict d;
        d["relative_effect"] = r.relative_effect;
        d["interval"] = py::make_tuple(r.effect_lower, r.effect_upper);
        d["interval95"] = py::make_tuple(r.effect_lower95, r.effect_upper95);
        d["tail_probability"] = r.tail_probability;
        d["significant"] = r.significant;
        d["observed"] = r.observed;
        d["forecast"] = r.forecast;
        d["lower"] = r.lower;
        d["upper"] = r.upper;
        return d;
      },
      py::arg("values"), py::arg("start"), py::arg("event_date"), py::arg("log_scale") = false,
      py::arg("draws") = 10000, py::arg("seed") = 20240713);

  m.def("tokenize", [](const std::string& text, const std::vector<std::string>& stopwords) {
    return cp::tokenize_text(text, cp::StopwordSet(stopwords.begin(), stopwords.end()));
  }, py::arg("text"), py::arg("stopwords") = std::vector<std::string>{});
  m.def("npmi", &cp::npmi_from_counts, py::arg("count_target"), py::arg("total_target"), py::arg("count_rest"),
        py::arg("total_rest"), py::arg("vocabulary"));

  m.def(
      "write_synthetic_dataset",
      [](const std::filesystem::path& dir, std::uint64_t seed) {
        cp::SyntheticOptions o;
        o.seed = seed;
        return cp::write_synthetic_dataset(dir, o).config;
      },
      py::arg("dir"), py::arg("seed") = 20240713, "Returns the path of the generated config.json.");

  m.def(
      "run",
      [](const std::filesystem::path& config_path, const std::vector<std::string>& analyses,
         std::optional<std::filesystem::path> out, std::optional<std::uint64_t> seed, std::optional<std::size_t> jobs) {
        auto config = cp::load_config(config_path);
        if (out) config.output_dir = *out;
        if (seed) config.seed = *seed;
        if (jobs) config.jobs = *jobs;
        std::vector<cp::Analysis> which;
        for (const auto& a : analyses) which.push_back(cp::parse_analysis(a));
        if (which.empty()) which = config.analyses;
        cp::RunReport report;
        {
          py::gil_scoped_release release;
          report = cp::run_analyses(config, which);
        }
        return cp::write_report(report, config.output_dir);
      },
      py::arg("config"), py::arg("analyses") = std::vector<std::string>{}, py::arg("out") = std::nullopt,
      py::arg("seed") = std::nullopt, py::arg("jobs") = std::nullopt,
      "Runs the pipeline like the CLI and returns the written files.");

  m.attr("__version__") = CAUSAL_PULSE_PY_VERSION;
}
