#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <optional>

#include "causal_pulse/config.hpp"
#include "causal_pulse/errors.hpp"
#include "causal_pulse/pipeline.hpp"
#include "causal_pulse/report.hpp"

namespace cp = causal_pulse;

int main(int argc, char** argv) {
  CLI::App app{"Event impact, news Granger and lexicon diffusion analysis for online communities"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;

  const char* names[] = {"impact", "granger-news", "diffusion", "lexicon", "placebo", "all"};
  for (const char* name : names) {
    auto* sub = app.add_subcommand(name, fmt::format("run the {} analysis", name));
    sub->add_option("--config", config_path, "JSON configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "run seed (overrides seed)");
    sub->add_option("--jobs", jobs, "worker threads (overrides jobs)")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    cp::AnalysisConfig config = cp::load_config(config_path);
    if (out_dir) config.output_dir = *out_dir;
    if (seed) config.seed = *seed;
    if (jobs) config.jobs = *jobs;

    std::vector<cp::Analysis> analyses;
    if (command == "all") analyses = config.analyses;
    else analyses.push_back(cp::parse_analysis(command));

    const cp::RunReport report = cp::run_analyses(config, analyses);
    const auto files = cp::write_report(report, config.output_dir);
    for (const auto& section : report.sections) {
      fmt::print("{}: {}/{} completed, {} skipped\n", section.name, section.completed, section.requested,
                 section.skips.size());
    }
    fmt::print("wrote {} files to {}\n", files.size(), config.output_dir.string());
    return 0;
  } catch (const cp::ConfigurationError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return 2;
  } catch (const cp::IngestionError& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
