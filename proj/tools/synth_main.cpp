#include <fmt/format.h>

#include <CLI11.hpp>
#include <cstdio>
#include <exception>

#include "causal_pulse/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the deterministic synthetic dataset"};
  std::string dir;
  causal_pulse::SyntheticOptions options;
  app.add_option("dir", dir, "target directory")->required();
  app.add_option("--seed", options.seed, "generator seed");
  app.add_option("--days", options.days, "number of days");
  CLI11_PARSE(app, argc, argv);
  try {
    const auto ds = causal_pulse::write_synthetic_dataset(dir, options);
    fmt::print("{}\n", ds.config.string());
    return 0;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
