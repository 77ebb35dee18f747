#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "causal_pulse/date.hpp"

namespace causal_pulse {

/// Deterministic synthetic corpus with known structure:
///  - community 0 gets a multiplicative posters lift after `lifted_events`
///  - one entity drives community 0's posts/poster at `driver_lag` days
///  - `diffusion_term` spreads from community 0 to 1 with `diffusion_lag` weeks delay
struct SyntheticOptions {
  std::uint64_t seed = 20240713;
  Date start = Date{std::chrono::year{2021} / 1 / 4};
  int days = 840;
  std::vector<std::string> communities{"forum_a", "forum_b", "forum_c"};
  std::vector<double> posters_base{40.0, 30.0, 35.0};
  std::size_t entities = 50;
  std::size_t events = 8;
  int first_event_day = 470;
  int event_spacing = 42;
  std::vector<std::size_t> lifted_events{1, 4};
  double lift = 0.8;
  std::size_t driver_entity = 6;
  int driver_lag = 2;
  double driver_strength = 0.6;
  std::string diffusion_term = "zorblat";
  int diffusion_lag = 3;
};

struct SyntheticDataset {
  std::filesystem::path dir;
  std::filesystem::path config;
  std::vector<std::string> entity_names;
  std::vector<Date> event_dates;
  std::vector<std::string> lifted_event_names;
  std::string driver_entity;
};

/// Writes posts, news volume, entity series, events, stopwords and a
/// config.json into `dir`. Identical options give identical bytes.
SyntheticDataset write_synthetic_dataset(const std::filesystem::path& dir, const SyntheticOptions& options = {});

}  // namespace causal_pulse
