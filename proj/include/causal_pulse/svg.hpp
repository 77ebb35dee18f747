#pragma once

#include <string>

#include "causal_pulse/impact.hpp"

namespace causal_pulse {

/// Two-panel plot: observed against counterfactual forecast with the
/// post-period prediction band (top) and the pointwise difference (bottom).
/// Output depends only on the inputs.
std::string impact_svg(const ImpactResult& result, const std::string& title);

/// Plot data: date, phase, observed, forecast, lower, upper, difference.
std::string impact_plot_csv(const ImpactResult& result);

}  // namespace causal_pulse
