#include "causal_pulse/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "causal_pulse/report.hpp"

namespace causal_pulse {
namespace {

constexpr double kWidth = 720.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 16.0;
constexpr double kTopY = 40.0;
constexpr double kTopH = 220.0;
constexpr double kBottomY = 300.0;
constexpr double kBottomH = 120.0;
constexpr double kHeight = 460.0;

struct Point {
  double x;
  double y;
};

struct Scale {
  double lo;
  double hi;
  double top;
  double height;
  double operator()(double v) const { return top + height * (1.0 - (v - lo) / (hi - lo)); }
};

Scale make_scale(std::vector<double> values, double top, double height, bool include_zero) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (include_zero) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad, top, height};
}

std::string polyline(const std::vector<Point>& pts, const std::string& style) {
  std::string d;
  for (const auto& p : pts) d += fmt::format("{}{:.2f},{:.2f}", d.empty() ? "" : " ", p.x, p.y);
  return fmt::format("<polyline fill=\"none\" {} points=\"{}\"/>\n", style, d);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string impact_svg(const ImpactResult& r, const std::string& title) {
  const auto n_pre = static_cast<std::size_t>(r.pre_observed.size());
  const auto n_post = static_cast<std::size_t>(r.observed.size());
  const std::size_t n = n_pre + n_post;
  const double step = n > 1 ? (kWidth - kLeft - kRight) / static_cast<double>(n - 1) : 0.0;
  auto x_at = [&](std::size_t i) { return kLeft + step * static_cast<double>(i); };

  std::vector<double> top_values;
  std::vector<double> diff_values;
  for (std::size_t i = 0; i < n_pre; ++i) {
    top_values.push_back(r.pre_observed(static_cast<Eigen::Index>(i)));
    top_values.push_back(r.pre_fitted(static_cast<Eigen::Index>(i)));
  }
  for (std::size_t i = 0; i < n_post; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    top_values.insert(top_values.end(), {r.observed(k), r.forecast(k), r.lower(k), r.upper(k)});
    diff_values.insert(diff_values.end(), {r.observed(k) - r.forecast(k), r.observed(k) - r.lower(k),
                                           r.observed(k) - r.upper(k)});
  }
  const Scale ty = make_scale(top_values, kTopY, kTopH, false);
  const Scale by = make_scale(diff_values, kBottomY, kBottomH, true);

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      kWidth, kHeight, kWidth, kHeight);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += fmt::format("<text x=\"{:.0f}\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n", kLeft,
                     escape(title));

  // Prediction band over the post period, both panels.
  if (n_post > 0) {
    std::string band;
    for (std::size_t i = 0; i < n_post; ++i) {
      band += fmt::format("{:.2f},{:.2f} ", x_at(n_pre + i), ty(r.upper(static_cast<Eigen::Index>(i))));
    }
    for (std::size_t i = n_post; i-- > 0;) {
      band += fmt::format("{:.2f},{:.2f} ", x_at(n_pre + i), ty(r.lower(static_cast<Eigen::Index>(i))));
    }
    band.pop_back();
    svg += fmt::format("<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" points=\"{}\"/>\n", band);
    std::string dband;
    for (std::size_t i = 0; i < n_post; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      dband += fmt::format("{:.2f},{:.2f} ", x_at(n_pre + i), by(r.observed(k) - r.lower(k)));
    }
    for (std::size_t i = n_post; i-- > 0;) {
      const auto k = static_cast<Eigen::Index>(i);
      dband += fmt::format("{:.2f},{:.2f} ", x_at(n_pre + i), by(r.observed(k) - r.upper(k)));
    }
    dband.pop_back();
    svg += fmt::format("<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" points=\"{}\"/>\n", dband);
    const double xe = x_at(n_pre);
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n",
                       xe, kTopY, xe, kBottomY + kBottomH);
  }

  std::vector<Point> observed;
  std::vector<Point> fitted;
  std::vector<Point> diff;
  for (std::size_t i = 0; i < n_pre; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    observed.push_back({x_at(i), ty(r.pre_observed(k))});
    fitted.push_back({x_at(i), ty(r.pre_fitted(k))});
    diff.push_back({x_at(i), by(r.pre_observed(k) - r.pre_fitted(k))});
  }
  for (std::size_t i = 0; i < n_post; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    observed.push_back({x_at(n_pre + i), ty(r.observed(k))});
    fitted.push_back({x_at(n_pre + i), ty(r.forecast(k))});
    diff.push_back({x_at(n_pre + i), by(r.observed(k) - r.forecast(k))});
  }
  svg += polyline(fitted, "stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"5 3\"");
  svg += polyline(observed, "stroke=\"#1f1f1f\" stroke-width=\"1.5\"");
  svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#444\"/>\n", kLeft, by(0.0),
                     kWidth - kRight, by(0.0));
  svg += polyline(diff, "stroke=\"#1f77b4\" stroke-width=\"1.5\"");

  for (const auto& [s, label] : {std::pair{ty, "value"}, std::pair{by, "difference"}}) {
    svg += fmt::format("<text x=\"4\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\n", s.top + 10.0,
                       format_number(s.hi));
    svg += fmt::format("<text x=\"4\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\n",
                       s.top + s.height, format_number(s.lo));
    svg += fmt::format("<text x=\"4\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#666\">{}</text>\n",
                       s.top + s.height / 2.0, label);
  }
  if (n > 0) {
    const Date first = n_pre > 0 ? r.pre_dates.front() : r.post_dates.front();
    const Date last = n_post > 0 ? r.post_dates.back() : r.pre_dates.back();
    svg += fmt::format("<text x=\"{:.0f}\" y=\"{:.0f}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>\n", kLeft,
                       kHeight - 12.0, format_date(first));
    svg += fmt::format(
        "<text x=\"{:.0f}\" y=\"{:.0f}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
        kWidth - kRight, kHeight - 12.0, format_date(last));
  }
  svg += "</svg>\n";
  return svg;
}

std::string impact_plot_csv(const ImpactResult& r) {
  std::string out = "date,phase,observed,forecast,lower,upper,difference\n";
  for (Eigen::Index i = 0; i < r.pre_observed.size(); ++i) {
    out += fmt::format("{},pre,{},{},,,{}\n", format_date(r.pre_dates[static_cast<std::size_t>(i)]),
                       format_number(r.pre_observed(i)), format_number(r.pre_fitted(i)),
                       format_number(r.pre_observed(i) - r.pre_fitted(i)));
  }
  for (Eigen::Index i = 0; i < r.observed.size(); ++i) {
    out += fmt::format("{},post,{},{},{},{},{}\n", format_date(r.post_dates[static_cast<std::size_t>(i)]),
                       format_number(r.observed(i)), format_number(r.forecast(i)), format_number(r.lower(i)),
                       format_number(r.upper(i)), format_number(r.observed(i) - r.forecast(i)));
  }
  return out;
}

}  // namespace causal_pulse
