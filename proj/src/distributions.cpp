#include "causal_pulse/distributions.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

namespace causal_pulse::dist {

namespace bm = boost::math;

double normal_cdf(double x) { return bm::cdf(bm::normal_distribution<>(), x); }

double normal_quantile(double p) { return bm::quantile(bm::normal_distribution<>(), p); }

double f_sf(double x, double d1, double d2) {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return bm::cdf(bm::complement(bm::fisher_f_distribution<>(d1, d2), x));
}

double chi2_sf(double x, double df) {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  return bm::cdf(bm::complement(bm::chi_squared_distribution<>(df), x));
}

double t_two_sided(double t, double df) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  return 2.0 * bm::cdf(bm::complement(bm::students_t_distribution<>(df), std::fabs(t)));
}

}  // namespace causal_pulse::dist
