#pragma once

namespace causal_pulse::dist {

double normal_cdf(double x);
double normal_quantile(double p);
/// Upper tail P(F > x) of the F(d1, d2) distribution.
double f_sf(double x, double d1, double d2);
/// Upper tail P(X > x) of the chi-square(df) distribution.
double chi2_sf(double x, double df);
/// Two-sided P(|T| > |t|) for Student's t with df degrees of freedom.
double t_two_sided(double t, double df);

}  // namespace causal_pulse::dist
