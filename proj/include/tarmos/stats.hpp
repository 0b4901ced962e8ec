#ifndef TARMOS_STATS_HPP
#define TARMOS_STATS_HPP

#include <vector>

namespace tarmos {

double expit(double x);
double logit(double p);

// Student-t distribution helpers.  df = infinity falls back to the normal.
double t_cdf(double x, double df);
double t_quantile(double p, double df);
double normal_quantile(double p);

// Two-sided p-value for statistic z against t(df).
double two_sided_p(double z, double df);

double mean(const std::vector<double>& v);
// Unbiased sample variance (divides by n-1); requires n >= 2.
double sample_variance(const std::vector<double>& v);
double median(std::vector<double> v);
// Linear-interpolation quantile on a copy of the data (type 7).
double quantile_type7(std::vector<double> v, double p);

}  // namespace tarmos

#endif
