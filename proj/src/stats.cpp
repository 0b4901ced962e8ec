#include "tarmos/stats.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "tarmos/errors.hpp"

namespace tarmos {

double expit(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw NumericError("logit: argument outside (0,1)");
  return std::log(p / (1.0 - p));
}

double t_cdf(double x, double df) {
  if (!std::isfinite(df)) {
    boost::math::normal_distribution<double> n;
    return boost::math::cdf(n, x);
  }
  boost::math::students_t_distribution<double> t(df);
  return boost::math::cdf(t, x);
}

double t_quantile(double p, double df) {
  if (!std::isfinite(df)) return normal_quantile(p);
  boost::math::students_t_distribution<double> t(df);
  return boost::math::quantile(t, p);
}

double normal_quantile(double p) {
  boost::math::normal_distribution<double> n;
  return boost::math::quantile(n, p);
}

double two_sided_p(double z, double df) {
  double a = std::abs(z);
  return 2.0 * (1.0 - t_cdf(a, df));
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw NumericError("mean of empty vector");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw NumericError("sample variance needs at least 2 values");
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double median(std::vector<double> v) { return quantile_type7(std::move(v), 0.5); }

double quantile_type7(std::vector<double> v, double p) {
  if (v.empty()) throw NumericError("quantile of empty vector");
  if (p < 0.0 || p > 1.0) throw NumericError("quantile probability outside [0,1]");
  std::sort(v.begin(), v.end());
  double h = (static_cast<double>(v.size()) - 1.0) * p;
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = static_cast<std::size_t>(std::ceil(h));
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace tarmos
