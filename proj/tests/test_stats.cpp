#include <doctest.h>

#include <cmath>
#include <limits>

#include "tarmos/errors.hpp"
#include "tarmos/stats.hpp"

using namespace tarmos;

TEST_CASE("expit and logit invert each other") {
  for (double x : {-8.0, -1.0, 0.0, 0.3, 5.0}) {
    CHECK(logit(expit(x)) == doctest::Approx(x).epsilon(1e-10));
  }
  CHECK(expit(0.0) == 0.5);
  CHECK(expit(40.0) == doctest::Approx(1.0));
  CHECK(expit(-40.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(logit(0.0), NumericError);
}

TEST_CASE("t quantiles against reference values") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(t_quantile(0.975, inf) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(t_quantile(0.975, 5.0) == doctest::Approx(2.570581835636197).epsilon(1e-12));
  CHECK(t_quantile(0.5, 7.0) == doctest::Approx(0.0));
  CHECK(t_cdf(0.0, 3.0) == doctest::Approx(0.5));
  // Round trip.
  CHECK(t_cdf(t_quantile(0.9, 12.0), 12.0) == doctest::Approx(0.9).epsilon(1e-10));
}

TEST_CASE("two-sided p is symmetric and calibrated") {
  CHECK(two_sided_p(0.0, 10.0) == doctest::Approx(1.0));
  CHECK(two_sided_p(1.5, 10.0) == doctest::Approx(two_sided_p(-1.5, 10.0)));
  double z = t_quantile(0.975, 20.0);
  CHECK(two_sided_p(z, 20.0) == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("summary statistics on hand cases") {
  std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(mean(v) == doctest::Approx(2.5));
  CHECK(sample_variance(v) == doctest::Approx(5.0 / 3.0));
  CHECK(median(v) == doctest::Approx(2.5));
  CHECK(quantile_type7(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile_type7(v, 1.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(mean(std::vector<double>{}), NumericError);
  CHECK_THROWS_AS(sample_variance(std::vector<double>{1.0}), NumericError);
}
