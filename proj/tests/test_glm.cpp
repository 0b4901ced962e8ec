#include <doctest.h>

#include <cmath>
#include <vector>

#include "tarmos/errors.hpp"
#include "tarmos/glm.hpp"
#include "tarmos/rng.hpp"
#include "tarmos/stats.hpp"

using namespace tarmos;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix x(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) x(i, j) = rows[i][j];
  }
  return x;
}

}  // namespace

TEST_CASE("ols recovers an exact linear relationship") {
  Matrix x = from_rows({{1, 1}, {1, 2}, {1, 3}});
  LinearFit fit = fit_ols(x, {1, 2, 3});
  CHECK(fit.beta[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fit.beta[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.sigma2_hat == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fit.nu == 1.0);
  CHECK(fit.n_used == 3);
}

TEST_CASE("ols solves the hand-derived two-parameter system") {
  // Rows (1,0)->1 and (1,1)->3 pin down intercept 1 and slope 2; the
  // duplicated third row keeps the residual degrees of freedom positive.
  Matrix x = from_rows({{1, 0}, {1, 1}, {1, 1}});
  LinearFit fit = fit_ols(x, {1, 3, 3});
  CHECK(fit.beta[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.beta[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("ols rejects deficient or undersized problems") {
  Matrix dup = from_rows({{1, 2, 2}, {1, 3, 3}, {1, 4, 4}, {1, 5, 5}});
  CHECK_THROWS_AS(fit_ols(dup, {1, 2, 3, 4}), NumericError);

  Matrix square = from_rows({{1, 0}, {1, 1}});
  CHECK_THROWS_AS(fit_ols(square, {1, 3}), DataError);
}

TEST_CASE("weighted ols matches replicated rows") {
  Matrix x3 = from_rows({{1, 0}, {1, 1}, {1, 1}});
  LinearFit replicated = fit_ols(x3, {1, 3, 3});
  Matrix x2 = from_rows({{1, 0}, {1, 1}});
  // Weight 2 on the second row should reproduce the replicated solution.
  // (n<=p guard still applies, so compare against a 3-row weighted fit.)
  Matrix xw = from_rows({{1, 0}, {1, 1}, {1, 1}});
  LinearFit weighted = fit_ols(xw, {1, 3, 3}, {1.0, 1.5, 0.5});
  CHECK(weighted.beta[0] == doctest::Approx(replicated.beta[0]).epsilon(1e-10));
  CHECK(weighted.beta[1] == doctest::Approx(replicated.beta[1]).epsilon(1e-10));
  (void)x2;
}

TEST_CASE("draw_linear_params degenerate and deterministic cases") {
  Matrix x = from_rows({{1, 1}, {1, 2}, {1, 3}});
  LinearFit fit = fit_ols(x, {1, 2, 3});  // sigma2_hat = 0

  RngStream rng(5);
  ParameterDraw draw = draw_linear_params(fit, rng);
  CHECK(draw.sigma_star == 0.0);
  CHECK(draw.beta_star[0] == fit.beta[0]);
  CHECK(draw.beta_star[1] == fit.beta[1]);

  RngStream a(99), b(99);
  LinearFit noisy = fit_ols(x, {1.0, 2.5, 2.9});
  ParameterDraw da = draw_linear_params(noisy, a);
  ParameterDraw db = draw_linear_params(noisy, b);
  CHECK(da.sigma_star == db.sigma_star);
  CHECK(da.beta_star == db.beta_star);
}

TEST_CASE("sigma_star squared has the inverse-chi-square mean") {
  // Build a fit with nu = 50 and known sigma2_hat.
  const std::size_t n = 52, p = 2;
  RngStream gen(7);
  Matrix x(n, p);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = gen.normal();
    y[i] = 2.0 + 0.5 * x(i, 1) + gen.normal();
  }
  LinearFit fit = fit_ols(x, y);
  REQUIRE(fit.nu == 50.0);

  RngStream rng(11);
  double sum = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    ParameterDraw d = draw_linear_params(fit, rng);
    sum += d.sigma_star * d.sigma_star;
  }
  double expected = fit.sigma2_hat * fit.nu / (fit.nu - 2.0);
  CHECK(sum / draws == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("logistic intercept equals the empirical logit") {
  Matrix x(8, 1, 1.0);
  std::vector<double> y{0, 1, 0, 1, 0, 1, 0, 1};
  LogisticFit fit = fit_logistic(x, y);
  CHECK(fit.converged);
  CHECK_FALSE(fit.augmented);
  CHECK(fit.beta[0] == doctest::Approx(0.0).epsilon(1e-8));

  std::vector<double> y2{0, 0, 0, 1, 1, 1, 1, 1};
  LogisticFit fit2 = fit_logistic(x, y2);
  CHECK(fit2.beta[0] == doctest::Approx(logit(5.0 / 8.0)).epsilon(1e-8));
}

TEST_CASE("perfect separation falls back to an augmented finite fit") {
  Matrix x = from_rows({{1, -2}, {1, -1}, {1, 1}, {1, 2}});
  std::vector<double> y{0, 0, 1, 1};
  LogisticFit fit = fit_logistic(x, y);
  CHECK(fit.augmented);
  for (double b : fit.beta) CHECK(std::isfinite(b));
  CHECK(fit.beta[1] > 0.0);
}

TEST_CASE("single-class response is handled through augmentation") {
  Matrix x(6, 1, 1.0);
  LogisticFit fit = fit_logistic(x, std::vector<double>(6, 1.0));
  CHECK(fit.augmented);
  CHECK(std::isfinite(fit.beta[0]));
  CHECK(fit.beta[0] > 0.0);
}

TEST_CASE("offset shifts the intercept by its negative") {
  Matrix x(10, 1, 1.0);
  std::vector<double> y{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  std::vector<double> offset(10, 10.0);
  LogisticFit fit = fit_logistic(x, y, offset);
  CHECK(fit.converged);
  CHECK(fit.beta[0] == doctest::Approx(-10.0).epsilon(1e-6));
}

TEST_CASE("logistic rejects a non-binary response") {
  Matrix x(3, 1, 1.0);
  CHECK_THROWS_AS(fit_logistic(x, {0, 1, 2}), DataError);
}

TEST_CASE("score vanishes at the fitted coefficients") {
  RngStream rng(21);
  Matrix x(40, 3);
  std::vector<double> y(40);
  for (std::size_t i = 0; i < 40; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.normal();
    x(i, 2) = rng.normal();
    y[i] = rng.uniform01() < expit(0.3 + 0.8 * x(i, 1) - 0.5 * x(i, 2)) ? 1.0 : 0.0;
  }
  LogisticFit fit = fit_logistic(x, y);
  REQUIRE(fit.converged);
  auto score = logistic_score(x, y, fit.beta);
  for (double g : score) CHECK(std::abs(g) < 1e-6);
}

TEST_CASE("log-likelihood gradient matches central finite differences") {
  RngStream rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix x(12, 3);
    std::vector<double> y(12), offset(12);
    for (std::size_t i = 0; i < 12; ++i) {
      x(i, 0) = 1.0;
      x(i, 1) = rng.normal();
      x(i, 2) = rng.normal();
      offset[i] = 0.2 * rng.normal();
      y[i] = rng.uniform01() < 0.5 ? 1.0 : 0.0;
    }
    std::vector<double> beta{rng.normal() * 0.5, rng.normal() * 0.5, rng.normal() * 0.5};
    auto grad = logistic_score(x, y, beta, offset);
    const double h = 1e-5;
    for (std::size_t j = 0; j < 3; ++j) {
      auto up = beta, dn = beta;
      up[j] += h;
      dn[j] -= h;
      double fd = (logistic_loglik(x, y, up, offset) - logistic_loglik(x, y, dn, offset)) /
                  (2.0 * h);
      CHECK(grad[j] == doctest::Approx(fd).epsilon(1e-4));
    }
  }
}

TEST_CASE("multinomial with two levels reduces to logistic") {
  RngStream rng(31);
  Matrix x(60, 2);
  std::vector<double> y(60);
  for (std::size_t i = 0; i < 60; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.normal();
    y[i] = rng.uniform01() < expit(0.4 - 0.7 * x(i, 1)) ? 1.0 : 0.0;
  }
  LogisticFit lfit = fit_logistic(x, y);
  MultinomialFit mfit = fit_multinomial(x, y, 2);
  REQUIRE(mfit.converged);
  CHECK(mfit.coef(0, 0) == doctest::Approx(lfit.beta[0]).epsilon(1e-6));
  CHECK(mfit.coef(0, 1) == doctest::Approx(lfit.beta[1]).epsilon(1e-6));
}

TEST_CASE("multinomial intercepts follow the closed-form log ratios") {
  // Level proportions 0.5 / 0.3 / 0.2 over 100 rows.
  Matrix x(100, 1, 1.0);
  std::vector<double> y;
  for (int i = 0; i < 50; ++i) y.push_back(0);
  for (int i = 0; i < 30; ++i) y.push_back(1);
  for (int i = 0; i < 20; ++i) y.push_back(2);
  MultinomialFit fit = fit_multinomial(x, y, 3);
  REQUIRE(fit.converged);
  CHECK(fit.coef(0, 0) == doctest::Approx(std::log(0.3 / 0.5)).epsilon(1e-6));
  CHECK(fit.coef(1, 0) == doctest::Approx(std::log(0.2 / 0.5)).epsilon(1e-6));
}

TEST_CASE("multinomial probabilities sum to one") {
  RngStream rng(33);
  Matrix x(80, 2);
  std::vector<double> y(80);
  for (std::size_t i = 0; i < 80; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.normal();
    y[i] = static_cast<double>(rng.uniform_index(3));
  }
  MultinomialFit fit = fit_multinomial(x, y, 3);
  for (std::size_t i = 0; i < 80; ++i) {
    auto probs = multinomial_probs(x, i, fit.coef);
    double sum = 0.0;
    for (double p : probs) sum += p;
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
}

TEST_CASE("level permutation permutes fitted probabilities") {
  RngStream rng(34);
  Matrix x(90, 2);
  std::vector<double> y(90), y_swapped(90);
  for (std::size_t i = 0; i < 90; ++i) {
    x(i, 0) = 1.0;
    x(i, 1) = rng.normal();
    y[i] = static_cast<double>(rng.uniform_index(3));
    // Swap levels 1 and 2.
    y_swapped[i] = y[i] == 1.0 ? 2.0 : (y[i] == 2.0 ? 1.0 : 0.0);
  }
  MultinomialFit a = fit_multinomial(x, y, 3);
  MultinomialFit b = fit_multinomial(x, y_swapped, 3);
  for (std::size_t i = 0; i < 5; ++i) {
    auto pa = multinomial_probs(x, i, a.coef);
    auto pb = multinomial_probs(x, i, b.coef);
    CHECK(pa[0] == doctest::Approx(pb[0]).epsilon(1e-6));
    CHECK(pa[1] == doctest::Approx(pb[2]).epsilon(1e-6));
    CHECK(pa[2] == doctest::Approx(pb[1]).epsilon(1e-6));
  }
}

TEST_CASE("multinomial engages augmentation for an empty level") {
  Matrix x(30, 1, 1.0);
  std::vector<double> y(30, 0.0);
  for (int i = 0; i < 10; ++i) y[i] = 1.0;  // level 2 absent
  MultinomialFit fit = fit_multinomial(x, y, 3);
  CHECK(fit.augmented);
  for (std::size_t k = 0; k < 2; ++k) CHECK(std::isfinite(fit.coef(k, 0)));
}

TEST_CASE("auc hand cases") {
  CHECK(auc({0, 1, 0, 1}, {0, 1, 0, 1}) == doctest::Approx(1.0));
  CHECK(auc({3, 3, 3, 3}, {0, 1, 0, 1}) == doctest::Approx(0.5));
  CHECK(auc({1, 2, 3, 4}, {0, 1, 0, 1}) == doctest::Approx(0.75));
  CHECK_THROWS_AS(auc({1, 2}, {1, 1}), DataError);
}

TEST_CASE("auc is invariant to strictly increasing transforms") {
  RngStream rng(41);
  std::vector<double> scores(50), labels(50), transformed(50);
  for (std::size_t i = 0; i < 50; ++i) {
    scores[i] = rng.normal();
    labels[i] = rng.uniform01() < 0.4 ? 1.0 : 0.0;
    transformed[i] = std::exp(2.0 * scores[i]) + 3.0;
  }
  labels[0] = 1.0;
  labels[1] = 0.0;
  CHECK(auc(scores, labels) == doctest::Approx(auc(transformed, labels)).epsilon(1e-12));
}
