#ifndef TARMOS_GLM_HPP
#define TARMOS_GLM_HPP

#include <cstddef>
#include <vector>

#include "tarmos/linalg.hpp"
#include "tarmos/rng.hpp"

namespace tarmos {

struct LinearFit {
  std::vector<double> beta;
  double sigma2_hat = 0.0;
  Matrix xtx_inv;       // unscaled coefficient covariance factor
  double nu = 0.0;      // residual degrees of freedom (n_used - p)
  std::size_t n_used = 0;
};

struct ParameterDraw {
  std::vector<double> beta_star;
  double sigma_star = 0.0;
};

struct LogisticFit {
  std::vector<double> beta;
  Matrix cov;  // inverse observed information
  bool converged = false;
  int iterations = 0;
  bool augmented = false;
};

struct MultinomialFit {
  std::size_t n_levels = 0;
  Matrix coef;  // (K-1) x p, baseline = first level
  Matrix cov;   // ((K-1)p) x ((K-1)p)
  bool converged = false;
  int iterations = 0;
  bool augmented = false;
};

// Ordinary (optionally weighted) least squares through a pivoted
// Householder QR; never forms normal equations.
LinearFit fit_ols(const Matrix& x, const std::vector<double>& y,
                  const std::vector<double>& weights = {});

// Proper-imputation draw: sigma_star^2 = sigma2_hat * nu / chisq(nu),
// beta_star ~ N(beta, sigma_star^2 * xtx_inv).  Always consumes the same
// number of variates regardless of the fit's values.
ParameterDraw draw_linear_params(const LinearFit& fit, RngStream& rng);

// Logistic regression by IRLS.  The offset enters the linear predictor with
// coefficient fixed at 1.  On divergence or separation the fit is repeated
// with per-level pseudo-observations at the covariate means (weight 0.02
// per level) and `augmented` is set.
LogisticFit fit_logistic(const Matrix& x, const std::vector<double>& y,
                         const std::vector<double>& offset = {},
                         const std::vector<double>& weights = {});

// Multinomial (baseline-category) logistic regression by Newton iterations.
MultinomialFit fit_multinomial(const Matrix& x, const std::vector<double>& y,
                               std::size_t n_levels,
                               const std::vector<double>& weights = {});

// Draw from the asymptotic normal N(center, cov).
std::vector<double> draw_mvn(const std::vector<double>& center, const Matrix& cov,
                             RngStream& rng);

// Mann-Whitney AUC with ties counted one half.
double auc(const std::vector<double>& scores, const std::vector<double>& labels);

// Exposed for gradient checks in tests and for diagnostics.
double logistic_loglik(const Matrix& x, const std::vector<double>& y,
                       const std::vector<double>& beta,
                       const std::vector<double>& offset = {},
                       const std::vector<double>& weights = {});
std::vector<double> logistic_score(const Matrix& x, const std::vector<double>& y,
                                   const std::vector<double>& beta,
                                   const std::vector<double>& offset = {},
                                   const std::vector<double>& weights = {});

// Row-wise category probabilities under a multinomial coefficient matrix.
std::vector<double> multinomial_probs(const Matrix& x, std::size_t row, const Matrix& coef);

std::vector<double> linear_predictor(const Matrix& x, const std::vector<double>& beta,
                                     const std::vector<double>& offset = {});

}  // namespace tarmos

#endif
