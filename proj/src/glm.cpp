#include "tarmos/glm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tarmos/errors.hpp"
#include "tarmos/stats.hpp"

namespace tarmos {

namespace {

constexpr double kIrlsTol = 1e-8;
constexpr int kIrlsMaxIter = 25;
constexpr double kDivergenceBound = 30.0;
constexpr double kNewtonTol = 1e-6;
constexpr int kNewtonMaxIter = 50;
constexpr double kAugmentWeight = 0.02;

void check_xy(const Matrix& x, const std::vector<double>& y) {
  if (x.rows() != y.size()) throw DataError("design matrix and response length differ");
  if (x.cols() == 0) throw DataError("design matrix has no columns");
}

std::vector<double> resolve_weights(const std::vector<double>& weights, std::size_t n) {
  if (weights.empty()) return std::vector<double>(n, 1.0);
  if (weights.size() != n) throw DataError("weight vector length mismatch");
  for (double w : weights) {
    if (!(w >= 0.0)) throw DataError("weights must be nonnegative");
  }
  return weights;
}

std::vector<double> column_means(const Matrix& x) {
  std::vector<double> m(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) m[j] += x(i, j);
  }
  for (auto& v : m) v /= static_cast<double>(x.rows());
  return m;
}

bool exploded(const std::vector<double>& beta) {
  for (double b : beta) {
    if (!std::isfinite(b) || std::abs(b) > kDivergenceBound) return true;
  }
  return false;
}

struct IrlsResult {
  std::vector<double> beta;
  Matrix cov;
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
};

IrlsResult run_irls(const Matrix& x, const std::vector<double>& y,
                    const std::vector<double>& offset, const std::vector<double>& w) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  IrlsResult res;
  res.beta.assign(p, 0.0);

  Matrix xw(n, p);
  std::vector<double> zw(n);
  for (int iter = 1; iter <= kIrlsMaxIter; ++iter) {
    res.iterations = iter;
    for (std::size_t i = 0; i < n; ++i) {
      double eta0 = 0.0;
      for (std::size_t j = 0; j < p; ++j) eta0 += x(i, j) * res.beta[j];
      double pr = expit(eta0 + offset[i]);
      double v = std::max(pr * (1.0 - pr), 1e-12);
      double sw = std::sqrt(w[i] * v);
      double z = eta0 + (y[i] - pr) / v;
      for (std::size_t j = 0; j < p; ++j) xw(i, j) = sw * x(i, j);
      zw[i] = sw * z;
    }
    QrDecomposition qr(xw);
    if (!qr.full_rank()) {
      throw NumericError("logistic fit: rank deficiency in design column " +
                         std::to_string(qr.deficient_column()));
    }
    std::vector<double> next = qr.solve(zw);
    if (exploded(next)) {
      res.beta = next;
      res.diverged = true;
      return res;
    }
    double delta = 0.0;
    for (std::size_t j = 0; j < p; ++j) delta = std::max(delta, std::abs(next[j] - res.beta[j]));
    res.beta = next;
    if (delta < kIrlsTol) {
      res.converged = true;
      res.cov = qr.xtx_inverse();
      return res;
    }
    if (iter == kIrlsMaxIter) res.cov = qr.xtx_inverse();
  }
  return res;
}

}  // namespace

LinearFit fit_ols(const Matrix& x, const std::vector<double>& y,
                  const std::vector<double>& weights) {
  check_xy(x, y);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n <= p) {
    throw DataError("least squares needs more rows than columns (n=" + std::to_string(n) +
                    ", p=" + std::to_string(p) + ")");
  }
  std::vector<double> w = resolve_weights(weights, n);

  Matrix xw = x;
  std::vector<double> yw = y;
  if (!weights.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      double sw = std::sqrt(w[i]);
      for (std::size_t j = 0; j < p; ++j) xw(i, j) *= sw;
      yw[i] *= sw;
    }
  }

  QrDecomposition qr(xw);
  if (!qr.full_rank()) {
    throw NumericError("least squares: rank deficiency in design column " +
                       std::to_string(qr.deficient_column()));
  }
  LinearFit fit;
  fit.beta = qr.solve(yw);
  fit.n_used = n;
  fit.nu = static_cast<double>(n - p);
  fit.sigma2_hat = qr.residual_ss(yw) / fit.nu;
  fit.xtx_inv = qr.xtx_inverse();
  return fit;
}

ParameterDraw draw_linear_params(const LinearFit& fit, RngStream& rng) {
  const std::size_t p = fit.beta.size();
  double g = rng.chisq(fit.nu);
  std::vector<double> z(p);
  for (auto& zi : z) zi = rng.normal();

  ParameterDraw draw;
  draw.sigma_star = std::sqrt(fit.sigma2_hat * fit.nu / g);
  Matrix l = cholesky(fit.xtx_inv);
  std::vector<double> lz = lower_triangular_times(l, z);
  draw.beta_star = fit.beta;
  for (std::size_t j = 0; j < p; ++j) draw.beta_star[j] += draw.sigma_star * lz[j];
  return draw;
}

LogisticFit fit_logistic(const Matrix& x, const std::vector<double>& y,
                         const std::vector<double>& offset,
                         const std::vector<double>& weights) {
  check_xy(x, y);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  for (double v : y) {
    if (v != 0.0 && v != 1.0) throw DataError("logistic response must be 0/1");
  }
  std::vector<double> off = offset.empty() ? std::vector<double>(n, 0.0) : offset;
  if (off.size() != n) throw DataError("offset length mismatch");
  for (double o : off) {
    if (!std::isfinite(o)) throw DataError("offset must be finite");
  }
  std::vector<double> w = resolve_weights(weights, n);

  IrlsResult res = run_irls(x, y, off, w);
  LogisticFit fit;
  if (!res.diverged) {
    fit.beta = res.beta;
    fit.cov = res.cov;
    fit.converged = res.converged;
    fit.iterations = res.iterations;
    return fit;
  }

  // Separation or runaway coefficients: append a pseudo-observation per
  // outcome level at the covariate means, weight 0.02 each, and refit.
  std::vector<double> means = column_means(x);
  Matrix xa(n + 2, p);
  std::vector<double> ya(n + 2), offa(n + 2), wa(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) xa(i, j) = x(i, j);
    ya[i] = y[i];
    offa[i] = off[i];
    wa[i] = w[i];
  }
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t j = 0; j < p; ++j) xa(n + k, j) = means[j];
    ya[n + k] = static_cast<double>(k);
    offa[n + k] = 0.0;
    wa[n + k] = kAugmentWeight;
  }
  IrlsResult aug = run_irls(xa, ya, offa, wa);
  if (aug.diverged) throw NumericError("logistic fit diverged even after augmentation");
  fit.beta = aug.beta;
  fit.cov = aug.cov;
  fit.converged = aug.converged;
  fit.iterations = aug.iterations;
  fit.augmented = true;
  return fit;
}

std::vector<double> linear_predictor(const Matrix& x, const std::vector<double>& beta,
                                     const std::vector<double>& offset) {
  std::vector<double> eta(x.rows(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double s = offset.empty() ? 0.0 : offset[i];
    for (std::size_t j = 0; j < x.cols(); ++j) s += x(i, j) * beta[j];
    eta[i] = s;
  }
  return eta;
}

double logistic_loglik(const Matrix& x, const std::vector<double>& y,
                       const std::vector<double>& beta, const std::vector<double>& offset,
                       const std::vector<double>& weights) {
  std::vector<double> w = resolve_weights(weights, x.rows());
  std::vector<double> eta = linear_predictor(x, beta, offset);
  double ll = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double log1pe = eta[i] > 0.0 ? eta[i] + std::log1p(std::exp(-eta[i]))
                                 : std::log1p(std::exp(eta[i]));
    ll += w[i] * (y[i] * eta[i] - log1pe);
  }
  return ll;
}

std::vector<double> logistic_score(const Matrix& x, const std::vector<double>& y,
                                   const std::vector<double>& beta,
                                   const std::vector<double>& offset,
                                   const std::vector<double>& weights) {
  std::vector<double> w = resolve_weights(weights, x.rows());
  std::vector<double> eta = linear_predictor(x, beta, offset);
  std::vector<double> g(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double resid = w[i] * (y[i] - expit(eta[i]));
    for (std::size_t j = 0; j < x.cols(); ++j) g[j] += x(i, j) * resid;
  }
  return g;
}

namespace {

double multinomial_loglik(const Matrix& x, const std::vector<double>& y,
                          const std::vector<double>& w, const Matrix& coef) {
  const std::size_t km1 = coef.rows();
  double ll = 0.0;
  std::vector<double> eta(km1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double emax = 0.0;
    for (std::size_t k = 0; k < km1; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < x.cols(); ++j) s += coef(k, j) * x(i, j);
      eta[k] = s;
      emax = std::max(emax, s);
    }
    double denom = std::exp(-emax);
    for (std::size_t k = 0; k < km1; ++k) denom += std::exp(eta[k] - emax);
    double log_denom = emax + std::log(denom);
    auto level = static_cast<std::size_t>(y[i]);
    double eta_y = level == 0 ? 0.0 : eta[level - 1];
    ll += w[i] * (eta_y - log_denom);
  }
  return ll;
}

struct NewtonResult {
  Matrix coef;
  Matrix cov;
  bool converged = false;
  bool diverged = false;
  int iterations = 0;
};

NewtonResult run_multinomial_newton(const Matrix& x, const std::vector<double>& y,
                                    std::size_t n_levels, const std::vector<double>& w) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const std::size_t km1 = n_levels - 1;
  const std::size_t dim = km1 * p;

  NewtonResult res;
  res.coef = Matrix(km1, p, 0.0);

  std::vector<double> probs(n_levels);
  std::vector<double> grad(dim);
  Matrix info(dim, dim);
  double ll = multinomial_loglik(x, y, w, res.coef);

  for (int iter = 1; iter <= kNewtonMaxIter; ++iter) {
    res.iterations = iter;
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(info.data().begin(), info.data().end(), 0.0);

    for (std::size_t i = 0; i < n; ++i) {
      probs = multinomial_probs(x, i, res.coef);
      auto level = static_cast<std::size_t>(y[i]);
      for (std::size_t k = 0; k < km1; ++k) {
        double rk = w[i] * ((level == k + 1 ? 1.0 : 0.0) - probs[k + 1]);
        for (std::size_t a = 0; a < p; ++a) grad[k * p + a] += rk * x(i, a);
        for (std::size_t l = k; l < km1; ++l) {
          // Fisher information block (k,l): p_k (delta_kl - p_l) x x'.
          double scale = w[i] * probs[k + 1] * ((k == l ? 1.0 : 0.0) - probs[l + 1]);
          for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = 0; b < p; ++b) {
              info(k * p + a, l * p + b) += scale * x(i, a) * x(i, b);
            }
          }
        }
      }
    }
    // Mirror the upper block triangle.
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = r + 1; c < dim; ++c) info(c, r) = info(r, c);
    }

    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax < kNewtonTol) {
      res.converged = true;
      res.cov = invert_spd(info);
      return res;
    }

    std::vector<double> step = solve_spd(info, grad);
    // Backtrack if the full Newton step lowers the log-likelihood.
    double scale = 1.0;
    Matrix trial = res.coef;
    for (int half = 0; half < 12; ++half) {
      for (std::size_t k = 0; k < km1; ++k) {
        for (std::size_t a = 0; a < p; ++a) {
          trial(k, a) = res.coef(k, a) + scale * step[k * p + a];
        }
      }
      double trial_ll = multinomial_loglik(x, y, w, trial);
      if (trial_ll >= ll - 1e-12 || half == 11) {
        res.coef = trial;
        ll = trial_ll;
        break;
      }
      scale *= 0.5;
    }

    for (std::size_t k = 0; k < km1; ++k) {
      for (std::size_t a = 0; a < p; ++a) {
        if (!std::isfinite(res.coef(k, a)) || std::abs(res.coef(k, a)) > kDivergenceBound) {
          res.diverged = true;
          return res;
        }
      }
    }
  }
  res.cov = Matrix(dim, dim, 0.0);
  return res;
}

}  // namespace

std::vector<double> multinomial_probs(const Matrix& x, std::size_t row, const Matrix& coef) {
  const std::size_t km1 = coef.rows();
  std::vector<double> eta(km1);
  double emax = 0.0;
  for (std::size_t k = 0; k < km1; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) s += coef(k, j) * x(row, j);
    eta[k] = s;
    emax = std::max(emax, s);
  }
  std::vector<double> probs(km1 + 1);
  double denom = std::exp(-emax);
  probs[0] = std::exp(-emax);
  for (std::size_t k = 0; k < km1; ++k) {
    probs[k + 1] = std::exp(eta[k] - emax);
    denom += probs[k + 1];
  }
  for (auto& v : probs) v /= denom;
  return probs;
}

MultinomialFit fit_multinomial(const Matrix& x, const std::vector<double>& y,
                               std::size_t n_levels, const std::vector<double>& weights) {
  check_xy(x, y);
  if (n_levels < 2) throw DataError("multinomial fit needs at least 2 levels");
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  std::vector<double> w = resolve_weights(weights, n);
  std::vector<std::size_t> level_count(n_levels, 0);
  for (double v : y) {
    if (v != std::floor(v) || v < 0.0 || v >= static_cast<double>(n_levels)) {
      throw DataError("multinomial response outside declared levels");
    }
    ++level_count[static_cast<std::size_t>(v)];
  }

  bool needs_augment =
      std::any_of(level_count.begin(), level_count.end(), [](std::size_t c) { return c == 0; });

  MultinomialFit fit;
  fit.n_levels = n_levels;
  if (!needs_augment) {
    NewtonResult res = run_multinomial_newton(x, y, n_levels, w);
    if (!res.diverged) {
      fit.coef = res.coef;
      fit.cov = res.cov;
      fit.converged = res.converged;
      fit.iterations = res.iterations;
      return fit;
    }
  }

  std::vector<double> means = column_means(x);
  Matrix xa(n + n_levels, p);
  std::vector<double> ya(n + n_levels), wa(n + n_levels);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) xa(i, j) = x(i, j);
    ya[i] = y[i];
    wa[i] = w[i];
  }
  for (std::size_t k = 0; k < n_levels; ++k) {
    for (std::size_t j = 0; j < p; ++j) xa(n + k, j) = means[j];
    ya[n + k] = static_cast<double>(k);
    wa[n + k] = kAugmentWeight;
  }
  NewtonResult res = run_multinomial_newton(xa, ya, n_levels, wa);
  if (res.diverged) throw NumericError("multinomial fit diverged even after augmentation");
  fit.coef = res.coef;
  fit.cov = res.cov;
  fit.converged = res.converged;
  fit.iterations = res.iterations;
  fit.augmented = true;
  return fit;
}

std::vector<double> draw_mvn(const std::vector<double>& center, const Matrix& cov,
                             RngStream& rng) {
  const std::size_t p = center.size();
  std::vector<double> z(p);
  for (auto& zi : z) zi = rng.normal();

  Matrix l;
  try {
    l = cholesky(cov);
  } catch (const NumericError&) {
    // Tiny negative eigenvalues from roundoff: retry with a small jitter.
    Matrix jittered = cov;
    double dmax = 0.0;
    for (std::size_t j = 0; j < p; ++j) dmax = std::max(dmax, std::abs(cov(j, j)));
    for (std::size_t j = 0; j < p; ++j) jittered(j, j) += 1e-10 * std::max(dmax, 1.0);
    l = cholesky(jittered);
  }
  std::vector<double> lz = lower_triangular_times(l, z);
  std::vector<double> out = center;
  for (std::size_t j = 0; j < p; ++j) out[j] += lz[j];
  return out;
}

double auc(const std::vector<double>& scores, const std::vector<double>& labels) {
  if (scores.size() != labels.size()) throw DataError("auc: length mismatch");
  std::size_t n_pos = 0, n_neg = 0;
  for (double l : labels) {
    if (l == 1.0) ++n_pos;
    else if (l == 0.0) ++n_neg;
    else throw DataError("auc: labels must be 0/1");
  }
  if (n_pos == 0 || n_neg == 0) throw DataError("auc: both label classes required");

  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks over ties, accumulate the positive-class rank sum.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1.0) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }
  double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

}  // namespace tarmos
