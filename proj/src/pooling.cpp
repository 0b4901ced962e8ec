#include "tarmos/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tarmos/design.hpp"
#include "tarmos/errors.hpp"
#include "tarmos/glm.hpp"
#include "tarmos/stats.hpp"

namespace tarmos {

namespace {

void finish_interval(PooledResult& r) {
  double se = std::sqrt(r.t);
  if (se == 0.0) {
    r.ci_low = r.ci_high = r.q_bar;
    r.p = r.q_bar == 0.0 ? 1.0 : 0.0;
    return;
  }
  double q = t_quantile(0.975, r.df);
  r.ci_low = r.q_bar - q * se;
  r.ci_high = r.q_bar + q * se;
  r.p = two_sided_p(r.q_bar / se, r.df);
}

}  // namespace

std::vector<std::string> AnalysisModelSpec::model_vars() const {
  std::vector<std::string> vars{outcome, exposure};
  vars.insert(vars.end(), covariates.begin(), covariates.end());
  return vars;
}

void AnalysisModelSpec::validate(const Dataset& d) const {
  for (const auto& v : model_vars()) d.column_index(v);
  const Column& out = d.column(outcome);
  if (out.kind == ColumnKind::Binary || out.kind == ColumnKind::Categorical) {
    throw PlanError("analysis outcome '" + outcome + "' must be continuous");
  }
  if (d.column(exposure).kind == ColumnKind::Categorical) {
    throw PlanError("analysis exposure '" + exposure +
                    "' must contribute a single coefficient; categorical exposures are not supported");
  }
  if (outcome == exposure) throw PlanError("analysis outcome and exposure must differ");
}

AnalysisFit fit_analysis_model(const Dataset& d, const AnalysisModelSpec& spec) {
  spec.validate(d);
  std::vector<std::string> regressors{spec.exposure};
  regressors.insert(regressors.end(), spec.covariates.begin(), spec.covariates.end());

  std::vector<std::size_t> rows(d.n_rows());
  for (std::size_t r = 0; r < d.n_rows(); ++r) rows[r] = r;

  Matrix x = build_design(d, regressors, rows);
  const Column& out = d.column(spec.outcome);
  std::vector<double> y(d.n_rows());
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    if (!out.observed[r]) throw DataError("analysis model: MISSING cell in '" + spec.outcome + "'");
    y[r] = out.cells[r];
  }

  LinearFit fit = fit_ols(x, y);
  AnalysisFit res;
  res.estimate = fit.beta[1];  // exposure sits right after the intercept
  res.variance = fit.sigma2_hat * fit.xtx_inv(1, 1);
  res.nu_com = fit.nu;
  res.n_used = fit.n_used;
  return res;
}

PooledResult pool_rubin(const std::vector<double>& estimates,
                        const std::vector<double>& variances,
                        std::optional<double> nu_com) {
  const std::size_t m = estimates.size();
  if (m < 2) throw DataError("pooling needs at least 2 imputations");
  if (variances.size() != m) throw DataError("pooling: estimate/variance length mismatch");
  for (double v : variances) {
    if (!(v >= 0.0)) throw DataError("pooling: negative within-imputation variance");
  }

  PooledResult r;
  r.m = m;
  r.q_bar = mean(estimates);
  r.w_bar = mean(variances);
  r.b = sample_variance(estimates);
  const double m_factor = 1.0 + 1.0 / static_cast<double>(m);
  r.t = r.w_bar + m_factor * r.b;

  if (r.b == 0.0) {
    r.df = nu_com ? *nu_com : std::numeric_limits<double>::infinity();
  } else {
    double rel = 1.0 + r.w_bar / (m_factor * r.b);
    double df_classic = static_cast<double>(m - 1) * rel * rel;
    r.df = df_classic;
    if (nu_com) {
      double lambda = m_factor * r.b / r.t;
      double df_obs = (*nu_com + 1.0) / (*nu_com + 3.0) * *nu_com * (1.0 - lambda);
      r.df = 1.0 / (1.0 / df_classic + 1.0 / df_obs);
    }
  }
  finish_interval(r);
  return r;
}

PooledResult complete_records_analysis(const Dataset& d, const AnalysisModelSpec& spec) {
  spec.validate(d);
  auto mask = complete_record_mask(d, spec.model_vars());
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    if (mask[r]) rows.push_back(r);
  }

  std::vector<std::string> regressors{spec.exposure};
  regressors.insert(regressors.end(), spec.covariates.begin(), spec.covariates.end());
  if (rows.size() <= design_width(d, regressors)) {
    throw DataError("complete records analysis: too few complete records (" +
                    std::to_string(rows.size()) + ")");
  }

  Matrix x = build_design(d, regressors, rows);
  const Column& out = d.column(spec.outcome);
  std::vector<double> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) y[i] = out.cells[rows[i]];

  LinearFit fit = fit_ols(x, y);
  PooledResult r;
  r.m = 1;
  r.q_bar = fit.beta[1];
  r.w_bar = fit.sigma2_hat * fit.xtx_inv(1, 1);
  r.b = 0.0;
  r.t = r.w_bar;
  r.df = fit.nu;
  finish_interval(r);
  return r;
}

}  // namespace tarmos
