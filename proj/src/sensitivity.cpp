#include "tarmos/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include "tarmos/errors.hpp"
#include "tarmos/parallel.hpp"
#include "tarmos/stats.hpp"

namespace tarmos {

void SensitivitySpec::validate() const {
  if (target.empty()) throw PlanError("sensitivity target must be named");
  if (deltas.empty()) throw PlanError("sensitivity delta grid is empty");
  if (!std::is_sorted(deltas.begin(), deltas.end())) {
    throw PlanError("sensitivity deltas must be sorted ascending");
  }
  for (double d : deltas) {
    if (std::isnan(d) || (std::isinf(d) && d < 0)) {
      throw PlanError("sensitivity deltas must be finite or +infinity");
    }
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw PlanError("sensitivity alpha must be in (0,1)");
  if (m_sens < 2) throw PlanError("sensitivity imputation count must be >= 2");
}

double fraction_positive(const std::vector<std::vector<double>>& fills_per_imputation) {
  if (fills_per_imputation.empty()) throw DataError("fraction_positive: no imputations");
  double total = 0.0;
  for (const auto& fills : fills_per_imputation) {
    if (fills.empty()) throw DataError("fraction_positive: target has no imputed cells");
    double ones = 0.0;
    for (double v : fills) ones += v == 1.0 ? 1.0 : 0.0;
    total += ones / static_cast<double>(fills.size());
  }
  return total / static_cast<double>(fills_per_imputation.size());
}

double fraction_imputed_positive(const ImputationSet& s, const std::string& target) {
  if (s.completed.empty()) throw DataError("fraction_imputed_positive: empty imputation set");
  const std::size_t col = s.completed.front().column_index(target);
  if (s.completed.front().column(col).kind != ColumnKind::Binary) {
    throw DataError("fraction_imputed_positive: target '" + target + "' must be binary");
  }
  const auto& mask = s.imputed_mask[col];
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < mask.size(); ++r) {
    if (mask[r]) rows.push_back(r);
  }
  if (rows.empty()) {
    throw DataError("fraction_imputed_positive: target '" + target + "' has no missing cells");
  }
  std::vector<std::vector<double>> fills(s.completed.size());
  for (std::size_t m = 0; m < s.completed.size(); ++m) {
    fills[m].reserve(rows.size());
    for (std::size_t r : rows) fills[m].push_back(s.completed[m].cell(col, r));
  }
  return fraction_positive(fills);
}

SensitivityResults run_delta_grid(const Dataset& d, const ImputationPlan& plan,
                                  const AnalysisModelSpec& analysis,
                                  const SensitivitySpec& spec, unsigned threads) {
  spec.validate();

  auto it = std::find_if(plan.specs.begin(), plan.specs.end(),
                         [&](const VariableImputationSpec& s) { return s.target == spec.target; });
  if (it == plan.specs.end()) {
    throw PlanError("sensitivity target '" + spec.target + "' has no imputation spec");
  }
  if (it->method != ImputeMethod::Logistic) {
    throw PlanError("sensitivity target '" + spec.target + "' must use logistic imputation");
  }

  ImputationPlan grid_plan = plan;
  grid_plan.config.m = spec.m_sens;

  MiceEngine engine(d, grid_plan);
  const std::size_t m = spec.m_sens;
  const std::size_t target_col = d.column_index(spec.target);

  std::vector<std::size_t> rows_mis;
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    if (!d.column(target_col).observed[r]) rows_mis.push_back(r);
  }
  if (rows_mis.empty()) {
    throw DataError("sensitivity target '" + spec.target + "' has no missing cells");
  }

  DeltaGridRequest request{spec.target, spec.deltas};
  std::vector<ChainResult> chains(m);
  std::vector<std::string> errors(m);
  parallel_for(m, threads, [&](std::size_t chain) {
    try {
      chains[chain] = engine.run_chain(chain, grid_plan.config.seed, request);
    } catch (const std::exception& e) {
      errors[chain] = e.what();
    }
  });
  for (std::size_t chain = 0; chain < m; ++chain) {
    if (!errors[chain].empty()) {
      throw NumericError("sensitivity chain " + std::to_string(chain) + " failed: " +
                         errors[chain]);
    }
  }

  SensitivityResults results;
  for (std::size_t g = 0; g < spec.deltas.size(); ++g) {
    std::vector<double> estimates(m), variances(m);
    std::vector<std::vector<double>> fills(m);
    double nu_com = 0.0;
    for (std::size_t chain = 0; chain < m; ++chain) {
      Dataset completed = chains[chain].completed;
      const auto& grid_fill = chains[chain].grid_fills[g];
      for (std::size_t j = 0; j < rows_mis.size(); ++j) {
        completed.set_cell(target_col, rows_mis[j], grid_fill[j]);
      }
      completed.refresh_derived();
      AnalysisFit fit = fit_analysis_model(completed, analysis);
      estimates[chain] = fit.estimate;
      variances[chain] = fit.variance;
      nu_com = fit.nu_com;
      fills[chain] = grid_fill;
    }
    DeltaResult dr;
    dr.delta = spec.deltas[g];
    dr.pooled = pool_rubin(estimates, variances, nu_com);
    dr.fraction_imputed_positive = fraction_positive(fills);
    results.per_delta.push_back(std::move(dr));
  }
  results.tipping_delta = tipping_point(results, TippingCriterion::CiCrossesZero, spec.alpha);
  return results;
}

std::optional<double> tipping_point(const SensitivityResults& results,
                                    TippingCriterion criterion, double alpha) {
  if (results.per_delta.empty()) throw DataError("tipping_point: empty results");
  if (!(alpha > 0.0 && alpha < 1.0)) throw PlanError("tipping_point: alpha must be in (0,1)");

  // Baseline sign from the delta = 0 entry when present, else the first.
  const DeltaResult* baseline = &results.per_delta.front();
  for (const auto& r : results.per_delta) {
    if (r.delta == 0.0) {
      baseline = &r;
      break;
    }
  }

  for (const auto& r : results.per_delta) {
    const PooledResult& p = r.pooled;
    bool met = false;
    if (criterion == TippingCriterion::CiCrossesZero) {
      double se = std::sqrt(p.t);
      double q = se == 0.0 ? 0.0 : t_quantile(1.0 - alpha / 2.0, p.df);
      met = p.q_bar - q * se <= 0.0 && 0.0 <= p.q_bar + q * se;
    } else {
      met = p.q_bar * baseline->pooled.q_bar < 0.0;
    }
    if (met) return r.delta;
  }
  return std::nullopt;
}

}  // namespace tarmos
