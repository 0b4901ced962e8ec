#include "tarmos/mice.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tarmos/design.hpp"
#include "tarmos/errors.hpp"
#include "tarmos/glm.hpp"
#include "tarmos/parallel.hpp"
#include "tarmos/stats.hpp"

namespace tarmos {

namespace {

std::vector<std::string> default_predictors(const Dataset& d, const std::string& target) {
  std::vector<std::string> preds;
  for (const auto& col : d.columns()) {
    if (col.kind == ColumnKind::Derived) continue;  // only via include lists
    if (col.name == target) continue;
    preds.push_back(col.name);
  }
  return preds;
}

struct SortedDonor {
  double pred;
  std::size_t index;
};

// Indices of the k nearest donors by |pred - target|; distance ties break
// toward the lowest donor index before the uniform pick.
std::size_t pick_donor(const std::vector<SortedDonor>& sorted, double target_pred,
                       std::size_t k, RngStream& rng) {
  const std::size_t n = sorted.size();
  auto cmp = [](const SortedDonor& d, double v) { return d.pred < v; };
  std::size_t right = std::lower_bound(sorted.begin(), sorted.end(), target_pred, cmp) -
                      sorted.begin();
  std::size_t left = right;  // candidates are sorted[left-1] and sorted[right]

  struct Candidate {
    double dist;
    std::size_t index;
  };
  std::vector<Candidate> picked;
  picked.reserve(k + 8);
  auto dist_at = [&](std::size_t pos) { return std::abs(sorted[pos].pred - target_pred); };

  while (picked.size() < k) {
    bool can_left = left > 0;
    bool can_right = right < n;
    if (!can_left && !can_right) break;
    bool take_left;
    if (!can_left) {
      take_left = false;
    } else if (!can_right) {
      take_left = true;
    } else {
      take_left = dist_at(left - 1) <= dist_at(right);
    }
    if (take_left) {
      --left;
      picked.push_back({dist_at(left), sorted[left].index});
    } else {
      picked.push_back({dist_at(right), sorted[right].index});
      ++right;
    }
  }
  // Pull in every donor tied with the k-th distance so the row-index
  // tie-break sees all of them.
  double kth = 0.0;
  for (const auto& c : picked) kth = std::max(kth, c.dist);
  while (left > 0 && dist_at(left - 1) == kth) {
    --left;
    picked.push_back({kth, sorted[left].index});
  }
  while (right < n && dist_at(right) == kth) {
    picked.push_back({kth, sorted[right].index});
    ++right;
  }

  std::sort(picked.begin(), picked.end(), [](const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.index < b.index;
  });
  picked.resize(k);
  return picked[rng.uniform_index(k)].index;
}

std::vector<SortedDonor> sort_donors(const std::vector<double>& preds) {
  std::vector<SortedDonor> sorted(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) sorted[i] = {preds[i], i};
  std::sort(sorted.begin(), sorted.end(), [](const SortedDonor& a, const SortedDonor& b) {
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.index < b.index;
  });
  return sorted;
}

}  // namespace

double pmm_match(const std::vector<double>& donor_preds, double target_pred,
                 const std::vector<double>& donor_values, std::size_t k, RngStream& rng) {
  if (k < 1) throw PlanError("pmm donor count must be >= 1");
  if (donor_preds.size() != donor_values.size()) {
    throw DataError("pmm: donor prediction/value length mismatch");
  }
  if (donor_preds.size() < k) {
    throw DataError("pmm: fewer donors (" + std::to_string(donor_preds.size()) +
                    ") than requested neighbours (" + std::to_string(k) + ")");
  }
  auto sorted = sort_donors(donor_preds);
  return donor_values[pick_donor(sorted, target_pred, k, rng)];
}

MiceEngine::MiceEngine(const Dataset& original, const ImputationPlan& plan)
    : original_(original), plan_(plan) {
  const auto& cfg = plan_.config;
  if (cfg.m < 2) throw PlanError("imputation count M must be >= 2");
  if (cfg.burn_in < 1) throw PlanError("burn-in must be >= 1");

  std::set<std::string> spec_targets;
  for (const auto& spec : plan_.specs) {
    if (!spec_targets.insert(spec.target).second) {
      throw PlanError("duplicate imputation spec for '" + spec.target + "'");
    }
  }

  // Every incomplete base variable needs a spec; derived columns are
  // passive and must not be imputed directly.
  for (const auto& col : original_.columns()) {
    if (col.kind == ColumnKind::Derived) continue;
    if (col.n_missing() > 0 && !spec_targets.count(col.name)) {
      throw PlanError("variable '" + col.name + "' has missing values but no imputation spec");
    }
  }

  std::vector<StepPlan> steps;
  for (const auto& spec : plan_.specs) {
    const std::size_t target_col = original_.column_index(spec.target);
    const Column& col = original_.column(target_col);
    if (col.kind == ColumnKind::Derived) {
      throw PlanError("derived column '" + spec.target +
                      "' cannot be an imputation target; it is refreshed passively");
    }
    switch (spec.method) {
      case ImputeMethod::Logistic:
        if (col.kind != ColumnKind::Binary) {
          throw PlanError("logistic imputation target '" + spec.target + "' must be binary");
        }
        break;
      case ImputeMethod::Multinomial:
        if (col.kind != ColumnKind::Categorical) {
          throw PlanError("multinomial imputation target '" + spec.target +
                          "' must be categorical");
        }
        break;
      case ImputeMethod::BayesLinear:
      case ImputeMethod::Pmm:
        if (col.kind != ColumnKind::Continuous) {
          throw PlanError("linear imputation target '" + spec.target + "' must be continuous");
        }
        break;
    }
    if (spec.method == ImputeMethod::Pmm && spec.pmm_k < 1) {
      throw PlanError("pmm donor count must be >= 1 for '" + spec.target + "'");
    }
    if (!std::isfinite(spec.offset_delta)) {
      // +infinity is the documented always-impute-one shorthand
      if (!(spec.method == ImputeMethod::Logistic && spec.offset_delta > 0)) {
        throw PlanError("offset delta must be finite for '" + spec.target + "'");
      }
    }
    if (spec.offset_delta != 0.0 && spec.method != ImputeMethod::Logistic) {
      throw PlanError("offset delta is only supported for logistic targets ('" + spec.target +
                      "')");
    }

    StepPlan step;
    step.spec = spec;
    step.target_col = target_col;
    step.predictors = default_predictors(original_, spec.target);
    for (const auto& name : spec.omit) {
      original_.column_index(name);  // must exist
      step.predictors.erase(std::remove(step.predictors.begin(), step.predictors.end(), name),
                            step.predictors.end());
    }
    for (const auto& name : spec.include) {
      const Column& inc = original_.column(name);
      if (inc.kind != ColumnKind::Derived) {
        throw PlanError("include term '" + name + "' for '" + spec.target +
                        "' must name a derived column");
      }
      if (inc.source == spec.target) {
        throw PlanError("include term '" + name + "' is derived from its own target '" +
                        spec.target + "'");
      }
      if (std::find(step.predictors.begin(), step.predictors.end(), name) ==
          step.predictors.end()) {
        step.predictors.push_back(name);
      }
    }

    for (std::size_t r = 0; r < original_.n_rows(); ++r) {
      (col.observed[r] ? step.rows_obs : step.rows_mis).push_back(r);
    }
    if (step.rows_obs.empty()) {
      throw DataError("variable '" + spec.target + "' has no observed values");
    }
    if (!step.rows_mis.empty() &&
        step.rows_obs.size() <= design_width(original_, step.predictors)) {
      throw DataError("variable '" + spec.target + "': not enough observed rows (" +
                      std::to_string(step.rows_obs.size()) + ") for its imputation model");
    }
    steps.push_back(std::move(step));
  }

  // Drop inert steps (no missing cells); they still serve as predictors.
  steps.erase(std::remove_if(steps.begin(), steps.end(),
                             [](const StepPlan& s) { return s.rows_mis.empty(); }),
              steps.end());

  if (cfg.visit_order == VisitOrder::AscendingMissingness) {
    std::stable_sort(steps.begin(), steps.end(), [](const StepPlan& a, const StepPlan& b) {
      return a.rows_mis.size() < b.rows_mis.size();
    });
  }
  steps_ = std::move(steps);
  for (const auto& s : steps_) {
    visit_targets_.push_back(s.spec.target);
    predictors_.push_back(s.predictors);
  }

  // Compatibility guard: the substantive model's variables must appear in
  // at least one active imputation model.
  if (!steps_.empty()) {
    for (const auto& var : plan_.analysis_vars) {
      bool present = false;
      for (const auto& s : steps_) {
        if (s.spec.target == var ||
            std::find(s.predictors.begin(), s.predictors.end(), var) != s.predictors.end()) {
          present = true;
          break;
        }
      }
      if (!present) {
        throw PlanError("analysis variable '" + var +
                        "' appears in no imputation model; the imputation model must be "
                        "compatible with the substantive model");
      }
    }
  }
}

void MiceEngine::impute_variable(Dataset& state, const StepPlan& step, RngStream& rng,
                                 const std::vector<double>* grid_deltas,
                                 std::vector<std::vector<double>>* grid_fills) const {
  const auto& spec = step.spec;
  const Column& target = state.column(step.target_col);

  Matrix x_obs = build_design(state, step.predictors, step.rows_obs);
  std::vector<double> y_obs(step.rows_obs.size());
  for (std::size_t i = 0; i < step.rows_obs.size(); ++i) {
    y_obs[i] = target.cells[step.rows_obs[i]];
  }
  Matrix x_mis = build_design(state, step.predictors, step.rows_mis);

  switch (spec.method) {
    case ImputeMethod::BayesLinear: {
      LinearFit fit = fit_ols(x_obs, y_obs);
      ParameterDraw draw = draw_linear_params(fit, rng);
      std::vector<double> lp = linear_predictor(x_mis, draw.beta_star);
      for (std::size_t j = 0; j < step.rows_mis.size(); ++j) {
        state.set_cell(step.target_col, step.rows_mis[j], lp[j] + draw.sigma_star * rng.normal());
      }
      break;
    }
    case ImputeMethod::Pmm: {
      LinearFit fit = fit_ols(x_obs, y_obs);
      ParameterDraw draw = draw_linear_params(fit, rng);
      // Type-1 matching: donors scored with the ML fit, targets with the draw.
      std::vector<double> donor_preds = linear_predictor(x_obs, fit.beta);
      std::vector<double> target_preds = linear_predictor(x_mis, draw.beta_star);
      auto sorted = sort_donors(donor_preds);
      if (donor_preds.size() < spec.pmm_k) {
        throw DataError("pmm: fewer donors than neighbours for '" + spec.target + "'");
      }
      for (std::size_t j = 0; j < step.rows_mis.size(); ++j) {
        std::size_t donor = pick_donor(sorted, target_preds[j], spec.pmm_k, rng);
        state.set_cell(step.target_col, step.rows_mis[j], y_obs[donor]);
      }
      break;
    }
    case ImputeMethod::Logistic: {
      LogisticFit fit = fit_logistic(x_obs, y_obs);
      std::vector<double> beta_star = draw_mvn(fit.beta, fit.cov, rng);
      std::vector<double> lp = linear_predictor(x_mis, beta_star);
      const double delta = spec.offset_delta;
      if (grid_fills) {
        for (auto& g : *grid_fills) g.resize(step.rows_mis.size());
      }
      for (std::size_t j = 0; j < step.rows_mis.size(); ++j) {
        double u = rng.uniform01();
        double fill = u < expit(lp[j] + delta) ? 1.0 : 0.0;
        state.set_cell(step.target_col, step.rows_mis[j], fill);
        if (grid_fills) {
          for (std::size_t g = 0; g < grid_deltas->size(); ++g) {
            double dg = (*grid_deltas)[g];
            double pg = std::isinf(dg) && dg > 0 ? 1.0 : expit(lp[j] + dg);
            (*grid_fills)[g][j] = u < pg ? 1.0 : 0.0;
          }
        }
      }
      break;
    }
    case ImputeMethod::Multinomial: {
      const std::size_t n_levels = target.levels.size();
      MultinomialFit fit = fit_multinomial(x_obs, y_obs, n_levels);
      std::vector<double> center(fit.coef.data().begin(), fit.coef.data().end());
      std::vector<double> flat = draw_mvn(center, fit.cov, rng);
      Matrix coef_star(n_levels - 1, x_obs.cols());
      std::copy(flat.begin(), flat.end(), coef_star.data().begin());
      for (std::size_t j = 0; j < step.rows_mis.size(); ++j) {
        std::vector<double> probs = multinomial_probs(x_mis, j, coef_star);
        double u = rng.uniform01();
        double cum = 0.0;
        std::size_t level = n_levels - 1;
        for (std::size_t k = 0; k < n_levels; ++k) {
          cum += probs[k];
          if (u < cum) {
            level = k;
            break;
          }
        }
        state.set_cell(step.target_col, step.rows_mis[j], static_cast<double>(level));
      }
      break;
    }
  }
  state.refresh_derived();
}

ChainResult MiceEngine::run_chain(std::size_t chain_index, std::uint64_t master_seed,
                                  const std::optional<DeltaGridRequest>& grid) const {
  RngStream rng(derive_seed(master_seed, StreamTag::Chain, chain_index));
  Dataset state = original_;

  // Initial fills: uniform draws from each variable's observed values.
  for (const auto& step : steps_) {
    const Column& col = original_.column(step.target_col);
    std::vector<double> observed_values;
    observed_values.reserve(step.rows_obs.size());
    for (std::size_t r : step.rows_obs) observed_values.push_back(col.cells[r]);
    for (std::size_t r : step.rows_mis) {
      state.set_cell(step.target_col, r, observed_values[rng.uniform_index(observed_values.size())]);
    }
  }
  state.refresh_derived();

  std::size_t grid_step = steps_.size();
  ChainResult res;
  if (grid) {
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      if (steps_[i].spec.target == grid->target) grid_step = i;
    }
    if (grid_step == steps_.size()) {
      throw PlanError("delta grid target '" + grid->target + "' is not an active imputation target");
    }
    if (steps_[grid_step].spec.method != ImputeMethod::Logistic) {
      throw PlanError("delta grid target '" + grid->target + "' must use logistic imputation");
    }
    res.grid_fills.assign(grid->deltas.size(), {});
  }

  for (std::size_t cycle = 1; cycle <= plan_.config.burn_in; ++cycle) {
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      bool capture = grid && cycle == plan_.config.burn_in && i == grid_step;
      impute_variable(state, steps_[i], rng, capture ? &grid->deltas : nullptr,
                      capture ? &res.grid_fills : nullptr);
    }
  }
  res.completed = std::move(state);
  return res;
}

std::vector<std::vector<std::uint8_t>> MiceEngine::imputed_mask() const {
  std::vector<std::vector<std::uint8_t>> mask;
  for (const auto& col : original_.columns()) {
    std::vector<std::uint8_t> m(original_.n_rows());
    for (std::size_t r = 0; r < original_.n_rows(); ++r) m[r] = col.observed[r] ? 0 : 1;
    mask.push_back(std::move(m));
  }
  return mask;
}

ImputationSet MiceEngine::impute_all(unsigned threads) const {
  const std::size_t m = plan_.config.m;
  ImputationSet set;
  set.config = plan_.config;
  set.completed.resize(m);
  set.chain_seeds.resize(m);
  set.imputed_mask = imputed_mask();

  std::vector<std::string> errors(m);
  parallel_for(m, threads, [&](std::size_t chain) {
    set.chain_seeds[chain] = derive_seed(plan_.config.seed, StreamTag::Chain, chain);
    try {
      set.completed[chain] = run_chain(chain, plan_.config.seed).completed;
    } catch (const std::exception& e) {
      errors[chain] = e.what();
    }
  });
  for (std::size_t chain = 0; chain < m; ++chain) {
    if (!errors[chain].empty()) {
      throw NumericError("imputation chain " + std::to_string(chain) + " failed: " +
                         errors[chain]);
    }
  }

  // Completed datasets must be complete; observed cells never change.
  for (const auto& d : set.completed) {
    for (std::size_t c = 0; c < d.n_cols(); ++c) {
      const Column& col = d.column(c);
      for (std::size_t r = 0; r < d.n_rows(); ++r) {
        if (!col.observed[r]) {
          throw NumericError("internal: MISSING cell survived imputation in '" + col.name + "'");
        }
      }
    }
  }
  return set;
}

ImputationSet impute_all(const Dataset& d, const ImputationPlan& plan, unsigned threads) {
  MiceEngine engine(d, plan);
  return engine.impute_all(threads);
}

}  // namespace tarmos
