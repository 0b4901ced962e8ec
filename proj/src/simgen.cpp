#include "tarmos/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tarmos/errors.hpp"
#include "tarmos/parallel.hpp"
#include "tarmos/rng.hpp"
#include "tarmos/stats.hpp"

namespace tarmos {

namespace {

constexpr const char* kOutcome = "outcome";
constexpr const char* kExposure = "exposure";
constexpr const char* kCovariate = "covariate";
constexpr const char* kAuxiliary = "auxiliary";

Column make_continuous(const std::string& name, std::size_t n) {
  Column c;
  c.name = name;
  c.kind = ColumnKind::Continuous;
  c.cells.assign(n, 0.0);
  c.observed.assign(n, 1);
  return c;
}

Column make_binary(const std::string& name, std::size_t n) {
  Column c;
  c.name = name;
  c.kind = ColumnKind::Binary;
  c.cells.assign(n, 0.0);
  c.observed.assign(n, 1);
  return c;
}

}  // namespace

void SimScenario::validate() const {
  if (n < 10) throw PlanError("simulation scenario needs n >= 10");
  if (!(noise_sd > 0.0)) throw PlanError("simulation noise sd must be positive");
  for (const auto& mm : missingness) {
    if (mm.variable != kExposure && mm.variable != kOutcome && mm.variable != kCovariate) {
      throw PlanError("missingness model targets unknown variable '" + mm.variable + "'");
    }
    bool dependent = mm.on_outcome != 0.0 || mm.on_covariate != 0.0 || mm.on_auxiliary != 0.0;
    if (mechanism == Mechanism::Mcar && dependent) {
      throw PlanError("MCAR scenario cannot have dependent missingness for '" + mm.variable + "'");
    }
  }
  if (mechanism == Mechanism::MnarPatternMixture) {
    auto it = std::find_if(missingness.begin(), missingness.end(),
                           [](const MissingnessModel& mm) { return mm.variable == kExposure; });
    if (it == missingness.end()) {
      throw PlanError("pattern-mixture scenario needs a missingness model for the exposure");
    }
    if (it->on_outcome != 0.0) {
      throw PlanError(
          "pattern-mixture exposure missingness may depend on covariate/auxiliary only; "
          "dependence on the exposure value itself enters through delta_true");
    }
  } else if (delta_true != 0.0) {
    throw PlanError("delta_true only applies to the pattern-mixture mechanism");
  }
}

// Draw order per row is fixed (covariate, auxiliary, flag uniform, exposure
// uniform, outcome normal) so that scenarios differing only in delta_true
// or missingness coefficients stay draw-for-draw aligned.
//
// Pattern-mixture rows flag exposure missingness first (from covariate and
// auxiliary only) and then tilt the exposure's log odds by delta_true for
// flagged rows, with the outcome generated from the realized exposure.
// The substantive coefficient therefore stays exactly b1, while the
// conditional law of the exposure given (covariate, auxiliary, outcome)
// differs between observed and missing records by delta_true log odds.
Generated generate(const SimScenario& s) {
  s.validate();
  RngStream rng(derive_seed(s.seed, StreamTag::Generator, 0));

  Dataset d;
  d.add_column(make_continuous(kOutcome, s.n));
  d.add_column(make_binary(kExposure, s.n));
  d.add_column(make_continuous(kCovariate, s.n));
  d.add_column(make_continuous(kAuxiliary, s.n));

  const std::size_t y_col = d.column_index(kOutcome);
  const std::size_t e_col = d.column_index(kExposure);
  const std::size_t c_col = d.column_index(kCovariate);
  const std::size_t a_col = d.column_index(kAuxiliary);

  const MissingnessModel* exp_miss = nullptr;
  for (const auto& mm : s.missingness) {
    if (mm.variable == kExposure) exp_miss = &mm;
  }
  const bool pattern_mixture = s.mechanism == Mechanism::MnarPatternMixture;

  std::vector<std::uint8_t> exposure_flag(s.n, 0);
  for (std::size_t i = 0; i < s.n; ++i) {
    double c = rng.normal();
    double a = rng.normal();
    double u_flag = rng.uniform01();
    double u_e = rng.uniform01();
    double z = rng.normal();

    double lp_e = s.a0 + s.a1 * c + s.a2 * a;
    bool flag = false;
    double e, y;
    if (pattern_mixture) {
      if (exp_miss) {
        double lp_m = exp_miss->intercept + exp_miss->on_covariate * c +
                      exp_miss->on_auxiliary * a;
        flag = u_flag < expit(lp_m);
      }
      e = u_e < expit(lp_e + (flag ? s.delta_true : 0.0)) ? 1.0 : 0.0;
      y = s.b0 + s.b1 * e + s.b2 * c + s.noise_sd * z;
    } else {
      e = u_e < expit(lp_e) ? 1.0 : 0.0;
      y = s.b0 + s.b1 * e + s.b2 * c + s.noise_sd * z;
      if (exp_miss) {
        double lp_m = exp_miss->intercept + exp_miss->on_outcome * y +
                      exp_miss->on_covariate * c + exp_miss->on_auxiliary * a;
        flag = u_flag < expit(lp_m);
      }
    }
    d.set_cell(c_col, i, c);
    d.set_cell(a_col, i, a);
    d.set_cell(e_col, i, e);
    d.set_cell(y_col, i, y);
    exposure_flag[i] = flag ? 1 : 0;
  }

  Generated out;
  out.complete_data = d;
  out.true_b1 = s.b1;

  for (std::size_t i = 0; i < s.n; ++i) {
    if (exposure_flag[i]) d.set_missing(e_col, i);
  }
  // Remaining missingness models, evaluated on the complete data.
  for (const auto& mm : s.missingness) {
    if (mm.variable == kExposure) continue;
    const std::size_t col = d.column_index(mm.variable);
    for (std::size_t i = 0; i < s.n; ++i) {
      double lp = mm.intercept + mm.on_outcome * out.complete_data.cell(y_col, i) +
                  mm.on_covariate * out.complete_data.cell(c_col, i) +
                  mm.on_auxiliary * out.complete_data.cell(a_col, i);
      if (rng.uniform01() < expit(lp)) d.set_missing(col, i);
    }
  }

  out.data = std::move(d);
  return out;
}

std::string MethodSpec::label() const {
  switch (method) {
    case AnalysisMethod::FullData: return "full_data";
    case AnalysisMethod::CompleteRecords: return "complete_records";
    case AnalysisMethod::MultipleImputation: return "multiple_imputation";
    case AnalysisMethod::DeltaAdjusted: {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "mi_delta_%g", delta);
      return buf;
    }
  }
  return "unknown";
}

AnalysisModelSpec scenario_analysis_model() {
  AnalysisModelSpec spec;
  spec.outcome = kOutcome;
  spec.exposure = kExposure;
  spec.covariates = {kCovariate};
  return spec;
}

ImputationPlan scenario_imputation_plan(const SimScenario& s, const ExperimentConfig& cfg,
                                        std::uint64_t seed, double exposure_delta) {
  ImputationPlan plan;
  plan.config.m = cfg.m;
  plan.config.burn_in = cfg.burn_in;
  plan.config.seed = seed;
  plan.analysis_vars = {kOutcome, kExposure, kCovariate};

  auto add_spec = [&](const std::string& var) {
    VariableImputationSpec spec;
    spec.target = var;
    if (var == kExposure) {
      spec.method = ImputeMethod::Logistic;
      spec.offset_delta = exposure_delta;
    } else {
      spec.method = ImputeMethod::BayesLinear;
    }
    if (!cfg.include_auxiliary) spec.omit.push_back(kAuxiliary);
    plan.specs.push_back(std::move(spec));
  };
  for (const auto& mm : s.missingness) add_spec(mm.variable);
  return plan;
}

ExperimentReport run_experiment(const SimScenario& s, const std::vector<MethodSpec>& methods,
                                const ExperimentConfig& cfg) {
  s.validate();
  if (cfg.reps < 1) throw PlanError("experiment needs at least 1 replication");
  if (methods.empty()) throw PlanError("experiment needs at least one method");

  const AnalysisModelSpec analysis = scenario_analysis_model();
  struct RepResult {
    double estimate = 0.0;
    double se = 0.0;
    bool covered = false;
  };
  std::vector<std::vector<RepResult>> results(cfg.reps,
                                              std::vector<RepResult>(methods.size()));
  std::vector<std::string> errors(cfg.reps);

  parallel_for(cfg.reps, cfg.threads, [&](std::size_t rep) {
    try {
      SimScenario rep_scenario = s;
      rep_scenario.seed = derive_seed(s.seed, StreamTag::Replication, rep);
      Generated g = generate(rep_scenario);

      for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const MethodSpec& method = methods[mi];
        PooledResult pooled;
        switch (method.method) {
          case AnalysisMethod::FullData:
            pooled = complete_records_analysis(g.complete_data, analysis);
            break;
          case AnalysisMethod::CompleteRecords:
            pooled = complete_records_analysis(g.data, analysis);
            break;
          case AnalysisMethod::MultipleImputation:
          case AnalysisMethod::DeltaAdjusted: {
            double delta = method.method == AnalysisMethod::DeltaAdjusted ? method.delta : 0.0;
            ImputationPlan plan =
                scenario_imputation_plan(rep_scenario, cfg, rep_scenario.seed, delta);
            ImputationSet set = impute_all(g.data, plan, 1);
            std::vector<double> estimates(set.completed.size()), variances(set.completed.size());
            double nu_com = 0.0;
            for (std::size_t m = 0; m < set.completed.size(); ++m) {
              AnalysisFit fit = fit_analysis_model(set.completed[m], analysis);
              estimates[m] = fit.estimate;
              variances[m] = fit.variance;
              nu_com = fit.nu_com;
            }
            pooled = pool_rubin(estimates, variances, nu_com);
            break;
          }
        }
        results[rep][mi] = {pooled.q_bar, std::sqrt(pooled.t),
                            pooled.ci_low <= g.true_b1 && g.true_b1 <= pooled.ci_high};
      }
    } catch (const std::exception& e) {
      errors[rep] = e.what();
    }
  });
  for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
    if (!errors[rep].empty()) {
      throw NumericError("replication " + std::to_string(rep) + " failed: " + errors[rep]);
    }
  }

  ExperimentReport report;
  report.true_b1 = s.b1;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    std::vector<double> estimates(cfg.reps), ses(cfg.reps);
    double covered = 0.0;
    for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
      estimates[rep] = results[rep][mi].estimate;
      ses[rep] = results[rep][mi].se;
      covered += results[rep][mi].covered ? 1.0 : 0.0;
    }
    MethodReport row;
    row.method = methods[mi].label();
    row.replications = cfg.reps;
    row.mean_estimate = mean(estimates);
    row.bias = row.mean_estimate - s.b1;
    row.empirical_se = cfg.reps >= 2 ? std::sqrt(sample_variance(estimates)) : 0.0;
    row.mcse_bias = row.empirical_se / std::sqrt(static_cast<double>(cfg.reps));
    row.mean_model_se = mean(ses);
    row.coverage = covered / static_cast<double>(cfg.reps);
    report.methods.push_back(std::move(row));
  }
  return report;
}

}  // namespace tarmos
