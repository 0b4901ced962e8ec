#ifndef TARMOS_SIMGEN_HPP
#define TARMOS_SIMGEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tarmos/dataset.hpp"
#include "tarmos/mice.hpp"
#include "tarmos/pooling.hpp"

namespace tarmos {

enum class Mechanism { Mcar, Mar, MnarPatternMixture };

// Missingness model for one variable:
// logit P(missing) = intercept + on_outcome*outcome + on_covariate*covariate
//                  + on_auxiliary*auxiliary, evaluated on the complete data.
struct MissingnessModel {
  std::string variable;  // "exposure", "outcome" or "covariate"
  double intercept = 0.0;
  double on_outcome = 0.0;
  double on_covariate = 0.0;
  double on_auxiliary = 0.0;
};

// Data-generating process:
//   covariate, auxiliary ~ N(0,1)
//   exposure ~ Bernoulli(expit(a0 + a1*covariate + a2*auxiliary))
//   outcome  = b0 + b1*exposure + b2*covariate + N(0, noise_sd)
// Under MNAR, each missing-flagged exposure is redrawn from the true
// conditional of exposure given (covariate, auxiliary, outcome) with
// delta_true added to its log odds, so the generated data satisfy the
// pattern-mixture model exactly and delta_true is the oracle sensitivity
// parameter.
struct SimScenario {
  std::size_t n = 5000;
  double b0 = 0.0, b1 = 1.0, b2 = 1.0;
  double noise_sd = 1.0;
  double a0 = 0.0, a1 = 0.5, a2 = 1.0;
  Mechanism mechanism = Mechanism::Mcar;
  std::vector<MissingnessModel> missingness;
  double delta_true = 0.0;  // MNAR only
  std::uint64_t seed = 0;

  void validate() const;
};

struct Generated {
  Dataset data;            // with missingness imposed
  Dataset complete_data;   // pre-deletion
  double true_b1 = 0.0;
};

Generated generate(const SimScenario& s);

enum class AnalysisMethod { FullData, CompleteRecords, MultipleImputation, DeltaAdjusted };

struct MethodSpec {
  AnalysisMethod method = AnalysisMethod::CompleteRecords;
  double delta = 0.0;  // DeltaAdjusted only

  std::string label() const;
};

struct ExperimentConfig {
  std::size_t reps = 200;
  std::size_t m = 10;
  std::size_t burn_in = 5;
  bool include_auxiliary = true;
  unsigned threads = 1;
};

struct MethodReport {
  std::string method;
  double mean_estimate = 0.0;
  double bias = 0.0;
  double mcse_bias = 0.0;  // Monte Carlo SE of the bias estimate
  double empirical_se = 0.0;
  double mean_model_se = 0.0;
  double coverage = 0.0;  // 95% CI coverage of the true coefficient
  std::size_t replications = 0;
};

struct ExperimentReport {
  double true_b1 = 0.0;
  std::vector<MethodReport> methods;
};

// Imputation plan implied by a scenario: one spec per variable that can be
// missing, default all-others predictors (auxiliary optionally omitted).
ImputationPlan scenario_imputation_plan(const SimScenario& s, const ExperimentConfig& cfg,
                                        std::uint64_t seed, double exposure_delta = 0.0);

AnalysisModelSpec scenario_analysis_model();

ExperimentReport run_experiment(const SimScenario& s, const std::vector<MethodSpec>& methods,
                                const ExperimentConfig& cfg);

}  // namespace tarmos

#endif
