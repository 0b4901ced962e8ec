#include "tarmos/planner.hpp"

#include <cmath>
#include <cstdio>

#include "tarmos/errors.hpp"

namespace tarmos {

namespace {

std::string fmt_pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", v);
  return buf;
}

double var_pct_missing(const MissingSummary& summary, const std::string& name) {
  for (const auto& v : summary.variables) {
    if (v.name == name) return v.pct_missing;
  }
  throw DataError("planner: variable '" + name + "' not in missing summary");
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Uncertain: return "uncertain";
  }
  return "uncertain";
}

StrategyAdvice advise(const MissingSummary& summary, const PredictorReport& predictors,
                      const PlannerFlags& flags, double threshold_pct,
                      const std::optional<std::string>& outcome,
                      const std::optional<std::string>& exposure) {
  if (!(threshold_pct >= 0.0 && threshold_pct <= 100.0)) {
    throw PlanError("planner threshold must be a percentage");
  }
  StrategyAdvice advice;
  const double pct_incomplete = 100.0 - summary.pct_complete_records;

  if (pct_incomplete == 0.0) {
    advice.q1_cca_valid.verdict = Verdict::Yes;
    advice.q1_cca_valid.reasons.push_back("Q1_NO_MISSING: every record is complete");
    advice.q2_mi_beneficial.verdict = Verdict::No;
    advice.q2_mi_beneficial.reasons.push_back("Q2_NO_MISSING: nothing to impute");
    advice.q3_sensitivity_needed.verdict = Verdict::No;
    advice.q3_sensitivity_needed.reasons.push_back("Q3_NO_MISSING: no missingness mechanism in play");
    advice.recommendation.push_back("full-data analysis");
    return advice;
  }

  // Q1: is a complete records analysis likely to be valid?
  if (pct_incomplete < threshold_pct) {
    advice.q1_cca_valid.verdict = Verdict::Yes;
    advice.q1_cca_valid.reasons.push_back("Q1_LOW_MISSINGNESS: " + fmt_pct(pct_incomplete) +
                                          " of records incomplete, below " +
                                          fmt_pct(threshold_pct));
  } else if (!flags.outcome_missingness_assoc) {
    advice.q1_cca_valid.verdict = Verdict::Yes;
    advice.q1_cca_valid.reasons.push_back(
        "Q1_NOT_OUTCOME_RELATED: missingness judged unrelated to the outcome given the model");
  } else {
    advice.q1_cca_valid.verdict = Verdict::No;
    advice.q1_cca_valid.reasons.push_back("Q1_HIGH_MISSINGNESS: " + fmt_pct(pct_incomplete) +
                                          " of records incomplete");
    advice.q1_cca_valid.reasons.push_back(
        "Q1_OUTCOME_ASSOCIATED: missingness judged associated with the outcome");
  }
  // Evidence lines from the predictor report (advisory, never decisive).
  for (const auto& row : predictors.rows) {
    for (const auto& e : row.effects) {
      if (e.ci_low > 1.0 || e.ci_high < 1.0) {
        advice.q1_cca_valid.reasons.push_back("Q1_PREDICTOR_EVIDENCE: '" + row.name +
                                              "' predicts completeness (CI excludes 1)");
        break;
      }
    }
  }

  // Q2: would multiple imputation reduce bias or improve precision?
  bool covariate_concentrated = false;
  if (outcome && exposure) {
    covariate_concentrated = var_pct_missing(summary, *outcome) < threshold_pct &&
                             var_pct_missing(summary, *exposure) < threshold_pct;
  }
  if (pct_incomplete >= threshold_pct && (flags.auxiliaries_available || covariate_concentrated)) {
    advice.q2_mi_beneficial.verdict = Verdict::Yes;
    if (flags.auxiliaries_available) {
      advice.q2_mi_beneficial.reasons.push_back(
          "Q2_AUXILIARIES: auxiliary variables available to recover information");
    }
    if (covariate_concentrated) {
      advice.q2_mi_beneficial.reasons.push_back(
          "Q2_COVARIATE_MISSINGNESS: outcome and exposure largely complete; "
          "missingness concentrated in covariates");
    }
  } else {
    advice.q2_mi_beneficial.verdict = Verdict::No;
    if (pct_incomplete < threshold_pct) {
      advice.q2_mi_beneficial.reasons.push_back("Q2_LOW_MISSINGNESS: " + fmt_pct(pct_incomplete) +
                                                " of records incomplete, below " +
                                                fmt_pct(threshold_pct));
    } else {
      advice.q2_mi_beneficial.reasons.push_back(
          "Q2_NO_AUXILIARIES: no auxiliary information and missingness not confined to covariates");
    }
  }

  // Q3: is a sensitivity analysis over the missingness assumption needed?
  if (flags.mnar_suspected) {
    advice.q3_sensitivity_needed.verdict = Verdict::Yes;
    advice.q3_sensitivity_needed.reasons.push_back(
        "Q3_MNAR_SUSPECTED: residual dependence of missingness on the value itself suspected");
  } else {
    advice.q3_sensitivity_needed.verdict = Verdict::No;
    advice.q3_sensitivity_needed.reasons.push_back(
        "Q3_MAR_ASSUMED: no missing-not-at-random mechanism suspected");
  }

  if (advice.q2_mi_beneficial.verdict == Verdict::Yes) {
    advice.recommendation.push_back("multiple imputation (primary)");
    advice.recommendation.push_back("complete records analysis (comparison)");
  } else {
    advice.recommendation.push_back("complete records analysis (primary)");
  }
  if (advice.q3_sensitivity_needed.verdict == Verdict::Yes) {
    advice.recommendation.push_back("delta-adjusted sensitivity analysis");
  }
  return advice;
}

}  // namespace tarmos
