#ifndef TARMOS_REPORT_HPP
#define TARMOS_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "tarmos/diagnostics.hpp"
#include "tarmos/plan.hpp"
#include "tarmos/planner.hpp"
#include "tarmos/pooling.hpp"
#include "tarmos/sensitivity.hpp"
#include "tarmos/simgen.hpp"

namespace tarmos {

inline constexpr const char* kToolVersion = "0.1.0";

struct ResultRow {
  std::string method;
  PooledResult pooled;
  std::optional<double> pct_imputed_positive;
};

struct ReportInputs {
  const AnalysisPlan* plan = nullptr;
  std::optional<MissingSummary> summary;
  std::optional<PatternTable> patterns;
  std::vector<GroupCompareRow> groups;
  std::optional<PredictorReport> predictors;
  std::optional<StrategyAdvice> advice;
  std::vector<ResultRow> results;
  std::optional<SensitivityResults> sensitivity;
  std::optional<ExperimentReport> experiment;
  std::string plan_digest;
};

// Markdown report with fixed section order: plan summary, missing-data
// description, strategy advice, results, reproducibility appendix.  Pure
// function of its inputs; timestamps live only in the run manifest.
std::string render_report(const ReportInputs& in);

// Markdown fragments for individual tables.
std::string render_missing_summary_md(const MissingSummary& s);
std::string render_pattern_table_md(const PatternTable& t);
std::string render_group_compare_md(const std::vector<GroupCompareRow>& rows);
std::string render_predictors_md(const PredictorReport& r);
std::string render_advice_md(const StrategyAdvice& a);
std::string render_results_md(const std::vector<ResultRow>& rows);
std::string render_experiment_md(const ExperimentReport& r);

// CSV artifacts carrying full precision.
std::string missing_summary_csv(const MissingSummary& s);
std::string pattern_table_csv(const PatternTable& t);
std::string group_compare_csv(const std::vector<GroupCompareRow>& rows);
std::string predictors_csv(const PredictorReport& r);
std::string results_csv(const std::vector<ResultRow>& rows);
std::string sensitivity_csv(const SensitivityResults& r);
std::string experiment_csv(const ExperimentReport& r);

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  std::string plan_path;
  std::string plan_digest;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> chain_seeds;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
  std::vector<std::string> overrides;  // recorded plan deviations
};

void write_manifest(const RunManifest& manifest, const std::string& path);

// Imputation set artifacts: one CSV per completed dataset plus a JSON
// manifest (seed, config, imputed-cell mask digest).
std::vector<std::string> write_imputation_set(const ImputationSet& set,
                                              const std::string& directory);

// Report numbers: estimates at 1 decimal place, p printed "<0.001" below
// 0.001, percentages at 1 decimal place.
std::string fmt_estimate(double v);
std::string fmt_p(double p);
std::string fmt_pct1(double v);
std::string fmt_full(double v);

}  // namespace tarmos

#endif
