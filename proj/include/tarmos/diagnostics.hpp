#ifndef TARMOS_DIAGNOSTICS_HPP
#define TARMOS_DIAGNOSTICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tarmos/dataset.hpp"

namespace tarmos {

struct VariableMissingness {
  std::string name;
  std::size_t n_observed = 0;
  std::size_t n_missing = 0;
  double pct_missing = 0.0;
};

struct MissingSummary {
  std::vector<VariableMissingness> variables;
  std::size_t n_rows = 0;
  std::size_t n_complete_records = 0;
  double pct_complete_records = 0.0;
};

struct PatternRow {
  std::uint32_t signature = 0;  // bit j set = variable j observed
  std::size_t count = 0;
};

struct PatternTable {
  std::vector<std::string> vars;
  std::vector<PatternRow> rows;  // count desc, signature asc
};

// Observed-cell summaries split by the complete-record mask.
struct GroupSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  std::vector<std::size_t> level_counts;  // categorical/binary only
};

struct GroupCompareRow {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<std::string> levels;
  GroupSummary complete;
  GroupSummary incomplete;
};

struct PredictorEffect {
  std::string label;  // level contrast or "per k unit(s)"
  double odds_ratio = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct PredictorRow {
  std::string name;
  std::vector<PredictorEffect> effects;
  double auc = 0.0;
  std::size_t n_used = 0;
  bool augmented = false;
};

struct PredictorReport {
  std::vector<PredictorRow> rows;           // one per candidate (crude models)
  std::vector<PredictorRow> adjusted_rows;  // joint model, when requested
};

MissingSummary missing_summary(const Dataset& d, const std::vector<std::string>& analysis_vars);

// One row per realized observed/missing signature over the selected
// variables (at most 31), ordered by descending count then signature.
PatternTable pattern_table(const Dataset& d, const std::vector<std::string>& vars);

std::vector<GroupCompareRow> group_compare(const Dataset& d,
                                           const std::vector<std::uint8_t>& mask,
                                           const std::vector<std::string>& vars);

// Univariate logistic regressions of the complete-record indicator on each
// candidate, with Wald CIs and the AUC of the fitted scores.  `scale`
// rescales continuous odds ratios to a per-k-units change.
PredictorReport missingness_predictors(const Dataset& d, const std::vector<std::uint8_t>& mask,
                                       const std::vector<std::string>& candidates,
                                       double scale = 1.0, bool adjusted = false);

}  // namespace tarmos

#endif
