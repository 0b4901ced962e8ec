#ifndef TARMOS_PLANNER_HPP
#define TARMOS_PLANNER_HPP

#include <optional>
#include <string>
#include <vector>

#include "tarmos/diagnostics.hpp"

namespace tarmos {

enum class Verdict { Yes, No, Uncertain };

struct ReasonedVerdict {
  Verdict verdict = Verdict::Uncertain;
  std::vector<std::string> reasons;  // machine-readable code, colon, detail
};

// Analyst-supplied judgments; the tool never infers these from data.
struct PlannerFlags {
  bool outcome_missingness_assoc = false;
  bool auxiliaries_available = false;
  bool mnar_suspected = false;
};

struct StrategyAdvice {
  ReasonedVerdict q1_cca_valid;
  ReasonedVerdict q2_mi_beneficial;
  ReasonedVerdict q3_sensitivity_needed;
  std::vector<std::string> recommendation;  // ordered analyses, primary first
};

// Decision-flow advisory over the three strategy questions: is a complete
// records analysis valid, would multiple imputation help, and is a
// sensitivity analysis needed.  Pure function; never enforced.
StrategyAdvice advise(const MissingSummary& summary, const PredictorReport& predictors,
                      const PlannerFlags& flags, double threshold_pct = 5.0,
                      const std::optional<std::string>& outcome = std::nullopt,
                      const std::optional<std::string>& exposure = std::nullopt);

const char* verdict_name(Verdict v);

}  // namespace tarmos

#endif
