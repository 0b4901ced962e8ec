#ifndef TARMOS_SENSITIVITY_HPP
#define TARMOS_SENSITIVITY_HPP

#include <optional>
#include <string>
#include <vector>

#include "tarmos/mice.hpp"
#include "tarmos/pooling.hpp"

namespace tarmos {

struct SensitivitySpec {
  std::string target;           // logistic-imputed variable receiving the shift
  std::vector<double> deltas;   // ascending log-odds shifts; +inf = always impute 1
  double alpha = 0.05;          // significance level for the tipping criterion
  std::size_t m_sens = 10;      // imputations per grid point

  void validate() const;
};

enum class TippingCriterion { CiCrossesZero, SignFlip };

struct DeltaResult {
  double delta = 0.0;
  PooledResult pooled;
  double fraction_imputed_positive = 0.0;
};

struct SensitivityResults {
  std::vector<DeltaResult> per_delta;  // grid order
  std::optional<double> tipping_delta;
};

// Pattern-mixture grid evaluation.  All grid points share one chain
// trajectory per imputation: the target's final-cycle fills are decided by
// comparing a common per-cell uniform against expit(x beta* + delta), so
// the imputed-positive cell sets are exactly nested across ascending
// deltas and the delta = 0 point is bit-identical to the primary run.
SensitivityResults run_delta_grid(const Dataset& d, const ImputationPlan& plan,
                                  const AnalysisModelSpec& analysis,
                                  const SensitivitySpec& spec, unsigned threads = 1);

// Smallest grid delta meeting the criterion, scanning in grid order.
std::optional<double> tipping_point(const SensitivityResults& results,
                                    TippingCriterion criterion, double alpha = 0.05);

// Mean over imputations of the share of originally-missing target cells
// imputed as 1.  Errors when the target has no missing cells.
double fraction_imputed_positive(const ImputationSet& s, const std::string& target);

// As above but from raw fill vectors (used by the grid evaluator).
double fraction_positive(const std::vector<std::vector<double>>& fills_per_imputation);

}  // namespace tarmos

#endif
