#ifndef TARMOS_POOLING_HPP
#define TARMOS_POOLING_HPP

#include <optional>
#include <string>
#include <vector>

#include "tarmos/dataset.hpp"

namespace tarmos {

struct AnalysisModelSpec {
  std::string outcome;
  std::string exposure;
  std::vector<std::string> covariates;

  std::vector<std::string> model_vars() const;
  void validate(const Dataset& d) const;
};

struct AnalysisFit {
  double estimate = 0.0;   // exposure coefficient
  double variance = 0.0;   // squared standard error
  double nu_com = 0.0;     // complete-data residual df
  std::size_t n_used = 0;
};

struct PooledResult {
  double q_bar = 0.0;
  double w_bar = 0.0;
  double b = 0.0;
  double t = 0.0;
  double df = 0.0;  // infinity when b = 0 and no complete-data df is known
  double ci_low = 0.0;
  double ci_high = 0.0;
  double p = 1.0;
  std::size_t m = 0;
};

// Substantive model: OLS of outcome on exposure plus covariates.  The
// dataset must be complete on the model variables.
AnalysisFit fit_analysis_model(const Dataset& d, const AnalysisModelSpec& spec);

// Rubin's rules.  Classic df, replaced by the Barnard-Rubin small-sample
// adjustment whenever the complete-data df is supplied.
PooledResult pool_rubin(const std::vector<double>& estimates,
                        const std::vector<double>& variances,
                        std::optional<double> nu_com = std::nullopt);

// Single fit on the complete records, shaped like a pooled result
// (m = 1, b = 0) so reports can treat both uniformly.
PooledResult complete_records_analysis(const Dataset& d, const AnalysisModelSpec& spec);

}  // namespace tarmos

#endif
