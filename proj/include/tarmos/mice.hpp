#ifndef TARMOS_MICE_HPP
#define TARMOS_MICE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tarmos/dataset.hpp"
#include "tarmos/rng.hpp"

namespace tarmos {

enum class ImputeMethod { BayesLinear, Logistic, Multinomial, Pmm };

struct VariableImputationSpec {
  std::string target;
  ImputeMethod method = ImputeMethod::BayesLinear;
  std::size_t pmm_k = 5;
  std::vector<std::string> omit;     // dropped from the default all-others set
  std::vector<std::string> include;  // derived columns added as predictors
  double offset_delta = 0.0;         // log-odds shift on imputed rows; logistic targets only
};

enum class VisitOrder { AsConfigured, AscendingMissingness };

struct ImputationConfig {
  std::size_t m = 2;
  std::size_t burn_in = 1;
  std::uint64_t seed = 0;
  VisitOrder visit_order = VisitOrder::AsConfigured;
};

struct ImputationPlan {
  std::vector<VariableImputationSpec> specs;
  ImputationConfig config;
  // Analysis-model variables for the compatibility guard; may be empty
  // when no substantive model is attached.
  std::vector<std::string> analysis_vars;
};

struct ImputationSet {
  std::vector<Dataset> completed;
  // 1 = cell was imputed (originally MISSING); aligned with dataset columns.
  std::vector<std::vector<std::uint8_t>> imputed_mask;
  std::vector<std::uint64_t> chain_seeds;
  ImputationConfig config;
};

// Captured target draws for coupled delta-grid evaluation: for each grid
// delta, the final-cycle fills of the target's originally missing cells,
// produced from uniforms and parameter draws shared across the grid.
struct DeltaGridRequest {
  std::string target;
  std::vector<double> deltas;
};

struct ChainResult {
  Dataset completed;
  // grid_fills[g][j] = fill for the j-th missing target cell under deltas[g].
  std::vector<std::vector<double>> grid_fills;
};

// Resolved predictor sets plus row bookkeeping; built once per run.
class MiceEngine {
 public:
  MiceEngine(const Dataset& original, const ImputationPlan& plan);

  ChainResult run_chain(std::size_t chain_index, std::uint64_t master_seed,
                        const std::optional<DeltaGridRequest>& grid = std::nullopt) const;

  ImputationSet impute_all(unsigned threads = 1) const;

  // Engine-internal imputation specs after validation (visit order applied).
  const std::vector<std::string>& visit_targets() const { return visit_targets_; }
  const std::vector<std::vector<std::string>>& resolved_predictors() const {
    return predictors_;
  }

  const Dataset& original() const { return original_; }
  std::vector<std::vector<std::uint8_t>> imputed_mask() const;

 private:
  struct StepPlan {
    VariableImputationSpec spec;
    std::size_t target_col = 0;
    std::vector<std::string> predictors;
    std::vector<std::size_t> rows_obs;  // originally observed
    std::vector<std::size_t> rows_mis;  // originally missing
  };

  void impute_variable(Dataset& state, const StepPlan& step, RngStream& rng,
                       const std::vector<double>* grid_deltas,
                       std::vector<std::vector<double>>* grid_fills) const;

  Dataset original_;
  ImputationPlan plan_;
  std::vector<StepPlan> steps_;  // in visit order
  std::vector<std::string> visit_targets_;
  std::vector<std::vector<std::string>> predictors_;
};

// One imputation value by predictive mean matching: among the k donors
// whose predictions are closest to target_pred, pick one uniformly and
// return its observed value.  Distance ties break toward the lowest donor
// index.
double pmm_match(const std::vector<double>& donor_preds, double target_pred,
                 const std::vector<double>& donor_values, std::size_t k, RngStream& rng);

// Convenience wrapper constructing the engine and running all chains.
ImputationSet impute_all(const Dataset& d, const ImputationPlan& plan, unsigned threads = 1);

}  // namespace tarmos

#endif
