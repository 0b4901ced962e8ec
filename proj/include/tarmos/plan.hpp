#ifndef TARMOS_PLAN_HPP
#define TARMOS_PLAN_HPP

#include <optional>
#include <string>
#include <vector>

#include "tarmos/dataset.hpp"
#include "tarmos/mice.hpp"
#include "tarmos/planner.hpp"
#include "tarmos/pooling.hpp"
#include "tarmos/sensitivity.hpp"
#include "tarmos/simgen.hpp"

namespace tarmos {

struct PlannerBlock {
  PlannerFlags flags;
  double threshold_pct = 5.0;
};

struct SimulationBlock {
  SimScenario scenario;
  ExperimentConfig config;
  std::vector<MethodSpec> methods;
};

// Parsed analysis-plan file.  The dataset/analysis/imputation sections are
// required for data commands; a plan carrying only a simulation block is
// valid for the simulate command.
struct AnalysisPlan {
  std::string dataset_path;
  Schema schema;
  AnalysisModelSpec analysis;
  ImputationPlan imputation;
  std::optional<SensitivitySpec> sensitivity;
  PlannerBlock planner;
  std::optional<SimulationBlock> simulation;
  std::string output_dir = "tarmos_out";

  bool has_data_sections = false;

  // Variables in the schema that are outside the analysis model.
  std::vector<std::string> auxiliary_vars() const;
  // Analysis-model variables (outcome, exposure, covariates).
  std::vector<std::string> analysis_vars() const;
};

AnalysisPlan parse_plan(const std::string& json_text, const std::string& origin);
AnalysisPlan load_plan(const std::string& path);

// FNV-1a 64-bit digest of the raw plan bytes, hex encoded.
std::string plan_digest(const std::string& bytes);

std::string read_file(const std::string& path);

}  // namespace tarmos

#endif
