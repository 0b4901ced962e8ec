#include "tarmos/plan.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tarmos/errors.hpp"

namespace tarmos {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw PlanError("plan field '" + path + "': " + what);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing");
  return *it;
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::uint64_t get_u64(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !j.is_number_integer()) fail(path, "expected an integer");
  auto v = j.get<std::int64_t>();
  if (v < 0) fail(path, "must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

std::size_t get_count(const json& j, const std::string& path) {
  return static_cast<std::size_t>(get_u64(j, path));
}

// Powers may be written as numbers or as "a/b" fractions ("1/3").
double get_power(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    double num = 0.0, den = 0.0;
    if (std::sscanf(s.c_str(), "%lf/%lf", &num, &den) == 2 && den != 0.0) return num / den;
    double v = 0.0;
    if (std::sscanf(s.c_str(), "%lf", &v) == 1) return v;
    fail(path, "cannot parse power '" + s + "'");
  }
  fail(path, "expected a number or fraction string");
}

std::vector<std::string> get_string_list(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_string(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ColumnKind parse_kind(const std::string& s, const std::string& path) {
  if (s == "continuous") return ColumnKind::Continuous;
  if (s == "binary") return ColumnKind::Binary;
  if (s == "categorical") return ColumnKind::Categorical;
  fail(path, "unknown column kind '" + s + "' (continuous|binary|categorical)");
}

ImputeMethod parse_method(const std::string& s, const std::string& path) {
  if (s == "bayes_linear") return ImputeMethod::BayesLinear;
  if (s == "logistic") return ImputeMethod::Logistic;
  if (s == "multinomial") return ImputeMethod::Multinomial;
  if (s == "pmm") return ImputeMethod::Pmm;
  fail(path, "unknown imputation method '" + s + "' (bayes_linear|logistic|multinomial|pmm)");
}

Mechanism parse_mechanism(const std::string& s, const std::string& path) {
  if (s == "mcar") return Mechanism::Mcar;
  if (s == "mar") return Mechanism::Mar;
  if (s == "mnar_pattern_mixture") return Mechanism::MnarPatternMixture;
  fail(path, "unknown mechanism '" + s + "' (mcar|mar|mnar_pattern_mixture)");
}

void parse_dataset_block(const json& j, AnalysisPlan& plan) {
  plan.dataset_path = get_string(require(j, "path", "dataset"), "dataset.path");
  const json& cols = require(j, "columns", "dataset");
  if (!cols.is_array() || cols.empty()) fail("dataset.columns", "expected a non-empty array");
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const std::string path = "dataset.columns[" + std::to_string(i) + "]";
    ColumnSpec spec;
    spec.name = get_string(require(cols[i], "name", path), path + ".name");
    spec.kind = parse_kind(get_string(require(cols[i], "kind", path), path + ".kind"),
                           path + ".kind");
    if (spec.kind == ColumnKind::Categorical) {
      spec.levels = get_string_list(require(cols[i], "levels", path), path + ".levels");
    }
    plan.schema.columns.push_back(std::move(spec));
  }
  if (j.contains("missing_tokens")) {
    plan.schema.missing_tokens = get_string_list(j["missing_tokens"], "dataset.missing_tokens");
  }
  if (j.contains("derived")) {
    const json& der = j["derived"];
    if (!der.is_array()) fail("dataset.derived", "expected an array");
    for (std::size_t i = 0; i < der.size(); ++i) {
      const std::string path = "dataset.derived[" + std::to_string(i) + "]";
      DerivedTerm term;
      term.name = get_string(require(der[i], "name", path), path + ".name");
      term.source = get_string(require(der[i], "source", path), path + ".source");
      term.power = get_power(require(der[i], "power", path), path + ".power");
      plan.schema.derived.push_back(std::move(term));
    }
  }
  plan.schema.validate();
}

void parse_analysis_block(const json& j, AnalysisPlan& plan) {
  plan.analysis.outcome = get_string(require(j, "outcome", "analysis"), "analysis.outcome");
  plan.analysis.exposure = get_string(require(j, "exposure", "analysis"), "analysis.exposure");
  if (j.contains("covariates")) {
    plan.analysis.covariates = get_string_list(j["covariates"], "analysis.covariates");
  }
}

void parse_imputation_block(const json& j, AnalysisPlan& plan) {
  plan.imputation.config.m = get_count(require(j, "m", "imputation"), "imputation.m");
  plan.imputation.config.burn_in =
      get_count(require(j, "burn_in", "imputation"), "imputation.burn_in");
  plan.imputation.config.seed = get_u64(require(j, "seed", "imputation"), "imputation.seed");
  if (j.contains("visit_order")) {
    std::string v = get_string(j["visit_order"], "imputation.visit_order");
    if (v == "as-configured") {
      plan.imputation.config.visit_order = VisitOrder::AsConfigured;
    } else if (v == "ascending-missingness") {
      plan.imputation.config.visit_order = VisitOrder::AscendingMissingness;
    } else {
      fail("imputation.visit_order", "expected as-configured|ascending-missingness");
    }
  }
  const json& vars = require(j, "variables", "imputation");
  if (!vars.is_array()) fail("imputation.variables", "expected an array");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string path = "imputation.variables[" + std::to_string(i) + "]";
    VariableImputationSpec spec;
    spec.target = get_string(require(vars[i], "target", path), path + ".target");
    spec.method = parse_method(get_string(require(vars[i], "method", path), path + ".method"),
                               path + ".method");
    if (vars[i].contains("k")) spec.pmm_k = get_count(vars[i]["k"], path + ".k");
    if (vars[i].contains("omit")) spec.omit = get_string_list(vars[i]["omit"], path + ".omit");
    if (vars[i].contains("include")) {
      spec.include = get_string_list(vars[i]["include"], path + ".include");
    }
    if (vars[i].contains("offset_delta")) {
      spec.offset_delta = get_number(vars[i]["offset_delta"], path + ".offset_delta");
    }
    plan.imputation.specs.push_back(std::move(spec));
  }
}

void parse_sensitivity_block(const json& j, AnalysisPlan& plan) {
  SensitivitySpec spec;
  spec.target = get_string(require(j, "target", "sensitivity"), "sensitivity.target");
  const json& deltas = require(j, "deltas", "sensitivity");
  if (!deltas.is_array() || deltas.empty()) fail("sensitivity.deltas", "expected a non-empty array");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const std::string path = "sensitivity.deltas[" + std::to_string(i) + "]";
    if (deltas[i].is_string() && deltas[i].get<std::string>() == "inf") {
      spec.deltas.push_back(std::numeric_limits<double>::infinity());
    } else {
      spec.deltas.push_back(get_number(deltas[i], path));
    }
  }
  if (j.contains("alpha")) spec.alpha = get_number(j["alpha"], "sensitivity.alpha");
  if (j.contains("m")) spec.m_sens = get_count(j["m"], "sensitivity.m");
  spec.validate();
  plan.sensitivity = std::move(spec);
}

void parse_planner_block(const json& j, AnalysisPlan& plan) {
  if (j.contains("outcome_missingness_assoc")) {
    plan.planner.flags.outcome_missingness_assoc =
        get_bool(j["outcome_missingness_assoc"], "planner.outcome_missingness_assoc");
  }
  if (j.contains("auxiliaries_available")) {
    plan.planner.flags.auxiliaries_available =
        get_bool(j["auxiliaries_available"], "planner.auxiliaries_available");
  }
  if (j.contains("mnar_suspected")) {
    plan.planner.flags.mnar_suspected = get_bool(j["mnar_suspected"], "planner.mnar_suspected");
  }
  if (j.contains("threshold_pct")) {
    plan.planner.threshold_pct = get_number(j["threshold_pct"], "planner.threshold_pct");
  }
}

void parse_simulation_block(const json& j, AnalysisPlan& plan) {
  SimulationBlock block;
  const json& sc = require(j, "scenario", "simulation");
  SimScenario& s = block.scenario;
  s.n = get_count(require(sc, "n", "simulation.scenario"), "simulation.scenario.n");
  auto opt_num = [&](const char* key, double& out) {
    if (sc.contains(key)) out = get_number(sc[key], std::string("simulation.scenario.") + key);
  };
  opt_num("b0", s.b0);
  opt_num("b1", s.b1);
  opt_num("b2", s.b2);
  opt_num("noise_sd", s.noise_sd);
  opt_num("a0", s.a0);
  opt_num("a1", s.a1);
  opt_num("a2", s.a2);
  opt_num("delta_true", s.delta_true);
  s.mechanism = parse_mechanism(
      get_string(require(sc, "mechanism", "simulation.scenario"), "simulation.scenario.mechanism"),
      "simulation.scenario.mechanism");
  s.seed = get_u64(require(sc, "seed", "simulation.scenario"), "simulation.scenario.seed");
  if (sc.contains("missingness")) {
    const json& mms = sc["missingness"];
    if (!mms.is_array()) fail("simulation.scenario.missingness", "expected an array");
    for (std::size_t i = 0; i < mms.size(); ++i) {
      const std::string path = "simulation.scenario.missingness[" + std::to_string(i) + "]";
      MissingnessModel mm;
      mm.variable = get_string(require(mms[i], "variable", path), path + ".variable");
      auto opt_mm = [&](const char* key, double& out) {
        if (mms[i].contains(key)) out = get_number(mms[i][key], path + "." + key);
      };
      opt_mm("intercept", mm.intercept);
      opt_mm("on_outcome", mm.on_outcome);
      opt_mm("on_covariate", mm.on_covariate);
      opt_mm("on_auxiliary", mm.on_auxiliary);
      s.missingness.push_back(std::move(mm));
    }
  }
  s.validate();

  if (j.contains("reps")) block.config.reps = get_count(j["reps"], "simulation.reps");
  if (j.contains("m")) block.config.m = get_count(j["m"], "simulation.m");
  if (j.contains("burn_in")) block.config.burn_in = get_count(j["burn_in"], "simulation.burn_in");
  if (j.contains("include_auxiliary")) {
    block.config.include_auxiliary =
        get_bool(j["include_auxiliary"], "simulation.include_auxiliary");
  }

  const json& methods = require(j, "methods", "simulation");
  if (!methods.is_array() || methods.empty()) fail("simulation.methods", "expected a non-empty array");
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const std::string path = "simulation.methods[" + std::to_string(i) + "]";
    MethodSpec ms;
    if (methods[i].is_string()) {
      std::string name = methods[i].get<std::string>();
      if (name == "full_data") {
        ms.method = AnalysisMethod::FullData;
      } else if (name == "complete_records") {
        ms.method = AnalysisMethod::CompleteRecords;
      } else if (name == "multiple_imputation") {
        ms.method = AnalysisMethod::MultipleImputation;
      } else {
        fail(path, "unknown method '" + name + "'");
      }
    } else if (methods[i].is_object() && methods[i].contains("mi_delta")) {
      ms.method = AnalysisMethod::DeltaAdjusted;
      ms.delta = get_number(methods[i]["mi_delta"], path + ".mi_delta");
    } else {
      fail(path, "expected a method name or {\"mi_delta\": value}");
    }
    block.methods.push_back(ms);
  }
  plan.simulation = std::move(block);
}

}  // namespace

std::vector<std::string> AnalysisPlan::analysis_vars() const { return analysis.model_vars(); }

std::vector<std::string> AnalysisPlan::auxiliary_vars() const {
  auto model = analysis.model_vars();
  std::vector<std::string> aux;
  for (const auto& col : schema.columns) {
    if (std::find(model.begin(), model.end(), col.name) == model.end()) {
      aux.push_back(col.name);
    }
  }
  return aux;
}

AnalysisPlan parse_plan(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw PlanError(origin + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw PlanError(origin + ": plan must be a JSON object");

  AnalysisPlan plan;
  const bool has_dataset = j.contains("dataset");
  const bool has_analysis = j.contains("analysis");
  const bool has_imputation = j.contains("imputation");
  if (has_dataset || has_analysis || has_imputation) {
    if (!has_dataset) fail("dataset", "missing");
    if (!has_analysis) fail("analysis", "missing");
    if (!has_imputation) fail("imputation", "missing");
    parse_dataset_block(j["dataset"], plan);
    parse_analysis_block(j["analysis"], plan);
    parse_imputation_block(j["imputation"], plan);
    plan.imputation.analysis_vars = plan.analysis_vars();
    plan.has_data_sections = true;

    // References must resolve against the schema.
    auto known = [&](const std::string& name) {
      for (const auto& c : plan.schema.columns) {
        if (c.name == name) return true;
      }
      for (const auto& t : plan.schema.derived) {
        if (t.name == name) return true;
      }
      return false;
    };
    for (const auto& v : plan.analysis_vars()) {
      if (!known(v)) fail("analysis", "variable '" + v + "' not in dataset schema");
    }
    for (const auto& spec : plan.imputation.specs) {
      if (!known(spec.target)) {
        fail("imputation.variables", "target '" + spec.target + "' not in dataset schema");
      }
      for (const auto& o : spec.omit) {
        if (!known(o)) fail("imputation.variables", "omit '" + o + "' not in dataset schema");
      }
      for (const auto& inc : spec.include) {
        if (!known(inc)) fail("imputation.variables", "include '" + inc + "' not in dataset schema");
      }
    }
  }

  if (j.contains("sensitivity")) {
    if (!plan.has_data_sections) fail("sensitivity", "requires the dataset/analysis sections");
    parse_sensitivity_block(j["sensitivity"], plan);
    bool found = false;
    for (const auto& spec : plan.imputation.specs) {
      if (spec.target == plan.sensitivity->target) found = true;
    }
    if (!found) fail("sensitivity.target", "no imputation spec for '" + plan.sensitivity->target + "'");
  }
  if (j.contains("planner")) parse_planner_block(j["planner"], plan);
  if (j.contains("simulation")) parse_simulation_block(j["simulation"], plan);
  if (j.contains("output_dir")) plan.output_dir = get_string(j["output_dir"], "output_dir");

  if (!plan.has_data_sections && !plan.simulation) {
    throw PlanError(origin + ": plan needs dataset/analysis/imputation sections or a simulation block");
  }
  return plan;
}

AnalysisPlan load_plan(const std::string& path) {
  return parse_plan(read_file(path), path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string plan_digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tarmos
