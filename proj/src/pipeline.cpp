#include "tarmos/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "tarmos/errors.hpp"
#include "tarmos/parallel.hpp"
#include "tarmos/report.hpp"

namespace tarmos {

namespace {

std::string iso_utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

struct StageContext {
  AnalysisPlan plan;
  std::string out;
  unsigned threads = 1;
  RunManifest manifest;
};

void emit(StageContext& ctx, const std::string& name, const std::string& text) {
  const std::string path = ctx.out + "/" + name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write file '" + path + "'");
  f << text;
  ctx.manifest.outputs.push_back(path);
}

void require_data_sections(const StageContext& ctx, const std::string& command) {
  if (!ctx.plan.has_data_sections) {
    throw PlanError("command '" + command + "' needs the dataset/analysis/imputation sections");
  }
}

struct ExploreArtifacts {
  MissingSummary summary;
  PatternTable patterns;
  std::vector<GroupCompareRow> groups;
  PredictorReport predictors;
};

std::vector<std::string> base_column_names(const AnalysisPlan& plan) {
  std::vector<std::string> names;
  for (const auto& c : plan.schema.columns) names.push_back(c.name);
  return names;
}

ExploreArtifacts run_explore(const Dataset& d, const AnalysisPlan& plan) {
  ExploreArtifacts art;
  const auto analysis_vars = plan.analysis_vars();
  art.summary = missing_summary(d, analysis_vars);
  art.patterns = pattern_table(d, analysis_vars);
  auto mask = complete_record_mask(d, analysis_vars);
  const auto all_vars = base_column_names(plan);
  art.groups = group_compare(d, mask, all_vars);

  // Candidates: every base variable that varies on its observed rows and
  // yields a two-class outcome within them.
  std::vector<std::string> candidates;
  for (const auto& name : all_vars) {
    const Column& col = d.column(name);
    bool varies = false;
    bool mask0 = false, mask1 = false;
    double first = 0.0;
    bool have_first = false;
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
      if (!col.observed[r]) continue;
      if (!have_first) {
        first = col.cells[r];
        have_first = true;
      } else if (col.cells[r] != first) {
        varies = true;
      }
      (mask[r] ? mask1 : mask0) = true;
    }
    if (varies && mask0 && mask1) candidates.push_back(name);
  }
  if (!candidates.empty()) {
    art.predictors = missingness_predictors(d, mask, candidates, 1.0, true);
  }
  return art;
}

struct AnalysisArtifacts {
  std::vector<ResultRow> results;
  std::optional<SensitivityResults> sensitivity;
  std::vector<std::uint64_t> chain_seeds;
};

std::optional<double> exposure_fraction(const ImputationSet& set, const AnalysisPlan& plan) {
  const std::string& exposure = plan.analysis.exposure;
  if (set.completed.empty()) return std::nullopt;
  const Dataset& d0 = set.completed.front();
  if (!d0.has_column(exposure)) return std::nullopt;
  const std::size_t col = d0.column_index(exposure);
  if (d0.column(col).kind != ColumnKind::Binary) return std::nullopt;
  bool any_imputed = false;
  for (auto b : set.imputed_mask[col]) any_imputed |= b != 0;
  if (!any_imputed) return std::nullopt;
  return fraction_imputed_positive(set, exposure);
}

PooledResult pool_imputations(const ImputationSet& set, const AnalysisModelSpec& analysis) {
  std::vector<double> estimates(set.completed.size()), variances(set.completed.size());
  double nu_com = 0.0;
  for (std::size_t m = 0; m < set.completed.size(); ++m) {
    AnalysisFit fit = fit_analysis_model(set.completed[m], analysis);
    estimates[m] = fit.estimate;
    variances[m] = fit.variance;
    nu_com = fit.nu_com;
  }
  return pool_rubin(estimates, variances, nu_com);
}

AnalysisArtifacts run_analyze(const Dataset& d, const AnalysisPlan& plan, unsigned threads,
                              bool with_sensitivity) {
  AnalysisArtifacts art;
  ImputationSet set = impute_all(d, plan.imputation, threads);
  art.chain_seeds = set.chain_seeds;

  ResultRow mi;
  mi.method = "multiple_imputation";
  mi.pooled = pool_imputations(set, plan.analysis);
  mi.pct_imputed_positive = exposure_fraction(set, plan);
  art.results.push_back(std::move(mi));

  ResultRow cca;
  cca.method = "complete_records";
  cca.pooled = complete_records_analysis(d, plan.analysis);
  art.results.push_back(std::move(cca));

  if (with_sensitivity && plan.sensitivity) {
    art.sensitivity =
        run_delta_grid(d, plan.imputation, plan.analysis, *plan.sensitivity, threads);
    for (const auto& dr : art.sensitivity->per_delta) {
      ResultRow row;
      char label[48];
      if (std::isinf(dr.delta)) {
        std::snprintf(label, sizeof(label), "sensitivity_delta_inf");
      } else {
        std::snprintf(label, sizeof(label), "sensitivity_delta_%g", dr.delta);
      }
      row.method = label;
      row.pooled = dr.pooled;
      row.pct_imputed_positive = dr.fraction_imputed_positive;
      art.results.push_back(std::move(row));
    }
  }
  return art;
}

StrategyAdvice run_advise(const ExploreArtifacts& art, const AnalysisPlan& plan) {
  return advise(art.summary, art.predictors, plan.planner.flags, plan.planner.threshold_pct,
                plan.analysis.outcome, plan.analysis.exposure);
}

ExperimentReport run_simulation(const AnalysisPlan& plan, unsigned threads) {
  if (!plan.simulation) throw PlanError("plan has no simulation block");
  ExperimentConfig cfg = plan.simulation->config;
  cfg.threads = threads;
  return run_experiment(plan.simulation->scenario, plan.simulation->methods, cfg);
}

void dispatch(const std::string& command, StageContext& ctx) {
  if (command == "explore") {
    require_data_sections(ctx, command);
    Dataset d = load_csv(ctx.plan.dataset_path, ctx.plan.schema);
    ExploreArtifacts art = run_explore(d, ctx.plan);
    emit(ctx, "missing_summary.csv", missing_summary_csv(art.summary));
    emit(ctx, "pattern_table.csv", pattern_table_csv(art.patterns));
    emit(ctx, "group_compare.csv", group_compare_csv(art.groups));
    emit(ctx, "predictors.csv", predictors_csv(art.predictors));
    std::string md = "## Missingness by variable\n\n" + render_missing_summary_md(art.summary) +
                     "\n## Missingness patterns\n\n" + render_pattern_table_md(art.patterns) +
                     "\n## Complete versus incomplete records\n\n" +
                     render_group_compare_md(art.groups) + "\n## Predictors of completeness\n\n" +
                     render_predictors_md(art.predictors);
    emit(ctx, "explore.md", md);
    return;
  }
  if (command == "impute") {
    require_data_sections(ctx, command);
    Dataset d = load_csv(ctx.plan.dataset_path, ctx.plan.schema);
    ImputationSet set = impute_all(d, ctx.plan.imputation, ctx.threads);
    ctx.manifest.chain_seeds = set.chain_seeds;
    auto written = write_imputation_set(set, ctx.out + "/imputations");
    ctx.manifest.outputs.insert(ctx.manifest.outputs.end(), written.begin(), written.end());
    return;
  }
  if (command == "analyze") {
    require_data_sections(ctx, command);
    Dataset d = load_csv(ctx.plan.dataset_path, ctx.plan.schema);
    AnalysisArtifacts art = run_analyze(d, ctx.plan, ctx.threads, false);
    ctx.manifest.chain_seeds = art.chain_seeds;
    emit(ctx, "results.csv", results_csv(art.results));
    return;
  }
  if (command == "sensitivity") {
    require_data_sections(ctx, command);
    if (!ctx.plan.sensitivity) throw PlanError("plan has no sensitivity block");
    Dataset d = load_csv(ctx.plan.dataset_path, ctx.plan.schema);
    SensitivityResults res = run_delta_grid(d, ctx.plan.imputation, ctx.plan.analysis,
                                            *ctx.plan.sensitivity, ctx.threads);
    emit(ctx, "sensitivity.csv", sensitivity_csv(res));
    return;
  }
  if (command == "advise") {
    require_data_sections(ctx, command);
    Dataset d = load_csv(ctx.plan.dataset_path, ctx.plan.schema);
    ExploreArtifacts art = run_explore(d, ctx.plan);
    StrategyAdvice advice = run_advise(art, ctx.plan);
    emit(ctx, "advice.md", render_advice_md(advice));
    return;
  }
  if (command == "simulate") {
    ExperimentReport report = run_simulation(ctx.plan, ctx.threads);
    emit(ctx, "experiment.csv", experiment_csv(report));
    emit(ctx, "experiment.md", render_experiment_md(report));
    return;
  }
  if (command == "report") {
    ReportInputs inputs;
    inputs.plan = &ctx.plan;
    inputs.plan_digest = ctx.manifest.plan_digest;
    if (ctx.plan.has_data_sections) {
      Dataset d = load_csv(ctx.plan.dataset_path, ctx.plan.schema);
      ExploreArtifacts art = run_explore(d, ctx.plan);
      StrategyAdvice advice = run_advise(art, ctx.plan);
      AnalysisArtifacts analysis = run_analyze(d, ctx.plan, ctx.threads, true);
      ctx.manifest.chain_seeds = analysis.chain_seeds;
      emit(ctx, "missing_summary.csv", missing_summary_csv(art.summary));
      emit(ctx, "pattern_table.csv", pattern_table_csv(art.patterns));
      emit(ctx, "group_compare.csv", group_compare_csv(art.groups));
      emit(ctx, "predictors.csv", predictors_csv(art.predictors));
      emit(ctx, "results.csv", results_csv(analysis.results));
      if (analysis.sensitivity) {
        emit(ctx, "sensitivity.csv", sensitivity_csv(*analysis.sensitivity));
      }
      inputs.summary = std::move(art.summary);
      inputs.patterns = std::move(art.patterns);
      inputs.groups = std::move(art.groups);
      inputs.advice = std::move(advice);
      inputs.predictors = std::move(art.predictors);
      inputs.results = std::move(analysis.results);
      inputs.sensitivity = std::move(analysis.sensitivity);
    }
    if (ctx.plan.simulation) {
      inputs.experiment = run_simulation(ctx.plan, ctx.threads);
      emit(ctx, "experiment.csv", experiment_csv(*inputs.experiment));
    }
    emit(ctx, "report.md", render_report(inputs));
    return;
  }
  throw PlanError("unknown command '" + command + "'");
}

}  // namespace

int run_command(const std::string& command, const CliOptions& opts) {
  try {
    StageContext ctx;
    std::string plan_text = read_file(opts.plan_path);
    ctx.plan = parse_plan(plan_text, opts.plan_path);
    ctx.threads = resolve_threads(opts.threads);

    ctx.manifest.command = command;
    ctx.manifest.plan_path = opts.plan_path;
    ctx.manifest.plan_digest = plan_digest(plan_text);
    ctx.manifest.started_at = iso_utc_now();

    if (opts.seed) {
      ctx.plan.imputation.config.seed = *opts.seed;
      if (ctx.plan.simulation) ctx.plan.simulation->scenario.seed = *opts.seed;
      ctx.manifest.overrides.push_back("seed=" + std::to_string(*opts.seed));
    }
    if (opts.m) {
      ctx.plan.imputation.config.m = *opts.m;
      ctx.manifest.overrides.push_back("m=" + std::to_string(*opts.m));
    }
    if (opts.out_dir) {
      ctx.plan.output_dir = *opts.out_dir;
      ctx.manifest.overrides.push_back("out=" + *opts.out_dir);
    }
    ctx.out = ctx.plan.output_dir;
    ctx.manifest.master_seed = ctx.plan.has_data_sections
                                   ? ctx.plan.imputation.config.seed
                                   : (ctx.plan.simulation ? ctx.plan.simulation->scenario.seed : 0);

    std::filesystem::create_directories(ctx.out);
    dispatch(command, ctx);

    ctx.manifest.finished_at = iso_utc_now();
    write_manifest(ctx.manifest, ctx.out + "/run_manifest.json");
    return 0;
  } catch (const PlanError& e) {
    std::cerr << "error: stage=" << command << " kind=plan message=\"" << one_line(e.what())
              << "\"\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: stage=" << command << " kind=data message=\"" << one_line(e.what())
              << "\"\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "error: stage=" << command << " kind=numeric message=\"" << one_line(e.what())
              << "\"\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: stage=" << command << " kind=internal message=\"" << one_line(e.what())
              << "\"\n";
    return 4;
  }
}

}  // namespace tarmos
