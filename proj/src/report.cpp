#include "tarmos/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tarmos/errors.hpp"

namespace tarmos {

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file '" + path + "'");
  out << text;
}

std::string signature_string(std::uint32_t sig, std::size_t width) {
  std::string s;
  for (std::size_t j = 0; j < width; ++j) s += (sig >> j) & 1u ? 'o' : 'm';
  return s;
}

std::string group_summary_cell(const GroupCompareRow& row, const GroupSummary& g) {
  if (g.n == 0) return "-";
  if (row.kind == ColumnKind::Binary || row.kind == ColumnKind::Categorical) {
    std::string s;
    for (std::size_t k = 0; k < g.level_counts.size(); ++k) {
      if (k) s += "; ";
      double pct = 100.0 * static_cast<double>(g.level_counts[k]) / static_cast<double>(g.n);
      s += row.levels[k] + ": " + std::to_string(g.level_counts[k]) + " (" + fmt("%.1f", pct) +
           "%)";
    }
    return s;
  }
  return "mean " + fmt_estimate(g.mean) + " (SD " + fmt_estimate(g.sd) + "), median " +
         fmt_estimate(g.median) + " (IQR " + fmt_estimate(g.q1) + "-" + fmt_estimate(g.q3) + ")";
}

std::string or_cell(const PredictorEffect& e) {
  return fmt("%.2f", e.odds_ratio) + " (" + fmt("%.2f", e.ci_low) + ", " +
         fmt("%.2f", e.ci_high) + ")";
}

std::string delta_label(double delta) {
  if (std::isinf(delta)) return "inf";
  return fmt("%g", delta);
}

}  // namespace

std::string fmt_estimate(double v) { return fmt("%.1f", v); }

std::string fmt_p(double p) {
  if (p < 0.001) return "<0.001";
  return fmt("%.3f", p);
}

std::string fmt_pct1(double v) { return fmt("%.1f", v); }

std::string fmt_full(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt("%.17g", v);
}

std::string render_missing_summary_md(const MissingSummary& s) {
  std::string md = "| Variable | Available n (%) | Missing n (%) |\n|---|---|---|\n";
  for (const auto& v : s.variables) {
    double pct_avail = 100.0 - v.pct_missing;
    md += "| " + v.name + " | " + std::to_string(v.n_observed) + " (" + fmt_pct1(pct_avail) +
          "%) | " + std::to_string(v.n_missing) + " (" + fmt_pct1(v.pct_missing) + "%) |\n";
  }
  md += "\nComplete records: " + std::to_string(s.n_complete_records) + " of " +
        std::to_string(s.n_rows) + " (" + fmt_pct1(s.pct_complete_records) + "%).\n";
  return md;
}

std::string render_pattern_table_md(const PatternTable& t) {
  std::string md = "Pattern key (o = observed, m = missing) over: ";
  for (std::size_t j = 0; j < t.vars.size(); ++j) {
    if (j) md += ", ";
    md += t.vars[j];
  }
  md += "\n\n| Pattern | Count |\n|---|---|\n";
  for (const auto& row : t.rows) {
    md += "| `" + signature_string(row.signature, t.vars.size()) + "` | " +
          std::to_string(row.count) + " |\n";
  }
  return md;
}

std::string render_group_compare_md(const std::vector<GroupCompareRow>& rows) {
  std::string md =
      "| Variable | Complete records | Incomplete records |\n|---|---|---|\n";
  for (const auto& row : rows) {
    md += "| " + row.name + " | " + group_summary_cell(row, row.complete) + " | " +
          group_summary_cell(row, row.incomplete) + " |\n";
  }
  return md;
}

std::string render_predictors_md(const PredictorReport& r) {
  std::string md =
      "| Variable | Contrast | Odds ratio (95% CI) | AUC | n |\n|---|---|---|---|---|\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.effects.size(); ++i) {
      md += "| " + (i == 0 ? row.name : std::string("")) + " | " + row.effects[i].label + " | " +
            or_cell(row.effects[i]) + " | " + (i == 0 ? fmt("%.2f", row.auc) : std::string("")) +
            " | " + (i == 0 ? std::to_string(row.n_used) : std::string("")) + " |\n";
    }
  }
  if (!r.adjusted_rows.empty()) {
    md += "\nAdjusted (joint) model:\n\n";
    md += "| Variable | Contrast | Odds ratio (95% CI) | AUC | n |\n|---|---|---|---|---|\n";
    for (const auto& row : r.adjusted_rows) {
      for (std::size_t i = 0; i < row.effects.size(); ++i) {
        md += "| " + (i == 0 ? row.name : std::string("")) + " | " + row.effects[i].label +
              " | " + or_cell(row.effects[i]) + " | " +
              (i == 0 ? fmt("%.2f", row.auc) : std::string("")) + " | " +
              (i == 0 ? std::to_string(row.n_used) : std::string("")) + " |\n";
      }
    }
  }
  return md;
}

std::string render_advice_md(const StrategyAdvice& a) {
  std::string md;
  auto block = [&](const char* title, const ReasonedVerdict& v) {
    md += std::string("**") + title + ":** " + verdict_name(v.verdict) + "\n\n";
    for (const auto& r : v.reasons) md += "- `" + r + "`\n";
    md += "\n";
  };
  block("Q1 - complete records analysis likely valid", a.q1_cca_valid);
  block("Q2 - multiple imputation likely beneficial", a.q2_mi_beneficial);
  block("Q3 - sensitivity analysis needed", a.q3_sensitivity_needed);
  md += "**Recommended analyses (in order):**\n\n";
  for (std::size_t i = 0; i < a.recommendation.size(); ++i) {
    md += std::to_string(i + 1) + ". " + a.recommendation[i] + "\n";
  }
  return md;
}

std::string render_results_md(const std::vector<ResultRow>& rows) {
  std::string md =
      "| Method | Coefficient (95% CI) | p | % imputed positive |\n|---|---|---|---|\n";
  for (const auto& row : rows) {
    std::string pct =
        row.pct_imputed_positive ? fmt_pct1(100.0 * *row.pct_imputed_positive) : std::string("N/A");
    md += "| " + row.method + " | " + fmt_estimate(row.pooled.q_bar) + " (" +
          fmt_estimate(row.pooled.ci_low) + ", " + fmt_estimate(row.pooled.ci_high) + ") | " +
          fmt_p(row.pooled.p) + " | " + pct + " |\n";
  }
  return md;
}

std::string render_experiment_md(const ExperimentReport& r) {
  std::string md = "True coefficient: " + fmt("%g", r.true_b1) + "\n\n";
  md += "| Method | Mean estimate | Bias | MC-SE(bias) | Empirical SE | Mean model SE | "
        "Coverage | Reps |\n|---|---|---|---|---|---|---|---|\n";
  for (const auto& m : r.methods) {
    md += "| " + m.method + " | " + fmt("%.4f", m.mean_estimate) + " | " + fmt("%.4f", m.bias) +
          " | " + fmt("%.4f", m.mcse_bias) + " | " + fmt("%.4f", m.empirical_se) + " | " +
          fmt("%.4f", m.mean_model_se) + " | " + fmt("%.3f", m.coverage) + " | " +
          std::to_string(m.replications) + " |\n";
  }
  return md;
}

std::string render_report(const ReportInputs& in) {
  if (!in.plan) throw DataError("render_report: plan missing");
  const AnalysisPlan& plan = *in.plan;
  std::string md = "# Missing-data analysis report\n\n";

  md += "## 1. Analysis plan\n\n";
  if (plan.has_data_sections) {
    md += "- Dataset: `" + plan.dataset_path + "`\n";
    md += "- Analysis model: linear regression of `" + plan.analysis.outcome + "` on `" +
          plan.analysis.exposure + "`";
    if (!plan.analysis.covariates.empty()) {
      md += " adjusted for";
      for (const auto& c : plan.analysis.covariates) md += " `" + c + "`";
    }
    md += "\n- Imputations M = " + std::to_string(plan.imputation.config.m) +
          ", burn-in = " + std::to_string(plan.imputation.config.burn_in) + "\n";
    md += "- Imputation models:\n";
    for (const auto& spec : plan.imputation.specs) {
      const char* method = "bayes_linear";
      switch (spec.method) {
        case ImputeMethod::BayesLinear: method = "bayes_linear"; break;
        case ImputeMethod::Logistic: method = "logistic"; break;
        case ImputeMethod::Multinomial: method = "multinomial"; break;
        case ImputeMethod::Pmm: method = "pmm"; break;
      }
      md += "    - `" + spec.target + "`: " + method;
      if (spec.method == ImputeMethod::Pmm) md += " (k = " + std::to_string(spec.pmm_k) + ")";
      md += "\n";
    }
    if (in.sensitivity || plan.sensitivity) {
      const SensitivitySpec& s = *plan.sensitivity;
      md += "- Sensitivity: pattern-mixture shifts on `" + s.target + "`, deltas {";
      for (std::size_t i = 0; i < s.deltas.size(); ++i) {
        if (i) md += ", ";
        md += delta_label(s.deltas[i]);
      }
      md += "}, M per delta = " + std::to_string(s.m_sens) + "\n";
    }
  }
  if (plan.simulation) {
    md += "- Synthetic experiment: n = " + std::to_string(plan.simulation->scenario.n) +
          ", replications = " + std::to_string(plan.simulation->config.reps) + "\n";
  }
  md += "\n";

  md += "## 2. Missing-data description\n\n";
  if (in.summary) {
    md += "### 2.1 Missingness by variable\n\n" + render_missing_summary_md(*in.summary) + "\n";
  }
  if (in.patterns) {
    md += "### 2.2 Missingness patterns\n\n" + render_pattern_table_md(*in.patterns) + "\n";
  }
  if (!in.groups.empty()) {
    md += "### 2.3 Complete versus incomplete records\n\n" + render_group_compare_md(in.groups) +
          "\n";
  }
  if (in.predictors) {
    md += "### 2.4 Predictors of completeness\n\n" + render_predictors_md(*in.predictors) + "\n";
  }

  if (in.advice) {
    md += "## 3. Strategy advice\n\n" + render_advice_md(*in.advice) + "\n";
  }

  if (!in.results.empty()) {
    md += "## 4. Results\n\n" + render_results_md(in.results) + "\n";
    if (in.sensitivity) {
      if (in.sensitivity->tipping_delta) {
        md += "Tipping point: conclusion changes at delta = " +
              delta_label(*in.sensitivity->tipping_delta) + ".\n\n";
      } else {
        md += "Tipping point: none within the examined grid.\n\n";
      }
    }
  }
  if (in.experiment) {
    md += "## 5. Synthetic-data experiment\n\n" + render_experiment_md(*in.experiment) + "\n";
  }

  md += "## 6. Reproducibility\n\n";
  md += "- Tool version: " + std::string(kToolVersion) + "\n";
  md += "- Plan digest: `" + in.plan_digest + "`\n";
  if (plan.has_data_sections) {
    md += "- Master seed: " + std::to_string(plan.imputation.config.seed) + "\n";
    md += "- Imputations M = " + std::to_string(plan.imputation.config.m) +
          ", burn-in = " + std::to_string(plan.imputation.config.burn_in) + "\n";
    if (plan.sensitivity) {
      md += "- Sensitivity deltas: {";
      for (std::size_t i = 0; i < plan.sensitivity->deltas.size(); ++i) {
        if (i) md += ", ";
        md += delta_label(plan.sensitivity->deltas[i]);
      }
      md += "} with M = " + std::to_string(plan.sensitivity->m_sens) + " per delta\n";
    }
  }
  if (plan.simulation) {
    md += "- Simulation seed: " + std::to_string(plan.simulation->scenario.seed) + "\n";
  }
  return md;
}

std::string missing_summary_csv(const MissingSummary& s) {
  std::string csv = "variable,n_observed,n_missing,pct_missing\n";
  for (const auto& v : s.variables) {
    csv += v.name + "," + std::to_string(v.n_observed) + "," + std::to_string(v.n_missing) + "," +
           fmt_full(v.pct_missing) + "\n";
  }
  csv += "(complete records)," + std::to_string(s.n_complete_records) + "," +
         std::to_string(s.n_rows - s.n_complete_records) + "," +
         fmt_full(100.0 - s.pct_complete_records) + "\n";
  return csv;
}

std::string pattern_table_csv(const PatternTable& t) {
  std::string csv = "pattern,count\n";
  for (const auto& row : t.rows) {
    csv += signature_string(row.signature, t.vars.size()) + "," + std::to_string(row.count) + "\n";
  }
  return csv;
}

std::string group_compare_csv(const std::vector<GroupCompareRow>& rows) {
  std::string csv = "variable,group,stat,value\n";
  for (const auto& row : rows) {
    for (int g = 0; g < 2; ++g) {
      const GroupSummary& s = g == 0 ? row.complete : row.incomplete;
      const std::string group = g == 0 ? "complete" : "incomplete";
      csv += row.name + "," + group + ",n," + std::to_string(s.n) + "\n";
      if (row.kind == ColumnKind::Binary || row.kind == ColumnKind::Categorical) {
        for (std::size_t k = 0; k < s.level_counts.size(); ++k) {
          csv += row.name + "," + group + ",count[" + row.levels[k] + "]," +
                 std::to_string(s.level_counts[k]) + "\n";
        }
      } else if (s.n > 0) {
        csv += row.name + "," + group + ",mean," + fmt_full(s.mean) + "\n";
        csv += row.name + "," + group + ",sd," + fmt_full(s.sd) + "\n";
        csv += row.name + "," + group + ",median," + fmt_full(s.median) + "\n";
        csv += row.name + "," + group + ",q1," + fmt_full(s.q1) + "\n";
        csv += row.name + "," + group + ",q3," + fmt_full(s.q3) + "\n";
      }
    }
  }
  return csv;
}

std::string predictors_csv(const PredictorReport& r) {
  std::string csv = "model,variable,contrast,odds_ratio,ci_low,ci_high,auc,n_used\n";
  auto emit = [&](const char* model, const std::vector<PredictorRow>& rows) {
    for (const auto& row : rows) {
      for (const auto& e : row.effects) {
        csv += std::string(model) + "," + row.name + "," + e.label + "," + fmt_full(e.odds_ratio) +
               "," + fmt_full(e.ci_low) + "," + fmt_full(e.ci_high) + "," + fmt_full(row.auc) +
               "," + std::to_string(row.n_used) + "\n";
      }
    }
  };
  emit("crude", r.rows);
  emit("adjusted", r.adjusted_rows);
  return csv;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string csv = "method,estimate,ci_low,ci_high,p,pct_imputed_positive\n";
  for (const auto& row : rows) {
    csv += row.method + "," + fmt_full(row.pooled.q_bar) + "," + fmt_full(row.pooled.ci_low) + "," +
           fmt_full(row.pooled.ci_high) + "," + fmt_full(row.pooled.p) + ",";
    if (row.pct_imputed_positive) csv += fmt_full(100.0 * *row.pct_imputed_positive);
    csv += "\n";
  }
  return csv;
}

std::string sensitivity_csv(const SensitivityResults& r) {
  std::string csv =
      "delta,estimate,ci_low,ci_high,p,df,pct_imputed_positive,tipping\n";
  for (const auto& d : r.per_delta) {
    bool tipping = r.tipping_delta && *r.tipping_delta == d.delta;
    csv += delta_label(d.delta) + "," + fmt_full(d.pooled.q_bar) + "," +
           fmt_full(d.pooled.ci_low) + "," + fmt_full(d.pooled.ci_high) + "," +
           fmt_full(d.pooled.p) + "," + fmt_full(d.pooled.df) + "," +
           fmt_full(100.0 * d.fraction_imputed_positive) + "," + (tipping ? "1" : "0") + "\n";
  }
  return csv;
}

std::string experiment_csv(const ExperimentReport& r) {
  std::string csv =
      "method,mean_estimate,bias,mcse_bias,empirical_se,mean_model_se,coverage,replications,"
      "true_b1\n";
  for (const auto& m : r.methods) {
    csv += m.method + "," + fmt_full(m.mean_estimate) + "," + fmt_full(m.bias) + "," +
           fmt_full(m.mcse_bias) + "," + fmt_full(m.empirical_se) + "," +
           fmt_full(m.mean_model_se) + "," + fmt_full(m.coverage) + "," +
           std::to_string(m.replications) + "," + fmt_full(r.true_b1) + "\n";
  }
  return csv;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  nlohmann::json j;
  j["tool_version"] = manifest.tool_version;
  j["command"] = manifest.command;
  j["plan_path"] = manifest.plan_path;
  j["plan_digest"] = manifest.plan_digest;
  j["master_seed"] = manifest.master_seed;
  j["chain_seeds"] = manifest.chain_seeds;
  j["started_at"] = manifest.started_at;
  j["finished_at"] = manifest.finished_at;
  j["outputs"] = manifest.outputs;
  j["overrides"] = manifest.overrides;
  write_text_file(path, j.dump(2) + "\n");
}

std::vector<std::string> write_imputation_set(const ImputationSet& set,
                                              const std::string& directory) {
  std::filesystem::create_directories(directory);
  std::vector<std::string> written;
  for (std::size_t m = 0; m < set.completed.size(); ++m) {
    char name[32];
    std::snprintf(name, sizeof(name), "imp_%04zu.csv", m + 1);
    std::string path = directory + "/" + name;
    write_csv(set.completed[m], path);
    written.push_back(path);
  }

  // Mask digest covers column order and per-cell imputed flags.
  std::string mask_bytes;
  for (const auto& col_mask : set.imputed_mask) {
    for (auto b : col_mask) mask_bytes.push_back(b ? '1' : '0');
    mask_bytes.push_back('|');
  }
  nlohmann::json j;
  j["m"] = set.config.m;
  j["burn_in"] = set.config.burn_in;
  j["seed"] = set.config.seed;
  j["visit_order"] = set.config.visit_order == VisitOrder::AsConfigured
                         ? "as-configured"
                         : "ascending-missingness";
  j["chain_seeds"] = set.chain_seeds;
  j["imputed_mask_digest"] = plan_digest(mask_bytes);
  std::vector<std::string> columns;
  if (!set.completed.empty()) {
    for (const auto& col : set.completed.front().columns()) columns.push_back(col.name);
  }
  j["columns"] = columns;
  std::string manifest_path = directory + "/manifest.json";
  write_text_file(manifest_path, j.dump(2) + "\n");
  written.push_back(manifest_path);
  return written;
}

}  // namespace tarmos
