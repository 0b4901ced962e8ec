#include "tarmos/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tarmos/errors.hpp"
#include "tarmos/glm.hpp"
#include "tarmos/stats.hpp"

namespace tarmos {

namespace {

constexpr double kZ975 = 1.959963984540054;

GroupSummary summarize_group(const Column& col, const std::vector<double>& cells) {
  GroupSummary s;
  s.n = cells.size();
  if (col.kind == ColumnKind::Binary || col.kind == ColumnKind::Categorical) {
    std::size_t n_levels = col.kind == ColumnKind::Binary ? 2 : col.levels.size();
    s.level_counts.assign(n_levels, 0);
    for (double v : cells) ++s.level_counts[static_cast<std::size_t>(v)];
    return s;
  }
  if (cells.empty()) return s;
  s.mean = mean(cells);
  s.sd = cells.size() >= 2 ? std::sqrt(sample_variance(cells)) : 0.0;
  s.median = median(cells);
  s.q1 = quantile_type7(cells, 0.25);
  s.q3 = quantile_type7(cells, 0.75);
  return s;
}

// Expands a candidate into design columns (categorical -> indicator
// contrasts against the first level).  Returns per-column effect labels.
std::size_t candidate_width(const Column& col) {
  return col.kind == ColumnKind::Categorical ? col.levels.size() - 1 : 1;
}

void fill_candidate_columns(const Column& col, std::size_t row, Matrix& x, std::size_t x_row,
                            std::size_t first_col) {
  if (col.kind == ColumnKind::Categorical) {
    auto level = static_cast<std::size_t>(col.cells[row]);
    for (std::size_t k = 1; k < col.levels.size(); ++k) {
      x(x_row, first_col + k - 1) = level == k ? 1.0 : 0.0;
    }
  } else {
    x(x_row, first_col) = col.cells[row];
  }
}

std::vector<PredictorEffect> wald_effects(const Column& col, const std::vector<double>& beta,
                                          const Matrix& cov, std::size_t first_col,
                                          double scale) {
  std::vector<PredictorEffect> effects;
  if (col.kind == ColumnKind::Categorical) {
    for (std::size_t k = 1; k < col.levels.size(); ++k) {
      std::size_t j = first_col + k - 1;
      double se = std::sqrt(cov(j, j));
      PredictorEffect e;
      e.label = col.levels[k];
      e.odds_ratio = std::exp(beta[j]);
      e.ci_low = std::exp(beta[j] - kZ975 * se);
      e.ci_high = std::exp(beta[j] + kZ975 * se);
      effects.push_back(e);
    }
    return effects;
  }
  double k = col.kind == ColumnKind::Binary ? 1.0 : scale;
  std::size_t j = first_col;
  double se = std::sqrt(cov(j, j));
  PredictorEffect e;
  if (col.kind == ColumnKind::Binary) {
    e.label = "1";
  } else if (k == 1.0) {
    e.label = "per 1 unit";
  } else {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "per %g units", k);
    e.label = buf;
  }
  e.odds_ratio = std::exp(k * beta[j]);
  e.ci_low = std::exp(k * (beta[j] - kZ975 * se));
  e.ci_high = std::exp(k * (beta[j] + kZ975 * se));
  effects.push_back(e);
  return effects;
}

void check_not_constant(const Column& col, const std::vector<std::size_t>& rows) {
  bool varies = false;
  for (std::size_t i = 1; i < rows.size() && !varies; ++i) {
    varies = col.cells[rows[i]] != col.cells[rows[0]];
  }
  if (!varies) throw DataError("candidate '" + col.name + "' is constant on its observed rows");
}

}  // namespace

MissingSummary missing_summary(const Dataset& d, const std::vector<std::string>& analysis_vars) {
  MissingSummary s;
  s.n_rows = d.n_rows();
  for (const auto& name : analysis_vars) {
    const Column& col = d.column(name);
    VariableMissingness v;
    v.name = name;
    v.n_observed = col.n_observed();
    v.n_missing = col.n_missing();
    v.pct_missing =
        s.n_rows == 0 ? 0.0 : 100.0 * static_cast<double>(v.n_missing) / static_cast<double>(s.n_rows);
    s.variables.push_back(v);
  }
  auto mask = complete_record_mask(d, analysis_vars);
  for (auto m : mask) s.n_complete_records += m;
  s.pct_complete_records =
      s.n_rows == 0 ? 100.0
                    : 100.0 * static_cast<double>(s.n_complete_records) / static_cast<double>(s.n_rows);
  return s;
}

PatternTable pattern_table(const Dataset& d, const std::vector<std::string>& vars) {
  if (vars.size() > 31) throw DataError("pattern table limited to 31 variables");
  std::vector<std::size_t> idx;
  for (const auto& v : vars) idx.push_back(d.column_index(v));

  std::map<std::uint32_t, std::size_t> counts;
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    std::uint32_t sig = 0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      if (d.is_observed(idx[j], r)) sig |= (1u << j);
    }
    ++counts[sig];
  }

  PatternTable table;
  table.vars = vars;
  for (const auto& [sig, count] : counts) table.rows.push_back({sig, count});
  std::sort(table.rows.begin(), table.rows.end(), [](const PatternRow& a, const PatternRow& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.signature < b.signature;
  });
  return table;
}

std::vector<GroupCompareRow> group_compare(const Dataset& d,
                                           const std::vector<std::uint8_t>& mask,
                                           const std::vector<std::string>& vars) {
  if (mask.size() != d.n_rows()) throw DataError("group_compare: mask length mismatch");
  std::vector<GroupCompareRow> rows;
  for (const auto& name : vars) {
    const Column& col = d.column(name);
    std::vector<double> in_complete, in_incomplete;
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
      if (!col.observed[r]) continue;
      (mask[r] ? in_complete : in_incomplete).push_back(col.cells[r]);
    }
    GroupCompareRow row;
    row.name = name;
    row.kind = col.kind;
    row.levels = col.kind == ColumnKind::Binary ? std::vector<std::string>{"0", "1"} : col.levels;
    row.complete = summarize_group(col, in_complete);
    row.incomplete = summarize_group(col, in_incomplete);
    rows.push_back(std::move(row));
  }
  return rows;
}

PredictorReport missingness_predictors(const Dataset& d, const std::vector<std::uint8_t>& mask,
                                       const std::vector<std::string>& candidates,
                                       double scale, bool adjusted) {
  if (mask.size() != d.n_rows()) throw DataError("missingness_predictors: mask length mismatch");
  bool has0 = false, has1 = false;
  for (auto m : mask) (m ? has1 : has0) = true;
  if (!has0 || !has1) throw DataError("missingness_predictors: mask has a single class");

  PredictorReport report;
  for (const auto& name : candidates) {
    const Column& col = d.column(name);
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
      if (col.observed[r]) rows.push_back(r);
    }
    if (rows.empty()) throw DataError("candidate '" + name + "' has no observed rows");
    check_not_constant(col, rows);

    const std::size_t width = candidate_width(col);
    Matrix x(rows.size(), 1 + width, 0.0);
    std::vector<double> y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      x(i, 0) = 1.0;
      fill_candidate_columns(col, rows[i], x, i, 1);
      y[i] = mask[rows[i]] ? 1.0 : 0.0;
    }
    LogisticFit fit = fit_logistic(x, y);

    PredictorRow out;
    out.name = name;
    out.n_used = rows.size();
    out.augmented = fit.augmented;
    out.effects = wald_effects(col, fit.beta, fit.cov, 1, scale);
    out.auc = auc(linear_predictor(x, fit.beta), y);
    report.rows.push_back(std::move(out));
  }

  if (adjusted && !candidates.empty()) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
      bool all_obs = true;
      for (const auto& name : candidates) {
        if (!d.column(name).observed[r]) {
          all_obs = false;
          break;
        }
      }
      if (all_obs) rows.push_back(r);
    }
    if (rows.empty()) throw DataError("adjusted model: no rows with all candidates observed");

    std::size_t total_width = 1;
    for (const auto& name : candidates) total_width += candidate_width(d.column(name));
    Matrix x(rows.size(), total_width, 0.0);
    std::vector<double> y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      x(i, 0) = 1.0;
      std::size_t at = 1;
      for (const auto& name : candidates) {
        const Column& col = d.column(name);
        fill_candidate_columns(col, rows[i], x, i, at);
        at += candidate_width(col);
      }
      y[i] = mask[rows[i]] ? 1.0 : 0.0;
    }
    LogisticFit fit = fit_logistic(x, y);
    double joint_auc = auc(linear_predictor(x, fit.beta), y);

    std::size_t at = 1;
    for (const auto& name : candidates) {
      const Column& col = d.column(name);
      PredictorRow out;
      out.name = name;
      out.n_used = rows.size();
      out.augmented = fit.augmented;
      out.effects = wald_effects(col, fit.beta, fit.cov, at, scale);
      out.auc = joint_auc;
      report.adjusted_rows.push_back(std::move(out));
      at += candidate_width(col);
    }
  }
  return report;
}

}  // namespace tarmos
