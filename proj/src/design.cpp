#include "tarmos/design.hpp"

#include "tarmos/errors.hpp"

namespace tarmos {

std::size_t design_width(const Dataset& d, const std::vector<std::string>& predictors) {
  std::size_t width = 1;
  for (const auto& name : predictors) {
    const Column& col = d.column(name);
    width += col.kind == ColumnKind::Categorical ? col.levels.size() - 1 : 1;
  }
  return width;
}

Matrix build_design(const Dataset& d, const std::vector<std::string>& predictors,
                    const std::vector<std::size_t>& rows) {
  Matrix x(rows.size(), design_width(d, predictors), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) x(i, 0) = 1.0;

  std::size_t at = 1;
  for (const auto& name : predictors) {
    const Column& col = d.column(name);
    if (col.kind == ColumnKind::Categorical) {
      const std::size_t k_levels = col.levels.size();
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!col.observed[rows[i]]) {
          throw DataError("design matrix: MISSING cell in '" + name + "'");
        }
        auto level = static_cast<std::size_t>(col.cells[rows[i]]);
        if (level > 0) x(i, at + level - 1) = 1.0;
      }
      at += k_levels - 1;
    } else {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!col.observed[rows[i]]) {
          throw DataError("design matrix: MISSING cell in '" + name + "'");
        }
        x(i, at) = col.cells[rows[i]];
      }
      ++at;
    }
  }
  return x;
}

std::vector<std::string> design_labels(const Dataset& d,
                                       const std::vector<std::string>& predictors) {
  std::vector<std::string> labels{"(intercept)"};
  for (const auto& name : predictors) {
    const Column& col = d.column(name);
    if (col.kind == ColumnKind::Categorical) {
      for (std::size_t k = 1; k < col.levels.size(); ++k) {
        labels.push_back(name + "=" + col.levels[k]);
      }
    } else {
      labels.push_back(name);
    }
  }
  return labels;
}

}  // namespace tarmos
