#ifndef TARMOS_TEST_SUPPORT_HPP
#define TARMOS_TEST_SUPPORT_HPP

#include <limits>
#include <string>
#include <vector>

#include "tarmos/dataset.hpp"

namespace tarmos::test {

inline constexpr double kNA = std::numeric_limits<double>::quiet_NaN();

// Builds a column where NaN marks MISSING cells.
inline Column col(const std::string& name, ColumnKind kind, const std::vector<double>& values,
                  std::vector<std::string> levels = {}) {
  Column c;
  c.name = name;
  c.kind = kind;
  c.levels = std::move(levels);
  for (double v : values) {
    if (v != v) {
      c.cells.push_back(0.0);
      c.observed.push_back(0);
    } else {
      c.cells.push_back(v);
      c.observed.push_back(1);
    }
  }
  return c;
}

inline Dataset make_dataset(std::vector<Column> columns) {
  Dataset d;
  for (auto& c : columns) d.add_column(std::move(c));
  return d;
}

}  // namespace tarmos::test

#endif
