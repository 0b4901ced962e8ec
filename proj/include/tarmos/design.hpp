#ifndef TARMOS_DESIGN_HPP
#define TARMOS_DESIGN_HPP

#include <string>
#include <vector>

#include "tarmos/dataset.hpp"
#include "tarmos/linalg.hpp"

namespace tarmos {

// Number of design columns contributed by a variable: categorical columns
// expand to K-1 indicator contrasts against their first level.
std::size_t design_width(const Dataset& d, const std::vector<std::string>& predictors);

// Design matrix over the given rows with a leading intercept column.
// Cells must be filled (no MISSING) on those rows.
Matrix build_design(const Dataset& d, const std::vector<std::string>& predictors,
                    const std::vector<std::size_t>& rows);

// Labels for each design column, "(intercept)" first.
std::vector<std::string> design_labels(const Dataset& d,
                                       const std::vector<std::string>& predictors);

}  // namespace tarmos

#endif
