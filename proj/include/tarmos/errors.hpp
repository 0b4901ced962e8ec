#ifndef TARMOS_ERRORS_HPP
#define TARMOS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tarmos {

// Error taxonomy maps onto CLI exit codes: plan 2, data 3, numeric 4.
struct PlanError : std::runtime_error {
  explicit PlanError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tarmos

#endif
