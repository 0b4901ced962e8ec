#ifndef TARMOS_DATASET_HPP
#define TARMOS_DATASET_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tarmos {

enum class ColumnKind { Continuous, Binary, Categorical, Derived };

struct DerivedTerm {
  std::string name;
  std::string source;
  double power = 1.0;
};

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<std::string> levels;  // categorical only
};

// Column declarations plus missing-token list and derived (power) terms.
// Categorical level sets come from the schema, not the data, so imputation
// can assign levels unseen among complete records.
struct Schema {
  std::vector<ColumnSpec> columns;
  std::vector<std::string> missing_tokens{"", "NA"};
  std::vector<DerivedTerm> derived;

  void validate() const;
};

// One variable.  Cells are doubles with an explicit observed mask; no
// sentinel values.  Categorical cells hold the 0-based level index.
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<std::string> levels;
  std::vector<double> cells;
  std::vector<std::uint8_t> observed;

  // derived columns only
  std::string source;
  double power = 1.0;

  std::size_t n_observed() const;
  std::size_t n_missing() const { return cells.size() - n_observed(); }
};

class Dataset {
 public:
  Dataset() = default;

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }

  void add_column(Column col);

  const Column& column(std::size_t idx) const { return columns_[idx]; }
  Column& column(std::size_t idx) { return columns_[idx]; }
  const Column& column(const std::string& name) const;
  Column& column(const std::string& name);
  bool has_column(const std::string& name) const;
  std::size_t column_index(const std::string& name) const;

  const std::vector<Column>& columns() const { return columns_; }

  bool is_observed(std::size_t col, std::size_t row) const {
    return columns_[col].observed[row] != 0;
  }
  double cell(std::size_t col, std::size_t row) const { return columns_[col].cells[row]; }
  void set_cell(std::size_t col, std::size_t row, double value) {
    columns_[col].cells[row] = value;
    columns_[col].observed[row] = 1;
  }
  void set_missing(std::size_t col, std::size_t row) {
    columns_[col].cells[row] = 0.0;
    columns_[col].observed[row] = 0;
  }

  // Recomputes every derived column from its source: source^power where the
  // source is observed, MISSING elsewhere.  Idempotent; never touches
  // non-derived columns.
  void refresh_derived();

  bool identical_to(const Dataset& other) const;

 private:
  std::vector<Column> columns_;
  std::map<std::string, std::size_t> index_;
  std::size_t n_rows_ = 0;
};

// CSV ingestion under a schema.  Header row required; order-insensitive.
// Derived columns present in the file are ignored and recomputed.
Dataset load_csv(const std::string& path, const Schema& schema);

// Parses CSV text (used by load_csv and the tests).
Dataset load_csv_text(const std::string& text, const Schema& schema, const std::string& origin);

// RFC-4180-style writer; missing cells become empty fields, continuous
// values are printed with round-trip precision.
void write_csv(const Dataset& d, const std::string& path);
std::string to_csv_text(const Dataset& d);

// Entry i is true iff every listed variable is observed in row i.
std::vector<std::uint8_t> complete_record_mask(const Dataset& d,
                                               const std::vector<std::string>& vars);

// source^power with the domain check for fractional powers of negatives.
double derived_value(double source, double power, const std::string& col_name);

std::string format_cell(const Column& col, std::size_t row);

}  // namespace tarmos

#endif
