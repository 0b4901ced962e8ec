#include "tarmos/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "tarmos/errors.hpp"

namespace tarmos {

namespace {

bool is_fractional(double power) { return power != std::floor(power); }

bool parse_double(const std::string& token, double& out) {
  const char* begin = token.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t') ++end;
  return *end == '\0';
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

// Splits CSV text into rows of fields, honoring quoted fields (embedded
// commas, doubled quotes, newlines) and CRLF line ends.
std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                const std::string& origin) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool any_char = false;

  auto push_field = [&]() {
    row.push_back(field);
    field.clear();
  };
  auto push_row = [&]() {
    push_field();
    rows.push_back(row);
    row.clear();
    any_char = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      any_char = true;
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        any_char = true;
        break;
      case ',':
        push_field();
        any_char = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any_char || !row.empty() || !field.empty()) push_row();
        break;
      default:
        field += c;
        any_char = true;
        break;
    }
  }
  if (in_quotes) throw DataError(origin + ": unterminated quoted field");
  if (any_char || !row.empty() || !field.empty()) push_row();
  return rows;
}

}  // namespace

void Schema::validate() const {
  std::set<std::string> names;
  for (const auto& col : columns) {
    if (col.name.empty()) throw PlanError("schema: empty column name");
    if (!names.insert(col.name).second) {
      throw PlanError("schema: duplicate column name '" + col.name + "'");
    }
    if (col.kind == ColumnKind::Derived) {
      throw PlanError("schema: column '" + col.name +
                      "' declared derived; use the derived-term list instead");
    }
    if (col.kind == ColumnKind::Categorical) {
      if (col.levels.size() < 2) {
        throw PlanError("schema: categorical column '" + col.name + "' needs >= 2 levels");
      }
      std::set<std::string> lv(col.levels.begin(), col.levels.end());
      if (lv.size() != col.levels.size()) {
        throw PlanError("schema: duplicate level in column '" + col.name + "'");
      }
    }
  }
  for (const auto& term : derived) {
    if (term.name.empty()) throw PlanError("schema: empty derived-term name");
    if (!names.insert(term.name).second) {
      throw PlanError("schema: derived term '" + term.name + "' clashes with another column");
    }
    auto it = std::find_if(columns.begin(), columns.end(),
                           [&](const ColumnSpec& c) { return c.name == term.source; });
    if (it == columns.end() || it->kind != ColumnKind::Continuous) {
      throw PlanError("schema: derived term '" + term.name +
                      "' must reference a declared continuous column, got '" + term.source + "'");
    }
  }
}

std::size_t Column::n_observed() const {
  std::size_t n = 0;
  for (auto o : observed) n += o;
  return n;
}

void Dataset::add_column(Column col) {
  if (col.cells.size() != col.observed.size()) {
    throw DataError("column '" + col.name + "': cell/mask length mismatch");
  }
  if (!columns_.empty() && col.cells.size() != n_rows_) {
    throw DataError("column '" + col.name + "': row count mismatch");
  }
  if (index_.count(col.name)) throw DataError("duplicate column '" + col.name + "'");
  n_rows_ = col.cells.size();
  index_[col.name] = columns_.size();
  columns_.push_back(std::move(col));
}

const Column& Dataset::column(const std::string& name) const {
  return columns_[column_index(name)];
}

Column& Dataset::column(const std::string& name) { return columns_[column_index(name)]; }

bool Dataset::has_column(const std::string& name) const { return index_.count(name) > 0; }

std::size_t Dataset::column_index(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw DataError("unknown variable '" + name + "'");
  return it->second;
}

double derived_value(double source, double power, const std::string& col_name) {
  if (source < 0.0 && is_fractional(power)) {
    throw DataError("column '" + col_name + "': fractional power of a negative value");
  }
  if (source == 0.0 && power < 0.0) {
    throw DataError("column '" + col_name + "': zero raised to a negative power");
  }
  return std::pow(source, power);
}

void Dataset::refresh_derived() {
  for (auto& col : columns_) {
    if (col.kind != ColumnKind::Derived) continue;
    const Column& src = column(col.source);
    for (std::size_t r = 0; r < n_rows_; ++r) {
      if (src.observed[r]) {
        if (src.cells[r] < 0.0 && is_fractional(col.power)) {
          throw DataError("column '" + col.name + "', row " + std::to_string(r + 1) +
                          ": fractional power of a negative value");
        }
        col.cells[r] = derived_value(src.cells[r], col.power, col.name);
        col.observed[r] = 1;
      } else {
        col.cells[r] = 0.0;
        col.observed[r] = 0;
      }
    }
  }
}

bool Dataset::identical_to(const Dataset& other) const {
  if (n_rows_ != other.n_rows_ || columns_.size() != other.columns_.size()) return false;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const Column& a = columns_[c];
    const Column& b = other.columns_[c];
    if (a.name != b.name || a.kind != b.kind || a.levels != b.levels) return false;
    if (a.observed != b.observed) return false;
    if (a.cells.size() != b.cells.size()) return false;
    if (!a.cells.empty() &&
        std::memcmp(a.cells.data(), b.cells.data(), a.cells.size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

Dataset load_csv(const std::string& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_csv_text(buf.str(), schema, path);
}

Dataset load_csv_text(const std::string& text, const Schema& schema, const std::string& origin) {
  schema.validate();
  auto rows = parse_csv(text, origin);
  if (rows.empty()) throw DataError(origin + ": missing header row");
  const auto& header = rows.front();

  std::set<std::string> derived_names;
  for (const auto& t : schema.derived) derived_names.insert(t.name);

  // Header -> schema column mapping; order-insensitive, derived columns in
  // the file are ignored (always recomputed).
  std::map<std::string, std::size_t> header_pos;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!header_pos.emplace(header[j], j).second) {
      throw DataError(origin + ": duplicate header '" + header[j] + "'");
    }
  }
  for (const auto& name : header) {
    bool declared = derived_names.count(name) ||
                    std::any_of(schema.columns.begin(), schema.columns.end(),
                                [&](const ColumnSpec& c) { return c.name == name; });
    if (!declared) throw DataError(origin + ": header column '" + name + "' not in schema");
  }
  for (const auto& spec : schema.columns) {
    if (!header_pos.count(spec.name)) {
      throw DataError(origin + ": missing header for column '" + spec.name + "'");
    }
  }

  const std::size_t n = rows.size() - 1;
  auto is_missing_token = [&](const std::string& tok) {
    return std::find(schema.missing_tokens.begin(), schema.missing_tokens.end(), tok) !=
           schema.missing_tokens.end();
  };

  Dataset d;
  for (const auto& spec : schema.columns) {
    Column col;
    col.name = spec.name;
    col.kind = spec.kind;
    col.levels = spec.levels;
    col.cells.assign(n, 0.0);
    col.observed.assign(n, 0);
    const std::size_t j = header_pos[spec.name];
    for (std::size_t r = 0; r < n; ++r) {
      const auto& record = rows[r + 1];
      if (record.size() != header.size()) {
        throw DataError(origin + ": row " + std::to_string(r + 1) + " has " +
                        std::to_string(record.size()) + " fields, expected " +
                        std::to_string(header.size()));
      }
      const std::string& tok = record[j];
      if (is_missing_token(tok)) continue;
      double value = 0.0;
      switch (spec.kind) {
        case ColumnKind::Continuous: {
          if (!parse_double(tok, value)) {
            throw DataError(origin + ": row " + std::to_string(r + 1) + ", column '" +
                            spec.name + "': unparseable cell '" + tok + "'");
          }
          break;
        }
        case ColumnKind::Binary: {
          if (!parse_double(tok, value) || (value != 0.0 && value != 1.0)) {
            throw DataError(origin + ": row " + std::to_string(r + 1) + ", column '" +
                            spec.name + "': binary cell must be 0 or 1, got '" + tok + "'");
          }
          break;
        }
        case ColumnKind::Categorical: {
          auto it = std::find(spec.levels.begin(), spec.levels.end(), tok);
          if (it == spec.levels.end()) {
            throw DataError(origin + ": row " + std::to_string(r + 1) + ", column '" +
                            spec.name + "': unknown categorical level '" + tok + "'");
          }
          value = static_cast<double>(it - spec.levels.begin());
          break;
        }
        case ColumnKind::Derived:
          break;  // unreachable; schema.validate rejects these
      }
      col.cells[r] = value;
      col.observed[r] = 1;
    }
    d.add_column(std::move(col));
  }

  for (const auto& term : schema.derived) {
    Column col;
    col.name = term.name;
    col.kind = ColumnKind::Derived;
    col.source = term.source;
    col.power = term.power;
    col.cells.assign(n, 0.0);
    col.observed.assign(n, 0);
    d.add_column(std::move(col));
  }
  d.refresh_derived();
  return d;
}

std::string format_cell(const Column& col, std::size_t row) {
  if (!col.observed[row]) return "";
  double v = col.cells[row];
  switch (col.kind) {
    case ColumnKind::Binary:
      return v == 0.0 ? "0" : "1";
    case ColumnKind::Categorical: {
      auto idx = static_cast<std::size_t>(v);
      return col.levels[idx];
    }
    case ColumnKind::Continuous:
    case ColumnKind::Derived: {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      return buf;
    }
  }
  return "";
}

std::string to_csv_text(const Dataset& d) {
  std::string out;
  for (std::size_t c = 0; c < d.n_cols(); ++c) {
    if (c) out += ',';
    out += csv_escape(d.column(c).name);
  }
  out += '\n';
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    for (std::size_t c = 0; c < d.n_cols(); ++c) {
      if (c) out += ',';
      out += csv_escape(format_cell(d.column(c), r));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file '" + path + "'");
  out << to_csv_text(d);
}

std::vector<std::uint8_t> complete_record_mask(const Dataset& d,
                                               const std::vector<std::string>& vars) {
  std::vector<std::size_t> idx;
  idx.reserve(vars.size());
  for (const auto& v : vars) idx.push_back(d.column_index(v));
  std::vector<std::uint8_t> mask(d.n_rows(), 1);
  for (std::size_t c : idx) {
    const auto& obs = d.column(c).observed;
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
      if (!obs[r]) mask[r] = 0;
    }
  }
  return mask;
}

}  // namespace tarmos
