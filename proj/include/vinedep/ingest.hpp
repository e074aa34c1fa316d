#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vinedep/json_io.hpp"

// Loading and curation of raw CSV tables: plausibility bounds turn outliers
// into missing cells, rows above a missingness threshold are dropped, and
// the remainder is median-imputed.  Missing cells are NaN throughout.

namespace vinedep {

enum class VarKind { continuous, ordinal, binary };

std::string to_string(VarKind k);
VarKind var_kind_from_string(const std::string& s);

struct VariableMeta {
  std::string name;
  VarKind kind = VarKind::continuous;
  std::string unit;
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
};

struct Column {
  VariableMeta meta;
  std::vector<double> values;  // NaN marks a missing cell
};

class DataTable {
 public:
  DataTable() = default;
  static DataTable from_columns(std::vector<Column> cols);

  size_t n_rows() const { return n_rows_; }
  size_t n_cols() const { return cols_.size(); }
  const std::vector<Column>& columns() const { return cols_; }
  const Column& column(size_t i) const { return cols_.at(i); }
  const Column* find(const std::string& name) const;
  int index_of(const std::string& name) const;  // -1 when absent
  std::vector<std::string> names() const;

  size_t missing_count() const;

 private:
  std::vector<Column> cols_;
  size_t n_rows_ = 0;
};

struct CurationLog {
  std::map<std::string, long long> out_of_bounds;
  std::map<std::string, long long> imputed;
  long long rows_dropped = 0;

  json to_json() const;
};

// True for the recognized missing codes: empty, NA, NaN, null (any case).
bool is_missing_token(const std::string& token);

std::vector<VariableMeta> schema_from_json(const json& j);
std::vector<VariableMeta> load_schema(const std::string& path);

DataTable load_table(const std::string& path, const std::vector<VariableMeta>& schema);
DataTable parse_csv(const std::string& text, const std::vector<VariableMeta>& schema);

DataTable apply_bounds(const DataTable& t, CurationLog& log);
DataTable filter_missing_rows(const DataTable& t, double row_threshold, CurationLog& log);
DataTable impute_median(const DataTable& t, CurationLog& log);

// Bounds -> row filter -> imputation, in that order.
DataTable curate(const DataTable& t, double row_threshold, CurationLog& log);

std::string to_csv(const DataTable& t);

}  // namespace vinedep
