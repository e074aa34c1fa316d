#include "vinedep/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "vinedep/errors.hpp"

namespace vinedep {

namespace {
const double kMissing = std::numeric_limits<double>::quiet_NaN();

bool is_nan(double v) { return std::isnan(v); }

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& tok, double& out) {
  const char* p = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(p, &end);
  if (end == p) return false;
  while (*end == ' ' || *end == '\t') ++end;
  if (*end != '\0') return false;
  if (!std::isfinite(v)) return false;
  out = v;
  return true;
}

// One CSV record; handles quoted fields with doubled-quote escapes.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string to_string(VarKind k) {
  switch (k) {
    case VarKind::continuous: return "continuous";
    case VarKind::ordinal: return "ordinal";
    case VarKind::binary: return "binary";
  }
  return "continuous";
}

VarKind var_kind_from_string(const std::string& s) {
  std::string v = lower(trim(s));
  if (v == "continuous") return VarKind::continuous;
  if (v == "ordinal") return VarKind::ordinal;
  if (v == "binary") return VarKind::binary;
  throw DataError("unknown variable kind: " + s);
}

DataTable DataTable::from_columns(std::vector<Column> cols) {
  DataTable t;
  if (cols.empty()) {
    return t;
  }
  size_t n = cols.front().values.size();
  std::unordered_set<std::string> seen;
  for (const auto& c : cols) {
    if (c.values.size() != n) {
      throw DataError("column length mismatch for variable " + c.meta.name);
    }
    if (!seen.insert(c.meta.name).second) {
      throw DataError("duplicate variable name: " + c.meta.name);
    }
    if (c.meta.lower_bound && c.meta.upper_bound &&
        !(*c.meta.lower_bound < *c.meta.upper_bound)) {
      throw DataError("invalid bounds for variable " + c.meta.name);
    }
  }
  t.cols_ = std::move(cols);
  t.n_rows_ = n;
  return t;
}

const Column* DataTable::find(const std::string& name) const {
  for (const auto& c : cols_) {
    if (c.meta.name == name) return &c;
  }
  return nullptr;
}

int DataTable::index_of(const std::string& name) const {
  for (size_t i = 0; i < cols_.size(); ++i) {
    if (cols_[i].meta.name == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> DataTable::names() const {
  std::vector<std::string> out;
  out.reserve(cols_.size());
  for (const auto& c : cols_) out.push_back(c.meta.name);
  return out;
}

size_t DataTable::missing_count() const {
  size_t m = 0;
  for (const auto& c : cols_) {
    for (double v : c.values) {
      if (is_nan(v)) ++m;
    }
  }
  return m;
}

json CurationLog::to_json() const {
  json vars = json::object();
  for (const auto& [name, n] : out_of_bounds) {
    vars[name]["n_out_of_bounds"] = n;
    auto it = imputed.find(name);
    vars[name]["n_imputed"] = (it == imputed.end()) ? 0 : it->second;
  }
  for (const auto& [name, n] : imputed) {
    if (!vars.contains(name)) {
      vars[name]["n_out_of_bounds"] = 0;
      vars[name]["n_imputed"] = n;
    }
  }
  json j;
  j["variables"] = vars;
  j["n_rows_dropped"] = rows_dropped;
  return j;
}

bool is_missing_token(const std::string& token) {
  std::string t = lower(trim(token));
  return t.empty() || t == "na" || t == "nan" || t == "null";
}

std::vector<VariableMeta> schema_from_json(const json& j) {
  if (!j.is_array()) throw DataError("schema must be a JSON array");
  std::vector<VariableMeta> out;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("name") || !e.contains("kind")) {
      throw DataError("schema entries need name and kind");
    }
    VariableMeta m;
    m.name = e.at("name").get<std::string>();
    m.kind = var_kind_from_string(e.at("kind").get<std::string>());
    if (e.contains("unit") && !e.at("unit").is_null()) {
      m.unit = e.at("unit").get<std::string>();
    }
    if (e.contains("lower") && !e.at("lower").is_null()) {
      m.lower_bound = e.at("lower").get<double>();
    }
    if (e.contains("upper") && !e.at("upper").is_null()) {
      m.upper_bound = e.at("upper").get<double>();
    }
    if (m.lower_bound && m.upper_bound && !(*m.lower_bound < *m.upper_bound)) {
      throw DataError("lower >= upper for variable " + m.name);
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<VariableMeta> load_schema(const std::string& path) {
  return schema_from_json(read_json_file(path));
}

DataTable parse_csv(const std::string& text, const std::vector<VariableMeta>& schema) {
  if (schema.empty()) throw DataError("empty schema");

  std::vector<std::string> lines;
  {
    size_t pos = 0;
    while (pos <= text.size()) {
      size_t nl = text.find('\n', pos);
      if (nl == std::string::npos) {
        std::string last = text.substr(pos);
        if (!trim(last).empty()) lines.push_back(last);
        break;
      }
      lines.push_back(text.substr(pos, nl - pos));
      pos = nl + 1;
    }
  }
  if (lines.empty()) throw DataError("CSV has no header row");

  std::vector<std::string> header = split_csv_line(lines[0]);
  for (auto& h : header) h = trim(h);

  std::vector<int> col_pos(schema.size(), -1);
  for (size_t s = 0; s < schema.size(); ++s) {
    for (size_t h = 0; h < header.size(); ++h) {
      if (header[h] == schema[s].name) {
        col_pos[s] = static_cast<int>(h);
        break;
      }
    }
    if (col_pos[s] < 0) {
      throw DataError("schema variable not found in CSV header: " + schema[s].name);
    }
  }

  size_t n = lines.size() - 1;
  std::vector<std::vector<std::string>> raw(schema.size());
  for (auto& r : raw) r.resize(n);
  for (size_t i = 0; i < n; ++i) {
    std::vector<std::string> fields = split_csv_line(lines[i + 1]);
    for (size_t s = 0; s < schema.size(); ++s) {
      size_t p = static_cast<size_t>(col_pos[s]);
      raw[s][i] = p < fields.size() ? trim(fields[p]) : "";
    }
  }

  std::vector<Column> cols(schema.size());
  for (size_t s = 0; s < schema.size(); ++s) {
    cols[s].meta = schema[s];
    cols[s].values.assign(n, kMissing);
    if (schema[s].kind == VarKind::binary) {
      // Binary columns may carry non-numeric codes; map the two distinct
      // codes to {0,1} (lexicographic order unless they are literally 0/1).
      std::set<std::string> codes;
      for (const auto& tok : raw[s]) {
        if (!is_missing_token(tok)) codes.insert(tok);
      }
      if (codes.size() > 2) {
        throw DataError("binary variable " + schema[s].name + " has " +
                        std::to_string(codes.size()) + " distinct codes");
      }
      bool numeric01 = !codes.empty();
      for (const auto& c : codes) {
        double v;
        if (!parse_number(c, v) || (v != 0.0 && v != 1.0)) {
          numeric01 = false;
          break;
        }
      }
      std::unordered_map<std::string, double> code_map;
      if (numeric01) {
        for (const auto& c : codes) {
          double v = 0.0;
          parse_number(c, v);
          code_map[c] = v;
        }
      } else {
        double next = 0.0;
        for (const auto& c : codes) code_map[c] = next++;  // std::set is sorted
      }
      for (size_t i = 0; i < n; ++i) {
        if (!is_missing_token(raw[s][i])) cols[s].values[i] = code_map.at(raw[s][i]);
      }
    } else {
      for (size_t i = 0; i < n; ++i) {
        const std::string& tok = raw[s][i];
        if (is_missing_token(tok)) continue;
        double v;
        if (parse_number(tok, v)) cols[s].values[i] = v;
        // Unparseable cells stay missing.
      }
    }
  }
  return DataTable::from_columns(std::move(cols));
}

DataTable load_table(const std::string& path, const std::vector<VariableMeta>& schema) {
  return parse_csv(read_text_file(path), schema);
}

DataTable apply_bounds(const DataTable& t, CurationLog& log) {
  std::vector<Column> cols = t.columns();
  for (auto& c : cols) {
    long long n_out = 0;
    const auto& lo = c.meta.lower_bound;
    const auto& hi = c.meta.upper_bound;
    if (lo || hi) {
      for (double& v : c.values) {
        if (is_nan(v)) continue;
        if ((lo && v < *lo) || (hi && v > *hi)) {
          v = kMissing;
          ++n_out;
        }
      }
    }
    log.out_of_bounds[c.meta.name] += n_out;
  }
  return DataTable::from_columns(std::move(cols));
}

DataTable filter_missing_rows(const DataTable& t, double row_threshold, CurationLog& log) {
  if (!(row_threshold >= 0.0 && row_threshold <= 1.0)) {
    throw DataError("row threshold must lie in [0,1]");
  }
  size_t n = t.n_rows(), d = t.n_cols();
  std::vector<char> keep(n, 1);
  size_t kept = 0;
  for (size_t i = 0; i < n; ++i) {
    size_t miss = 0;
    for (size_t s = 0; s < d; ++s) {
      if (is_nan(t.column(s).values[i])) ++miss;
    }
    double frac = d == 0 ? 0.0 : static_cast<double>(miss) / static_cast<double>(d);
    keep[i] = frac > row_threshold ? 0 : 1;
    kept += keep[i];
  }
  if (n > 0 && kept == 0) {
    throw DataError("all rows exceed the missingness threshold");
  }
  std::vector<Column> cols(d);
  for (size_t s = 0; s < d; ++s) {
    cols[s].meta = t.column(s).meta;
    cols[s].values.reserve(kept);
    for (size_t i = 0; i < n; ++i) {
      if (keep[i]) cols[s].values.push_back(t.column(s).values[i]);
    }
  }
  log.rows_dropped += static_cast<long long>(n - kept);
  return DataTable::from_columns(std::move(cols));
}

namespace {

// Median of the non-missing values.  Even count: midpoint for continuous,
// lower central order statistic for ordinal/binary (no invented categories).
double column_median(const Column& c) {
  std::vector<double> vals;
  vals.reserve(c.values.size());
  for (double v : c.values) {
    if (!is_nan(v)) vals.push_back(v);
  }
  if (vals.empty()) {
    throw DataError("variable " + c.meta.name + " has no observed values");
  }
  std::sort(vals.begin(), vals.end());
  size_t m = vals.size();
  if (m % 2 == 1) return vals[m / 2];
  double lo = vals[m / 2 - 1], hi = vals[m / 2];
  if (c.meta.kind == VarKind::continuous) return 0.5 * (lo + hi);
  return lo;
}

}  // namespace

DataTable impute_median(const DataTable& t, CurationLog& log) {
  std::vector<Column> cols = t.columns();
  for (auto& c : cols) {
    double med = column_median(c);
    long long n_imp = 0;
    for (double& v : c.values) {
      if (is_nan(v)) {
        v = med;
        ++n_imp;
      }
    }
    log.imputed[c.meta.name] += n_imp;
  }
  return DataTable::from_columns(std::move(cols));
}

DataTable curate(const DataTable& t, double row_threshold, CurationLog& log) {
  DataTable bounded = apply_bounds(t, log);
  DataTable filtered = filter_missing_rows(bounded, row_threshold, log);
  return impute_median(filtered, log);
}

std::string to_csv(const DataTable& t) {
  std::string out;
  for (size_t s = 0; s < t.n_cols(); ++s) {
    if (s) out += ',';
    out += t.column(s).meta.name;
  }
  out += '\n';
  char buf[40];
  for (size_t i = 0; i < t.n_rows(); ++i) {
    for (size_t s = 0; s < t.n_cols(); ++s) {
      if (s) out += ',';
      double v = t.column(s).values[i];
      if (is_nan(v)) {
        out += "NA";
      } else {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace vinedep
