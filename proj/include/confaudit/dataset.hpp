#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "confaudit/csv.hpp"
#include "confaudit/error.hpp"
#include "confaudit/rng.hpp"
#include "confaudit/util.hpp"

namespace confaudit {

enum class VarKind { Continuous, Categorical, Binary };
enum class VarGroup { Outcome, Pt, Hp, Img, Meta };

inline std::string to_string(VarKind k) {
  switch (k) {
    case VarKind::Continuous: return "continuous";
    case VarKind::Categorical: return "categorical";
    case VarKind::Binary: return "binary";
  }
  return "?";
}

inline std::string to_string(VarGroup g) {
  switch (g) {
    case VarGroup::Outcome: return "outcome";
    case VarGroup::Pt: return "pt";
    case VarGroup::Hp: return "hp";
    case VarGroup::Img: return "img";
    case VarGroup::Meta: return "meta";
  }
  return "?";
}

inline VarKind var_kind_from_string(const std::string& s) {
  if (s == "continuous") return VarKind::Continuous;
  if (s == "categorical") return VarKind::Categorical;
  if (s == "binary") return VarKind::Binary;
  throw ConfigError("unknown variable kind: " + s);
}

inline VarGroup var_group_from_string(const std::string& s) {
  if (s == "outcome") return VarGroup::Outcome;
  if (s == "pt") return VarGroup::Pt;
  if (s == "hp") return VarGroup::Hp;
  if (s == "img") return VarGroup::Img;
  if (s == "meta") return VarGroup::Meta;
  throw ConfigError("unknown variable group: " + s);
}

struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::Continuous;
  VarGroup group = VarGroup::Meta;
  std::string unit;
};

// Explicit level written into categorical cells by impute().
inline constexpr const char* kMissingLevel = "(Missing)";

class Schema {
 public:
  Schema() = default;

  explicit Schema(std::vector<VariableSpec> vars) : vars_(std::move(vars)) {
    int outcomes = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      const auto& v = vars_[i];
      if (v.name.empty()) throw ConfigError("schema variable with empty name");
      if (!index_.emplace(v.name, i).second)
        throw ConfigError("duplicate schema variable: " + v.name);
      if (v.group == VarGroup::Img)
        throw ConfigError("variable '" + v.name +
                          "': image features are supplied as feature columns, "
                          "not schema variables");
      if (v.group == VarGroup::Outcome) {
        ++outcomes;
        if (v.kind != VarKind::Binary)
          throw ConfigError("outcome variable must be binary: " + v.name);
        outcome_ = i;
      }
    }
    if (outcomes != 1)
      throw ConfigError("schema must declare exactly one outcome variable");
  }

  std::size_t size() const { return vars_.size(); }
  const std::vector<VariableSpec>& variables() const { return vars_; }
  const VariableSpec& at(std::size_t i) const { return vars_[i]; }

  std::optional<std::size_t> index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require(const std::string& name) const {
    auto idx = index_of(name);
    if (!idx) throw DataError("unknown variable: " + name);
    return *idx;
  }

  std::size_t outcome_index() const { return outcome_; }
  const std::string& outcome_name() const { return vars_[outcome_].name; }

  std::vector<std::string> names_in_group(VarGroup g) const {
    std::vector<std::string> out;
    for (const auto& v : vars_)
      if (v.group == g) out.push_back(v.name);
    return out;
  }

  static Schema from_json(const nlohmann::json& j) {
    if (!j.contains("variables") || !j["variables"].is_array())
      throw ConfigError("schema file must contain a 'variables' array");
    std::vector<VariableSpec> vars;
    for (const auto& v : j["variables"]) {
      VariableSpec spec;
      spec.name = v.at("name").get<std::string>();
      spec.kind = var_kind_from_string(v.at("kind").get<std::string>());
      spec.group = var_group_from_string(v.at("group").get<std::string>());
      if (v.contains("unit")) spec.unit = v["unit"].get<std::string>();
      vars.push_back(std::move(spec));
    }
    return Schema(std::move(vars));
  }

  static Schema from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open schema file: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("schema file " + path + ": " + e.what());
    }
    return from_json(j);
  }

  nlohmann::json to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : vars_) {
      nlohmann::json e{{"name", v.name},
                       {"kind", to_string(v.kind)},
                       {"group", to_string(v.group)}};
      if (!v.unit.empty()) e["unit"] = v.unit;
      arr.push_back(e);
    }
    return nlohmann::json{{"variables", arr}};
  }

 private:
  std::vector<VariableSpec> vars_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t outcome_ = 0;
};

// One variable's cells. Continuous and binary variables live in `num`,
// categorical levels in `str`; `missing` marks unusable cells either way.
struct Column {
  std::vector<double> num;
  std::vector<std::string> str;
  std::vector<char> missing;
};

// Immutable sample table: schema-typed columns, per-row patient and row ids,
// and an optional feature matrix sharing one dimension D across rows.
// Operations return new datasets.
class Dataset {
 public:
  Dataset() = default;

  Dataset(Schema schema, std::vector<std::string> row_ids,
          std::vector<std::string> patient_ids, std::vector<Column> cols,
          Eigen::MatrixXd features)
      : schema_(std::move(schema)),
        row_ids_(std::move(row_ids)),
        patient_ids_(std::move(patient_ids)),
        cols_(std::move(cols)),
        features_(std::move(features)) {
    std::size_t n = row_ids_.size();
    if (patient_ids_.size() != n)
      throw DataError("patient ids and row ids differ in length");
    if (cols_.size() != schema_.size())
      throw DataError("column count does not match schema");
    for (std::size_t c = 0; c < cols_.size(); ++c) {
      const auto& col = cols_[c];
      bool cat = schema_.at(c).kind == VarKind::Categorical;
      std::size_t len = cat ? col.str.size() : col.num.size();
      if (len != n || col.missing.size() != n)
        throw DataError("column '" + schema_.at(c).name + "' has wrong arity");
    }
    if (features_.size() > 0 && static_cast<std::size_t>(features_.rows()) != n)
      throw DataError("feature matrix row count does not match table");
  }

  std::size_t n_rows() const { return row_ids_.size(); }
  const Schema& schema() const { return schema_; }
  const std::vector<std::string>& row_ids() const { return row_ids_; }
  const std::vector<std::string>& patient_ids() const { return patient_ids_; }
  const std::vector<Column>& columns() const { return cols_; }
  const Column& column(std::size_t i) const { return cols_[i]; }
  const Column& column(const std::string& name) const {
    return cols_[schema_.require(name)];
  }

  bool has_features() const { return features_.cols() > 0; }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features_.cols()); }
  const Eigen::MatrixXd& features() const { return features_; }

  bool is_missing(std::size_t row, std::size_t col) const {
    return cols_[col].missing[row] != 0;
  }
  double value(std::size_t row, std::size_t col) const {
    return cols_[col].num[row];
  }
  const std::string& level(std::size_t row, std::size_t col) const {
    return cols_[col].str[row];
  }

  // Non-missing numeric values of a continuous/binary column.
  std::vector<double> observed(std::size_t col) const {
    std::vector<double> out;
    for (std::size_t r = 0; r < n_rows(); ++r)
      if (!cols_[col].missing[r]) out.push_back(cols_[col].num[r]);
    return out;
  }

  Eigen::MatrixXd features_for(std::span<const int> rows) const {
    Eigen::MatrixXd out(rows.size(), features_.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
      out.row(static_cast<Eigen::Index>(i)) = features_.row(rows[i]);
    return out;
  }

  Dataset subset(std::span<const int> rows) const {
    std::vector<std::string> rid, pid;
    rid.reserve(rows.size());
    pid.reserve(rows.size());
    for (int r : rows) {
      rid.push_back(row_ids_[static_cast<std::size_t>(r)]);
      pid.push_back(patient_ids_[static_cast<std::size_t>(r)]);
    }
    std::vector<Column> cols(cols_.size());
    for (std::size_t c = 0; c < cols_.size(); ++c) {
      bool cat = schema_.at(c).kind == VarKind::Categorical;
      for (int r : rows) {
        std::size_t rr = static_cast<std::size_t>(r);
        if (cat) cols[c].str.push_back(cols_[c].str[rr]);
        else cols[c].num.push_back(cols_[c].num[rr]);
        cols[c].missing.push_back(cols_[c].missing[rr]);
      }
      if (cat) cols[c].num.resize(0);
      else cols[c].str.resize(0);
      if (!cat) cols[c].str.clear();
    }
    Eigen::MatrixXd feats;
    if (has_features()) feats = features_for(rows);
    return Dataset(schema_, std::move(rid), std::move(pid), std::move(cols),
                   std::move(feats));
  }

  // Rows usable as outcome cases (1) / controls (0); missing outcomes are
  // reported in neither list.
  void outcome_rows(std::vector<int>& cases, std::vector<int>& controls) const {
    cases.clear();
    controls.clear();
    std::size_t oc = schema_.outcome_index();
    for (std::size_t r = 0; r < n_rows(); ++r) {
      if (cols_[oc].missing[r]) continue;
      if (cols_[oc].num[r] == 1.0) cases.push_back(static_cast<int>(r));
      else controls.push_back(static_cast<int>(r));
    }
  }

  Dataset with_columns(Schema schema, std::vector<Column> cols) const {
    return Dataset(std::move(schema), row_ids_, patient_ids_, std::move(cols),
                   features_);
  }

 private:
  Schema schema_;
  std::vector<std::string> row_ids_;
  std::vector<std::string> patient_ids_;
  std::vector<Column> cols_;
  Eigen::MatrixXd features_;
};

struct LoadOptions {
  char delimiter = ',';
  std::string features_path;  // companion feature file keyed by row id
  std::string feature_prefix = "f";
  std::string row_id_column = "row_id";
  std::string patient_id_column = "patient_id";
};

struct LoadResult {
  Dataset data;
  std::size_t parse_warnings = 0;  // unparseable cells marked missing
};

namespace detail {

inline bool is_missing_token(const std::string& s) {
  return s.empty() || s == "NA";
}

// Header columns named <prefix>0..<prefix>{D-1}; returns column index per
// feature dimension, or empty when no feature columns are present.
inline std::vector<std::size_t> feature_columns(
    const std::vector<std::string>& header, const std::string& prefix) {
  std::map<unsigned long, std::size_t> dims;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& h = header[i];
    if (h.size() <= prefix.size() || h.compare(0, prefix.size(), prefix) != 0)
      continue;
    const std::string tail = h.substr(prefix.size());
    if (!std::all_of(tail.begin(), tail.end(),
                     [](unsigned char c) { return std::isdigit(c); }))
      continue;
    dims[std::stoul(tail)] = i;
  }
  if (dims.empty()) return {};
  std::vector<std::size_t> out;
  unsigned long expect = 0;
  for (const auto& [d, idx] : dims) {
    if (d != expect++)
      throw DataError("feature columns must be contiguous starting at " +
                      prefix + "0");
    out.push_back(idx);
  }
  return out;
}

}  // namespace detail

inline LoadResult load_table(const std::string& path, const Schema& schema,
                             const LoadOptions& opts = {}) {
  DelimitedTable table = read_delimited(path, opts.delimiter);

  std::unordered_map<std::string, std::size_t> header_idx;
  for (std::size_t i = 0; i < table.header.size(); ++i)
    header_idx[table.header[i]] = i;

  auto require_col = [&](const std::string& name) {
    auto it = header_idx.find(name);
    if (it == header_idx.end())
      throw DataError(path + ": required column missing: " + name);
    return it->second;
  };

  std::size_t rid_col = require_col(opts.row_id_column);
  std::size_t pid_col = require_col(opts.patient_id_column);
  std::vector<std::size_t> var_cols;
  for (const auto& v : schema.variables()) var_cols.push_back(require_col(v.name));

  std::size_t n = table.rows.size();
  std::vector<std::string> row_ids(n), patient_ids(n);
  std::unordered_set<std::string> seen_ids;
  for (std::size_t r = 0; r < n; ++r) {
    row_ids[r] = table.rows[r][rid_col];
    patient_ids[r] = table.rows[r][pid_col];
    if (row_ids[r].empty()) throw DataError(path + ": empty row id in data row " + std::to_string(r + 1));
    if (patient_ids[r].empty())
      throw DataError(path + ": empty patient id in data row " + std::to_string(r + 1));
    if (!seen_ids.insert(row_ids[r]).second)
      throw DataError(path + ": duplicate row identifier: " + row_ids[r]);
  }

  LoadResult result;
  std::vector<Column> cols(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const VariableSpec& var = schema.at(c);
    Column& col = cols[c];
    col.missing.assign(n, 0);
    if (var.kind == VarKind::Categorical) col.str.assign(n, std::string());
    else col.num.assign(n, 0.0);

    for (std::size_t r = 0; r < n; ++r) {
      const std::string& cell = table.rows[r][var_cols[c]];
      if (detail::is_missing_token(cell)) {
        col.missing[r] = 1;
        continue;
      }
      if (var.kind == VarKind::Categorical) {
        col.str[r] = cell;
        continue;
      }
      double v = 0.0;
      if (!parse_double(cell, v)) {
        col.missing[r] = 1;
        ++result.parse_warnings;
        continue;
      }
      if (var.kind == VarKind::Binary && v != 0.0 && v != 1.0) {
        col.missing[r] = 1;
        ++result.parse_warnings;
        continue;
      }
      col.num[r] = v;
    }
  }

  Eigen::MatrixXd features;
  auto parse_features = [&](const DelimitedTable& src,
                            const std::vector<std::size_t>& fcols,
                            const std::vector<std::size_t>& row_map,
                            const std::string& src_path) {
    features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(fcols.size()));
    for (std::size_t r = 0; r < n; ++r) {
      const auto& row = src.rows[row_map[r]];
      for (std::size_t d = 0; d < fcols.size(); ++d) {
        double v = 0.0;
        if (!parse_double(row[fcols[d]], v))
          throw DataError(src_path + ": unparseable feature cell in row " +
                          std::to_string(row_map[r] + 1));
        features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = v;
      }
    }
  };

  std::vector<std::size_t> inline_features =
      detail::feature_columns(table.header, opts.feature_prefix);
  if (!inline_features.empty()) {
    std::vector<std::size_t> identity(n);
    for (std::size_t r = 0; r < n; ++r) identity[r] = r;
    parse_features(table, inline_features, identity, path);
  } else if (!opts.features_path.empty()) {
    DelimitedTable ftab = read_delimited(opts.features_path, opts.delimiter);
    std::unordered_map<std::string, std::size_t> fheader;
    for (std::size_t i = 0; i < ftab.header.size(); ++i) fheader[ftab.header[i]] = i;
    auto it = fheader.find(opts.row_id_column);
    if (it == fheader.end())
      throw DataError(opts.features_path + ": required column missing: " +
                      opts.row_id_column);
    std::vector<std::size_t> fcols =
        detail::feature_columns(ftab.header, opts.feature_prefix);
    if (fcols.empty())
      throw DataError(opts.features_path + ": no feature columns found");
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t r = 0; r < ftab.rows.size(); ++r)
      by_id[ftab.rows[r][it->second]] = r;
    std::vector<std::size_t> row_map(n);
    for (std::size_t r = 0; r < n; ++r) {
      auto hit = by_id.find(row_ids[r]);
      if (hit == by_id.end())
        throw DataError(opts.features_path + ": no feature row for id " + row_ids[r]);
      row_map[r] = hit->second;
    }
    parse_features(ftab, fcols, row_map, opts.features_path);
  }

  result.data = Dataset(schema, std::move(row_ids), std::move(patient_ids),
                        std::move(cols), std::move(features));
  return result;
}

// ---------------------------------------------------------------------------
// Value filtering

struct FilterRule {
  std::string variable;
  std::optional<double> min;
  std::optional<double> max;
};

struct FilterResult {
  Dataset data;
  std::size_t cells_changed = 0;
};

// Sets cells outside [min, max] to missing; in-range values are untouched.
// Applying the same rules again changes nothing.
inline FilterResult apply_filters(const Dataset& ds,
                                  const std::vector<FilterRule>& rules) {
  std::vector<Column> cols = ds.columns();
  std::size_t changed = 0;
  for (const auto& rule : rules) {
    std::size_t c = ds.schema().require(rule.variable);
    if (ds.schema().at(c).kind == VarKind::Categorical)
      throw DataError("range filter on categorical variable: " + rule.variable);
    if (rule.min && rule.max && !(*rule.min < *rule.max))
      throw ConfigError("filter on " + rule.variable + ": min must be < max");
    Column& col = cols[c];
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
      if (col.missing[r]) continue;
      double v = col.num[r];
      if ((rule.min && v < *rule.min) || (rule.max && v > *rule.max)) {
        col.missing[r] = 1;
        col.num[r] = 0.0;
        ++changed;
      }
    }
  }
  return {ds.with_columns(ds.schema(), std::move(cols)), changed};
}

// ---------------------------------------------------------------------------
// Binarization

enum class BinarizeMethod { MedianSplit, TopTwoLevels, LevelMap };

struct BinarizationRule {
  std::string variable;
  BinarizeMethod method = BinarizeMethod::MedianSplit;
  // level -> 0, 1, or missing (nullopt); levels absent from the map go missing
  std::map<std::string, std::optional<int>> level_map;
};

// Coerces each rule's variable to a binary 0/1 column.
//   median-split:   1 iff value strictly greater than the median of the
//                   non-missing values (ties at the median map to 0)
//   top-two-levels: the two most frequent levels become 0 (most frequent)
//                   and 1; frequency ties break alphabetically; all other
//                   levels become missing
//   level-map:      explicit mapping; unmapped levels become missing
inline Dataset binarize(const Dataset& ds,
                        const std::vector<BinarizationRule>& rules) {
  std::vector<Column> cols = ds.columns();
  std::vector<VariableSpec> vars = ds.schema().variables();

  for (const auto& rule : rules) {
    std::size_t c = ds.schema().require(rule.variable);
    const VariableSpec& var = ds.schema().at(c);
    const Column& src = ds.column(c);
    Column out;
    out.num.assign(ds.n_rows(), 0.0);
    out.missing = src.missing;

    if (rule.method == BinarizeMethod::MedianSplit) {
      if (var.kind != VarKind::Continuous)
        throw DataError("median-split requires a continuous variable: " +
                        rule.variable);
      std::vector<double> obs = ds.observed(c);
      std::vector<double> distinct = obs;
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      if (distinct.size() < 2)
        throw DataError("binarize: fewer than two distinct values in " +
                        rule.variable);
      double med = median(obs);
      for (std::size_t r = 0; r < ds.n_rows(); ++r)
        if (!src.missing[r]) out.num[r] = src.num[r] > med ? 1.0 : 0.0;
    } else {
      if (var.kind != VarKind::Categorical)
        throw DataError("level-based binarization requires a categorical variable: " +
                        rule.variable);
      if (rule.method == BinarizeMethod::TopTwoLevels) {
        std::map<std::string, std::size_t> counts;
        for (std::size_t r = 0; r < ds.n_rows(); ++r)
          if (!src.missing[r]) ++counts[src.str[r]];
        if (counts.size() < 2)
          throw DataError("binarize: fewer than two distinct levels in " +
                          rule.variable);
        std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(),
                                                                counts.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
          if (a.second != b.second) return a.second > b.second;
          return a.first < b.first;
        });
        const std::string& zero = ranked[0].first;
        const std::string& one = ranked[1].first;
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
          if (src.missing[r]) continue;
          if (src.str[r] == zero) out.num[r] = 0.0;
          else if (src.str[r] == one) out.num[r] = 1.0;
          else out.missing[r] = 1;
        }
      } else {
        std::size_t distinct_in = 0;
        {
          std::unordered_set<std::string> seen;
          for (std::size_t r = 0; r < ds.n_rows(); ++r)
            if (!src.missing[r]) seen.insert(src.str[r]);
          distinct_in = seen.size();
        }
        if (distinct_in < 2)
          throw DataError("binarize: fewer than two distinct levels in " +
                          rule.variable);
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
          if (src.missing[r]) continue;
          auto it = rule.level_map.find(src.str[r]);
          if (it == rule.level_map.end() || !it->second) out.missing[r] = 1;
          else out.num[r] = static_cast<double>(*it->second);
        }
      }
    }
    cols[c] = std::move(out);
    vars[c].kind = VarKind::Binary;
  }
  return ds.with_columns(Schema(std::move(vars)), std::move(cols));
}

// Default rules covering every PT/HP covariate that is not already binary.
inline std::vector<BinarizationRule> default_binarization_rules(const Dataset& ds) {
  std::vector<BinarizationRule> rules;
  for (const auto& v : ds.schema().variables()) {
    if (v.group != VarGroup::Pt && v.group != VarGroup::Hp) continue;
    if (v.kind == VarKind::Binary) continue;
    BinarizationRule rule;
    rule.variable = v.name;
    rule.method = v.kind == VarKind::Continuous ? BinarizeMethod::MedianSplit
                                                : BinarizeMethod::TopTwoLevels;
    rules.push_back(std::move(rule));
  }
  return rules;
}

// ---------------------------------------------------------------------------
// Imputation
//
// Covariate columns (PT and HP groups) are completed so no missing cells
// remain: categorical cells get the explicit "(Missing)" level, binary
// columns with missing cells are widened to categorical {"0","1","(Missing)"},
// and continuous cells are filled with the observed median. Variables named
// in `regression_targets` are instead predicted by an ordinary least-squares
// fit (with intercept) on all other covariates, which receive their simple
// imputation first; if the design is degenerate (condition number > 1e10) the
// target falls back to median imputation with a warning. The outcome and
// meta columns are never touched, and observed cells are left bit-identical.

struct ImputeResult {
  Dataset data;
  std::vector<std::string> warnings;
};

namespace detail {

struct EncodedDesign {
  Eigen::MatrixXd X;
  std::vector<std::string> names;
};

// Numeric coding of covariate columns over all rows: continuous and binary
// as one column; categorical as one-hot over all levels except a reference
// (the most frequent level other than "(Missing)", ties alphabetical), so
// "(Missing)" always keeps its own indicator.
inline EncodedDesign encode_columns(const Dataset& ds,
                                    const std::vector<std::size_t>& col_idx) {
  EncodedDesign out;
  std::size_t n = ds.n_rows();
  std::vector<Eigen::VectorXd> columns;
  for (std::size_t c : col_idx) {
    const VariableSpec& var = ds.schema().at(c);
    const Column& col = ds.column(c);
    for (std::size_t r = 0; r < n; ++r)
      if (col.missing[r])
        throw DataError("design matrix requires imputed data; variable '" +
                        var.name + "' has missing cells");
    if (var.kind == VarKind::Categorical) {
      std::map<std::string, std::size_t> counts;
      for (std::size_t r = 0; r < n; ++r) ++counts[col.str[r]];
      std::string reference;
      std::size_t best = 0;
      for (const auto& [lvl, cnt] : counts) {
        if (lvl == kMissingLevel) continue;
        if (cnt > best || (cnt == best && (reference.empty() || lvl < reference))) {
          best = cnt;
          reference = lvl;
        }
      }
      if (reference.empty()) reference = counts.begin()->first;
      for (const auto& [lvl, cnt] : counts) {
        if (lvl == reference) continue;
        Eigen::VectorXd v(n);
        for (std::size_t r = 0; r < n; ++r) v(static_cast<Eigen::Index>(r)) = col.str[r] == lvl ? 1.0 : 0.0;
        columns.push_back(std::move(v));
        out.names.push_back(var.name + "=" + lvl);
      }
    } else {
      Eigen::VectorXd v(n);
      for (std::size_t r = 0; r < n; ++r) v(static_cast<Eigen::Index>(r)) = col.num[r];
      columns.push_back(std::move(v));
      out.names.push_back(var.name);
    }
  }
  out.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) out.X.col(static_cast<Eigen::Index>(j)) = columns[j];
  return out;
}

}  // namespace detail

inline ImputeResult impute(const Dataset& ds,
                           const std::vector<std::string>& regression_targets) {
  std::vector<Column> cols = ds.columns();
  std::vector<VariableSpec> vars = ds.schema().variables();
  std::vector<std::string> warnings;

  std::unordered_set<std::string> targets(regression_targets.begin(),
                                          regression_targets.end());
  for (const auto& t : regression_targets) {
    std::size_t c = ds.schema().require(t);
    if (ds.schema().at(c).kind != VarKind::Continuous)
      throw DataError("regression imputation target must be continuous: " + t);
    if (ds.observed(c).empty())
      throw DataError("regression target has zero observed rows: " + t);
  }

  auto is_covariate = [&](const VariableSpec& v) {
    return v.group == VarGroup::Pt || v.group == VarGroup::Hp;
  };

  // simple pass: medians and explicit missing levels
  for (std::size_t c = 0; c < vars.size(); ++c) {
    if (!is_covariate(vars[c]) || targets.count(vars[c].name)) continue;
    Column& col = cols[c];
    bool any_missing = std::any_of(col.missing.begin(), col.missing.end(),
                                   [](char m) { return m != 0; });
    if (!any_missing) continue;
    if (vars[c].kind == VarKind::Continuous) {
      std::vector<double> obs = ds.observed(c);
      if (obs.empty())
        throw DataError("cannot impute fully-missing variable: " + vars[c].name);
      double med = median(obs);
      for (std::size_t r = 0; r < col.missing.size(); ++r)
        if (col.missing[r]) {
          col.num[r] = med;
          col.missing[r] = 0;
        }
    } else {
      if (vars[c].kind == VarKind::Binary) {
        // widen to categorical so missingness stays an explicit level
        col.str.assign(col.num.size(), std::string());
        for (std::size_t r = 0; r < col.num.size(); ++r)
          col.str[r] = col.missing[r] ? kMissingLevel
                                      : (col.num[r] == 1.0 ? "1" : "0");
        col.num.clear();
        vars[c].kind = VarKind::Categorical;
        std::fill(col.missing.begin(), col.missing.end(), 0);
      } else {
        for (std::size_t r = 0; r < col.str.size(); ++r)
          if (col.missing[r]) {
            col.str[r] = kMissingLevel;
            col.missing[r] = 0;
          }
      }
    }
  }

  if (regression_targets.empty())
    return {ds.with_columns(Schema(std::move(vars)), std::move(cols)), warnings};

  Dataset simple = ds.with_columns(Schema(vars), cols);

  // regression pass per target, on the simply-imputed covariates
  for (const auto& t : regression_targets) {
    std::size_t tc = simple.schema().require(t);
    std::vector<std::size_t> predictors;
    for (std::size_t c = 0; c < simple.schema().size(); ++c) {
      const auto& v = simple.schema().at(c);
      if (c != tc && is_covariate(v) && !targets.count(v.name))
        predictors.push_back(c);
    }

    Column& col = cols[tc];
    std::vector<std::size_t> missing_rows;
    for (std::size_t r = 0; r < col.missing.size(); ++r)
      if (col.missing[r]) missing_rows.push_back(r);
    if (missing_rows.empty()) continue;

    bool fell_back = false;
    if (predictors.empty()) {
      fell_back = true;
      warnings.push_back("impute: no predictors available for " + t +
                         "; used median imputation");
    } else {
      detail::EncodedDesign design = detail::encode_columns(simple, predictors);
      std::vector<Eigen::Index> obs_rows;
      for (std::size_t r = 0; r < col.missing.size(); ++r)
        if (!col.missing[r]) obs_rows.push_back(static_cast<Eigen::Index>(r));

      Eigen::MatrixXd X(obs_rows.size(), design.X.cols() + 1);
      Eigen::VectorXd y(obs_rows.size());
      for (std::size_t i = 0; i < obs_rows.size(); ++i) {
        X(static_cast<Eigen::Index>(i), 0) = 1.0;
        X.row(static_cast<Eigen::Index>(i)).tail(design.X.cols()) = design.X.row(obs_rows[i]);
        y(static_cast<Eigen::Index>(i)) = col.num[static_cast<std::size_t>(obs_rows[i])];
      }

      Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
      double smax = svd.singularValues()(0);
      double smin = svd.singularValues()(svd.singularValues().size() - 1);
      if (!(smin > 0.0) || smax / smin > 1e10) {
        fell_back = true;
        warnings.push_back("impute: degenerate design for " + t +
                           "; fell back to median imputation");
      } else {
        Eigen::VectorXd beta = svd.solve(y);
        for (std::size_t r : missing_rows) {
          Eigen::VectorXd x(design.X.cols() + 1);
          x(0) = 1.0;
          x.tail(design.X.cols()) = design.X.row(static_cast<Eigen::Index>(r)).transpose();
          col.num[r] = x.dot(beta);
          col.missing[r] = 0;
        }
      }
    }
    if (fell_back) {
      double med = median(simple.observed(tc));
      for (std::size_t r : missing_rows) {
        col.num[r] = med;
        col.missing[r] = 0;
      }
    }
  }

  return {ds.with_columns(Schema(std::move(vars)), std::move(cols)), warnings};
}

// ---------------------------------------------------------------------------
// Patient-stratified partitioning

struct Partition {
  std::vector<int> train_indices;
  std::vector<int> test_indices;
  std::uint64_t seed = 0;
  double ratio = 0.75;
};

// Random assignment at the patient level: patients are shuffled and the
// first round(ratio * P) go to train, so every row of a patient lands on one
// side. Deterministic for a fixed seed.
inline Partition partition_by_patient(const Dataset& ds, double ratio,
                                      std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw ConfigError("partition ratio must be in (0,1)");

  std::vector<std::string> patients;
  std::unordered_map<std::string, std::size_t> order;
  for (const auto& pid : ds.patient_ids())
    if (order.emplace(pid, patients.size()).second) patients.push_back(pid);
  if (patients.size() < 2)
    throw DataError("patient partition requires at least 2 patients");

  Rng rng(seed);
  rng.shuffle(patients);

  auto P = static_cast<long long>(patients.size());
  long long n_train = std::llround(ratio * static_cast<double>(P));
  n_train = std::clamp<long long>(n_train, 1, P - 1);

  std::unordered_set<std::string> train_patients(
      patients.begin(), patients.begin() + static_cast<std::ptrdiff_t>(n_train));

  Partition part;
  part.seed = seed;
  part.ratio = ratio;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    if (train_patients.count(ds.patient_ids()[r]))
      part.train_indices.push_back(static_cast<int>(r));
    else
      part.test_indices.push_back(static_cast<int>(r));
  }
  return part;
}

}  // namespace confaudit
