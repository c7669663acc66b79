#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confaudit/dataset.hpp"
#include "confaudit/error.hpp"

namespace confaudit {

// Numeric coding of covariates for model design matrices. Level sets are
// fixed at construction (normally on the full dataset, so train and test
// share one coding): continuous and binary variables map to a single column;
// categorical variables one-hot encode every level except a reference (the
// most frequent level other than "(Missing)", ties alphabetical), so the
// "(Missing)" level always keeps its own indicator column.
class CovariateEncoder {
 public:
  CovariateEncoder() = default;

  CovariateEncoder(const Dataset& ds, const std::vector<std::string>& variables) {
    for (const auto& name : variables) {
      std::size_t c = ds.schema().require(name);
      const VariableSpec& var = ds.schema().at(c);
      const Column& col = ds.column(c);
      Var v;
      v.name = name;
      v.col = c;
      v.categorical = var.kind == VarKind::Categorical;
      if (v.categorical) {
        std::map<std::string, std::size_t> counts;
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
          if (col.missing[r])
            throw DataError("design matrix requires imputed data; variable '" +
                            name + "' has missing cells");
          ++counts[col.str[r]];
        }
        std::string reference;
        std::size_t best = 0;
        for (const auto& [lvl, cnt] : counts) {
          if (lvl == kMissingLevel) continue;
          if (cnt > best) {
            best = cnt;
            reference = lvl;
          }
        }
        if (reference.empty()) reference = counts.begin()->first;
        for (const auto& [lvl, cnt] : counts) {
          if (lvl == reference) continue;
          v.levels.push_back(lvl);
          names_.push_back(name + "=" + lvl);
        }
      } else {
        for (std::size_t r = 0; r < ds.n_rows(); ++r)
          if (col.missing[r])
            throw DataError("design matrix requires imputed data; variable '" +
                            name + "' has missing cells");
        names_.push_back(name);
      }
      vars_.push_back(std::move(v));
    }
  }

  std::size_t width() const { return names_.size(); }
  const std::vector<std::string>& column_names() const { return names_; }

  Eigen::MatrixXd encode(const Dataset& ds, std::span<const int> rows) const {
    Eigen::MatrixXd X =
        Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                              static_cast<Eigen::Index>(width()));
    Eigen::Index j = 0;
    for (const Var& v : vars_) {
      const Column& col = ds.column(v.col);
      if (v.categorical) {
        for (std::size_t lv = 0; lv < v.levels.size(); ++lv) {
          for (std::size_t i = 0; i < rows.size(); ++i)
            if (col.str[static_cast<std::size_t>(rows[i])] == v.levels[lv])
              X(static_cast<Eigen::Index>(i), j) = 1.0;
          ++j;
        }
      } else {
        for (std::size_t i = 0; i < rows.size(); ++i)
          X(static_cast<Eigen::Index>(i), j) =
              col.num[static_cast<std::size_t>(rows[i])];
        ++j;
      }
    }
    return X;
  }

 private:
  struct Var {
    std::string name;
    std::size_t col = 0;
    bool categorical = false;
    std::vector<std::string> levels;  // encoded levels, reference dropped
  };
  std::vector<Var> vars_;
  std::vector<std::string> names_;
};

// Which variable groups feed a fracture model: IMG resolves to the PCA score
// columns, PT and HP to their covariate lists.
struct PredictorSet {
  bool img = false;
  bool pt = false;
  bool hp = false;

  static PredictorSet parse(const std::string& csv) {
    PredictorSet set;
    std::size_t start = 0;
    while (start <= csv.size()) {
      std::size_t end = csv.find(',', start);
      std::string tok = csv.substr(
          start, end == std::string::npos ? std::string::npos : end - start);
      if (tok == "img") set.img = true;
      else if (tok == "pt") set.pt = true;
      else if (tok == "hp") set.hp = true;
      else if (!tok.empty()) throw ConfigError("unknown predictor group: " + tok);
      if (end == std::string::npos) break;
      start = end + 1;
    }
    if (!set.img && !set.pt && !set.hp)
      throw ConfigError("predictor set must name at least one group");
    return set;
  }

  std::string label() const {
    std::string s;
    if (img) s += "img";
    if (pt) s += s.empty() ? "pt" : "Pt";
    if (hp) s += s.empty() ? "hp" : "Hp";
    return s;
  }

  std::vector<std::string> covariate_names(const Schema& schema) const {
    std::vector<std::string> out;
    if (pt)
      for (const auto& n : schema.names_in_group(VarGroup::Pt)) out.push_back(n);
    if (hp)
      for (const auto& n : schema.names_in_group(VarGroup::Hp)) out.push_back(n);
    return out;
  }
};

}  // namespace confaudit
