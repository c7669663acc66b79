#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "confaudit/dataset.hpp"
#include "confaudit/error.hpp"
#include "confaudit/fisher.hpp"
#include "confaudit/rng.hpp"

namespace confaudit {

enum class MatchLevel { Random, Demographics, Pt, PtHp };

inline std::string to_string(MatchLevel level) {
  switch (level) {
    case MatchLevel::Random: return "random";
    case MatchLevel::Demographics: return "dem";
    case MatchLevel::Pt: return "pt";
    case MatchLevel::PtHp: return "pthp";
  }
  return "?";
}

inline MatchLevel match_level_from_string(const std::string& s) {
  if (s == "random") return MatchLevel::Random;
  if (s == "dem" || s == "demographics") return MatchLevel::Demographics;
  if (s == "pt") return MatchLevel::Pt;
  if (s == "pthp") return MatchLevel::PtHp;
  throw ConfigError("unknown match level: " + s);
}

struct MatchSpec {
  std::vector<std::string> variables;
  MatchLevel level = MatchLevel::Random;
  std::uint64_t seed = 0;
  // Cases whose best available control is farther than this go unmatched.
  // Default: no caliper, every case is paired while controls remain.
  double caliper = std::numeric_limits<double>::infinity();
};

// Case-control pairs over rows of one dataset; each control used at most
// once. Row indices refer to the dataset the cohort was built from.
struct MatchedCohort {
  std::vector<std::pair<int, int>> pairs;  // (case_row, control_row)
  std::vector<int> unmatched_cases;
  MatchSpec spec;

  std::vector<int> rows() const {
    std::vector<int> out;
    out.reserve(pairs.size() * 2);
    for (const auto& [c, k] : pairs) {
      out.push_back(c);
      out.push_back(k);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

namespace detail {

inline void case_control_split(const Dataset& ds, std::span<const int> rows,
                               std::vector<int>& cases,
                               std::vector<int>& controls) {
  cases.clear();
  controls.clear();
  std::size_t oc = ds.schema().outcome_index();
  const Column& col = ds.column(oc);
  for (int r : rows) {
    std::size_t rr = static_cast<std::size_t>(r);
    if (col.missing[rr]) continue;
    if (col.num[rr] == 1.0) cases.push_back(r);
    else controls.push_back(r);
  }
}

}  // namespace detail

// One uniformly drawn distinct control per case; deterministic per seed.
inline MatchedCohort random_case_control(const Dataset& ds,
                                         std::span<const int> rows,
                                         std::uint64_t seed) {
  std::vector<int> cases, controls;
  detail::case_control_split(ds, rows, cases, controls);
  if (cases.empty()) throw DataError("random_case_control: no cases");
  if (controls.size() < cases.size())
    throw DataError("random_case_control: fewer controls than cases");

  Rng rng(seed);
  std::vector<std::size_t> picks =
      rng.sample_without_replacement(controls.size(), cases.size());

  MatchedCohort cohort;
  cohort.spec.level = MatchLevel::Random;
  cohort.spec.seed = seed;
  for (std::size_t i = 0; i < cases.size(); ++i)
    cohort.pairs.emplace_back(cases[i], controls[picks[i]]);
  return cohort;
}

// Gower-style mixed distance over a fixed variable list: continuous
// variables contribute |a-b| / range (range taken over the rows the metric
// was fitted on), categorical and binary variables contribute a mismatch
// indicator. The mean over variables lies in [0, 1]. Zero-range variables
// contribute 0 and are flagged.
class MixedDistance {
 public:
  MixedDistance(const Dataset& ds, std::span<const int> rows,
                const std::vector<std::string>& variables)
      : ds_(&ds) {
    for (const auto& name : variables) {
      std::size_t c = ds.schema().require(name);
      const VariableSpec& spec = ds.schema().at(c);
      const Column& col = ds.column(c);
      Var v;
      v.col = c;
      v.continuous = spec.kind == VarKind::Continuous;
      v.categorical = spec.kind == VarKind::Categorical;
      for (int r : rows)
        if (col.missing[static_cast<std::size_t>(r)])
          throw DataError("matching requires imputed covariates; '" + name +
                          "' has missing cells");
      if (v.continuous) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int r : rows) {
          double x = col.num[static_cast<std::size_t>(r)];
          lo = std::min(lo, x);
          hi = std::max(hi, x);
        }
        v.range = hi - lo;
        if (!(v.range > 0.0)) {
          v.zero_range = true;
          zero_range_.push_back(name);
        }
      }
      vars_.push_back(v);
    }
  }

  double operator()(int row_a, int row_b) const {
    if (vars_.empty()) return 0.0;
    double total = 0.0;
    std::size_t a = static_cast<std::size_t>(row_a);
    std::size_t b = static_cast<std::size_t>(row_b);
    for (const Var& v : vars_) {
      const Column& col = ds_->column(v.col);
      if (v.continuous) {
        if (!v.zero_range)
          total += std::abs(col.num[a] - col.num[b]) / v.range;
      } else if (v.categorical) {
        total += col.str[a] == col.str[b] ? 0.0 : 1.0;
      } else {
        total += col.num[a] == col.num[b] ? 0.0 : 1.0;
      }
    }
    return total / static_cast<double>(vars_.size());
  }

  const std::vector<std::string>& zero_range_variables() const {
    return zero_range_;
  }

 private:
  struct Var {
    std::size_t col = 0;
    bool continuous = false;
    bool categorical = false;
    bool zero_range = false;
    double range = 1.0;
  };
  const Dataset* ds_ = nullptr;
  std::vector<Var> vars_;
  std::vector<std::string> zero_range_;
};

// Greedy nearest-neighbor matching without replacement. Cases are processed
// in seeded random order; each takes the minimum-distance unused control,
// ties broken by lowest row index. A case goes unmatched only when controls
// are exhausted or its best distance exceeds the caliper.
inline MatchedCohort matched_case_control(const Dataset& ds,
                                          std::span<const int> rows,
                                          const MatchSpec& spec) {
  std::vector<int> cases, controls;
  detail::case_control_split(ds, rows, cases, controls);
  if (cases.empty()) throw DataError("matched_case_control: no cases");

  MixedDistance distance(ds, rows, spec.variables);

  Rng rng(spec.seed);
  rng.shuffle(cases);
  std::sort(controls.begin(), controls.end());  // tie-break by row index
  std::vector<char> used(controls.size(), 0);
  std::size_t remaining = controls.size();

  MatchedCohort cohort;
  cohort.spec = spec;
  for (int case_row : cases) {
    if (remaining == 0) {
      cohort.unmatched_cases.push_back(case_row);
      continue;
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < controls.size(); ++i) {
      if (used[i]) continue;
      double d = distance(case_row, controls[i]);
      if (d < best) {
        best = d;
        best_idx = i;
      }
    }
    if (best > spec.caliper) {
      cohort.unmatched_cases.push_back(case_row);
      continue;
    }
    used[best_idx] = 1;
    --remaining;
    cohort.pairs.emplace_back(case_row, controls[best_idx]);
  }
  return cohort;
}

inline MatchedCohort build_cohort(const Dataset& ds, std::span<const int> rows,
                                  const MatchSpec& spec) {
  if (spec.level == MatchLevel::Random)
    return random_case_control(ds, rows, spec.seed);
  return matched_case_control(ds, rows, spec);
}

// ---------------------------------------------------------------------------
// Balance diagnostics

struct BalanceRow {
  std::string variable;
  AssociationResult before;  // on the unmatched test population
  AssociationResult after;   // within the cohort
  bool testable_before = true;
  bool testable_after = true;
};

struct BalanceReport {
  std::vector<BalanceRow> rows;
  int significant_before = 0;  // p < 0.05 among testable covariates
  int significant_after = 0;
};

namespace detail {

// 2x2 of binarized covariate level against case status over given rows;
// rows with a missing covariate cell are excluded.
inline AssociationResult covariate_outcome_fisher(const Dataset& ds,
                                                  std::span<const int> rows,
                                                  std::size_t cov_col,
                                                  bool& testable) {
  const Column& cov = ds.column(cov_col);
  const Column& out = ds.column(ds.schema().outcome_index());
  long long a = 0, b = 0, c = 0, d = 0;  // rows: cov 1/0, cols: case/control
  for (int r : rows) {
    std::size_t rr = static_cast<std::size_t>(r);
    if (cov.missing[rr] || out.missing[rr]) continue;
    bool exposed = cov.num[rr] == 1.0;
    bool is_case = out.num[rr] == 1.0;
    if (exposed && is_case) ++a;
    else if (exposed) ++b;
    else if (is_case) ++c;
    else ++d;
  }
  AssociationResult res = fisher_exact(a, b, c, d);
  testable = res.status == TestStatus::Ok;
  return res;
}

}  // namespace detail

// Per-covariate Fisher tests of covariate against case status, before
// matching (full test rows) and after (cohort rows). Covariates must be
// binarized; constant covariates are reported as non-testable.
inline BalanceReport balance_report(const Dataset& ds,
                                    std::span<const int> test_rows,
                                    const MatchedCohort& cohort,
                                    const std::vector<std::string>& covariates) {
  BalanceReport report;
  std::vector<int> cohort_rows = cohort.rows();
  for (const auto& name : covariates) {
    std::size_t c = ds.schema().require(name);
    if (ds.schema().at(c).kind != VarKind::Binary)
      throw DataError("balance report requires binarized covariates: " + name);
    BalanceRow row;
    row.variable = name;
    row.before =
        detail::covariate_outcome_fisher(ds, test_rows, c, row.testable_before);
    row.after =
        detail::covariate_outcome_fisher(ds, cohort_rows, c, row.testable_after);
    if (row.testable_before && row.before.p_value < 0.05)
      ++report.significant_before;
    if (row.testable_after && row.after.p_value < 0.05)
      ++report.significant_after;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace confaudit
