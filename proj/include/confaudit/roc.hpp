#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "confaudit/error.hpp"
#include "confaudit/parallel.hpp"
#include "confaudit/rng.hpp"
#include "confaudit/util.hpp"

namespace confaudit {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocAnalysis {
  double auc = 0.5;
  double ci_low = 0.5;   // equal to auc until a bootstrap CI is attached
  double ci_high = 0.5;
  std::vector<RocPoint> curve;  // starts (0,0), ends (1,1)
  long long n_cases = 0;
  long long n_controls = 0;
};

struct PrcPoint {
  double recall = 0.0;
  double precision = 1.0;
};

struct PrcAnalysis {
  double auprc = 0.0;
  std::vector<PrcPoint> curve;
  long long n_cases = 0;
  long long n_controls = 0;
};

struct OperatingPoint {
  double threshold = 0.0;  // score >= threshold predicts positive
  double sensitivity = 0.0;
  double specificity = 0.0;
  double accuracy = 0.0;
  double npv = 0.0;
  double ppv = 0.0;
  long long tn = 0, tp = 0, fn = 0, fp = 0;
  bool degenerate = false;  // best Youden J <= 0
};

enum class ComparisonMethod { DelongPaired, BootstrapUnpaired };

struct AucComparison {
  double auc_a = 0.5;
  double auc_b = 0.5;
  double delta = 0.0;
  double p_value = 1.0;
  ComparisonMethod method = ComparisonMethod::DelongPaired;
  double statistic = 0.0;  // z for DeLong, delta/SE for bootstrap
};

namespace detail {

inline void split_by_label(std::span<const double> scores,
                           std::span<const int> labels,
                           std::vector<double>& cases,
                           std::vector<double>& controls) {
  if (scores.size() != labels.size())
    throw DataError("scores and labels differ in length");
  cases.clear();
  controls.clear();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw DataError("non-finite score");
    if (labels[i] == 1) cases.push_back(scores[i]);
    else if (labels[i] == 0) controls.push_back(scores[i]);
    else throw DataError("labels must be 0/1");
  }
  if (cases.empty() || controls.empty())
    throw DataError("both classes must be present");
}

}  // namespace detail

// Mann-Whitney AUC with ties counted 0.5, via midranks. Equals the
// trapezoidal area under the empirical ROC curve.
inline double auc_from_split(std::span<const double> case_scores,
                             std::span<const double> control_scores) {
  std::size_t m = case_scores.size(), n = control_scores.size();
  std::vector<std::pair<double, int>> all;
  all.reserve(m + n);
  for (double s : case_scores) all.emplace_back(s, 1);
  for (double s : control_scores) all.emplace_back(s, 0);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double rank_sum_cases = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k)
      if (all[k].second == 1) rank_sum_cases += midrank;
    i = j;
  }
  double md = static_cast<double>(m);
  return (rank_sum_cases - md * (md + 1.0) / 2.0) /
         (md * static_cast<double>(n));
}

inline double auc_point(std::span<const double> scores,
                        std::span<const int> labels) {
  std::vector<double> cases, controls;
  detail::split_by_label(scores, labels, cases, controls);
  return auc_from_split(cases, controls);
}

// Empirical ROC curve: one point per distinct score threshold, swept from
// high to low with tied scores grouped.
inline RocAnalysis roc_auc(std::span<const double> scores,
                           std::span<const int> labels) {
  std::vector<double> cases, controls;
  detail::split_by_label(scores, labels, cases, controls);

  RocAnalysis out;
  out.n_cases = static_cast<long long>(cases.size());
  out.n_controls = static_cast<long long>(controls.size());
  out.auc = auc_from_split(cases, controls);
  out.ci_low = out.auc;
  out.ci_high = out.auc;

  std::vector<std::pair<double, int>> all;
  all.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    all.emplace_back(scores[i], labels[i]);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  out.curve.push_back({0.0, 0.0});
  long long tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) {
      if (all[j].second == 1) ++tp;
      else ++fp;
      ++j;
    }
    out.curve.push_back(
        {static_cast<double>(fp) / static_cast<double>(out.n_controls),
         static_cast<double>(tp) / static_cast<double>(out.n_cases)});
    i = j;
  }
  return out;
}

// Percentile bootstrap CI for the AUC. Cases and controls are resampled
// separately (stratified), replicate i is seeded from (seed, i), so the
// result does not depend on execution order or thread count.
inline std::pair<double, double> bootstrap_auc_ci(std::span<const double> scores,
                                                  std::span<const int> labels,
                                                  int B, std::uint64_t seed) {
  if (B < 1) throw ConfigError("bootstrap replicate count must be positive");
  std::vector<double> cases, controls;
  detail::split_by_label(scores, labels, cases, controls);
  if (cases.size() < 2 || controls.size() < 2)
    throw DataError("bootstrap CI needs at least 2 per class");

  std::vector<double> aucs(static_cast<std::size_t>(B));
  parallel_for(static_cast<std::size_t>(B), [&](std::size_t i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::vector<double> rc(cases.size()), rn(controls.size());
    for (auto& v : rc) v = cases[rng.below(cases.size())];
    for (auto& v : rn) v = controls[rng.below(controls.size())];
    aucs[i] = auc_from_split(rc, rn);
  });
  return {quantile(aucs, 0.025), quantile(aucs, 0.975)};
}

inline RocAnalysis roc_analysis(std::span<const double> scores,
                                std::span<const int> labels, int B,
                                std::uint64_t seed) {
  RocAnalysis out = roc_auc(scores, labels);
  auto [lo, hi] = bootstrap_auc_ci(scores, labels, B, seed);
  out.ci_low = std::min(lo, out.auc);
  out.ci_high = std::max(hi, out.auc);
  return out;
}

// Unpaired AUC comparison: bootstrap the difference with independent
// stratified resamples per side, then a normal-approximation two-sided test
// of the observed difference against the bootstrap standard error.
inline AucComparison auc_test_unpaired(std::span<const double> scores_a,
                                       std::span<const int> labels_a,
                                       std::span<const double> scores_b,
                                       std::span<const int> labels_b, int B,
                                       std::uint64_t seed) {
  if (B < 2) throw ConfigError("bootstrap replicate count must be >= 2");
  std::vector<double> ca, na, cb, nb;
  detail::split_by_label(scores_a, labels_a, ca, na);
  detail::split_by_label(scores_b, labels_b, cb, nb);

  AucComparison cmp;
  cmp.method = ComparisonMethod::BootstrapUnpaired;
  cmp.auc_a = auc_from_split(ca, na);
  cmp.auc_b = auc_from_split(cb, nb);
  cmp.delta = cmp.auc_a - cmp.auc_b;

  std::vector<double> deltas(static_cast<std::size_t>(B));
  parallel_for(static_cast<std::size_t>(B), [&](std::size_t i) {
    Rng ra(derive_seed(seed, 2 * static_cast<std::uint64_t>(i)));
    Rng rb(derive_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1));
    std::vector<double> rca(ca.size()), rna(na.size());
    std::vector<double> rcb(cb.size()), rnb(nb.size());
    for (auto& v : rca) v = ca[ra.below(ca.size())];
    for (auto& v : rna) v = na[ra.below(na.size())];
    for (auto& v : rcb) v = cb[rb.below(cb.size())];
    for (auto& v : rnb) v = nb[rb.below(nb.size())];
    deltas[i] = auc_from_split(rca, rna) - auc_from_split(rcb, rnb);
  });

  double se = sample_sd(deltas);
  if (se == 0.0) {
    cmp.statistic = 0.0;
    cmp.p_value = cmp.delta == 0.0 ? 1.0 : 1.0 / static_cast<double>(B);
    return cmp;
  }
  cmp.statistic = cmp.delta / se;
  cmp.p_value = 2.0 * normal_cdf(-std::abs(cmp.statistic));
  return cmp;
}

// DeLong's paired test for two score vectors over the same labeled rows.
// Placement values ("structural components") give an asymptotically exact
// variance for the AUC difference of correlated curves.
inline AucComparison delong_test(std::span<const double> scores_a,
                                 std::span<const double> scores_b,
                                 std::span<const int> labels) {
  if (scores_a.size() != scores_b.size() || scores_a.size() != labels.size())
    throw DataError("delong_test: inputs must be aligned");

  std::vector<std::size_t> case_idx, control_idx;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) case_idx.push_back(i);
    else if (labels[i] == 0) control_idx.push_back(i);
    else throw DataError("labels must be 0/1");
  }
  std::size_t m = case_idx.size(), n = control_idx.size();
  if (m == 0 || n == 0) throw DataError("both classes must be present");

  auto psi = [](double x, double y) {
    if (y < x) return 1.0;
    if (y == x) return 0.5;
    return 0.0;
  };

  // v10[model][i]: placement of case i among controls; v01[model][j] dual.
  std::array<std::vector<double>, 2> v10, v01;
  std::array<std::span<const double>, 2> s{scores_a, scores_b};
  std::array<double, 2> auc{};
  for (int r = 0; r < 2; ++r) {
    v10[r].assign(m, 0.0);
    v01[r].assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double k = psi(s[r][case_idx[i]], s[r][control_idx[j]]);
        v10[r][i] += k;
        v01[r][j] += k;
      }
    for (auto& v : v10[r]) v /= static_cast<double>(n);
    for (auto& v : v01[r]) v /= static_cast<double>(m);
    auc[r] = mean(v10[r]);
  }

  auto cov = [](const std::vector<double>& x, const std::vector<double>& y,
                double mx, double my) {
    if (x.size() < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      s += (x[i] - mx) * (y[i] - my);
    return s / static_cast<double>(x.size() - 1);
  };

  double s10_aa = cov(v10[0], v10[0], auc[0], auc[0]);
  double s10_bb = cov(v10[1], v10[1], auc[1], auc[1]);
  double s10_ab = cov(v10[0], v10[1], auc[0], auc[1]);
  double s01_aa = cov(v01[0], v01[0], auc[0], auc[0]);
  double s01_bb = cov(v01[1], v01[1], auc[1], auc[1]);
  double s01_ab = cov(v01[0], v01[1], auc[0], auc[1]);

  double var_delta = (s10_aa + s10_bb - 2.0 * s10_ab) / static_cast<double>(m) +
                     (s01_aa + s01_bb - 2.0 * s01_ab) / static_cast<double>(n);

  AucComparison cmp;
  cmp.method = ComparisonMethod::DelongPaired;
  cmp.auc_a = auc[0];
  cmp.auc_b = auc[1];
  cmp.delta = auc[0] - auc[1];
  if (var_delta <= 0.0 || !std::isfinite(var_delta)) {
    cmp.statistic = 0.0;
    cmp.p_value = 1.0;
    return cmp;
  }
  cmp.statistic = cmp.delta / std::sqrt(var_delta);
  cmp.p_value = 2.0 * normal_cdf(-std::abs(cmp.statistic));
  return cmp;
}

inline OperatingPoint operating_point_from_counts(long long tn, long long tp,
                                                  long long fn, long long fp,
                                                  double threshold) {
  OperatingPoint op;
  op.tn = tn;
  op.tp = tp;
  op.fn = fn;
  op.fp = fp;
  op.threshold = threshold;
  op.sensitivity = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  op.specificity = tn + fp > 0 ? static_cast<double>(tn) / static_cast<double>(tn + fp) : 0.0;
  op.ppv = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  op.npv = tn + fn > 0 ? static_cast<double>(tn) / static_cast<double>(tn + fn) : 0.0;
  long long total = tn + tp + fn + fp;
  op.accuracy = total > 0 ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
  return op;
}

// Operating point maximizing Youden's J = sensitivity + specificity - 1.
// Candidate thresholds are midpoints between adjacent distinct scores plus
// +/- infinity; ties break toward higher specificity. J comparisons are done
// in integer arithmetic (J * P * N = tp*N - fp*P) to keep ties exact.
inline OperatingPoint youden_point(std::span<const double> scores,
                                   std::span<const int> labels) {
  std::vector<double> cases, controls;
  detail::split_by_label(scores, labels, cases, controls);
  std::sort(cases.begin(), cases.end());
  std::sort(controls.begin(), controls.end());
  long long P = static_cast<long long>(cases.size());
  long long N = static_cast<long long>(controls.size());

  std::vector<double> distinct(scores.begin(), scores.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> candidates;
  candidates.push_back(std::numeric_limits<double>::infinity());
  for (std::size_t i = distinct.size(); i-- > 1;)
    candidates.push_back(0.5 * (distinct[i - 1] + distinct[i]));
  candidates.push_back(-std::numeric_limits<double>::infinity());

  auto count_ge = [](const std::vector<double>& v, double t) {
    return static_cast<long long>(v.end() -
                                  std::lower_bound(v.begin(), v.end(), t));
  };

  OperatingPoint best;
  long long best_j_num = std::numeric_limits<long long>::min();
  bool have = false;
  for (double t : candidates) {  // descending thresholds: specificity high -> low
    long long tp = count_ge(cases, t);
    long long fp = count_ge(controls, t);
    long long j_num = tp * N - fp * P;  // J * P * N
    if (!have || j_num > best_j_num) {
      best_j_num = j_num;
      best = operating_point_from_counts(N - fp, tp, P - tp, fp, t);
      have = true;
    }
  }
  best.degenerate = best_j_num <= 0;
  return best;
}

// Average precision: step-wise interpolation over the descending-score sweep
// with tied scores processed as blocks. The curve's recall-0 anchor carries
// the precision of the top-scored block.
inline PrcAnalysis prc_auc(std::span<const double> scores,
                           std::span<const int> labels) {
  std::vector<double> cases, controls;
  detail::split_by_label(scores, labels, cases, controls);

  PrcAnalysis out;
  out.n_cases = static_cast<long long>(cases.size());
  out.n_controls = static_cast<long long>(controls.size());

  std::vector<std::pair<double, int>> all;
  all.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    all.emplace_back(scores[i], labels[i]);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  double P = static_cast<double>(out.n_cases);
  long long tp = 0, fp = 0;
  double prev_recall = 0.0;
  double ap = 0.0;
  bool first_block = true;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) {
      if (all[j].second == 1) ++tp;
      else ++fp;
      ++j;
    }
    double recall = static_cast<double>(tp) / P;
    double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (first_block) {
      out.curve.push_back({0.0, precision});
      first_block = false;
    }
    out.curve.push_back({recall, precision});
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  out.auprc = ap;
  return out;
}

}  // namespace confaudit
