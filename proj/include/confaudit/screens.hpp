#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confaudit/dataset.hpp"
#include "confaudit/linear.hpp"
#include "confaudit/logistic.hpp"
#include "confaudit/roc.hpp"

namespace confaudit {

struct ScreenBinaryRow {
  std::string target;
  long long n_train = 0;
  long long n_test = 0;
  long long n_test_cases = 0;
  double auc = 0.5;
  double ci_low = 0.5;
  double ci_high = 0.5;
  double ridge_lambda = 0.0;
  std::string status = "ok";  // "single_class_train" / "single_class_test"
};

struct ScreenContinuousRow {
  std::string target;
  long long n_train = 0;
  long long n_test = 0;
  double r_squared_test = 0.0;  // raw out-of-sample value; may be negative
  double r_squared_train = 0.0;
  std::string status = "ok";  // "constant_train" when the target has no spread
};

namespace detail {

template <class Pred>
void split_rows(const std::vector<int>& all, Pred keep, std::vector<int>& out,
                std::vector<Eigen::Index>& positions) {
  out.clear();
  positions.clear();
  for (std::size_t i = 0; i < all.size(); ++i)
    if (keep(all[i])) {
      out.push_back(all[i]);
      positions.push_back(static_cast<Eigen::Index>(i));
    }
}

inline Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X,
                                 const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(rows.size(), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

}  // namespace detail

// Per-target image-predictability screen: a ridge-CV logistic model on the
// training-partition PC scores, evaluated by test AUC with a stratified
// bootstrap CI. Rows where the target is missing are excluded per target;
// single-class targets are reported with a status flag instead of a fit.
// `pc_train` / `pc_test` rows align with the partition index lists.
inline std::vector<ScreenBinaryRow> predictability_screen(
    const Dataset& ds, const Partition& part, const Eigen::MatrixXd& pc_train,
    const Eigen::MatrixXd& pc_test, const std::vector<std::string>& targets,
    int bootstrap_b, std::uint64_t seed) {
  std::vector<ScreenBinaryRow> rows;
  for (const auto& target : targets) {
    std::size_t c = ds.schema().require(target);
    if (ds.schema().at(c).kind != VarKind::Binary)
      throw DataError("predictability screen target must be binary: " + target);
    const Column& col = ds.column(c);

    ScreenBinaryRow row;
    row.target = target;

    std::vector<int> tr_rows, te_rows;
    std::vector<Eigen::Index> tr_pos, te_pos;
    detail::split_rows(part.train_indices,
                       [&](int r) { return !col.missing[static_cast<std::size_t>(r)]; },
                       tr_rows, tr_pos);
    detail::split_rows(part.test_indices,
                       [&](int r) { return !col.missing[static_cast<std::size_t>(r)]; },
                       te_rows, te_pos);
    row.n_train = static_cast<long long>(tr_rows.size());
    row.n_test = static_cast<long long>(te_rows.size());

    Eigen::VectorXd y_tr(tr_rows.size());
    for (std::size_t i = 0; i < tr_rows.size(); ++i)
      y_tr(static_cast<Eigen::Index>(i)) = col.num[static_cast<std::size_t>(tr_rows[i])];
    std::vector<int> y_te(te_rows.size());
    long long te_cases = 0;
    for (std::size_t i = 0; i < te_rows.size(); ++i) {
      y_te[i] = static_cast<int>(col.num[static_cast<std::size_t>(te_rows[i])]);
      te_cases += y_te[i];
    }
    row.n_test_cases = te_cases;

    long long tr_cases = 0;
    for (Eigen::Index i = 0; i < y_tr.size(); ++i) tr_cases += y_tr(i) == 1.0;
    if (tr_rows.empty() || tr_cases == 0 ||
        tr_cases == static_cast<long long>(tr_rows.size())) {
      row.status = "single_class_train";
      rows.push_back(row);
      continue;
    }
    if (te_rows.empty() || te_cases == 0 ||
        te_cases == static_cast<long long>(te_rows.size())) {
      row.status = "single_class_test";
      rows.push_back(row);
      continue;
    }

    Eigen::MatrixXd Xtr = detail::take_rows(pc_train, tr_pos);
    Eigen::MatrixXd Xte = detail::take_rows(pc_test, te_pos);
    LogisticCvResult cv =
        fit_logistic_cv(Xtr, y_tr, derive_seed(seed, "screen:" + target));
    row.ridge_lambda = cv.best_lambda;

    Eigen::VectorXd scores = predict_proba(cv.model, Xte);
    std::vector<double> s(scores.data(), scores.data() + scores.size());
    RocAnalysis roc = roc_analysis(s, y_te, bootstrap_b,
                                   derive_seed(seed, "screen_ci:" + target));
    row.auc = roc.auc;
    row.ci_low = roc.ci_low;
    row.ci_high = roc.ci_high;
    rows.push_back(row);
  }
  return rows;
}

// Continuous-target analogue with linear regression and out-of-sample
// R-squared (reported raw, so inverse skill shows up as a negative value).
inline std::vector<ScreenContinuousRow> regression_screen(
    const Dataset& ds, const Partition& part, const Eigen::MatrixXd& pc_train,
    const Eigen::MatrixXd& pc_test, const std::vector<std::string>& targets) {
  std::vector<ScreenContinuousRow> rows;
  for (const auto& target : targets) {
    std::size_t c = ds.schema().require(target);
    if (ds.schema().at(c).kind != VarKind::Continuous)
      throw DataError("regression screen target must be continuous: " + target);
    const Column& col = ds.column(c);

    ScreenContinuousRow row;
    row.target = target;

    std::vector<int> tr_rows, te_rows;
    std::vector<Eigen::Index> tr_pos, te_pos;
    detail::split_rows(part.train_indices,
                       [&](int r) { return !col.missing[static_cast<std::size_t>(r)]; },
                       tr_rows, tr_pos);
    detail::split_rows(part.test_indices,
                       [&](int r) { return !col.missing[static_cast<std::size_t>(r)]; },
                       te_rows, te_pos);
    row.n_train = static_cast<long long>(tr_rows.size());
    row.n_test = static_cast<long long>(te_rows.size());

    Eigen::VectorXd y_tr(tr_rows.size()), y_te(te_rows.size());
    for (std::size_t i = 0; i < tr_rows.size(); ++i)
      y_tr(static_cast<Eigen::Index>(i)) = col.num[static_cast<std::size_t>(tr_rows[i])];
    for (std::size_t i = 0; i < te_rows.size(); ++i)
      y_te(static_cast<Eigen::Index>(i)) = col.num[static_cast<std::size_t>(te_rows[i])];

    if (tr_rows.size() < static_cast<std::size_t>(pc_train.cols()) + 2 ||
        (y_tr.array() - y_tr(0)).abs().maxCoeff() == 0.0) {
      row.status = "constant_train";
      rows.push_back(row);
      continue;
    }

    Eigen::MatrixXd Xtr = detail::take_rows(pc_train, tr_pos);
    Eigen::MatrixXd Xte = detail::take_rows(pc_test, te_pos);
    LinearModel m = fit_linear(Xtr, y_tr);
    row.r_squared_train = m.r_squared;
    if (!te_rows.empty()) row.r_squared_test = r_squared_on(y_te, predict(m, Xte));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace confaudit
