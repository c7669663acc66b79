#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confaudit/error.hpp"
#include "confaudit/logistic.hpp"
#include "confaudit/rng.hpp"
#include "confaudit/util.hpp"

namespace confaudit {

// Silverman's rule-of-thumb bandwidth, 0.9 * min(sd, IQR/1.34) * n^(-1/5),
// floored at 1e-6 * sd so constant-ish features never get a zero-width kernel.
inline double silverman_bandwidth(const std::vector<double>& xs) {
  if (xs.empty()) throw DataError("bandwidth of empty sample");
  double sd = sample_sd(xs);
  double iqr = quantile(xs, 0.75) - quantile(xs, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (spread <= 0.0) spread = sd;
  double h = 0.9 * spread * std::pow(static_cast<double>(xs.size()), -0.2);
  h = std::max(h, 1e-6 * sd);
  if (h <= 0.0) h = 1e-6 * (std::abs(mean(xs)) + 1.0);
  return h;
}

// Gaussian kernel density with a fixed bandwidth; evaluation in log space.
struct KernelDensity {
  Eigen::VectorXd points;
  double bandwidth = 1.0;

  double log_density(double x) const {
    const double n = static_cast<double>(points.size());
    Eigen::ArrayXd z = (points.array() - x) / bandwidth;
    Eigen::ArrayXd expo = -0.5 * z.square();
    double m = expo.maxCoeff();
    double sum = (expo - m).exp().sum();
    const double log_norm = -0.5 * std::log(2.0 * 3.14159265358979323846) -
                            std::log(bandwidth) - std::log(n);
    return m + std::log(sum) + log_norm;
  }
};

struct KernelNaiveBayes {
  std::array<double, 2> class_priors{0.5, 0.5};
  // indexed [feature][class]
  std::vector<std::array<KernelDensity, 2>> feature_densities;
  std::vector<std::string> feature_names;
};

inline KernelNaiveBayes fit_kernel_nb(const Eigen::MatrixXd& X,
                                      const Eigen::VectorXd& y,
                                      std::vector<std::string> names = {}) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (y.size() != n) throw DataError("fit_kernel_nb: X and y row mismatch");
  std::array<std::vector<Eigen::Index>, 2> idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y(i) != 0.0 && y(i) != 1.0)
      throw DataError("fit_kernel_nb: y must be 0/1");
    idx[y(i) == 1.0 ? 1 : 0].push_back(i);
  }
  if (idx[0].empty() || idx[1].empty())
    throw DataError("fit_kernel_nb: both classes must be present");

  KernelNaiveBayes model;
  model.class_priors[1] =
      static_cast<double>(idx[1].size()) / static_cast<double>(n);
  model.class_priors[0] = 1.0 - model.class_priors[1];
  model.feature_names = std::move(names);

  model.feature_densities.resize(static_cast<std::size_t>(p));
  for (Eigen::Index f = 0; f < p; ++f) {
    for (int c = 0; c < 2; ++c) {
      std::vector<double> vals;
      vals.reserve(idx[c].size());
      for (Eigen::Index i : idx[static_cast<std::size_t>(c)])
        vals.push_back(X(i, f));
      KernelDensity& kd =
          model.feature_densities[static_cast<std::size_t>(f)][static_cast<std::size_t>(c)];
      kd.bandwidth = silverman_bandwidth(vals);
      kd.points = Eigen::Map<Eigen::VectorXd>(vals.data(),
                                              static_cast<Eigen::Index>(vals.size()));
    }
  }
  return model;
}

// Posterior P(class 1 | x) assuming feature independence within each class;
// computed in log space and normalized over the two classes. If both class
// scores degenerate, the prior is returned.
inline double nb_posterior(const KernelNaiveBayes& model,
                           const Eigen::VectorXd& x) {
  if (x.size() != static_cast<Eigen::Index>(model.feature_densities.size()))
    throw DataError("nb_posterior: feature dimension mismatch");
  std::array<double, 2> log_score{std::log(model.class_priors[0]),
                                  std::log(model.class_priors[1])};
  for (std::size_t f = 0; f < model.feature_densities.size(); ++f)
    for (int c = 0; c < 2; ++c)
      log_score[static_cast<std::size_t>(c)] +=
          model.feature_densities[f][static_cast<std::size_t>(c)].log_density(
              x(static_cast<Eigen::Index>(f)));

  if (!std::isfinite(log_score[0]) && !std::isfinite(log_score[1]))
    return model.class_priors[1];
  double m = std::max(log_score[0], log_score[1]);
  double z0 = std::exp(log_score[0] - m), z1 = std::exp(log_score[1] - m);
  return z1 / (z0 + z1);
}

inline Eigen::VectorXd nb_posterior_rows(const KernelNaiveBayes& model,
                                         const Eigen::MatrixXd& X) {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::VectorXd x = X.row(i).transpose();
    out(i) = nb_posterior(model, x);
  }
  return out;
}

struct EnsembleResult {
  Eigen::VectorXd test_posterior;
  Eigen::VectorXd train_oof_posterior;  // out-of-fold posteriors on train rows
  KernelNaiveBayes model;               // fit on all training rows
};

// Naive Bayes secondary-evidence ensemble over two base-model probability
// columns. The kernel NB is fit 10-fold cross-validated on the training
// partition (out-of-fold posteriors are returned for honest train-side
// metrics); test posteriors come from the NB fit on all training rows. Folds
// whose fit side loses a class are re-drawn stratified.
inline EnsembleResult ensemble_naive_bayes(const Eigen::VectorXd& img_train,
                                           const Eigen::VectorXd& cov_train,
                                           const Eigen::VectorXd& y_train,
                                           const Eigen::VectorXd& img_test,
                                           const Eigen::VectorXd& cov_test,
                                           std::uint64_t seed, int folds = 10) {
  const Eigen::Index n = img_train.size();
  if (cov_train.size() != n || y_train.size() != n)
    throw DataError("ensemble: training inputs must be aligned");
  if (img_test.size() != cov_test.size())
    throw DataError("ensemble: test inputs must be aligned");
  auto check_prob = [](const Eigen::VectorXd& v, const char* what) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (!(v(i) > 0.0 && v(i) < 1.0))
        throw DataError(std::string("ensemble: ") + what +
                        " scores must lie in (0,1)");
  };
  check_prob(img_train, "train");
  check_prob(cov_train, "train");
  check_prob(img_test, "test");
  check_prob(cov_test, "test");

  Eigen::MatrixXd Xtr(n, 2);
  Xtr.col(0) = img_train;
  Xtr.col(1) = cov_train;
  Eigen::MatrixXd Xte(img_test.size(), 2);
  Xte.col(0) = img_test;
  Xte.col(1) = cov_test;

  EnsembleResult result;
  result.model = fit_kernel_nb(Xtr, y_train, {"img_score", "cov_score"});
  result.test_posterior = nb_posterior_rows(result.model, Xte);

  // out-of-fold posteriors on train
  std::vector<int> fold;
  for (int attempt = 0;; ++attempt) {
    if (attempt >= 20)
      throw DataError("ensemble: could not draw folds with both classes");
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    fold = stratified_folds(y_train, folds, rng);
    bool ok = true;
    for (int f = 0; f < folds && ok; ++f) {
      long long fit_pos = 0, fit_n = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (fold[static_cast<std::size_t>(i)] == f) continue;
        ++fit_n;
        fit_pos += y_train(i) == 1.0;
      }
      if (fit_n == 0 || fit_pos == 0 || fit_pos == fit_n) ok = false;
    }
    if (ok) break;
  }

  result.train_oof_posterior.resize(n);
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> fit_rows, hold_rows;
    for (Eigen::Index i = 0; i < n; ++i)
      (fold[static_cast<std::size_t>(i)] == f ? hold_rows : fit_rows).push_back(i);
    if (hold_rows.empty()) continue;
    Eigen::MatrixXd Xf(fit_rows.size(), 2);
    Eigen::VectorXd yf(fit_rows.size());
    for (std::size_t i = 0; i < fit_rows.size(); ++i) {
      Xf.row(static_cast<Eigen::Index>(i)) = Xtr.row(fit_rows[i]);
      yf(static_cast<Eigen::Index>(i)) = y_train(fit_rows[i]);
    }
    KernelNaiveBayes fold_model = fit_kernel_nb(Xf, yf);
    for (Eigen::Index i : hold_rows) {
      Eigen::VectorXd x = Xtr.row(i).transpose();
      result.train_oof_posterior(i) = nb_posterior(fold_model, x);
    }
  }
  return result;
}

}  // namespace confaudit
