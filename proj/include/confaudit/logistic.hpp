#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confaudit/error.hpp"
#include "confaudit/rng.hpp"
#include "confaudit/roc.hpp"
#include "confaudit/util.hpp"

namespace confaudit {

struct LogisticModel {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double ridge_lambda = 0.0;
  std::string predictor_set;
  std::vector<std::string> predictor_names;
  bool converged = false;
  double final_grad_norm = 0.0;
  int iterations = 0;
  std::vector<double> objective_trace;  // penalized negative log-likelihood
};

// Ridge-penalized Bernoulli negative log-likelihood; the intercept is not
// penalized.
inline double logistic_neg_loglik(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& coef, double intercept,
                                  double lambda) {
  double nll = 0.0;
  Eigen::VectorXd eta = (X * coef).array() + intercept;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double e = eta(i);
    // log(1 + exp(e)) - y*e, rearranged for stability
    nll += (e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e))) -
           y(i) * e;
  }
  return nll + 0.5 * lambda * coef.squaredNorm();
}

// Gradient of the penalized objective: element 0 is d/d intercept, the rest
// d/d coefficients.
inline Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& coef,
                                         double intercept, double lambda) {
  Eigen::VectorXd eta = (X * coef).array() + intercept;
  Eigen::VectorXd resid(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) resid(i) = sigmoid(eta(i)) - y(i);
  Eigen::VectorXd grad(coef.size() + 1);
  grad(0) = resid.sum();
  grad.tail(coef.size()) = X.transpose() * resid + lambda * coef;
  return grad;
}

// Newton/IRLS fit of ridge-penalized maximum likelihood. Step-halving keeps
// the objective non-increasing; iteration stops at gradient norm < 1e-8 or
// 100 iterations, with the convergence state recorded on the model rather
// than thrown (a capped fit is still a usable ranking model).
inline LogisticModel fit_logistic(const Eigen::MatrixXd& X,
                                  const Eigen::VectorXd& y, double lambda) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (y.size() != n) throw DataError("fit_logistic: X and y row mismatch");
  long long pos = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) throw DataError("fit_logistic: y must be 0/1");
    if (y(i) == 1.0) ++pos;
  }
  if (pos == 0 || pos == n)
    throw DataError("fit_logistic: both classes must be present");
  if (lambda < 0) throw ConfigError("ridge lambda must be non-negative");

  LogisticModel model;
  model.ridge_lambda = lambda;
  model.coefficients = Eigen::VectorXd::Zero(p);
  model.intercept = 0.0;

  double obj = logistic_neg_loglik(X, y, model.coefficients, model.intercept, lambda);
  model.objective_trace.push_back(obj);

  for (int iter = 0; iter < 100; ++iter) {
    Eigen::VectorXd eta = (X * model.coefficients).array() + model.intercept;
    Eigen::VectorXd mu(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      mu(i) = sigmoid(eta(i));
      w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-10);
    }

    Eigen::VectorXd grad =
        logistic_gradient(X, y, model.coefficients, model.intercept, lambda);
    model.final_grad_norm = grad.norm();
    model.iterations = iter;
    if (model.final_grad_norm < 1e-8) {
      model.converged = true;
      break;
    }

    // Hessian over [intercept, coef]; ridge only on the coefficient block
    Eigen::MatrixXd H(p + 1, p + 1);
    H(0, 0) = w.sum();
    Eigen::VectorXd xw = X.transpose() * w;
    H.block(0, 1, 1, p) = xw.transpose();
    H.block(1, 0, p, 1) = xw;
    H.block(1, 1, p, p) = X.transpose() * w.asDiagonal() * X +
                          lambda * Eigen::MatrixXd::Identity(p, p);

    Eigen::VectorXd step = H.ldlt().solve(-grad);
    if (!step.allFinite()) throw NumericError("fit_logistic: singular Newton system");

    double scale = 1.0;
    double new_obj = obj;
    Eigen::VectorXd new_coef;
    double new_intercept = model.intercept;
    for (int halving = 0; halving < 40; ++halving) {
      new_intercept = model.intercept + scale * step(0);
      new_coef = model.coefficients + scale * step.tail(p);
      new_obj = logistic_neg_loglik(X, y, new_coef, new_intercept, lambda);
      if (new_obj <= obj) break;
      scale *= 0.5;
    }
    if (new_obj > obj) break;  // no descent direction left at double precision
    model.coefficients = new_coef;
    model.intercept = new_intercept;
    obj = new_obj;
    model.objective_trace.push_back(obj);
  }

  if (!model.converged) {
    Eigen::VectorXd grad =
        logistic_gradient(X, y, model.coefficients, model.intercept, lambda);
    model.final_grad_norm = grad.norm();
    model.converged = model.final_grad_norm < 1e-8;
  }
  if (!model.coefficients.allFinite() || !std::isfinite(model.intercept))
    throw NumericError("fit_logistic: non-finite coefficients");
  return model;
}

inline Eigen::VectorXd predict_proba(const LogisticModel& model,
                                     const Eigen::MatrixXd& X) {
  if (X.cols() != model.coefficients.size())
    throw DataError("predict_proba: column dimension mismatch");
  Eigen::VectorXd eta = (X * model.coefficients).array() + model.intercept;
  Eigen::VectorXd p(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    p(i) = std::clamp(sigmoid(eta(i)), 1e-15, 1.0 - 1e-15);
  return p;
}

// Stratified fold labels in [0, folds): cases and controls are shuffled
// separately and dealt round-robin, so every fold sees both classes whenever
// the minority class has at least `folds` members.
inline std::vector<int> stratified_folds(const Eigen::VectorXd& y, int folds,
                                         Rng& rng) {
  std::vector<std::size_t> cases, controls;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    (y(i) == 1.0 ? cases : controls).push_back(static_cast<std::size_t>(i));
  rng.shuffle(cases);
  rng.shuffle(controls);
  std::vector<int> fold(static_cast<std::size_t>(y.size()), 0);
  int next = 0;
  for (std::size_t i : cases) fold[i] = next++ % folds;
  for (std::size_t i : controls) fold[i] = next++ % folds;
  return fold;
}

struct LogisticCvResult {
  LogisticModel model;
  double best_lambda = 0.0;
  std::vector<std::pair<double, double>> lambda_auc;  // (lambda, mean CV AUC)
};

// "Fit to maximize AUC": penalized maximum likelihood per lambda, with the
// ridge strength selected over a small grid by mean 10-fold cross-validated
// AUC; ties prefer the larger (more regularized) lambda. The returned model
// is refit on all rows at the selected lambda.
inline LogisticCvResult fit_logistic_cv(
    const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::uint64_t seed,
    const std::vector<double>& lambdas = {1e-6, 1e-4, 1e-2, 1.0},
    int folds = 10) {
  if (lambdas.empty()) throw ConfigError("lambda grid must be non-empty");
  LogisticCvResult result;

  Rng rng(seed);
  std::vector<int> fold = stratified_folds(y, folds, rng);

  double best_auc = -1.0;
  for (double lambda : lambdas) {
    std::vector<double> fold_aucs;
    for (int f = 0; f < folds; ++f) {
      std::vector<Eigen::Index> tr, va;
      for (Eigen::Index i = 0; i < y.size(); ++i)
        (fold[static_cast<std::size_t>(i)] == f ? va : tr).push_back(i);
      if (va.empty() || tr.empty()) continue;
      long long tr_pos = 0, va_pos = 0;
      for (Eigen::Index i : tr) tr_pos += y(i) == 1.0;
      for (Eigen::Index i : va) va_pos += y(i) == 1.0;
      if (tr_pos == 0 || tr_pos == static_cast<long long>(tr.size())) continue;
      if (va_pos == 0 || va_pos == static_cast<long long>(va.size())) continue;

      Eigen::MatrixXd Xtr(tr.size(), X.cols());
      Eigen::VectorXd ytr(tr.size());
      for (std::size_t i = 0; i < tr.size(); ++i) {
        Xtr.row(static_cast<Eigen::Index>(i)) = X.row(tr[i]);
        ytr(static_cast<Eigen::Index>(i)) = y(tr[i]);
      }
      Eigen::MatrixXd Xva(va.size(), X.cols());
      for (std::size_t i = 0; i < va.size(); ++i)
        Xva.row(static_cast<Eigen::Index>(i)) = X.row(va[i]);

      LogisticModel m = fit_logistic(Xtr, ytr, lambda);
      Eigen::VectorXd scores = predict_proba(m, Xva);
      std::vector<double> s(scores.data(), scores.data() + scores.size());
      std::vector<int> lab(va.size());
      for (std::size_t i = 0; i < va.size(); ++i)
        lab[i] = static_cast<int>(y(va[i]));
      fold_aucs.push_back(auc_point(s, lab));
    }
    double cv_auc = fold_aucs.empty() ? 0.5 : mean(fold_aucs);
    result.lambda_auc.emplace_back(lambda, cv_auc);
    if (cv_auc >= best_auc) {  // >= so ties move toward larger lambda
      best_auc = cv_auc;
      result.best_lambda = lambda;
    }
  }

  result.model = fit_logistic(X, y, result.best_lambda);
  return result;
}

}  // namespace confaudit
