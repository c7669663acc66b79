#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "confaudit/error.hpp"

namespace confaudit {

struct LinearModel {
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  double train_rmse = 0.0;
  double r_squared = 0.0;
  bool rank_deficient = false;  // fit fell back to a tiny ridge
};

// Ordinary least squares with intercept. Rank-deficient designs are refit
// with ridge 1e-8 on the non-intercept block and flagged.
inline LinearModel fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (y.size() != n) throw DataError("fit_linear: X and y row mismatch");
  if (n <= p + 1) throw DataError("fit_linear: need more rows than parameters");

  Eigen::MatrixXd A(n, p + 1);
  A.col(0).setOnes();
  A.rightCols(p) = X;

  LinearModel model;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::VectorXd beta;
  if (qr.rank() < p + 1) {
    model.rank_deficient = true;
    Eigen::MatrixXd AtA = A.transpose() * A;
    for (Eigen::Index j = 1; j <= p; ++j) AtA(j, j) += 1e-8;
    beta = AtA.ldlt().solve(A.transpose() * y);
  } else {
    beta = qr.solve(y);
  }
  model.intercept = beta(0);
  model.coefficients = beta.tail(p);

  Eigen::VectorXd resid = y - A * beta;
  double ss_res = resid.squaredNorm();
  double y_mean = y.mean();
  double ss_tot = (y.array() - y_mean).matrix().squaredNorm();
  model.train_rmse = std::sqrt(ss_res / static_cast<double>(n));
  model.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
  return model;
}

inline Eigen::VectorXd predict(const LinearModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.coefficients.size())
    throw DataError("linear predict: column dimension mismatch");
  return (X * model.coefficients).array() + model.intercept;
}

// Out-of-sample R-squared; may be negative when predictions are worse than
// the test mean.
inline double r_squared_on(const Eigen::VectorXd& y_true,
                           const Eigen::VectorXd& y_pred) {
  if (y_true.size() != y_pred.size())
    throw DataError("r_squared_on: length mismatch");
  double ss_res = (y_true - y_pred).squaredNorm();
  double mu = y_true.mean();
  double ss_tot = (y_true.array() - mu).matrix().squaredNorm();
  if (ss_tot <= 0) return ss_res <= 0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace confaudit
