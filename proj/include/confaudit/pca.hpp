#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "confaudit/error.hpp"

namespace confaudit {

struct PcaModel {
  Eigen::VectorXd means;               // D
  Eigen::MatrixXd components;          // k x D, rows orthonormal
  Eigen::VectorXd explained_variance;  // k, non-increasing
  int k = 0;
  int requested_k = 0;
  bool rank_truncated = false;  // fewer components returned than requested
};

// PCA by singular value decomposition of the centered data matrix (features
// are centered but not rescaled). Components carry a deterministic sign: the
// largest-magnitude loading of each component is positive. When the request
// exceeds min(n-1, D) or the numerical rank, fewer components are returned
// and the model is flagged.
inline PcaModel fit_pca(const Eigen::MatrixXd& X, int k) {
  const Eigen::Index n = X.rows(), D = X.cols();
  if (n < 2) throw DataError("fit_pca requires at least 2 rows");
  if (k < 1) throw ConfigError("fit_pca: k must be positive");

  PcaModel model;
  model.requested_k = k;
  model.means = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - model.means.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();

  int max_k = static_cast<int>(std::min<Eigen::Index>(n - 1, D));
  if (k > max_k) {
    model.rank_truncated = true;
    k = max_k;
  }
  // drop numerically-zero directions
  double tol = sv(0) > 0 ? sv(0) * 1e-12 : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  if (k > rank) {
    model.rank_truncated = true;
    k = std::max(rank, 1);
  }

  model.k = k;
  model.components.resize(k, D);
  model.explained_variance.resize(k);
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd comp = svd.matrixV().col(i);
    Eigen::Index max_idx = 0;
    comp.cwiseAbs().maxCoeff(&max_idx);
    if (comp(max_idx) < 0) comp = -comp;
    model.components.row(i) = comp.transpose();
    model.explained_variance(i) =
        sv(i) * sv(i) / static_cast<double>(n - 1);
  }
  return model;
}

inline Eigen::MatrixXd project(const PcaModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.means.size())
    throw DataError("project: column dimension does not match PCA model");
  return (X.rowwise() - model.means.transpose()) * model.components.transpose();
}

inline double explained_fraction(const PcaModel& model, double total_variance) {
  if (!(total_variance > 0.0))
    throw NumericError("explained_fraction: total variance must be positive");
  double frac = model.explained_variance.sum() / total_variance;
  return std::min(1.0, std::max(0.0, frac));
}

// Sum of per-feature sample variances; the natural denominator for
// explained_fraction on the fitting data.
inline double total_variance(const Eigen::MatrixXd& X) {
  if (X.rows() < 2) return 0.0;
  Eigen::RowVectorXd mu = X.colwise().mean();
  return (X.rowwise() - mu).squaredNorm() / static_cast<double>(X.rows() - 1);
}

}  // namespace confaudit
