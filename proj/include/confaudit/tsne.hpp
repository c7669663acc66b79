#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "confaudit/error.hpp"
#include "confaudit/parallel.hpp"
#include "confaudit/pca.hpp"
#include "confaudit/rng.hpp"

namespace confaudit {

struct TsneConfig {
  double perplexity = 30.0;
  int pca_dims = 50;         // initial PCA; 0 disables
  double theta = 0.0;        // exact gradients only; kept for config parity
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  double learning_rate = 200.0;
  int iterations = 1000;
  std::uint64_t seed = 0;
  double early_exaggeration = 12.0;  // applied for the first 10% of iterations
};

struct TsneResult {
  Eigen::MatrixXd embedding;  // n x 2
  double kl_initial = 0.0;
  double kl_final = 0.0;
};

// Symmetrized joint probabilities P for exact t-SNE. Each conditional row is
// normalized to sum 1 (precision set by per-point bisection to match the
// target perplexity), then P = (P_cond + P_cond^T) / (2n): symmetric,
// non-negative, total mass 1.
inline Eigen::MatrixXd tsne_joint_probabilities(const Eigen::MatrixXd& X,
                                                double perplexity) {
  const Eigen::Index n = X.rows();
  if (n < 4) throw DataError("t-SNE requires at least 4 points");
  if (!(perplexity > 0.0) || perplexity >= (static_cast<double>(n) - 1.0) / 3.0)
    throw ConfigError("perplexity must be positive and below (n-1)/3");

  Eigen::VectorXd sq = X.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
                       2.0 * (X * X.transpose());
  d2 = d2.cwiseMax(0.0);

  Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(n, n);
  const double target_entropy = std::log(perplexity);
  std::vector<char> failed(static_cast<std::size_t>(n), 0);

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
    Eigen::Index i = static_cast<Eigen::Index>(ii);
    double beta = 1.0, beta_min = -1.0, beta_max = -1.0;
    Eigen::VectorXd p(n);
    double entropy = 0.0;
    bool ok = false;
    for (int iter = 0; iter < 200; ++iter) {
      double sum = 0.0, weighted = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) {
          p(j) = 0.0;
          continue;
        }
        p(j) = std::exp(-beta * d2(i, j));
        sum += p(j);
        weighted += d2(i, j) * p(j);
      }
      if (sum <= 0.0) sum = 1e-300;
      entropy = std::log(sum) + beta * weighted / sum;
      p /= sum;
      double diff = entropy - target_entropy;
      if (std::abs(diff) < 1e-5) {
        ok = true;
        break;
      }
      if (diff > 0) {
        beta_min = beta;
        beta = beta_max < 0 ? beta * 2.0 : 0.5 * (beta + beta_max);
      } else {
        beta_max = beta;
        beta = beta_min < 0 ? beta / 2.0 : 0.5 * (beta + beta_min);
      }
    }
    if (!ok) failed[ii] = 1;
    cond.row(i) = p.transpose();
  });
  for (std::size_t i = 0; i < failed.size(); ++i)
    if (failed[i])
      throw NumericError("perplexity search failed to converge for point " +
                         std::to_string(i));

  Eigen::MatrixXd P = (cond + cond.transpose()) / (2.0 * static_cast<double>(n));
  return P;
}

namespace detail {

inline double tsne_kl(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Y) {
  const Eigen::Index n = Y.rows();
  Eigen::VectorXd sq = Y.rowwise().squaredNorm();
  double Z = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double d2 = sq(i) + sq(j) - 2.0 * Y.row(i).dot(Y.row(j));
      Z += 2.0 / (1.0 + d2);
    }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j || P(i, j) <= 0.0) continue;
      double d2 = sq(i) + sq(j) - 2.0 * Y.row(i).dot(Y.row(j));
      double q = std::max(1.0 / (1.0 + d2) / Z, 1e-12);
      kl += P(i, j) * std::log(P(i, j) / q);
    }
  return kl;
}

}  // namespace detail

// Exact t-SNE to 2 dimensions: gradient descent with momentum switch and
// per-parameter gains, early exaggeration for the first 10% of iterations,
// deterministic for a fixed seed. Desk scale only (n <= 5000).
inline TsneResult tsne(const Eigen::MatrixXd& X_in, const TsneConfig& cfg) {
  if (X_in.rows() > 5000)
    throw DataError("exact t-SNE is limited to 5000 rows");
  if (cfg.iterations < 1) throw ConfigError("t-SNE iterations must be >= 1");

  Eigen::MatrixXd X = X_in;
  if (cfg.pca_dims > 0 && X.cols() > cfg.pca_dims) {
    int k = static_cast<int>(
        std::min<Eigen::Index>(cfg.pca_dims, std::min(X.rows() - 1, X.cols())));
    PcaModel pca = fit_pca(X, k);
    X = project(pca, X);
  }

  const Eigen::Index n = X.rows();
  Eigen::MatrixXd P = tsne_joint_probabilities(X, cfg.perplexity);

  Rng rng(cfg.seed);
  Eigen::MatrixXd Y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int d = 0; d < 2; ++d) Y(i, d) = 1e-4 * rng.normal();

  TsneResult result;
  result.kl_initial = detail::tsne_kl(P, Y);

  Eigen::MatrixXd increment = Eigen::MatrixXd::Zero(n, 2);
  Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(n, 2);
  Eigen::MatrixXd grad(n, 2);
  Eigen::MatrixXd W(n, n);

  const int warmup = std::max(1, cfg.iterations / 10);

  for (int iter = 0; iter < cfg.iterations; ++iter) {
    double exaggeration = iter < warmup ? cfg.early_exaggeration : 1.0;
    double momentum = iter < warmup ? cfg.initial_momentum : cfg.final_momentum;

    Eigen::VectorXd sq = Y.rowwise().squaredNorm();
    double Z = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      W(i, i) = 0.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        double d2 = sq(i) + sq(j) - 2.0 * Y.row(i).dot(Y.row(j));
        double w = 1.0 / (1.0 + d2);
        W(i, j) = w;
        W(j, i) = w;
        Z += 2.0 * w;
      }
    }
    if (Z <= 0.0) Z = 1e-300;

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ii) {
      Eigen::Index i = static_cast<Eigen::Index>(ii);
      double gx = 0.0, gy = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        double q = W(i, j) / Z;
        double mult = (exaggeration * P(i, j) - q) * W(i, j);
        gx += mult * (Y(i, 0) - Y(j, 0));
        gy += mult * (Y(i, 1) - Y(j, 1));
      }
      grad(i, 0) = 4.0 * gx;
      grad(i, 1) = 4.0 * gy;
    });

    for (Eigen::Index i = 0; i < n; ++i)
      for (int d = 0; d < 2; ++d) {
        bool same_sign = (grad(i, d) > 0) == (increment(i, d) > 0);
        gains(i, d) = same_sign ? std::max(0.01, gains(i, d) * 0.8)
                                : gains(i, d) + 0.2;
        increment(i, d) = momentum * increment(i, d) -
                          cfg.learning_rate * gains(i, d) * grad(i, d);
      }
    Y += increment;
    Y.rowwise() -= Y.colwise().mean();
  }

  result.kl_final = detail::tsne_kl(P, Y);
  result.embedding = std::move(Y);
  return result;
}

}  // namespace confaudit
