#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "confaudit/design.hpp"
#include "confaudit/kernel_nb.hpp"
#include "confaudit/linear.hpp"
#include "confaudit/logistic.hpp"
#include "confaudit/pca.hpp"
#include "confaudit/rng.hpp"
#include "confaudit/roc.hpp"
#include "confaudit/screens.hpp"

using namespace confaudit;

namespace {

// Direct Bayes-rule oracle for a single feature, using the model's own
// training points and bandwidth but an independent density formula.
double single_feature_bayes_oracle(const KernelNaiveBayes& model, double x) {
  auto density = [&](int c) {
    const KernelDensity& kd = model.feature_densities[0][static_cast<std::size_t>(c)];
    double s = 0.0;
    for (Eigen::Index i = 0; i < kd.points.size(); ++i) {
      double z = (x - kd.points(i)) / kd.bandwidth;
      s += std::exp(-0.5 * z * z);
    }
    return s / (kd.points.size() * kd.bandwidth * std::sqrt(2.0 * 3.14159265358979323846));
  };
  double num = model.class_priors[1] * density(1);
  double den = num + model.class_priors[0] * density(0);
  return num / den;
}

// Minimal outcome-only dataset wrapper around a feature matrix, with one
// binary target column and a patient per row.
Dataset feature_dataset(const Eigen::MatrixXd& X, const std::vector<int>& y,
                        const std::string& target_name = "target") {
  std::size_t n = static_cast<std::size_t>(X.rows());
  Schema sch({{target_name, VarKind::Binary, VarGroup::Outcome, ""}});
  Column col;
  col.missing.assign(n, 0);
  col.num.resize(n);
  for (std::size_t i = 0; i < n; ++i) col.num[i] = y[i];
  std::vector<std::string> rid(n), pid(n);
  for (std::size_t i = 0; i < n; ++i) {
    rid[i] = "r" + std::to_string(i);
    pid[i] = "p" + std::to_string(i);
  }
  return Dataset(sch, rid, pid, {col}, X);
}

Partition half_split(std::size_t n) {
  Partition part;
  for (std::size_t i = 0; i < n; ++i)
    (i % 2 == 0 ? part.train_indices : part.test_indices)
        .push_back(static_cast<int>(i));
  return part;
}

}  // namespace

TEST_CASE("logistic: symmetric data gives zero intercept") {
  Eigen::MatrixXd X(40, 1);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; i += 2) {
    X(i, 0) = -1.0;
    y(i) = 0.0;
    X(i + 1, 0) = 1.0;
    y(i + 1) = 1.0;
  }
  LogisticModel m = fit_logistic(X, y, 0.1);
  CHECK(std::abs(m.intercept) < 1e-8);
  CHECK(m.converged);
}

TEST_CASE("logistic gradient matches central finite differences") {
  Rng rng(3);
  Eigen::MatrixXd X(30, 3);
  Eigen::VectorXd y(30);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    y(i) = rng.u01() < 0.5 ? 0.0 : 1.0;
  }
  Eigen::VectorXd coef(3);
  coef << 0.3, -0.7, 1.1;
  double intercept = 0.25, lambda = 0.05;

  Eigen::VectorXd analytic = logistic_gradient(X, y, coef, intercept, lambda);
  double h = 1e-6;
  Eigen::VectorXd fd(4);
  {
    double plus = logistic_neg_loglik(X, y, coef, intercept + h, lambda);
    double minus = logistic_neg_loglik(X, y, coef, intercept - h, lambda);
    fd(0) = (plus - minus) / (2 * h);
  }
  for (int j = 0; j < 3; ++j) {
    Eigen::VectorXd cp = coef, cm = coef;
    cp(j) += h;
    cm(j) -= h;
    fd(j + 1) = (logistic_neg_loglik(X, y, cp, intercept, lambda) -
                 logistic_neg_loglik(X, y, cm, intercept, lambda)) /
                (2 * h);
  }
  REQUIRE((analytic - fd).norm() / fd.norm() < 1e-6);
}

TEST_CASE("logistic recovers planted coefficients at n = 50000") {
  Rng rng(11);
  int n = 50000;
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = rng.normal();
    double eta = 0.5 + 2.0 * X(i, 0) - 1.0 * X(i, 1);
    y(i) = rng.u01() < sigmoid(eta) ? 1.0 : 0.0;
  }
  LogisticModel m = fit_logistic(X, y, 1e-6);
  CHECK(m.converged);
  CHECK(std::abs(m.coefficients(0) - 2.0) < 0.05);
  CHECK(std::abs(m.coefficients(1) + 1.0) < 0.05);
  CHECK(std::abs(m.intercept - 0.5) < 0.05);
}

TEST_CASE("logistic objective trace is non-increasing") {
  Rng rng(13);
  Eigen::MatrixXd X(200, 4);
  Eigen::VectorXd y(200);
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 4; ++j) X(i, j) = rng.normal();
    y(i) = rng.u01() < sigmoid(3.0 * X(i, 0)) ? 1.0 : 0.0;
  }
  LogisticModel m = fit_logistic(X, y, 1e-4);
  for (std::size_t i = 1; i < m.objective_trace.size(); ++i)
    CHECK(m.objective_trace[i] <= m.objective_trace[i - 1] + 1e-12);
}

TEST_CASE("logistic rejects single-class targets") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(10, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(10);
  CHECK_THROWS_AS(fit_logistic(X, y, 0.1), DataError);
}

TEST_CASE("predict_proba basics") {
  LogisticModel m;
  m.coefficients = Eigen::VectorXd::Zero(2);
  m.intercept = 0.0;
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 2);
  Eigen::VectorXd p = predict_proba(m, X);
  for (Eigen::Index i = 0; i < 5; ++i) CHECK(p(i) == 0.5);

  m.intercept = 50.0;
  p = predict_proba(m, X);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(p(i) > 1.0 - 1e-9);
    CHECK(p(i) < 1.0);
  }

  // monotone in a positive-coefficient feature
  m.intercept = 0.0;
  m.coefficients << 1.5, 0.0;
  Eigen::MatrixXd lo(1, 2), hi(1, 2);
  lo << 0.2, 0.7;
  hi << 0.9, 0.7;
  CHECK(predict_proba(m, hi)(0) > predict_proba(m, lo)(0));

  // adding a constant column with zero coefficient changes nothing
  Eigen::MatrixXd X3(5, 3);
  X3.leftCols(2) = X;
  X3.col(2).setConstant(7.0);
  LogisticModel m3 = m;
  m3.coefficients = Eigen::VectorXd::Zero(3);
  m3.coefficients.head(2) = m.coefficients;
  CHECK((predict_proba(m3, X3) - predict_proba(m, X)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear: exact fit and hand-solved system") {
  Eigen::MatrixXd X(6, 1);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) {
    X(i, 0) = i;
    y(i) = 3.0 * i + 1.0;
  }
  LinearModel m = fit_linear(X, y);
  CHECK(m.coefficients(0) == Catch::Approx(3.0).margin(1e-10));
  CHECK(m.intercept == Catch::Approx(1.0).margin(1e-10));
  CHECK(m.r_squared == Catch::Approx(1.0).margin(1e-12));

  // 4-point system, normal equations by hand (see dataset imputation test
  // for the same arithmetic): a = {0,1,2,4}, y = {1,3,4,10}
  Eigen::MatrixXd X4(4, 1);
  X4 << 0, 1, 2, 4;
  Eigen::VectorXd y4(4);
  y4 << 1, 3, 4, 10;
  LinearModel m4 = fit_linear(X4, y4);
  CHECK(m4.intercept == Catch::Approx(21.0 / 35.0).margin(1e-10));
  CHECK(m4.coefficients(0) == Catch::Approx(78.0 / 35.0).margin(1e-10));
}

TEST_CASE("linear: independent target has near-zero R^2") {
  Rng rng(17);
  Eigen::MatrixXd X(10000, 3);
  Eigen::VectorXd y(10000);
  for (int i = 0; i < 10000; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    y(i) = rng.normal();
  }
  LinearModel m = fit_linear(X, y);
  CHECK(m.r_squared < 0.01);
}

TEST_CASE("linear: rank-deficient design falls back with flag") {
  Eigen::MatrixXd X(10, 2);
  for (int i = 0; i < 10; ++i) {
    X(i, 0) = i;
    X(i, 1) = 2.0 * i;  // collinear
  }
  Eigen::VectorXd y = X.col(0) * 3.0;
  LinearModel m = fit_linear(X, y);
  CHECK(m.rank_deficient);
  CHECK((predict(m, X) - y).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("kernel nb: symmetric single feature gives posterior one half") {
  // class densities mirror-symmetric around 0, equal priors
  Eigen::MatrixXd X(8, 1);
  Eigen::VectorXd y(8);
  double vals[4] = {0.5, 1.0, 1.5, 2.5};
  for (int i = 0; i < 4; ++i) {
    X(i, 0) = -vals[i];
    y(i) = 0.0;
    X(4 + i, 0) = vals[i];
    y(4 + i) = 1.0;
  }
  KernelNaiveBayes m = fit_kernel_nb(X, y);
  Eigen::VectorXd q(1);
  q << 0.0;
  CHECK(nb_posterior(m, q) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("kernel nb: single feature equals direct Bayes rule") {
  Rng rng(23);
  Eigen::MatrixXd X(60, 1);
  Eigen::VectorXd y(60);
  for (int i = 0; i < 60; ++i) {
    y(i) = i % 3 == 0 ? 1.0 : 0.0;
    X(i, 0) = rng.normal() + (y(i) == 1.0 ? 1.0 : 0.0);
  }
  KernelNaiveBayes m = fit_kernel_nb(X, y);
  for (double q : {-2.0, -0.5, 0.0, 0.3, 1.7, 4.0}) {
    Eigen::VectorXd x(1);
    x << q;
    REQUIRE(nb_posterior(m, x) ==
            Catch::Approx(single_feature_bayes_oracle(m, q)).margin(1e-12));
  }
}

TEST_CASE("kernel nb: duplicated feature double-counts the evidence") {
  Rng rng(29);
  Eigen::MatrixXd X1(80, 1);
  Eigen::VectorXd y(80);
  for (int i = 0; i < 80; ++i) {
    y(i) = i % 2 ? 1.0 : 0.0;
    X1(i, 0) = rng.normal() + (y(i) == 1.0 ? 0.8 : 0.0);
  }
  Eigen::MatrixXd X2(80, 2);
  X2.col(0) = X1.col(0);
  X2.col(1) = X1.col(0);
  KernelNaiveBayes one = fit_kernel_nb(X1, y);
  KernelNaiveBayes dup = fit_kernel_nb(X2, y);
  for (double q : {-1.0, 0.2, 0.8, 1.9}) {
    Eigen::VectorXd x1(1), x2(2);
    x1 << q;
    x2 << q, q;
    double p1 = nb_posterior(one, x1);
    double p2 = nb_posterior(dup, x2);
    if (p1 > 0.5 + 1e-9) CHECK(p2 > p1);
    if (p1 < 0.5 - 1e-9) CHECK(p2 < p1);
  }
}

TEST_CASE("kernel nb posteriors for the two classes sum to one") {
  Rng rng(31);
  Eigen::MatrixXd X(50, 2);
  Eigen::VectorXd y(50);
  for (int i = 0; i < 50; ++i) {
    y(i) = rng.u01() < 0.4 ? 1.0 : 0.0;
    X(i, 0) = rng.normal() + y(i);
    X(i, 1) = rng.normal();
  }
  KernelNaiveBayes m = fit_kernel_nb(X, y);
  // posterior of class 1 plus posterior of class 0 (swap priors/densities)
  KernelNaiveBayes swapped = m;
  std::swap(swapped.class_priors[0], swapped.class_priors[1]);
  for (auto& fd : swapped.feature_densities) std::swap(fd[0], fd[1]);
  for (int i = 0; i < 10; ++i) {
    Eigen::VectorXd x = X.row(i).transpose();
    REQUIRE(nb_posterior(m, x) + nb_posterior(swapped, x) ==
            Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("silverman bandwidth is positive even for constant features") {
  CHECK(silverman_bandwidth({3.0, 3.0, 3.0, 3.0}) > 0.0);
  CHECK(silverman_bandwidth({0.0, 0.0, 0.0}) > 0.0);
}

TEST_CASE("ensemble: uninformative covariate scores leave AUC unchanged") {
  Rng rng(37);
  int n_tr = 2000, n_te = 1500;
  Eigen::VectorXd img_tr(n_tr), cov_tr(n_tr), y_tr(n_tr);
  Eigen::VectorXd img_te(n_te), cov_te(n_te);
  std::vector<int> y_te(static_cast<std::size_t>(n_te));
  for (int i = 0; i < n_tr; ++i) {
    y_tr(i) = rng.u01() < 0.5 ? 1.0 : 0.0;
    img_tr(i) = sigmoid(1.5 * (2 * y_tr(i) - 1) + rng.normal());
    cov_tr(i) = 0.5 + 1e-6 * rng.normal();  // effectively constant
  }
  for (int i = 0; i < n_te; ++i) {
    int label = rng.u01() < 0.5 ? 1 : 0;
    y_te[static_cast<std::size_t>(i)] = label;
    img_te(i) = sigmoid(1.5 * (2 * label - 1) + rng.normal());
    cov_te(i) = 0.5 + 1e-6 * rng.normal();
  }
  EnsembleResult ens =
      ensemble_naive_bayes(img_tr, cov_tr, y_tr, img_te, cov_te, 7);
  std::vector<double> es(ens.test_posterior.data(),
                         ens.test_posterior.data() + n_te);
  std::vector<double> is(img_te.data(), img_te.data() + n_te);
  CHECK(std::abs(auc_point(es, y_te) - auc_point(is, y_te)) < 0.02);
}

TEST_CASE("ensemble: identical evidence preserves the ordering") {
  Rng rng(41);
  int n_tr = 800, n_te = 600;
  Eigen::VectorXd img_tr(n_tr), y_tr(n_tr), img_te(n_te);
  std::vector<int> y_te(static_cast<std::size_t>(n_te));
  for (int i = 0; i < n_tr; ++i) {
    y_tr(i) = rng.u01() < 0.5 ? 1.0 : 0.0;
    img_tr(i) = sigmoid(1.2 * (2 * y_tr(i) - 1) + rng.normal());
  }
  for (int i = 0; i < n_te; ++i) {
    int label = rng.u01() < 0.5 ? 1 : 0;
    y_te[static_cast<std::size_t>(i)] = label;
    img_te(i) = sigmoid(1.2 * (2 * label - 1) + rng.normal());
  }
  EnsembleResult ens =
      ensemble_naive_bayes(img_tr, img_tr, y_tr, img_te, img_te, 5);
  std::vector<double> es(ens.test_posterior.data(),
                         ens.test_posterior.data() + n_te);
  std::vector<double> is(img_te.data(), img_te.data() + n_te);
  CHECK(auc_point(es, y_te) == Catch::Approx(auc_point(is, y_te)).margin(1e-12));
}

TEST_CASE("ensemble: independent evidence beats either source alone") {
  Rng rng(43);
  int n_tr = 15000, n_te = 5000;
  Eigen::VectorXd img_tr(n_tr), cov_tr(n_tr), y_tr(n_tr);
  Eigen::VectorXd img_te(n_te), cov_te(n_te);
  std::vector<int> y_te(static_cast<std::size_t>(n_te));
  auto draw = [&](int label, Eigen::VectorXd& img, Eigen::VectorXd& cov, int i) {
    img(i) = sigmoid(1.0 * (2 * label - 1) + rng.normal());
    cov(i) = sigmoid(1.0 * (2 * label - 1) + rng.normal());
  };
  for (int i = 0; i < n_tr; ++i) {
    int label = rng.u01() < 0.5 ? 1 : 0;
    y_tr(i) = label;
    draw(label, img_tr, cov_tr, i);
  }
  for (int i = 0; i < n_te; ++i) {
    int label = rng.u01() < 0.5 ? 1 : 0;
    y_te[static_cast<std::size_t>(i)] = label;
    draw(label, img_te, cov_te, i);
  }
  EnsembleResult ens =
      ensemble_naive_bayes(img_tr, cov_tr, y_tr, img_te, cov_te, 11);
  std::vector<double> es(ens.test_posterior.data(),
                         ens.test_posterior.data() + n_te);
  std::vector<double> is(img_te.data(), img_te.data() + n_te);
  std::vector<double> cs(cov_te.data(), cov_te.data() + n_te);
  double auc_ens = auc_point(es, y_te);
  double auc_img = auc_point(is, y_te);
  double auc_cov = auc_point(cs, y_te);
  CHECK(auc_ens >= std::max(auc_img, auc_cov));
}

TEST_CASE("predictability screen: encoded target, coin flips, planted shift") {
  Rng rng(47);
  int n = 900, d = 6;
  Eigen::MatrixXd X(n, d);
  std::vector<int> scanner(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    scanner[static_cast<std::size_t>(i)] = rng.u01() < 0.5 ? 1 : 0;
    for (int j = 0; j < d; ++j) X(i, j) = rng.normal();
    X(i, 0) += 5.0 * scanner[static_cast<std::size_t>(i)];  // scanner shift
  }

  // three binary targets: sign of PC1-ish direction, coin flip, scanner
  Schema sch({{"outcome", VarKind::Binary, VarGroup::Outcome, ""},
              {"coin", VarKind::Binary, VarGroup::Pt, ""},
              {"scanner", VarKind::Binary, VarGroup::Hp, ""},
              {"stuck", VarKind::Binary, VarGroup::Hp, ""}});
  std::vector<Column> cols(4);
  for (auto& c : cols) {
    c.missing.assign(static_cast<std::size_t>(n), 0);
    c.num.assign(static_cast<std::size_t>(n), 0.0);
  }
  double med = 2.5;  // population median of X(.,0) given the shift mix
  for (int i = 0; i < n; ++i) {
    std::size_t r = static_cast<std::size_t>(i);
    cols[0].num[r] = X(i, 0) > med ? 1.0 : 0.0;
    cols[1].num[r] = rng.u01() < 0.5 ? 1.0 : 0.0;
    cols[2].num[r] = scanner[r];
    cols[3].num[r] = 1.0;  // constant: single-class status expected
  }
  std::vector<std::string> rid(static_cast<std::size_t>(n)),
      pid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rid[static_cast<std::size_t>(i)] = "r" + std::to_string(i);
    pid[static_cast<std::size_t>(i)] = "p" + std::to_string(i);
  }
  Dataset ds(sch, rid, pid, cols, X);
  Partition part = half_split(static_cast<std::size_t>(n));

  PcaModel pca = fit_pca(ds.features_for(part.train_indices), 4);
  Eigen::MatrixXd pc_train = project(pca, ds.features_for(part.train_indices));
  Eigen::MatrixXd pc_test = project(pca, ds.features_for(part.test_indices));

  auto rows = predictability_screen(ds, part, pc_train, pc_test,
                                    {"outcome", "coin", "scanner", "stuck"},
                                    400, 101);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].auc > 0.99);  // target is (almost) a threshold of PC1
  CHECK(rows[1].ci_low < 0.5);
  CHECK(rows[1].ci_high > 0.5);
  CHECK(rows[2].auc > 0.95);  // the planted scanner shift dominates
  CHECK(rows[3].status == "single_class_train");
}

TEST_CASE("regression screen: self-target, noise target, planted R^2") {
  Rng rng(53);
  int n = 10000, d = 4;
  Eigen::MatrixXd X(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) X(i, j) = rng.normal();

  Schema sch({{"outcome", VarKind::Binary, VarGroup::Outcome, ""},
              {"self", VarKind::Continuous, VarGroup::Hp, ""},
              {"noise", VarKind::Continuous, VarGroup::Hp, ""},
              {"planted", VarKind::Continuous, VarGroup::Hp, ""}});
  std::vector<Column> cols(4);
  for (auto& c : cols) {
    c.missing.assign(static_cast<std::size_t>(n), 0);
    c.num.assign(static_cast<std::size_t>(n), 0.0);
  }
  for (int i = 0; i < n; ++i) {
    std::size_t r = static_cast<std::size_t>(i);
    cols[0].num[r] = i % 2 ? 1.0 : 0.0;
    cols[1].num[r] = X(i, 1);
    cols[2].num[r] = rng.normal();
    // population R^2 = 1 / (1 + 1) = 0.5
    cols[3].num[r] = X(i, 2) + rng.normal();
  }
  std::vector<std::string> rid(static_cast<std::size_t>(n)),
      pid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    rid[static_cast<std::size_t>(i)] = "r" + std::to_string(i);
    pid[static_cast<std::size_t>(i)] = "p" + std::to_string(i);
  }
  Dataset ds(sch, rid, pid, cols, X);
  Partition part = half_split(static_cast<std::size_t>(n));

  PcaModel pca = fit_pca(ds.features_for(part.train_indices), 4);
  Eigen::MatrixXd pc_train = project(pca, ds.features_for(part.train_indices));
  Eigen::MatrixXd pc_test = project(pca, ds.features_for(part.test_indices));

  auto rows = regression_screen(ds, part, pc_train, pc_test,
                                {"self", "noise", "planted"});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].r_squared_test > 0.99);
  CHECK(rows[1].r_squared_test < 0.05);  // raw value; may be slightly negative
  CHECK(rows[2].r_squared_test > 0.45);
  CHECK(rows[2].r_squared_test < 0.55);
}

TEST_CASE("fit_logistic_cv picks a lambda from the grid deterministically") {
  Rng rng(59);
  Eigen::MatrixXd X(400, 3);
  Eigen::VectorXd y(400);
  for (int i = 0; i < 400; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    y(i) = rng.u01() < sigmoid(1.2 * X(i, 0)) ? 1.0 : 0.0;
  }
  LogisticCvResult a = fit_logistic_cv(X, y, 77);
  LogisticCvResult b = fit_logistic_cv(X, y, 77);
  CHECK(a.best_lambda == b.best_lambda);
  CHECK(a.model.coefficients == b.model.coefficients);
  CHECK(a.lambda_auc.size() == 4);
}

TEST_CASE("predictor sets resolve groups and labels") {
  PredictorSet s = PredictorSet::parse("img,pt,hp");
  CHECK(s.label() == "imgPtHp");
  CHECK(PredictorSet::parse("pt,hp").label() == "ptHp");
  CHECK(PredictorSet::parse("img").label() == "img");
  CHECK_THROWS_AS(PredictorSet::parse("bogus"), ConfigError);

  Schema sch({{"y", VarKind::Binary, VarGroup::Outcome, ""},
              {"age", VarKind::Continuous, VarGroup::Pt, ""},
              {"dev", VarKind::Categorical, VarGroup::Hp, ""}});
  auto names = PredictorSet::parse("pt,hp").covariate_names(sch);
  REQUIRE(names.size() == 2);
  CHECK(names[0] == "age");
  CHECK(names[1] == "dev");
}

TEST_CASE("covariate encoder keeps a (Missing) indicator") {
  Schema sch({{"y", VarKind::Binary, VarGroup::Outcome, ""},
              {"dev", VarKind::Categorical, VarGroup::Hp, ""},
              {"age", VarKind::Continuous, VarGroup::Pt, ""}});
  std::size_t n = 6;
  std::vector<Column> cols(3);
  cols[0].num = {0, 1, 0, 1, 0, 1};
  cols[0].missing.assign(n, 0);
  cols[1].str = {"A", "A", "B", kMissingLevel, "A", "B"};
  cols[1].missing.assign(n, 0);
  cols[2].num = {50, 60, 70, 55, 58, 61};
  cols[2].missing.assign(n, 0);
  std::vector<std::string> rid{"a", "b", "c", "d", "e", "f"};
  std::vector<std::string> pid{"1", "2", "3", "4", "5", "6"};
  Dataset ds(sch, rid, pid, cols, Eigen::MatrixXd());

  CovariateEncoder enc(ds, {"dev", "age"});
  // reference level is A (most frequent non-missing): columns B, (Missing), age
  REQUIRE(enc.width() == 3);
  CHECK(enc.column_names()[0] == "dev=(Missing)");
  CHECK(enc.column_names()[1] == "dev=B");
  CHECK(enc.column_names()[2] == "age");

  std::vector<int> rows{0, 2, 3};
  Eigen::MatrixXd X = enc.encode(ds, rows);
  CHECK(X(0, 0) == 0.0);
  CHECK(X(0, 1) == 0.0);  // A row: all indicators zero
  CHECK(X(1, 1) == 1.0);  // B
  CHECK(X(2, 0) == 1.0);  // (Missing)
  CHECK(X(2, 2) == 55.0);
}
