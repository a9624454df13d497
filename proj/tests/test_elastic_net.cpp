#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "monotune/elastic_net.hpp"

namespace {

// Ridge-penalized logistic regression by Newton's method; independent of the
// proximal solver under test.
Eigen::VectorXd newton_ridge(const Eigen::MatrixXd& x, const std::vector<int>& y, double lambda) {
  const Eigen::Index n = x.rows(), f = x.cols();
  Eigen::MatrixXd a(n, f + 1);
  a << x, Eigen::VectorXd::Ones(n);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(f + 1);
  Eigen::MatrixXd pen = Eigen::MatrixXd::Identity(f + 1, f + 1) * lambda;
  pen(f, f) = 0.0;
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd z = a * beta;
    Eigen::VectorXd p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = 1.0 / (1.0 + std::exp(-z[i]));
      w[i] = p[i] * (1.0 - p[i]);
    }
    Eigen::VectorXd yv(n);
    for (Eigen::Index i = 0; i < n; ++i) yv[i] = y[i];
    const Eigen::VectorXd grad = a.transpose() * (p - yv) / n + pen * beta;
    const Eigen::MatrixXd hess = a.transpose() * w.asDiagonal() * a / n + pen;
    beta -= hess.ldlt().solve(grad);
  }
  return beta;
}

}  // namespace

TEST(ElasticNet, LossIsNonIncreasing) {
  const auto ds = monotune::generate_classification(300, 6, 3, 11);
  const auto scaled = monotune::FeatureScaler::fit(ds.features).apply(ds.features);
  for (double ratio : {0.0, 0.5, 1.0}) {
    monotune::ElasticNetOptions opts;
    opts.record_loss = true;
    const auto model = monotune::train_elastic_net(scaled, ds.labels, ratio, -2.0, opts);
    for (std::size_t i = 1; i < model.loss_trace.size(); ++i) {
      EXPECT_LE(model.loss_trace[i], model.loss_trace[i - 1] + 1e-12) << "ratio " << ratio << " it " << i;
    }
  }
}

TEST(ElasticNet, PureRidgeMatchesNewtonSolution) {
  const auto ds = monotune::generate_classification(200, 4, 3, 5);
  const auto scaled = monotune::FeatureScaler::fit(ds.features).apply(ds.features);
  monotune::ElasticNetOptions opts;
  opts.max_iterations = 20000;
  opts.gradient_tolerance = 1e-9;
  const auto model = monotune::train_elastic_net(scaled, ds.labels, 0.0, -1.0, opts);
  const auto beta = newton_ridge(scaled, ds.labels, 0.1);
  EXPECT_LT((model.weights - beta.head(4)).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_NEAR(model.intercept, beta[4], 1e-5);
}

TEST(ElasticNet, StrongLassoZeroesAllWeights) {
  const auto ds = monotune::generate_classification(200, 4, 3, 5);
  const auto scaled = monotune::FeatureScaler::fit(ds.features).apply(ds.features);
  const auto model = monotune::train_elastic_net(scaled, ds.labels, 1.0, 1.0);
  EXPECT_EQ(model.weights.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ElasticNet, RejectsSingleClassAndBadRatio) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 2);
  EXPECT_THROW(monotune::train_elastic_net(x, {1, 1, 1, 1, 1}, 0.5, -3.0), monotune::InvalidArgument);
  EXPECT_THROW(monotune::train_elastic_net(x, {0, 1, 0, 1, 0}, 1.5, -3.0), monotune::InvalidArgument);
}

class BundledTask : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new monotune::Dataset(monotune::load_csv_dataset(
        std::filesystem::path(MONOTUNE_DATA_DIR) / "classification.csv"));
  }
  static void TearDownTestSuite() { delete data_; }
  static monotune::Dataset* data_;
};
monotune::Dataset* BundledTask::data_ = nullptr;

TEST_F(BundledTask, ModeratePenaltyBeatsHeaviestPenalty) {
  const auto split = monotune::split_dataset(*data_, 0.6, 0.2, 0);
  EXPECT_GE(monotune::fit_and_score(split.train, split.valid, 0.5, -4.0),
            monotune::fit_and_score(split.train, split.valid, 0.5, -1.0));
}

TEST_F(BundledTask, SmallDataPrefersEqualOrStrongerPenalty) {
  const auto split = monotune::split_dataset(*data_, 0.6, 0.2, 0);
  auto argmax = [](auto&& score) {
    double best = -1.0, arg = 0.0;
    for (int k = 0; k <= 12; ++k) {
      const double e = -7.0 + 0.5 * k;
      const double s = score(e);
      if (s > best) best = s, arg = e;
    }
    return arg;
  };
  const double full = argmax([&](double e) { return monotune::fit_and_score(split.train, split.valid, 0.5, e); });
  std::vector<double> small;
  for (std::uint64_t b = 0; b < 5; ++b) {
    const auto sub = monotune::subsample(split.train, 0.1, monotune::derive_seed(1, b));
    small.push_back(argmax([&](double e) { return monotune::fit_and_score(sub, split.valid, 0.5, e); }));
  }
  std::sort(small.begin(), small.end());
  EXPECT_GE(small[2], full - 0.5);
}

TEST_F(BundledTask, TaskWiresObjectivesAndHeldout) {
  const auto task = monotune::elastic_net_task(*data_, monotune::elastic_net_space(), 0);
  Eigen::VectorXd x(2);
  x << 0.5, -3.0;
  const double v = task.full_objective(x);
  EXPECT_GT(v, 0.5);
  EXPECT_LE(v, 1.0);
  const double h = task.heldout_error(x);
  EXPECT_GE(h, 0.0);
  EXPECT_LT(h, 0.5);
  EXPECT_EQ(task.subset_objective_factory(1, 0.1, 3)(x), task.subset_objective_factory(1, 0.1, 3)(x));
  EXPECT_DOUBLE_EQ(task.subset_cost(0.1), 0.1);
}
