#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "monotune/gp_fit.hpp"
#include "monotune/random.hpp"
#include "oracles.hpp"

using monotune::ValueObservation;

TEST(GpLogMarginal, MatchesClosedForm) {
  monotune::Rng rng(4);
  std::vector<ValueObservation> values;
  std::vector<Eigen::VectorXd> xs;
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) {
    Eigen::VectorXd x(2);
    x << rng.uniform(), rng.uniform();
    y[i] = rng.normal();
    xs.push_back(x);
    values.push_back({x, y[i]});
  }
  const monotune::KernelParams params{0.3, 1.4, 0.02};
  EXPECT_NEAR(monotune::gp_log_marginal_likelihood(values, params),
              oracle::exact_gp(xs, y, 0.3, 1.4, 0.02).log_marginal, 1e-10);
}

TEST(FitGpHyperparams, ConstantTargetsFallBack) {
  std::vector<ValueObservation> values;
  for (double x : {0.1, 0.4, 0.8}) values.push_back({Eigen::VectorXd::Constant(1, x), 0.7});
  const auto params = monotune::fit_gp_hyperparams(values);
  EXPECT_DOUBLE_EQ(params.lengthscale, 0.2);
  EXPECT_DOUBLE_EQ(params.amplitude, 1.0);
  EXPECT_DOUBLE_EQ(params.noise, 1e-4);
}

TEST(FitGpHyperparams, NeedsTwoObservations) {
  const std::vector<ValueObservation> one{{Eigen::VectorXd::Constant(1, 0.5), 1.0}};
  EXPECT_THROW(monotune::fit_gp_hyperparams(one), monotune::InvalidArgument);
}

TEST(FitGpHyperparams, StaysInsideBoundsAndIsDeterministic) {
  monotune::Rng rng(6);
  std::vector<ValueObservation> values;
  for (int i = 0; i < 15; ++i) {
    Eigen::VectorXd x(1);
    x << rng.uniform();
    values.push_back({x, std::sin(6.0 * x[0]) + 0.1 * rng.normal()});
  }
  const auto a = monotune::fit_gp_hyperparams(values);
  const auto b = monotune::fit_gp_hyperparams(values);
  EXPECT_EQ(a.lengthscale, b.lengthscale);
  EXPECT_EQ(a.amplitude, b.amplitude);
  EXPECT_EQ(a.noise, b.noise);
  EXPECT_GE(a.lengthscale, 0.01 * (1 - 1e-12));
  EXPECT_LE(a.lengthscale, 10.0 * (1 + 1e-12));
  EXPECT_GE(a.noise, 1e-6 * (1 - 1e-12));
  EXPECT_LE(a.noise, 1.0 * (1 + 1e-12));
}

// Simulation study: draw 40 points from a GP with theta = 0.3, noise 0.01 and
// check the median recovered log-lengthscale over 20 seeds.
TEST(FitGpHyperparams, RecoversLengthscaleOfKnownGp) {
  constexpr double kTheta = 0.3;
  std::vector<double> recovered;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    monotune::Rng rng(1000 + seed);
    std::vector<Eigen::VectorXd> xs;
    for (int i = 0; i < 40; ++i) {
      Eigen::VectorXd x(2);
      x << rng.uniform(), rng.uniform();
      xs.push_back(x);
    }
    Eigen::MatrixXd k(40, 40);
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 40; ++j) k(i, j) = oracle::se(xs[i], xs[j], kTheta, 1.0);
    k.diagonal().array() += 1e-9;
    const Eigen::MatrixXd l = k.llt().matrixL();
    Eigen::VectorXd z(40);
    for (int i = 0; i < 40; ++i) z[i] = rng.normal();
    const Eigen::VectorXd f = l * z;
    std::vector<ValueObservation> values;
    for (int i = 0; i < 40; ++i) values.push_back({xs[i], f[i] + 0.1 * rng.normal()});
    recovered.push_back(std::log(monotune::fit_gp_hyperparams(values).lengthscale));
  }
  std::nth_element(recovered.begin(), recovered.begin() + 10, recovered.end());
  EXPECT_NEAR(recovered[10], std::log(kTheta), 0.7);
}
