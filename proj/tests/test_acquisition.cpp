#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "monotune/acquisition.hpp"
#include "monotune/random.hpp"

using monotune::Incumbent;

namespace {

Eigen::VectorXd pt(double x) { return Eigen::VectorXd::Constant(1, x); }

double monte_carlo_ei(double mean, double sigma, double y_best, int samples, std::uint64_t seed) {
  monotune::Rng rng(seed);
  double sum = 0.0;
  for (int i = 0; i < samples; ++i) sum += std::max(mean + sigma * rng.normal() - y_best, 0.0);
  return sum / samples;
}

monotune::SearchSpace unit_space(int dims) {
  std::vector<monotune::Dimension> d;
  for (int i = 0; i < dims; ++i) d.push_back({"x" + std::to_string(i), 0.0, 1.0});
  return monotune::SearchSpace(d);
}

// Two low observations flanking a high one: EI peaks near the high point.
monotune::EPState peaked_model_1d() {
  const std::vector<monotune::ValueObservation> values{
      {pt(0.1), -1.0}, {pt(0.35), 1.2}, {pt(0.6), -0.8}, {pt(0.95), -1.5}};
  return monotune::ep_fit(values, {}, {0.01, 1.0, 1e-4});
}

}  // namespace

TEST(ExpectedImprovement, StandardNormalAtIncumbent) {
  const Incumbent inc{pt(0.0), 0.0};
  const double ei = monotune::expected_improvement(0.0, 1.0, inc);
  EXPECT_NEAR(ei, 0.3989422804014327, 1e-15);
  EXPECT_LT(std::abs(ei - monte_carlo_ei(0.0, 1.0, 0.0, 1'000'000, 3)) / ei, 1e-2);
}

TEST(ExpectedImprovement, DegenerateSigma) {
  const Incumbent inc{pt(0.0), 1.0};
  EXPECT_EQ(monotune::expected_improvement(0.5, 0.0, inc), 0.0);
  EXPECT_EQ(monotune::expected_improvement(1.0, 0.0, inc), 0.0);
  EXPECT_DOUBLE_EQ(monotune::expected_improvement(4.0, 1e-30, inc), 3.0);
  EXPECT_EQ(monotune::expected_improvement(0.5, -1e-12, inc), 0.0);
  EXPECT_THROW(monotune::expected_improvement(0.5, -1e-6, inc), monotune::InvalidArgument);
}

TEST(ExpectedImprovement, MonotoneInMeanAndSigma) {
  monotune::Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const Incumbent inc{pt(0.0), rng.uniform(-2.0, 2.0)};
    const double sigma = rng.uniform(0.0, 2.0);
    const double m1 = rng.uniform(-4.0, 4.0);
    const double m2 = m1 + rng.uniform(0.0, 1.0);
    EXPECT_LE(monotune::expected_improvement(m1, sigma * sigma, inc),
              monotune::expected_improvement(m2, sigma * sigma, inc) + 1e-15);
    const double below = inc.y_best - rng.uniform(0.0, 3.0);
    const double s2 = sigma + rng.uniform(0.0, 1.0);
    EXPECT_LE(monotune::expected_improvement(below, sigma * sigma, inc),
              monotune::expected_improvement(below, s2 * s2, inc) + 1e-15);
  }
}

TEST(MaximizeAcquisition, FindsGridPeak1d) {
  const auto model = peaked_model_1d();
  const Incumbent inc{pt(0.35), 1.2};
  double grid_best = -1.0, grid_arg = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = i * 1e-3;
    const double v = monotune::expected_improvement(model, pt(x), inc);
    if (v > grid_best) {
      grid_best = v;
      grid_arg = x;
    }
  }
  monotune::Rng rng(1);
  const auto x = monotune::maximize_acquisition(model, unit_space(1), inc, 1000, rng);
  EXPECT_NEAR(x[0], grid_arg, 0.05);
  EXPECT_GE(monotune::expected_improvement(model, x, inc), 0.95 * grid_best);
}

TEST(MaximizeAcquisition, ReachesGridMaximum2d) {
  Eigen::Vector2d a(0.2, 0.3), b(0.7, 0.8), c(0.5, 0.5), d(0.9, 0.1);
  const std::vector<monotune::ValueObservation> values{{a, 0.3}, {b, 1.0}, {c, -0.5}, {d, 0.1}};
  const auto model = monotune::ep_fit(values, {}, {0.05, 1.0, 1e-3});
  const Incumbent inc{b, 1.0};
  double grid_best = -1.0;
  Eigen::VectorXd x(2);
  for (int i = 0; i <= 1000; ++i) {
    for (int j = 0; j <= 1000; ++j) {
      x << i * 1e-3, j * 1e-3;
      grid_best = std::max(grid_best, monotune::expected_improvement(model, x, inc));
    }
  }
  monotune::Rng rng(2);
  const auto best = monotune::maximize_acquisition(model, unit_space(2), inc, 1000, rng);
  EXPECT_GE(monotune::expected_improvement(model, best, inc), 0.95 * grid_best);
}

TEST(MaximizeAcquisition, SingleCandidateStaysInBox) {
  const auto model = peaked_model_1d();
  monotune::Rng rng(3);
  const auto x = monotune::maximize_acquisition(model, unit_space(1), {pt(0.35), 1.2}, 1, rng);
  EXPECT_GE(x[0], 0.0);
  EXPECT_LE(x[0], 1.0);
  EXPECT_THROW(monotune::maximize_acquisition(model, unit_space(1), {}, 0, rng),
               monotune::InvalidArgument);
}

TEST(MaximizeAcquisition, DeterministicUnderSeed) {
  const auto model = peaked_model_1d();
  monotune::Rng r1(42), r2(42);
  const Incumbent inc{pt(0.35), 1.2};
  EXPECT_EQ(monotune::maximize_acquisition(model, unit_space(1), inc, 300, r1),
            monotune::maximize_acquisition(model, unit_space(1), inc, 300, r2));
}
