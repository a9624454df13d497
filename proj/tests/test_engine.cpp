#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "monotune/engine.hpp"

using monotune::HyperTuneConfig;
using monotune::Monotonicity;
using monotune::Rng;
using monotune::Scale;
using monotune::SearchSpace;

namespace {

SearchSpace unit_space(std::vector<Monotonicity> signs) {
  std::vector<monotune::Dimension> dims;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    dims.push_back({"x" + std::to_string(i), 0.0, 1.0, Scale::kLinear, signs[i]});
  }
  return SearchSpace(dims);
}

HyperTuneConfig small_config(std::uint64_t seed) {
  HyperTuneConfig c;
  c.seed = seed;
  c.subset_runs = 3;
  c.subset_iters = 10;
  c.iterations = 8;
  c.virtual_points = 5;
  c.acquisition_budget = 300;
  return c;
}

void check_invariants(const monotune::RunRecord& rec, const SearchSpace& space) {
  std::map<std::string, double> last;
  for (const auto& t : rec.trials) {
    EXPECT_TRUE(space.contains(t.x_raw));
    auto it = last.find(t.phase);
    if (it != last.end()) EXPECT_GE(t.incumbent_y, it->second);
    last[t.phase] = t.incumbent_y;
  }
}

}  // namespace

TEST(RunBo, ConcaveObjectiveReachesGridMaximum) {
  const SearchSpace space({{"x", -2.0, 3.0, Scale::kLinear, Monotonicity::kNeutral}});
  const monotune::Objective f = [](const Eigen::VectorXd& x) { return -(x[0] - 0.7) * (x[0] - 0.7); };
  double grid_max = -1e300;
  for (int i = 0; i <= 50000; ++i) grid_max = std::max(grid_max, f(Eigen::VectorXd::Constant(1, -2.0 + 5.0 * i / 50000)));
  HyperTuneConfig c;
  Rng rng(3);
  const auto rec = monotune::run_bo(f, space, 20, {}, c, rng);
  EXPECT_NEAR(rec.final_incumbent.y_best, grid_max, 1e-2);
  EXPECT_EQ(rec.trials.size(), 25u);
  check_invariants(rec, space);
}

TEST(RunBo, ZeroIterationsGivesOnlyInitialDesign) {
  const auto space = unit_space({Monotonicity::kNeutral, Monotonicity::kNeutral, Monotonicity::kNeutral});
  HyperTuneConfig c;
  Rng rng(1);
  const auto rec = monotune::run_bo([](const Eigen::VectorXd& x) { return x.sum(); }, space, 0, {}, c, rng);
  ASSERT_EQ(rec.trials.size(), 6u);
  for (const auto& t : rec.trials) EXPECT_EQ(t.phase, "init");
}

TEST(RunBo, IdenticalSeedGivesIdenticalTrials) {
  const auto space = unit_space({Monotonicity::kNeutral, Monotonicity::kNeutral});
  const monotune::Objective f = [](const Eigen::VectorXd& x) { return std::sin(5 * x[0]) + x[1]; };
  HyperTuneConfig c;
  Rng a(8), b(8);
  const auto ra = monotune::run_bo(f, space, 6, {}, c, a);
  const auto rb = monotune::run_bo(f, space, 6, {}, c, b);
  ASSERT_EQ(ra.trials.size(), rb.trials.size());
  for (std::size_t i = 0; i < ra.trials.size(); ++i) {
    EXPECT_EQ(ra.trials[i].x_raw, rb.trials[i].x_raw);
    EXPECT_EQ(ra.trials[i].y, rb.trials[i].y);
  }
}

TEST(RunBo, FailedEvaluationsAreRecordedAndExcluded) {
  const auto space = unit_space({Monotonicity::kNeutral});
  int calls = 0;
  const monotune::Objective f = [&](const Eigen::VectorXd& x) {
    if (++calls % 3 == 0) throw std::runtime_error("boom");
    return x[0];
  };
  std::size_t max_values = 0;
  monotune::RunOptions opts;
  opts.fit_observer = [&](auto values, auto) {
    for (const auto& v : values) EXPECT_TRUE(std::isfinite(v.y));
    max_values = std::max(max_values, values.size());
  };
  HyperTuneConfig c;
  Rng rng(2);
  const auto rec = monotune::run_bo(f, space, 6, {}, c, rng, opts);
  const auto failed = std::count_if(rec.trials.begin(), rec.trials.end(), [](const auto& t) { return t.failed; });
  EXPECT_EQ(failed, 3);
  EXPECT_EQ(rec.trials.size(), 11u);
  EXPECT_EQ(max_values, 7u);
  for (const auto& t : rec.trials) {
    if (t.failed) EXPECT_EQ(t.y, -std::numeric_limits<double>::infinity());
  }
}

TEST(RunBo, EvaluationBudgetStopsEarly) {
  const auto space = unit_space({Monotonicity::kNeutral});
  HyperTuneConfig c;
  Rng rng(2);
  monotune::RunOptions opts;
  opts.budget.max_evaluations = 7;
  const auto rec = monotune::run_bo([](const Eigen::VectorXd& x) { return x[0]; }, space, 20, {}, c, rng, opts);
  EXPECT_EQ(rec.trials.size(), 7u);
  EXPECT_EQ(rec.main_evaluations, 7);
}

TEST(RunBo, ObservationSetContainsEveryValueAndSignOnce) {
  const auto space = unit_space({Monotonicity::kIncreasing, Monotonicity::kNeutral});
  Rng sign_rng(4);
  const auto signs = monotune::sample_virtual_points(space, Eigen::Vector2d(0.5, 0.5), 4, sign_rng);
  HyperTuneConfig c;
  c.acquisition_budget = 200;
  std::vector<std::size_t> sizes;
  monotune::RunOptions opts;
  opts.fit_observer = [&](auto values, auto fitted_signs) {
    sizes.push_back(values.size());
    ASSERT_EQ(fitted_signs.size(), signs.size());
    for (std::size_t i = 0; i < signs.size(); ++i) {
      EXPECT_EQ(fitted_signs[i].x, signs[i].x);
      EXPECT_EQ(fitted_signs[i].dim, signs[i].dim);
    }
  };
  Rng rng(5);
  monotune::run_bo([](const Eigen::VectorXd& x) { return x[0] - x[1] * x[1]; }, space, 5, signs, c, rng, opts);
  ASSERT_EQ(sizes.size(), 5u);
  for (std::size_t t = 0; t < sizes.size(); ++t) EXPECT_EQ(sizes[t], 5 + t);
}

TEST(AverageOptima, IsArithmeticMean) {
  std::vector<Eigen::VectorXd> xs{Eigen::VectorXd::Constant(1, 0.1), Eigen::VectorXd::Constant(1, 0.2),
                                  Eigen::VectorXd::Constant(1, 0.3)};
  EXPECT_NEAR(monotune::average_optima(xs)[0], 0.2, 1e-15);
  EXPECT_EQ(monotune::average_optima(std::span(xs).first(1))[0], 0.1);
}

TEST(SubsetStage, SingleRunAveragesToItsArgmax) {
  const auto space = unit_space({Monotonicity::kIncreasing, Monotonicity::kNeutral});
  const auto task = monotune::synthetic_task(space, {});
  auto c = small_config(1);
  c.subset_runs = 1;
  const auto res = monotune::subset_stage(task, c);
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.averaged_optimum, res.records[0].final_incumbent.x_best);
  EXPECT_EQ(res.records[0].trials.front().phase, "subset-1");
}

TEST(SubsetStage, ZeroRunsIsInvalid) {
  const auto space = unit_space({Monotonicity::kIncreasing});
  auto c = small_config(1);
  c.subset_runs = 0;
  EXPECT_THROW(monotune::subset_stage(monotune::synthetic_task(space, {}), c), monotune::InvalidArgument);
}

TEST(SubsetStage, RecoversSmallDataPeak) {
  const auto space = unit_space({Monotonicity::kIncreasing, Monotonicity::kNeutral});
  const auto task = monotune::synthetic_task(space, {});
  std::vector<double> peaks;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto c = small_config(s);
    c.subset_runs = 2;
    peaks.push_back(monotune::subset_stage(task, c).averaged_optimum[0]);
  }
  std::sort(peaks.begin(), peaks.end());
  const double median = 0.5 * (peaks[9] + peaks[10]);
  EXPECT_GE(median, 0.3);
  EXPECT_LE(median, 0.5);
}

TEST(VirtualPoints, ConstructionRule) {
  const auto space = unit_space({Monotonicity::kIncreasing, Monotonicity::kNeutral});
  const Eigen::Vector2d upper(0.4, 0.7);
  Rng rng(3);
  EXPECT_TRUE(monotune::sample_virtual_points(space, upper, 0, rng).empty());
  const auto signs = monotune::sample_virtual_points(space, upper, 5, rng);
  ASSERT_EQ(signs.size(), 5u);
  for (const auto& s : signs) {
    EXPECT_EQ(s.dim, 0);
    EXPECT_EQ(s.sign, 1);
    for (int d = 0; d < 2; ++d) {
      EXPECT_GE(s.x[d], 0.0);
      EXPECT_LE(s.x[d], upper[d]);
    }
  }
  EXPECT_THROW(monotune::sample_virtual_points(space, upper, -1, rng), monotune::InvalidArgument);
}

TEST(VirtualPoints, DecreasingDimensionGetsNegativeSigns) {
  const SearchSpace space({{"ratio", 0.0, 1.0, Scale::kLinear, Monotonicity::kNeutral},
                           {"alpha", -7.0, -1.0, Scale::kExponent10, Monotonicity::kDecreasing}});
  Rng rng(9);
  const auto signs = monotune::sample_virtual_points(space, Eigen::Vector2d(0.6, 0.9), 10, rng);
  ASSERT_EQ(signs.size(), 10u);
  for (const auto& s : signs) {
    EXPECT_EQ(s.dim, 1);
    EXPECT_EQ(s.sign, -1);
  }
}

TEST(VirtualPoints, AllNeutralGivesEmptyList) {
  const auto space = unit_space({Monotonicity::kNeutral, Monotonicity::kNeutral});
  Rng rng(1);
  EXPECT_TRUE(monotune::sample_virtual_points(space, Eigen::Vector2d(0.5, 0.5), 10, rng).empty());
}

TEST(HyperTune, AllNeutralMainPhaseEqualsPlainBo) {
  const auto space = unit_space({Monotonicity::kNeutral, Monotonicity::kNeutral});
  const auto task = monotune::synthetic_task(space, {});
  const auto c = small_config(12);
  const auto ht = monotune::hypertune(task, c);
  const auto ei = monotune::run_ei_baseline(task, c);
  EXPECT_TRUE(ht.sign_points.empty());
  std::vector<monotune::Trial> main;
  for (const auto& t : ht.trials) {
    if (t.phase == "init" || t.phase == "main") main.push_back(t);
  }
  ASSERT_EQ(main.size(), ei.trials.size());
  for (std::size_t i = 0; i < main.size(); ++i) {
    EXPECT_EQ(main[i].phase, ei.trials[i].phase);
    EXPECT_EQ(main[i].x_raw, ei.trials[i].x_raw);
    EXPECT_EQ(main[i].y, ei.trials[i].y);
  }
}

TEST(HyperTune, BudgetLedgerAndElapsedTime) {
  const auto space = unit_space({Monotonicity::kIncreasing, Monotonicity::kNeutral});
  const auto task = monotune::synthetic_task(space, {});
  const auto c = small_config(3);
  const auto rec = monotune::hypertune(task, c);
  ASSERT_EQ(rec.subset_run_seconds.size(), 3u);
  double sum = 0.0;
  for (double s : rec.subset_run_seconds) sum += s;
  EXPECT_DOUBLE_EQ(rec.subset_seconds, sum);
  EXPECT_DOUBLE_EQ(rec.total_seconds(), rec.subset_seconds + rec.main_seconds);
  EXPECT_EQ(rec.subset_evaluations, 3 * (5 + 10));
  EXPECT_EQ(rec.main_evaluations, 5 + 8);
  ASSERT_TRUE(rec.averaged_optimum.has_value());
  EXPECT_EQ(rec.sign_points.size(), 5u);
  for (const auto& s : rec.sign_points) EXPECT_LE(s.x[0], (*rec.averaged_optimum)[0]);
  for (const auto& t : rec.trials) {
    if (t.phase == "init") EXPECT_GE(t.elapsed_seconds, rec.subset_seconds);
  }
  check_invariants(rec, space);
}

TEST(HyperTune, InvertedSignStillTerminates) {
  const auto space = unit_space({Monotonicity::kDecreasing, Monotonicity::kNeutral});
  const auto task = monotune::synthetic_task(space, {});
  const auto rec = monotune::hypertune(task, small_config(4));
  EXPECT_EQ(rec.main_evaluations, 13);
  for (const auto& s : rec.sign_points) EXPECT_EQ(s.sign, -1);
  check_invariants(rec, space);
}
