#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monotune/acquisition.hpp"
#include "monotune/ep.hpp"
#include "monotune/errors.hpp"
#include "monotune/gp_fit.hpp"
#include "monotune/objectives.hpp"
#include "monotune/random.hpp"
#include "monotune/search_space.hpp"

namespace monotune {

struct HyperTuneConfig {
  int subset_runs = 5;           // B
  double subset_fraction = 0.1;
  int subset_iters = 30;
  int virtual_points = 10;       // N
  int iterations = 20;           // T
  int init_points = 0;           // 0 selects max(5, 2D)
  double slack = kDefaultProbitSlack;
  std::uint64_t seed = 0;
  int acquisition_budget = kDefaultAcquisitionBudget;
  EPConfig ep;

  int resolved_init_points(Eigen::Index dims) const {
    return init_points > 0 ? init_points : std::max(5, 2 * static_cast<int>(dims));
  }

  void validate() const {
    if (subset_runs < 1) throw InvalidArgument("subset_runs (B) must be at least 1");
    if (!(subset_fraction > 0.0 && subset_fraction <= 1.0)) {
      throw InvalidArgument("subset_fraction must lie in (0, 1]");
    }
    if (subset_iters < 0) throw InvalidArgument("subset_iters must be non-negative");
    if (virtual_points < 0) throw InvalidArgument("virtual_points (N) must be non-negative");
    if (iterations < 1) throw InvalidArgument("iterations (T) must be at least 1");
    if (init_points != 0 && init_points < 2) throw InvalidArgument("init_points must be at least 2");
    if (!(slack > 0.0)) throw InvalidArgument("probit slack must be positive");
    if (acquisition_budget < 1) throw InvalidArgument("acquisition budget must be at least 1");
    ep.validate();
  }
};

/// Evaluation and wall-clock limits for one BO run; whichever is hit first stops it.
struct Budget {
  std::optional<int> max_evaluations;
  double max_seconds = std::numeric_limits<double>::infinity();
};

struct Trial {
  std::string phase;  // "subset-<b>", "init" or "main"
  int iteration = 0;  // 1-based within the phase
  Eigen::VectorXd x_raw;
  Eigen::VectorXd x_normalized;
  double y = -std::numeric_limits<double>::infinity();
  bool failed = false;
  double incumbent_y = -std::numeric_limits<double>::infinity();
  double elapsed_seconds = 0.0;
};

struct RunRecord {
  std::vector<Trial> trials;
  std::optional<Eigen::VectorXd> averaged_optimum;  // normalized
  std::vector<SignObservation> sign_points;
  Incumbent final_incumbent;  // normalized x, raw y
  Eigen::VectorXd final_x_raw;
  std::vector<double> subset_run_seconds;
  double subset_seconds = 0.0;
  double main_seconds = 0.0;
  int subset_evaluations = 0;
  int main_evaluations = 0;  // full-data evaluations including the initial design

  double total_seconds() const { return subset_seconds + main_seconds; }
};

/// Called with the exact observation set handed to each EP fit.
using FitObserver =
    std::function<void(std::span<const ValueObservation>, std::span<const SignObservation>)>;

struct RunOptions {
  std::string phase = "main";
  /// Added to every trial's elapsed_seconds (time already spent elsewhere).
  double time_offset = 0.0;
  Budget budget;
  FitObserver fit_observer;
};

namespace detail {

inline Eigen::VectorXd uniform_point(Rng& rng, Eigen::Index dims) {
  Eigen::VectorXd x(dims);
  for (Eigen::Index d = 0; d < dims; ++d) x[d] = rng.uniform();
  return x;
}

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Next point from the surrogate; falls back to sign-free EP, then a random point.
inline Eigen::VectorXd propose(std::span<const ValueObservation> values,
                               std::span<const SignObservation> signs, const SearchSpace& space,
                               const HyperTuneConfig& config, Rng& rng,
                               const FitObserver& observer) {
  if (values.size() < 2) return uniform_point(rng, space.size());
  const KernelParams params = fit_gp_hyperparams(values);
  const Standardizer standardizer = Standardizer::fit(values);
  const std::vector<ValueObservation> data = standardize(values, standardizer);
  Incumbent incumbent;
  for (const auto& v : data) {
    if (v.y > incumbent.y_best) {
      incumbent.y_best = v.y;
      incumbent.x_best = v.x;
    }
  }
  if (observer) observer(data, signs);
  std::optional<EPState> model;
  try {
    model = ep_fit(data, signs, params, config.slack, config.ep);
  } catch (const ConditioningError&) {
    try {
      model = ep_fit(data, {}, params, config.slack, config.ep);
    } catch (const ConditioningError&) {
      return uniform_point(rng, space.size());
    }
  }
  return maximize_acquisition(*model, space, incumbent, config.acquisition_budget, rng);
}

}  // namespace detail

/// Bayesian optimization of `objective` over `space` with optional sign observations.
///
/// Evaluates the initial design (phase "init" for the main run), then `iters`
/// acquisitions. Each iteration refits kernel hyperparameters on the value
/// observations, fits EP on values plus signs and maximizes EI. Failed
/// evaluations (exceptions or non-finite results) are logged and excluded.
/// With no signs this is plain EI.
inline RunRecord run_bo(const Objective& objective, const SearchSpace& space, int iters,
                        std::span<const SignObservation> signs, const HyperTuneConfig& config,
                        Rng& rng, const RunOptions& options = {}) {
  config.validate();
  space.validate();
  if (iters < 0) throw InvalidArgument("run_bo: iteration count must be non-negative");
  for (const auto& s : signs) {
    if (s.x.size() != space.size()) throw InvalidArgument("sign point dimension mismatch");
  }

  RunRecord record;
  record.sign_points.assign(signs.begin(), signs.end());
  std::vector<ValueObservation> values;
  const auto start = std::chrono::steady_clock::now();
  const bool is_main = options.phase == "main";
  const int init = config.resolved_init_points(space.size());
  int evaluations = 0;

  auto exhausted = [&] {
    if (options.budget.max_evaluations && evaluations >= *options.budget.max_evaluations) return true;
    return detail::seconds_since(start) >= options.budget.max_seconds;
  };

  auto evaluate = [&](const Eigen::VectorXd& unit, const std::string& phase, int iteration) {
    Trial trial;
    trial.phase = phase;
    trial.iteration = iteration;
    trial.x_normalized = unit;
    trial.x_raw = space.denormalize(unit);
    try {
      const double y = objective(trial.x_raw);
      if (std::isfinite(y)) {
        trial.y = y;
      } else {
        trial.failed = true;
      }
    } catch (const std::exception&) {
      trial.failed = true;
    }
    ++evaluations;
    if (!trial.failed) {
      values.push_back({unit, trial.y});
      if (trial.y > record.final_incumbent.y_best) {
        record.final_incumbent = {unit, trial.y};
        record.final_x_raw = trial.x_raw;
      }
    }
    trial.incumbent_y = record.final_incumbent.y_best;
    trial.elapsed_seconds = options.time_offset + detail::seconds_since(start);
    record.trials.push_back(std::move(trial));
  };

  const std::string init_phase = is_main ? "init" : options.phase;
  for (int i = 0; i < init && !exhausted(); ++i) {
    evaluate(detail::uniform_point(rng, space.size()), init_phase, i + 1);
  }
  for (int t = 1; t <= iters && !exhausted(); ++t) {
    const Eigen::VectorXd next =
        detail::propose(values, signs, space, config, rng, options.fit_observer);
    evaluate(next, options.phase, is_main ? t : init + t);
  }

  const double elapsed = detail::seconds_since(start);
  if (is_main) {
    record.main_seconds = elapsed;
    record.main_evaluations = evaluations;
  } else {
    record.subset_seconds = elapsed;
    record.subset_evaluations = evaluations;
  }
  return record;
}

struct SubsetStageResult {
  Eigen::VectorXd averaged_optimum;  // normalized
  std::vector<RunRecord> records;
  std::vector<Eigen::VectorXd> run_optima;  // normalized argmax of each run
  double seconds = 0.0;                     // sequential sum of run times
  int evaluations = 0;
};

inline constexpr std::uint64_t kMainStream = 1;
inline constexpr std::uint64_t kSignStream = 2;
inline constexpr std::uint64_t kSubsetStreamBase = 100;

/// Arithmetic mean of per-run optima, in normalized coordinates.
inline Eigen::VectorXd average_optima(std::span<const Eigen::VectorXd> optima) {
  if (optima.empty()) throw InvalidArgument("cannot average an empty set of optima");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(optima.front().size());
  for (const auto& x : optima) mean += x;
  return mean / static_cast<double>(optima.size());
}

/// B independent plain-EI runs on distinct data subsets.
inline SubsetStageResult subset_stage(const TuningTask& task, const HyperTuneConfig& config) {
  config.validate();
  if (!task.subset_objective_factory) throw InvalidArgument("task has no subset objectives");
  SubsetStageResult out;
  for (int b = 1; b <= config.subset_runs; ++b) {
    const std::uint64_t stream = derive_seed(config.seed, kSubsetStreamBase + static_cast<std::uint64_t>(b));
    const Objective objective = task.subset_objective_factory(b, config.subset_fraction, stream);
    Rng rng(stream);
    RunOptions options;
    options.phase = "subset-" + std::to_string(b);
    options.time_offset = out.seconds;
    RunRecord run = run_bo(objective, task.space, config.subset_iters, {}, config, rng, options);
    if (run.final_incumbent.x_best.size() == 0) {
      throw InvalidArgument("subset run " + std::to_string(b) + " produced no successful evaluation");
    }
    out.run_optima.push_back(run.final_incumbent.x_best);
    out.seconds += run.subset_seconds;
    out.evaluations += run.subset_evaluations;
    out.records.push_back(std::move(run));
  }
  out.averaged_optimum = average_optima(out.run_optima);
  return out;
}

/// N virtual points uniform in [0, upper] per dimension, with one sign
/// observation per non-neutral dimension at each point.
inline std::vector<SignObservation> sample_virtual_points(const SearchSpace& space,
                                                          const Eigen::VectorXd& upper, int count,
                                                          Rng& rng) {
  if (count < 0) throw InvalidArgument("virtual point count must be non-negative");
  if (upper.size() != space.size()) throw InvalidArgument("averaged optimum has wrong dimension");
  if (((upper.array() < 0.0) || (upper.array() > 1.0)).any()) {
    throw InvalidArgument("averaged optimum must lie in the normalized box");
  }
  std::vector<SignObservation> out;
  if (space.all_neutral()) return out;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd x(space.size());
    for (Eigen::Index d = 0; d < space.size(); ++d) x[d] = rng.uniform(0.0, upper[d]);
    for (Eigen::Index d = 0; d < space.size(); ++d) {
      const int sign = sign_of(space[d].monotonicity);
      if (sign != 0) out.push_back({x, static_cast<int>(d), sign});
    }
  }
  return out;
}

/// Subset stage, virtual sign sampling, then BO on the full-data objective with signs.
inline RunRecord hypertune(const TuningTask& task, const HyperTuneConfig& config,
                           const RunOptions& main_options = {}) {
  config.validate();
  SubsetStageResult subsets = subset_stage(task, config);
  Rng sign_rng(derive_seed(config.seed, kSignStream));
  const auto signs =
      sample_virtual_points(task.space, subsets.averaged_optimum, config.virtual_points, sign_rng);

  Rng main_rng(derive_seed(config.seed, kMainStream));
  RunOptions options = main_options;
  options.phase = "main";
  options.time_offset = subsets.seconds;
  RunRecord main = run_bo(task.full_objective, task.space, config.iterations, signs, config,
                          main_rng, options);

  RunRecord out;
  for (auto& run : subsets.records) {
    for (auto& trial : run.trials) out.trials.push_back(std::move(trial));
    out.subset_run_seconds.push_back(run.subset_seconds);
  }
  for (auto& trial : main.trials) out.trials.push_back(std::move(trial));
  out.averaged_optimum = subsets.averaged_optimum;
  out.sign_points = signs;
  out.final_incumbent = main.final_incumbent;
  out.final_x_raw = main.final_x_raw;
  out.subset_seconds = subsets.seconds;
  out.subset_evaluations = subsets.evaluations;
  out.main_seconds = main.main_seconds;
  out.main_evaluations = main.main_evaluations;
  return out;
}

/// Plain-EI baseline on the full-data objective, using the same main-loop
/// random stream as hypertune.
inline RunRecord run_ei_baseline(const TuningTask& task, const HyperTuneConfig& config,
                                 const Budget& budget = {}) {
  Rng rng(derive_seed(config.seed, kMainStream));
  RunOptions options;
  options.budget = budget;
  int iters = config.iterations;
  if (budget.max_evaluations) {
    iters = std::max(0, *budget.max_evaluations - config.resolved_init_points(task.space.size()));
  }
  return run_bo(task.full_objective, task.space, iters, {}, config, rng, options);
}

}  // namespace monotune
