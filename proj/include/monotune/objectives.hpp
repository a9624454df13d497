#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "monotune/errors.hpp"
#include "monotune/random.hpp"
#include "monotune/search_space.hpp"

namespace monotune {

/// Objective over declared coordinates; higher is better.
using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Full-data objective, per-subset objectives, and the space they share.
struct TuningTask {
  SearchSpace space;
  Objective full_objective;
  /// (subset index b, data fraction, seed) -> objective on that subset.
  std::function<Objective(int, double, std::uint64_t)> subset_objective_factory;
  /// Generalization error of a declared point, when the task has a heldout split.
  std::function<double(const Eigen::VectorXd&)> heldout_error;
  /// Known maximum of `full_objective`, when available.
  std::optional<double> reference_optimum;
  /// Upper limit on the data fraction a subset objective actually uses.
  double max_subset_fraction = 1.0;
  std::string description;

  /// Cost of one subset evaluation relative to a full-data evaluation.
  double subset_cost(double fraction) const { return std::min(fraction, max_subset_fraction); }
};

enum class Regime { kSmall, kFull };

/// Complexity-shift family: the small-data curve peaks at `c_small` and then
/// decays, the full-data curve keeps rising until `c_big` and is flat after it.
struct SyntheticComplexityParams {
  double c_small = 0.4;
  double c_big = 0.8;
  double noise_sd = 0.0;
  double decay = 4.0;

  void validate() const {
    if (!(0.0 < c_small && c_small < c_big && c_big < 1.0)) {
      throw InvalidArgument("synthetic objective needs 0 < c_small < c_big < 1");
    }
    if (!(noise_sd >= 0.0)) throw InvalidArgument("synthetic noise_sd must be non-negative");
    if (!(decay > 0.0)) throw InvalidArgument("synthetic decay must be positive");
  }
};

inline constexpr double kNuisanceWeight = 0.1;

namespace detail {

// Smoothstep rise on [0, c_big], flat afterwards.
inline double full_curve(double c, double c_big) {
  const double u = std::clamp(c / c_big, 0.0, 1.0);
  return 0.2 + 0.7 * u * u * (3.0 - 2.0 * u);
}

inline double small_curve(double c, double c_small, double decay) {
  constexpr double kRiseWidth = 0.25;
  if (c <= c_small) {
    const double u = (c - c_small) / kRiseWidth;
    return 0.2 + 0.6 * std::exp(-u * u);
  }
  return 0.2 + 0.6 * std::exp(-decay * (c - c_small));
}

// Deterministic N(0,1) draw keyed on the point and a seed.
inline double keyed_normal(const Eigen::VectorXd& x, std::uint64_t seed) {
  std::uint64_t h = mix_seed(seed);
  for (Eigen::Index i = 0; i < x.size(); ++i) h = mix_seed(h ^ std::bit_cast<std::uint64_t>(x[i]));
  Rng rng(h);
  return rng.normal();
}

}  // namespace detail

/// Synthetic objective over x in [0,1]^D. Dimension 0 is the complexity axis,
/// the others carry a mild quadratic penalty around 0.5. Noise, if any, is a
/// pure function of (x, noise_seed).
inline Objective synthetic_objective(const SyntheticComplexityParams& params, Regime regime,
                                     std::uint64_t noise_seed = 0) {
  params.validate();
  return [params, regime, noise_seed](const Eigen::VectorXd& x) {
    if (x.size() < 1) throw InvalidArgument("synthetic objective needs at least one dimension");
    double value = regime == Regime::kFull
                       ? detail::full_curve(x[0], params.c_big)
                       : detail::small_curve(x[0], params.c_small, params.decay);
    for (Eigen::Index i = 1; i < x.size(); ++i) {
      value -= kNuisanceWeight * (x[i] - 0.5) * (x[i] - 0.5);
    }
    if (params.noise_sd > 0.0) value += params.noise_sd * detail::keyed_normal(x, noise_seed);
    return value;
  };
}

/// Tuning task over the synthetic family. Declared coordinates are normalized
/// through `space`, so any bounds work; dimension 0 must be the complexity axis.
inline TuningTask synthetic_task(const SearchSpace& space, const SyntheticComplexityParams& params,
                                 std::uint64_t noise_seed = 0) {
  params.validate();
  TuningTask task;
  task.space = space;
  const Objective full = synthetic_objective(params, Regime::kFull, noise_seed);
  task.full_objective = [space, full](const Eigen::VectorXd& declared) {
    return full(space.normalize(declared));
  };
  task.subset_objective_factory = [space, params](int b, double, std::uint64_t seed) -> Objective {
    const Objective small =
        synthetic_objective(params, Regime::kSmall, derive_seed(seed, static_cast<std::uint64_t>(b)));
    return [space, small](const Eigen::VectorXd& declared) {
      return small(space.normalize(declared));
    };
  };
  // Noise-free maximum: complexity at or past c_big, nuisance dimensions at 0.5.
  task.reference_optimum = detail::full_curve(1.0, params.c_big);
  task.description = "synthetic complexity-shift objective";
  return task;
}

}  // namespace monotune
