#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "monotune/ep.hpp"
#include "monotune/errors.hpp"
#include "monotune/normal.hpp"
#include "monotune/random.hpp"
#include "monotune/search_space.hpp"

namespace monotune {

/// Best value observation so far. Sign observations never contribute.
struct Incumbent {
  Eigen::VectorXd x_best;
  double y_best = -std::numeric_limits<double>::infinity();
};

inline constexpr double kDegenerateSigma = 1e-12;

inline double expected_improvement(double mean, double variance, const Incumbent& incumbent) {
  if (variance < -1e-9) throw InvalidArgument("expected_improvement: negative variance");
  const double sigma = std::sqrt(std::max(variance, 0.0));
  const double gain = mean - incumbent.y_best;
  if (sigma <= kDegenerateSigma) return std::max(gain, 0.0);
  const double z = gain / sigma;
  return std::max(gain * normal::cdf(z) + sigma * normal::pdf(z), 0.0);
}

inline double expected_improvement(const EPState& model, const Eigen::VectorXd& x,
                                   const Incumbent& incumbent) {
  const Prediction p = ep_predict(model, x);
  return expected_improvement(p.mean, p.variance, incumbent);
}

inline constexpr int kDefaultAcquisitionBudget = 1000;
inline constexpr int kRefinementEvaluations = 50;

/// Random search over [0,1]^D followed by coordinate-wise pattern search.
///
/// Ties go to the lowest candidate index, so the result depends only on the
/// model, the incumbent and the generator state.
inline Eigen::VectorXd maximize_acquisition(const EPState& model, const SearchSpace& space,
                                            const Incumbent& incumbent, int budget, Rng& rng) {
  if (budget < 1) throw InvalidArgument("acquisition budget must be at least 1");
  const Eigen::Index dims = model.dimension();
  if (dims != space.size()) throw InvalidArgument("model and search space differ in dimension");

  Eigen::VectorXd best(dims);
  double best_value = -1.0;
  Eigen::VectorXd candidate(dims);
  for (int c = 0; c < budget; ++c) {
    for (Eigen::Index d = 0; d < dims; ++d) candidate[d] = rng.uniform();
    const double value = expected_improvement(model, candidate, incumbent);
    if (value > best_value) {
      best_value = value;
      best = candidate;
    }
  }

  double step = 0.1;
  int used = 0;
  while (used < kRefinementEvaluations) {
    bool moved = false;
    for (Eigen::Index d = 0; d < dims && used < kRefinementEvaluations; ++d) {
      for (double direction : {1.0, -1.0}) {
        if (used >= kRefinementEvaluations) break;
        Eigen::VectorXd trial = best;
        trial[d] = std::clamp(trial[d] + direction * step, 0.0, 1.0);
        if (trial[d] == best[d]) continue;
        ++used;
        const double value = expected_improvement(model, trial, incumbent);
        if (value > best_value) {
          best_value = value;
          best = trial;
          moved = true;
          break;
        }
      }
    }
    if (!moved) {
      step *= 0.5;
      if (step < 1e-9) break;
    }
  }
  return best;
}

}  // namespace monotune
