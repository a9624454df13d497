#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <vector>

#include "monotune/dataset.hpp"
#include "monotune/errors.hpp"
#include "monotune/objectives.hpp"
#include "monotune/random.hpp"
#include "monotune/search_space.hpp"

namespace monotune {

struct ElasticNetOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;
  /// Record the objective after every iteration (tests only; costs one pass per iteration).
  bool record_loss = false;
};

struct ElasticNetModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  int iterations = 0;
  std::vector<double> loss_trace;

  Eigen::VectorXd decision(const Eigen::MatrixXd& x) const {
    return (x * weights).array() + intercept;
  }
};

/// Column means and scales from one split, applied to others.
struct FeatureScaler {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;

  static FeatureScaler fit(const Eigen::MatrixXd& x) {
    FeatureScaler s;
    s.mean = x.colwise().mean();
    s.scale = ((x.rowwise() - s.mean).array().square().colwise().mean()).sqrt().matrix();
    for (Eigen::Index j = 0; j < s.scale.size(); ++j) {
      if (!(s.scale[j] > 1e-12)) s.scale[j] = 1.0;
    }
    return s;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
    return (x.rowwise() - mean).array().rowwise() / scale.array();
  }
};

namespace detail {

inline double log1p_exp(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Largest eigenvalue of [X 1]^T [X 1] by power iteration.
inline double gram_spectral_norm(const Eigen::MatrixXd& x) {
  const Eigen::Index f = x.cols();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(f + 1) / std::sqrt(static_cast<double>(f + 1));
  double lambda = 0.0;
  for (int it = 0; it < 100; ++it) {
    const Eigen::VectorXd xv = (x * v.head(f)).array() + v[f];
    Eigen::VectorXd next(f + 1);
    next.head(f) = x.transpose() * xv;
    next[f] = xv.sum();
    const double norm = next.norm();
    if (!(norm > 0.0)) return 1.0;
    const double prev = lambda;
    lambda = norm;
    v = next / norm;
    if (std::abs(lambda - prev) <= 1e-10 * lambda) break;
  }
  return lambda;
}

}  // namespace detail

/// Mean logistic loss plus lambda * (ratio * |w|_1 + (1 - ratio) / 2 * |w|_2^2).
inline double elastic_net_loss(const Eigen::MatrixXd& x, const std::vector<int>& y,
                               const Eigen::VectorXd& w, double intercept, double lambda,
                               double ratio) {
  const Eigen::VectorXd z = (x * w).array() + intercept;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    loss += detail::log1p_exp(z[i]) - y[static_cast<std::size_t>(i)] * z[i];
  }
  loss /= static_cast<double>(z.size());
  return loss + lambda * (ratio * w.lpNorm<1>() + 0.5 * (1.0 - ratio) * w.squaredNorm());
}

/// Proximal gradient descent from zero on the elastic-net logistic objective.
/// The intercept is unpenalized; lambda = 10^alpha_exponent.
inline ElasticNetModel train_elastic_net(const Eigen::MatrixXd& x, const std::vector<int>& y,
                                         double ratio, double alpha_exponent,
                                         const ElasticNetOptions& options = {}) {
  if (x.rows() != static_cast<Eigen::Index>(y.size()) || x.rows() == 0) {
    throw InvalidArgument("elastic net: feature rows and labels differ in count");
  }
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw InvalidArgument("elastic net ratio must lie in [0, 1]");
  if (!std::isfinite(alpha_exponent)) throw InvalidArgument("elastic net exponent must be finite");
  bool zero = false, one = false;
  for (int label : y) (label == 0 ? zero : one) = true;
  if (!(zero && one)) throw InvalidArgument("elastic net training data has a single class");

  const double n = static_cast<double>(x.rows());
  const double lambda = std::pow(10.0, alpha_exponent);
  const double l1 = lambda * ratio;
  const double l2 = lambda * (1.0 - ratio);
  const double lipschitz = 0.25 * detail::gram_spectral_norm(x) / n * 1.01 + l2;
  const double step = 1.0 / lipschitz;

  Eigen::VectorXd yv(x.rows());
  for (Eigen::Index i = 0; i < yv.size(); ++i) yv[i] = y[static_cast<std::size_t>(i)];

  ElasticNetModel model;
  model.weights = Eigen::VectorXd::Zero(x.cols());
  if (options.record_loss) {
    model.loss_trace.push_back(elastic_net_loss(x, y, model.weights, 0.0, lambda, ratio));
  }
  Eigen::VectorXd residual(x.rows());
  for (int it = 0; it < options.max_iterations; ++it) {
    const Eigen::VectorXd z = (x * model.weights).array() + model.intercept;
    for (Eigen::Index i = 0; i < z.size(); ++i) residual[i] = detail::sigmoid(z[i]) - yv[i];
    const Eigen::VectorXd grad_w = x.transpose() * residual / n + l2 * model.weights;
    const double grad_b = residual.sum() / n;

    Eigen::VectorXd next = model.weights - step * grad_w;
    for (Eigen::Index j = 0; j < next.size(); ++j) next[j] = detail::soft_threshold(next[j], step * l1);
    const double next_b = model.intercept - step * grad_b;

    // Norm of the proximal gradient mapping.
    const double mapping = std::sqrt((next - model.weights).squaredNorm() +
                                     (next_b - model.intercept) * (next_b - model.intercept)) /
                           step;
    model.weights = std::move(next);
    model.intercept = next_b;
    model.iterations = it + 1;
    if (options.record_loss) {
      model.loss_trace.push_back(
          elastic_net_loss(x, y, model.weights, model.intercept, lambda, ratio));
    }
    if (mapping < options.gradient_tolerance) break;
  }
  return model;
}

inline double accuracy(const ElasticNetModel& model, const Eigen::MatrixXd& x,
                       const std::vector<int>& y) {
  const Eigen::VectorXd d = model.decision(x);
  std::size_t correct = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    correct += ((d[i] > 0.0 ? 1 : 0) == y[static_cast<std::size_t>(i)]) ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(d.size());
}

/// Train on `train` (standardized with its own statistics) and score accuracy on `eval`.
inline double fit_and_score(const Dataset& train, const Dataset& eval, double ratio,
                            double alpha_exponent, const ElasticNetOptions& options = {}) {
  const FeatureScaler scaler = FeatureScaler::fit(train.features);
  const ElasticNetModel model =
      train_elastic_net(scaler.apply(train.features), train.labels, ratio, alpha_exponent, options);
  return accuracy(model, scaler.apply(eval.features), eval.labels);
}

inline constexpr std::size_t kSubsetRowCap = 2000;

/// Elastic-net tuning search space: ratio in [0,1] (neutral) and the penalty
/// exponent in [-7,-1] with a decreasing trend.
inline SearchSpace elastic_net_space() {
  return SearchSpace({{"ratio", 0.0, 1.0, Scale::kLinear, Monotonicity::kNeutral},
                      {"alpha", -7.0, -1.0, Scale::kExponent10, Monotonicity::kDecreasing}});
}

/// Maximize validation accuracy of elastic-net logistic regression.
///
/// Subset objectives train on a seeded draw from the training split and are
/// scored on the full validation split. Heldout error retrains on the full
/// training split.
inline TuningTask elastic_net_task(const Dataset& data, const SearchSpace& space,
                                   std::uint64_t split_seed) {
  if (data.rows() < 10) throw SchemaError("elastic-net task needs at least 10 rows");
  if (space.size() != 2 || space[0].name != "ratio" || space[1].name != "alpha") {
    throw InvalidArgument("elastic-net space must declare dimensions 'ratio' and 'alpha'");
  }
  auto split = std::make_shared<const DatasetSplit>(split_dataset(data, 0.6, 0.2, split_seed));

  TuningTask task;
  task.space = space;
  task.full_objective = [split](const Eigen::VectorXd& x) {
    return fit_and_score(split->train, split->valid, x[0], x[1]);
  };
  task.subset_objective_factory = [split](int b, double fraction,
                                          std::uint64_t seed) -> Objective {
    const double rows = static_cast<double>(split->train.rows());
    const double capped = std::min(fraction, static_cast<double>(kSubsetRowCap) / rows);
    auto subset = std::make_shared<const Dataset>(
        subsample(split->train, capped, derive_seed(seed, static_cast<std::uint64_t>(b))));
    return [split, subset](const Eigen::VectorXd& x) {
      return fit_and_score(*subset, split->valid, x[0], x[1]);
    };
  };
  task.heldout_error = [split](const Eigen::VectorXd& x) {
    return 1.0 - fit_and_score(split->train, split->heldout, x[0], x[1]);
  };
  task.max_subset_fraction =
      std::min(1.0, static_cast<double>(kSubsetRowCap) / static_cast<double>(split->train.rows()));
  task.description = "elastic-net logistic regression, validation accuracy";
  return task;
}

}  // namespace monotune
