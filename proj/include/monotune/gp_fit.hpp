#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "monotune/ep.hpp"
#include "monotune/errors.hpp"
#include "monotune/kernel.hpp"

namespace monotune {

/// Affine map taking raw targets to zero mean, unit variance.
struct Standardizer {
  double mean = 0.0;
  double scale = 1.0;
  bool degenerate = false;

  double forward(double y) const { return (y - mean) / scale; }
  double inverse(double z) const { return mean + scale * z; }

  static Standardizer fit(std::span<const ValueObservation> values) {
    Standardizer s;
    if (values.empty()) return s;
    double sum = 0.0;
    for (const auto& v : values) sum += v.y;
    s.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (const auto& v : values) ss += (v.y - s.mean) * (v.y - s.mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size()));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(s.mean)))) {
      s.degenerate = true;
      s.scale = 1.0;
    } else {
      s.scale = sd;
    }
    return s;
  }
};

inline std::vector<ValueObservation> standardize(std::span<const ValueObservation> values,
                                                 const Standardizer& s) {
  std::vector<ValueObservation> out(values.begin(), values.end());
  for (auto& v : out) v.y = s.forward(v.y);
  return out;
}

/// Exact GP log marginal likelihood log N(y | 0, K + noise I).
inline double gp_log_marginal_likelihood(std::span<const ValueObservation> values,
                                         const KernelParams& params) {
  const auto n = static_cast<Eigen::Index>(values.size());
  Eigen::MatrixXd k(n, n);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = values[i].y;
    k(i, i) = params.amplitude + params.noise;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = detail::se_unchecked(values[i].x, values[j].x, params);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd alpha = llt.solve(y);
  const double log_det = 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  return -0.5 * y.dot(alpha) - 0.5 * log_det -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

struct HyperparameterBounds {
  std::array<double, 3> lower{std::log(0.01), std::log(0.1), std::log(1e-6)};
  std::array<double, 3> upper{std::log(10.0), std::log(10.0), std::log(1.0)};
};

inline constexpr KernelParams kFallbackKernel{0.2, 1.0, 1e-4};

namespace detail {

inline double radical_inverse(unsigned index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * (index % base);
    index /= base;
    f /= base;
  }
  return result;
}

inline KernelParams from_log(const std::array<double, 3>& u) {
  return {std::exp(u[0]), std::exp(u[1]), std::exp(u[2])};
}

}  // namespace detail

inline constexpr int kHyperparameterStarts = 8;

/// Maximum-likelihood kernel hyperparameters from value observations only.
///
/// Targets are standardized first; the returned amplitude and noise are in
/// standardized units. Multi-start coordinate search in log space with a
/// fixed start design, so identical inputs give identical parameters.
inline KernelParams fit_gp_hyperparams(std::span<const ValueObservation> values,
                                       const HyperparameterBounds& bounds = {}) {
  if (values.size() < 2) throw InvalidArgument("fit_gp_hyperparams needs at least 2 observations");
  const Standardizer standardizer = Standardizer::fit(values);
  if (standardizer.degenerate) return kFallbackKernel;
  const std::vector<ValueObservation> data = standardize(values, standardizer);

  auto objective = [&](const std::array<double, 3>& u) {
    const double v = gp_log_marginal_likelihood(data, detail::from_log(u));
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  };

  std::array<double, 3> best_u{};
  double best = -std::numeric_limits<double>::infinity();
  constexpr std::array<unsigned, 3> kBases{2, 3, 5};
  for (int start = 0; start < kHyperparameterStarts; ++start) {
    std::array<double, 3> u{};
    if (start == 0) {
      u = {std::log(0.2), 0.0, std::log(1e-2)};
    } else {
      for (int c = 0; c < 3; ++c) {
        u[c] = bounds.lower[c] + detail::radical_inverse(static_cast<unsigned>(start), kBases[c]) *
                                     (bounds.upper[c] - bounds.lower[c]);
      }
    }
    double value = objective(u);
    double step = 1.0;
    while (step > 1e-3) {
      bool improved = false;
      for (int c = 0; c < 3; ++c) {
        for (double dir : {1.0, -1.0}) {
          std::array<double, 3> trial = u;
          trial[c] = std::clamp(trial[c] + dir * step, bounds.lower[c], bounds.upper[c]);
          if (trial[c] == u[c]) continue;
          const double v = objective(trial);
          if (v > value) {
            value = v;
            u = trial;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (value > best) {
      best = value;
      best_u = u;
    }
  }
  if (!std::isfinite(best)) return kFallbackKernel;
  return detail::from_log(best_u);
}

}  // namespace monotune
