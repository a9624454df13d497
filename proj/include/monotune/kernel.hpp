#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <sstream>
#include <vector>

#include "monotune/errors.hpp"

namespace monotune {

/// Squared-exponential kernel hyperparameters.
///
/// `lengthscale` is the squared-lengthscale theta of
/// k(x, x') = amplitude * exp(-|x - x'|^2 / (2 theta)), in normalized-input units.
struct KernelParams {
  double lengthscale = 0.2;
  double amplitude = 1.0;
  double noise = 1e-4;

  void validate() const {
    if (!(std::isfinite(lengthscale) && lengthscale > 0.0)) {
      throw InvalidArgument("kernel lengthscale must be positive and finite");
    }
    if (!(std::isfinite(amplitude) && amplitude > 0.0)) {
      throw InvalidArgument("kernel amplitude must be positive and finite");
    }
    if (!(std::isfinite(noise) && noise >= 0.0)) {
      throw InvalidArgument("kernel noise must be non-negative and finite");
    }
  }
};

/// A virtual observation asserting the sign of df/dx_dim at x (normalized coordinates).
struct SignObservation {
  Eigen::VectorXd x;
  int dim = 0;
  int sign = 1;
};

namespace detail {

inline void check_pair(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw InvalidArgument("kernel inputs differ in dimension");
  if (!a.allFinite() || !b.allFinite()) throw InvalidArgument("kernel inputs must be finite");
}

inline void check_dim(int d, Eigen::Index size) {
  if (d < 0 || d >= size) {
    std::ostringstream msg;
    msg << "dimension index " << d << " outside [0, " << size << ")";
    throw InvalidArgument(msg.str());
  }
}

inline double se_unchecked(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                           const KernelParams& params) {
  return params.amplitude * std::exp(-0.5 * (a - b).squaredNorm() / params.lengthscale);
}

}  // namespace detail

inline double se_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                        const KernelParams& params) {
  detail::check_pair(x, x_prime);
  params.validate();
  return detail::se_unchecked(x, x_prime, params);
}

/// Covariance between df/dx_d at `x_i` and f at `x_j`: d/dx_{i,d} k(x_i, x_j).
inline double se_kernel_dobs(const Eigen::VectorXd& x_i, const Eigen::VectorXd& x_j, int d,
                             const KernelParams& params) {
  detail::check_pair(x_i, x_j);
  detail::check_dim(d, x_i.size());
  params.validate();
  return -((x_i[d] - x_j[d]) / params.lengthscale) * detail::se_unchecked(x_i, x_j, params);
}

/// Covariance between df/dx_d at `x_i` and df/dx_g at `x_j`.
inline double se_kernel_dd(const Eigen::VectorXd& x_i, const Eigen::VectorXd& x_j, int d, int g,
                           const KernelParams& params) {
  detail::check_pair(x_i, x_j);
  detail::check_dim(d, x_i.size());
  detail::check_dim(g, x_i.size());
  params.validate();
  const double theta = params.lengthscale;
  const double delta = (d == g) ? 1.0 : 0.0;
  const double offset_d = x_i[d] - x_j[d];
  const double offset_g = x_i[g] - x_j[g];
  return (delta / theta - offset_d * offset_g / (theta * theta)) *
         detail::se_unchecked(x_i, x_j, params);
}

/// Joint prior covariance over p value latents followed by M derivative latents.
struct JointGram {
  Eigen::MatrixXd value_value;  // p x p
  Eigen::MatrixXd value_deriv;  // p x M
  Eigen::MatrixXd deriv_deriv;  // M x M
  /// (sign point index, dimension) for each derivative column.
  std::vector<std::pair<int, int>> deriv_index;
  double jitter = 0.0;

  Eigen::Index num_values() const { return value_value.rows(); }
  Eigen::Index num_derivs() const { return deriv_deriv.rows(); }

  /// Assembled (p+M) x (p+M) matrix, jitter included on the diagonal.
  Eigen::MatrixXd assembled() const {
    const Eigen::Index p = num_values();
    const Eigen::Index m = num_derivs();
    Eigen::MatrixXd full(p + m, p + m);
    full.topLeftCorner(p, p) = value_value;
    full.topRightCorner(p, m) = value_deriv;
    full.bottomLeftCorner(m, p) = value_deriv.transpose();
    full.bottomRightCorner(m, m) = deriv_deriv;
    full.diagonal().array() += jitter;
    return full;
  }
};

inline constexpr double kJitterStartRelative = 1e-9;
inline constexpr double kJitterCapRelative = 1e-3;

/// Fill the joint Gram matrix and confirm it is Cholesky-factorizable.
///
/// `jitter` is the first diagonal increment tried; a non-positive value means
/// 1e-9 times the mean diagonal. On failure the jitter grows tenfold up to
/// 1e-3 times the mean diagonal, then ConditioningError is thrown.
inline JointGram build_joint_gram(std::span<const Eigen::VectorXd> values,
                                  std::span<const SignObservation> signs,
                                  const KernelParams& params, double jitter = 0.0) {
  params.validate();
  if (values.empty()) throw InvalidArgument("joint Gram needs at least one value point");
  const Eigen::Index dims = values.front().size();
  for (const auto& x : values) {
    if (x.size() != dims || !x.allFinite()) {
      throw InvalidArgument("value points must be finite and share a dimension");
    }
  }
  for (const auto& s : signs) {
    if (s.x.size() != dims || !s.x.allFinite()) {
      throw InvalidArgument("sign points must be finite and match the value dimension");
    }
    detail::check_dim(s.dim, dims);
  }

  const auto p = static_cast<Eigen::Index>(values.size());
  const auto m = static_cast<Eigen::Index>(signs.size());
  JointGram gram;
  gram.value_value.resize(p, p);
  gram.value_deriv.resize(p, m);
  gram.deriv_deriv.resize(m, m);
  gram.deriv_index.reserve(signs.size());

  for (Eigen::Index i = 0; i < p; ++i) {
    gram.value_value(i, i) = params.amplitude;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double k = detail::se_unchecked(values[i], values[j], params);
      gram.value_value(i, j) = k;
      gram.value_value(j, i) = k;
    }
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& s = signs[j];
    gram.deriv_index.emplace_back(static_cast<int>(j), s.dim);
    for (Eigen::Index i = 0; i < p; ++i) {
      gram.value_deriv(i, j) = se_kernel_dobs(s.x, values[i], s.dim, params);
    }
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double k = se_kernel_dd(signs[i].x, s.x, signs[i].dim, s.dim, params);
      gram.deriv_deriv(i, j) = k;
      gram.deriv_deriv(j, i) = k;
    }
  }

  Eigen::MatrixXd full = gram.assembled();
  const double mean_diag = full.diagonal().mean();
  double attempt = jitter > 0.0 ? jitter : kJitterStartRelative * mean_diag;
  const double cap = std::max(kJitterCapRelative * mean_diag, attempt);
  for (;;) {
    Eigen::MatrixXd trial = full;
    trial.diagonal().array() += attempt;
    Eigen::LLT<Eigen::MatrixXd> llt(trial);
    if (llt.info() == Eigen::Success) {
      gram.jitter = attempt;
      return gram;
    }
    if (attempt >= cap) break;
    attempt = std::min(attempt * 10.0, cap);
  }
  std::ostringstream msg;
  msg << "joint Gram matrix not positive definite with jitter " << attempt;
  throw ConditioningError(msg.str(), attempt);
}

}  // namespace monotune
