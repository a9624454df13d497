#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "monotune/errors.hpp"
#include "monotune/kernel.hpp"
#include "monotune/normal.hpp"

namespace monotune {

struct ValueObservation {
  Eigen::VectorXd x;
  double y = 0.0;
};

inline constexpr double kDefaultProbitSlack = 1e-6;

struct EPConfig {
  double damping = 0.8;
  int max_sweeps = 200;
  double tolerance = 1e-6;

  void validate() const {
    if (!(damping > 0.0 && damping <= 1.0)) throw InvalidArgument("EP damping must lie in (0, 1]");
    if (max_sweeps < 1) throw InvalidArgument("EP max_sweeps must be at least 1");
    if (!(tolerance > 0.0)) throw InvalidArgument("EP tolerance must be positive");
  }
};

/// Gaussian approximation to the posterior over value and derivative latents.
///
/// Latents are ordered values first, then one derivative latent per sign
/// observation. Immutable once returned by ep_fit.
struct EPState {
  KernelParams params;
  double slack = kDefaultProbitSlack;
  std::vector<Eigen::VectorXd> value_points;
  Eigen::VectorXd value_targets;
  std::vector<SignObservation> signs;
  JointGram gram;

  Eigen::VectorXd site_precision;  // tau~, one per sign site
  Eigen::VectorXd site_shift;      // nu~, natural mean parameter per sign site
  double value_precision = 0.0;

  Eigen::VectorXd posterior_mean;
  Eigen::MatrixXd posterior_cov;
  double log_evidence = 0.0;
  bool converged = false;
  int sweeps_used = 0;

  /// Site updates skipped because the cavity variance came out non-positive.
  int skipped_updates = 0;
  /// Diagonal increment actually used on the prior covariance (0 when none was needed).
  double prior_jitter = 0.0;

  // Cached factorization of B = I + S K S, S = sqrt(site precisions).
  Eigen::VectorXd sqrt_precision;
  Eigen::MatrixXd b_cholesky;  // lower triangular
  Eigen::VectorXd weights;     // predictive mean = k_*^T weights

  Eigen::Index dimension() const { return value_points.front().size(); }
  Eigen::Index num_values() const { return static_cast<Eigen::Index>(value_points.size()); }
  Eigen::Index num_sites() const { return static_cast<Eigen::Index>(signs.size()); }
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
  /// x_star lies outside the normalized box.
  bool extrapolated = false;
  /// A variance below -1e-9 was clamped to zero.
  bool variance_clamped = false;
};

struct LogEvidence {
  double value = 0.0;
  bool converged = false;
};

/// Smallest value-noise variance used inside EP; keeps S K S bounded for noiseless fits.
inline constexpr double kMinValueNoise = 1e-10;

namespace detail {

struct TiltedMoments {
  double log_normalizer;
  double mean;
  double variance;
};

// Moments of N(f | cavity_mean, cavity_var) * Phi(sign * f / slack).
inline TiltedMoments probit_tilted_moments(double cavity_mean, double cavity_var, int sign,
                                           double slack) {
  const double scale2 = slack * slack + cavity_var;
  const double scale = std::sqrt(scale2);
  const double z = sign * cavity_mean / scale;
  const double hazard = normal::hazard(z);
  const double shrink = std::max(1.0 - cavity_var / scale2 * hazard * (z + hazard), 1e-14);
  return {normal::log_cdf(z), cavity_mean + sign * cavity_var * hazard / scale,
          cavity_var * shrink};
}

inline Eigen::MatrixXd prior_covariance(const EPState& state, double jitter) {
  Eigen::MatrixXd k = state.gram.assembled();
  k.diagonal().array() += jitter - state.gram.jitter;
  return k;
}

inline Eigen::VectorXd full_precision(const EPState& state) {
  Eigen::VectorXd tau(state.num_values() + state.num_sites());
  tau.head(state.num_values()).setConstant(state.value_precision);
  tau.tail(state.num_sites()) = state.site_precision;
  return tau;
}

inline Eigen::VectorXd full_shift(const EPState& state) {
  Eigen::VectorXd nu(state.num_values() + state.num_sites());
  nu.head(state.num_values()) = state.value_precision * state.value_targets;
  nu.tail(state.num_sites()) = state.site_shift;
  return nu;
}

// Recompute posterior moments and the predictive cache from the current sites.
inline void refresh_posterior(EPState& state) {
  const Eigen::VectorXd tau = full_precision(state);
  const Eigen::VectorXd nu = full_shift(state);
  const Eigen::VectorXd s = tau.cwiseMax(0.0).cwiseSqrt();
  // The prior only needs to be PSD for B to be PD; jitter is a fallback.
  const Eigen::MatrixXd raw = prior_covariance(state, 0.0);
  const double cap = kJitterCapRelative * raw.diagonal().mean();
  std::vector<double> ladder{state.prior_jitter};
  for (double j = std::max(10.0 * state.prior_jitter, state.gram.jitter); j <= cap * (1.0 + 1e-12);
       j *= 10.0) {
    ladder.push_back(j);
  }
  for (double jitter : ladder) {
    Eigen::MatrixXd k = raw;
    k.diagonal().array() += jitter;
    Eigen::MatrixXd b = (s * s.transpose()).cwiseProduct(k);
    b.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() != Eigen::Success) continue;

    state.prior_jitter = jitter;
    state.sqrt_precision = s;
    state.b_cholesky = llt.matrixL();
    const Eigen::MatrixXd sk = s.asDiagonal() * k;
    const Eigen::MatrixXd v = llt.matrixL().solve(sk);
    state.posterior_cov = k - v.transpose() * v;
    state.posterior_cov = 0.5 * (state.posterior_cov + state.posterior_cov.transpose());
    const Eigen::VectorXd correction = s.asDiagonal() * llt.solve(sk * nu);
    state.weights = nu - correction;
    state.posterior_mean = k * state.weights;
    return;
  }
  throw ConditioningError("EP posterior precision matrix not positive definite",
                          ladder.back());
}

inline double compute_log_evidence(const EPState& state) {
  const Eigen::Index p = state.num_values();
  const Eigen::VectorXd nu = full_shift(state);
  double log_z = -state.b_cholesky.diagonal().array().log().sum();
  log_z += 0.5 * nu.dot(state.posterior_mean);

  const double tau_v = state.value_precision;
  for (Eigen::Index i = 0; i < p; ++i) {
    const double y = state.value_targets[i];
    log_z += -0.5 * y * y * tau_v - 0.5 * std::log(2.0 * std::numbers::pi / tau_v);
  }
  for (Eigen::Index i = 0; i < state.num_sites(); ++i) {
    const Eigen::Index j = p + i;
    const double tau = state.site_precision[i];
    const double shift = state.site_shift[i];
    const double post_var = state.posterior_cov(j, j);
    const double cavity_prec = 1.0 / post_var - tau;
    if (!(cavity_prec > 0.0)) continue;
    const double cavity_var = 1.0 / cavity_prec;
    const double cavity_mean = cavity_var * (state.posterior_mean[j] / post_var - shift);
    const double scale = std::sqrt(state.slack * state.slack + cavity_var);
    const double z = state.signs[i].sign * cavity_mean / scale;
    const double denom = 1.0 + tau * cavity_var;
    log_z += normal::log_cdf(z) + 0.5 * std::log(denom) +
             (tau * cavity_mean * cavity_mean - 2.0 * cavity_mean * shift -
              cavity_var * shift * shift) /
                 (2.0 * denom);
  }
  return log_z;
}

inline Prediction predict_latent(const EPState& state, const Eigen::VectorXd& cross_cov,
                                 double prior_var) {
  Prediction out;
  out.mean = cross_cov.dot(state.weights);
  const Eigen::VectorXd scaled = state.sqrt_precision.cwiseProduct(cross_cov);
  const Eigen::VectorXd w =
      state.b_cholesky.triangularView<Eigen::Lower>().solve(scaled);
  double var = prior_var - w.squaredNorm();
  if (var < 0.0) {
    out.variance_clamped = var < -1e-9;
    var = 0.0;
  }
  out.variance = var;
  return out;
}

inline void check_point(const EPState& state, const Eigen::VectorXd& x) {
  if (x.size() != state.dimension()) throw InvalidArgument("prediction point has wrong dimension");
  if (!x.allFinite()) throw InvalidArgument("prediction point must be finite");
}

// Marginal of df/dx_dim at x.
inline Prediction predict_derivative(const EPState& state, const Eigen::VectorXd& x, int dim) {
  check_point(state, x);
  detail::check_dim(dim, state.dimension());
  const KernelParams& kp = state.params;
  Eigen::VectorXd cross(state.num_values() + state.num_sites());
  for (Eigen::Index i = 0; i < state.num_values(); ++i) {
    cross[i] = se_kernel_dobs(x, state.value_points[i], dim, kp);
  }
  for (Eigen::Index i = 0; i < state.num_sites(); ++i) {
    const auto& s = state.signs[i];
    cross[state.num_values() + i] = se_kernel_dd(x, s.x, dim, s.dim, kp);
  }
  return predict_latent(state, cross, kp.amplitude / kp.lengthscale);
}

}  // namespace detail

/// Fit the EP approximation for Gaussian value sites and probit sign sites.
///
/// Value sites enter exactly with precision 1/noise. Sign sites are updated
/// sequentially with damping until every site parameter moves less than
/// `config.tolerance` in a sweep.
inline EPState ep_fit(std::span<const ValueObservation> values,
                      std::span<const SignObservation> signs, const KernelParams& params,
                      double slack = kDefaultProbitSlack, const EPConfig& config = {}) {
  params.validate();
  config.validate();
  if (values.empty()) throw InvalidArgument("ep_fit needs at least one value observation");
  if (!(slack > 0.0 && std::isfinite(slack))) throw InvalidArgument("probit slack must be positive");
  for (const auto& v : values) {
    if (!std::isfinite(v.y)) throw InvalidArgument("value observations must be finite");
  }
  for (const auto& s : signs) {
    if (s.sign != 1 && s.sign != -1) throw InvalidArgument("sign observation must be +1 or -1");
  }

  EPState state;
  state.params = params;
  state.slack = slack;
  state.value_points.reserve(values.size());
  state.value_targets.resize(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    state.value_points.push_back(values[i].x);
    state.value_targets[static_cast<Eigen::Index>(i)] = values[i].y;
  }
  state.signs.assign(signs.begin(), signs.end());
  state.gram = build_joint_gram(state.value_points, state.signs, params);
  state.value_precision = 1.0 / std::max(params.noise, kMinValueNoise);
  state.site_precision = Eigen::VectorXd::Zero(state.num_sites());
  state.site_shift = Eigen::VectorXd::Zero(state.num_sites());

  detail::refresh_posterior(state);
  if (state.num_sites() == 0) {
    state.converged = true;
    state.log_evidence = detail::compute_log_evidence(state);
    return state;
  }

  const Eigen::Index p = state.num_values();
  const double damping = config.damping;
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    double max_change = 0.0;
    Eigen::VectorXd nu = detail::full_shift(state);
    for (Eigen::Index i = 0; i < state.num_sites(); ++i) {
      const Eigen::Index j = p + i;
      const double post_var = state.posterior_cov(j, j);
      const double post_mean = state.posterior_mean[j];
      const double tau_old = state.site_precision[i];
      const double nu_old = state.site_shift[i];
      const double cavity_prec = 1.0 / post_var - tau_old;
      if (!(cavity_prec > 0.0) || !std::isfinite(cavity_prec)) {
        ++state.skipped_updates;
        continue;
      }
      const double cavity_var = 1.0 / cavity_prec;
      const double cavity_mean = cavity_var * (post_mean / post_var - nu_old);
      const auto tilted =
          detail::probit_tilted_moments(cavity_mean, cavity_var, state.signs[i].sign, slack);

      const double tau_target = std::max(1.0 / tilted.variance - cavity_prec, 0.0);
      const double nu_target = tilted.mean / tilted.variance - cavity_mean * cavity_prec;
      const double tau_new = (1.0 - damping) * tau_old + damping * tau_target;
      const double nu_new = (1.0 - damping) * nu_old + damping * nu_target;
      max_change = std::max({max_change, std::abs(tau_new - tau_old), std::abs(nu_new - nu_old)});

      // Rank-one update of the posterior covariance.
      const double delta_tau = tau_new - tau_old;
      const Eigen::VectorXd col = state.posterior_cov.col(j);
      state.posterior_cov -= (delta_tau / (1.0 + delta_tau * col[j])) * col * col.transpose();
      state.site_precision[i] = tau_new;
      state.site_shift[i] = nu_new;
      nu[j] = nu_new;
      state.posterior_mean = state.posterior_cov * nu;
    }
    detail::refresh_posterior(state);
    state.sweeps_used = sweep;
    if (max_change < config.tolerance) {
      state.converged = true;
      break;
    }
  }
  state.log_evidence = detail::compute_log_evidence(state);
  return state;
}

/// Predictive distribution of the latent objective at a normalized point.
inline Prediction ep_predict(const EPState& state, const Eigen::VectorXd& x_star) {
  detail::check_point(state, x_star);
  const KernelParams& kp = state.params;
  Eigen::VectorXd cross(state.num_values() + state.num_sites());
  for (Eigen::Index i = 0; i < state.num_values(); ++i) {
    cross[i] = detail::se_unchecked(x_star, state.value_points[i], kp);
  }
  for (Eigen::Index i = 0; i < state.num_sites(); ++i) {
    const auto& s = state.signs[i];
    cross[state.num_values() + i] = se_kernel_dobs(s.x, x_star, s.dim, kp);
  }
  Prediction out = detail::predict_latent(state, cross, kp.amplitude);
  out.extrapolated = (x_star.array() < 0.0).any() || (x_star.array() > 1.0).any();
  return out;
}

namespace detail {

// Owen-type integral  int_0^a exp(-h^2 x^2 / 2) / (1 + x^2) dx  by composite Simpson.
inline double owen_kernel_integral(double h, double a) {
  const double upper = std::abs(h) > 0.0 ? std::min(a, 10.0 / std::abs(h)) : a;
  if (!(upper > 0.0)) return 0.0;
  constexpr int kIntervals = 200;
  const double step = upper / kIntervals;
  double sum = 0.0;
  for (int k = 0; k <= kIntervals; ++k) {
    const double x = k * step;
    const double f = std::exp(-0.5 * h * h * x * x) / (1.0 + x * x);
    const double w = (k == 0 || k == kIntervals) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    sum += w * f;
  }
  return sum * step / 3.0;
}

// P(another observation at a fitted site has the site's own sign), under the
// tilted marginal cavity(f) * Phi(sign f / slack). Uses
//   Phi2(z, z; rho) = Phi(z) - 2 T(z, sqrt((1 - rho) / (1 + rho))).
inline double tilted_same_sign_probability(double cavity_mean, double cavity_var, int sign,
                                           double slack) {
  const double scale2 = slack * slack + cavity_var;
  const double z = sign * cavity_mean / std::sqrt(scale2);
  const double rho = cavity_var / scale2;
  const double a = std::sqrt((1.0 - rho) / (1.0 + rho));
  const double tail = 2.0 * normal::hazard(z) * owen_kernel_integral(z, a) /
                      std::sqrt(2.0 * std::numbers::pi);
  return std::clamp(1.0 - tail, 0.0, 1.0);
}

}  // namespace detail

/// Posterior probability that the derivative at (site.x, site.dim) has sign site.sign.
///
/// Away from fitted sites this is Phi(sign * mu / sqrt(slack^2 + var)) over the
/// Gaussian marginal of the derivative latent. At a fitted site (same point and
/// dimension) the marginal is taken from that site's tilted distribution, which
/// keeps the probit factor exact instead of its Gaussian projection.
inline double sign_probability(const EPState& state, const SignObservation& site) {
  if (site.sign != 1 && site.sign != -1) throw InvalidArgument("sign must be +1 or -1");
  detail::check_point(state, site.x);
  detail::check_dim(site.dim, state.dimension());
  for (Eigen::Index i = 0; i < state.num_sites(); ++i) {
    const auto& fitted = state.signs[i];
    if (fitted.dim != site.dim || fitted.x != site.x) continue;
    const Eigen::Index j = state.num_values() + i;
    const double post_var = state.posterior_cov(j, j);
    const double cavity_prec = 1.0 / post_var - state.site_precision[i];
    if (!(cavity_prec > 0.0)) break;
    const double cavity_var = 1.0 / cavity_prec;
    const double cavity_mean =
        cavity_var * (state.posterior_mean[j] / post_var - state.site_shift[i]);
    const double same =
        detail::tilted_same_sign_probability(cavity_mean, cavity_var, fitted.sign, state.slack);
    return site.sign == fitted.sign ? same : 1.0 - same;
  }
  const Prediction d = detail::predict_derivative(state, site.x, site.dim);
  return normal::cdf(site.sign * d.mean / std::sqrt(state.slack * state.slack + d.variance));
}

inline LogEvidence ep_log_evidence(const EPState& state) {
  return {state.log_evidence, state.converged};
}

}  // namespace monotune
