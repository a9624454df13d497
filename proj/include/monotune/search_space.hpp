#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "monotune/errors.hpp"

namespace monotune {

enum class Scale { kLinear, kExponent10 };

/// Declared trend of the full-data objective along one hyperparameter.
enum class Monotonicity { kIncreasing, kDecreasing, kNeutral };

inline int sign_of(Monotonicity m) {
  switch (m) {
    case Monotonicity::kIncreasing: return 1;
    case Monotonicity::kDecreasing: return -1;
    case Monotonicity::kNeutral: return 0;
  }
  return 0;
}

inline std::string_view to_string(Scale s) { return s == Scale::kLinear ? "linear" : "exp10"; }

inline std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::kIncreasing: return "+1";
    case Monotonicity::kDecreasing: return "-1";
    case Monotonicity::kNeutral: return "neutral";
  }
  return "neutral";
}

/// One tunable hyperparameter.
///
/// For exp10 dimensions `lower`/`upper` and the declared coordinate are base-10
/// exponents; `value()` applies the power.
struct Dimension {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  Scale scale = Scale::kLinear;
  Monotonicity monotonicity = Monotonicity::kNeutral;

  double value(double declared) const {
    return scale == Scale::kExponent10 ? std::pow(10.0, declared) : declared;
  }
};

class SearchSpace {
 public:
  SearchSpace() = default;

  explicit SearchSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) { validate(); }

  void validate() const {
    if (dims_.empty()) throw InvalidArgument("search space needs at least one dimension");
    for (const auto& d : dims_) {
      if (!(std::isfinite(d.lower) && std::isfinite(d.upper)) || !(d.lower < d.upper)) {
        throw InvalidArgument("dimension '" + d.name + "' needs finite lower < upper");
      }
    }
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(dims_.size()); }
  const Dimension& operator[](Eigen::Index i) const { return dims_[static_cast<std::size_t>(i)]; }
  const std::vector<Dimension>& dimensions() const { return dims_; }

  /// Declared coordinates -> [0,1]^D. Strictly increasing per dimension.
  Eigen::VectorXd normalize(const Eigen::VectorXd& declared) const {
    check(declared);
    Eigen::VectorXd out(size());
    for (Eigen::Index i = 0; i < size(); ++i) {
      const auto& d = (*this)[i];
      out[i] = (declared[i] - d.lower) / (d.upper - d.lower);
    }
    return out;
  }

  /// [0,1]^D -> declared coordinates, clamped into [lower, upper].
  Eigen::VectorXd denormalize(const Eigen::VectorXd& unit) const {
    check(unit);
    Eigen::VectorXd out(size());
    for (Eigen::Index i = 0; i < size(); ++i) {
      const auto& d = (*this)[i];
      out[i] = std::clamp(d.lower + unit[i] * (d.upper - d.lower), d.lower, d.upper);
    }
    return out;
  }

  bool contains(const Eigen::VectorXd& declared) const {
    if (declared.size() != size()) return false;
    for (Eigen::Index i = 0; i < size(); ++i) {
      if (!(declared[i] >= (*this)[i].lower && declared[i] <= (*this)[i].upper)) return false;
    }
    return true;
  }

  bool all_neutral() const {
    for (const auto& d : dims_) {
      if (d.monotonicity != Monotonicity::kNeutral) return false;
    }
    return true;
  }

  bool same_layout(const SearchSpace& other) const {
    if (size() != other.size()) return false;
    for (Eigen::Index i = 0; i < size(); ++i) {
      const auto& a = (*this)[i];
      const auto& b = other[i];
      if (a.name != b.name || a.lower != b.lower || a.upper != b.upper || a.scale != b.scale) {
        return false;
      }
    }
    return true;
  }

 private:
  void check(const Eigen::VectorXd& x) const {
    if (x.size() != size()) throw InvalidArgument("point dimension does not match search space");
  }

  std::vector<Dimension> dims_;
};

}  // namespace monotune
