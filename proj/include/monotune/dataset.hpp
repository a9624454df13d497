#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "monotune/errors.hpp"
#include "monotune/random.hpp"

namespace monotune {

/// Binary-labelled tabular data.
struct Dataset {
  Eigen::MatrixXd features;  // n x F
  std::vector<int> labels;   // 0 / 1
  std::vector<std::string> feature_names;

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index cols() const { return features.cols(); }

  bool has_both_classes() const {
    bool zero = false, one = false;
    for (int y : labels) (y == 0 ? zero : one) = true;
    return zero && one;
  }

  Dataset select(const std::vector<Eigen::Index>& rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.features.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
      out.labels.push_back(labels[static_cast<std::size_t>(rows[i])]);
    }
    return out;
  }
};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Read a comma-separated file with a header row; the last column is the 0/1 label.
inline Dataset load_csv_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw SchemaError("dataset '" + path.string() + "' is empty");
  const auto header = detail::split_commas(line);
  if (header.size() < 2) throw SchemaError("dataset needs at least one feature and a label column");

  Dataset ds;
  for (std::size_t c = 0; c + 1 < header.size(); ++c) {
    ds.feature_names.emplace_back(detail::trim(header[c]));
  }
  const std::size_t width = header.size();
  std::vector<double> cells;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto parts = detail::split_commas(line);
    if (parts.size() != width) {
      std::ostringstream msg;
      msg << "row " << row << " has " << parts.size() << " cells, expected " << width;
      throw SchemaError(msg.str());
    }
    for (std::size_t c = 0; c < width; ++c) {
      const std::string_view cell = detail::trim(parts[c]);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "cannot parse '" << cell << "' at row " << row << ", column " << (c + 1)
            << " as a finite number";
        throw ParseError(msg.str(), row, c + 1);
      }
      if (c + 1 == width) {
        if (value != 0.0 && value != 1.0) {
          std::ostringstream msg;
          msg << "label at row " << row << " is " << cell << "; labels must be 0 or 1";
          throw SchemaError(msg.str());
        }
        ds.labels.push_back(static_cast<int>(value));
      } else {
        cells.push_back(value);
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(ds.labels.size());
  const auto f = static_cast<Eigen::Index>(width - 1);
  ds.features = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      cells.data(), n, f);
  return ds;
}

inline void write_csv_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset '" + path.string() + "'");
  for (const auto& name : ds.feature_names) out << name << ',';
  out << "label\n";
  char buf[32];
  for (Eigen::Index i = 0; i < ds.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.6f", ds.features(i, j));
      out << buf << ',';
    }
    out << ds.labels[static_cast<std::size_t>(i)] << '\n';
  }
}

struct SplitIndices {
  std::vector<Eigen::Index> train, valid, heldout;
};

struct DatasetSplit {
  Dataset train, valid, heldout;
  SplitIndices indices;
};

inline std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, std::uint64_t seed) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(seed);
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.below(i)]);
  }
  return idx;
}

/// Seeded shuffle then contiguous train / validation / heldout partition.
inline SplitIndices split_indices(Eigen::Index n, double train_frac, double valid_frac,
                                  std::uint64_t seed) {
  if (!(train_frac > 0.0 && valid_frac > 0.0 && train_frac + valid_frac < 1.0)) {
    throw InvalidArgument("split fractions must be positive and sum to less than 1");
  }
  const auto idx = shuffled_indices(n, seed);
  const auto n_train = static_cast<std::size_t>(std::lround(train_frac * static_cast<double>(n)));
  const auto n_valid = static_cast<std::size_t>(std::lround(valid_frac * static_cast<double>(n)));
  SplitIndices out;
  out.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(std::min(n_train, idx.size())));
  const std::size_t v_end = std::min(n_train + n_valid, idx.size());
  out.valid.assign(idx.begin() + static_cast<std::ptrdiff_t>(out.train.size()),
                   idx.begin() + static_cast<std::ptrdiff_t>(v_end));
  out.heldout.assign(idx.begin() + static_cast<std::ptrdiff_t>(v_end), idx.end());
  return out;
}

inline DatasetSplit split_dataset(const Dataset& ds, double train_frac = 0.6,
                                  double valid_frac = 0.2, std::uint64_t seed = 0) {
  DatasetSplit out;
  out.indices = split_indices(ds.rows(), train_frac, valid_frac, seed);
  out.train = ds.select(out.indices.train);
  out.valid = ds.select(out.indices.valid);
  out.heldout = ds.select(out.indices.heldout);
  for (const auto* part : {&out.train, &out.valid, &out.heldout}) {
    if (part->rows() < 2 || !part->has_both_classes()) {
      throw SplitError("a split has fewer than 2 rows or a single class; try another seed or "
                       "different fractions");
    }
  }
  return out;
}

/// Draw ceil(fraction * n) rows without replacement; redraws up to 10 times
/// if the draw misses a class.
inline Dataset subsample(const Dataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("subsample fraction must lie in (0, 1]");
  const auto take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(ds.rows()) - 1e-9));
  for (std::uint64_t attempt = 0; attempt <= 10; ++attempt) {
    auto idx = shuffled_indices(ds.rows(), attempt == 0 ? seed : derive_seed(seed, attempt));
    idx.resize(take);
    Dataset out = ds.select(idx);
    if (out.has_both_classes()) return out;
  }
  throw SplitError("subsample drew a single class in 11 attempts; increase the fraction");
}

/// Two-class data: `informative` Gaussian features drive a logistic label model,
/// the remaining features are pure noise.
inline constexpr double kSignalNorm = 3.0;
inline constexpr double kSignalDecay = 0.6;
inline Dataset generate_classification(Eigen::Index n, Eigen::Index num_features,
                                       Eigen::Index informative, std::uint64_t seed) {
  if (informative < 1 || informative > num_features) {
    throw InvalidArgument("informative feature count must lie in [1, num_features]");
  }
  Rng rng(seed);
  // Informative features of geometrically decreasing strength.
  Eigen::VectorXd w(informative);
  for (Eigen::Index j = 0; j < informative; ++j) {
    w[j] = (rng.uniform() < 0.5 ? -1.0 : 1.0) * kSignalNorm * std::pow(kSignalDecay, static_cast<double>(j));
  }

  Dataset ds;
  ds.features.resize(n, num_features);
  ds.labels.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < num_features; ++j) ds.feature_names.push_back("f" + std::to_string(j));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < num_features; ++j) ds.features(i, j) = rng.normal();
    const double logit = ds.features.row(i).head(informative).dot(w);
    const double prob = 1.0 / (1.0 + std::exp(-logit));
    ds.labels[static_cast<std::size_t>(i)] = rng.uniform() < prob ? 1 : 0;
  }
  return ds;
}

}  // namespace monotune
