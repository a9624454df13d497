#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "monotune/dataset.hpp"
#include "monotune/elastic_net.hpp"
#include "monotune/engine.hpp"
#include "monotune/errors.hpp"
#include "monotune/objectives.hpp"
#include "monotune/search_space.hpp"

#ifndef MONOTUNE_DATA_DIR
#define MONOTUNE_DATA_DIR "data"
#endif

namespace monotune {

enum class TaskKind { kSynthetic, kElasticNet };
enum class Method { kHyperTune, kEI };

inline std::string_view to_string(TaskKind t) {
  return t == TaskKind::kSynthetic ? "synthetic" : "elastic_net";
}
inline std::string_view to_string(Method m) { return m == Method::kHyperTune ? "hypertune" : "ei"; }

struct ExperimentConfig {
  TaskKind task = TaskKind::kSynthetic;
  std::optional<std::filesystem::path> dataset_path;
  SearchSpace space;
  Method method = Method::kHyperTune;
  HyperTuneConfig tuning;
  SyntheticComplexityParams synthetic;
  std::uint64_t split_seed = 0;
  std::filesystem::path output_dir;
};

inline constexpr const char* kOutputDirEnv = "MONOTUNE_OUTPUT_DIR";

namespace detail {

using Json = nlohmann::json;

inline const Json& require(const Json& obj, const std::string& key, const std::string& field) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(field, "is required");
  return *it;
}

inline double get_number(const Json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
  return x;
}

inline long long get_integer(const Json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ConfigError(field, "must be an integer");
  return v.get<long long>();
}

inline std::string get_string(const Json& v, const std::string& field) {
  if (!v.is_string()) throw ConfigError(field, "must be a string");
  return v.get<std::string>();
}

inline int get_count(const Json& obj, const std::string& key, int fallback, int minimum) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  const long long v = get_integer(*it, key);
  if (v < minimum || v > 1'000'000) {
    throw ConfigError(key, "must be an integer in [" + std::to_string(minimum) + ", 1000000]");
  }
  return static_cast<int>(v);
}

inline Monotonicity parse_monotonicity(const Json& v, const std::string& field) {
  if (v.is_number_integer()) {
    const auto m = v.get<long long>();
    if (m == 1) return Monotonicity::kIncreasing;
    if (m == -1) return Monotonicity::kDecreasing;
  } else if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "+1" || s == "1") return Monotonicity::kIncreasing;
    if (s == "-1") return Monotonicity::kDecreasing;
    if (s == "neutral") return Monotonicity::kNeutral;
  }
  throw ConfigError(field, "must be +1, -1 or \"neutral\"");
}

inline Scale parse_scale(const Json& v, const std::string& field) {
  const std::string s = get_string(v, field);
  if (s == "linear") return Scale::kLinear;
  if (s == "exp10") return Scale::kExponent10;
  throw ConfigError(field, "must be \"linear\" or \"exp10\"");
}

inline SearchSpace parse_space(const Json& v) {
  if (!v.is_array() || v.empty()) throw ConfigError("space", "must be a non-empty array of dimensions");
  std::vector<Dimension> dims;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string base = "space[" + std::to_string(i) + "]";
    const Json& d = v[i];
    if (!d.is_object()) throw ConfigError(base, "must be an object");
    Dimension dim;
    dim.name = get_string(require(d, "name", base + ".name"), base + ".name");
    if (dim.name.empty()) throw ConfigError(base + ".name", "must not be empty");
    dim.lower = get_number(require(d, "lower", base + ".lower"), base + ".lower");
    dim.upper = get_number(require(d, "upper", base + ".upper"), base + ".upper");
    if (!(dim.lower < dim.upper)) throw ConfigError(base + ".lower", "must be below upper");
    dim.scale = d.contains("scale") ? parse_scale(d["scale"], base + ".scale") : Scale::kLinear;
    dim.monotonicity = parse_monotonicity(require(d, "monotonicity", base + ".monotonicity"),
                                          base + ".monotonicity");
    for (const auto& prev : dims) {
      if (prev.name == dim.name) throw ConfigError(base + ".name", "duplicates '" + dim.name + "'");
    }
    dims.push_back(std::move(dim));
  }
  return SearchSpace(std::move(dims));
}

}  // namespace detail

/// Parse and validate a JSON experiment configuration. Relative dataset paths
/// resolve against `base_dir`.
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                                const std::filesystem::path& base_dir = {}) {
  using namespace detail;
  if (!j.is_object()) throw ConfigError("config", "top level must be a JSON object");
  static const std::vector<std::string> kKnown = {
      "task", "dataset_path", "space", "method", "B", "N", "T", "subset_fraction",
      "subset_iters", "seed", "output_dir", "init_points", "acquisition_budget", "v",
      "synthetic", "split_seed"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end()) {
      throw ConfigError(key, "is not a recognized field");
    }
  }

  ExperimentConfig cfg;
  const std::string task = get_string(require(j, "task", "task"), "task");
  if (task == "synthetic") {
    cfg.task = TaskKind::kSynthetic;
  } else if (task == "elastic_net") {
    cfg.task = TaskKind::kElasticNet;
  } else {
    throw ConfigError("task", "must be \"synthetic\" or \"elastic_net\"");
  }

  const std::string method = get_string(require(j, "method", "method"), "method");
  if (method == "hypertune") {
    cfg.method = Method::kHyperTune;
  } else if (method == "ei") {
    cfg.method = Method::kEI;
  } else {
    throw ConfigError("method", "must be \"hypertune\" or \"ei\", got \"" + method + "\"");
  }

  cfg.space = parse_space(require(j, "space", "space"));
  if (cfg.task == TaskKind::kElasticNet &&
      (cfg.space.size() != 2 || cfg.space[0].name != "ratio" || cfg.space[1].name != "alpha")) {
    throw ConfigError("space", "elastic_net needs dimensions \"ratio\" then \"alpha\"");
  }
  if (cfg.task == TaskKind::kElasticNet) {
    if (cfg.space[0].scale != Scale::kLinear || cfg.space[0].lower < 0.0 || cfg.space[0].upper > 1.0) {
      throw ConfigError("space[0]", "ratio must be linear within [0, 1]");
    }
    if (cfg.space[1].scale != Scale::kExponent10) {
      throw ConfigError("space[1].scale", "alpha must use \"exp10\"");
    }
  }

  const long long seed = get_integer(require(j, "seed", "seed"), "seed");
  if (seed < 0) throw ConfigError("seed", "must be non-negative");
  cfg.tuning.seed = static_cast<std::uint64_t>(seed);
  if (j.contains("split_seed")) {
    const long long s = get_integer(j["split_seed"], "split_seed");
    if (s < 0) throw ConfigError("split_seed", "must be non-negative");
    cfg.split_seed = static_cast<std::uint64_t>(s);
  }

  require(j, "T", "T");
  cfg.tuning.iterations = get_count(j, "T", 0, 1);
  cfg.tuning.subset_runs = get_count(j, "B", cfg.tuning.subset_runs, 1);
  cfg.tuning.virtual_points = get_count(j, "N", cfg.tuning.virtual_points, 0);
  cfg.tuning.subset_iters = get_count(j, "subset_iters", cfg.tuning.subset_iters, 0);
  cfg.tuning.init_points = get_count(j, "init_points", 0, 2);
  cfg.tuning.acquisition_budget = get_count(j, "acquisition_budget", cfg.tuning.acquisition_budget, 1);
  if (j.contains("subset_fraction")) {
    const double f = get_number(j["subset_fraction"], "subset_fraction");
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("subset_fraction", "must lie in (0, 1]");
    cfg.tuning.subset_fraction = f;
  }
  if (j.contains("v")) {
    const double v = get_number(j["v"], "v");
    if (!(v > 0.0)) throw ConfigError("v", "must be positive");
    cfg.tuning.slack = v;
  }

  if (j.contains("synthetic")) {
    const Json& s = j["synthetic"];
    if (!s.is_object()) throw ConfigError("synthetic", "must be an object");
    for (const auto& [key, value] : s.items()) {
      const std::string field = "synthetic." + key;
      if (key == "c_small") cfg.synthetic.c_small = get_number(value, field);
      else if (key == "c_big") cfg.synthetic.c_big = get_number(value, field);
      else if (key == "noise_sd") cfg.synthetic.noise_sd = get_number(value, field);
      else if (key == "decay") cfg.synthetic.decay = get_number(value, field);
      else throw ConfigError(field, "is not a recognized field");
    }
    try {
      cfg.synthetic.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError("synthetic", e.what());
    }
  }

  if (j.contains("dataset_path")) {
    std::filesystem::path p = get_string(j["dataset_path"], "dataset_path");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    cfg.dataset_path = p;
  }
  cfg.output_dir = get_string(require(j, "output_dir", "output_dir"), "output_dir");
  if (cfg.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot read '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_experiment_config(j, path.parent_path());
}

inline std::filesystem::path default_dataset_path() {
  return std::filesystem::path(MONOTUNE_DATA_DIR) / "classification.csv";
}

inline TuningTask make_task(const ExperimentConfig& cfg) {
  if (cfg.task == TaskKind::kSynthetic) {
    return synthetic_task(cfg.space, cfg.synthetic, cfg.tuning.seed);
  }
  const Dataset data = load_csv_dataset(cfg.dataset_path.value_or(default_dataset_path()));
  return elastic_net_task(data, cfg.space, cfg.split_seed);
}

/// Output directory: the environment override if set, else the config's.
inline std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg) {
  const char* env = std::getenv(kOutputDirEnv);
  if (env != nullptr && *env != '\0') return env;
  return cfg.output_dir;
}

/// Write via a sibling temporary file and rename into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

namespace detail {

inline Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

// -inf (no successful evaluation yet) becomes null.
inline Json real_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace detail

/// One JSON object per line.
inline std::string trials_jsonl(const RunRecord& record) {
  std::string out;
  for (const auto& t : record.trials) {
    nlohmann::ordered_json j;
    j["phase"] = t.phase;
    j["iteration"] = t.iteration;
    j["x_raw"] = detail::vector_json(t.x_raw);
    j["x_normalized"] = detail::vector_json(t.x_normalized);
    j["y"] = detail::real_json(t.y);
    j["failed"] = t.failed;
    j["incumbent_y"] = detail::real_json(t.incumbent_y);
    j["elapsed_seconds"] = t.elapsed_seconds;
    out += j.dump();
    out += '\n';
  }
  return out;
}

/// Full-data evaluation equivalents consumed by a run.
inline double eval_equivalents(const RunRecord& record, const TuningTask& task,
                               const HyperTuneConfig& config) {
  return record.main_evaluations +
         task.subset_cost(config.subset_fraction) * record.subset_evaluations;
}

inline std::optional<double> heldout_error_of(const TuningTask& task, const RunRecord& record) {
  if (!task.heldout_error || record.final_x_raw.size() == 0) return std::nullopt;
  return task.heldout_error(record.final_x_raw);
}

inline std::string summary_json(const ExperimentConfig& cfg, const TuningTask& task,
                                const RunRecord& record) {
  nlohmann::ordered_json j;
  j["task"] = std::string(to_string(cfg.task));
  j["method"] = std::string(to_string(cfg.method));
  j["seed"] = cfg.tuning.seed;
  if (record.averaged_optimum) {
    j["averaged_optimum"] = {{"x_normalized", detail::vector_json(*record.averaged_optimum)},
                             {"x_raw", detail::vector_json(cfg.space.denormalize(*record.averaged_optimum))}};
  } else {
    j["averaged_optimum"] = nullptr;
  }
  auto signs = nlohmann::ordered_json::array();
  for (const auto& s : record.sign_points) {
    nlohmann::ordered_json o;
    o["x_normalized"] = detail::vector_json(s.x);
    o["x_raw"] = detail::vector_json(cfg.space.denormalize(s.x));
    o["dim"] = s.dim;
    o["name"] = cfg.space[s.dim].name;
    o["sign"] = s.sign;
    signs.push_back(std::move(o));
  }
  j["sign_points"] = std::move(signs);
  nlohmann::ordered_json inc;
  if (record.final_x_raw.size() > 0) {
    inc["x_raw"] = detail::vector_json(record.final_x_raw);
    inc["x_normalized"] = detail::vector_json(record.final_incumbent.x_best);
    inc["y"] = record.final_incumbent.y_best;
  } else {
    inc = nullptr;
  }
  j["final_incumbent"] = std::move(inc);
  const auto heldout = heldout_error_of(task, record);
  j["heldout_error"] = heldout ? nlohmann::ordered_json(*heldout) : nlohmann::ordered_json(nullptr);
  j["budget"] = {{"subset_seconds", record.subset_seconds},
                 {"main_seconds", record.main_seconds},
                 {"total_seconds", record.total_seconds()},
                 {"subset_evaluations", record.subset_evaluations},
                 {"main_evaluations", record.main_evaluations},
                 {"eval_equivalents", eval_equivalents(record, task, cfg.tuning)}};
  return j.dump(2) + "\n";
}

/// Run the configured method once.
inline RunRecord run_experiment(const ExperimentConfig& cfg, const TuningTask& task,
                                const Budget& ei_budget = {}) {
  if (cfg.method == Method::kHyperTune) return hypertune(task, cfg.tuning);
  return run_ei_baseline(task, cfg.tuning, ei_budget);
}

struct TuneOutcome {
  RunRecord record;
  std::filesystem::path trials_path;
  std::filesystem::path summary_path;
};

inline TuneOutcome tune(const ExperimentConfig& cfg) {
  const TuningTask task = make_task(cfg);
  TuneOutcome out;
  out.record = run_experiment(cfg, task);
  const auto dir = resolve_output_dir(cfg);
  out.trials_path = dir / "trials.jsonl";
  out.summary_path = dir / "summary.json";
  write_file_atomic(out.trials_path, trials_jsonl(out.record));
  write_file_atomic(out.summary_path, summary_json(cfg, task, out.record));
  return out;
}

/// Full-data evaluations (initial design included) until y first reaches
/// `threshold`; `sentinel` if never.
inline int evaluations_to_threshold(const RunRecord& record, double threshold, int sentinel) {
  int count = 0;
  for (const auto& t : record.trials) {
    if (t.phase != "init" && t.phase != "main") continue;
    ++count;
    if (!t.failed && t.y >= threshold) return count;
  }
  return sentinel;
}

struct ComparisonRow {
  std::string method;
  std::uint64_t seed = 0;
  int evals_to_1pct = 0;
  double final_validation = 0.0;
  std::optional<double> heldout_error;
  double budget_seconds = 0.0;
  double eval_equivalents = 0.0;
};

struct Comparison {
  std::vector<ComparisonRow> rows;  // hypertune, ei alternating per seed
};

inline double one_percent_threshold(double optimum) { return optimum - 0.01 * std::abs(optimum); }

/// Paired seeds; the baseline gets HyperTune's consumed budget in evaluation
/// equivalents and wall seconds, whichever runs out first.
inline Comparison compare(const ExperimentConfig& hyper, const ExperimentConfig& ei, int repeats) {
  if (repeats < 1) throw ConfigError("repeats", "must be at least 1");
  Comparison out;
  for (int r = 0; r < repeats; ++r) {
    ExperimentConfig h = hyper;
    ExperimentConfig e = ei;
    h.tuning.seed = hyper.tuning.seed + static_cast<std::uint64_t>(r);
    e.tuning.seed = h.tuning.seed;
    const TuningTask task = make_task(h);

    const RunRecord hr = hypertune(task, h.tuning);
    const double equivalents = eval_equivalents(hr, task, h.tuning);
    Budget budget;
    budget.max_evaluations = static_cast<int>(std::ceil(equivalents - 1e-9));
    budget.max_seconds = hr.total_seconds();
    const RunRecord er = run_ei_baseline(task, e.tuning, budget);

    const double optimum =
        task.reference_optimum.value_or(std::max(hr.final_incumbent.y_best, er.final_incumbent.y_best));
    const double threshold = one_percent_threshold(optimum);
    const int sentinel = *budget.max_evaluations + 1;

    auto row = [&](const RunRecord& rec, Method m, const HyperTuneConfig& tc) {
      ComparisonRow row;
      row.method = std::string(to_string(m));
      row.seed = tc.seed;
      row.evals_to_1pct = evaluations_to_threshold(rec, threshold, sentinel);
      row.final_validation = rec.final_incumbent.y_best;
      row.heldout_error = heldout_error_of(task, rec);
      row.budget_seconds = rec.total_seconds();
      row.eval_equivalents = eval_equivalents(rec, task, tc);
      return row;
    };
    out.rows.push_back(row(hr, Method::kHyperTune, h.tuning));
    out.rows.push_back(row(er, Method::kEI, e.tuning));
  }
  return out;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_and_standard_error(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) out.mean += x;
  out.mean /= n;
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) throw InvalidArgument("median of an empty set");
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

inline std::string fmt_mean_se(const std::vector<double>& xs) {
  if (xs.empty()) return "";
  const MeanSe m = mean_and_standard_error(xs);
  return fmt(m.mean) + " ± " + fmt(m.se);
}

}  // namespace detail

/// Per-seed rows followed by one `summary` row per method holding mean ± standard error.
inline std::string comparison_csv(const Comparison& cmp) {
  std::string out = "method,seed,evals_to_1pct,final_validation,heldout_error,budget_seconds\n";
  for (const auto& r : cmp.rows) {
    out += r.method + ',' + std::to_string(r.seed) + ',' + std::to_string(r.evals_to_1pct) + ',' +
           detail::fmt(r.final_validation) + ',' +
           (r.heldout_error ? detail::fmt(*r.heldout_error) : std::string()) + ',' +
           detail::fmt(r.budget_seconds) + '\n';
  }
  for (const char* method : {"hypertune", "ei"}) {
    std::vector<double> evals, valid, heldout, secs;
    for (const auto& r : cmp.rows) {
      if (r.method != method) continue;
      evals.push_back(r.evals_to_1pct);
      valid.push_back(r.final_validation);
      if (r.heldout_error) heldout.push_back(*r.heldout_error);
      secs.push_back(r.budget_seconds);
    }
    out += std::string(method) + ",summary," + detail::fmt_mean_se(evals) + ',' +
           detail::fmt_mean_se(valid) + ',' + detail::fmt_mean_se(heldout) + ',' +
           detail::fmt_mean_se(secs) + '\n';
  }
  return out;
}

inline std::vector<double> evals_for(const Comparison& cmp, const std::string& method) {
  std::vector<double> out;
  for (const auto& r : cmp.rows) {
    if (r.method == method) out.push_back(r.evals_to_1pct);
  }
  return out;
}

// ---- command entry points: map failures to exit codes ----

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

namespace detail {

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace detail

inline int cmd_tune(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    const TuneOutcome res = tune(cfg);
    const auto& rec = res.record;
    out << to_string(cfg.method) << " on " << to_string(cfg.task) << ", seed " << cfg.tuning.seed
        << ": best y " << detail::fmt(rec.final_incumbent.y_best) << " after "
        << rec.main_evaluations << " full-data evaluations, " << detail::fmt(rec.total_seconds())
        << " s\n";
    out << "wrote " << res.trials_path.string() << " and " << res.summary_path.string() << '\n';
    return kExitOk;
  });
}

inline int cmd_compare(const std::filesystem::path& config_a, const std::filesystem::path& config_b,
                       int repeats, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const ExperimentConfig a = load_experiment_config(config_a);
    const ExperimentConfig b = load_experiment_config(config_b);
    if (a.method == b.method) {
      throw ConfigError("method", "compare needs one hypertune and one ei config");
    }
    const ExperimentConfig& hyper = a.method == Method::kHyperTune ? a : b;
    const ExperimentConfig& ei = a.method == Method::kHyperTune ? b : a;
    if (hyper.task != ei.task) throw ConfigError("task", "configs name different tasks");
    if (!hyper.space.same_layout(ei.space)) throw ConfigError("space", "configs declare different spaces");
    if (hyper.tuning.seed != ei.tuning.seed) throw ConfigError("seed", "configs use different seed bases");
    if (repeats < 1) throw ConfigError("repeats", "must be at least 1");

    const Comparison cmp = compare(hyper, ei, repeats);
    const auto path = resolve_output_dir(a) / "comparison.csv";
    write_file_atomic(path, comparison_csv(cmp));
    out << "median evals_to_1pct: hypertune " << detail::fmt(median(evals_for(cmp, "hypertune")))
        << ", ei " << detail::fmt(median(evals_for(cmp, "ei"))) << '\n';
    out << "wrote " << path.string() << '\n';
    return kExitOk;
  });
}

inline int cmd_validate(const std::filesystem::path& config_path, std::ostream& out,
                        std::ostream& err) {
  return detail::guarded(err, [&] {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    out << "config ok: task " << to_string(cfg.task) << ", method " << to_string(cfg.method)
        << ", seed " << cfg.tuning.seed << '\n';
    for (Eigen::Index i = 0; i < cfg.space.size(); ++i) {
      const Dimension& d = cfg.space[i];
      out << "  " << d.name << ": [" << detail::fmt(d.lower) << ", " << detail::fmt(d.upper)
          << "] scale " << to_string(d.scale);
      if (d.scale == Scale::kExponent10) {
        out << " (values " << detail::fmt(d.value(d.lower)) << " to " << detail::fmt(d.value(d.upper))
            << ")";
      }
      out << ", normalized [0, 1], sign " << to_string(d.monotonicity) << '\n';
    }
    return kExitOk;
  });
}

}  // namespace monotune
