#pragma once

// Experiment runner: seeded repetitions of one or more methods on one
// problem, F1 scoring against a fixed random test set, CSV output.

#include "trlse/benchmarks.hpp"
#include "trlse/engine.hpp"
#include "trlse/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#ifndef TRLSE_VERSION
#define TRLSE_VERSION "0.1.0"
#endif

namespace trlse {

struct Confusion {
  long tp = 0, fp = 0, fn = 0, tn = 0;

  double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
  /// 2PR/(P+R), 0 when P+R = 0. Superlevel is the positive class.
  double f1() const {
    const double p = precision(), r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
};

inline Confusion confusion(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::DimensionMismatch, "label vectors differ in length");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (predicted[i] && truth[i]) ++c.tp;
    else if (predicted[i]) ++c.fp;
    else if (truth[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

struct TestSet {
  Points x;
  std::vector<bool> truth;

  /// Uniform test points; identical for every method sharing (problem, seed).
  static TestSet draw(const Problem& p, long size, std::uint64_t seed) {
    std::mt19937_64 rng(derive_seed({seed, 0x7E57}));
    TestSet t;
    t.x = uniform_points(size, p.dim, rng);
    t.truth = ground_truth(p, t.x);
    return t;
  }
};

inline Confusion evaluate_classifier(const Classifier& c, const TestSet& test) {
  return confusion(classify(c, test.x), test.truth);
}

inline Confusion evaluate_classifier(const Classifier& c, const Problem& p, long test_size, std::uint64_t seed) {
  return evaluate_classifier(c, TestSet::draw(p, test_size, seed));
}

struct MetricsRow {
  std::string method;
  std::uint64_t seed = 0;
  long iteration = 0;
  long evaluations = 0;
  Confusion counts;
  long live_regions = 0;
  long regions_initialized = 0;
  double wall_ms = 0.0;
};

struct ExperimentSpec {
  ProblemOptions problem;
  std::vector<MethodKind> methods{MethodKind::Trlse};
  RunConfig config;
  int repetitions = 1;
  std::uint64_t base_seed = 0;
  long test_set_size = 100'000;
  /// Iterations between classifier snapshots; 0 picks 1 for d <= 100, else 5.
  long eval_every = 0;
  std::filesystem::path output_dir = "results";

  void validate() const {
    if (repetitions < 1) throw Error(ErrorCode::InvalidArgument, "repetitions must be at least 1");
    if (test_set_size < 1000) throw Error(ErrorCode::InvalidArgument, "test_set_size must be at least 1000");
    if (methods.empty()) throw Error(ErrorCode::InvalidArgument, "no methods selected");
    config.validate();
  }

  long snapshot_every() const { return eval_every > 0 ? eval_every : (problem.dim <= 100 ? 1 : 5); }
};

/// Test-only override of the classifier; receives test points, returns labels.
struct ExperimentHooks {
  std::function<std::vector<bool>(const Problem&, const Points&)> label_override;
};

struct RunResult {
  MethodKind method = MethodKind::Trlse;
  std::uint64_t seed = 0;
  std::vector<MetricsRow> rows;
  std::filesystem::path metrics_path;
  std::filesystem::path design_path;
};

struct ExperimentResult {
  Problem problem;
  std::vector<RunResult> runs;
  std::filesystem::path summary_path;
  std::filesystem::path metadata_path;
};

inline constexpr const char* kMetricsHeader = "# trlse metrics v1";
inline constexpr const char* kMetricsColumns =
    "method,seed,iteration,evaluations,f1,precision,recall,tp,fp,fn,tn,live_regions,regions_initialized,wall_ms";

inline std::string format_row(const MetricsRow& r) {
  return r.method + ',' + std::to_string(r.seed) + ',' + std::to_string(r.iteration) + ',' +
         std::to_string(r.evaluations) + ',' + format_double(r.counts.f1()) + ',' +
         format_double(r.counts.precision()) + ',' + format_double(r.counts.recall()) + ',' +
         std::to_string(r.counts.tp) + ',' + std::to_string(r.counts.fp) + ',' + std::to_string(r.counts.fn) + ',' +
         std::to_string(r.counts.tn) + ',' + std::to_string(r.live_regions) + ',' +
         std::to_string(r.regions_initialized) + ',' + format_double(r.wall_ms);
}

/// Empirical quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  return out;
}

inline void write_design(const std::filesystem::path& path, const RunState& s) {
  auto out = open_output(path);
  out << "# trlse design v1\nindex,phase";
  for (Eigen::Index k = 0; k < s.x.cols(); ++k) out << ",x" << k;
  out << ",y\n";
  for (Eigen::Index i = 0; i < s.x.rows(); ++i) {
    out << i << ',' << to_string(s.phases[static_cast<std::size_t>(i)]);
    for (Eigen::Index k = 0; k < s.x.cols(); ++k) out << ',' << format_double(s.x(i, k));
    out << ',' << format_double(s.y[i]) << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

inline void write_events(const std::filesystem::path& path, const RunState& s) {
  auto out = open_output(path);
  out << "# trlse events v1\n"
         "iteration,evaluations,reinitializations,local_acquisition,feasible,nonnegativity_violation,"
         "global_acquisition_at_local,selected_region,min_log_volume,max_log_volume\n";
  for (const auto& e : s.events) {
    out << e.iteration << ',' << e.evaluations << ',' << e.reinitializations << ','
        << format_double(e.local_acquisition) << ',' << (e.feasible ? 1 : 0) << ','
        << (e.nonnegativity_violation ? 1 : 0) << ',' << format_double(e.global_acquisition_at_local) << ','
        << e.selected_region << ',' << format_double(e.min_log_volume) << ',' << format_double(e.max_log_volume)
        << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

}  // namespace detail

/// Runs one method with one seed, snapshotting every `every` iterations and
/// at completion. Rows are streamed to `metrics_path` when it is non-empty;
/// a failure mid-run leaves a "# truncated" marker line.
inline RunResult run_single(MethodKind kind, const Problem& problem, RunConfig cfg, const TestSet& test, long every,
                            const std::filesystem::path& metrics_path, const ExperimentHooks& hooks = {}) {
  RunResult result;
  result.method = kind;
  result.seed = cfg.seed;
  result.metrics_path = metrics_path;
  std::ofstream out;
  if (!metrics_path.empty()) {
    out = detail::open_output(metrics_path);
    out << kMetricsHeader << '\n' << kMetricsColumns << '\n';
  }
  const auto start = std::chrono::steady_clock::now();
  try {
    auto method = make_method(kind, problem, cfg);
    auto snap = [&] {
      const std::vector<bool> labels =
          hooks.label_override ? hooks.label_override(problem, test.x) : classify(method->classifier(), test.x);
      MetricsRow row;
      row.method = to_string(kind);
      row.seed = cfg.seed;
      row.iteration = method->iteration();
      row.evaluations = method->state().evaluations();
      row.counts = confusion(labels, test.truth);
      row.live_regions = method->live_regions();
      row.regions_initialized = method->regions_initialized();
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      result.rows.push_back(row);
      if (out.is_open()) out << format_row(row) << '\n' << std::flush;
    };
    snap();
    long last = method->iteration();
    while (!method->done()) {
      method->step();
      if (method->done() || method->iteration() - last >= every) {
        snap();
        last = method->iteration();
      }
    }
    if (!metrics_path.empty()) {
      auto stem = metrics_path;
      stem.replace_extension();
      result.design_path = stem.string() + "_design.csv";
      detail::write_design(result.design_path, method->state());
      if (kind == MethodKind::Trlse) detail::write_events(stem.string() + "_events.csv", method->state());
    }
  } catch (const std::exception& e) {
    if (out.is_open()) out << "# truncated: " << e.what() << '\n' << std::flush;
    throw;
  }
  return result;
}

inline void write_summary(const std::filesystem::path& path, const std::vector<RunResult>& runs) {
  std::map<std::pair<std::string, long>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& run : runs)
    for (const auto& row : run.rows) {
      auto& g = groups[{row.method, row.iteration}];
      g.first.push_back(row.counts.f1());
      g.second.push_back(static_cast<double>(row.evaluations));
    }
  auto out = detail::open_output(path);
  out << "# trlse summary v1\nmethod,iteration,count,evaluations_median,f1_median,f1_q1,f1_q3\n";
  for (const auto& [key, g] : groups) {
    out << key.first << ',' << key.second << ',' << g.first.size() << ',' << format_double(quantile(g.second, 0.5))
        << ',' << format_double(quantile(g.first, 0.5)) << ',' << format_double(quantile(g.first, 0.25)) << ','
        << format_double(quantile(g.first, 0.75)) << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

inline void write_metadata(const std::filesystem::path& path, const ExperimentSpec& spec, const Problem& problem) {
  auto out = detail::open_output(path);
  const auto& c = spec.config;
  std::string methods;
  for (auto m : spec.methods) methods += (methods.empty() ? "" : ";") + std::string(to_string(m));
  out << "build=trlse-" << TRLSE_VERSION << '\n'
      << "problem=" << problem.name << '\n'
      << "dim=" << problem.dim << '\n'
      << "threshold=" << format_double(problem.threshold) << '\n'
      << "superlevel_fraction=" << format_double(problem.superlevel_fraction) << '\n'
      << "noise_level=" << format_double(spec.problem.noise_level) << '\n'
      << "noise_std=" << format_double(problem.noise_std) << '\n'
      << "calibration_samples=" << spec.problem.calibration_samples << '\n'
      << "calibration_seed=" << spec.problem.calibration_seed << '\n'
      << "methods=" << methods << '\n'
      << "repetitions=" << spec.repetitions << '\n'
      << "base_seed=" << spec.base_seed << '\n'
      << "test_set_size=" << spec.test_set_size << '\n'
      << "eval_every=" << spec.snapshot_every() << '\n'
      << "budget=" << c.budget << '\n'
      << "v_init=" << format_double(c.v_init) << '\n'
      << "v_max=" << format_double(c.v_max) << '\n'
      << "regions=" << c.num_regions << '\n'
      << "beta=" << format_double(c.beta) << '\n'
      << "kernel=" << to_string(c.kernel) << '\n'
      << "acq_global=" << to_string(c.global_acquisition) << '\n'
      << "acq_local=" << to_string(c.local_acquisition) << '\n'
      << "s_fn=" << to_string(c.s_function.form) << '\n'
      << "s_a=" << format_double(c.s_function.a) << '\n'
      << "s_b=" << format_double(c.s_function.b) << '\n'
      << "s_slope=" << format_double(c.s_function.slope) << '\n'
      << "s_intercept=" << format_double(c.s_function.intercept) << '\n'
      << "random_reinit=" << c.ablation.random_reinit << '\n'
      << "single_gp=" << c.ablation.single_global_gp << '\n'
      << "constant_s=" << c.ablation.constant_volume << '\n'
      << "candidate_budget=" << c.budget_for(problem.dim) << '\n'
      << "polish_steps=" << (c.polish ? c.polish_steps : 0) << '\n'
      << "refit_every=" << c.refit_every << '\n';
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

/// Runs every (method, repetition) pair. Seeds are base_seed + repetition and
/// are shared across methods, so initial designs and test sets coincide.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, const ExperimentHooks& hooks = {}) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(spec.output_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + spec.output_dir.string() + ": " + ec.message());

  ProblemOptions popt = spec.problem;
  if (!popt.cache_path) popt.cache_path = spec.output_dir / "thresholds.txt";
  ExperimentResult result{make_problem(popt), {}, spec.output_dir / "summary.csv", spec.output_dir / "metadata.txt"};
  write_metadata(result.metadata_path, spec, result.problem);

  for (int rep = 0; rep < spec.repetitions; ++rep) {
    const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(rep);
    const TestSet test = TestSet::draw(result.problem, spec.test_set_size, seed);
    for (MethodKind m : spec.methods) {
      RunConfig cfg = spec.config;
      cfg.seed = seed;
      const auto path = spec.output_dir / (std::string(to_string(m)) + "_seed" + std::to_string(seed) + ".csv");
      result.runs.push_back(run_single(m, result.problem, cfg, test, spec.snapshot_every(), path, hooks));
    }
  }
  write_summary(result.summary_path, result.runs);
  return result;
}

/// Hyperparameters per benchmark; falls back to V_init = 0.5^d for others.
inline RunConfig default_config_for(const std::string& problem, Eigen::Index dim) {
  RunConfig c;
  if (problem == "mishra03") {
    c.v_init = 1e-4, c.v_max = 5e-2, c.num_regions = 10, c.budget = 80;
  } else if (problem == "levy" && dim == 10) {
    c.v_init = 1e-5, c.v_max = 1e-1, c.num_regions = 40, c.budget = 300;
  } else if (problem == "levy" && dim == 100) {
    c.v_init = 1e-30, c.v_max = 1e-2, c.num_regions = 50, c.budget = 1000;
  } else if (problem == "ackley" && dim == 200) {
    c.v_init = 1e-60, c.v_max = 1e-2, c.num_regions = 200, c.budget = 1000;
  } else if ((problem == "trid" || problem == "rosenbrock") && dim == 1000) {
    c.v_init = 1e-300, c.v_max = 1e-2, c.num_regions = 50, c.budget = 1000;
  } else {
    c.v_max = dim <= 10 ? 1e-1 : 1e-2;
    // 0.5^d alone exceeds v_max in low dimension.
    c.v_init = std::clamp(std::pow(0.5, static_cast<double>(dim)), 1e-300, 0.1 * c.v_max);
    c.num_regions = dim <= 10 ? 20 : 50;
    c.budget = dim <= 10 ? 300 : 1000;
  }
  return c;
}

}  // namespace trlse
