#pragma once

// Synthetic black-box problems on the unit cube with calibrated thresholds.

#include "trlse/error.hpp"
#include "trlse/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace trlse {

namespace functions {

using Ref = Eigen::Ref<const Eigen::VectorXd>;

inline double levy(const Ref& x) {
  const Eigen::Index d = x.size();
  auto w = [&](Eigen::Index i) { return 1.0 + (x[i] - 1.0) / 4.0; };
  const double pi = std::numbers::pi;
  double s = std::pow(std::sin(pi * w(0)), 2);
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    const double wi = w(i);
    s += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * std::pow(std::sin(pi * wi + 1.0), 2));
  }
  const double wd = w(d - 1);
  s += (wd - 1.0) * (wd - 1.0) * (1.0 + std::pow(std::sin(2.0 * pi * wd), 2));
  return s;
}

inline double ackley(const Ref& x) {
  const double d = static_cast<double>(x.size());
  const double sq = x.squaredNorm() / d;
  const double cs = (2.0 * std::numbers::pi * x.array()).cos().sum() / d;
  return -20.0 * std::exp(-0.2 * std::sqrt(sq)) - std::exp(cs) + 20.0 + std::numbers::e;
}

inline double rosenbrock(const Ref& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = x[i] - 1.0;
    s += 100.0 * a * a + b * b;
  }
  return s;
}

inline double trid(const Ref& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += (x[i] - 1.0) * (x[i] - 1.0);
  for (Eigen::Index i = 1; i < x.size(); ++i) s -= x[i] * x[i - 1];
  return s;
}

/// Mishra's third function (two-dimensional).
inline double mishra03(const Ref& x) {
  return std::sqrt(std::abs(std::cos(std::sqrt(std::abs(x[0] * x[0] + x[1]))))) + 0.01 * (x[0] + x[1]);
}

}  // namespace functions

struct FunctionInfo {
  std::string name;
  std::function<double(const functions::Ref&)> fn;
  double lower = 0.0;
  double upper = 1.0;
  double default_fraction = 0.2;
  /// 0 when any dimension is allowed.
  Eigen::Index fixed_dim = 0;
};

inline FunctionInfo function_info(const std::string& name, Eigen::Index dim) {
  const double d = static_cast<double>(dim);
  if (name == "levy") return {"levy", functions::levy, -10.0, 10.0, 0.20, 0};
  if (name == "ackley") return {"ackley", functions::ackley, -5.0, 10.0, 0.20, 0};
  if (name == "rosenbrock") return {"rosenbrock", functions::rosenbrock, -5.0, 10.0, 0.20, 0};
  if (name == "trid") return {"trid", functions::trid, -d * d, d * d, 0.20, 0};
  if (name == "mishra03") return {"mishra03", functions::mishra03, -5.0, 5.0, 0.615, 2};
  throw Error(ErrorCode::InvalidArgument, "unknown problem '" + name + "'");
}

struct Problem {
  std::string name;
  Eigen::Index dim = 0;
  Eigen::VectorXd lower, upper;
  std::function<double(const functions::Ref&)> fn;
  double threshold = 0.0;
  double superlevel_fraction = 0.2;
  /// Observation noise standard deviation in raw units.
  double noise_std = 0.0;

  Point to_raw(const Eigen::Ref<const Eigen::VectorXd>& unit) const {
    return (lower.array() + unit.array() * (upper - lower).array()).matrix();
  }
  Point to_unit(const Eigen::Ref<const Eigen::VectorXd>& raw) const {
    return ((raw - lower).array() / (upper - lower).array()).matrix();
  }

  /// Noiseless value at a unit-cube point.
  double value(const Eigen::Ref<const Eigen::VectorXd>& unit) const { return fn(to_raw(unit)); }
};

/// Noisy evaluation. The noise stream is keyed by the point and the run seed,
/// so repeated runs and concurrent callers see the same values.
inline double eval_fn(const Problem& p, const Eigen::Ref<const Eigen::VectorXd>& unit, std::uint64_t seed) {
  if (unit.size() != p.dim) throw Error(ErrorCode::DimensionMismatch, "eval_fn: point dimension does not match problem");
  const double f = p.value(unit);
  if (p.noise_std <= 0.0) return f;
  std::mt19937_64 rng(derive_seed({hash_point(unit), seed}));
  std::normal_distribution<double> normal(0.0, p.noise_std);
  return f + normal(rng);
}

/// Empirical (1 - fraction)-quantile of the noiseless function under uniform
/// sampling of the domain.
inline double calibrate_threshold(const Problem& p, double fraction, long sample_count, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error(ErrorCode::InvalidArgument, "fraction must lie in (0, 1]");
  if (sample_count < 1) throw Error(ErrorCode::InvalidArgument, "sample_count must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> values(static_cast<std::size_t>(sample_count));
  Point u(p.dim);
  for (auto& v : values) {
    for (Eigen::Index k = 0; k < p.dim; ++k) u[k] = unif(rng);
    v = p.value(u);
  }
  auto idx = static_cast<std::size_t>(std::floor((1.0 - fraction) * static_cast<double>(sample_count)));
  idx = std::min(idx, values.size() - 1);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
  return values[idx];
}

/// Fraction of uniform samples with noiseless f >= h.
inline double superlevel_fraction_at(const Problem& p, double h, long sample_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Point u(p.dim);
  long above = 0;
  for (long i = 0; i < sample_count; ++i) {
    for (Eigen::Index k = 0; k < p.dim; ++k) u[k] = unif(rng);
    if (p.value(u) >= h) ++above;
  }
  return static_cast<double>(above) / static_cast<double>(sample_count);
}

/// true = superlevel (f >= h).
inline std::vector<bool> ground_truth(const Problem& p, const Points& unit_points) {
  std::vector<bool> out(static_cast<std::size_t>(unit_points.rows()));
  for (Eigen::Index i = 0; i < unit_points.rows(); ++i)
    out[static_cast<std::size_t>(i)] = p.value(unit_points.row(i).transpose()) >= p.threshold;
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Plain-text store of calibrated thresholds, one record per line:
/// name,d,fraction,sample_count,seed,h
class ThresholdCache {
 public:
  struct Record {
    std::string name;
    Eigen::Index dim = 0;
    double fraction = 0.0;
    long sample_count = 0;
    std::uint64_t seed = 0;
    double threshold = 0.0;

    bool same_key(const Record& o) const {
      return name == o.name && dim == o.dim && format_double(fraction) == format_double(o.fraction) &&
             sample_count == o.sample_count && seed == o.seed;
    }
  };

  static constexpr const char* kHeader = "# trlse threshold cache v1: name,d,fraction,sample_count,seed,h";

  explicit ThresholdCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      std::stringstream ss(line);
      std::string field;
      std::vector<std::string> fields;
      while (std::getline(ss, field, ',')) fields.push_back(field);
      if (fields.size() != 6)
        throw Error(ErrorCode::Io, path_.string() + ":" + std::to_string(lineno) + ": expected 6 fields");
      try {
        records_.push_back({fields[0], std::stol(fields[1]), std::stod(fields[2]), std::stol(fields[3]),
                            std::stoull(fields[4]), std::stod(fields[5])});
      } catch (const std::exception& e) {
        throw Error(ErrorCode::Io, path_.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  }

  std::optional<double> lookup(const Record& key) const {
    for (const auto& r : records_)
      if (r.same_key(key)) return r.threshold;
    return std::nullopt;
  }

  void store(const Record& rec) {
    for (auto& r : records_) {
      if (r.same_key(rec)) {
        r.threshold = rec.threshold;
        save();
        return;
      }
    }
    records_.push_back(rec);
    save();
  }

  const std::vector<Record>& records() const { return records_; }

 private:
  void save() const {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_);
    if (!out) throw Error(ErrorCode::Io, "cannot write threshold cache " + path_.string());
    out << kHeader << '\n';
    for (const auto& r : records_)
      out << r.name << ',' << r.dim << ',' << format_double(r.fraction) << ',' << r.sample_count << ',' << r.seed << ','
          << format_double(r.threshold) << '\n';
    if (!out) throw Error(ErrorCode::Io, "failed writing threshold cache " + path_.string());
  }

  std::filesystem::path path_;
  std::vector<Record> records_;
};

struct ProblemOptions {
  std::string name = "levy";
  Eigen::Index dim = 10;
  std::optional<double> fraction;
  /// Noise standard deviation as a multiple of the function's spread.
  double noise_level = 0.01;
  long calibration_samples = 1'000'000;
  std::uint64_t calibration_seed = 12345;
  std::optional<std::filesystem::path> cache_path;
};

/// Standard deviation of f over 10^4 uniform samples; sets the noise scale.
inline double function_spread(const Problem& p) {
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  constexpr int n = 10'000;
  Point u(p.dim);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < p.dim; ++k) u[k] = unif(rng);
    const double v = p.value(u);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  return std::sqrt(std::max(sum2 / n - mean * mean, 0.0));
}

inline Problem make_problem(const ProblemOptions& opt) {
  const FunctionInfo info = function_info(opt.name, opt.dim);
  if (opt.dim < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  if (info.fixed_dim != 0 && opt.dim != info.fixed_dim)
    throw Error(ErrorCode::InvalidArgument,
                opt.name + " is defined only for d = " + std::to_string(info.fixed_dim));
  if (opt.noise_level < 0.0) throw Error(ErrorCode::InvalidArgument, "noise level must be non-negative");

  Problem p;
  p.name = info.name;
  p.dim = opt.dim;
  p.lower = Eigen::VectorXd::Constant(opt.dim, info.lower);
  p.upper = Eigen::VectorXd::Constant(opt.dim, info.upper);
  p.fn = info.fn;
  p.superlevel_fraction = opt.fraction.value_or(info.default_fraction);

  ThresholdCache::Record key{p.name, p.dim, p.superlevel_fraction, opt.calibration_samples, opt.calibration_seed, 0.0};
  std::optional<ThresholdCache> cache;
  if (opt.cache_path) cache.emplace(*opt.cache_path);
  std::optional<double> h = cache ? cache->lookup(key) : std::nullopt;
  if (!h) {
    h = calibrate_threshold(p, p.superlevel_fraction, opt.calibration_samples, opt.calibration_seed);
    if (cache) {
      key.threshold = *h;
      cache->store(key);
    }
  }
  p.threshold = *h;
  p.noise_std = opt.noise_level > 0.0 ? opt.noise_level * function_spread(p) : 0.0;
  return p;
}

}  // namespace trlse
