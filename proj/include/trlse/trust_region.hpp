#pragma once

// Per-region state and the update rules applied to it each iteration:
// centroid move, bracketing penalty, volume and side-length updates, and the
// data window used to fit the region's local GP. Volumes and lengths live in
// the log domain throughout.

#include "trlse/box_optimizer.hpp"
#include "trlse/error.hpp"
#include "trlse/gp.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

namespace trlse {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

/// Maps a penalty in [0.5, 1] to a multiplicative volume factor.
struct SFunction {
  enum class Form { Sigmoid, Linear, Constant };

  Form form = Form::Sigmoid;
  // Sigmoid: 2 / (1 + exp(a*u - b)). Linear: max(0, slope*u + intercept).
  double a = 8.0;
  double b = 6.0;
  double slope = -4.0;
  double intercept = 4.0;

  static SFunction sigmoid(double a = 8.0, double b = 6.0) {
    SFunction s;
    s.a = a;
    s.b = b;
    return s;
  }
  static SFunction linear(double slope = -4.0, double intercept = 4.0) {
    SFunction s;
    s.form = Form::Linear;
    s.slope = slope;
    s.intercept = intercept;
    return s;
  }
  static SFunction constant() {
    SFunction s;
    s.form = Form::Constant;
    return s;
  }

  double operator()(double u) const { return std::exp(log_value(u)); }

  /// log S(u); -inf when S(u) <= 0.
  double log_value(double u) const {
    switch (form) {
      case Form::Sigmoid: {
        const double z = a * u - b;
        const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
        return std::numbers::ln2 - softplus;
      }
      case Form::Linear: {
        const double v = slope * u + intercept;
        return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
      }
      case Form::Constant:
        return 0.0;
    }
    return 0.0;
  }
};

inline const char* to_string(SFunction::Form f) {
  switch (f) {
    case SFunction::Form::Sigmoid: return "sigmoid";
    case SFunction::Form::Linear: return "linear";
    case SFunction::Form::Constant: return "constant";
  }
  return "unknown";
}

inline SFunction::Form parse_s_form(const std::string& name) {
  if (name == "sigmoid" || name == "s1") return SFunction::Form::Sigmoid;
  if (name == "linear") return SFunction::Form::Linear;
  if (name == "constant") return SFunction::Form::Constant;
  throw Error(ErrorCode::InvalidArgument, "unknown S function '" + name + "'");
}

struct TrustRegion {
  std::uint64_t id = 0;
  Point centroid;
  double log_volume = 0.0;
  Eigen::VectorXd log_lengths;
  std::shared_ptr<const GpModel> local_model;
  long birth_iteration = 0;
  /// Dataset row of the evaluation the region was born at, -1 if unknown.
  Eigen::Index origin = -1;

  /// Cube of the given volume around `centroid`.
  static TrustRegion isotropic(std::uint64_t id, Point centroid, double log_volume, long birth_iteration = 0) {
    TrustRegion tr;
    tr.id = id;
    const auto d = centroid.size();
    tr.centroid = std::move(centroid);
    tr.log_volume = log_volume;
    tr.log_lengths = Eigen::VectorXd::Constant(d, log_volume / static_cast<double>(d));
    tr.birth_iteration = birth_iteration;
    return tr;
  }

  Eigen::Index dim() const { return centroid.size(); }
  Eigen::VectorXd lengths() const { return log_lengths.array().exp(); }

  /// [C - L/2, C + L/2] clipped to the unit cube.
  Box box() const {
    const Eigen::VectorXd half = 0.5 * lengths();
    return Box{centroid - half, centroid + half}.clipped_to_unit();
  }

  /// [C - L, C + L] clipped to the unit cube: twice the region extent per axis.
  Box window() const {
    const Eigen::VectorXd l = lengths();
    return Box{centroid - l, centroid + l}.clipped_to_unit();
  }

  bool flagged_for_discard(double v_init) const { return log_volume < std::log(v_init / 2.0); }
};

namespace detail {

template <Surrogate Model>
Eigen::VectorXd distance_to_threshold(const Model& model, const Points& p, double threshold) {
  return (model.posterior(p).mean.array() - threshold).abs().matrix();
}

}  // namespace detail

/// Point of the region box whose posterior mean is closest to the threshold.
/// The current centroid is kept unless the search strictly improves on it.
template <Surrogate Model>
Point move_centroid(const TrustRegion& tr, const Model& model, double threshold, BoxQuery q) {
  Points here(1, tr.dim());
  here.row(0) = tr.centroid.transpose();
  q.anchors = detail::stack(here, q.anchors);
  auto score = [&](const Points& p) -> Eigen::VectorXd { return -detail::distance_to_threshold(model, p, threshold); };
  const Maximum best = maximize_in_box(score, tr.box(), q);
  const double current = -detail::distance_to_threshold(model, here, threshold)[0];
  return best.value > current ? best.x : tr.centroid;
}

/// Phi(|(l + u - 2h) / (2 sigma)|) with sigma = (u - l) / (2 beta).
///
/// Returns 0.5 when u == l. The result is capped just below 1 so that the
/// half-open range [0.5, 1) holds in floating point.
inline double penalty_value(double lcb_min, double ucb_max, double threshold, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "penalty: beta must be positive");
  const double spread = ucb_max - lcb_min;
  if (!(spread > 0.0)) return 0.5;
  const double sigma = spread / (2.0 * beta);
  const double z = std::abs((lcb_min + ucb_max - 2.0 * threshold) / (2.0 * sigma));
  return std::min(std::max(normal_cdf(z), 0.5), std::nextafter(1.0, 0.0));
}

struct PenaltyResult {
  double value = 0.5;
  double lcb_min = 0.0;
  double ucb_max = 0.0;
};

template <Surrogate Model>
PenaltyResult penalty(const TrustRegion& tr, const Model& model, double beta, double threshold, const BoxQuery& q) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "penalty: beta must be positive");
  const ConfidenceExtremes ext = extremize_confidence_bounds(model, tr.box(), beta, q);
  return {penalty_value(ext.lcb_min, ext.ucb_max, threshold, beta), ext.lcb_min, ext.ucb_max};
}

/// New log-volume: min(log V + log S(P), log V_max). A non-positive factor
/// yields -inf, which always flags the region for discard.
inline double update_volume(const TrustRegion& tr, double penalty_value, const SFunction& s, double v_max) {
  if (!(penalty_value >= 0.5 && penalty_value <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "update_volume: penalty " + std::to_string(penalty_value) +
                                                " outside [0.5, 1]");
  if (!(v_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "update_volume: v_max must be positive");
  const double log_factor = s.log_value(penalty_value);
  if (log_factor == -std::numeric_limits<double>::infinity()) return log_factor;
  return std::min(tr.log_volume + log_factor, std::log(v_max));
}

/// Side lengths proportional to the GP lengthscales with product equal to the
/// region volume: log L_k = log lambda_k + (log V - sum_j log lambda_j) / d.
inline Eigen::VectorXd update_lengths(const TrustRegion& tr, const Eigen::VectorXd& lengthscales) {
  if (lengthscales.size() != tr.dim())
    throw Error(ErrorCode::DimensionMismatch, "update_lengths: lengthscale count does not match region dimension");
  if ((lengthscales.array() <= 0.0).any() || !lengthscales.allFinite())
    throw Error(ErrorCode::InvalidArgument, "update_lengths: lengthscales must be positive and finite");
  const Eigen::VectorXd log_ls = lengthscales.array().log();
  const double offset = (tr.log_volume - log_ls.sum()) / static_cast<double>(tr.dim());
  return (log_ls.array() + offset).matrix();
}

/// Row indices of `data` with |x_k - C_k| <= L_k on every axis.
inline std::vector<Eigen::Index> data_window(const TrustRegion& tr, const Points& data) {
  if (data.rows() > 0 && data.cols() != tr.dim())
    throw Error(ErrorCode::DimensionMismatch, "data_window: data dimension does not match region");
  const Box w = tr.window();
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    if (w.contains(data.row(i).transpose())) out.push_back(i);
  return out;
}

/// Iteration bound after which a region that stays on one side of the
/// threshold is replaced:
///   log(V_init / V_max^2) / (log 2 - log(1 + exp(-b + a*Phi(beta)))).
inline double zeta_bound(double v_init, double v_max, double a, double b, double beta) {
  if (!(v_init > 0.0) || !(v_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "zeta_bound: volumes must be positive");
  const double z = -b + a * normal_cdf(beta);
  const double softplus = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  const double denominator = std::numbers::ln2 - softplus;
  if (denominator >= -1e-12)
    throw Error(ErrorCode::Precondition, "zeta_bound: beta must exceed Phi^-1(b/a) (denominator " +
                                             std::to_string(denominator) + ")");
  return std::log(v_init / (v_max * v_max)) / denominator;
}

}  // namespace trlse
