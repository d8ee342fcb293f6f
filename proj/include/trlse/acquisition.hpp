#pragma once

#include "trlse/error.hpp"
#include "trlse/gp.hpp"

#include <cmath>
#include <string>

namespace trlse {

/// Phi^{-1}(0.75), the smallest confidence parameter for which discarding of
/// non-bracketing regions is guaranteed.
inline constexpr double kMinBeta = 0.6744897501960817;
inline constexpr double kDefaultBeta = 1.96;

enum class AcquisitionKind {
  Straddle,
  ThompsonLSE,
  C2LSE,  // registered slot, no implementation
};

inline const char* to_string(AcquisitionKind k) {
  switch (k) {
    case AcquisitionKind::Straddle: return "straddle";
    case AcquisitionKind::ThompsonLSE: return "thompson";
    case AcquisitionKind::C2LSE: return "c2lse";
  }
  return "unknown";
}

inline AcquisitionKind parse_acquisition_kind(const std::string& name) {
  if (name == "straddle" || name == "str") return AcquisitionKind::Straddle;
  if (name == "thompson" || name == "ts") return AcquisitionKind::ThompsonLSE;
  if (name == "c2lse") return AcquisitionKind::C2LSE;
  throw Error(ErrorCode::InvalidArgument, "unknown acquisition '" + name + "'");
}

struct AcquisitionSpec {
  AcquisitionKind kind = AcquisitionKind::Straddle;
  double beta = kDefaultBeta;
  /// Threshold in the standardized frame.
  double threshold = 0.0;

  void validate() const {
    if (!(beta >= kMinBeta)) throw Error(ErrorCode::InvalidArgument, "beta must be at least Phi^-1(0.75)");
    if (kind == AcquisitionKind::C2LSE) throw Error(ErrorCode::NotImplemented, "C2LSE acquisition is not available");
  }
};

/// beta*sigma - |mu - h|
inline double straddle_score(double mean, double stddev, const AcquisitionSpec& spec) {
  return spec.beta * stddev - std::abs(mean - spec.threshold);
}

inline Eigen::VectorXd straddle_scores(const Posterior& post, const AcquisitionSpec& spec) {
  Eigen::VectorXd out(post.mean.size());
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] = straddle_score(post.mean[i], std::sqrt(post.variance[i]), spec);
  return out;
}

/// True when the beta-confidence interval at the point contains the threshold,
/// i.e. when the point is not yet confidently classified.
inline bool interval_contains_threshold(double mean, double stddev, const AcquisitionSpec& spec) {
  return std::abs(mean - spec.threshold) <= spec.beta * stddev;
}

/// Thompson-sampling scores: -|f~(x) - h| for one joint posterior draw f~,
/// so the maximizer is the candidate whose sampled value is closest to h.
inline Eigen::VectorXd thompson_scores(const GpModel& model, const Points& candidates, const AcquisitionSpec& spec,
                                       std::uint64_t seed) {
  const Eigen::VectorXd draw = sample_path(model, candidates, seed);
  return -(draw.array() - spec.threshold).abs().matrix();
}

}  // namespace trlse
