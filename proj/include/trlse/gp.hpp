#pragma once

// Exact Gaussian-process regression on the unit cube.
//
// Targets are expected in the standardized frame produced by Standardizer,
// so the zero prior mean sits on the classification threshold. Three
// stationary kernels are supported; hyperparameters are fitted by MAP with a
// dimension-scaled log-normal lengthscale prior.

#include "trlse/error.hpp"
#include "trlse/random.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace trlse {

enum class KernelFamily { Matern52, RBF, RationalQuadratic };

inline const char* to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Matern52: return "matern52";
    case KernelFamily::RBF: return "rbf";
    case KernelFamily::RationalQuadratic: return "rq";
  }
  return "unknown";
}

inline KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "matern52" || name == "matern") return KernelFamily::Matern52;
  if (name == "rbf") return KernelFamily::RBF;
  if (name == "rq") return KernelFamily::RationalQuadratic;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel family '" + name + "'");
}

struct KernelSpec {
  KernelFamily family = KernelFamily::Matern52;
  Eigen::VectorXd lengthscales;
  double signal_variance = 1.0;
  double rq_alpha = 1.0;

  Eigen::Index dim() const { return lengthscales.size(); }

  void validate() const {
    if (lengthscales.size() == 0) throw Error(ErrorCode::InvalidArgument, "kernel has no lengthscales");
    for (Eigen::Index k = 0; k < lengthscales.size(); ++k) {
      if (!(lengthscales[k] > 0.0) || !std::isfinite(lengthscales[k]))
        throw Error(ErrorCode::InvalidArgument, "lengthscale " + std::to_string(k) + " is not positive and finite");
    }
    if (!(signal_variance > 0.0)) throw Error(ErrorCode::InvalidArgument, "signal variance must be positive");
    if (family == KernelFamily::RationalQuadratic && !(rq_alpha > 0.0))
      throw Error(ErrorCode::InvalidArgument, "rational-quadratic alpha must be positive");
  }

  /// k as a function of the lengthscale-scaled squared distance.
  double from_squared_distance(double r2) const {
    r2 = std::max(r2, 0.0);
    switch (family) {
      case KernelFamily::Matern52: {
        const double r = std::sqrt(5.0 * r2);
        return signal_variance * (1.0 + r + r * r / 3.0) * std::exp(-r);
      }
      case KernelFamily::RBF:
        return signal_variance * std::exp(-0.5 * r2);
      case KernelFamily::RationalQuadratic:
        return signal_variance * std::pow(1.0 + r2 / (2.0 * rq_alpha), -rq_alpha);
    }
    return 0.0;
  }
};

inline KernelSpec isotropic_kernel(KernelFamily family, Eigen::Index dim, double lengthscale,
                                   double signal_variance = 1.0) {
  KernelSpec spec;
  spec.family = family;
  spec.lengthscales = Eigen::VectorXd::Constant(dim, lengthscale);
  spec.signal_variance = signal_variance;
  return spec;
}

inline double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& a,
                          const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != spec.dim() || b.size() != spec.dim())
    throw Error(ErrorCode::DimensionMismatch, "kernel_eval: points have " + std::to_string(a.size()) + " and " +
                                                  std::to_string(b.size()) + " coordinates, kernel expects " +
                                                  std::to_string(spec.dim()));
  const double r2 = ((a - b).array() / spec.lengthscales.array()).square().sum();
  return spec.from_squared_distance(r2);
}

namespace detail {

// Scaled points stored column-wise so each point is contiguous.
inline Eigen::MatrixXd scaled_columns(const KernelSpec& spec, const Points& pts) {
  return (pts.array().rowwise() / spec.lengthscales.transpose().array()).matrix().transpose();
}

}  // namespace detail

/// Cross-covariance matrix, rows indexed by `a`, columns by `b`.
inline Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Points& a, const Points& b) {
  if (a.cols() != spec.dim() || b.cols() != spec.dim())
    throw Error(ErrorCode::DimensionMismatch, "kernel_matrix: point dimension does not match kernel");
  const Eigen::MatrixXd as = detail::scaled_columns(spec, a);
  const Eigen::MatrixXd bs = detail::scaled_columns(spec, b);
  Eigen::MatrixXd out(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out(i, j) = spec.from_squared_distance((as.col(i) - bs.col(j)).squaredNorm());
  return out;
}

inline Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Points& a) {
  if (a.cols() != spec.dim())
    throw Error(ErrorCode::DimensionMismatch, "kernel_matrix: point dimension does not match kernel");
  const Eigen::MatrixXd as = detail::scaled_columns(spec, a);
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out(j, j) = spec.signal_variance;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = spec.from_squared_distance((as.col(i) - as.col(j)).squaredNorm());
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

struct Posterior {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;

  Eigen::VectorXd stddev() const { return variance.array().sqrt().matrix(); }
};

inline constexpr double kJitterMin = 1e-10;
inline constexpr double kJitterMax = 1e-4;

namespace detail {

inline double condition_estimate(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (ev.size() == 0) return 1.0;
  const double lo = ev.minCoeff();
  const double hi = ev.maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

inline bool factor_ok(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  if (llt.info() != Eigen::Success) return false;
  const auto& m = llt.matrixLLT();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    if (!(m(i, i) > 0.0) || !std::isfinite(m(i, i))) return false;
  return true;
}

/// Factorizes `a + jitter*I`, escalating jitter by decades. Returns the jitter
/// used or nullopt when even the largest jitter fails.
inline std::optional<double> factorize_with_jitter(const Eigen::MatrixXd& a, Eigen::LLT<Eigen::MatrixXd>& llt) {
  Eigen::MatrixXd work = a;
  double applied = 0.0;
  for (double jitter = kJitterMin; jitter <= kJitterMax * 1.0001; jitter *= 10.0) {
    work.diagonal().array() += jitter - applied;
    applied = jitter;
    llt.compute(work);
    if (factor_ok(llt)) return jitter;
  }
  return std::nullopt;
}

}  // namespace detail

/// Exact GP posterior. Immutable once built; safe to share across threads.
class GpModel {
 public:
  GpModel() = default;

  /// Prior-only model (no training data).
  GpModel(KernelSpec kernel, double noise_variance) : kernel_(std::move(kernel)), noise_variance_(noise_variance) {
    kernel_.validate();
    if (!(noise_variance_ >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise variance must be non-negative");
    train_x_.resize(0, kernel_.dim());
  }

  static GpModel fit(KernelSpec kernel, double noise_variance, Points x, Eigen::VectorXd y) {
    GpModel m(std::move(kernel), noise_variance);
    if (x.cols() != m.kernel_.dim())
      throw Error(ErrorCode::DimensionMismatch, "training points have " + std::to_string(x.cols()) +
                                                    " coordinates, kernel expects " + std::to_string(m.kernel_.dim()));
    if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "training targets do not match points");
    m.train_x_ = std::move(x);
    m.train_y_ = std::move(y);
    if (m.train_x_.rows() == 0) return m;

    Eigen::MatrixXd gram = kernel_matrix(m.kernel_, m.train_x_);
    gram.diagonal().array() += m.noise_variance_;
    auto jitter = detail::factorize_with_jitter(gram, m.chol_);
    if (!jitter) {
      throw Error(ErrorCode::SingularMatrix,
                  "Gram matrix not positive definite after jitter " + std::to_string(kJitterMax) +
                      " (condition estimate " + std::to_string(detail::condition_estimate(gram)) + ")");
    }
    m.jitter_ = *jitter;
    m.alpha_ = m.chol_.solve(m.train_y_);
    return m;
  }

  const KernelSpec& kernel() const { return kernel_; }
  double noise_variance() const { return noise_variance_; }
  double jitter() const { return jitter_; }
  Eigen::Index dim() const { return kernel_.dim(); }
  Eigen::Index size() const { return train_x_.rows(); }
  const Points& train_x() const { return train_x_; }
  const Eigen::VectorXd& train_y() const { return train_y_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  Eigen::MatrixXd chol_lower() const { return chol_.matrixL(); }

  Posterior posterior(const Points& query) const {
    if (query.cols() != dim())
      throw Error(ErrorCode::DimensionMismatch, "query has " + std::to_string(query.cols()) +
                                                    " coordinates, model expects " + std::to_string(dim()));
    Posterior out;
    if (size() == 0) {
      out.mean = Eigen::VectorXd::Zero(query.rows());
      out.variance = Eigen::VectorXd::Constant(query.rows(), kernel_.signal_variance);
      return out;
    }
    const Eigen::MatrixXd cross = kernel_matrix(kernel_, train_x_, query);
    out.mean = cross.transpose() * alpha_;
    const Eigen::MatrixXd v = chol_.matrixL().solve(cross);
    out.variance = (kernel_.signal_variance - v.colwise().squaredNorm().array()).max(0.0).matrix().transpose();
    return out;
  }

  /// Joint posterior covariance over the query set.
  Eigen::MatrixXd posterior_covariance(const Points& query) const {
    Eigen::MatrixXd cov = kernel_matrix(kernel_, query);
    if (size() == 0) return cov;
    const Eigen::MatrixXd cross = kernel_matrix(kernel_, train_x_, query);
    const Eigen::MatrixXd v = chol_.matrixL().solve(cross);
    cov.noalias() -= v.transpose() * v;
    return cov;
  }

  double log_marginal_likelihood() const {
    const double n = static_cast<double>(size());
    if (size() == 0) return 0.0;
    const double log_det_half = chol_.matrixLLT().diagonal().array().log().sum();
    return -0.5 * train_y_.dot(alpha_) - log_det_half - 0.5 * n * std::log(2.0 * std::numbers::pi);
  }

 private:
  KernelSpec kernel_;
  double noise_variance_ = 0.0;
  double jitter_ = 0.0;
  Points train_x_;
  Eigen::VectorXd train_y_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
};

/// One draw from the joint posterior over `candidates`.
///
/// Uses a pivoted LDL^T factorization with negative pivots clamped to zero,
/// so perfectly correlated candidates receive identical values.
inline Eigen::VectorXd sample_path(const GpModel& model, const Points& candidates, std::uint64_t seed) {
  if (candidates.rows() < 1) throw Error(ErrorCode::InvalidArgument, "sample_path needs at least one candidate");
  const Posterior post = model.posterior(candidates);
  Eigen::MatrixXd cov = model.posterior_covariance(candidates);
  const Eigen::Index m = cov.rows();
  const double scale = std::max(cov.trace() / static_cast<double>(m), 1e-300);

  Eigen::LDLT<Eigen::MatrixXd> ldlt;
  double applied = 0.0;
  bool ok = false;
  for (double jitter = 0.0; jitter <= kJitterMax * 1.0001; jitter = jitter == 0.0 ? kJitterMin : jitter * 10.0) {
    cov.diagonal().array() += jitter - applied;
    applied = jitter;
    ldlt.compute(cov);
    if (ldlt.vectorD().minCoeff() < -1e-8 * scale) continue;
    // A zero pivot followed by rounding noise is reported as a failure even
    // though the factors reproduce the matrix.
    if (ldlt.info() == Eigen::Success || (ldlt.reconstructedMatrix() - cov).cwiseAbs().maxCoeff() <= 1e-10 * scale) {
      ok = true;
      break;
    }
  }
  if (!ok) throw Error(ErrorCode::SingularMatrix, "posterior covariance is not positive semi-definite");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < m; ++i) z[i] = normal(rng);

  // cov = P^T L D L^T P  =>  sample = P^T L sqrt(D) z
  Eigen::VectorXd w = ldlt.vectorD().array().max(0.0).sqrt().matrix().cwiseProduct(z);
  Eigen::VectorXd lw = ldlt.matrixL() * w;
  Eigen::VectorXd draw = ldlt.transpositionsP().transpose() * lw;
  return post.mean + draw;
}

/// Maps raw targets into the frame used by every GP.
///
/// The map is (y - mean)/std - shift with shift = (h - mean)/std, so the
/// threshold lands on 0 and the zero prior mean represents "on the boundary".
struct Standardizer {
  double mean = 0.0;
  double std = 1.0;
  double shift = 0.0;
  double internal_threshold = 0.0;

  static Standardizer from_targets(std::span<const double> y, double threshold) {
    Standardizer s;
    if (!y.empty()) {
      double sum = 0.0;
      for (double v : y) sum += v;
      s.mean = sum / static_cast<double>(y.size());
      if (y.size() > 1) {
        double ss = 0.0;
        for (double v : y) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(y.size() - 1));
      }
    }
    if (!(s.std > 1e-12) || !std::isfinite(s.std)) s.std = 1.0;
    s.shift = (threshold - s.mean) / s.std;
    s.internal_threshold = s.transform(threshold);
    return s;
  }

  double transform(double raw) const { return (raw - mean) / std - shift; }
  double inverse(double internal) const { return (internal + shift) * std + mean; }

  Eigen::VectorXd transform(const Eigen::VectorXd& raw) const {
    return raw.unaryExpr([this](double v) { return transform(v); });
  }
};

/// Gaussian priors over log-hyperparameters.
struct HyperPrior {
  double log_lengthscale_loc = 0.0;
  double log_lengthscale_scale = std::sqrt(3.0);
  double log_signal_loc = 0.0;
  double log_signal_scale = 1.5;
  double log_noise_loc = -4.0;
  double log_noise_scale = 1.0;

  static HyperPrior for_dimension(Eigen::Index dim) {
    HyperPrior p;
    p.log_lengthscale_loc = std::log(std::sqrt(static_cast<double>(dim)) / 2.0);
    return p;
  }
};

struct FitOptions {
  int restarts = 8;
  /// Starts that get the full coordinate search, best first after screening.
  int refined_starts = 2;
  int sweeps = 3;
  int line_iterations = 10;
  double initial_width = 1.5;
  double noise_floor = 1e-6;
  double rq_alpha = 1.0;
  std::optional<HyperPrior> prior;
  /// Log-parameter vector from a previous fit, tried as one of the starts.
  std::optional<Eigen::VectorXd> warm_start;
};

struct Hyperparameters {
  KernelSpec kernel;
  double noise_variance = 0.0;
  double log_marginal_likelihood = 0.0;
  double log_posterior = 0.0;

  /// [log lengthscales..., log signal variance, log noise variance]
  Eigen::VectorXd log_params() const {
    const Eigen::Index d = kernel.dim();
    Eigen::VectorXd t(d + 2);
    t.head(d) = kernel.lengthscales.array().log();
    t[d] = std::log(kernel.signal_variance);
    t[d + 1] = std::log(noise_variance);
    return t;
  }
};

namespace detail {

struct HyperObjective {
  const Points& x;
  const Eigen::VectorXd& y;
  KernelFamily family;
  double rq_alpha;
  HyperPrior prior;
  Eigen::VectorXd lower, upper;

  Eigen::Index dim() const { return x.cols(); }

  KernelSpec kernel_of(const Eigen::VectorXd& t) const {
    KernelSpec k;
    k.family = family;
    k.rq_alpha = rq_alpha;
    k.lengthscales = t.head(dim()).array().exp();
    k.signal_variance = std::exp(t[dim()]);
    return k;
  }

  double log_prior(const Eigen::VectorXd& t) const {
    auto sq = [](double v, double loc, double scale) { return -0.5 * ((v - loc) / scale) * ((v - loc) / scale); };
    double lp = 0.0;
    for (Eigen::Index k = 0; k < dim(); ++k) lp += sq(t[k], prior.log_lengthscale_loc, prior.log_lengthscale_scale);
    lp += sq(t[dim()], prior.log_signal_loc, prior.log_signal_scale);
    lp += sq(t[dim() + 1], prior.log_noise_loc, prior.log_noise_scale);
    return lp;
  }

  double log_likelihood(const Eigen::VectorXd& t) const {
    const KernelSpec k = kernel_of(t);
    Eigen::MatrixXd gram = kernel_matrix(k, x);
    gram.diagonal().array() += std::exp(t[dim() + 1]);
    Eigen::LLT<Eigen::MatrixXd> llt;
    if (!factorize_with_jitter(gram, llt)) return -std::numeric_limits<double>::infinity();
    const Eigen::VectorXd a = llt.solve(y);
    const double log_det_half = llt.matrixLLT().diagonal().array().log().sum();
    const double n = static_cast<double>(x.rows());
    return -0.5 * y.dot(a) - log_det_half - 0.5 * n * std::log(2.0 * std::numbers::pi);
  }

  double operator()(const Eigen::VectorXd& t) const {
    const double ll = log_likelihood(t);
    if (!std::isfinite(ll)) return -std::numeric_limits<double>::infinity();
    return ll + log_prior(t);
  }

  Eigen::VectorXd clamp(Eigen::VectorXd t) const { return t.cwiseMax(lower).cwiseMin(upper); }
};

/// Golden-section maximization of `g` on [lo, hi]; returns (argmax, value).
template <class F>
std::pair<double, double> golden_section_max(F&& g, double lo, double hi, int iterations) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = g(c), fd = g(d);
  for (int it = 0; it < iterations; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = g(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

inline std::pair<Eigen::VectorXd, double> coordinate_search(const HyperObjective& obj, Eigen::VectorXd t, double f,
                                                            const FitOptions& opt) {
  double width = opt.initial_width;
  for (int sweep = 0; sweep < opt.sweeps; ++sweep) {
    const double before = f;
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      const double lo = std::max(obj.lower[k], t[k] - width);
      const double hi = std::min(obj.upper[k], t[k] + width);
      if (!(hi > lo)) continue;
      Eigen::VectorXd trial = t;
      auto g = [&](double v) {
        trial[k] = v;
        return obj(trial);
      };
      auto [arg, val] = golden_section_max(g, lo, hi, opt.line_iterations);
      if (val > f) {
        t[k] = arg;
        f = val;
      }
    }
    width *= 0.5;
    if (f - before < 1e-6) break;
  }
  return {t, f};
}

}  // namespace detail

/// MAP hyperparameters for a zero-mean GP on standardized targets.
///
/// With at most one observation the likelihood carries no lengthscale
/// information and the prior modes are returned unchanged.
inline Hyperparameters fit_hyperparams(const Points& x, const Eigen::VectorXd& y, KernelFamily family,
                                       std::uint64_t seed, const FitOptions& opt = {}) {
  const Eigen::Index d = x.cols();
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "fit_hyperparams: zero-dimensional inputs");
  if (x.rows() != y.size()) throw Error(ErrorCode::DimensionMismatch, "fit_hyperparams: targets do not match points");

  const HyperPrior prior = opt.prior.value_or(HyperPrior::for_dimension(d));
  detail::HyperObjective obj{x, y, family, opt.rq_alpha, prior, Eigen::VectorXd(d + 2), Eigen::VectorXd(d + 2)};
  const double ls_hi = std::log(1e3 * std::max(1.0, std::sqrt(static_cast<double>(d))));
  obj.lower.head(d).setConstant(std::log(1e-3));
  obj.upper.head(d).setConstant(ls_hi);
  obj.lower[d] = std::log(1e-3);
  obj.upper[d] = std::log(1e3);
  obj.lower[d + 1] = std::log(opt.noise_floor);
  obj.upper[d + 1] = std::log(10.0);

  Eigen::VectorXd mode(d + 2);
  mode.head(d).setConstant(prior.log_lengthscale_loc);
  mode[d] = prior.log_signal_loc;
  mode[d + 1] = prior.log_noise_loc;
  mode = obj.clamp(mode);

  Eigen::VectorXd best_t = mode;
  if (x.rows() >= 2) {
    std::vector<Eigen::VectorXd> starts{mode};
    if (opt.warm_start && opt.warm_start->size() == d + 2) starts.push_back(obj.clamp(*opt.warm_start));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    while (static_cast<int>(starts.size()) < std::max(1, opt.restarts)) {
      Eigen::VectorXd t(d + 2);
      for (Eigen::Index k = 0; k < d; ++k) t[k] = prior.log_lengthscale_loc + prior.log_lengthscale_scale * normal(rng);
      t[d] = prior.log_signal_loc + prior.log_signal_scale * normal(rng);
      t[d + 1] = prior.log_noise_loc + prior.log_noise_scale * normal(rng);
      starts.push_back(obj.clamp(t));
    }

    std::vector<std::pair<double, std::size_t>> screened;
    for (std::size_t i = 0; i < starts.size(); ++i) screened.emplace_back(obj(starts[i]), i);
    std::stable_sort(screened.begin(), screened.end(), [](auto& a, auto& b) { return a.first > b.first; });

    double best_f = -std::numeric_limits<double>::infinity();
    const auto refine = std::min<std::size_t>(screened.size(), static_cast<std::size_t>(std::max(1, opt.refined_starts)));
    for (std::size_t r = 0; r < refine; ++r) {
      const auto& [f0, idx] = screened[r];
      if (!std::isfinite(f0)) continue;
      auto [t, f] = detail::coordinate_search(obj, starts[idx], f0, opt);
      if (f > best_f) {
        best_f = f;
        best_t = t;
      }
    }
  }

  Hyperparameters out;
  out.kernel = obj.kernel_of(best_t);
  out.noise_variance = std::max(std::exp(best_t[d + 1]), opt.noise_floor);
  out.log_marginal_likelihood = x.rows() > 0 ? obj.log_likelihood(best_t) : 0.0;
  out.log_posterior = out.log_marginal_likelihood + obj.log_prior(best_t);
  return out;
}

/// Log marginal likelihood of data under fixed hyperparameters.
inline double log_marginal_likelihood(const Points& x, const Eigen::VectorXd& y, const KernelSpec& kernel,
                                      double noise_variance) {
  return GpModel::fit(kernel, noise_variance, x, y).log_marginal_likelihood();
}

/// The hyperparameters fit_hyperparams returns for degenerate data.
inline Hyperparameters prior_mode_hyperparams(Eigen::Index dim, KernelFamily family, const FitOptions& opt = {}) {
  Points none(0, dim);
  Eigen::VectorXd y(0);
  return fit_hyperparams(none, y, family, 0, opt);
}

}  // namespace trlse
