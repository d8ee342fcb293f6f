#pragma once

// The trust-region level set estimation loop, the two baselines it is
// compared against, and the classifier snapshot used to label points.

#include "trlse/acquisition.hpp"
#include "trlse/benchmarks.hpp"
#include "trlse/box_optimizer.hpp"
#include "trlse/error.hpp"
#include "trlse/gp.hpp"
#include "trlse/random.hpp"
#include "trlse/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace trlse {

struct AblationFlags {
  bool random_reinit = false;
  bool single_global_gp = false;
  bool constant_volume = false;
};

struct RunConfig {
  long budget = 300;
  double v_init = 1e-5;
  double v_max = 1e-1;
  int num_regions = 40;
  double beta = kDefaultBeta;
  AcquisitionKind global_acquisition = AcquisitionKind::Straddle;
  AcquisitionKind local_acquisition = AcquisitionKind::Straddle;
  KernelFamily kernel = KernelFamily::Matern52;
  SFunction s_function = SFunction::sigmoid();
  std::uint64_t seed = 0;
  AblationFlags ablation;

  /// Candidates per box search; 0 selects default_budget(d).
  int candidate_budget = 0;
  int thompson_candidates = 512;
  bool polish = true;
  int polish_steps = 40;
  /// Hyperparameters are refit after this many new observations.
  int refit_every = 10;
  FitOptions fit;

  void validate() const {
    if (!(v_init > 0.0) || !(v_init < v_max)) throw Error(ErrorCode::InvalidArgument, "need 0 < v_init < v_max");
    if (num_regions < 1) throw Error(ErrorCode::InvalidArgument, "need at least one region");
    if (budget < num_regions) throw Error(ErrorCode::InvalidArgument, "budget must cover the initial regions");
    if (!(beta >= kMinBeta)) throw Error(ErrorCode::InvalidArgument, "beta must be at least Phi^-1(0.75)");
    if (refit_every < 1) throw Error(ErrorCode::InvalidArgument, "refit_every must be positive");
    for (auto kind : {global_acquisition, local_acquisition})
      if (kind == AcquisitionKind::C2LSE) throw Error(ErrorCode::NotImplemented, "C2LSE acquisition is not available");
  }

  int budget_for(Eigen::Index dim) const { return candidate_budget > 0 ? candidate_budget : default_budget(dim); }
};

/// Keeps a GP's hyperparameters between refits; the factorization is rebuilt
/// on every refresh.
class ModelCache {
 public:
  bool refit_due(Eigen::Index n, int refit_every) const {
    if (!hyper_) return true;
    if (fitted_n_ <= 1 && n >= 2) return true;
    // Small models refit after a quarter more data, large ones every refit_every.
    const Eigen::Index gap = std::clamp<Eigen::Index>(fitted_n_ / 4, 1, refit_every);
    return std::abs(n - fitted_n_) >= gap;
  }

  /// `fallback` is tried as a start when there is no previous fit.
  std::shared_ptr<const GpModel> refresh(const Points& x, const Eigen::VectorXd& y, KernelFamily family,
                                         std::uint64_t seed, const RunConfig& cfg,
                                         const std::optional<Hyperparameters>& fallback = std::nullopt) {
    if (refit_due(x.rows(), cfg.refit_every)) {
      FitOptions opt = cfg.fit;
      if (hyper_) opt.warm_start = hyper_->log_params();
      else if (fallback) opt.warm_start = fallback->log_params();
      hyper_ = fit_hyperparams(x, y, family, seed, opt);
      fitted_n_ = x.rows();
    }
    return rebuild(x, y);
  }

  /// Refactorizes with the current hyperparameters (no refit).
  std::shared_ptr<const GpModel> rebuild(const Points& x, const Eigen::VectorXd& y) const {
    return std::make_shared<const GpModel>(GpModel::fit(hyper_->kernel, hyper_->noise_variance, x, y));
  }

  const std::optional<Hyperparameters>& hyperparameters() const { return hyper_; }

 private:
  std::optional<Hyperparameters> hyper_;
  Eigen::Index fitted_n_ = -1;
};

/// Labels points with the global GP outside every region and, inside, with
/// the containing region's local GP of lowest posterior variance.
struct Classifier {
  struct Region {
    Box box;
    std::shared_ptr<const GpModel> model;
  };

  std::shared_ptr<const GpModel> global_model;
  std::vector<Region> regions;
  double threshold = 0.0;
};

struct Classification {
  /// true = superlevel
  std::vector<bool> superlevel;
  /// Index into Classifier::regions of the deciding model, -1 for the global GP.
  std::vector<int> source;
};

inline Classification classify_detailed(const Classifier& c, const Points& points) {
  const auto n = static_cast<std::size_t>(points.rows());
  Classification out;
  out.superlevel.assign(n, false);
  out.source.assign(n, -1);
  std::vector<double> best_var(n, std::numeric_limits<double>::infinity());
  std::vector<double> mean(n, 0.0);

  for (std::size_t r = 0; r < c.regions.size(); ++r) {
    const auto& region = c.regions[r];
    std::vector<Eigen::Index> inside;
    for (Eigen::Index i = 0; i < points.rows(); ++i)
      if (region.box.contains(points.row(i).transpose())) inside.push_back(i);
    if (inside.empty()) continue;
    Points sub(static_cast<Eigen::Index>(inside.size()), points.cols());
    for (std::size_t j = 0; j < inside.size(); ++j) sub.row(static_cast<Eigen::Index>(j)) = points.row(inside[j]);
    const Posterior post = region.model->posterior(sub);
    for (std::size_t j = 0; j < inside.size(); ++j) {
      const auto i = static_cast<std::size_t>(inside[j]);
      const double v = post.variance[static_cast<Eigen::Index>(j)];
      if (v < best_var[i]) {
        best_var[i] = v;
        mean[i] = post.mean[static_cast<Eigen::Index>(j)];
        out.source[i] = static_cast<int>(r);
      }
    }
  }

  std::vector<Eigen::Index> outside;
  for (std::size_t i = 0; i < n; ++i)
    if (out.source[i] < 0) outside.push_back(static_cast<Eigen::Index>(i));
  if (!outside.empty()) {
    if (!c.global_model) throw Error(ErrorCode::InvalidArgument, "classifier has no global model");
    Points sub(static_cast<Eigen::Index>(outside.size()), points.cols());
    for (std::size_t j = 0; j < outside.size(); ++j) sub.row(static_cast<Eigen::Index>(j)) = points.row(outside[j]);
    const Posterior post = c.global_model->posterior(sub);
    for (std::size_t j = 0; j < outside.size(); ++j)
      mean[static_cast<std::size_t>(outside[j])] = post.mean[static_cast<Eigen::Index>(j)];
  }
  for (std::size_t i = 0; i < n; ++i) out.superlevel[i] = mean[i] >= c.threshold;
  return out;
}

inline std::vector<bool> classify(const Classifier& c, const Points& points) {
  return classify_detailed(c, points).superlevel;
}

/// Per-iteration diagnostics.
struct IterationEvent {
  long iteration = 0;
  long evaluations = 0;
  int reinitializations = 0;
  /// Local acquisition value of the selected point (NaN if no local step ran).
  double local_acquisition = std::numeric_limits<double>::quiet_NaN();
  /// Whether some region centroid had a beta-interval containing h.
  bool feasible = false;
  bool nonnegativity_violation = false;
  /// Global straddle value at the selected local point, before evaluation.
  double global_acquisition_at_local = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t selected_region = 0;
  double min_log_volume = 0.0;
  double max_log_volume = 0.0;
};

enum class EvaluationPhase { Init, Reinit, Local, Random, Straddle };

inline const char* to_string(EvaluationPhase p) {
  switch (p) {
    case EvaluationPhase::Init: return "init";
    case EvaluationPhase::Reinit: return "reinit";
    case EvaluationPhase::Local: return "local";
    case EvaluationPhase::Random: return "random";
    case EvaluationPhase::Straddle: return "straddle";
  }
  return "unknown";
}

struct RunState {
  Points x;
  Eigen::VectorXd y;
  std::vector<EvaluationPhase> phases;
  Standardizer standardizer;
  std::shared_ptr<const GpModel> global_model;
  ModelCache global_cache;
  std::vector<TrustRegion> regions;
  std::vector<ModelCache> region_caches;
  /// Regions ever initialized.
  long n = 0;
  /// Local iterations completed.
  long t = 0;
  bool complete = false;
  long violations = 0;
  /// Global straddle value at every re-initialization centroid, in order.
  std::vector<double> reinit_global_acquisition;
  std::vector<IterationEvent> events;

  long evaluations() const { return static_cast<long>(x.rows()); }
  Eigen::Index dim() const { return x.cols(); }
};

namespace detail {

enum Stream : std::uint64_t {
  kInitStream = 0x1A17,
  kRandomStream = 0x5A3D,
  kCentroidStream,
  kPenaltyStream,
  kLocalStream,
  kGlobalStream,
  kThompsonStream,
  kFitStream,
};

inline void append_observation(RunState& s, const Point& x, double y, EvaluationPhase phase) {
  const Eigen::Index n = s.x.rows();
  s.x.conservativeResize(n + 1, x.size());
  s.x.row(n) = x.transpose();
  s.y.conservativeResize(n + 1);
  s.y[n] = y;
  s.phases.push_back(phase);
}

inline Points rows_of(const Points& x, const std::vector<Eigen::Index>& idx) {
  Points out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t j = 0; j < idx.size(); ++j) out.row(static_cast<Eigen::Index>(j)) = x.row(idx[j]);
  return out;
}

inline Eigen::VectorXd entries_of(const Eigen::VectorXd& y, const std::vector<Eigen::Index>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out[static_cast<Eigen::Index>(j)] = y[idx[j]];
  return out;
}

inline std::vector<Eigen::Index> region_data(const TrustRegion& tr, const Points& x) {
  auto idx = data_window(tr, x);
  if (idx.empty() && x.rows() > 0) {
    Eigen::Index nearest = 0;
    (x.rowwise() - tr.centroid.transpose()).rowwise().squaredNorm().minCoeff(&nearest);
    idx.push_back(nearest);
    if (tr.origin >= 0 && tr.origin < x.rows() && tr.origin != nearest) idx.push_back(tr.origin);
  }
  return idx;
}

inline void fit_local(RunState& s, std::size_t slot, const RunConfig& cfg) {
  auto& tr = s.regions[slot];
  if (cfg.ablation.single_global_gp) {
    tr.local_model = s.global_model;
    return;
  }
  const auto idx = region_data(tr, s.x);
  const Points xw = rows_of(s.x, idx);
  const Eigen::VectorXd yw = s.standardizer.transform(entries_of(s.y, idx));
  tr.local_model = s.region_caches[slot].refresh(
      xw, yw, cfg.kernel, derive_seed({cfg.seed, kFitStream, tr.id, static_cast<std::uint64_t>(s.x.rows())}), cfg,
      s.global_cache.hyperparameters());
}

/// Refreshes the global GP after new data. When the hyperparameter refit is
/// due, the standardization is recomputed and local models are rebuilt on the
/// new scale.
inline void refresh_global(RunState& s, double raw_threshold, const RunConfig& cfg) {
  const bool refit = s.global_cache.refit_due(s.x.rows(), cfg.refit_every);
  if (refit) {
    s.standardizer =
        Standardizer::from_targets(std::span<const double>(s.y.data(), static_cast<std::size_t>(s.y.size())),
                                   raw_threshold);
  }
  const Eigen::VectorXd ys = s.standardizer.transform(s.y);
  s.global_model = s.global_cache.refresh(s.x, ys, cfg.kernel,
                                          derive_seed({cfg.seed, kFitStream, 0, static_cast<std::uint64_t>(s.x.rows())}),
                                          cfg);
  if (cfg.ablation.single_global_gp) {
    for (auto& tr : s.regions) tr.local_model = s.global_model;
    return;
  }
  if (refit) {
    for (std::size_t slot = 0; slot < s.regions.size(); ++slot) {
      if (!s.region_caches[slot].hyperparameters()) continue;
      const auto idx = region_data(s.regions[slot], s.x);
      s.regions[slot].local_model = s.region_caches[slot].rebuild(rows_of(s.x, idx),
                                                                 s.standardizer.transform(entries_of(s.y, idx)));
    }
  }
}

inline BoxQuery query_for(const RunConfig& cfg, Eigen::Index dim, std::uint64_t seed) {
  BoxQuery q;
  q.budget = cfg.budget_for(dim);
  q.seed = seed;
  q.polish = cfg.polish;
  q.polish_steps = cfg.polish_steps;
  return q;
}

inline Points one_row(const Point& p) {
  Points out(1, p.size());
  out.row(0) = p.transpose();
  return out;
}

template <Surrogate Model>
Maximum maximize_acquisition_in_box(const Model& model, const Box& box, const AcquisitionSpec& spec,
                                    const RunConfig& cfg, BoxQuery q) {
  if (spec.kind == AcquisitionKind::Straddle) {
    auto score = [&](const Points& p) -> Eigen::VectorXd { return straddle_scores(model.posterior(p), spec); };
    return maximize_in_box(score, box, q);
  }
  const Points candidates = stack(q.anchors, sobol_candidates(box, cfg.thompson_candidates, q.seed));
  const Eigen::VectorXd scores = thompson_scores(model, candidates, spec, derive_seed({q.seed, kThompsonStream}));
  const Eigen::Index i = argmax_first(scores);
  return {candidates.row(i).transpose(), scores[i]};
}

inline Maximum maximize_acquisition_in_complement(const GpModel& model, const std::vector<Box>& holes,
                                                  const AcquisitionSpec& spec, const RunConfig& cfg,
                                                  const BoxQuery& q) {
  const Box domain = Box::unit(model.dim());
  if (spec.kind == AcquisitionKind::Straddle) {
    auto score = [&](const Points& p) -> Eigen::VectorXd { return straddle_scores(model.posterior(p), spec); };
    return maximize_in_complement(score, domain, holes, q);
  }
  const Points candidates = complement_candidates(domain, holes, cfg.thompson_candidates, q.seed);
  const Eigen::VectorXd scores = thompson_scores(model, candidates, spec, derive_seed({q.seed, kThompsonStream}));
  const Eigen::Index i = argmax_first(scores);
  return {candidates.row(i).transpose(), scores[i]};
}

inline double global_straddle_at(const RunState& s, const Point& x, double beta) {
  const Posterior p = s.global_model->posterior(one_row(x));
  return straddle_score(p.mean[0], std::sqrt(p.variance[0]), {AcquisitionKind::Straddle, beta, s.standardizer.internal_threshold});
}

/// The shared initial design: R uniform points drawn from the run seed.
inline Points initial_design(Eigen::Index dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(derive_seed({seed, kInitStream}));
  return uniform_points(count, dim, rng);
}

}  // namespace detail

/// Draws and evaluates R centroids, builds one cube region of volume V_init
/// around each and fits the global GP on all of them.
inline RunState initialize(const Problem& problem, const RunConfig& cfg) {
  cfg.validate();
  RunState s;
  const Eigen::Index d = problem.dim;
  s.x.resize(0, d);
  s.y.resize(0);
  const Points design = detail::initial_design(d, cfg.num_regions, cfg.seed);
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    const Point c = design.row(i).transpose();
    detail::append_observation(s, c, eval_fn(problem, c, cfg.seed), EvaluationPhase::Init);
  }
  s.region_caches.resize(static_cast<std::size_t>(cfg.num_regions));
  for (int i = 0; i < cfg.num_regions; ++i)
    s.regions.push_back(TrustRegion::isotropic(static_cast<std::uint64_t>(i + 1), design.row(i).transpose(),
                                               std::log(cfg.v_init), 0));
  for (int i = 0; i < cfg.num_regions; ++i) s.regions[static_cast<std::size_t>(i)].origin = i;
  detail::refresh_global(s, problem.threshold, cfg);
  for (std::size_t slot = 0; slot < s.regions.size(); ++slot) detail::fit_local(s, slot, cfg);
  s.n = cfg.num_regions;
  s.t = 0;
  return s;
}

inline bool finished(const RunState& s, const RunConfig& cfg) { return s.complete || s.evaluations() > cfg.budget; }

inline Classifier snapshot(const RunState& s) {
  Classifier c;
  c.global_model = s.global_model;
  c.threshold = s.standardizer.internal_threshold;
  for (const auto& tr : s.regions) c.regions.push_back({tr.box(), tr.local_model});
  return c;
}

/// One pass of the main loop: region updates, re-initialization of regions
/// that shrank below V_init/2, then one local acquisition step. Every
/// evaluation requires |D| <= B beforehand.
inline void step(RunState& s, const Problem& problem, const RunConfig& cfg) {
  if (finished(s, cfg)) {
    s.complete = true;
    return;
  }
  const Eigen::Index d = s.dim();
  const double tau = s.standardizer.internal_threshold;
  const auto iter = static_cast<std::uint64_t>(s.t);
  const SFunction s_fn = cfg.ablation.constant_volume ? SFunction::constant() : cfg.s_function;
  IterationEvent ev;

  // Region updates.
  for (std::size_t slot = 0; slot < s.regions.size(); ++slot) {
    auto& tr = s.regions[slot];
    const GpModel& model = cfg.ablation.single_global_gp ? *s.global_model : *tr.local_model;
    tr.centroid = move_centroid(tr, model, tau, detail::query_for(cfg, d, derive_seed({cfg.seed, detail::kCentroidStream, iter, tr.id})));
    BoxQuery pq = detail::query_for(cfg, d, derive_seed({cfg.seed, detail::kPenaltyStream, iter, tr.id}));
    pq.anchors = detail::one_row(tr.centroid);
    const PenaltyResult pen = penalty(tr, model, cfg.beta, tau, pq);
    tr.log_volume = update_volume(tr, pen.value, s_fn, cfg.v_max);
    tr.log_lengths = update_lengths(tr, model.kernel().lengthscales);
    detail::fit_local(s, slot, cfg);
  }

  // Re-initialization, ascending region id.
  std::vector<std::size_t> order(s.regions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return s.regions[a].id < s.regions[b].id; });
  const AcquisitionSpec global_spec{cfg.global_acquisition, cfg.beta, tau};
  for (std::size_t slot : order) {
    if (!s.regions[slot].flagged_for_discard(cfg.v_init)) continue;
    if (finished(s, cfg)) break;
    std::vector<Box> holes;
    for (std::size_t other = 0; other < s.regions.size(); ++other)
      if (other != slot) holes.push_back(s.regions[other].box());
    const std::uint64_t seed = derive_seed({cfg.seed, detail::kGlobalStream, static_cast<std::uint64_t>(s.n)});
    Point centroid;
    if (cfg.ablation.random_reinit) {
      centroid = complement_candidates(Box::unit(d), holes, 1, seed).row(0).transpose();
    } else {
      centroid = detail::maximize_acquisition_in_complement(*s.global_model, holes, global_spec, cfg,
                                                            detail::query_for(cfg, d, seed))
                     .x;
    }
    s.reinit_global_acquisition.push_back(detail::global_straddle_at(s, centroid, cfg.beta));
    detail::append_observation(s, centroid, eval_fn(problem, centroid, cfg.seed), EvaluationPhase::Reinit);
    ++s.n;
    s.regions[slot] = TrustRegion::isotropic(static_cast<std::uint64_t>(s.n), centroid, std::log(cfg.v_init), s.t);
    s.regions[slot].origin = s.x.rows() - 1;
    s.region_caches[slot] = ModelCache{};
    detail::refresh_global(s, problem.threshold, cfg);
    detail::fit_local(s, slot, cfg);
    ++ev.reinitializations;
  }

  auto record = [&] {
    ev.iteration = s.t;
    ev.evaluations = s.evaluations();
    ev.min_log_volume = std::numeric_limits<double>::infinity();
    ev.max_log_volume = -std::numeric_limits<double>::infinity();
    for (const auto& tr : s.regions) {
      ev.min_log_volume = std::min(ev.min_log_volume, tr.log_volume);
      ev.max_log_volume = std::max(ev.max_log_volume, tr.log_volume);
    }
    s.events.push_back(ev);
  };

  if (finished(s, cfg)) {
    s.complete = true;
    record();
    return;
  }

  // Local selection across all regions.
  const double tau_now = s.standardizer.internal_threshold;
  const AcquisitionSpec local_spec{cfg.local_acquisition, cfg.beta, tau_now};
  Maximum best;
  std::size_t best_slot = order.front();
  bool feasible = false;
  for (std::size_t slot : order) {
    const auto& tr = s.regions[slot];
    const GpModel& model = cfg.ablation.single_global_gp ? *s.global_model : *tr.local_model;
    const Posterior at_centroid = model.posterior(detail::one_row(tr.centroid));
    if (interval_contains_threshold(at_centroid.mean[0], std::sqrt(at_centroid.variance[0]), local_spec))
      feasible = true;
    BoxQuery q = detail::query_for(cfg, d, derive_seed({cfg.seed, detail::kLocalStream, iter, tr.id}));
    q.anchors = detail::one_row(tr.centroid);
    const Maximum m = detail::maximize_acquisition_in_box(model, tr.box(), local_spec, cfg, q);
    if (m.value > best.value) {
      best = m;
      best_slot = slot;
    }
  }
  ev.local_acquisition = best.value;
  ev.feasible = feasible;
  ev.selected_region = s.regions[best_slot].id;
  ev.global_acquisition_at_local = detail::global_straddle_at(s, best.x, cfg.beta);
  if (cfg.local_acquisition == AcquisitionKind::Straddle && feasible && best.value < 0.0) {
    ev.nonnegativity_violation = true;
    ++s.violations;
  }
  detail::append_observation(s, best.x, eval_fn(problem, best.x, cfg.seed), EvaluationPhase::Local);
  detail::refresh_global(s, problem.threshold, cfg);
  ++s.t;
  record();
  if (finished(s, cfg)) s.complete = true;
}

enum class MethodKind { Trlse, Random, Straddle };

inline const char* to_string(MethodKind m) {
  switch (m) {
    case MethodKind::Trlse: return "trlse";
    case MethodKind::Random: return "random";
    case MethodKind::Straddle: return "straddle";
  }
  return "unknown";
}

inline MethodKind parse_method(const std::string& name) {
  if (name == "trlse") return MethodKind::Trlse;
  if (name == "random") return MethodKind::Random;
  if (name == "straddle" || name == "str") return MethodKind::Straddle;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
}

/// Uniform interface over TRLSE and the baselines for the experiment runner.
class Method {
 public:
  virtual ~Method() = default;
  virtual MethodKind kind() const = 0;
  virtual bool done() const = 0;
  virtual void step() = 0;
  /// Non-const: baselines refresh their GP lazily.
  virtual Classifier classifier() = 0;
  virtual long iteration() const = 0;
  virtual long live_regions() const = 0;
  virtual long regions_initialized() const = 0;
  virtual const RunState& state() const = 0;
};

class TrlseMethod final : public Method {
 public:
  TrlseMethod(Problem problem, RunConfig cfg)
      : problem_(std::move(problem)), cfg_(std::move(cfg)), state_(initialize(problem_, cfg_)) {}

  MethodKind kind() const override { return MethodKind::Trlse; }
  bool done() const override { return finished(state_, cfg_); }
  void step() override { trlse::step(state_, problem_, cfg_); }
  Classifier classifier() override { return snapshot(state_); }
  long iteration() const override { return state_.t; }
  long live_regions() const override { return static_cast<long>(state_.regions.size()); }
  long regions_initialized() const override { return state_.n; }
  const RunState& state() const override { return state_; }

 private:
  Problem problem_;
  RunConfig cfg_;
  RunState state_;
};

/// Random sampling or global Straddle with a single GP. Both start from the
/// same initial design as TRLSE and stop at exactly B evaluations.
class BaselineMethod final : public Method {
 public:
  BaselineMethod(MethodKind kind, Problem problem, RunConfig cfg)
      : kind_(kind), problem_(std::move(problem)), cfg_(std::move(cfg)),
        rng_(derive_seed({cfg_.seed, detail::kRandomStream})) {
    if (kind_ == MethodKind::Trlse) throw Error(ErrorCode::InvalidArgument, "BaselineMethod cannot run trlse");
    cfg_.validate();
    const Points design = detail::initial_design(problem_.dim, cfg_.num_regions, cfg_.seed);
    state_.x.resize(0, problem_.dim);
    for (Eigen::Index i = 0; i < design.rows(); ++i) {
      const Point c = design.row(i).transpose();
      detail::append_observation(state_, c, eval_fn(problem_, c, cfg_.seed), EvaluationPhase::Init);
    }
    state_.n = 0;
  }

  MethodKind kind() const override { return kind_; }
  bool done() const override { return state_.evaluations() >= cfg_.budget; }

  void step() override {
    if (done()) return;
    const Eigen::Index d = problem_.dim;
    Point next;
    EvaluationPhase phase = EvaluationPhase::Random;
    if (kind_ == MethodKind::Random) {
      next = uniform_points(1, d, rng_).row(0).transpose();
    } else {
      phase = EvaluationPhase::Straddle;
      ensure_model();
      const AcquisitionSpec spec{AcquisitionKind::Straddle, cfg_.beta, state_.standardizer.internal_threshold};
      const auto& model = *state_.global_model;
      auto score = [&](const Points& p) -> Eigen::VectorXd { return straddle_scores(model.posterior(p), spec); };
      next = maximize_in_box(score, Box::unit(d),
                             detail::query_for(cfg_, d, derive_seed({cfg_.seed, detail::kGlobalStream,
                                                                     static_cast<std::uint64_t>(state_.t)})))
                 .x;
    }
    detail::append_observation(state_, next, eval_fn(problem_, next, cfg_.seed), phase);
    ++state_.t;
    model_stale_ = true;
  }

  Classifier classifier() override {
    ensure_model();
    Classifier c;
    c.global_model = state_.global_model;
    c.threshold = state_.standardizer.internal_threshold;
    return c;
  }

  long iteration() const override { return state_.t; }
  long live_regions() const override { return 0; }
  long regions_initialized() const override { return 0; }
  const RunState& state() const override { return state_; }

 private:
  void ensure_model() {
    if (!model_stale_ && state_.global_model) return;
    detail::refresh_global(state_, problem_.threshold, cfg_);
    model_stale_ = false;
  }

  MethodKind kind_;
  Problem problem_;
  RunConfig cfg_;
  RunState state_;
  std::mt19937_64 rng_;
  bool model_stale_ = true;
};

inline std::unique_ptr<Method> make_method(MethodKind kind, const Problem& problem, const RunConfig& cfg) {
  if (kind == MethodKind::Trlse) return std::make_unique<TrlseMethod>(problem, cfg);
  return std::make_unique<BaselineMethod>(kind, problem, cfg);
}

/// Runs a method to completion and returns its final state.
inline RunState run_to_completion(Method& m) {
  while (!m.done()) m.step();
  return m.state();
}

inline RunState run_baseline(MethodKind kind, const Problem& problem, const RunConfig& cfg) {
  BaselineMethod m(kind, problem, cfg);
  return run_to_completion(m);
}

inline RunState run_trlse(const Problem& problem, const RunConfig& cfg) {
  RunState s = initialize(problem, cfg);
  while (!finished(s, cfg)) step(s, problem, cfg);
  s.complete = true;
  return s;
}

}  // namespace trlse
