#pragma once

// Derivative-free search over axis-aligned boxes and over the complement of a
// union of boxes. Every argmax/argmin in the trust-region loop goes through
// here. Scores are evaluated in batches: a score is any callable mapping an
// (m x d) point matrix to m values.

#include "trlse/error.hpp"
#include "trlse/gp.hpp"
#include "trlse/random.hpp"

#include <boost/random/sobol.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace trlse {

struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Box unit(Eigen::Index dim) {
    return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
  }

  Eigen::Index dim() const { return lower.size(); }

  void validate() const {
    if (lower.size() != upper.size()) throw Error(ErrorCode::DimensionMismatch, "box bounds differ in dimension");
    if ((upper.array() < lower.array()).any()) throw Error(ErrorCode::InvalidArgument, "box has lower > upper");
  }

  /// Closed membership test.
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
  }

  Box clipped_to_unit() const { return {lower.cwiseMax(0.0).cwiseMin(1.0), upper.cwiseMax(0.0).cwiseMin(1.0)}; }

  Eigen::VectorXd width() const { return upper - lower; }

  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
};

template <class F>
concept BatchScore = requires(F f, const Points& p) {
  { f(p) } -> std::convertible_to<Eigen::VectorXd>;
};

template <class M>
concept Surrogate = requires(const M& m, const Points& p) {
  { m.posterior(p) } -> std::convertible_to<Posterior>;
};

inline int default_budget(Eigen::Index dim) {
  return static_cast<int>(std::min(4096.0, 512.0 * std::sqrt(static_cast<double>(dim))));
}

struct BoxQuery {
  int budget = 512;
  std::uint64_t seed = 0;
  bool polish = true;
  int polish_steps = 40;
  /// Evaluated ahead of the generated candidates (e.g. the current centroid).
  Points anchors;

  static BoxQuery defaults(Eigen::Index dim, std::uint64_t seed) {
    BoxQuery q;
    q.budget = default_budget(dim);
    q.seed = seed;
    return q;
  }
};

struct Maximum {
  Point x;
  double value = -std::numeric_limits<double>::infinity();
};

/// Sobol points with a seeded random shift (mod 1), mapped into the box. For a
/// fixed seed the first n points of a longer request equal a shorter request.
inline Points sobol_candidates(const Box& box, int count, std::uint64_t seed) {
  const Eigen::Index d = box.dim();
  Points out(count, d);
  if (count <= 0) return out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd shift(d);
  for (Eigen::Index k = 0; k < d; ++k) shift[k] = unif(rng);

  boost::random::sobol engine(static_cast<std::size_t>(d));
  static_assert(boost::random::sobol::max() == std::numeric_limits<std::uint64_t>::max());
  const Eigen::VectorXd width = box.width();
  for (int i = 0; i < count; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      double v = std::ldexp(static_cast<double>(engine()), -64) + shift[k];
      v -= std::floor(v);
      out(i, k) = box.lower[k] + v * width[k];
    }
  }
  return out;
}

namespace detail {

inline Eigen::Index argmax_first(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

inline Points stack(const Points& top, const Points& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  Points out(top.rows() + bottom.rows(), bottom.cols());
  out << top, bottom;
  return out;
}

// Best-improvement coordinate pattern search. Step starts at 10% of the box
// width per axis and halves after every step without improvement.
template <class Score, class Feasible>
void polish(Score&& score, const Box& box, Maximum& best, int steps, Feasible&& feasible) {
  const Eigen::Index d = box.dim();
  Eigen::VectorXd step = 0.1 * box.width();
  Points trials(2 * d, d);
  for (int s = 0; s < steps; ++s) {
    Eigen::Index m = 0;
    for (Eigen::Index k = 0; k < d; ++k) {
      if (!(step[k] > 0.0)) continue;
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd x = best.x;
        x[k] = std::clamp(x[k] + sign * step[k], box.lower[k], box.upper[k]);
        if (x[k] == best.x[k]) continue;
        trials.row(m++) = x.transpose();
      }
    }
    if (m == 0) break;
    const Points batch = trials.topRows(m);
    Eigen::VectorXd values = score(batch);
    for (Eigen::Index i = 0; i < m; ++i)
      if (!feasible(batch.row(i).transpose())) values[i] = -std::numeric_limits<double>::infinity();
    const Eigen::Index j = argmax_first(values);
    if (values[j] > best.value) {
      best.x = batch.row(j).transpose();
      best.value = values[j];
    } else {
      step *= 0.5;
    }
  }
}

}  // namespace detail

/// True when `x` lies outside every (closed) box in `holes`.
inline bool outside_all(const std::vector<Box>& holes, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return std::none_of(holes.begin(), holes.end(), [&x](const Box& h) { return h.contains(x); });
}

/// Uniform draws over `domain` with hole rejection. Draws at most 10x `count`
/// points and returns the accepted ones; throws Infeasible if none survive.
inline Points complement_candidates(const Box& domain, const std::vector<Box>& holes, int count, std::uint64_t seed) {
  const Eigen::Index d = domain.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const long max_draws = 10L * count;
  Points candidates(count, d);
  Eigen::Index accepted = 0;
  Eigen::VectorXd x(d);
  for (long draw = 0; draw < max_draws && accepted < count; ++draw) {
    for (Eigen::Index k = 0; k < d; ++k) x[k] = domain.lower[k] + unif(rng) * (domain.upper[k] - domain.lower[k]);
    if (outside_all(holes, x)) candidates.row(accepted++) = x.transpose();
  }
  if (accepted == 0)
    throw Error(ErrorCode::Infeasible, "no candidate outside the " + std::to_string(holes.size()) +
                                           " excluded boxes after " + std::to_string(max_draws) + " draws");
  return candidates.topRows(accepted);
}

/// Maximizes `score` over the box. Anchors come first, then quasi-random
/// candidates; the lowest index wins ties. The returned value is never below
/// the best raw candidate.
template <BatchScore Score>
Maximum maximize_in_box(Score&& score, const Box& box, const BoxQuery& q) {
  box.validate();
  if (q.budget < 1) throw Error(ErrorCode::InvalidArgument, "candidate budget must be at least 1");
  if (q.anchors.rows() > 0 && q.anchors.cols() != box.dim())
    throw Error(ErrorCode::DimensionMismatch, "anchor dimension does not match box");
  const Points candidates = detail::stack(q.anchors, sobol_candidates(box, q.budget, q.seed));
  const Eigen::VectorXd values = score(candidates);
  const Eigen::Index i = detail::argmax_first(values);
  Maximum best{candidates.row(i).transpose(), values[i]};
  if (q.polish) detail::polish(score, box, best, q.polish_steps, [](const auto&) { return true; });
  return best;
}

/// Maximizes `score` over `domain` minus the union of `holes` (closed boxes).
///
/// Candidates are uniform draws with hole rejection; up to 10x the budget is
/// drawn. Throws Infeasible only when no draw lands outside the holes.
template <BatchScore Score>
Maximum maximize_in_complement(Score&& score, const Box& domain, const std::vector<Box>& holes, const BoxQuery& q) {
  domain.validate();
  if (q.budget < 1) throw Error(ErrorCode::InvalidArgument, "candidate budget must be at least 1");
  auto outside = [&holes](const Eigen::Ref<const Eigen::VectorXd>& x) { return outside_all(holes, x); };
  const Points feasible = complement_candidates(domain, holes, q.budget, q.seed);
  const Eigen::VectorXd values = score(feasible);
  const Eigen::Index i = detail::argmax_first(values);
  Maximum best{feasible.row(i).transpose(), values[i]};
  if (q.polish) detail::polish(score, domain, best, q.polish_steps, outside);
  return best;
}

struct ConfidenceExtremes {
  double lcb_min = 0.0;
  double ucb_max = 0.0;
  Point lcb_argmin;
  Point ucb_argmax;
};

/// min over the box of mu - beta*sigma and max of mu + beta*sigma, sharing
/// one candidate set between the two searches.
template <Surrogate Model>
ConfidenceExtremes extremize_confidence_bounds(const Model& model, const Box& box, double beta, const BoxQuery& q) {
  box.validate();
  if (q.budget < 1) throw Error(ErrorCode::InvalidArgument, "candidate budget must be at least 1");
  const Points candidates = detail::stack(q.anchors, sobol_candidates(box, q.budget, q.seed));
  const Posterior post = model.posterior(candidates);
  const Eigen::VectorXd sd = post.variance.array().sqrt();
  const Eigen::VectorXd neg_lcb = -(post.mean - beta * sd);
  const Eigen::VectorXd ucb = post.mean + beta * sd;

  auto neg_lcb_score = [&](const Points& p) -> Eigen::VectorXd {
    const Posterior pp = model.posterior(p);
    return -(pp.mean - beta * pp.variance.cwiseSqrt());
  };
  auto ucb_score = [&](const Points& p) -> Eigen::VectorXd {
    const Posterior pp = model.posterior(p);
    return pp.mean + beta * pp.variance.cwiseSqrt();
  };

  const Eigen::Index il = detail::argmax_first(neg_lcb);
  const Eigen::Index iu = detail::argmax_first(ucb);
  Maximum lo{candidates.row(il).transpose(), neg_lcb[il]};
  Maximum hi{candidates.row(iu).transpose(), ucb[iu]};
  if (q.polish) {
    auto any = [](const auto&) { return true; };
    detail::polish(neg_lcb_score, box, lo, q.polish_steps, any);
    detail::polish(ucb_score, box, hi, q.polish_steps, any);
  }
  ConfidenceExtremes out{-lo.value, hi.value, lo.x, hi.x};
  // lcb <= ucb pointwise, so this only guards against rounding.
  if (out.lcb_min > out.ucb_max) out.lcb_min = out.ucb_max;
  return out;
}

}  // namespace trlse
