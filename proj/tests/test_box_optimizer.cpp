#include "trlse/box_optimizer.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace trlse;

namespace {

Box box1(double lo, double hi) {
  Box b{Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi)};
  return b;
}

BoxQuery query(int budget, std::uint64_t seed, bool polish = true) {
  BoxQuery q;
  q.budget = budget;
  q.seed = seed;
  q.polish = polish;
  return q;
}

}  // namespace

TEST(Box, Geometry) {
  Box b{Eigen::Vector2d(-0.5, 0.2), Eigen::Vector2d(0.5, 1.4)};
  EXPECT_TRUE(b.contains(Eigen::Vector2d(0.5, 0.2)));
  EXPECT_FALSE(b.contains(Eigen::Vector2d(0.51, 0.2)));
  const Box c = b.clipped_to_unit();
  EXPECT_EQ(c.lower, Eigen::Vector2d(0.0, 0.2));
  EXPECT_EQ(c.upper, Eigen::Vector2d(0.5, 1.0));
  EXPECT_THROW((Box{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)}.validate()), Error);
}

TEST(Sobol, CandidatesInsideBoxAndNested) {
  Box b{Eigen::Vector3d(0.1, 0.2, 0.3), Eigen::Vector3d(0.4, 0.9, 0.35)};
  const Points small = sobol_candidates(b, 100, 7), large = sobol_candidates(b, 400, 7);
  for (Eigen::Index i = 0; i < large.rows(); ++i) EXPECT_TRUE(b.contains(large.row(i).transpose()));
  EXPECT_EQ(small, large.topRows(100));
  EXPECT_NE(sobol_candidates(b, 100, 8), small);
}

TEST(Sobol, FillsTheBox) {
  for (Eigen::Index d : {1, 2, 5}) {
    const Points p = sobol_candidates(Box::unit(d), 256, 3);
    for (Eigen::Index k = 0; k < d; ++k) {
      // 256 points of a shifted (0,m,s)-net leave no gap wider than a few strata.
      std::vector<double> col(p.col(k).data(), p.col(k).data() + p.rows());
      std::sort(col.begin(), col.end());
      double gap = col.front() + 1.0 - col.back();
      for (std::size_t i = 1; i < col.size(); ++i) gap = std::max(gap, col[i] - col[i - 1]);
      EXPECT_LE(gap, 4.0 / 256.0) << d << " " << k;
    }
  }
}

TEST(Sobol, HighDimensionSupported) {
  const Points p = sobol_candidates(Box::unit(1000), 4, 1);
  EXPECT_EQ(p.cols(), 1000);
  EXPECT_GE(p.minCoeff(), 0.0);
  EXPECT_LE(p.maxCoeff(), 1.0);
}

TEST(MaximizeInBox, ConstantScoreReturnsFirstCandidate) {
  const Box b = Box::unit(2);
  auto score = [](const Points& p) -> Eigen::VectorXd { return Eigen::VectorXd::Constant(p.rows(), 3.0); };
  const Maximum m = maximize_in_box(score, b, query(64, 5));
  EXPECT_EQ(m.value, 3.0);
  EXPECT_EQ(m.x, sobol_candidates(b, 64, 5).row(0).transpose());
}

TEST(MaximizeInBox, AnchorsComeFirst) {
  const Box b = Box::unit(2);
  auto score = [](const Points& p) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(p.rows()); };
  BoxQuery q = query(16, 1);
  q.anchors = Points(1, 2);
  q.anchors << 0.25, 0.75;
  EXPECT_EQ(maximize_in_box(score, b, q).x, Eigen::Vector2d(0.25, 0.75));
}

TEST(MaximizeInBox, QuadraticOptimum) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index d = 1 + rep % 4;
    const Eigen::VectorXd c = uniform_points(1, d, rng).row(0).transpose() * 0.8 + Eigen::VectorXd::Constant(d, 0.1);
    auto score = [&](const Points& p) -> Eigen::VectorXd {
      return -(p.rowwise() - c.transpose()).rowwise().squaredNorm();
    };
    const Maximum m = maximize_in_box(score, Box::unit(d), query(2048, rep));
    EXPECT_LE((m.x - c).cwiseAbs().maxCoeff(), 1e-2);
  }
}

TEST(MaximizeInBox, ValueAtLeastBestRawCandidate) {
  const Box b = box1(0.0, 1.0);
  auto score = [](const Points& p) -> Eigen::VectorXd { return -(p.col(0).array() - 0.3).abs().matrix(); };
  const Points cand = sobol_candidates(b, 2048, 9);
  const double best_raw = score(cand).maxCoeff();
  EXPECT_GE(maximize_in_box(score, b, query(2048, 9)).value, best_raw);
  EXPECT_GE(maximize_in_box(score, b, query(2048, 9, false)).value, best_raw);
}

TEST(MaximizeInBox, MonotoneInBudget) {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Index d = 2 + rep % 3;
    const Eigen::VectorXd w = uniform_points(1, d, rng).row(0).transpose() * 20.0;
    auto score = [&](const Points& p) -> Eigen::VectorXd {
      return (p * w).array().sin().matrix() + p.rowwise().squaredNorm();
    };
    double prev = -std::numeric_limits<double>::infinity();
    for (int budget = 16; budget <= 1024; budget *= 2) {
      const double v = maximize_in_box(score, Box::unit(d), query(budget, rep, false)).value;
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(MaximizeInBox, Deterministic) {
  auto score = [](const Points& p) -> Eigen::VectorXd { return (3.0 * p.col(0)).array().sin() * p.col(1).array(); };
  const Maximum a = maximize_in_box(score, Box::unit(2), query(128, 11));
  const Maximum b = maximize_in_box(score, Box::unit(2), query(128, 11));
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.value, b.value);
}

TEST(MaximizeInBox, InvalidBudget) {
  auto score = [](const Points& p) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(p.rows()); };
  EXPECT_THROW(maximize_in_box(score, Box::unit(2), query(0, 1)), Error);
}

TEST(Complement, NoHolesMatchesBoxBehaviour) {
  auto score = [](const Points& p) -> Eigen::VectorXd { return -(p.col(0).array() - 0.62).abs().matrix(); };
  const Maximum m = maximize_in_complement(score, Box::unit(1), {}, query(512, 2));
  EXPECT_NEAR(m.x[0], 0.62, 1e-3);
}

TEST(Complement, HoleCoveringLeftHalf) {
  auto score = [](const Points& p) -> Eigen::VectorXd { return -p.col(0); };
  const std::vector<Box> holes{box1(0.0, 0.5)};
  const Maximum m = maximize_in_complement(score, Box::unit(1), holes, query(512, 3));
  EXPECT_GT(m.x[0], 0.5);
  EXPECT_NEAR(m.x[0], 0.5, 1e-2);
  // Grid oracle: best feasible grid value is at the first grid point right of the hole.
  double best = -1e9;
  for (int i = 0; i <= 10000; ++i) {
    const double x = i / 10000.0;
    if (x > 0.5) best = std::max(best, -x);
  }
  EXPECT_GE(m.value, best - 1e-2);
}

TEST(Complement, NeverReturnsPointInsideHole) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index d = 2;
    std::vector<Box> holes;
    for (int h = 0; h < 6; ++h) {
      const Eigen::VectorXd c = uniform_points(1, d, rng).row(0).transpose();
      holes.push_back(Box{c.array() - 0.15, c.array() + 0.15}.clipped_to_unit());
    }
    const Eigen::VectorXd target = uniform_points(1, d, rng).row(0).transpose();
    auto score = [&](const Points& p) -> Eigen::VectorXd {
      return -(p.rowwise() - target.transpose()).rowwise().squaredNorm();
    };
    const Maximum m = maximize_in_complement(score, Box::unit(d), holes, query(256, rep));
    EXPECT_TRUE(outside_all(holes, m.x));
  }
}

TEST(Complement, FullyCoveredDomainIsInfeasible) {
  auto score = [](const Points& p) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(p.rows()); };
  try {
    maximize_in_complement(score, Box::unit(2), {Box::unit(2)}, query(16, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Infeasible);
  }
}

TEST(ConfidenceBounds, PriorOnlyModelIsSymmetric) {
  const GpModel m(isotropic_kernel(KernelFamily::RBF, 2, 0.3, 4.0), 0.0);
  const ConfidenceExtremes e = extremize_confidence_bounds(m, Box::unit(2), 1.96, query(64, 1));
  EXPECT_NEAR(e.lcb_min, -1.96 * 2.0, 1e-12);
  EXPECT_NEAR(e.ucb_max, 1.96 * 2.0, 1e-12);
}

TEST(ConfidenceBounds, ZeroVarianceConstantModel) {
  struct Constant {
    Posterior posterior(const Points& p) const {
      return {Eigen::VectorXd::Constant(p.rows(), 0.7), Eigen::VectorXd::Zero(p.rows())};
    }
  };
  const ConfidenceExtremes e = extremize_confidence_bounds(Constant{}, Box::unit(3), 1.96, query(32, 2));
  EXPECT_DOUBLE_EQ(e.lcb_min, 0.7);
  EXPECT_DOUBLE_EQ(e.ucb_max, 0.7);
}

TEST(ConfidenceBounds, MatchesGridScanIn1D) {
  Points x(5, 1);
  x << 0.05, 0.3, 0.45, 0.7, 0.95;
  Eigen::VectorXd y(5);
  y << 0.3, -1.0, 0.4, 1.2, -0.2;
  const GpModel m = GpModel::fit(isotropic_kernel(KernelFamily::Matern52, 1, 0.15), 1e-3, x, y);
  const Box b = box1(0.2, 0.8);
  Points grid(6001, 1);
  for (int i = 0; i <= 6000; ++i) grid(i, 0) = 0.2 + 0.6 * i / 6000.0;
  const Posterior p = m.posterior(grid);
  const Eigen::VectorXd sd = p.variance.cwiseSqrt();
  const double lcb = (p.mean - 1.96 * sd).minCoeff(), ucb = (p.mean + 1.96 * sd).maxCoeff();
  const ConfidenceExtremes e = extremize_confidence_bounds(m, b, 1.96, query(256, 4));
  EXPECT_NEAR(e.lcb_min, lcb, 1e-2);
  EXPECT_NEAR(e.ucb_max, ucb, 1e-2);
  EXPECT_LE(e.lcb_min, e.ucb_max);
}

TEST(DefaultBudget, Values) {
  EXPECT_EQ(default_budget(1), 512);
  EXPECT_EQ(default_budget(4), 1024);
  EXPECT_EQ(default_budget(100), 4096);
}
