#include "trlse/gp.hpp"

#include <gtest/gtest.h>

#include <Eigen/LU>

#include <cmath>
#include <random>

using namespace trlse;

namespace {

KernelSpec random_kernel(KernelFamily family, Eigen::Index d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ls(0.2, 1.5), sv(0.5, 2.0);
  KernelSpec k;
  k.family = family;
  k.lengthscales.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) k.lengthscales[j] = ls(rng);
  k.signal_variance = sv(rng);
  k.rq_alpha = 1.3;
  return k;
}

Eigen::VectorXd random_targets(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = normal(rng);
  return y;
}

// Posterior via an LU solve of the full Gram matrix, no Cholesky involved.
Posterior dense_posterior(const GpModel& m, const Points& q) {
  Eigen::MatrixXd K = kernel_matrix(m.kernel(), m.train_x());
  K.diagonal().array() += m.noise_variance() + m.jitter();
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  const Eigen::MatrixXd ks = kernel_matrix(m.kernel(), m.train_x(), q);
  Posterior p;
  p.mean = ks.transpose() * lu.solve(m.train_y());
  const Eigen::MatrixXd sol = lu.solve(ks);
  p.variance.resize(q.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    p.variance[i] = m.kernel().signal_variance - ks.col(i).dot(sol.col(i));
  return p;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Kernel, ZeroDistanceGivesSignalVariance) {
  for (auto fam : {KernelFamily::Matern52, KernelFamily::RBF, KernelFamily::RationalQuadratic}) {
    KernelSpec k = isotropic_kernel(fam, 3, 0.7, 2.5);
    Eigen::VectorXd a(3);
    a << 0.1, 0.4, 0.9;
    EXPECT_DOUBLE_EQ(kernel_eval(k, a, a), 2.5) << to_string(fam);
  }
}

TEST(Kernel, RbfScalarValue) {
  KernelSpec k = isotropic_kernel(KernelFamily::RBF, 1, 1.0, 1.0);
  Eigen::VectorXd a(1), b(1);
  a << 0.0;
  b << 1.0;
  EXPECT_NEAR(kernel_eval(k, a, b), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(kernel_eval(k, a, b), 0.60653, 1e-5);
}

TEST(Kernel, MaternClosedForm) {
  KernelSpec k = isotropic_kernel(KernelFamily::Matern52, 1, 0.5, 1.0);
  Eigen::VectorXd a(1), b(1);
  a << 0.2;
  b << 0.7;
  const double r = std::sqrt(5.0) * 1.0;  // |a-b|/l = 1
  EXPECT_NEAR(kernel_eval(k, a, b), (1 + r + r * r / 3) * std::exp(-r), 1e-15);
}

TEST(Kernel, RationalQuadraticClosedForm) {
  KernelSpec k = isotropic_kernel(KernelFamily::RationalQuadratic, 2, 1.0, 1.0);
  k.rq_alpha = 2.0;
  Eigen::VectorXd a(2), b(2);
  a << 0.0, 0.0;
  b << 0.6, 0.8;  // r^2 = 1
  EXPECT_NEAR(kernel_eval(k, a, b), std::pow(1.0 + 1.0 / 4.0, -2.0), 1e-15);
}

TEST(Kernel, MaternDecaysMonotonically) {
  KernelSpec k = isotropic_kernel(KernelFamily::Matern52, 1, 0.3, 1.0);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(1), b(1);
  double prev = kernel_eval(k, a, a);
  for (double dist = 0.05; dist < 50.0; dist *= 1.3) {
    b << dist;
    const double v = kernel_eval(k, a, b);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-20);
}

TEST(Kernel, DimensionMismatchThrows) {
  KernelSpec k = isotropic_kernel(KernelFamily::RBF, 2, 1.0);
  Eigen::VectorXd a(3), b(2);
  a.setZero();
  b.setZero();
  try {
    kernel_eval(k, a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Kernel, InvalidLengthscaleRejected) {
  KernelSpec k = isotropic_kernel(KernelFamily::RBF, 2, 1.0);
  k.lengthscales[1] = 0.0;
  EXPECT_THROW(k.validate(), Error);
  k.lengthscales[1] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(k.validate(), Error);
}

TEST(Kernel, GramMatrixIsPositiveSemiDefinite) {
  std::mt19937_64 rng(7);
  for (auto fam : {KernelFamily::Matern52, KernelFamily::RBF, KernelFamily::RationalQuadratic}) {
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::Index d = 1 + rep % 5;
      const KernelSpec k = random_kernel(fam, d, rng);
      const Points x = uniform_points(40, d, rng);
      const Eigen::MatrixXd K = kernel_matrix(k, x);
      EXPECT_TRUE(K.isApprox(K.transpose(), 0.0));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * K.trace());
    }
  }
}

TEST(GpModel, CholeskyReproducesGram) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    const Eigen::Index d = 1 + rep % 5, n = 5 + rep;
    const KernelSpec k = random_kernel(KernelFamily::Matern52, d, rng);
    const Points x = uniform_points(n, d, rng);
    const GpModel m = GpModel::fit(k, 1e-3, x, random_targets(n, rng));
    Eigen::MatrixXd K = kernel_matrix(k, x);
    K.diagonal().array() += 1e-3 + m.jitter();
    const Eigen::MatrixXd L = m.chol_lower();
    EXPECT_LE((L * L.transpose() - K).norm(), 1e-8 * K.norm());
  }
}

TEST(GpModel, MatchesDenseSolveOracle) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::Index d = 1 + rep % 5, n = 1 + rep % 50;
    const auto fam = static_cast<KernelFamily>(rep % 3);
    const KernelSpec k = random_kernel(fam, d, rng);
    const GpModel m = GpModel::fit(k, 1e-2, uniform_points(n, d, rng), random_targets(n, rng));
    const Points q = uniform_points(25, d, rng);
    const Posterior got = m.posterior(q), want = dense_posterior(m, q);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      EXPECT_LE(rel_err(got.mean[i], want.mean[i]), 1e-8);
      EXPECT_LE(rel_err(got.variance[i], std::max(0.0, want.variance[i])), 1e-8);
    }
  }
}

TEST(GpModel, FivePointDenseSolve) {
  std::mt19937_64 rng(5);
  const KernelSpec k = isotropic_kernel(KernelFamily::RBF, 2, 0.4, 1.0);
  const GpModel m = GpModel::fit(k, 0.01, uniform_points(5, 2, rng), random_targets(5, rng));
  const Points q = uniform_points(10, 2, rng);
  const Posterior got = m.posterior(q), want = dense_posterior(m, q);
  EXPECT_LE((got.mean - want.mean).norm(), 1e-8 * std::max(1.0, want.mean.norm()));
  EXPECT_LE((got.variance - want.variance).norm(), 1e-8);
}

TEST(GpModel, NoiselessInterpolation) {
  std::mt19937_64 rng(9);
  const KernelSpec k = isotropic_kernel(KernelFamily::Matern52, 2, 0.3, 1.0);
  const Points x = uniform_points(8, 2, rng);
  const Eigen::VectorXd y = random_targets(8, rng);
  const GpModel m = GpModel::fit(k, 0.0, x, y);
  const Posterior p = m.posterior(x);
  for (Eigen::Index i = 0; i < 8; ++i) {
    EXPECT_NEAR(p.mean[i], y[i], 1e-6);
    EXPECT_NEAR(p.variance[i], 0.0, 1e-6);
  }
}

TEST(GpModel, EmptyModelReturnsPrior) {
  const GpModel m(isotropic_kernel(KernelFamily::RBF, 3, 0.5, 1.7), 0.1);
  std::mt19937_64 rng(1);
  const Posterior p = m.posterior(uniform_points(6, 3, rng));
  EXPECT_TRUE(p.mean.isZero(0.0));
  EXPECT_TRUE((p.variance.array() == 1.7).all());
}

TEST(GpModel, VarianceNeverNegative) {
  std::mt19937_64 rng(21);
  // Near-duplicate inputs with no noise stress the subtraction in the variance.
  Points x = uniform_points(30, 2, rng);
  x.bottomRows(15) = x.topRows(15).array() + 1e-9;
  const GpModel m = GpModel::fit(isotropic_kernel(KernelFamily::RBF, 2, 2.0, 1.0), 0.0, x, random_targets(30, rng));
  Points q(230, 2);
  q << x, uniform_points(200, 2, rng);
  const Posterior p = m.posterior(q);
  EXPECT_GE(p.variance.minCoeff(), 0.0);
}

TEST(GpModel, VarianceBoundedBySignalVariance) {
  std::mt19937_64 rng(22);
  const KernelSpec k = random_kernel(KernelFamily::Matern52, 3, rng);
  const GpModel m = GpModel::fit(k, 0.05, uniform_points(20, 3, rng), random_targets(20, rng));
  const Posterior p = m.posterior(uniform_points(500, 3, rng));
  EXPECT_LE(p.variance.maxCoeff(), k.signal_variance + 1e-12);
}

TEST(GpModel, AddingObservationNeverIncreasesVariance) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::Index d = 1 + rep % 4, n = 1 + rep % 20;
    const KernelSpec k = random_kernel(KernelFamily::Matern52, d, rng);
    const Points x = uniform_points(n + 1, d, rng);
    const Eigen::VectorXd y = random_targets(n + 1, rng);
    const GpModel small = GpModel::fit(k, 0.0, x.topRows(n), y.head(n));
    const GpModel large = GpModel::fit(k, 0.0, x, y);
    const Points q = uniform_points(50, d, rng);
    const Eigen::VectorXd diff = large.posterior(q).variance - small.posterior(q).variance;
    EXPECT_LE(diff.maxCoeff(), 1e-8);
  }
}

TEST(GpModel, SingularGramReportsCondition) {
  Points x(2, 1);
  x << 0.5, std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd y(2);
  y << 0.0, 1.0;
  try {
    GpModel::fit(isotropic_kernel(KernelFamily::RBF, 1, 1.0), 0.0, x, y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingularMatrix);
    EXPECT_NE(std::string(e.what()).find("condition"), std::string::npos);
  }
}

TEST(GpModel, DuplicatePointsFactorizeWithJitter) {
  Points x(3, 1);
  x << 0.5, 0.5, 0.5;
  Eigen::VectorXd y(3);
  y << 1.0, 1.0, 1.0;
  const GpModel m = GpModel::fit(isotropic_kernel(KernelFamily::RBF, 1, 1.0), 0.0, x, y);
  EXPECT_GE(m.jitter(), kJitterMin);
  EXPECT_LE(m.jitter(), kJitterMax);
}

TEST(GpModel, LogMarginalLikelihoodMatchesDense) {
  std::mt19937_64 rng(41);
  const KernelSpec k = random_kernel(KernelFamily::RBF, 2, rng);
  const Points x = uniform_points(12, 2, rng);
  const Eigen::VectorXd y = random_targets(12, rng);
  const GpModel m = GpModel::fit(k, 0.1, x, y);
  Eigen::MatrixXd K = kernel_matrix(k, x);
  K.diagonal().array() += 0.1 + m.jitter();
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  const double want = -0.5 * y.dot(lu.solve(y)) - 0.5 * std::log(lu.determinant()) - 6.0 * std::log(2 * M_PI);
  EXPECT_NEAR(m.log_marginal_likelihood(), want, 1e-9);
}

TEST(SamplePath, ZeroVarianceReturnsMean) {
  Points x(1, 1);
  x << 0.3;
  Eigen::VectorXd y(1);
  y << 0.8;
  const GpModel m = GpModel::fit(isotropic_kernel(KernelFamily::RBF, 1, 0.5), 0.0, x, y);
  const Eigen::VectorXd s = sample_path(m, x, 4);
  // Only the factorization jitter is left as variance.
  const Posterior p = m.posterior(x);
  EXPECT_LE(p.variance[0], 1e-9);
  EXPECT_NEAR(s[0], p.mean[0], 6.0 * std::sqrt(p.variance[0]) + 1e-12);
}

TEST(SamplePath, IdenticalCandidatesGetIdenticalValues) {
  std::mt19937_64 rng(2);
  const GpModel m = GpModel::fit(isotropic_kernel(KernelFamily::Matern52, 2, 0.3), 0.01, uniform_points(5, 2, rng),
                                 random_targets(5, rng));
  Points c(3, 2);
  c << 0.2, 0.9, 0.2, 0.9, 0.6, 0.1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::VectorXd s = sample_path(m, c, seed);
    EXPECT_NEAR(s[0], s[1], 1e-8);
  }
}

TEST(SamplePath, DeterministicGivenSeed) {
  std::mt19937_64 rng(2);
  const GpModel m(isotropic_kernel(KernelFamily::RBF, 2, 0.3), 0.0);
  const Points c = uniform_points(30, 2, rng);
  EXPECT_EQ(sample_path(m, c, 99), sample_path(m, c, 99));
  EXPECT_NE(sample_path(m, c, 99), sample_path(m, c, 100));
}

TEST(SamplePath, MonteCarloMeanMatchesPosterior) {
  std::mt19937_64 rng(8);
  const GpModel m = GpModel::fit(isotropic_kernel(KernelFamily::RBF, 2, 0.3), 0.05, uniform_points(6, 2, rng),
                                 random_targets(6, rng));
  const Points q = uniform_points(1, 2, rng);
  const Posterior p = m.posterior(q);
  double sum = 0.0, sq = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const double v = sample_path(m, q, s)[0];
    sum += v;
    sq += v * v;
  }
  const double mean = sum / 1000.0, var = sq / 1000.0 - mean * mean;
  const double sd = std::sqrt(p.variance[0]);
  EXPECT_LE(std::abs(mean - p.mean[0]), 4.0 * sd / std::sqrt(1000.0));
  EXPECT_NEAR(var, p.variance[0], 0.2 * p.variance[0]);
}

TEST(SamplePath, EmptyCandidatesRejected) {
  const GpModel m(isotropic_kernel(KernelFamily::RBF, 2, 0.3), 0.0);
  EXPECT_THROW(sample_path(m, Points(0, 2), 1), Error);
}

TEST(Standardizer, RoundTrip) {
  std::vector<double> y{3.0, -1.5, 8.25, 100.0, 0.0};
  const Standardizer s = Standardizer::from_targets(y, 4.0);
  for (double v : {-1e3, -2.0, 0.0, 3.7, 1e4}) EXPECT_LE(rel_err(s.inverse(s.transform(v)), v), 1e-12);
}

TEST(Standardizer, ThresholdMapsToPriorMean) {
  std::vector<double> y{1.0, 2.0, 3.0, 4.0, 10.0};
  const double h = 2.5;
  const Standardizer s = Standardizer::from_targets(y, h);
  EXPECT_NEAR(s.internal_threshold, 0.0, 1e-15);
  EXPECT_NEAR(s.transform(h), s.internal_threshold, 1e-15);
  // The sample mean sits where it would after plain standardization, moved by the threshold offset.
  const double mean = 4.0;
  EXPECT_NEAR(s.transform(mean), (mean - h) / s.std, 1e-14);
  std::vector<double> z;
  for (double v : y) z.push_back(s.transform(v));
  double zm = 0, zs = 0;
  for (double v : z) zm += v / 5.0;
  for (double v : z) zs += (v - zm) * (v - zm) / 4.0;
  EXPECT_NEAR(std::sqrt(zs), 1.0, 1e-12);
}

TEST(Standardizer, DegenerateTargets) {
  std::vector<double> y{5.0, 5.0, 5.0};
  const Standardizer s = Standardizer::from_targets(y, 5.0);
  EXPECT_EQ(s.std, 1.0);
  EXPECT_EQ(s.transform(5.0), 0.0);
}

TEST(Standardizer, LabelsAreAffineInvariant) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> y(20);
    for (auto& v : y) v = normal(rng);
    const double h = normal(rng);
    const double a = std::exp(normal(rng)), b = normal(rng) * 10;
    std::vector<double> y2;
    for (double v : y) y2.push_back(a * v + b);
    const Standardizer s1 = Standardizer::from_targets(y, h), s2 = Standardizer::from_targets(y2, a * h + b);
    for (std::size_t i = 0; i < y.size(); ++i) {
      EXPECT_EQ(y[i] >= h, s1.transform(y[i]) >= s1.internal_threshold);
      EXPECT_EQ(s1.transform(y[i]) >= s1.internal_threshold, s2.transform(y2[i]) >= s2.internal_threshold);
    }
  }
}

TEST(FitHyperparams, SingleObservationReturnsPriorModes) {
  Points x(1, 3);
  x << 0.1, 0.5, 0.9;
  Eigen::VectorXd y(1);
  y << 0.4;
  const Hyperparameters h = fit_hyperparams(x, y, KernelFamily::Matern52, 1);
  const HyperPrior p = HyperPrior::for_dimension(3);
  for (Eigen::Index k = 0; k < 3; ++k) EXPECT_NEAR(std::log(h.kernel.lengthscales[k]), p.log_lengthscale_loc, 1e-12);
  EXPECT_NEAR(std::log(h.kernel.signal_variance), p.log_signal_loc, 1e-12);
  EXPECT_NEAR(std::log(h.noise_variance), p.log_noise_loc, 1e-12);
  const Hyperparameters none = prior_mode_hyperparams(3, KernelFamily::Matern52);
  EXPECT_EQ(none.kernel.lengthscales, h.kernel.lengthscales);
}

TEST(FitHyperparams, LengthscalePriorScalesWithDimension) {
  EXPECT_NEAR(HyperPrior::for_dimension(4).log_lengthscale_loc, std::log(1.0), 1e-15);
  EXPECT_NEAR(HyperPrior::for_dimension(100).log_lengthscale_loc, std::log(5.0), 1e-15);
  EXPECT_NEAR(HyperPrior::for_dimension(7).log_lengthscale_scale, std::sqrt(3.0), 1e-15);
}

TEST(FitHyperparams, ConstantTargetsRespectNoiseFloor) {
  std::mt19937_64 rng(4);
  const Points x = uniform_points(10, 2, rng);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(10, 0.3);
  const Hyperparameters h = fit_hyperparams(x, y, KernelFamily::Matern52, 2);
  EXPECT_GE(h.noise_variance, 1e-6);
}

TEST(FitHyperparams, ImprovesOnPriorModes) {
  std::mt19937_64 rng(17);
  const Points x = uniform_points(30, 2, rng);
  Eigen::VectorXd y(30);
  for (Eigen::Index i = 0; i < 30; ++i) y[i] = std::sin(6.0 * x(i, 0)) + 0.5 * std::cos(4.0 * x(i, 1));
  const Hyperparameters fit = fit_hyperparams(x, y, KernelFamily::Matern52, 3);
  const Hyperparameters mode = prior_mode_hyperparams(2, KernelFamily::Matern52);
  EXPECT_GE(fit.log_marginal_likelihood, log_marginal_likelihood(x, y, mode.kernel, mode.noise_variance));
  EXPECT_NEAR(fit.log_marginal_likelihood, log_marginal_likelihood(x, y, fit.kernel, fit.noise_variance), 1e-6);
}

TEST(FitHyperparams, DeterministicGivenSeed) {
  std::mt19937_64 rng(19);
  const Points x = uniform_points(15, 3, rng);
  const Eigen::VectorXd y = random_targets(15, rng);
  const Hyperparameters a = fit_hyperparams(x, y, KernelFamily::RBF, 77);
  const Hyperparameters b = fit_hyperparams(x, y, KernelFamily::RBF, 77);
  EXPECT_EQ(a.kernel.lengthscales, b.kernel.lengthscales);
  EXPECT_EQ(a.kernel.signal_variance, b.kernel.signal_variance);
  EXPECT_EQ(a.noise_variance, b.noise_variance);
}

TEST(FitHyperparams, RecoversShortVersusLongLengthscale) {
  std::mt19937_64 rng(23);
  const Points x = uniform_points(40, 2, rng);
  Eigen::VectorXd y(40);
  for (Eigen::Index i = 0; i < 40; ++i) y[i] = std::sin(12.0 * x(i, 0)) + 0.05 * x(i, 1);
  const Hyperparameters h = fit_hyperparams(x, y, KernelFamily::Matern52, 5);
  EXPECT_LT(h.kernel.lengthscales[0], h.kernel.lengthscales[1]);
}

TEST(FitHyperparams, GoldenSectionFindsParabolaPeak) {
  auto [x, v] = detail::golden_section_max([](double t) { return -(t - 0.3) * (t - 0.3); }, -2.0, 2.0, 60);
  EXPECT_NEAR(x, 0.3, 1e-8);
  EXPECT_NEAR(v, 0.0, 1e-15);
}
