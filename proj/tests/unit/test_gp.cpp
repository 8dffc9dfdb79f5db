#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ivar/gp.hpp"
#include "support.hpp"

using namespace ivar;
using testing_support::uniform_points;

namespace {

Design make_design(const PointSet& x, const Eigen::VectorXd& y) {
  Design d;
  d.points = x;
  d.observations = y;
  return d;
}

}  // namespace

TEST(GpFit, SinglePointInterpolation) {
  const Kernel k = Kernel::squared_exponential(2, 0.3);
  PointSet x(2, 1);
  x << 0.1, -0.2;
  const auto post = fit(k, make_design(x, Eigen::VectorXd::Constant(1, 3.0)), 0.0);
  ASSERT_EQ(post.alpha().size(), 1);
  EXPECT_NEAR(post.alpha()(0), 3.0, 1e-14);
  EXPECT_NEAR(posterior_mean(post, x.col(0)), 3.0, 1e-14);
}

TEST(GpFit, SymmetricPair) {
  const Kernel k = Kernel::squared_exponential(1, 0.5);
  PointSet x(1, 2);
  x << -0.4, 0.4;
  const auto post = fit(k, make_design(x, Eigen::Vector2d(2.0, 2.0)), 0.0);
  EXPECT_NEAR(post.alpha()(0), post.alpha()(1), 1e-14);
  EXPECT_NEAR(post.mean(Eigen::VectorXd::Constant(1, 0.3)), post.mean(Eigen::VectorXd::Constant(1, -0.3)), 1e-14);
}

TEST(GpFit, InterpolatesWithTinyNugget) {
  std::mt19937_64 rng(1);
  const Kernel k = Kernel::squared_exponential(2, 0.5);
  const PointSet x = uniform_points(rng, 2, 3, -1.0, 1.0);
  const Eigen::VectorXd y = Eigen::Vector3d(0.3, -1.2, 2.5);
  const auto post = fit(k, make_design(x, y), 1e-10);
  for (int i = 0; i < 3; ++i) EXPECT_LE(std::abs(post.mean(x.col(i)) - y(i)), 1e-6);
}

TEST(GpFit, RejectsMissingObservations) {
  Design d;
  d.points = PointSet::Zero(1, 2);
  EXPECT_THROW(fit(Kernel::squared_exponential(1, 1.0), d, 0.0), ConfigError);
}

TEST(GpFit, IllConditionedErrorNamesEigenvalue) {
  // Exact duplicates with no nugget: singular even after jitter? The jitter
  // rescues rank deficiency, so use a non-finite-free indefinite construction:
  // a finite-rank kernel with a rank below N and zero nugget.
  Eigen::VectorXd lambda(1);
  lambda << 1.0;
  const Kernel k = Kernel::finite_rank(std::make_shared<FiniteEigenSystem>(lambda, hermite_basis(1)));
  PointSet x(1, 3);
  x << 0.0, 0.5, 1.0;
  // rank-one Gram of ones: jitter 1e-10 makes it positive definite, so this fits
  EXPECT_NO_THROW(GpPosterior::condition(k, x, 0.0));
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  try {
    SpdFactor::factorize(bad);
    FAIL() << "expected failure";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("ill-conditioned covariance"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("min eigenvalue"), std::string::npos);
  }
}

TEST(GpMean, FarFieldRevertsToPriorMean) {
  const Kernel k = Kernel::squared_exponential(1, 0.1);
  PointSet x(1, 3);
  x << -0.2, 0.0, 0.3;
  const auto post = fit(k, make_design(x, Eigen::Vector3d(1.0, -2.0, 4.0)), 1e-10, 0.7);
  EXPECT_NEAR(post.mean(Eigen::VectorXd::Constant(1, 5.0)), 0.7, 1e-6);
}

TEST(GpMean, MatchesDenseSolve) {
  std::mt19937_64 rng(2);
  const Kernel k = Kernel::squared_exponential_ard({0.4, 0.7}, 1.5);
  const PointSet x = uniform_points(rng, 2, 8, -1.0, 1.0);
  const Eigen::VectorXd y = Eigen::VectorXd::Random(8);
  const double nugget = 1e-3;
  const double m0 = 0.25;
  const auto post = fit(k, make_design(x, y), nugget, m0);
  Eigen::MatrixXd g(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) g(i, j) = k(x.col(i), x.col(j)) + (i == j ? nugget : 0.0);
  const Eigen::VectorXd a = g.fullPivLu().solve(Eigen::VectorXd(y.array() - m0));
  for (int t = 0; t < 10; ++t) {
    const Point p = uniform_points(rng, 2, 1, -1.5, 1.5).col(0);
    double expected = m0;
    for (int i = 0; i < 8; ++i) expected += a(i) * k(p, x.col(i));
    EXPECT_NEAR(post.mean(p), expected, 1e-8);
    const PointSet ps = p;
    EXPECT_NEAR(post.means(ps)(0), expected, 1e-8);
  }
}

TEST(GpCov, EmptyDesignIsPrior) {
  const Kernel k = Kernel::mehler({0.7});
  const auto post = GpPosterior::condition(k, PointSet(1, 0), 0.0);
  const Point a = Eigen::VectorXd::Constant(1, 0.3), b = Eigen::VectorXd::Constant(1, -1.1);
  EXPECT_EQ(post.covariance(a, b), k(a, b));
  EXPECT_EQ(post.variance(a), k(a, a));
}

TEST(GpCov, ZeroVarianceAtDesignPoint) {
  std::mt19937_64 rng(3);
  const Kernel k = Kernel::squared_exponential(2, 0.5);
  const PointSet x = uniform_points(rng, 2, 5, -1.0, 1.0);
  const auto post = GpPosterior::condition(k, x, 0.0);
  for (int i = 0; i < 5; ++i) EXPECT_LE(std::abs(posterior_var(post, x.col(i))), 1e-10);
}

TEST(GpCov, OnePointWithNugget) {
  const Kernel k = Kernel::squared_exponential(1, 0.5);
  const PointSet x = PointSet::Constant(1, 1, 0.2);
  for (double s2 : {1e-3, 0.1, 1.0}) {
    const auto post = GpPosterior::condition(k, x, s2);
    EXPECT_NEAR(post.variance(x.col(0)), s2 / (1.0 + s2), 1e-14);
  }
}

TEST(GpCov, MatchesDenseFormula) {
  std::mt19937_64 rng(4);
  const Kernel k = Kernel::mehler({0.6, 0.8});
  const PointSet x = uniform_points(rng, 2, 6, -1.5, 1.5);
  const auto post = GpPosterior::condition(k, x, 1e-4);
  Eigen::MatrixXd g = k.gram(x);
  g.diagonal().array() += 1e-4;
  const Eigen::MatrixXd r = g.inverse();
  const Point a = uniform_points(rng, 2, 1, -1.5, 1.5).col(0);
  const Point b = uniform_points(rng, 2, 1, -1.5, 1.5).col(0);
  Eigen::VectorXd ka(6), kb(6);
  for (int i = 0; i < 6; ++i) {
    ka(i) = k(x.col(i), a);
    kb(i) = k(x.col(i), b);
  }
  EXPECT_NEAR(posterior_cov(post, a, b), k(a, b) - ka.dot(r * kb), 1e-10);
  EXPECT_NEAR(post.covariance(a, b), post.covariance(b, a), 1e-14);
}

TEST(GpProperties, VarianceBounds) {
  std::mt19937_64 rng(5);
  const Kernel k = Kernel::squared_exponential(2, 0.3);
  for (int trial = 0; trial < 10; ++trial) {
    const PointSet x = uniform_points(rng, 2, 12, -1.0, 1.0);
    const auto post = GpPosterior::condition(k, x, 1e-10);
    const PointSet probes = uniform_points(rng, 2, 100, -1.5, 1.5);
    const Eigen::VectorXd v = post.variances(probes);
    for (int i = 0; i < 100; ++i) {
      EXPECT_GE(v(i), -1e-10);
      EXPECT_LE(v(i), k(probes.col(i), probes.col(i)) + 1e-10);
    }
  }
}

TEST(GpProperties, VarianceMonotoneUnderAppend) {
  std::mt19937_64 rng(6);
  for (const Kernel& k : {Kernel::squared_exponential(2, 0.4), Kernel::mehler({0.7, 0.5})}) {
    for (int trial = 0; trial < 10; ++trial) {
      const PointSet x = uniform_points(rng, 2, 6, -1.0, 1.0);
      PointSet bigger(2, 7);
      bigger << x, uniform_points(rng, 2, 1, -1.0, 1.0);
      const PointSet probes = uniform_points(rng, 2, 100, -1.2, 1.2);
      const Eigen::VectorXd before = GpPosterior::condition(k, x, 1e-6).variances(probes);
      const Eigen::VectorXd after = GpPosterior::condition(k, bigger, 1e-6).variances(probes);
      for (int i = 0; i < 100; ++i) EXPECT_LE(after(i), before(i) + 1e-10);
    }
  }
}

TEST(GpProperties, PriorReversionFarAway) {
  const double l = 0.25;
  const Kernel k = Kernel::squared_exponential(2, l, 1.7);
  std::mt19937_64 rng(7);
  const PointSet x = uniform_points(rng, 2, 10, -0.5, 0.5);
  const auto post = GpPosterior::condition(k, x, 1e-10);
  // at least 10 l from every design point
  const Point far = Eigen::Vector2d(0.5 + 10.0 * l + 0.71, 0.0);
  EXPECT_NEAR(post.variance(far), 1.7, 1e-6);
}

TEST(Cardinal, KroneckerAtDesignPoints) {
  const Kernel k = Kernel::squared_exponential(1, 0.2);
  PointSet x(1, 6);
  x << -0.9, -0.55, -0.2, 0.1, 0.45, 0.8;
  for (int i = 0; i < 6; ++i) {
    const Eigen::VectorXd u = cardinal_functions(k, x, 1e-10, x.col(i));
    for (int j = 0; j < 6; ++j) EXPECT_NEAR(u(j), i == j ? 1.0 : 0.0, 1e-6);
  }
}

TEST(Cardinal, SinglePoint) {
  const Kernel k = Kernel::squared_exponential(1, 0.3);
  const PointSet x = PointSet::Constant(1, 1, 0.1);
  for (double p : {-0.5, 0.1, 0.4}) {
    const Point px = Eigen::VectorXd::Constant(1, p);
    const Eigen::VectorXd u = cardinal_functions(k, x, 0.0, px);
    EXPECT_NEAR(u(0), k(x.col(0), px), 1e-15);
    EXPECT_LE(u(0), 1.0);
  }
}

TEST(Cardinal, RepresentsPosteriorMean) {
  std::mt19937_64 rng(9);
  const Kernel k = Kernel::squared_exponential(2, 0.5);
  const PointSet x = uniform_points(rng, 2, 7, -1.0, 1.0);
  const Eigen::VectorXd y = Eigen::VectorXd::Random(7);
  const auto post = fit(k, make_design(x, y), 1e-8);
  for (int t = 0; t < 10; ++t) {
    const Point p = uniform_points(rng, 2, 1, -1.0, 1.0).col(0);
    EXPECT_NEAR(cardinal_functions(k, x, 1e-8, p).dot(y), post.mean(p), 1e-8);
  }
}

TEST(Lebesgue, SinglePointIsOne) {
  const Kernel k = Kernel::squared_exponential(1, 0.2);
  const PointSet x = PointSet::Constant(1, 1, 0.3);
  EXPECT_NEAR(lebesgue_constant(k, x, 0.0, uniform_grid(-1.0, 1.0, 2000)), 1.0, 1e-6);
}

TEST(Lebesgue, DuplicatePointsWithNuggetFinite) {
  const Kernel k = Kernel::squared_exponential(1, 0.2);
  PointSet x(1, 3);
  x << 0.1, 0.1, -0.4;
  const double lam = lebesgue_constant(k, x, 1e-6, uniform_grid(-1.0, 1.0, 500));
  EXPECT_TRUE(std::isfinite(lam));
  EXPECT_GE(lam, 0.9);
}

TEST(Lebesgue, EmptyGridThrows) {
  const Kernel k = Kernel::squared_exponential(1, 0.2);
  EXPECT_THROW(lebesgue_constant(k, PointSet::Zero(1, 1), 0.0, PointSet(1, 0)), ConfigError);
}

TEST(UniformGrid, Endpoints) {
  const PointSet g = uniform_grid(-1.0, 1.0, 2000);
  EXPECT_EQ(g.cols(), 2000);
  EXPECT_EQ(g(0, 0), -1.0);
  EXPECT_EQ(g(0, 1999), 1.0);
}
