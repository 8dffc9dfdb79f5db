#include <gtest/gtest.h>

#include <cmath>

#include "ivar/kernels.hpp"
#include "ivar/linalg.hpp"
#include "support.hpp"

using namespace ivar;
using testing_support::central_difference;
using testing_support::relative_error;
using testing_support::uniform_points;

namespace {

std::vector<Kernel> sample_kernels() {
  auto mehler3 = std::make_shared<HermiteEigenSystem>(std::vector<double>{0.6, 0.3});
  return {Kernel::squared_exponential(2, 0.4, 1.3), Kernel::squared_exponential_ard({0.3, 0.8}, 0.7),
          Kernel::mehler({0.8, 0.5}), truncate_kernel(mehler3, 12)};
}

// 1-D Mehler kernel straight from the closed form.
double mehler_closed_form(double t, double x, double y) {
  return std::exp(-(t * t * x * x - 2.0 * t * x * y + t * t * y * y) / (2.0 * (1.0 - t * t))) / std::sqrt(1.0 - t * t);
}

}  // namespace

TEST(KernelEval, SquaredExponentialAtZeroDistance) {
  const Kernel k = Kernel::squared_exponential(3, 0.2);
  const Point x = Eigen::Vector3d(0.3, -1.2, 4.0);
  EXPECT_EQ(k(x, x), 1.0);
}

TEST(KernelEval, SquaredExponentialUnitDistance) {
  const Kernel k = Kernel::squared_exponential(2, 1.0);
  const Point x = Eigen::Vector2d(0.0, 0.0);
  const Point y = Eigen::Vector2d(0.6, 0.8);
  EXPECT_NEAR(k(x, y), std::exp(-0.5), 1e-15);
}

TEST(KernelEval, MehlerAtOrigin) {
  const Kernel k = Kernel::mehler({0.8});
  const Point z = Eigen::VectorXd::Zero(1);
  EXPECT_NEAR(k(z, z), 1.0 / 0.6, 1e-14);
}

TEST(KernelEval, MehlerMatchesOneDimensionalProduct) {
  const Kernel k = Kernel::mehler({0.8, 0.3});
  const Point x = Eigen::Vector2d(0.4, -1.1);
  const Point y = Eigen::Vector2d(-0.7, 2.0);
  EXPECT_NEAR(k(x, y), mehler_closed_form(0.8, 0.4, -0.7) * mehler_closed_form(0.3, -1.1, 2.0), 1e-14);
}

TEST(KernelEval, DimensionMismatchThrows) {
  const Kernel k = Kernel::squared_exponential(2, 1.0);
  EXPECT_THROW(k(Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()), ConfigError);
}

TEST(KernelConstruction, RejectsInvalidParameters) {
  EXPECT_THROW(Kernel::mehler({1.0}), ConfigError);
  EXPECT_THROW(Kernel::mehler({0.0}), ConfigError);
  EXPECT_THROW(Kernel::squared_exponential(1, 0.0), ConfigError);
  EXPECT_THROW(Kernel::squared_exponential(1, 1.0, -1.0), ConfigError);
  EXPECT_THROW(Kernel::squared_exponential_ard({0.3, -0.1}), ConfigError);
}

TEST(KernelGrad, ZeroAtCoincidentPoints) {
  const Kernel k = Kernel::squared_exponential(3, 0.5);
  const Point x = Eigen::Vector3d(0.1, 0.2, 0.3);
  EXPECT_LT(k.grad_x(x, x).norm(), 1e-15);
}

TEST(KernelGrad, SquaredExponentialOneDimensional) {
  const Kernel k = Kernel::squared_exponential(1, 1.0);
  const Point x = Eigen::VectorXd::Constant(1, 1.0);
  const Point y = Eigen::VectorXd::Zero(1);
  EXPECT_NEAR(kernel_grad_x(k, x, y)(0), -std::exp(-0.5), 1e-15);
}

TEST(KernelGrad, MehlerMatchesFiniteDifferences) {
  const Kernel k = Kernel::mehler({0.8});
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Point x = uniform_points(rng, 1, 1, -2.5, 2.5).col(0);
    const Point y = uniform_points(rng, 1, 1, -2.5, 2.5).col(0);
    const auto fd = central_difference([&](const Eigen::VectorXd& z) { return k(z, y); }, x, 1e-6);
    EXPECT_LE(relative_error(k.grad_x(x, y), fd, 1e-8), 1e-5);
  }
}

TEST(KernelGrad, AllFamiliesMatchFiniteDifferences) {
  std::mt19937_64 rng(12);
  for (const Kernel& k : sample_kernels()) {
    for (int trial = 0; trial < 100; ++trial) {
      const Point x = uniform_points(rng, 2, 1, -1.0, 1.0).col(0);
      const Point y = uniform_points(rng, 2, 1, -1.0, 1.0).col(0);
      const auto fd = central_difference([&](const Eigen::VectorXd& z) { return k(z, y); }, x, 1e-6);
      EXPECT_LE(relative_error(k.grad_x(x, y), fd, 1e-6), 1e-5) << to_string(k.family());
    }
  }
}

TEST(KernelMatrices, CrossGramDiagonalAgreeWithPointwise) {
  std::mt19937_64 rng(13);
  for (const Kernel& k : sample_kernels()) {
    const PointSet x = uniform_points(rng, 2, 7, -1.5, 1.5);
    const PointSet y = uniform_points(rng, 2, 5, -1.5, 1.5);
    const Eigen::MatrixXd c = k.cross(x, y);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 5; ++j) EXPECT_NEAR(c(i, j), k(x.col(i), y.col(j)), 1e-13);
    const Eigen::MatrixXd g = k.gram(x);
    const Eigen::VectorXd diag = k.diagonal(x);
    for (int i = 0; i < 7; ++i) {
      EXPECT_NEAR(diag(i), k(x.col(i), x.col(i)), 1e-13);
      EXPECT_NEAR(g(i, i), diag(i), 1e-13);
    }
    EXPECT_EQ((g - g.transpose()).norm(), 0.0);
  }
}

TEST(KernelMatrices, WeightedGradientMatchesPointwiseSum) {
  std::mt19937_64 rng(14);
  for (const Kernel& k : sample_kernels()) {
    const PointSet x = uniform_points(rng, 2, 4, -1.0, 1.0);
    const PointSet y = uniform_points(rng, 2, 6, -1.0, 1.0);
    const Eigen::MatrixXd w = Eigen::MatrixXd::Random(4, 6);
    const Eigen::MatrixXd fast = k.weighted_grad_x(x, y, k.cross(x, y), w);
    for (int l = 0; l < 4; ++l) {
      Eigen::VectorXd slow = Eigen::VectorXd::Zero(2);
      for (int j = 0; j < 6; ++j) slow += w(l, j) * k.grad_x(x.col(l), y.col(j));
      EXPECT_LE((fast.col(l) - slow).norm(), 1e-12 * std::max(1.0, slow.norm())) << to_string(k.family());
    }
  }
}

TEST(KernelProperties, Symmetry) {
  std::mt19937_64 rng(15);
  for (const Kernel& k : sample_kernels()) {
    for (int trial = 0; trial < 50; ++trial) {
      const Point x = uniform_points(rng, 2, 1, -2.0, 2.0).col(0);
      const Point y = uniform_points(rng, 2, 1, -2.0, 2.0).col(0);
      EXPECT_EQ(k(x, y), k(y, x));
      EXPECT_GE(k(x, x), 0.0);
    }
  }
}

TEST(KernelProperties, GramPositiveSemiDefinite) {
  std::mt19937_64 rng(16);
  for (const Kernel& k : sample_kernels()) {
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + static_cast<int>(rng() % 29);
      const PointSet x = uniform_points(rng, 2, n, -1.0, 1.0);
      const Eigen::MatrixXd g = k.gram(x);
      EXPECT_GE(min_eigenvalue(g), -1e-10 * g.trace()) << to_string(k.family());
    }
  }
}

TEST(Eigensystem, MehlerOneDimensional) {
  const auto sys = eigensystem_of(Kernel::mehler({0.8}));
  const Eigen::VectorXd lambda = sys->eigenvalues(6);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(lambda(i), std::pow(0.8, i), 1e-15);
  PointSet x(1, 3);
  x << -0.5, 0.0, 1.7;
  const Eigen::MatrixXd phi = sys->eigenfunctions(6, x);
  for (int i = 0; i < 6; ++i)
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(phi(i, k), hermite_normalized(i, x(0, k)), 1e-14);
  EXPECT_EQ(sys->measure(), ReferenceMeasure::StandardGaussian);
  EXPECT_FALSE(sys->rank().has_value());
}

TEST(Eigensystem, MehlerTwoDimensionalGradedOrder) {
  const auto sys = std::make_shared<HermiteEigenSystem>(std::vector<double>{0.5, 0.5});
  const Eigen::VectorXd lambda = sys->eigenvalues(6);
  EXPECT_DOUBLE_EQ(lambda(0), 1.0);
  EXPECT_DOUBLE_EQ(lambda(1), 0.5);
  EXPECT_DOUBLE_EQ(lambda(2), 0.5);
  const auto idx = sys->multi_indices(6);
  const std::vector<MultiIndex> expected{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
  EXPECT_EQ(idx, expected);
}

TEST(Eigensystem, AnisotropicOrderFollowsEigenvalues) {
  const HermiteEigenSystem sys({0.9, 0.2});
  const Eigen::VectorXd lambda = sys.eigenvalues(30);
  for (int i = 1; i < 30; ++i) EXPECT_LE(lambda(i), lambda(i - 1));
}

TEST(Eigensystem, FiniteRankRoundTrip) {
  Eigen::VectorXd lambda(3);
  lambda << 0.9, 0.4, 0.1;
  auto fin = std::make_shared<FiniteEigenSystem>(lambda, hermite_basis(1));
  const Kernel k = Kernel::finite_rank(fin);
  const auto sys = eigensystem_of(k);
  EXPECT_EQ(sys.get(), fin.get());
  EXPECT_EQ(sys->eigenvalues(3), lambda);
}

TEST(Eigensystem, SquaredExponentialUnavailable) {
  EXPECT_THROW(eigensystem_of(Kernel::squared_exponential(1, 0.3)), ConfigError);
}

TEST(Truncation, SingleTermIsConstantOne) {
  const Kernel k = truncate_kernel(eigensystem_of(Kernel::mehler({0.8})), 1);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Point x = uniform_points(rng, 1, 1, -3.0, 3.0).col(0);
    const Point y = uniform_points(rng, 1, 1, -3.0, 3.0).col(0);
    EXPECT_NEAR(k(x, y), 1.0, 1e-15);
  }
}

TEST(Truncation, FullRankIsIdentity) {
  Eigen::VectorXd lambda(4);
  lambda << 1.0, 0.3, 0.2, 0.05;
  const Kernel k = Kernel::finite_rank(std::make_shared<FiniteEigenSystem>(lambda, hermite_basis(2)));
  const Kernel t = truncate_kernel(eigensystem_of(k), 4);
  std::mt19937_64 rng(18);
  const PointSet x = uniform_points(rng, 2, 6, -2.0, 2.0);
  EXPECT_LE((k.gram(x) - t.gram(x)).norm(), 1e-14);
}

TEST(Truncation, Errors) {
  const auto sys = eigensystem_of(Kernel::mehler({0.8}));
  EXPECT_THROW(truncate_kernel(sys, 0), ConfigError);
  Eigen::VectorXd lambda(2);
  lambda << 1.0, 0.5;
  auto fin = std::make_shared<FiniteEigenSystem>(lambda, hermite_basis(1));
  EXPECT_THROW(truncate_kernel(fin, 3), ConfigError);
}

TEST(Truncation, MercerPartialSumConvergence) {
  for (double t : {0.3, 0.6, 0.8}) {
    const Kernel exact = Kernel::mehler({t});
    const Kernel partial = truncate_kernel(eigensystem_of(exact), 200);
    for (double x = -3.0; x <= 3.0001; x += 0.5) {
      for (double y = -3.0; y <= 3.0001; y += 0.5) {
        const Point px = Eigen::VectorXd::Constant(1, x);
        const Point py = Eigen::VectorXd::Constant(1, y);
        const double e = exact(px, py);
        // relative to the Cauchy-Schwarz scale sqrt(K(x,x) K(y,y)); for x ~ -y the
        // value itself underflows far below the size of the alternating terms
        const double scale = std::sqrt(exact(px, px) * exact(py, py));
        EXPECT_LE(std::abs(partial(px, py) - e), 1e-8 * scale) << "t=" << t << " x=" << x << " y=" << y;
      }
    }
  }
}

TEST(KernelParameters, RoundTrip) {
  for (const Kernel& k : sample_kernels()) {
    const Eigen::VectorXd theta = k.parameters();
    EXPECT_EQ(static_cast<std::size_t>(theta.size()), k.parameter_names().size());
    const Kernel back = k.with_parameters(theta);
    std::mt19937_64 rng(19);
    const PointSet x = uniform_points(rng, 2, 5, -1.0, 1.0);
    EXPECT_LE((back.gram(x) - k.gram(x)).norm(), 1e-12 * k.gram(x).norm());
  }
}

TEST(KernelParameters, GramGradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(20);
  for (const Kernel& k : sample_kernels()) {
    const PointSet x = uniform_points(rng, 2, 5, -1.0, 1.0);
    const auto grads = k.gram_parameter_gradients(x);
    const Eigen::VectorXd theta = k.parameters();
    ASSERT_EQ(grads.size(), static_cast<std::size_t>(theta.size()));
    for (Eigen::Index p = 0; p < theta.size(); ++p) {
      Eigen::VectorXd tp = theta, tm = theta;
      const double h = 1e-6;
      tp(p) += h;
      tm(p) -= h;
      const Eigen::MatrixXd fd = (k.with_parameters(tp).gram(x) - k.with_parameters(tm).gram(x)) / (2 * h);
      EXPECT_LE((grads[p] - fd).norm(), 1e-6 * std::max(1.0, fd.norm())) << to_string(k.family()) << " p=" << p;
    }
  }
}
