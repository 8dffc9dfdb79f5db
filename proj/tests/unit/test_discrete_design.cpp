#include <gtest/gtest.h>

#include <cmath>

#include "ivar/design.hpp"
#include "support.hpp"

using namespace ivar;
using testing_support::uniform_points;

namespace {

// Noise-free variance of candidate c given noisy observations at `given`.
double conditional_variance(const Kernel& k, const PointSet& cand, const std::vector<int>& given, int c, double nugget) {
  const int n = static_cast<int>(given.size());
  if (n == 0) return k(cand.col(c), cand.col(c));
  Eigen::MatrixXd g(n, n);
  Eigen::VectorXd kv(n);
  for (int i = 0; i < n; ++i) {
    kv(i) = k(cand.col(given[i]), cand.col(c));
    for (int j = 0; j < n; ++j) g(i, j) = k(cand.col(given[i]), cand.col(given[j])) + (i == j ? nugget : 0.0);
  }
  return k(cand.col(c), cand.col(c)) - kv.dot(g.ldlt().solve(kv));
}

std::vector<int> brute_force_alm(const Kernel& k, const PointSet& cand, int n, double nugget) {
  std::vector<int> chosen;
  for (int step = 0; step < n; ++step) {
    int best = -1;
    double best_v = -1e300;
    for (int c = 0; c < cand.cols(); ++c) {
      if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
      const double v = conditional_variance(k, cand, chosen, c, nugget);
      if (v > best_v) {
        best_v = v;
        best = c;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

std::vector<int> brute_force_mi(const Kernel& k, const PointSet& cand, int n, double nugget) {
  std::vector<int> chosen;
  for (int step = 0; step < n; ++step) {
    int best = -1;
    double best_r = -1e300;
    for (int c = 0; c < cand.cols(); ++c) {
      if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
      std::vector<int> rest;
      for (int o = 0; o < cand.cols(); ++o)
        if (o != c && std::find(chosen.begin(), chosen.end(), o) == chosen.end()) rest.push_back(o);
      const double num = conditional_variance(k, cand, chosen, c, nugget) + nugget;
      const double den = conditional_variance(k, cand, rest, c, nugget) + nugget;
      if (num / den > best_r) {
        best_r = num / den;
        best = c;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

}  // namespace

TEST(Alm, FirstPickTieLowestIndex) {
  std::mt19937_64 rng(1);
  const PointSet cand = uniform_points(rng, 2, 20, -1.0, 1.0);
  const auto res = alm_select(Kernel::squared_exponential(2, 0.3), cand, 1, 1e-10);
  EXPECT_EQ(res.indices, std::vector<int>{0});
  EXPECT_EQ(res.design.provenance, "alm");
}

TEST(Alm, NextPickNearBoundary) {
  const PointSet cand = Domain::named("interval").sample(2, 2000);
  const PointSet center = PointSet::Zero(1, 1);
  const auto res = alm_select(Kernel::squared_exponential(1, 0.3), cand, 1, 1e-10, center);
  EXPECT_GT(std::abs(res.design.points(0, 0)), 0.95);
}

TEST(Alm, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int ne = 5 + trial % 6;
    const PointSet cand = uniform_points(rng, 2, ne, -1.0, 1.0);
    const Kernel k = Kernel::squared_exponential(2, 0.4);
    const int n = std::min(ne, 3 + trial % 3);
    EXPECT_EQ(alm_select(k, cand, n, 1e-6, PointSet()).indices, brute_force_alm(k, cand, n, 1e-6));
  }
}

TEST(Alm, DesignFromDomain) {
  const Domain dom = Domain::named("ball2d");
  const auto res = alm_design(Kernel::squared_exponential(2, 0.2), dom, 8, 1e-10, 1000, 4);
  EXPECT_EQ(res.design.size(), 8);
  for (int j = 0; j < 8; ++j) EXPECT_TRUE(dom.contains(res.design.points.col(j)));
  EXPECT_THROW(alm_design(Kernel::squared_exponential(2, 0.2), dom, 8, 1e-10, 5, 4), ConfigError);
}

TEST(Mi, SymmetricTieLowestIndex) {
  PointSet cand(1, 2);
  cand << -0.5, 0.5;
  EXPECT_EQ(mi_select(Kernel::squared_exponential(1, 0.4), cand, 1, 1e-10).indices, std::vector<int>{0});
}

TEST(Mi, MatchesBruteForce) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const PointSet cand = uniform_points(rng, 2, 6, -1.0, 1.0);
    const Kernel k = Kernel::squared_exponential(2, 0.5);
    EXPECT_EQ(mi_select(k, cand, 2, 1e-4).indices, brute_force_mi(k, cand, 2, 1e-4));
  }
}

TEST(Mi, DuplicateCandidateSkipped) {
  PointSet cand(1, 5);
  cand << -0.8, 0.1, 0.1, 0.5, 0.9;
  const auto res = mi_select(Kernel::squared_exponential(1, 0.3), cand, 2, 1e-10);
  EXPECT_EQ(res.indices.size(), 2u);
  EXPECT_EQ(res.skipped, (std::vector<int>{1, 2}));
  for (int i : res.indices) EXPECT_TRUE(i != 1 && i != 2);
}

TEST(Mi, DesignFromDomain) {
  const Domain dom = Domain::named("ball2d");
  const auto res = mi_design(Kernel::squared_exponential(2, 0.2), dom, 8, 1e-10, 150, 6);
  EXPECT_EQ(res.design.size(), 8);
  EXPECT_EQ(res.design.provenance, "mi");
  EXPECT_THROW(mi_design(Kernel::squared_exponential(2, 0.2), dom, 8, 1e-10, 8, 6), ConfigError);
}
