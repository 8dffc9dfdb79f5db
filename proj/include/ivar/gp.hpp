#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "ivar/common.hpp"
#include "ivar/kernels.hpp"
#include "ivar/linalg.hpp"

namespace ivar {

inline constexpr double kDefaultNugget = 1e-10;

// Ordered evaluation points (columns) with optional observations.
struct Design {
  PointSet points;
  Eigen::VectorXd observations;  // empty or one value per point
  std::string provenance = "manual";

  int size() const { return static_cast<int>(points.cols()); }
  int dim() const { return static_cast<int>(points.rows()); }
  bool has_observations() const { return observations.size() > 0; }
  // Throws ConfigError on non-finite points or a length mismatch.
  void validate() const;
};

// GP posterior given a design. Covariance queries need only the points;
// mean queries need observations.
class GpPosterior {
 public:
  static GpPosterior fit(const Kernel& kernel, const Design& design, double nugget, double prior_mean = 0.0);
  // Covariance-only posterior (N = 0 allowed, giving the prior).
  static GpPosterior condition(const Kernel& kernel, const PointSet& points, double nugget);

  const Kernel& kernel() const { return kernel_; }
  const PointSet& points() const { return points_; }
  int size() const { return static_cast<int>(points_.cols()); }
  double nugget() const { return nugget_; }
  double prior_mean() const { return prior_mean_; }
  bool has_mean() const { return alpha_.has_value(); }
  const Eigen::VectorXd& alpha() const;
  // Jitter added by the factorization retry (0 if none).
  double jitter() const { return factor_ ? factor_->jitter() : 0.0; }
  const std::optional<SpdFactor>& factor() const { return factor_; }

  double mean(const Point& x) const;
  Eigen::VectorXd means(const PointSet& x) const;
  double covariance(const Point& x, const Point& y) const;
  double variance(const Point& x) const;
  Eigen::VectorXd variances(const PointSet& x) const;
  // Solution u of (K + nugget I) u = k(x): cardinal function values at x.
  Eigen::VectorXd cardinal(const Point& x) const;
  // N x G matrix of cardinal function values at the grid columns.
  Eigen::MatrixXd cardinal_matrix(const PointSet& grid) const;

 private:
  GpPosterior(Kernel kernel, PointSet points, double nugget) : kernel_(std::move(kernel)), points_(std::move(points)), nugget_(nugget) {}

  Kernel kernel_;
  PointSet points_;
  double nugget_ = 0.0;
  double prior_mean_ = 0.0;
  std::optional<SpdFactor> factor_;
  std::optional<Eigen::VectorXd> alpha_;
};

GpPosterior fit(const Kernel& kernel, const Design& design, double nugget, double prior_mean = 0.0);
double posterior_mean(const GpPosterior& post, const Point& x);
double posterior_cov(const GpPosterior& post, const Point& x, const Point& y);
double posterior_var(const GpPosterior& post, const Point& x);

Eigen::VectorXd cardinal_functions(const Kernel& kernel, const PointSet& design, double nugget, const Point& x);

// max of sum_j |u_j(x)| over the grid columns and the design points. A lower
// bound of the true supremum.
double lebesgue_constant(const Kernel& kernel, const PointSet& design, double nugget, const PointSet& grid);

// n equispaced points on [lower, upper] as a 1 x n point set.
PointSet uniform_grid(double lower, double upper, int n);

}  // namespace ivar
