#include "ivar/gp.hpp"

#include <algorithm>
#include <cmath>

namespace ivar {

void Design::validate() const {
  require(points.allFinite(), "design points must be finite");
  require(observations.size() == 0 || observations.size() == points.cols(),
          "design observations must be empty or one per point");
  require(observations.allFinite(), "design observations must be finite");
}

GpPosterior GpPosterior::condition(const Kernel& kernel, const PointSet& points, double nugget) {
  require(std::isfinite(nugget) && nugget >= 0.0, "nugget must be a nonnegative real");
  require(points.cols() == 0 || points.rows() == kernel.dim(), "design dimension does not match kernel");
  require(points.allFinite(), "design points must be finite");
  GpPosterior post(kernel, points, nugget);
  if (points.cols() > 0) {
    Eigen::MatrixXd g = kernel.gram(points);
    g.diagonal().array() += nugget;
    post.factor_ = SpdFactor::factorize(g);
  }
  return post;
}

GpPosterior GpPosterior::fit(const Kernel& kernel, const Design& design, double nugget, double prior_mean) {
  design.validate();
  require(design.has_observations() || design.size() == 0, "fit requires observations");
  require(std::isfinite(prior_mean), "prior mean must be finite");
  GpPosterior post = condition(kernel, design.points, nugget);
  post.prior_mean_ = prior_mean;
  if (design.size() == 0) {
    post.alpha_ = Eigen::VectorXd();
  } else {
    post.alpha_ = post.factor_->solve(Eigen::VectorXd(design.observations.array() - prior_mean));
  }
  return post;
}

const Eigen::VectorXd& GpPosterior::alpha() const {
  if (!alpha_) throw ConfigError("posterior has no observations");
  return *alpha_;
}

double GpPosterior::mean(const Point& x) const {
  const Eigen::VectorXd& a = alpha();
  if (size() == 0) return prior_mean_;
  const PointSet xs = x;
  return prior_mean_ + (kernel_.cross(points_, xs).col(0).dot(a));
}

Eigen::VectorXd GpPosterior::means(const PointSet& x) const {
  const Eigen::VectorXd& a = alpha();
  if (size() == 0) return Eigen::VectorXd::Constant(x.cols(), prior_mean_);
  return (kernel_.cross(x, points_) * a).array() + prior_mean_;
}

double GpPosterior::covariance(const Point& x, const Point& y) const {
  const double prior = kernel_(x, y);
  if (size() == 0) return prior;
  PointSet xy(x.size(), 2);
  xy.col(0) = x;
  xy.col(1) = y;
  Eigen::MatrixXd k = kernel_.cross(points_, xy);
  factor_->solve_lower_in_place(k);
  return prior - k.col(0).dot(k.col(1));
}

double GpPosterior::variance(const Point& x) const {
  const PointSet xs = x;
  return variances(xs)(0);
}

Eigen::VectorXd GpPosterior::variances(const PointSet& x) const {
  Eigen::VectorXd prior = kernel_.diagonal(x);
  if (size() == 0) return prior;
  Eigen::MatrixXd k = kernel_.cross(points_, x);
  factor_->solve_lower_in_place(k);
  return prior - k.colwise().squaredNorm().transpose();
}

Eigen::VectorXd GpPosterior::cardinal(const Point& x) const {
  const PointSet xs = x;
  return cardinal_matrix(xs).col(0);
}

Eigen::MatrixXd GpPosterior::cardinal_matrix(const PointSet& grid) const {
  if (size() == 0) return Eigen::MatrixXd(0, grid.cols());
  return factor_->solve(kernel_.cross(points_, grid));
}

GpPosterior fit(const Kernel& kernel, const Design& design, double nugget, double prior_mean) {
  return GpPosterior::fit(kernel, design, nugget, prior_mean);
}

double posterior_mean(const GpPosterior& post, const Point& x) { return post.mean(x); }

double posterior_cov(const GpPosterior& post, const Point& x, const Point& y) { return post.covariance(x, y); }

double posterior_var(const GpPosterior& post, const Point& x) { return post.variance(x); }

Eigen::VectorXd cardinal_functions(const Kernel& kernel, const PointSet& design, double nugget, const Point& x) {
  return GpPosterior::condition(kernel, design, nugget).cardinal(x);
}

double lebesgue_constant(const Kernel& kernel, const PointSet& design, double nugget, const PointSet& grid) {
  require(grid.cols() > 0, "lebesgue_constant: evaluation grid is empty");
  require(design.cols() > 0, "lebesgue_constant: design is empty");
  const GpPosterior post = GpPosterior::condition(kernel, design, nugget);
  const double on_grid = post.cardinal_matrix(grid).cwiseAbs().colwise().sum().maxCoeff();
  const double on_design = post.cardinal_matrix(design).cwiseAbs().colwise().sum().maxCoeff();
  return std::max(on_grid, on_design);
}

PointSet uniform_grid(double lower, double upper, int n) {
  require(n >= 1, "uniform_grid: need at least one point");
  require(lower <= upper, "uniform_grid: lower must not exceed upper");
  PointSet g(1, n);
  if (n == 1) {
    g(0, 0) = 0.5 * (lower + upper);
    return g;
  }
  for (int i = 0; i < n; ++i) g(0, i) = lower + (upper - lower) * i / (n - 1.0);
  return g;
}

}  // namespace ivar
