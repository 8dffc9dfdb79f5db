#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ivar/common.hpp"
#include "ivar/eigensystem.hpp"

namespace ivar {

enum class KernelFamily {
  SquaredExponentialIsotropic,
  SquaredExponentialArd,
  MehlerTensorized,
  FiniteRankMercer,
};

std::string to_string(KernelFamily family);

// Mehler decay rates are mapped to an unconstrained coordinate u through
// t = lo + (hi - lo) * sigmoid(u) so that hyperparameter search stays inside
// (lo, hi).
inline constexpr double kMehlerDecayLower = 1e-3;
inline constexpr double kMehlerDecayUpper = 1.0 - 1e-3;

// Positive semi-definite covariance kernel. Immutable value type; copies are
// cheap (finite-rank systems are shared).
class Kernel {
 public:
  // gamma * exp(-|x - y|^2 / (2 l^2))
  static Kernel squared_exponential(int dim, double length, double variance = 1.0);
  // gamma * exp(-sum_k (x_k - y_k)^2 / (2 l_k^2))
  static Kernel squared_exponential_ard(std::vector<double> lengths, double variance = 1.0);
  // prod_k (1 - t_k^2)^{-1/2} exp(-(t_k^2 x_k^2 - 2 t_k x_k y_k + t_k^2 y_k^2) / (2 (1 - t_k^2)))
  static Kernel mehler(std::vector<double> decay);
  // sum_i lambda_i phi_i(x) phi_i(y)
  static Kernel finite_rank(std::shared_ptr<const FiniteEigenSystem> system);

  KernelFamily family() const { return family_; }
  int dim() const { return dim_; }
  const std::vector<double>& lengths() const { return lengths_; }
  double variance() const { return variance_; }
  const std::vector<double>& decay() const { return decay_; }
  const std::shared_ptr<const FiniteEigenSystem>& finite_system() const { return finite_; }

  double operator()(const Point& x, const Point& y) const;
  // Gradient with respect to the first argument.
  Point grad_x(const Point& x, const Point& y) const;

  // N x M matrix K(x_i, y_j).
  Eigen::MatrixXd cross(const PointSet& x, const PointSet& y) const;
  Eigen::MatrixXd gram(const PointSet& x) const;
  Eigen::VectorXd diagonal(const PointSet& x) const;

  // d x N matrix whose column l is sum_j weights(l, j) * grad_x K(x_l, y_j).
  // `cross_xy` must equal cross(x, y).
  Eigen::MatrixXd weighted_grad_x(const PointSet& x, const PointSet& y, const Eigen::MatrixXd& cross_xy,
                                  const Eigen::MatrixXd& weights) const;

  // Hyperparameters in unconstrained coordinates: log lengths and log
  // variance for squared exponential, logit-mapped decay for Mehler, log
  // eigenvalues for finite rank.
  Eigen::VectorXd parameters() const;
  std::vector<std::string> parameter_names() const;
  Kernel with_parameters(const Eigen::VectorXd& theta) const;
  // d Gram / d theta_p for each hyperparameter.
  std::vector<Eigen::MatrixXd> gram_parameter_gradients(const PointSet& x) const;

 private:
  Kernel() = default;
  void check_point(const Point& x) const;
  void check_points(const PointSet& x) const;
  // grad_x K(x, y) = K(x, y) * (coef_y .* y - coef_x .* x) for the closed-form families.
  void gradient_coefficients(Eigen::VectorXd& coef_y, Eigen::VectorXd& coef_x) const;

  KernelFamily family_ = KernelFamily::SquaredExponentialIsotropic;
  int dim_ = 0;
  std::vector<double> lengths_;
  double variance_ = 1.0;
  std::vector<double> decay_;
  std::shared_ptr<const FiniteEigenSystem> finite_;
};

double kernel_eval(const Kernel& kernel, const Point& x, const Point& y);
Point kernel_grad_x(const Kernel& kernel, const Point& x, const Point& y);

// Mehler kernels yield their Hermite eigensystem and finite-rank kernels the
// stored system; squared exponential kernels throw ConfigError
// ("eigensystem unavailable").
std::shared_ptr<const EigenSystem> eigensystem_of(const Kernel& kernel);

// Finite-rank kernel built from the leading `terms` eigenpairs.
Kernel truncate_kernel(const std::shared_ptr<const EigenSystem>& system, std::size_t terms);

}  // namespace ivar
