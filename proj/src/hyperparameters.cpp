#include "ivar/hyperparameters.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace ivar {

LmlValue log_marginal_likelihood(const Kernel& kernel, const Design& design, double nugget, double prior_mean) {
  design.validate();
  require(design.has_observations() && design.size() >= 1, "log_marginal_likelihood: observations required");
  require(std::isfinite(nugget) && nugget >= 0.0, "nugget must be a nonnegative real");
  const int n = design.size();
  Eigen::MatrixXd g = kernel.gram(design.points);
  g.diagonal().array() += nugget;
  const SpdFactor factor = SpdFactor::factorize(g);
  const Eigen::VectorXd r = design.observations.array() - prior_mean;
  const Eigen::VectorXd alpha = factor.solve(r);

  LmlValue out;
  out.value = -0.5 * r.dot(alpha) - 0.5 * factor.log_determinant() - 0.5 * n * std::log(2.0 * std::numbers::pi);

  // d/d theta = 1/2 tr((alpha alpha^T - R) dG/dtheta)
  const Eigen::MatrixXd inner = alpha * alpha.transpose() - factor.inverse();
  const auto grads = kernel.gram_parameter_gradients(design.points);
  out.gradient.resize(static_cast<Eigen::Index>(grads.size()) + 1);
  for (std::size_t p = 0; p < grads.size(); ++p)
    out.gradient(static_cast<Eigen::Index>(p)) = 0.5 * inner.cwiseProduct(grads[p]).sum();
  out.gradient(out.gradient.size() - 1) = 0.5 * nugget * inner.trace();
  return out;
}

HyperparameterBounds default_hyperparameter_bounds(const Kernel& kernel, const Design& design) {
  const Eigen::Index p = kernel.parameters().size();
  HyperparameterBounds b{Eigen::VectorXd(p + 1), Eigen::VectorXd(p + 1)};
  double var_y = 1.0;
  if (design.has_observations() && design.size() >= 2) {
    const double m = design.observations.mean();
    var_y = (design.observations.array() - m).square().sum() / (design.size() - 1);
  }
  const double scale = var_y > 0.0 ? var_y : 1.0;
  switch (kernel.family()) {
    case KernelFamily::SquaredExponentialIsotropic:
    case KernelFamily::SquaredExponentialArd:
      b.lower.head(p - 1).setConstant(std::log(1e-2));
      b.upper.head(p - 1).setConstant(std::log(1e2));
      b.lower(p - 1) = std::log(1e-4 * scale);
      b.upper(p - 1) = std::log(1e4 * scale);
      break;
    case KernelFamily::MehlerTensorized:
      b.lower.head(p).setConstant(-12.0);
      b.upper.head(p).setConstant(12.0);
      break;
    case KernelFamily::FiniteRankMercer:
      b.lower.head(p).setConstant(-30.0);
      b.upper.head(p).setConstant(5.0);
      break;
  }
  b.lower(p) = std::log(1e-10);
  b.upper(p) = std::log(std::max(1e-8, 10.0 * var_y));
  return b;
}

HyperparameterFit optimize_hyperparameters(const Kernel& initial, const Design& design,
                                           const HyperparameterOptions& options) {
  design.validate();
  require(design.has_observations() && design.size() >= 2, "optimize_hyperparameters: at least 2 observations required");
  require(options.restarts >= 1, "optimize_hyperparameters: restarts must be positive");
  require(std::isfinite(options.nugget) && options.nugget > 0.0, "optimize_hyperparameters: nugget must be positive");
  const HyperparameterBounds bounds = options.bounds ? *options.bounds : default_hyperparameter_bounds(initial, design);
  const Eigen::Index p = initial.parameters().size();
  require(bounds.lower.size() == p + 1 && bounds.upper.size() == p + 1, "optimize_hyperparameters: bounds size mismatch");

  Eigen::VectorXd lower = bounds.lower, upper = bounds.upper;
  if (!options.fit_nugget) lower(p) = upper(p) = std::log(options.nugget);

  auto unpack = [&](const Eigen::VectorXd& z) { return std::make_pair(initial.with_parameters(z.head(p)), std::exp(z(p))); };
  const Objective negative_lml = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
    try {
      const auto [k, nugget] = unpack(z);
      const LmlValue v = log_marginal_likelihood(k, design, nugget, options.prior_mean);
      grad = -v.gradient;
      if (!options.fit_nugget) grad(p) = 0.0;
      return -v.value;
    } catch (const NumericalError&) {
      grad.setZero(z.size());
      return std::numeric_limits<double>::infinity();
    }
  };

  Rng rng(derive_seed(options.seed, 3));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::optional<HyperparameterFit> best;
  int successes = 0;
  for (int r = 0; r < options.restarts; ++r) {
    Eigen::VectorXd z0(p + 1);
    if (r == 0) {
      z0.head(p) = initial.parameters();
      z0(p) = std::log(options.nugget);
    } else {
      for (Eigen::Index i = 0; i <= p; ++i) z0(i) = lower(i) + (upper(i) - lower(i)) * unif(rng);
    }
    z0 = z0.cwiseMax(lower).cwiseMin(upper);
    LbfgsResult res;
    try {
      res = minimize_bounded(negative_lml, z0, lower, upper, options.optimizer);
    } catch (const NumericalError&) {
      continue;
    }
    if (!std::isfinite(res.objective)) continue;
    ++successes;
    if (!best || -res.objective > best->log_marginal_likelihood) {
      const auto [k, nugget] = unpack(res.x);
      best = HyperparameterFit{k, nugget, -res.objective, 0};
    }
  }
  if (!best) throw NumericalError("hyperparameter optimization failed: no restart produced a finite likelihood");
  best->successful_restarts = successes;
  return *best;
}

}  // namespace ivar
