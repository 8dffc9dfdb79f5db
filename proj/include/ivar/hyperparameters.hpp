#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "ivar/gp.hpp"
#include "ivar/kernels.hpp"
#include "ivar/optimizer.hpp"

namespace ivar {

struct LmlValue {
  double value = 0.0;
  // d value / d [kernel.parameters(), log nugget]
  Eigen::VectorXd gradient;
};

// -1/2 r^T R r - 1/2 log|K + nugget I| - N/2 log 2 pi with r = y - prior_mean.
LmlValue log_marginal_likelihood(const Kernel& kernel, const Design& design, double nugget, double prior_mean = 0.0);

// Box for the search vector [kernel.parameters(), log nugget].
struct HyperparameterBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

// Log lengths in [log 1e-2, log 1e2], log variance within 1e-4..1e4 times the
// data variance, Mehler logits in [-12, 12], log eigenvalues in [-30, 5], log
// nugget in [log 1e-10, log max(1e-8, 10 var(y))].
HyperparameterBounds default_hyperparameter_bounds(const Kernel& kernel, const Design& design);

struct HyperparameterOptions {
  int restarts = 8;
  std::uint64_t seed = 0;
  double prior_mean = 0.0;
  bool fit_nugget = true;
  double nugget = kDefaultNugget;  // start value, or the fixed value when fit_nugget is false
  std::optional<HyperparameterBounds> bounds;
  LbfgsOptions optimizer{100, 1e-6, 1e-10, 10, 1.0, 40};
};

struct HyperparameterFit {
  Kernel kernel;
  double nugget = 0.0;
  double log_marginal_likelihood = 0.0;
  int successful_restarts = 0;
};

// Maximizes the log marginal likelihood over the hyperparameters of
// `initial`'s family. Restart 0 starts from `initial` (warm start), the
// others from uniform draws in the bounds. Throws NumericalError when no
// restart produces a finite likelihood.
HyperparameterFit optimize_hyperparameters(const Kernel& initial, const Design& design,
                                           const HyperparameterOptions& options);

}  // namespace ivar
