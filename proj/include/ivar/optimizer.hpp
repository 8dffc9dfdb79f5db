#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ivar {

// Objective returning f(x) and writing its gradient. May return a
// non-finite value to signal an infeasible trial point; the line search
// then backtracks.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct LbfgsOptions {
  int max_iterations = 200;
  // Stop when the infinity norm of the projected gradient falls below this.
  double gradient_tolerance = 1e-8;
  // Stop when |f_k - f_{k+1}| <= objective_tolerance * max(1, |f_k|).
  double objective_tolerance = 1e-12;
  int memory = 10;
  // Infinity-norm length of the first trial step (and of steepest-descent
  // restarts).
  double initial_step = 0.1;
  int max_backtracks = 40;
};

struct LbfgsIterate {
  int iteration = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  Eigen::VectorXd gradient;
  double projected_gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string status;
  std::vector<LbfgsIterate> trace;
};

// Box-constrained limited-memory BFGS: quasi-Newton directions on the free
// variables, projection onto [lower, upper], Armijo backtracking along the
// projected path. Throws NumericalError if f(x0) is not finite.
LbfgsResult minimize_bounded(const Objective& objective, const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const LbfgsOptions& options);

}  // namespace ivar
