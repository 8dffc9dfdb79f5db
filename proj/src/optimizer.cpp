#include "ivar/optimizer.hpp"

#include <cmath>
#include <deque>

#include "ivar/common.hpp"

namespace ivar {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Gradient components that can still move the iterate (zero where a bound is
// active and the descent direction points outward).
Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g, const Eigen::VectorXd& lo,
                                   const Eigen::VectorXd& hi) {
  Eigen::VectorXd pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) <= lo(i) && g(i) > 0.0) pg(i) = 0.0;
    if (x(i) >= hi(i) && g(i) < 0.0) pg(i) = 0.0;
  }
  return pg;
}

struct Pair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Eigen::VectorXd two_loop(const std::deque<Pair>& memory, const Eigen::VectorXd& g, const Eigen::VectorXd& free_mask) {
  Eigen::VectorXd q = g.cwiseProduct(free_mask);
  std::vector<double> a(memory.size());
  for (int i = static_cast<int>(memory.size()) - 1; i >= 0; --i) {
    const Pair& p = memory[i];
    a[i] = p.rho * p.s.cwiseProduct(free_mask).dot(q);
    q -= a[i] * p.y.cwiseProduct(free_mask);
  }
  const Pair& last = memory.back();
  const double gamma = last.s.dot(last.y) / last.y.squaredNorm();
  Eigen::VectorXd r = gamma * q;
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const Pair& p = memory[i];
    const double b = p.rho * p.y.cwiseProduct(free_mask).dot(r);
    r += (a[i] - b) * p.s.cwiseProduct(free_mask);
  }
  return -r.cwiseProduct(free_mask);
}

}  // namespace

LbfgsResult minimize_bounded(const Objective& objective, const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const LbfgsOptions& options) {
  require(x0.size() == lower.size() && x0.size() == upper.size(), "minimize_bounded: size mismatch");
  require((lower.array() <= upper.array()).all(), "minimize_bounded: lower bound exceeds upper bound");
  require(options.max_iterations >= 0 && options.memory >= 1, "minimize_bounded: invalid options");
  require(options.gradient_tolerance > 0.0 && options.objective_tolerance > 0.0,
          "minimize_bounded: tolerances must be positive");

  LbfgsResult res;
  Eigen::VectorXd x = project(x0, lower, upper);
  Eigen::VectorXd g(x.size());
  double f = objective(x, g);
  ++res.evaluations;
  if (!std::isfinite(f) || !g.allFinite()) throw NumericalError("non-finite objective at the initial point");

  std::deque<Pair> memory;
  const double c1 = 1e-4;
  res.status = "max iterations";
  int iter = 0;
  Eigen::VectorXd pg = projected_gradient(x, g, lower, upper);
  res.trace.push_back({0, f, pg.lpNorm<Eigen::Infinity>()});
  while (true) {
    if (pg.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) {
      res.converged = true;
      res.status = "gradient tolerance";
      break;
    }
    if (iter >= options.max_iterations) break;

    Eigen::VectorXd free_mask = Eigen::VectorXd::Ones(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (pg(i) == 0.0 && g(i) != 0.0) free_mask(i) = 0.0;

    bool steepest = memory.empty();
    Eigen::VectorXd d;
    if (!steepest) {
      d = two_loop(memory, g, free_mask);
      if (!(d.dot(g) < 0.0) || !d.allFinite()) steepest = true;
    }
    if (steepest) {
      d = -pg;
      d *= options.initial_step / d.lpNorm<Eigen::Infinity>();
    }

    // Armijo backtracking along the projected path
    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_new, g_new(x.size());
    double f_new = f;
    for (int bt = 0; bt <= options.max_backtracks; ++bt) {
      x_new = project(x + step * d, lower, upper);
      const Eigen::VectorXd dx = x_new - x;
      if (dx.lpNorm<Eigen::Infinity>() == 0.0) break;
      f_new = objective(x_new, g_new);
      ++res.evaluations;
      if (std::isfinite(f_new) && g_new.allFinite() && f_new <= f + c1 * g.dot(dx)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      res.status = "line search failed";
      break;
    }

    ++iter;
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      memory.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
    }
    const double f_old = f;
    x = x_new;
    f = f_new;
    g = g_new;
    pg = projected_gradient(x, g, lower, upper);
    res.trace.push_back({iter, f, pg.lpNorm<Eigen::Infinity>()});
    if (std::abs(f_old - f) <= options.objective_tolerance * std::max(1.0, std::abs(f_old))) {
      res.converged = true;
      res.status = "objective tolerance";
      break;
    }
  }
  res.x = x;
  res.objective = f;
  res.gradient = g;
  res.projected_gradient_norm = pg.lpNorm<Eigen::Infinity>();
  res.iterations = iter;
  return res;
}

}  // namespace ivar
