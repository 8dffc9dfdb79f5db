#include "ivar/design.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ivar/linalg.hpp"

namespace ivar {

SaaContext make_saa_context(const Kernel& kernel, const PointSet& saa_points, double nugget) {
  require(saa_points.cols() >= 1, "SAA context needs at least one point");
  require(saa_points.rows() == kernel.dim(), "SAA points do not match the kernel dimension");
  require(std::isfinite(nugget) && nugget >= 0.0, "nugget must be a nonnegative real");
  SaaContext ctx{kernel, nugget, saa_points, kernel.diagonal(saa_points), 0.0};
  ctx.prior_ivar = ctx.prior_variance.mean();
  return ctx;
}

SaaContext make_saa_context(const Kernel& kernel, const Domain& domain, int n_mc, double nugget, std::uint64_t seed) {
  require(n_mc >= 1, "N_mc must be positive");
  require(domain.dim() == kernel.dim(), "domain and kernel dimensions differ");
  return make_saa_context(kernel, domain.sample(derive_seed(seed, 1), n_mc), nugget);
}

IvarValue ivar_saa_evaluate(const SaaContext& ctx, const PointSet& design, bool with_gradient) {
  IvarValue out;
  const Eigen::Index n = design.cols();
  if (with_gradient) out.gradient = Eigen::MatrixXd::Zero(ctx.kernel.dim(), n);
  if (n == 0) {
    out.value = ctx.prior_ivar;
    return out;
  }
  require(design.rows() == ctx.kernel.dim(), "design dimension does not match the kernel");
  const double n_mc = static_cast<double>(ctx.points.cols());
  auto penalty = [&] {
    out.value = 10.0 * ctx.prior_ivar;
    out.penalized = true;
    if (with_gradient) out.gradient.setZero();
    return out;
  };
  if (!design.allFinite()) return penalty();
  const Eigen::MatrixXd k_xx = ctx.kernel.gram(design);
  Eigen::MatrixXd g = k_xx;
  g.diagonal().array() += ctx.nugget;
  const auto factor = SpdFactor::try_factorize(g);
  if (!factor) return penalty();

  const Eigen::MatrixXd k_mc = ctx.kernel.cross(design, ctx.points);  // N x N_mc
  const Eigen::MatrixXd a = factor->solve(k_mc);
  out.value = ctx.prior_ivar - k_mc.cwiseProduct(a).sum() / n_mc;
  if (!std::isfinite(out.value)) return penalty();
  if (with_gradient) {
    // d/dx_l of sum_i k_i^T R k_i = 2 sum_j A_lj grad K(x_l, xhat_j) - 2 sum_b B_lb grad K(x_l, x_b)
    const Eigen::MatrixXd b = a * a.transpose();
    out.gradient = ctx.kernel.weighted_grad_x(design, ctx.points, k_mc, a);
    out.gradient -= ctx.kernel.weighted_grad_x(design, design, k_xx, b);
    out.gradient *= -2.0 / n_mc;
    if (!out.gradient.allFinite()) return penalty();
  }
  return out;
}

double ivar_saa(const SaaContext& ctx, const PointSet& design) { return ivar_saa_evaluate(ctx, design, false).value; }

Eigen::MatrixXd ivar_saa_grad(const SaaContext& ctx, const PointSet& design) {
  return ivar_saa_evaluate(ctx, design, true).gradient;
}

double ivar_eigen(const EigenSystem& system, const PointSet& design, double nugget, std::size_t terms) {
  require(terms >= 1, "ivar_eigen: truncation must be positive");
  require(std::isfinite(nugget) && nugget >= 0.0, "nugget must be a nonnegative real");
  const Eigen::VectorXd lambda = system.eigenvalues(terms);
  if (design.cols() == 0) return lambda.sum();
  require(design.rows() == system.dim(), "ivar_eigen: design dimension mismatch");
  const Eigen::MatrixXd phi = system.eigenfunctions(terms, design);  // terms x N
  Eigen::MatrixXd g = phi.transpose() * lambda.asDiagonal() * phi;
  g = 0.5 * (g + g.transpose());
  g.diagonal().array() += nugget;
  const SpdFactor factor = SpdFactor::factorize(g);
  // lambda_i^2 Phi_i^T R Phi_i = |L^{-1} lambda_i Phi_i|^2
  Eigen::MatrixXd scaled = (lambda.asDiagonal() * phi).transpose();  // N x terms
  factor.solve_lower_in_place(scaled);
  return lambda.sum() - scaled.colwise().squaredNorm().sum();
}

namespace {

struct BlockResult {
  PointSet points;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
};

Eigen::Map<const Eigen::MatrixXd> as_points(const Eigen::VectorXd& z, int dim) {
  return Eigen::Map<const Eigen::MatrixXd>(z.data(), dim, z.size() / dim);
}

// Optimizes m new points appended to `fixed`.
BlockResult optimize_block(const SaaContext& ctx, const Domain& domain, const PointSet& fixed, int m,
                           const OptimizerConfig& config, int batch_index, std::vector<TraceRow>& trace) {
  const int d = ctx.kernel.dim();
  const Eigen::Index f = fixed.cols();
  const auto [box_lo, box_hi] = domain.bounding_box();
  const Eigen::VectorXd lower = box_lo.replicate(m, 1);
  const Eigen::VectorXd upper = box_hi.replicate(m, 1);

  PointSet full(d, f + m);
  if (f > 0) full.leftCols(f) = fixed;
  const Objective objective = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
    full.rightCols(m) = as_points(z, d);
    const IvarValue v = ivar_saa_evaluate(ctx, full, true);
    const Eigen::MatrixXd tail = v.gradient.rightCols(m);
    grad = Eigen::Map<const Eigen::VectorXd>(tail.data(), tail.size());
    return v.value;
  };

  LbfgsOptions opt;
  opt.max_iterations = config.max_iterations;
  opt.gradient_tolerance = config.gradient_tolerance;
  opt.objective_tolerance = config.objective_tolerance;
  opt.initial_step = config.initial_step;

  BlockResult best;
  for (int r = 0; r < config.restarts; ++r) {
    PointSet init;
    if (r == 0 && batch_index == 0 && config.initial_design && config.initial_design->cols() == m) {
      init = *config.initial_design;
      require(init.rows() == d, "initial design dimension mismatch");
    } else {
      init = domain.sample(derive_seed(config.seed, 1000 + static_cast<std::uint64_t>(r) + 7919ULL * batch_index), m);
    }
    const Eigen::VectorXd z0 = Eigen::Map<const Eigen::VectorXd>(init.data(), init.size());
    LbfgsResult res;
    try {
      res = minimize_bounded(objective, z0, lower, upper, opt);
    } catch (const NumericalError&) {
      throw NumericalError("optimizer divergence: non-finite IVAR objective");
    }
    if (!std::isfinite(res.objective)) throw NumericalError("optimizer divergence: non-finite IVAR objective");
    for (const auto& it : res.trace) trace.push_back({batch_index, r, it.iteration, it.objective, it.gradient_norm});
    if (res.objective < best.value) {
      best.value = res.objective;
      best.points = as_points(res.x, d);
      best.converged = res.converged;
    }
  }
  return best;
}

// Moves exterior points to the nearest SAA point; returns how many moved.
int project_exterior(const SaaContext& ctx, const Domain& domain, PointSet& points) {
  int moved = 0;
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    if (domain.contains(points.col(j))) continue;
    Eigen::Index nearest = 0;
    (ctx.points.colwise() - points.col(j)).colwise().squaredNorm().minCoeff(&nearest);
    points.col(j) = ctx.points.col(nearest);
    ++moved;
  }
  return moved;
}

void check_inputs(const SaaContext& ctx, const Domain& domain, int n, const OptimizerConfig& config,
                  std::vector<std::string>& warnings) {
  require(n >= 1, "design size N must be positive");
  require(domain.dim() == ctx.kernel.dim(), "domain and kernel dimensions differ");
  require(config.batch_size >= 1, "batch size M must be positive");
  require(config.restarts >= 1, "restarts must be positive");
  require(config.max_iterations >= 0, "max iterations must be nonnegative");
  require(config.gradient_tolerance > 0.0 && config.objective_tolerance > 0.0, "tolerances must be positive");
  if (ctx.points.cols() < n) {
    std::ostringstream msg;
    msg << "N_mc=" << ctx.points.cols() << " is smaller than N=" << n << ": IVAR objective is under-resolved";
    warnings.push_back(msg.str());
  }
}

}  // namespace

IvarDesignResult extend_ivar_design(const SaaContext& ctx, const Domain& domain, const PointSet& fixed, int m,
                                    const OptimizerConfig& config, int batch_index) {
  IvarDesignResult out;
  check_inputs(ctx, domain, static_cast<int>(fixed.cols()) + m, config, out.warnings);
  require(m >= 1, "batch size must be positive");
  require(fixed.cols() == 0 || fixed.rows() == ctx.kernel.dim(), "fixed design dimension mismatch");
  BlockResult block = optimize_block(ctx, domain, fixed, m, config, batch_index, out.trace);
  out.projected_points = project_exterior(ctx, domain, block.points);
  PointSet all(ctx.kernel.dim(), fixed.cols() + m);
  if (fixed.cols() > 0) all.leftCols(fixed.cols()) = fixed;
  all.rightCols(m) = block.points;
  out.design.points = all;
  out.design.provenance = "ivar-batch";
  out.ivar = out.projected_points > 0 ? ivar_saa(ctx, all) : block.value;
  out.batch_ivar.push_back(out.ivar);
  out.batch_sizes.push_back(m);
  out.converged = block.converged;
  if (out.projected_points > 0) {
    std::ostringstream msg;
    msg << out.projected_points << " exterior point(s) projected to the nearest SAA point";
    out.warnings.push_back(msg.str());
  }
  return out;
}

IvarDesignResult minimize_ivar_batch(const SaaContext& ctx, const Domain& domain, int n, const OptimizerConfig& config) {
  IvarDesignResult out = extend_ivar_design(ctx, domain, PointSet(ctx.kernel.dim(), 0), n, config, 0);
  out.design.provenance = "ivar-batch";
  return out;
}

IvarDesignResult minimize_ivar_batch(const Kernel& kernel, const Domain& domain, int n, double nugget, int n_mc,
                                     const OptimizerConfig& config) {
  return minimize_ivar_batch(make_saa_context(kernel, domain, n_mc, nugget, config.seed), domain, n, config);
}

IvarDesignResult minimize_ivar_greedy(const SaaContext& ctx, const Domain& domain, int n, const OptimizerConfig& config) {
  IvarDesignResult out;
  check_inputs(ctx, domain, n, config, out.warnings);
  PointSet fixed(ctx.kernel.dim(), 0);
  out.converged = true;
  int batch = 0;
  while (fixed.cols() < n) {
    const int m = std::min<int>(config.batch_size, n - static_cast<int>(fixed.cols()));
    IvarDesignResult step = extend_ivar_design(ctx, domain, fixed, m, config, batch);
    fixed = step.design.points;
    out.batch_ivar.push_back(step.ivar);
    out.batch_sizes.push_back(m);
    out.trace.insert(out.trace.end(), step.trace.begin(), step.trace.end());
    out.projected_points += step.projected_points;
    out.converged = out.converged && step.converged;
    for (auto& w : step.warnings)
      if (w.find("N_mc=") == std::string::npos) out.warnings.push_back("batch " + std::to_string(batch) + ": " + w);
    out.ivar = step.ivar;
    ++batch;
  }
  out.design.points = fixed;
  out.design.provenance = "ivar-greedy-" + std::to_string(config.batch_size);
  return out;
}

IvarDesignResult minimize_ivar_greedy(const Kernel& kernel, const Domain& domain, int n, double nugget, int n_mc,
                                      const OptimizerConfig& config) {
  return minimize_ivar_greedy(make_saa_context(kernel, domain, n_mc, nugget, config.seed), domain, n, config);
}

}  // namespace ivar
