#include "ivar/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include "ivar/gp.hpp"
#include "ivar/hermite.hpp"
#include "ivar/linalg.hpp"
#include "ivar/quadrature.hpp"

namespace ivar {

double TestFunction::at(const Point& x) const {
  require(x.size() == dimension, "test function: dimension mismatch");
  return evaluator(PointSet(x))(0);
}

TestFunction test_function(const std::string& name, std::uint64_t seed) {
  TestFunction t;
  t.name = name;
  auto checked = [](int dim, auto fn) {
    return [dim, fn](const PointSet& x) -> Eigen::VectorXd {
      require(x.rows() == dim, "test function: dimension mismatch");
      Eigen::VectorXd out(x.cols());
      for (Eigen::Index k = 0; k < x.cols(); ++k) out(k) = fn(x.col(k));
      return out;
    };
  };
  if (name == "f1") {
    t.dimension = 2;
    t.evaluator = checked(2, [](const auto& x) { return x(0) + x(1) * x(1); });
  } else if (name == "f2") {
    t.dimension = 2;
    t.evaluator = checked(2, [](const auto& x) { return std::sin(2.0 * M_PI * x(0)) + x(1) * x(1); });
  } else if (name == "ishigami") {
    t.dimension = 3;
    t.evaluator = checked(3, [](const auto& x) {
      const double s = std::sin(x(1));
      return std::sin(x(0)) + 7.0 * s * s + 0.05 * std::pow(x(2), 4) * std::sin(x(0));
    });
  } else if (name == "genz10") {
    t.dimension = 10;
    Rng rng(derive_seed(seed, 5));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd c(10);
    for (int i = 0; i < 10; ++i) c(i) = u(rng);
    c *= 2.25 / c.lpNorm<1>();
    t.coefficients = c;
    t.offset = 0.3;
    t.evaluator = checked(10, [c](const auto& x) { return std::cos(2.0 * M_PI * 0.3 + c.dot(x)); });
  } else if (name == "sine-shift") {
    t.dimension = 1;
    t.evaluator = checked(1, [](const auto& x) { return std::sin(M_PI * x(0) + 0.2); });
  } else {
    throw ConfigError("unknown test function '" + name + "' (expected f1, f2, ishigami, genz10 or sine-shift)");
  }
  t.measure = Domain::gaussian(t.dimension);
  return t;
}

PriorSampler::PriorSampler(const Kernel& kernel, const PointSet& points, double jitter) {
  require(points.rows() == kernel.dim(), "prior sampler: dimension mismatch");
  Eigen::MatrixXd k = kernel.gram(points);
  k.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success)
    throw NumericalError("prior covariance not factorizable after jitter " + std::to_string(jitter));
  lower_ = llt.matrixL();
}

Eigen::VectorXd PriorSampler::draw(std::uint64_t seed) const {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(lower_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return lower_.triangularView<Eigen::Lower>() * z;
}

Eigen::VectorXd sample_prior_function(const Kernel& kernel, const PointSet& points, std::uint64_t seed,
                                      double jitter) {
  return PriorSampler(kernel, points, jitter).draw(seed);
}

namespace {

constexpr double kDegenerateNorm = 1e-24;

ErrorEstimate ratio_estimate(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  // a = squared error, b = squared truth, equal weights
  const double n = static_cast<double>(a.size());
  const double ma = a.mean(), mb = b.mean();
  if (!(mb > kDegenerateNorm)) throw ConfigError("degenerate normalization: ||f|| is numerically zero");
  ErrorEstimate e;
  e.samples = static_cast<int>(a.size());
  e.value = std::sqrt(ma / mb);
  if (a.size() > 1 && e.value > 0.0) {
    const Eigen::ArrayXd da = a.array() - ma, db = b.array() - mb;
    const double va = da.square().sum() / (n - 1), vb = db.square().sum() / (n - 1);
    const double cab = (da * db).sum() / (n - 1);
    const double var_r2 = (va / (mb * mb) - 2.0 * ma * cab / (mb * mb * mb) + ma * ma * vb / std::pow(mb, 4)) / n;
    e.standard_error = std::sqrt(std::max(0.0, var_r2)) / (2.0 * e.value);
  }
  return e;
}

}  // namespace

ErrorEstimate relative_l2_error(const Eigen::VectorXd& approx, const Eigen::VectorXd& truth) {
  require(approx.size() == truth.size() && truth.size() > 0, "relative_l2_error: value vectors differ in length");
  return ratio_estimate((approx - truth).cwiseAbs2(), truth.cwiseAbs2());
}

ErrorEstimate relative_l2_error(const Eigen::VectorXd& approx, const Eigen::VectorXd& truth,
                                const Eigen::VectorXd& weights) {
  require(approx.size() == truth.size() && truth.size() == weights.size() && truth.size() > 0,
          "relative_l2_error: value vectors differ in length");
  const double den = weights.dot(truth.cwiseAbs2());
  if (!(den > kDegenerateNorm)) throw ConfigError("degenerate normalization: ||f|| is numerically zero");
  ErrorEstimate e;
  e.value = std::sqrt(std::max(0.0, weights.dot((approx - truth).cwiseAbs2())) / den);
  e.samples = static_cast<int>(truth.size());
  e.quadrature = true;
  return e;
}

ErrorEstimate relative_l2_error(const FieldFunction& approx, const FieldFunction& f, const Domain& domain, int n_mc,
                                std::uint64_t seed, bool allow_quadrature) {
  if (allow_quadrature && domain.shape() == DomainShape::Gaussian && domain.dim() <= 2) {
    const QuadratureRule one = gauss_hermite(domain.dim() == 1 ? kMaxGaussHermiteNodes : 100);
    const QuadratureRule rule = tensor_rule(std::vector<QuadratureRule>(static_cast<std::size_t>(domain.dim()), one));
    return relative_l2_error(approx(rule.nodes), f(rule.nodes), rule.weights);
  }
  require(n_mc >= 2, "relative_l2_error: need at least two samples");
  const PointSet x = domain.sample(derive_seed(seed, 4), n_mc);
  return relative_l2_error(approx(x), f(x));
}

std::vector<std::string> hyperparameter_labels(const Kernel& kernel) {
  std::vector<std::string> out;
  switch (kernel.family()) {
    case KernelFamily::SquaredExponentialIsotropic:
      out = {"l", "gamma"};
      break;
    case KernelFamily::SquaredExponentialArd:
      for (int k = 0; k < kernel.dim(); ++k) out.push_back("l" + std::to_string(k + 1));
      out.push_back("gamma");
      break;
    case KernelFamily::MehlerTensorized:
      for (int k = 0; k < kernel.dim(); ++k) out.push_back("t" + std::to_string(k + 1));
      break;
    case KernelFamily::FiniteRankMercer:
      for (Eigen::Index i = 0; i < kernel.finite_system()->all_eigenvalues().size(); ++i)
        out.push_back("lambda" + std::to_string(i + 1));
      break;
  }
  out.push_back("nugget");
  return out;
}

std::vector<double> hyperparameter_values(const Kernel& kernel, double nugget) {
  std::vector<double> out;
  switch (kernel.family()) {
    case KernelFamily::SquaredExponentialIsotropic:
    case KernelFamily::SquaredExponentialArd:
      out = kernel.lengths();
      out.push_back(kernel.variance());
      break;
    case KernelFamily::MehlerTensorized:
      out = kernel.decay();
      break;
    case KernelFamily::FiniteRankMercer: {
      const auto& l = kernel.finite_system()->all_eigenvalues();
      out.assign(l.data(), l.data() + l.size());
      break;
    }
  }
  out.push_back(nugget);
  return out;
}

AdaptiveTrace adaptive_gp_loop(const Kernel& initial, const Domain& domain, const FieldFunction& f,
                               const AdaptiveOptions& options) {
  require(!options.batch_schedule.empty(), "adaptive loop: empty batch schedule");
  for (int m : options.batch_schedule) require(m >= 1, "adaptive loop: batch sizes must be positive");
  require(initial.dim() == domain.dim(), "adaptive loop: kernel and domain dimensions differ");
  require(options.initial_nugget >= 0.0, "adaptive loop: nugget must be nonnegative");
  using clock = std::chrono::steady_clock;

  AdaptiveTrace trace;
  trace.kernel = initial;
  trace.nugget = options.initial_nugget;
  trace.labels = hyperparameter_labels(initial);
  trace.design.points = PointSet(domain.dim(), 0);
  trace.design.provenance = "adaptive";
  const PointSet saa = domain.sample(derive_seed(options.seed, 1), options.n_mc);
  const PointSet err_points = domain.sample(derive_seed(options.seed, 4), options.error_samples);
  const Eigen::VectorXd f_err = f(err_points);

  Eigen::VectorXd y(0);
  for (std::size_t b = 0; b < options.batch_schedule.size(); ++b) {
    const auto start = clock::now();
    const int m = options.batch_schedule[b];
    AdaptiveRecord rec;
    rec.batch = static_cast<int>(b);

    const SaaContext ctx = make_saa_context(trace.kernel, saa, trace.nugget);
    OptimizerConfig cfg = options.design;
    cfg.seed = options.seed;
    cfg.batch_size = m;
    cfg.initial_design.reset();
    const IvarDesignResult step = extend_ivar_design(ctx, domain, trace.design.points, m, cfg, static_cast<int>(b));
    rec.ivar = step.ivar;
    const PointSet fresh = step.design.points.rightCols(m);
    const Eigen::VectorXd fy = f(fresh);
    Eigen::VectorXd grown(y.size() + m);
    grown << y, fy;
    y = grown;
    trace.design.points = step.design.points;
    trace.design.observations = y;
    trace.prior_mean = y.mean();

    if (options.refit && y.size() >= 2) {
      HyperparameterOptions h = options.hyper;
      h.prior_mean = trace.prior_mean;
      h.nugget = std::max(trace.nugget, kDefaultNugget);
      h.seed = derive_seed(options.seed, 3 + 100 * (b + 1));
      try {
        const HyperparameterFit fitted = optimize_hyperparameters(trace.kernel, trace.design, h);
        trace.kernel = fitted.kernel;
        trace.nugget = fitted.nugget;
      } catch (const NumericalError& e) {
        rec.refit_ok = false;
        std::clog << "adaptive loop: batch " << b << " refit failed, keeping previous hyperparameters (" << e.what()
                  << ")\n";
      }
    }

    const GpPosterior post = fit(trace.kernel, trace.design, trace.nugget, trace.prior_mean);
    const ErrorEstimate err = relative_l2_error(post.means(err_points), f_err);
    rec.n = static_cast<int>(y.size());
    rec.relative_error = err.value;
    rec.error_standard_error = err.standard_error;
    rec.hyperparameters = hyperparameter_values(trace.kernel, trace.nugget);
    rec.seconds = std::chrono::duration<double>(clock::now() - start).count();
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

std::vector<int> genz_extended_schedule(int total) {
  require(total >= 50, "genz schedule: total must be at least 50");
  std::vector<int> out;
  int n = 0;
  while (n < total) {
    const int step = std::min(n < 700 ? 50 : 200, total - n);
    out.push_back(step);
    n += step;
  }
  return out;
}

Design build_design(const std::string& strategy, const SaaContext& ctx, const Domain& domain, int n,
                    const CompareOptions& options) {
  OptimizerConfig cfg = options.optimizer;
  cfg.seed = options.seed;
  if (strategy == "ivar") return minimize_ivar_batch(ctx, domain, n, cfg).design;
  const std::string greedy = "ivar-greedy-";
  if (strategy.rfind(greedy, 0) == 0) {
    int m = 0;
    try {
      std::size_t used = 0;
      m = std::stoi(strategy.substr(greedy.size()), &used);
      if (used != strategy.size() - greedy.size()) m = 0;
    } catch (const std::exception&) {
      m = 0;
    }
    require(m >= 1, "unknown design strategy '" + strategy + "'");
    cfg.batch_size = m;
    return minimize_ivar_greedy(ctx, domain, n, cfg).design;
  }
  if (strategy == "alm") return alm_design(ctx.kernel, domain, n, ctx.nugget, options.alm_candidates, options.seed).design;
  if (strategy == "mi") return mi_design(ctx.kernel, domain, n, ctx.nugget, options.mi_candidates, options.seed).design;
  throw ConfigError("unknown design strategy '" + strategy + "' (expected ivar, ivar-greedy-M, alm or mi)");
}

std::vector<CompareRow> compare_designs(const Domain& domain, const Kernel& kernel, const CompareOptions& options) {
  require(!options.sizes.empty(), "compare: no design sizes");
  require(options.prior_draws >= 1, "compare: need at least one prior draw");
  require(options.test_points >= 2, "compare: need at least two test points");
  require(kernel.dim() == domain.dim(), "compare: kernel and domain dimensions differ");
  for (int n : options.sizes) require(n >= 1, "compare: design sizes must be positive");
  const int draws = options.prior_draws;
  const int n_max = *std::max_element(options.sizes.begin(), options.sizes.end());

  const PointSet test = domain.sample(derive_seed(options.seed, 6), options.test_points);
  const PriorSampler test_sampler(kernel, test);
  Rng rng(derive_seed(options.seed, 7));
  std::normal_distribution<double> normal;
  Eigen::MatrixXd z_test(options.test_points, draws), z_design(n_max, draws);
  for (Eigen::Index j = 0; j < draws; ++j)
    for (Eigen::Index i = 0; i < z_test.rows(); ++i) z_test(i, j) = normal(rng);
  for (Eigen::Index j = 0; j < draws; ++j)
    for (Eigen::Index i = 0; i < n_max; ++i) z_design(i, j) = normal(rng);
  const auto l_test = test_sampler.lower().triangularView<Eigen::Lower>();
  const Eigen::MatrixXd f_test = l_test * z_test;

  const SaaContext ctx = make_saa_context(kernel, domain, options.n_mc, options.nugget, options.seed);
  std::vector<CompareRow> rows;
  for (int n : options.sizes) {
    for (const auto& strategy : options.strategies) {
      const Design design = build_design(strategy, ctx, domain, n, options);
      const PointSet& x = design.points;
      // joint draw ordered [test, design]: f_x = B^T z_test + S^{1/2} z_x
      const Eigen::MatrixXd k_tx = kernel.cross(test, x);
      const Eigen::MatrixXd b = l_test.solve(k_tx);
      Eigen::MatrixXd schur = kernel.gram(x) - b.transpose() * b;
      schur.diagonal().array() += kPriorJitter;
      schur = 0.5 * (schur + schur.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(schur);
      const Eigen::MatrixXd root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
      const Eigen::MatrixXd f_x = b.transpose() * z_test + root * z_design.topRows(n);

      const GpPosterior post = GpPosterior::condition(kernel, x, options.nugget);
      const Eigen::MatrixXd m_test = k_tx * post.factor()->solve(f_x);
      Eigen::VectorXd errs(draws);
      for (int j = 0; j < draws; ++j) errs(j) = relative_l2_error(m_test.col(j), f_test.col(j)).value;

      CompareRow row;
      row.strategy = strategy;
      row.n = n;
      row.mean_rel_err = errs.mean();
      row.std_rel_err = draws > 1 ? std::sqrt((errs.array() - row.mean_rel_err).square().sum() / (draws - 1)) : 0.0;
      row.seed = options.seed;
      row.ivar = ivar_saa(ctx, x);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<LebesgueRow> lebesgue_study(const Kernel& kernel, const Domain& domain, const std::vector<int>& sizes,
                                        double nugget, int n_mc, int grid_points, const OptimizerConfig& config) {
  require(domain.shape() == DomainShape::Hypercube && domain.dim() == 1, "lebesgue study: needs a 1-D interval");
  require(grid_points >= 2, "lebesgue study: grid needs at least two points");
  const SaaContext ctx = make_saa_context(kernel, domain, n_mc, nugget, config.seed);
  const PointSet grid = uniform_grid(domain.lower(), domain.upper(), grid_points);
  std::vector<LebesgueRow> rows;
  for (int n : sizes) {
    const IvarDesignResult res = minimize_ivar_batch(ctx, domain, n, config);
    rows.push_back({n, lebesgue_constant(kernel, res.design.points, nugget, grid), res.ivar});
  }
  return rows;
}

SpectrumStudy spectrum_study(const SpectrumOptions& options) {
  require(options.nodes >= 1 && options.terms >= 1 && options.max_index >= 1, "spectrum study: sizes must be positive");
  const TestFunction f = test_function("sine-shift");
  const Kernel kernel = Kernel::mehler({options.decay});
  const auto basis = eigensystem_of(kernel);
  const QuadratureRule rule = gauss_hermite(options.nodes);
  const QuadratureRule ref = gauss_hermite(kMaxGaussHermiteNodes);
  const Eigen::VectorXd f_ref = f(ref.nodes);

  SpectrumStudy out;
  const PsaApproximation psa = psa_fit(rule, basis, options.terms, f(rule.nodes));
  out.psa_error = relative_l2_error(psa.evaluate(ref.nodes), f_ref, ref.weights).value;
  out.psa_spectrum = error_spectrum(psa.evaluator(), f.evaluator, *basis, options.max_index, ref);

  Design quad;
  quad.points = rule.nodes;
  quad.observations = f(rule.nodes);
  const GpPosterior gp_quad = fit(kernel, quad, options.nugget);
  const FieldFunction m_quad = [&](const PointSet& x) { return gp_quad.means(x); };
  out.gp_quadrature_error = relative_l2_error(m_quad(ref.nodes), f_ref, ref.weights).value;
  out.gp_quadrature_spectrum = error_spectrum(m_quad, f.evaluator, *basis, options.max_index, ref);

  // an exactly zero nugget makes the SAA objective singular at coincident points
  const double design_nugget = std::max(options.nugget, kDefaultNugget);
  const IvarDesignResult res = minimize_ivar_batch(kernel, Domain::gaussian(1), options.nodes, design_nugget,
                                                   options.n_mc, options.optimizer);
  Design ivd;
  ivd.points = res.design.points;
  ivd.observations = f(ivd.points);
  out.ivar_design = ivd.points;
  const GpPosterior gp_ivar = fit(kernel, ivd, options.nugget);
  const FieldFunction m_ivar = [&](const PointSet& x) { return gp_ivar.means(x); };
  out.gp_ivar_error = relative_l2_error(m_ivar(ref.nodes), f_ref, ref.weights).value;
  out.gp_ivar_spectrum = error_spectrum(m_ivar, f.evaluator, *basis, options.max_index, ref);

  const FieldFunction zero = [](const PointSet& x) { return Eigen::VectorXd::Zero(x.cols()).eval(); };
  out.exact_coefficients = error_spectrum(zero, f.evaluator, *basis, options.max_index, ref);
  return out;
}

std::vector<VerifyCheck> verify_suite(std::uint64_t seed, int configurations) {
  require(configurations >= 1, "verify: need at least one configuration");
  Rng rng(derive_seed(seed, 9));
  std::uniform_int_distribution<int> pick_terms(4, 12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  auto random_y = [&](Eigen::Index n) {
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = normal(rng);
    return y;
  };

  VerifyCheck bound{"bound-dominance", 0.0, 0.0, true, ""};
  VerifyCheck identity{"identity-relative", 0.0, 1e-10, true, ""};
  for (int c = 0; c < configurations; ++c) {
    const int l = pick_terms(rng);
    const int nodes = l + static_cast<int>(unit(rng) * 4.0);
    const int l_gp = l + static_cast<int>(unit(rng) * (61 - l));
    const double t = 0.3 + 0.6 * unit(rng);
    const double nugget = std::pow(10.0, -8.0 + 6.0 * unit(rng));
    const HermiteEigenSystem system({t});
    const QuadratureRule rule = gauss_hermite(nodes);
    const Eigen::VectorXd y = random_y(nodes);
    const double b = gp_psa_bound(system, rule, l, l_gp, nugget, y).value;
    const double d = gp_psa_distance(system, rule, l, l_gp, nugget, y);
    // report the worst ratio actual / bound (must stay <= 1)
    const double ratio = b > 0.0 ? d / b : (d > 0.0 ? INFINITY : 0.0);
    if (ratio >= bound.value) {
      bound.value = ratio;
      std::ostringstream s;
      s << "l=" << l << " l_gp=" << l_gp << " N=" << nodes << " t=" << t << " nugget=" << nugget;
      bound.detail = s.str();
    }
    const IdentitySides sides = ivar_orthogonal_identity(system, rule, l, l_gp, nugget);
    const double rel = std::abs(sides.left - sides.right) / std::max(std::abs(sides.left), 1e-300);
    identity.value = std::max(identity.value, rel);
  }
  bound.tolerance = 1.0;
  bound.passed = bound.value <= 1.0;
  identity.passed = identity.value <= identity.tolerance;

  VerifyCheck zero{"identity-zero-nugget", 0.0, 1e-10, true, "l = l_gp = N = 10, t = 0.8"};
  {
    const HermiteEigenSystem system({0.8});
    const IdentitySides s = ivar_orthogonal_identity(system, gauss_hermite(10), 10, 10, 0.0);
    zero.value = std::max(std::abs(s.left), std::abs(s.right));
    zero.passed = zero.value <= zero.tolerance;
  }

  VerifyCheck degenerate{"gp-psa-degeneracy", 0.0, 1e-5, true, "finite rank, l = l_gp = N = 10, nugget 1e-12"};
  {
    const HermiteEigenSystem system({0.8});
    const QuadratureRule rule = gauss_hermite(10);
    for (int r = 0; r < 10; ++r) {
      const Eigen::VectorXd y = random_y(10);
      const double dist = std::sqrt(gp_psa_distance(system, rule, 10, 10, 1e-12, y));
      degenerate.value = std::max(degenerate.value, dist / y.norm());
    }
    degenerate.passed = degenerate.value <= degenerate.tolerance;
  }
  return {bound, identity, zero, degenerate};
}

}  // namespace ivar
