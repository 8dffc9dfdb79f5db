#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ivar/design.hpp"
#include "ivar/domains.hpp"
#include "ivar/hyperparameters.hpp"
#include "ivar/kernels.hpp"
#include "ivar/psa.hpp"

namespace ivar {

struct TestFunction {
  std::string name;
  int dimension = 0;
  FieldFunction evaluator;
  Domain measure = Domain::gaussian(1);
  Eigen::VectorXd coefficients;  // genz10 only
  double offset = 0.0;           // genz10 only (w1)

  Eigen::VectorXd operator()(const PointSet& x) const { return evaluator(x); }
  double at(const Point& x) const;
};

// f1, f2, ishigami, genz10 and sine-shift, all on standard Gaussian inputs.
// The seed only matters for genz10 (coefficient draw).
TestFunction test_function(const std::string& name, std::uint64_t seed = 0);

inline constexpr double kPriorJitter = 1e-10;

// Exact joint draws from the zero-mean GP prior at a fixed point set.
class PriorSampler {
 public:
  PriorSampler(const Kernel& kernel, const PointSet& points, double jitter = kPriorJitter);
  Eigen::VectorXd draw(std::uint64_t seed) const;
  int size() const { return static_cast<int>(lower_.rows()); }
  const Eigen::MatrixXd& lower() const { return lower_; }

 private:
  Eigen::MatrixXd lower_;
};

Eigen::VectorXd sample_prior_function(const Kernel& kernel, const PointSet& points, std::uint64_t seed,
                                      double jitter = kPriorJitter);

inline constexpr int kDefaultErrorSamples = 10000;

struct ErrorEstimate {
  double value = 0.0;           // ||f - approx|| / ||f||
  double standard_error = 0.0;  // delta-method MC standard error (0 for quadrature)
  int samples = 0;
  bool quadrature = false;      // high-order Gauss-Hermite rule used instead of MC
};

// Relative L2 error under the domain measure with n_mc samples drawn from
// stream 4 of `seed`. With allow_quadrature, Gaussian domains of dimension
// <= 2 use a tensor Gauss-Hermite rule instead. ||f|| ~ 0 throws ConfigError
// ("degenerate normalization").
ErrorEstimate relative_l2_error(const FieldFunction& approx, const FieldFunction& f, const Domain& domain, int n_mc,
                                std::uint64_t seed, bool allow_quadrature = false);
// Same estimate from values at equally weighted sample points.
ErrorEstimate relative_l2_error(const Eigen::VectorXd& approx, const Eigen::VectorXd& truth);
// Weighted version (quadrature nodes).
ErrorEstimate relative_l2_error(const Eigen::VectorXd& approx, const Eigen::VectorXd& truth,
                                const Eigen::VectorXd& weights);

// Hyperparameters on their natural scale (lengths, variance, decay rates,
// eigenvalues) followed by the nugget.
std::vector<std::string> hyperparameter_labels(const Kernel& kernel);
std::vector<double> hyperparameter_values(const Kernel& kernel, double nugget);

struct AdaptiveOptions {
  std::vector<int> batch_schedule;
  std::uint64_t seed = 0;
  int n_mc = kDefaultSaaPoints;
  int error_samples = kDefaultErrorSamples;
  double initial_nugget = 1e-6;
  bool refit = true;
  OptimizerConfig design;
  HyperparameterOptions hyper;
};

struct AdaptiveRecord {
  int batch = 0;
  int n = 0;  // cumulative design size
  std::vector<double> hyperparameters;
  double relative_error = 0.0;
  double error_standard_error = 0.0;
  double ivar = 0.0;     // SAA objective of the design under the kernel used to build it
  double seconds = 0.0;  // wall time of the batch (design, evaluation, refit)
  bool refit_ok = true;
};

struct AdaptiveTrace {
  std::vector<std::string> labels;
  std::vector<AdaptiveRecord> records;
  Design design;
  Kernel kernel = Kernel::squared_exponential(1, 1.0);
  double nugget = 0.0;
  double prior_mean = 0.0;
};

// Alternates greedy IVAR batches with maximum likelihood refits. The SAA
// points (stream 1) and error samples (stream 4) stay fixed for the whole
// run; the prior mean is the sample mean of the observations.
AdaptiveTrace adaptive_gp_loop(const Kernel& initial, const Domain& domain, const FieldFunction& f,
                               const AdaptiveOptions& options);

// 50-point batches up to 700 points, then 200-point batches up to `total`.
std::vector<int> genz_extended_schedule(int total = 1500);

struct CompareOptions {
  std::vector<int> sizes;
  std::vector<std::string> strategies{"ivar", "ivar-greedy-1", "ivar-greedy-4", "alm", "mi"};
  int prior_draws = 100;
  int test_points = 2000;
  double nugget = 1e-10;
  int n_mc = kDefaultSaaPoints;
  int alm_candidates = kDefaultAlmCandidates;
  int mi_candidates = kDefaultMiCandidates;
  std::uint64_t seed = 0;
  OptimizerConfig optimizer;
};

struct CompareRow {
  std::string strategy;
  int n = 0;
  double mean_rel_err = 0.0;
  double std_rel_err = 0.0;
  std::uint64_t seed = 0;
  double ivar = 0.0;  // SAA IVAR of the design
};

// Builds every (strategy, N) design, then scores the GP mean on prior draws
// shared across designs: the draw on the test points is fixed and the values
// at the design points are drawn from the exact conditional (block Cholesky).
std::vector<CompareRow> compare_designs(const Domain& domain, const Kernel& kernel, const CompareOptions& options);
Design build_design(const std::string& strategy, const SaaContext& ctx, const Domain& domain, int n,
                    const CompareOptions& options);

struct LebesgueRow {
  int n = 0;
  double lebesgue = 0.0;
  double ivar = 0.0;
};

// Full-batch IVAR designs for each N and their Lebesgue constants on a
// uniform grid over the (1-D) domain.
std::vector<LebesgueRow> lebesgue_study(const Kernel& kernel, const Domain& domain, const std::vector<int>& sizes,
                                        double nugget, int n_mc, int grid_points, const OptimizerConfig& config);

struct SpectrumStudy {
  double psa_error = 0.0;
  double gp_quadrature_error = 0.0;
  double gp_ivar_error = 0.0;
  Eigen::VectorXd psa_spectrum;
  Eigen::VectorXd gp_quadrature_spectrum;
  Eigen::VectorXd gp_ivar_spectrum;
  Eigen::VectorXd exact_coefficients;  // |<f, phi_i>|
  PointSet ivar_design;
};

// PSA vs GP on Gauss-Hermite nodes vs GP on an IVAR design, 1-D Mehler
// kernel, sin(pi x + 0.2). Errors use the high-order reference rule.
struct SpectrumOptions {
  int nodes = 20;
  std::size_t terms = 20;
  double decay = 0.8;
  double nugget = 0.0;
  std::size_t max_index = 40;
  int n_mc = kDefaultSaaPoints;
  OptimizerConfig optimizer;
};
SpectrumStudy spectrum_study(const SpectrumOptions& options);

struct VerifyCheck {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

// Randomized bound-dominance, identity and degeneracy checks.
std::vector<VerifyCheck> verify_suite(std::uint64_t seed, int configurations = 20);

}  // namespace ivar
