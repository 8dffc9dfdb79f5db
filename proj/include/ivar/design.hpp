#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ivar/domains.hpp"
#include "ivar/eigensystem.hpp"
#include "ivar/gp.hpp"
#include "ivar/kernels.hpp"
#include "ivar/optimizer.hpp"

namespace ivar {

inline constexpr int kDefaultSaaPoints = 10000;

// Fixed Monte Carlo points for the sample-average IVAR objective.
struct SaaContext {
  Kernel kernel;
  double nugget = kDefaultNugget;
  PointSet points;                 // d x N_mc
  Eigen::VectorXd prior_variance;  // K(x_i, x_i) at the SAA points
  double prior_ivar = 0.0;         // mean of prior_variance
};

// SAA points are drawn from the domain with stream 1 of `seed`.
SaaContext make_saa_context(const Kernel& kernel, const Domain& domain, int n_mc, double nugget, std::uint64_t seed);
SaaContext make_saa_context(const Kernel& kernel, const PointSet& saa_points, double nugget);

struct IvarValue {
  double value = 0.0;
  Eigen::MatrixXd gradient;  // d x N, empty unless requested
  bool penalized = false;    // covariance factorization failed
};

// Mean posterior variance over the SAA points given the candidate design.
// A failed factorization yields 10 x the prior IVAR with zero gradient.
IvarValue ivar_saa_evaluate(const SaaContext& ctx, const PointSet& design, bool with_gradient);
double ivar_saa(const SaaContext& ctx, const PointSet& design);
Eigen::MatrixXd ivar_saa_grad(const SaaContext& ctx, const PointSet& design);

// sum_i lambda_i - sum_i lambda_i^2 Phi_i^T R Phi_i over the first `terms`
// eigenpairs, with R the inverse Gram of the truncated kernel plus nugget.
double ivar_eigen(const EigenSystem& system, const PointSet& design, double nugget, std::size_t terms);

struct OptimizerConfig {
  int max_iterations = 300;
  double gradient_tolerance = 1e-9;
  double objective_tolerance = 1e-12;
  int restarts = 3;
  std::uint64_t seed = 0;
  int batch_size = 1;  // M for greedy designs
  double initial_step = 0.05;
  // Explicit starting points for the first restart of the (first) batch;
  // other restarts draw i.i.d. domain samples.
  std::optional<PointSet> initial_design;
};

struct TraceRow {
  int batch = 0;
  int restart = 0;
  int iteration = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
};

struct IvarDesignResult {
  Design design;
  double ivar = 0.0;                // SAA objective of the returned design
  std::vector<double> batch_ivar;   // objective after each batch (greedy) or one entry (batch)
  std::vector<int> batch_sizes;
  std::vector<TraceRow> trace;
  bool converged = false;           // every accepted run met a tolerance
  int projected_points = 0;         // exterior points moved to the nearest SAA point
  std::vector<std::string> warnings;
};

// Minimizes the SAA IVAR jointly over all N points. Restart r starts from
// domain samples drawn with stream 1000 + r.
IvarDesignResult minimize_ivar_batch(const SaaContext& ctx, const Domain& domain, int n, const OptimizerConfig& config);
IvarDesignResult minimize_ivar_batch(const Kernel& kernel, const Domain& domain, int n, double nugget, int n_mc,
                                     const OptimizerConfig& config);

// Greedy-M: ceil(N / M) successive batches, each optimizing M new points with
// the earlier ones fixed; when M does not divide N the final batch holds the
// remaining N mod M points. Batch j, restart r uses stream 1000 + r + 7919 j,
// so M = N reproduces minimize_ivar_batch.
IvarDesignResult minimize_ivar_greedy(const SaaContext& ctx, const Domain& domain, int n, const OptimizerConfig& config);
IvarDesignResult minimize_ivar_greedy(const Kernel& kernel, const Domain& domain, int n, double nugget, int n_mc,
                                      const OptimizerConfig& config);

// Continues an existing design by one greedy batch of `m` points.
IvarDesignResult extend_ivar_design(const SaaContext& ctx, const Domain& domain, const PointSet& fixed, int m,
                                    const OptimizerConfig& config, int batch_index = 0);

struct DiscreteDesignResult {
  Design design;
  std::vector<int> indices;   // chosen candidate indices, in order
  std::vector<int> skipped;   // candidates rejected as near-duplicates (MI)
  PointSet candidates;
};

inline constexpr int kDefaultAlmCandidates = 10000;
inline constexpr int kDefaultMiCandidates = 150;

// Greedy maximum posterior variance over a fixed candidate set; ties go to
// the lowest index. `existing` points condition the first pick.
DiscreteDesignResult alm_select(const Kernel& kernel, const PointSet& candidates, int n, double nugget,
                                const PointSet& existing = PointSet());
DiscreteDesignResult alm_design(const Kernel& kernel, const Domain& domain, int n, double nugget, int n_candidates,
                                std::uint64_t seed);

// Greedy mutual information: picks the candidate y maximizing
// var(y | chosen) / var(y | unchosen \ {y}), both including the nugget.
// Candidates whose noise-free conditional variance given the unchosen set
// falls below max(1e-12, 10 nugget) are skipped as near-duplicates.
DiscreteDesignResult mi_select(const Kernel& kernel, const PointSet& candidates, int n, double nugget);
DiscreteDesignResult mi_design(const Kernel& kernel, const Domain& domain, int n, double nugget, int n_candidates,
                               std::uint64_t seed);

}  // namespace ivar
