#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ivar/common.hpp"
#include "ivar/eigensystem.hpp"
#include "ivar/quadrature.hpp"

namespace ivar {

// Vectorized function: values at the columns of a point set.
using FieldFunction = std::function<Eigen::VectorXd(const PointSet&)>;

inline constexpr double kPsaDefectWarn = 1e-6;
inline constexpr double kPsaDefectError = 1e-2;

struct PsaApproximation {
  std::shared_ptr<const EigenSystem> basis;
  std::size_t terms = 0;
  Eigen::VectorXd coefficients;
  QuadratureRule rule;
  double defect = 0.0;
  std::vector<std::string> warnings;

  Eigen::VectorXd evaluate(const PointSet& x) const;
  FieldFunction evaluator() const;
};

// c_i = sum_k w_k y_k phi_i(x_k) for i < terms. Throws ConfigError
// ("non-orthogonalizing rule") when the orthogonality defect exceeds 1e-2 and
// records a warning above 1e-6.
PsaApproximation psa_fit(const QuadratureRule& rule, std::shared_ptr<const EigenSystem> basis, std::size_t terms,
                         const Eigen::VectorXd& observations);

// Gauss-Hermite rule (tensorized in d dimensions) with exactness at least
// 2 (max_terms + 10) per coordinate, capped at 200 nodes per dimension.
QuadratureRule high_order_rule(int dim, std::size_t max_terms);

// |<approx - f, phi_i>| for i < max_terms, integrals by `reference`.
Eigen::VectorXd error_spectrum(const FieldFunction& approx, const FieldFunction& f, const EigenSystem& basis,
                               std::size_t max_terms, const QuadratureRule& reference);

struct GpPsaBound {
  double value = 0.0;
  double node_bound = 0.0;       // M = max_{i<l, k} |phi_i(x_k)|
  double max_weight = 0.0;       // w_max
  double min_gram_eigenvalue = 0.0;  // s_N of the nugget-free truncated Gram matrix
  double tail_operator_norm = 0.0;   // spectral norm of sum_{j>l} lambda_j Phi_j Phi_j^T + nugget I
  double first_term = 0.0;
  double second_term = 0.0;
  double defect = 0.0;
  int nodes = 0;
};

// Upper bound on |m - f_l|^2 in L2(mu) between the GP mean of the kernel
// truncated at `gp_terms` (zero prior mean, nugget > 0) and the l-term PSA,
// both built from the rule's nodes and observations y.
GpPsaBound gp_psa_bound(const EigenSystem& system, const QuadratureRule& rule, std::size_t terms, std::size_t gp_terms,
                        double nugget, const Eigen::VectorXd& observations);

// The same squared L2(mu) distance, evaluated exactly through the
// eigen-coefficients of both approximations (mu-orthonormal eigenfunctions).
double gp_psa_distance(const EigenSystem& system, const QuadratureRule& rule, std::size_t terms, std::size_t gp_terms,
                       double nugget, const Eigen::VectorXd& observations);

struct IdentitySides {
  double left = 0.0;
  double right = 0.0;
};

// left  = sum_{i<l} lambda_i (1 - lambda_i Phi_i^T R Phi_i)
// right = sum_{i<l} lambda_i Phi_i^T W (sum_{j>=l} lambda_j Phi_j Phi_j^T + nugget I) R Phi_i
IdentitySides ivar_orthogonal_identity(const EigenSystem& system, const QuadratureRule& rule, std::size_t terms,
                                       std::size_t gp_terms, double nugget);

}  // namespace ivar
