#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ivar/common.hpp"
#include "ivar/eigensystem.hpp"

namespace ivar {

struct QuadratureRule {
  PointSet nodes;           // d x N
  Eigen::VectorXd weights;  // N
  ReferenceMeasure measure = ReferenceMeasure::StandardGaussian;
  int exactness = 0;        // total polynomial degree integrated exactly (per coordinate for tensor rules)

  int size() const { return static_cast<int>(weights.size()); }
  int dim() const { return static_cast<int>(nodes.rows()); }
};

inline constexpr int kMaxGaussHermiteNodes = 200;

// n-node Gauss rule for the standard normal (probabilists' Hermite weight)
// from the eigen-decomposition of the Jacobi matrix of the normalized
// recurrence. Exact for polynomials of degree <= 2n - 1.
QuadratureRule gauss_hermite(int n);

// Cartesian product of one-dimensional rules with product weights. Nodes are
// listed in graded order of their per-dimension index tuples.
QuadratureRule tensor_rule(const std::vector<QuadratureRule>& rules);

// max_{i,j < count} |sum_k w_k phi_i(x_k) phi_j(x_k) - delta_ij|
double orthogonality_defect(const QuadratureRule& rule, const EigenSystem& basis, std::size_t count);

}  // namespace ivar
