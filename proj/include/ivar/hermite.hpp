#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "ivar/common.hpp"

namespace ivar {

/// Probabilists' Hermite polynomial normalized against the standard normal
/// measure, He_n(x) / sqrt(n!), evaluated with the normalized three-term
/// recurrence phi_{k+1} = (x phi_k - sqrt(k) phi_{k-1}) / sqrt(k+1).
double hermite_normalized(int n, double x);

/// phi_0(x) .. phi_max_degree(x).
Eigen::VectorXd hermite_table(int max_degree, double x);

using MultiIndex = std::vector<int>;

/// First `count` multi-indices in graded lexicographic order: by total degree,
/// then by ascending lexicographic comparison of the index tuple, so in 2-D
/// the order starts (0,0), (0,1), (1,0), (0,2), (1,1), (2,0).
std::vector<MultiIndex> graded_multi_indices(int dim, std::size_t count);

/// True if a precedes b in graded lexicographic order.
bool graded_less(const MultiIndex& a, const MultiIndex& b);

/// Rows are tensor products prod_k phi_{idx[k]}(x_k) evaluated at each point
/// (column) of `points`.
Eigen::MatrixXd hermite_products(const std::vector<MultiIndex>& indices, const PointSet& points);

/// Gradient of each tensor product at a single point; result is count x d.
Eigen::MatrixXd hermite_product_gradients(const std::vector<MultiIndex>& indices, const Point& x);

}  // namespace ivar
