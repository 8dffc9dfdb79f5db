#include "ivar/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ivar/hermite.hpp"

namespace ivar {

QuadratureRule gauss_hermite(int n) {
  require(n >= 1, "gauss_hermite: need at least one node");
  if (n > kMaxGaussHermiteNodes) throw ConfigError("gauss_hermite: unvalidated range (n > 200)");
  QuadratureRule rule;
  rule.nodes.resize(1, n);
  rule.weights.resize(n);
  rule.exactness = 2 * n - 1;
  if (n == 1) {
    rule.nodes(0, 0) = 0.0;
    rule.weights(0) = 1.0;
    return rule;
  }
  // Jacobi matrix: zero diagonal, off-diagonal sqrt(k)
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi, Eigen::EigenvaluesOnly);
  Eigen::VectorXd x = es.eigenvalues();

  // Newton polish on phi_n(x) = 0, phi_n' = sqrt(n) phi_{n-1}
  for (int i = 0; i < n; ++i) {
    for (int it = 0; it < 3; ++it) {
      const Eigen::VectorXd table = hermite_table(n, x(i));
      const double deriv = std::sqrt(static_cast<double>(n)) * table(n - 1);
      if (deriv == 0.0) break;
      const double step = table(n) / deriv;
      x(i) -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x(i)))) break;
    }
  }
  // Christoffel weights w_k = 1 / sum_{j<n} phi_j(x_k)^2
  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = 1.0 / hermite_table(n - 1, x(i)).squaredNorm();

  // exact symmetry about 0
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double xm = 0.5 * (x(j) - x(i));
    x(i) = -xm;
    x(j) = xm;
    const double wm = 0.5 * (w(i) + w(j));
    w(i) = w(j) = wm;
  }
  if (n % 2 == 1) x(n / 2) = 0.0;
  w /= w.sum();
  rule.nodes.row(0) = x.transpose();
  rule.weights = w;
  return rule;
}

QuadratureRule tensor_rule(const std::vector<QuadratureRule>& rules) {
  require(!rules.empty(), "tensor_rule: need at least one rule");
  double total = 1.0;
  for (const auto& r : rules) {
    require(r.dim() == 1 && r.size() >= 1, "tensor_rule: factors must be one-dimensional rules");
    total *= r.size();
  }
  if (total > 1e7) throw ConfigError("tensor_rule: node count overflow (more than 1e7 nodes)");
  if (rules.size() == 1) return rules[0];

  const int d = static_cast<int>(rules.size());
  // enumerate index tuples, then sort by (total index, lexicographic)
  std::vector<MultiIndex> tuples;
  tuples.reserve(static_cast<std::size_t>(total));
  MultiIndex idx(d, 0);
  while (true) {
    tuples.push_back(idx);
    int k = d - 1;
    while (k >= 0 && ++idx[k] == rules[k].size()) idx[k--] = 0;
    if (k < 0) break;
  }
  std::stable_sort(tuples.begin(), tuples.end(), graded_less);

  QuadratureRule out;
  out.nodes.resize(d, static_cast<Eigen::Index>(tuples.size()));
  out.weights.resize(static_cast<Eigen::Index>(tuples.size()));
  out.measure = rules[0].measure;
  out.exactness = rules[0].exactness;
  for (const auto& r : rules) out.exactness = std::min(out.exactness, r.exactness);
  for (std::size_t t = 0; t < tuples.size(); ++t) {
    double w = 1.0;
    for (int k = 0; k < d; ++k) {
      out.nodes(k, static_cast<Eigen::Index>(t)) = rules[k].nodes(0, tuples[t][k]);
      w *= rules[k].weights(tuples[t][k]);
    }
    out.weights(static_cast<Eigen::Index>(t)) = w;
  }
  return out;
}

double orthogonality_defect(const QuadratureRule& rule, const EigenSystem& basis, std::size_t count) {
  require(count >= 1, "orthogonality_defect: need at least one basis function");
  require(rule.dim() == basis.dim(), "orthogonality_defect: dimension mismatch");
  const Eigen::MatrixXd phi = basis.eigenfunctions(count, rule.nodes);  // count x N
  const Eigen::MatrixXd gram = phi * rule.weights.asDiagonal() * phi.transpose();
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace ivar
