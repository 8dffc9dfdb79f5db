#include "ivar/hermite.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ivar {

double hermite_normalized(int n, double x) {
  require(n >= 0, "hermite_normalized: degree must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) / std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

Eigen::VectorXd hermite_table(int max_degree, double x) {
  require(max_degree >= 0, "hermite_table: degree must be nonnegative");
  Eigen::VectorXd out(max_degree + 1);
  out(0) = 1.0;
  if (max_degree >= 1) out(1) = x;
  for (int k = 1; k < max_degree; ++k) {
    out(k + 1) = (x * out(k) - std::sqrt(static_cast<double>(k)) * out(k - 1)) / std::sqrt(static_cast<double>(k + 1));
  }
  return out;
}

bool graded_less(const MultiIndex& a, const MultiIndex& b) {
  const int da = std::accumulate(a.begin(), a.end(), 0);
  const int db = std::accumulate(b.begin(), b.end(), 0);
  if (da != db) return da < db;
  return a < b;
}

std::vector<MultiIndex> graded_multi_indices(int dim, std::size_t count) {
  require(dim >= 1, "graded_multi_indices: dimension must be positive");
  std::vector<MultiIndex> out;
  out.reserve(count);
  // Walk total degrees; within a degree enumerate tuples in ascending
  // lexicographic order by recursion over the leading coordinate.
  for (int degree = 0; out.size() < count; ++degree) {
    MultiIndex idx(dim, 0);
    auto fill = [&](auto&& self, int pos, int remaining) -> void {
      if (out.size() >= count) return;
      if (pos == dim - 1) {
        idx[pos] = remaining;
        out.push_back(idx);
        return;
      }
      for (int v = 0; v <= remaining; ++v) {
        idx[pos] = v;
        self(self, pos + 1, remaining - v);
      }
    };
    fill(fill, 0, degree);
  }
  return out;
}

namespace {

int max_degree(const std::vector<MultiIndex>& indices) {
  int m = 0;
  for (const auto& idx : indices)
    for (int v : idx) m = std::max(m, v);
  return m;
}

}  // namespace

Eigen::MatrixXd hermite_products(const std::vector<MultiIndex>& indices, const PointSet& points) {
  const auto count = static_cast<Eigen::Index>(indices.size());
  const Eigen::Index n = points.cols();
  const Eigen::Index dim = points.rows();
  Eigen::MatrixXd out(count, n);
  if (count == 0) return out;
  const int top = max_degree(indices);
  std::vector<Eigen::VectorXd> tables(dim);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index c = 0; c < dim; ++c) tables[c] = hermite_table(top, points(c, k));
    for (Eigen::Index i = 0; i < count; ++i) {
      const auto& idx = indices[i];
      double v = 1.0;
      for (Eigen::Index c = 0; c < dim; ++c) v *= tables[c](idx[c]);
      out(i, k) = v;
    }
  }
  return out;
}

Eigen::MatrixXd hermite_product_gradients(const std::vector<MultiIndex>& indices, const Point& x) {
  const auto count = static_cast<Eigen::Index>(indices.size());
  const Eigen::Index dim = x.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(count, dim);
  if (count == 0) return out;
  const int top = max_degree(indices);
  std::vector<Eigen::VectorXd> tables(dim);
  for (Eigen::Index c = 0; c < dim; ++c) tables[c] = hermite_table(top, x(c));
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& idx = indices[i];
    for (Eigen::Index c = 0; c < dim; ++c) {
      // phi_n' = sqrt(n) phi_{n-1}
      const int n = idx[c];
      double v = n == 0 ? 0.0 : std::sqrt(static_cast<double>(n)) * tables[c](n - 1);
      for (Eigen::Index o = 0; o < dim && v != 0.0; ++o)
        if (o != c) v *= tables[o](idx[o]);
      out(i, c) = v;
    }
  }
  return out;
}

}  // namespace ivar
