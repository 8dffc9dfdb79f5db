#include "ivar/eigensystem.hpp"

#include <cmath>
#include <queue>
#include <set>
#include <sstream>

namespace ivar {

void EigenSystem::check_count(std::size_t count) const {
  if (const auto r = rank(); r && count > *r) {
    std::ostringstream msg;
    msg << "eigensystem has rank " << *r << ", requested " << count << " terms";
    throw ConfigError(msg.str());
  }
}

HermiteEigenSystem::HermiteEigenSystem(std::vector<double> decay) : decay_(std::move(decay)) {
  require(!decay_.empty(), "HermiteEigenSystem: dimension must be positive");
  for (double t : decay_) require(t > 0.0 && t < 1.0, "HermiteEigenSystem: decay rates must lie in (0,1)");
}

std::vector<MultiIndex> HermiteEigenSystem::multi_indices(std::size_t count) const {
  // Best-first search over the index lattice. Incrementing any coordinate
  // multiplies the eigenvalue by t_k < 1, so popping in order of decreasing
  // eigenvalue yields the leading `count` terms exactly.
  const int d = dim();
  struct Node {
    double log_lambda;
    MultiIndex idx;
  };
  auto after = [](const Node& a, const Node& b) {
    // true if a should come after b
    const double scale = std::max({1.0, std::abs(a.log_lambda), std::abs(b.log_lambda)});
    if (std::abs(a.log_lambda - b.log_lambda) > 1e-12 * scale) return a.log_lambda < b.log_lambda;
    return graded_less(b.idx, a.idx);
  };
  std::priority_queue<Node, std::vector<Node>, decltype(after)> frontier(after);
  std::set<MultiIndex> seen;
  std::vector<MultiIndex> out;
  out.reserve(count);
  frontier.push({0.0, MultiIndex(d, 0)});
  seen.insert(MultiIndex(d, 0));
  while (out.size() < count) {
    Node top = frontier.top();
    frontier.pop();
    for (int k = 0; k < d; ++k) {
      Node child = top;
      child.idx[k] += 1;
      child.log_lambda += std::log(decay_[k]);
      if (seen.insert(child.idx).second) frontier.push(std::move(child));
    }
    out.push_back(std::move(top.idx));
  }
  return out;
}

Eigen::VectorXd HermiteEigenSystem::eigenvalues(std::size_t count) const {
  const auto indices = multi_indices(count);
  Eigen::VectorXd out(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) {
    double v = 1.0;
    for (int k = 0; k < dim(); ++k) v *= std::pow(decay_[k], indices[i][k]);
    out(static_cast<Eigen::Index>(i)) = v;
  }
  return out;
}

Eigen::MatrixXd HermiteEigenSystem::eigenfunctions(std::size_t count, const PointSet& points) const {
  require(points.rows() == dim(), "eigenfunctions: point dimension mismatch");
  return hermite_products(multi_indices(count), points);
}

Eigen::MatrixXd HermiteEigenSystem::eigenfunction_gradients(std::size_t count, const Point& x) const {
  require(x.size() == dim(), "eigenfunction_gradients: point dimension mismatch");
  return hermite_product_gradients(multi_indices(count), x);
}

namespace {

class GradedHermiteBasis final : public EigenSystem {
 public:
  explicit GradedHermiteBasis(int dim) : dim_(dim) {}
  int dim() const override { return dim_; }
  ReferenceMeasure measure() const override { return ReferenceMeasure::StandardGaussian; }
  std::optional<std::size_t> rank() const override { return std::nullopt; }
  Eigen::VectorXd eigenvalues(std::size_t count) const override {
    return Eigen::VectorXd::Ones(static_cast<Eigen::Index>(count));
  }
  Eigen::MatrixXd eigenfunctions(std::size_t count, const PointSet& points) const override {
    require(points.rows() == dim_, "eigenfunctions: point dimension mismatch");
    return hermite_products(graded_multi_indices(dim_, count), points);
  }
  Eigen::MatrixXd eigenfunction_gradients(std::size_t count, const Point& x) const override {
    require(x.size() == dim_, "eigenfunction_gradients: point dimension mismatch");
    return hermite_product_gradients(graded_multi_indices(dim_, count), x);
  }

 private:
  int dim_;
};

}  // namespace

std::shared_ptr<const EigenSystem> hermite_basis(int dim) {
  require(dim >= 1, "hermite_basis: dimension must be positive");
  return std::make_shared<GradedHermiteBasis>(dim);
}

FiniteEigenSystem::FiniteEigenSystem(Eigen::VectorXd eigenvalues, std::shared_ptr<const EigenSystem> functions)
    : eigenvalues_(std::move(eigenvalues)), functions_(std::move(functions)) {
  require(functions_ != nullptr, "FiniteEigenSystem: missing eigenfunctions");
  require(eigenvalues_.size() >= 1, "FiniteEigenSystem: at least one eigenvalue required");
  require(eigenvalues_.allFinite() && (eigenvalues_.array() >= 0.0).all(),
          "FiniteEigenSystem: eigenvalues must be finite and nonnegative");
  if (const auto r = functions_->rank()) {
    require(static_cast<std::size_t>(eigenvalues_.size()) <= *r, "FiniteEigenSystem: more eigenvalues than functions");
  }
}

Eigen::VectorXd FiniteEigenSystem::eigenvalues(std::size_t count) const {
  check_count(count);
  return eigenvalues_.head(static_cast<Eigen::Index>(count));
}

Eigen::MatrixXd FiniteEigenSystem::eigenfunctions(std::size_t count, const PointSet& points) const {
  check_count(count);
  return functions_->eigenfunctions(count, points);
}

Eigen::MatrixXd FiniteEigenSystem::eigenfunction_gradients(std::size_t count, const Point& x) const {
  check_count(count);
  return functions_->eigenfunction_gradients(count, x);
}

}  // namespace ivar
