#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ivar/common.hpp"
#include "ivar/hermite.hpp"

namespace ivar {

// Measure under which an eigensystem's functions are orthonormal.
enum class ReferenceMeasure { StandardGaussian, Unspecified };

// Mercer eigensystem (lambda_i, phi_i) of a kernel integral operator. Index i
// is zero-based; eigenvalues are nonincreasing for the built-in systems.
// Implementations are immutable and safe to share across threads.
class EigenSystem {
 public:
  virtual ~EigenSystem() = default;

  virtual int dim() const = 0;
  virtual ReferenceMeasure measure() const = 0;
  // Number of terms, or nullopt for an unbounded expansion.
  virtual std::optional<std::size_t> rank() const = 0;
  virtual Eigen::VectorXd eigenvalues(std::size_t count) const = 0;
  // count x N matrix with entry (i, k) = phi_i(x_k).
  virtual Eigen::MatrixXd eigenfunctions(std::size_t count, const PointSet& points) const = 0;
  // count x d matrix of gradients of phi_i at x.
  virtual Eigen::MatrixXd eigenfunction_gradients(std::size_t count, const Point& x) const = 0;

 protected:
  void check_count(std::size_t count) const;
};

// Eigensystem of the tensorized Mehler kernel under the standard Gaussian:
// lambda_alpha = prod_k t_k^{alpha_k}, phi_alpha = prod_k phi_{alpha_k}(x_k).
// Multi-indices are listed by decreasing eigenvalue; equal eigenvalues
// (relative gap below 1e-12) are ordered graded-lexicographically, which for
// isotropic decay is exactly the graded lexicographic order.
class HermiteEigenSystem final : public EigenSystem {
 public:
  explicit HermiteEigenSystem(std::vector<double> decay);

  int dim() const override { return static_cast<int>(decay_.size()); }
  ReferenceMeasure measure() const override { return ReferenceMeasure::StandardGaussian; }
  std::optional<std::size_t> rank() const override { return std::nullopt; }
  Eigen::VectorXd eigenvalues(std::size_t count) const override;
  Eigen::MatrixXd eigenfunctions(std::size_t count, const PointSet& points) const override;
  Eigen::MatrixXd eigenfunction_gradients(std::size_t count, const Point& x) const override;

  std::vector<MultiIndex> multi_indices(std::size_t count) const;
  const std::vector<double>& decay() const { return decay_; }

 private:
  std::vector<double> decay_;
};

// Normalized Hermite tensor basis in graded lexicographic order, for use as a
// pseudospectral basis. Eigenvalues are reported as 1 (no decay).
std::shared_ptr<const EigenSystem> hermite_basis(int dim);

// Finite-rank system: explicit eigenvalues paired with the leading functions
// of another system.
class FiniteEigenSystem final : public EigenSystem {
 public:
  FiniteEigenSystem(Eigen::VectorXd eigenvalues, std::shared_ptr<const EigenSystem> functions);

  int dim() const override { return functions_->dim(); }
  ReferenceMeasure measure() const override { return functions_->measure(); }
  std::optional<std::size_t> rank() const override { return static_cast<std::size_t>(eigenvalues_.size()); }
  Eigen::VectorXd eigenvalues(std::size_t count) const override;
  Eigen::MatrixXd eigenfunctions(std::size_t count, const PointSet& points) const override;
  Eigen::MatrixXd eigenfunction_gradients(std::size_t count, const Point& x) const override;

  const Eigen::VectorXd& all_eigenvalues() const { return eigenvalues_; }
  const std::shared_ptr<const EigenSystem>& functions() const { return functions_; }

 private:
  Eigen::VectorXd eigenvalues_;
  std::shared_ptr<const EigenSystem> functions_;
};

}  // namespace ivar
