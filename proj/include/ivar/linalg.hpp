#pragma once

#include <optional>

#include <Eigen/Dense>

namespace ivar {

// Cholesky factor of a symmetric positive-definite matrix. If the plain
// factorization fails it is retried once with 1e-10 * trace / N added to the
// diagonal; the applied jitter is recorded.
class SpdFactor {
 public:
  // Throws NumericalError ("ill-conditioned covariance", with the smallest
  // eigenvalue estimate) when both attempts fail.
  static SpdFactor factorize(const Eigen::MatrixXd& a);
  static std::optional<SpdFactor> try_factorize(const Eigen::MatrixXd& a);

  Eigen::Index size() const { return llt_.rows(); }
  double jitter() const { return jitter_; }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const { return llt_.solve(b); }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }
  Eigen::MatrixXd inverse() const;
  Eigen::MatrixXd lower() const { return llt_.matrixL(); }
  // Solves L x = b in place.
  void solve_lower_in_place(Eigen::MatrixXd& b) const;
  double log_determinant() const;

 private:
  SpdFactor(Eigen::LLT<Eigen::MatrixXd> llt, double jitter) : llt_(std::move(llt)), jitter_(jitter) {}
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double jitter_ = 0.0;
};

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

// Spectral norm of a symmetric matrix (largest absolute eigenvalue).
double symmetric_spectral_norm(const Eigen::MatrixXd& symmetric);

// Some S with S S^T ~= A for a symmetric positive semi-definite A. Uses a
// jittered Cholesky factor when possible and falls back to an eigen
// decomposition with negative eigenvalues clipped to zero.
Eigen::MatrixXd psd_square_root(const Eigen::MatrixXd& a, double jitter);

}  // namespace ivar
