#include "ivar/linalg.hpp"

#include <cmath>
#include <sstream>

#include "ivar/common.hpp"

namespace ivar {

namespace {

bool all_finite(const Eigen::MatrixXd& a) { return a.allFinite(); }

std::optional<Eigen::LLT<Eigen::MatrixXd>> attempt(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  // LLT only reports non-positive pivots; reject factors that went non-finite.
  if (!llt.matrixLLT().diagonal().allFinite()) return std::nullopt;
  return llt;
}

}  // namespace

std::optional<SpdFactor> SpdFactor::try_factorize(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || !all_finite(a)) return std::nullopt;
  if (a.rows() == 0) return SpdFactor(Eigen::LLT<Eigen::MatrixXd>(a), 0.0);
  if (auto llt = attempt(a)) return SpdFactor(std::move(*llt), 0.0);
  const double jitter = 1e-10 * std::abs(a.trace()) / static_cast<double>(a.rows());
  Eigen::MatrixXd jittered = a;
  jittered.diagonal().array() += jitter;
  if (auto llt = attempt(jittered)) return SpdFactor(std::move(*llt), jitter);
  return std::nullopt;
}

SpdFactor SpdFactor::factorize(const Eigen::MatrixXd& a) {
  if (auto f = try_factorize(a)) return std::move(*f);
  std::ostringstream msg;
  msg << "ill-conditioned covariance (N=" << a.rows();
  if (a.rows() == a.cols() && all_finite(a)) msg << ", min eigenvalue estimate " << min_eigenvalue(a);
  else msg << ", non-finite entries";
  msg << ")";
  throw NumericalError(msg.str());
}

Eigen::MatrixXd SpdFactor::inverse() const {
  return llt_.solve(Eigen::MatrixXd::Identity(size(), size()));
}

void SpdFactor::solve_lower_in_place(Eigen::MatrixXd& b) const {
  llt_.matrixL().solveInPlace(b);
}

double SpdFactor::log_determinant() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double symmetric_spectral_norm(const Eigen::MatrixXd& symmetric) {
  if (symmetric.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd psd_square_root(const Eigen::MatrixXd& a, double jitter) {
  Eigen::MatrixXd jittered = a;
  jittered.diagonal().array() += jitter;
  if (auto llt = attempt(jittered)) return llt->matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed in psd_square_root");
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

}  // namespace ivar
