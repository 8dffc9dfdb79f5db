#include "ivar/psa.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "ivar/linalg.hpp"

namespace ivar {

Eigen::VectorXd PsaApproximation::evaluate(const PointSet& x) const {
  return basis->eigenfunctions(terms, x).transpose() * coefficients;
}

FieldFunction PsaApproximation::evaluator() const {
  auto self = std::make_shared<PsaApproximation>(*this);
  return [self](const PointSet& x) { return self->evaluate(x); };
}

PsaApproximation psa_fit(const QuadratureRule& rule, std::shared_ptr<const EigenSystem> basis, std::size_t terms,
                         const Eigen::VectorXd& observations) {
  require(basis != nullptr, "psa_fit: missing basis");
  require(terms >= 1, "psa_fit: need at least one term");
  require(observations.size() == rule.size(), "psa_fit: one observation per node required");
  require(rule.dim() == basis->dim(), "psa_fit: rule and basis dimensions differ");
  PsaApproximation out;
  out.defect = orthogonality_defect(rule, *basis, terms);
  if (out.defect > kPsaDefectError) {
    std::ostringstream msg;
    msg << "non-orthogonalizing rule: orthogonality defect " << out.defect << " for " << terms << " terms";
    throw ConfigError(msg.str());
  }
  if (out.defect > kPsaDefectWarn) {
    std::ostringstream msg;
    msg << "orthogonality defect " << out.defect << " exceeds " << kPsaDefectWarn;
    out.warnings.push_back(msg.str());
    std::clog << "psa_fit: " << msg.str() << "\n";
  }
  const Eigen::MatrixXd phi = basis->eigenfunctions(terms, rule.nodes);
  out.coefficients = phi * rule.weights.cwiseProduct(observations);
  out.basis = std::move(basis);
  out.terms = terms;
  out.rule = rule;
  return out;
}

QuadratureRule high_order_rule(int dim, std::size_t max_terms) {
  require(dim >= 1, "high_order_rule: dimension must be positive");
  const int n = static_cast<int>(std::min<std::size_t>(max_terms + 11, kMaxGaussHermiteNodes));
  const QuadratureRule one = gauss_hermite(n);
  return tensor_rule(std::vector<QuadratureRule>(static_cast<std::size_t>(dim), one));
}

Eigen::VectorXd error_spectrum(const FieldFunction& approx, const FieldFunction& f, const EigenSystem& basis,
                               std::size_t max_terms, const QuadratureRule& reference) {
  require(max_terms >= 1, "error_spectrum: need at least one term");
  require(reference.dim() == basis.dim(), "error_spectrum: dimension mismatch");
  require(reference.dim() > 1 || reference.exactness >= static_cast<int>(2 * max_terms),
          "error_spectrum: reference rule exactness below 2 * max_terms");
  const Eigen::VectorXd e = approx(reference.nodes) - f(reference.nodes);
  const Eigen::MatrixXd phi = basis.eigenfunctions(max_terms, reference.nodes);
  return (phi * reference.weights.cwiseProduct(e)).cwiseAbs();
}

namespace {

struct SpectralSetup {
  Eigen::VectorXd lambda;  // gp_terms
  Eigen::MatrixXd phi;     // gp_terms x N
  double defect = 0.0;
};

SpectralSetup setup(const EigenSystem& system, const QuadratureRule& rule, std::size_t terms, std::size_t gp_terms,
                    double nugget, double defect_limit) {
  require(terms >= 1, "need at least one PSA term");
  require(terms <= gp_terms, "PSA terms must not exceed the GP truncation");
  require(rule.dim() == system.dim(), "rule and eigensystem dimensions differ");
  require(std::isfinite(nugget) && nugget >= 0.0, "nugget must be a nonnegative real");
  SpectralSetup s;
  s.lambda = system.eigenvalues(gp_terms);
  s.phi = system.eigenfunctions(gp_terms, rule.nodes);
  const Eigen::MatrixXd lead = s.phi.topRows(static_cast<Eigen::Index>(terms));
  const Eigen::MatrixXd gram = lead * rule.weights.asDiagonal() * lead.transpose();
  s.defect = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (s.defect > defect_limit) {
    std::ostringstream msg;
    msg << "non-orthogonalizing rule: orthogonality defect " << s.defect << " for " << terms << " terms";
    throw ConfigError(msg.str());
  }
  return s;
}

Eigen::MatrixXd truncated_gram(const SpectralSetup& s, Eigen::Index from, double nugget) {
  const Eigen::Index count = s.lambda.size() - from;
  const Eigen::MatrixXd part = s.phi.bottomRows(count);
  Eigen::MatrixXd g = part.transpose() * s.lambda.tail(count).asDiagonal() * part;
  g = 0.5 * (g + g.transpose());
  g.diagonal().array() += nugget;
  return g;
}

constexpr double kBoundDefectLimit = 1e-8;

}  // namespace

GpPsaBound gp_psa_bound(const EigenSystem& system, const QuadratureRule& rule, std::size_t terms, std::size_t gp_terms,
                        double nugget, const Eigen::VectorXd& observations) {
  require(nugget > 0.0, "gp_psa_bound: the bound requires a positive nugget");
  require(observations.size() == rule.size(), "gp_psa_bound: one observation per node required");
  const SpectralSetup s = setup(system, rule, terms, gp_terms, nugget, kBoundDefectLimit);
  const auto l = static_cast<Eigen::Index>(terms);
  const Eigen::Index n = rule.size();

  GpPsaBound b;
  b.defect = s.defect;
  b.nodes = static_cast<int>(n);
  b.node_bound = s.phi.topRows(l).cwiseAbs().maxCoeff();
  b.max_weight = rule.weights.maxCoeff();
  b.min_gram_eigenvalue = std::max(0.0, min_eigenvalue(truncated_gram(s, 0, 0.0)));
  const Eigen::MatrixXd tail = truncated_gram(s, l, nugget);
  b.tail_operator_norm = symmetric_spectral_norm(tail);
  const SpdFactor factor = SpdFactor::factorize(truncated_gram(s, 0, nugget));
  const double denom = b.min_gram_eigenvalue + nugget;
  b.first_term = static_cast<double>(l) * n * std::pow(b.node_bound * b.max_weight / denom, 2) *
                 b.tail_operator_norm * b.tail_operator_norm;
  // sum_{j>=l} lambda_j^2 |R Phi_j|^2
  const Eigen::MatrixXd r_phi = factor.solve(Eigen::MatrixXd(s.phi.bottomRows(s.lambda.size() - l).transpose()));
  b.second_term = (r_phi.colwise().squaredNorm().transpose().array() * s.lambda.tail(s.lambda.size() - l).array().square()).sum();
  b.value = observations.squaredNorm() * (b.first_term + b.second_term);
  return b;
}

double gp_psa_distance(const EigenSystem& system, const QuadratureRule& rule, std::size_t terms, std::size_t gp_terms,
                       double nugget, const Eigen::VectorXd& observations) {
  require(observations.size() == rule.size(), "gp_psa_distance: one observation per node required");
  const SpectralSetup s = setup(system, rule, terms, gp_terms, nugget, kPsaDefectError);
  const auto l = static_cast<Eigen::Index>(terms);
  const SpdFactor factor = SpdFactor::factorize(truncated_gram(s, 0, nugget));
  // GP mean coefficients lambda_j Phi_j^T R y; PSA coefficients Phi_i^T W y
  const Eigen::VectorXd gp = s.lambda.cwiseProduct(s.phi * factor.solve(observations));
  Eigen::VectorXd diff = gp;
  diff.head(l) -= s.phi.topRows(l) * rule.weights.cwiseProduct(observations);
  return diff.squaredNorm();
}

IdentitySides ivar_orthogonal_identity(const EigenSystem& system, const QuadratureRule& rule, std::size_t terms,
                                       std::size_t gp_terms, double nugget) {
  // Both sides are evaluated in long double: the left side is a sum of
  // 1 - lambda_i Phi_i^T R Phi_i terms that cancel almost completely when the
  // integrated variance is small.
  using Real = long double;
  using MatrixL = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorL = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
  const SpectralSetup s = setup(system, rule, terms, gp_terms, nugget, kBoundDefectLimit);
  const auto l = static_cast<Eigen::Index>(terms);
  const MatrixL phi = s.phi.cast<Real>();
  const VectorL lambda = s.lambda.cast<Real>();
  MatrixL gram = phi.transpose() * lambda.asDiagonal() * phi;
  gram.diagonal().array() += static_cast<Real>(nugget);
  const Eigen::LLT<MatrixL> llt(gram);
  if (llt.info() != Eigen::Success)
    throw NumericalError("ill-conditioned covariance: identity Gram matrix is not positive definite");
  const MatrixL lead_t = phi.topRows(l).transpose();  // N x l
  const MatrixL r_phi = llt.solve(lead_t);
  const VectorL lam = lambda.head(l);

  const VectorL quad = lead_t.cwiseProduct(r_phi).colwise().sum().transpose();  // Phi_i^T R Phi_i
  MatrixL t_r_phi = r_phi * static_cast<Real>(nugget);
  if (lambda.size() > l) {
    const MatrixL tail = phi.bottomRows(lambda.size() - l);
    t_r_phi += tail.transpose() * (lambda.tail(lambda.size() - l).asDiagonal() * (tail * r_phi));
  }
  const MatrixL w_phi = rule.weights.cast<Real>().asDiagonal() * lead_t;
  IdentitySides out;
  out.left = static_cast<double>((lam.array() * (Real(1) - lam.array() * quad.array())).sum());
  out.right = static_cast<double>((lam.array() * w_phi.cwiseProduct(t_r_phi).colwise().sum().transpose().array()).sum());
  return out;
}

}  // namespace ivar
