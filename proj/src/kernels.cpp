#include "ivar/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ivar {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::SquaredExponentialIsotropic: return "se-iso";
    case KernelFamily::SquaredExponentialArd: return "se-ard";
    case KernelFamily::MehlerTensorized: return "mehler";
    case KernelFamily::FiniteRankMercer: return "finite-rank";
  }
  return "unknown";
}

namespace {

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double decay_to_unconstrained(double t) {
  const double span = kMehlerDecayUpper - kMehlerDecayLower;
  double s = (t - kMehlerDecayLower) / span;
  s = std::clamp(s, 1e-12, 1.0 - 1e-12);
  return std::log(s / (1.0 - s));
}

double unconstrained_to_decay(double u) {
  return kMehlerDecayLower + (kMehlerDecayUpper - kMehlerDecayLower) * sigmoid(u);
}

// d/dt log K1(x, y; t) for the one-dimensional Mehler factor.
double mehler_log_dt(double t, double x, double y) {
  const double one_minus = 1.0 - t * t;
  const double q = t * t * (x * x + y * y) - 2.0 * t * (x * y);
  const double dq = 2.0 * t * (x * x + y * y) - 2.0 * (x * y);
  return t / one_minus - (dq * one_minus + 2.0 * t * q) / (2.0 * one_minus * one_minus);
}

}  // namespace

Kernel Kernel::squared_exponential(int dim, double length, double variance) {
  require(dim >= 1, "squared_exponential: dimension must be positive");
  require(std::isfinite(length) && length > 0.0, "squared_exponential: correlation length must be positive");
  require(std::isfinite(variance) && variance > 0.0, "squared_exponential: variance must be positive");
  Kernel k;
  k.family_ = KernelFamily::SquaredExponentialIsotropic;
  k.dim_ = dim;
  k.lengths_ = {length};
  k.variance_ = variance;
  return k;
}

Kernel Kernel::squared_exponential_ard(std::vector<double> lengths, double variance) {
  require(!lengths.empty(), "squared_exponential_ard: dimension must be positive");
  for (double l : lengths) require(std::isfinite(l) && l > 0.0, "squared_exponential_ard: correlation lengths must be positive");
  require(std::isfinite(variance) && variance > 0.0, "squared_exponential_ard: variance must be positive");
  Kernel k;
  k.family_ = KernelFamily::SquaredExponentialArd;
  k.dim_ = static_cast<int>(lengths.size());
  k.lengths_ = std::move(lengths);
  k.variance_ = variance;
  return k;
}

Kernel Kernel::mehler(std::vector<double> decay) {
  require(!decay.empty(), "mehler: dimension must be positive");
  for (double t : decay) require(std::isfinite(t) && t > 0.0 && t < 1.0, "mehler: decay t must lie strictly inside (0,1)");
  Kernel k;
  k.family_ = KernelFamily::MehlerTensorized;
  k.dim_ = static_cast<int>(decay.size());
  k.decay_ = std::move(decay);
  return k;
}

Kernel Kernel::finite_rank(std::shared_ptr<const FiniteEigenSystem> system) {
  require(system != nullptr, "finite_rank: missing eigensystem");
  Kernel k;
  k.family_ = KernelFamily::FiniteRankMercer;
  k.dim_ = system->dim();
  k.finite_ = std::move(system);
  return k;
}

void Kernel::check_point(const Point& x) const {
  if (x.size() != dim_) {
    std::ostringstream msg;
    msg << "kernel dimension mismatch: kernel has d=" << dim_ << ", point has " << x.size();
    throw ConfigError(msg.str());
  }
}

void Kernel::check_points(const PointSet& x) const {
  if (x.rows() != dim_) {
    std::ostringstream msg;
    msg << "kernel dimension mismatch: kernel has d=" << dim_ << ", points have " << x.rows();
    throw ConfigError(msg.str());
  }
}

double Kernel::operator()(const Point& x, const Point& y) const {
  check_point(x);
  check_point(y);
  switch (family_) {
    case KernelFamily::SquaredExponentialIsotropic: {
      const double l = lengths_[0];
      return variance_ * std::exp(-(x - y).squaredNorm() / (2.0 * l * l));
    }
    case KernelFamily::SquaredExponentialArd: {
      double r2 = 0.0;
      for (int k = 0; k < dim_; ++k) {
        const double z = (x(k) - y(k)) / lengths_[k];
        r2 += z * z;
      }
      return variance_ * std::exp(-0.5 * r2);
    }
    case KernelFamily::MehlerTensorized: {
      double v = 1.0;
      for (int k = 0; k < dim_; ++k) {
        const double t = decay_[k];
        const double one_minus = 1.0 - t * t;
        const double q = t * t * (x(k) * x(k) + y(k) * y(k)) - 2.0 * t * (x(k) * y(k));
        v *= std::exp(-0.5 * q / one_minus) / std::sqrt(one_minus);
      }
      return v;
    }
    case KernelFamily::FiniteRankMercer: {
      const auto r = static_cast<std::size_t>(finite_->all_eigenvalues().size());
      const Eigen::VectorXd px = finite_->eigenfunctions(r, x);
      const Eigen::VectorXd py = finite_->eigenfunctions(r, y);
      return (px.array() * py.array() * finite_->all_eigenvalues().array()).sum();
    }
  }
  return 0.0;
}

void Kernel::gradient_coefficients(Eigen::VectorXd& coef_y, Eigen::VectorXd& coef_x) const {
  coef_y.resize(dim_);
  coef_x.resize(dim_);
  for (int k = 0; k < dim_; ++k) {
    switch (family_) {
      case KernelFamily::SquaredExponentialIsotropic:
        coef_y(k) = coef_x(k) = 1.0 / (lengths_[0] * lengths_[0]);
        break;
      case KernelFamily::SquaredExponentialArd:
        coef_y(k) = coef_x(k) = 1.0 / (lengths_[k] * lengths_[k]);
        break;
      case KernelFamily::MehlerTensorized: {
        const double t = decay_[k];
        coef_y(k) = t / (1.0 - t * t);
        coef_x(k) = t * t / (1.0 - t * t);
        break;
      }
      case KernelFamily::FiniteRankMercer:
        throw std::logic_error("gradient_coefficients: not a closed-form kernel");
    }
  }
}

Point Kernel::grad_x(const Point& x, const Point& y) const {
  check_point(x);
  check_point(y);
  if (family_ == KernelFamily::FiniteRankMercer) {
    const auto r = static_cast<std::size_t>(finite_->all_eigenvalues().size());
    const Eigen::MatrixXd gx = finite_->eigenfunction_gradients(r, x);  // r x d
    const Eigen::VectorXd py = finite_->eigenfunctions(r, y);
    return gx.transpose() * (finite_->all_eigenvalues().array() * py.array()).matrix();
  }
  Eigen::VectorXd cy, cx;
  gradient_coefficients(cy, cx);
  return (*this)(x, y) * (cy.array() * y.array() - cx.array() * x.array()).matrix();
}

Eigen::MatrixXd Kernel::cross(const PointSet& x, const PointSet& y) const {
  check_points(x);
  check_points(y);
  const Eigen::Index n = x.cols();
  const Eigen::Index m = y.cols();
  Eigen::MatrixXd out(n, m);
  switch (family_) {
    case KernelFamily::SquaredExponentialIsotropic:
    case KernelFamily::SquaredExponentialArd: {
      Eigen::VectorXd inv(dim_);
      for (int k = 0; k < dim_; ++k) {
        const double l = family_ == KernelFamily::SquaredExponentialIsotropic ? lengths_[0] : lengths_[k];
        inv(k) = 1.0 / l;
      }
      const PointSet xs = inv.asDiagonal() * x;
      const PointSet ys = inv.asDiagonal() * y;
      for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < n; ++i) out(i, j) = -0.5 * (xs.col(i) - ys.col(j)).squaredNorm();
      out = variance_ * out.array().exp();
      return out;
    }
    case KernelFamily::MehlerTensorized: {
      // exponent = -sum_k [a_k (x_k^2 + y_k^2) - b_k x_k y_k]
      Eigen::VectorXd a(dim_), b(dim_);
      double prefactor = 1.0;
      for (int k = 0; k < dim_; ++k) {
        const double t = decay_[k];
        const double one_minus = 1.0 - t * t;
        a(k) = 0.5 * t * t / one_minus;
        b(k) = t / one_minus;
        prefactor /= std::sqrt(one_minus);
      }
      const Eigen::VectorXd qx = (a.asDiagonal() * x.cwiseAbs2()).colwise().sum().transpose();
      const Eigen::VectorXd qy = (a.asDiagonal() * y.cwiseAbs2()).colwise().sum().transpose();
      out.noalias() = x.transpose() * (b.asDiagonal() * y);
      out.colwise() -= qx;
      out.rowwise() -= qy.transpose();
      out = prefactor * out.array().exp();
      return out;
    }
    case KernelFamily::FiniteRankMercer: {
      const auto r = static_cast<std::size_t>(finite_->all_eigenvalues().size());
      const Eigen::MatrixXd px = finite_->eigenfunctions(r, x);
      const Eigen::MatrixXd py = finite_->eigenfunctions(r, y);
      out.noalias() = px.transpose() * finite_->all_eigenvalues().asDiagonal() * py;
      return out;
    }
  }
  return out;
}

Eigen::MatrixXd Kernel::gram(const PointSet& x) const {
  Eigen::MatrixXd g = cross(x, x);
  // exact symmetry
  return 0.5 * (g + g.transpose());
}

Eigen::VectorXd Kernel::diagonal(const PointSet& x) const {
  check_points(x);
  Eigen::VectorXd out(x.cols());
  switch (family_) {
    case KernelFamily::SquaredExponentialIsotropic:
    case KernelFamily::SquaredExponentialArd:
      out.setConstant(variance_);
      return out;
    case KernelFamily::MehlerTensorized:
    case KernelFamily::FiniteRankMercer:
      for (Eigen::Index i = 0; i < x.cols(); ++i) out(i) = (*this)(x.col(i), x.col(i));
      return out;
  }
  return out;
}

Eigen::MatrixXd Kernel::weighted_grad_x(const PointSet& x, const PointSet& y, const Eigen::MatrixXd& cross_xy,
                                        const Eigen::MatrixXd& weights) const {
  check_points(x);
  check_points(y);
  require(cross_xy.rows() == x.cols() && cross_xy.cols() == y.cols(), "weighted_grad_x: cross matrix shape mismatch");
  require(weights.rows() == x.cols() && weights.cols() == y.cols(), "weighted_grad_x: weight matrix shape mismatch");
  if (family_ == KernelFamily::FiniteRankMercer) {
    const auto r = static_cast<std::size_t>(finite_->all_eigenvalues().size());
    const Eigen::MatrixXd py = finite_->eigenfunctions(r, y);  // r x M
    const Eigen::MatrixXd v = finite_->all_eigenvalues().asDiagonal() * (py * weights.transpose());  // r x N
    Eigen::MatrixXd out(dim_, x.cols());
    for (Eigen::Index l = 0; l < x.cols(); ++l) {
      const Eigen::MatrixXd g = finite_->eigenfunction_gradients(r, x.col(l));  // r x d
      out.col(l) = g.transpose() * v.col(l);
    }
    return out;
  }
  Eigen::VectorXd cy, cx;
  gradient_coefficients(cy, cx);
  const Eigen::MatrixXd p = weights.cwiseProduct(cross_xy);  // N x M
  const Eigen::VectorXd row_sums = p.rowwise().sum();
  Eigen::MatrixXd out = cy.asDiagonal() * (y * p.transpose());
  out -= cx.asDiagonal() * x * row_sums.asDiagonal();
  return out;
}

Eigen::VectorXd Kernel::parameters() const {
  switch (family_) {
    case KernelFamily::SquaredExponentialIsotropic:
      return Eigen::Vector2d(std::log(lengths_[0]), std::log(variance_));
    case KernelFamily::SquaredExponentialArd: {
      Eigen::VectorXd theta(dim_ + 1);
      for (int k = 0; k < dim_; ++k) theta(k) = std::log(lengths_[k]);
      theta(dim_) = std::log(variance_);
      return theta;
    }
    case KernelFamily::MehlerTensorized: {
      Eigen::VectorXd theta(dim_);
      for (int k = 0; k < dim_; ++k) theta(k) = decay_to_unconstrained(decay_[k]);
      return theta;
    }
    case KernelFamily::FiniteRankMercer:
      return finite_->all_eigenvalues().array().max(1e-300).log().matrix();
  }
  return {};
}

std::vector<std::string> Kernel::parameter_names() const {
  std::vector<std::string> names;
  switch (family_) {
    case KernelFamily::SquaredExponentialIsotropic:
      return {"log_l", "log_gamma"};
    case KernelFamily::SquaredExponentialArd:
      for (int k = 0; k < dim_; ++k) names.push_back("log_l" + std::to_string(k + 1));
      names.emplace_back("log_gamma");
      return names;
    case KernelFamily::MehlerTensorized:
      for (int k = 0; k < dim_; ++k) names.push_back("logit_t" + std::to_string(k + 1));
      return names;
    case KernelFamily::FiniteRankMercer:
      for (Eigen::Index i = 0; i < finite_->all_eigenvalues().size(); ++i)
        names.push_back("log_lambda" + std::to_string(i + 1));
      return names;
  }
  return names;
}

Kernel Kernel::with_parameters(const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd current = parameters();
  require(theta.size() == current.size(), "with_parameters: wrong number of hyperparameters");
  require(theta.allFinite(), "with_parameters: hyperparameters must be finite");
  switch (family_) {
    case KernelFamily::SquaredExponentialIsotropic:
      return squared_exponential(dim_, std::exp(theta(0)), std::exp(theta(1)));
    case KernelFamily::SquaredExponentialArd: {
      std::vector<double> lengths(dim_);
      for (int k = 0; k < dim_; ++k) lengths[k] = std::exp(theta(k));
      return squared_exponential_ard(std::move(lengths), std::exp(theta(dim_)));
    }
    case KernelFamily::MehlerTensorized: {
      std::vector<double> decay(dim_);
      for (int k = 0; k < dim_; ++k) decay[k] = unconstrained_to_decay(theta(k));
      return mehler(std::move(decay));
    }
    case KernelFamily::FiniteRankMercer:
      return finite_rank(std::make_shared<FiniteEigenSystem>(theta.array().exp().matrix(), finite_->functions()));
  }
  return *this;
}

std::vector<Eigen::MatrixXd> Kernel::gram_parameter_gradients(const PointSet& x) const {
  check_points(x);
  const Eigen::Index n = x.cols();
  const Eigen::MatrixXd k = gram(x);
  std::vector<Eigen::MatrixXd> out;
  switch (family_) {
    case KernelFamily::SquaredExponentialIsotropic: {
      const double l2 = lengths_[0] * lengths_[0];
      Eigen::MatrixXd dl(n, n);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) dl(i, j) = k(i, j) * (x.col(i) - x.col(j)).squaredNorm() / l2;
      out.push_back(std::move(dl));
      out.push_back(k);
      return out;
    }
    case KernelFamily::SquaredExponentialArd: {
      for (int c = 0; c < dim_; ++c) {
        const double l2 = lengths_[c] * lengths_[c];
        Eigen::MatrixXd dl(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
          for (Eigen::Index i = 0; i < n; ++i) {
            const double diff = x(c, i) - x(c, j);
            dl(i, j) = k(i, j) * diff * diff / l2;
          }
        out.push_back(std::move(dl));
      }
      out.push_back(k);
      return out;
    }
    case KernelFamily::MehlerTensorized: {
      const double span = kMehlerDecayUpper - kMehlerDecayLower;
      for (int c = 0; c < dim_; ++c) {
        const double t = decay_[c];
        const double s = (t - kMehlerDecayLower) / span;
        const double dt_du = span * s * (1.0 - s);
        Eigen::MatrixXd dt(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
          for (Eigen::Index i = 0; i < n; ++i) dt(i, j) = k(i, j) * mehler_log_dt(t, x(c, i), x(c, j)) * dt_du;
        out.push_back(std::move(dt));
      }
      return out;
    }
    case KernelFamily::FiniteRankMercer: {
      const auto& lambda = finite_->all_eigenvalues();
      const Eigen::MatrixXd phi = finite_->eigenfunctions(static_cast<std::size_t>(lambda.size()), x);
      for (Eigen::Index i = 0; i < lambda.size(); ++i)
        out.push_back(lambda(i) * phi.row(i).transpose() * phi.row(i));
      return out;
    }
  }
  return out;
}

double kernel_eval(const Kernel& kernel, const Point& x, const Point& y) { return kernel(x, y); }

Point kernel_grad_x(const Kernel& kernel, const Point& x, const Point& y) { return kernel.grad_x(x, y); }

std::shared_ptr<const EigenSystem> eigensystem_of(const Kernel& kernel) {
  switch (kernel.family()) {
    case KernelFamily::MehlerTensorized:
      return std::make_shared<HermiteEigenSystem>(kernel.decay());
    case KernelFamily::FiniteRankMercer:
      return kernel.finite_system();
    default:
      throw ConfigError("eigensystem unavailable for kernel family " + to_string(kernel.family()));
  }
}

Kernel truncate_kernel(const std::shared_ptr<const EigenSystem>& system, std::size_t terms) {
  require(system != nullptr, "truncate_kernel: missing eigensystem");
  require(terms >= 1, "truncate_kernel: truncation length must be positive");
  if (const auto r = system->rank()) require(terms <= *r, "truncate_kernel: truncation exceeds eigensystem rank");
  return Kernel::finite_rank(std::make_shared<FiniteEigenSystem>(system->eigenvalues(terms), system));
}

}  // namespace ivar
