#include <algorithm>
#include <cmath>
#include <iostream>

#include "ivar/design.hpp"
#include "ivar/linalg.hpp"

namespace ivar {

namespace {

// Low-rank bookkeeping of a covariance conditioned on selected points:
// C(a, b) = K(a, b) - sum_m V(a, m) V(b, m).
class ConditionedCovariance {
 public:
  ConditionedCovariance(const Kernel& kernel, const PointSet& points, double nugget)
      : kernel_(kernel), points_(points), nugget_(nugget), variance_(kernel.diagonal(points)) {
    v_.resize(points.cols(), 0);
  }

  const Eigen::VectorXd& variance() const { return variance_; }

  void condition_on(Eigen::Index p) {
    const double denom = variance_(p) + nugget_;
    if (!(denom > 1e-14 * std::max(1.0, kernel_(points_.col(p), points_.col(p))))) return;
    Eigen::VectorXd col = kernel_.cross(points_, points_.col(p)).col(0);
    if (v_.cols() > 0) col -= v_ * v_.row(p).transpose();
    col /= std::sqrt(denom);
    v_.conservativeResize(Eigen::NoChange, v_.cols() + 1);
    v_.col(v_.cols() - 1) = col;
    variance_ -= col.cwiseAbs2();
  }

 private:
  const Kernel& kernel_;
  const PointSet& points_;
  double nugget_;
  Eigen::VectorXd variance_;
  Eigen::MatrixXd v_;
};

void check_discrete(const Kernel& kernel, const PointSet& candidates, int n, double nugget) {
  require(n >= 0, "design size must be nonnegative");
  require(candidates.rows() == kernel.dim(), "candidate dimension does not match the kernel");
  require(std::isfinite(nugget) && nugget >= 0.0, "nugget must be a nonnegative real");
  require(candidates.allFinite(), "candidates must be finite");
}

Design gather(const PointSet& candidates, const std::vector<int>& indices, const std::string& provenance) {
  Design d;
  d.points.resize(candidates.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) d.points.col(static_cast<Eigen::Index>(i)) = candidates.col(indices[i]);
  d.provenance = provenance;
  return d;
}

}  // namespace

DiscreteDesignResult alm_select(const Kernel& kernel, const PointSet& candidates, int n, double nugget,
                                const PointSet& existing) {
  check_discrete(kernel, candidates, n, nugget);
  require(candidates.cols() >= n, "ALM needs N_E >= N candidates");
  require(existing.cols() == 0 || existing.rows() == kernel.dim(), "existing points dimension mismatch");
  const Eigen::Index e = existing.cols();
  const Eigen::Index ne = candidates.cols();
  PointSet all(kernel.dim(), e + ne);
  if (e > 0) all.leftCols(e) = existing;
  all.rightCols(ne) = candidates;
  ConditionedCovariance cov(kernel, all, nugget);
  for (Eigen::Index i = 0; i < e; ++i) cov.condition_on(i);

  std::vector<bool> taken(static_cast<std::size_t>(ne), false);
  DiscreteDesignResult out;
  out.candidates = candidates;
  for (int step = 0; step < n; ++step) {
    Eigen::Index best = -1;
    double best_var = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < ne; ++c) {
      if (taken[c]) continue;
      const double v = cov.variance()(e + c);
      if (v > best_var) {
        best_var = v;
        best = c;
      }
    }
    taken[best] = true;
    out.indices.push_back(static_cast<int>(best));
    cov.condition_on(e + best);
  }
  out.design = gather(candidates, out.indices, "alm");
  return out;
}

DiscreteDesignResult alm_design(const Kernel& kernel, const Domain& domain, int n, double nugget, int n_candidates,
                                std::uint64_t seed) {
  require(n_candidates >= n, "ALM needs N_E >= N candidates");
  return alm_select(kernel, domain.sample(derive_seed(seed, 2), n_candidates), n, nugget);
}

DiscreteDesignResult mi_select(const Kernel& kernel, const PointSet& candidates, int n, double nugget) {
  check_discrete(kernel, candidates, n, nugget);
  const Eigen::Index ne = candidates.cols();
  require(ne > n, "MI needs N_E > N candidates");
  const Eigen::MatrixXd k_all = kernel.gram(candidates);
  const double skip_below = std::max(1e-12, 10.0 * nugget);

  ConditionedCovariance given_chosen(kernel, candidates, nugget);
  std::vector<bool> chosen(static_cast<std::size_t>(ne), false);
  std::vector<bool> skipped(static_cast<std::size_t>(ne), false);
  DiscreteDesignResult out;
  out.candidates = candidates;
  for (int step = 0; step < n; ++step) {
    std::vector<Eigen::Index> unchosen;
    for (Eigen::Index c = 0; c < ne; ++c)
      if (!chosen[c]) unchosen.push_back(c);
    const auto u = static_cast<Eigen::Index>(unchosen.size());
    Eigen::MatrixXd k_uu(u, u);
    for (Eigen::Index i = 0; i < u; ++i)
      for (Eigen::Index j = 0; j < u; ++j) k_uu(i, j) = k_all(unchosen[i], unchosen[j]);
    k_uu.diagonal().array() += nugget;
    // var(y | U \ {y}) including noise equals 1 / (K_UU + nugget I)^{-1}_yy
    const Eigen::VectorXd precision_diag = SpdFactor::factorize(k_uu).inverse().diagonal();

    Eigen::Index best = -1;
    double best_ratio = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < u; ++i) {
      const Eigen::Index c = unchosen[i];
      const double denominator = 1.0 / precision_diag(i);
      if (denominator - nugget < skip_below) {
        if (!skipped[c]) {
          skipped[c] = true;
          out.skipped.push_back(static_cast<int>(c));
        }
        continue;
      }
      const double numerator = given_chosen.variance()(c) + nugget;
      const double ratio = numerator / denominator;
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best = c;
      }
    }
    if (best < 0) throw NumericalError("mi_design: every remaining candidate is degenerate");
    chosen[best] = true;
    out.indices.push_back(static_cast<int>(best));
    given_chosen.condition_on(best);
  }
  if (!out.skipped.empty())
    std::clog << "mi_design: skipped " << out.skipped.size() << " near-duplicate candidate(s) (conditional variance below "
              << skip_below << ")\n";
  out.design = gather(candidates, out.indices, "mi");
  return out;
}

DiscreteDesignResult mi_design(const Kernel& kernel, const Domain& domain, int n, double nugget, int n_candidates,
                               std::uint64_t seed) {
  require(n_candidates > n, "MI needs N_E > N candidates");
  return mi_select(kernel, domain.sample(derive_seed(seed, 2), n_candidates), n, nugget);
}

}  // namespace ivar
