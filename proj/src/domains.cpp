#include "ivar/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ivar {

std::string to_string(DomainShape shape) {
  switch (shape) {
    case DomainShape::Hypercube: return "hypercube";
    case DomainShape::Ball: return "ball";
    case DomainShape::DiscDifference: return "disc-difference";
    case DomainShape::Gaussian: return "gaussian";
  }
  return "unknown";
}

namespace {

bool in_disc(const Disc& d, double x, double y) {
  const double dx = x - d.cx;
  const double dy = y - d.cy;
  return dx * dx + dy * dy <= d.radius * d.radius;
}

void check_disc(const Disc& d) {
  require(std::isfinite(d.cx) && std::isfinite(d.cy), "disc center must be finite");
  require(std::isfinite(d.radius) && d.radius > 0.0, "disc radius must be positive");
}

}  // namespace

Domain Domain::hypercube(int dim, double lower, double upper) {
  require(dim >= 1, "hypercube: dimension must be positive");
  require(std::isfinite(lower) && std::isfinite(upper) && lower < upper, "hypercube: need finite lower < upper");
  Domain d;
  d.shape_ = DomainShape::Hypercube;
  d.dim_ = dim;
  d.lower_ = lower;
  d.upper_ = upper;
  return d;
}

Domain Domain::ball(Point center, double radius) {
  require(center.size() >= 1, "ball: dimension must be positive");
  require(center.allFinite(), "ball: center must be finite");
  require(std::isfinite(radius) && radius > 0.0, "ball: radius must be positive");
  Domain d;
  d.shape_ = DomainShape::Ball;
  d.dim_ = static_cast<int>(center.size());
  d.center_ = std::move(center);
  d.radius_ = radius;
  return d;
}

Domain Domain::disc_difference(std::vector<Disc> positive, std::vector<Disc> holes) {
  require(!positive.empty(), "disc-difference: at least one positive disc required");
  for (const auto& disc : positive) check_disc(disc);
  for (const auto& disc : holes) check_disc(disc);
  Domain d;
  d.shape_ = DomainShape::DiscDifference;
  d.dim_ = 2;
  d.positive_ = std::move(positive);
  d.holes_ = std::move(holes);
  return d;
}

Domain Domain::gaussian(int dim) {
  require(dim >= 1, "gaussian: dimension must be positive");
  Domain d;
  d.shape_ = DomainShape::Gaussian;
  d.dim_ = dim;
  return d;
}

Domain Domain::nonconvex_standin() {
  const double r = 0.5;
  const double ear = 0.25;
  // ears centered on the 45-degree rays, externally tangent to the big disc
  const double offset = (r + ear) / std::sqrt(2.0);
  return disc_difference({{0.0, 0.0, r}, {-offset, offset, ear}, {offset, offset, ear}}, {{0.0, 0.0, 0.1}});
}

Domain Domain::named(const std::string& name) {
  if (name == "interval") return hypercube(1, -1.0, 1.0);
  if (name == "ball2d" || name == "circle") return ball(Point::Zero(2), 0.7);
  if (name == "ball5d") return ball(Point::Zero(5), 0.7);
  if (name == "nonconvex" || name == "mickey") return nonconvex_standin();
  if (name.rfind("gaussian", 0) == 0) {
    const std::string rest = name.substr(8);
    if (rest.empty()) return gaussian(1);
    int dim = 0;
    try {
      std::size_t used = 0;
      dim = std::stoi(rest, &used);
      if (used != rest.size()) dim = 0;
    } catch (const std::exception&) {
      dim = 0;
    }
    require(dim >= 1, "unknown domain '" + name + "'");
    return gaussian(dim);
  }
  throw ConfigError("unknown domain '" + name + "'");
}

void Domain::check_point(const Point& x) const {
  if (x.size() != dim_)
    throw ConfigError("domain dimension mismatch: domain has d=" + std::to_string(dim_) + ", point has " +
                      std::to_string(x.size()));
}

bool Domain::contains(const Point& x) const {
  check_point(x);
  if (!x.allFinite()) return false;
  switch (shape_) {
    case DomainShape::Hypercube:
      return (x.array() >= lower_).all() && (x.array() <= upper_).all();
    case DomainShape::Ball:
      return (x - center_).squaredNorm() <= radius_ * radius_;
    case DomainShape::DiscDifference: {
      const bool inside = std::any_of(positive_.begin(), positive_.end(),
                                      [&](const Disc& d) { return in_disc(d, x(0), x(1)); });
      if (!inside) return false;
      return std::none_of(holes_.begin(), holes_.end(), [&](const Disc& d) { return in_disc(d, x(0), x(1)); });
    }
    case DomainShape::Gaussian:
      return true;
  }
  return false;
}

std::pair<Point, Point> Domain::bounding_box() const {
  switch (shape_) {
    case DomainShape::Hypercube:
      return {Point::Constant(dim_, lower_), Point::Constant(dim_, upper_)};
    case DomainShape::Ball:
      return {center_.array() - radius_, center_.array() + radius_};
    case DomainShape::DiscDifference: {
      Point lo = Point::Constant(2, std::numeric_limits<double>::infinity());
      Point hi = Point::Constant(2, -std::numeric_limits<double>::infinity());
      for (const auto& d : positive_) {
        lo(0) = std::min(lo(0), d.cx - d.radius);
        lo(1) = std::min(lo(1), d.cy - d.radius);
        hi(0) = std::max(hi(0), d.cx + d.radius);
        hi(1) = std::max(hi(1), d.cy + d.radius);
      }
      return {lo, hi};
    }
    case DomainShape::Gaussian:
      return {Point::Constant(dim_, -kGaussianBoxHalfWidth), Point::Constant(dim_, kGaussianBoxHalfWidth)};
  }
  return {};
}

PointSet Domain::sample(std::uint64_t seed, int n) const {
  require(n >= 1, "sample: n must be positive");
  Rng rng(seed);
  PointSet out(dim_, n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (shape_) {
    case DomainShape::Hypercube:
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < dim_; ++i) out(i, j) = lower_ + (upper_ - lower_) * unif(rng);
      return out;
    case DomainShape::Gaussian:
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < dim_; ++i) out(i, j) = normal(rng);
      return out;
    case DomainShape::Ball:
      // uniform direction times radius * U^{1/d}
      for (int j = 0; j < n; ++j) {
        Point dir(dim_);
        double norm = 0.0;
        do {
          for (int i = 0; i < dim_; ++i) dir(i) = normal(rng);
          norm = dir.norm();
        } while (norm == 0.0);
        const double r = radius_ * std::pow(unif(rng), 1.0 / dim_);
        out.col(j) = center_ + (r / norm) * dir;
      }
      return out;
    case DomainShape::DiscDifference: {
      const auto [lo, hi] = bounding_box();
      long long attempts = 0;
      int accepted = 0;
      Point x(2);
      while (accepted < n) {
        x(0) = lo(0) + (hi(0) - lo(0)) * unif(rng);
        x(1) = lo(1) + (hi(1) - lo(1)) * unif(rng);
        ++attempts;
        if (contains(x)) out.col(accepted++) = x;
        if (attempts >= 10000 && static_cast<double>(accepted) < 1e-3 * static_cast<double>(attempts))
          throw ConfigError("degenerate domain: rejection acceptance rate below 1e-3");
      }
      return out;
    }
  }
  return out;
}

}  // namespace ivar
