#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ivar/common.hpp"

namespace ivar {

enum class DomainShape { Hypercube, Ball, DiscDifference, Gaussian };

std::string to_string(DomainShape shape);

struct Disc {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
};

// Input domain with its probability measure: uniform on bounded shapes,
// standard normal for the Gaussian shape. Immutable.
class Domain {
 public:
  static Domain hypercube(int dim, double lower, double upper);
  static Domain ball(Point center, double radius);
  // Union of `positive` discs minus the union of `holes`, in R^2.
  static Domain disc_difference(std::vector<Disc> positive, std::vector<Disc> holes);
  static Domain gaussian(int dim);

  // Presets: "interval" ([-1,1]), "ball2d" (radius 0.7), "ball5d" (radius 0.7),
  // "gaussianN" (standard normal on R^N), "nonconvex" (three-disc shape with a hole).
  static Domain named(const std::string& name);
  // Large disc of radius 0.5 with two tangent ears of radius 0.25 and a hole
  // of radius 0.1 at the origin.
  static Domain nonconvex_standin();

  DomainShape shape() const { return shape_; }
  int dim() const { return dim_; }
  bool bounded() const { return shape_ != DomainShape::Gaussian; }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  const std::vector<Disc>& positive_discs() const { return positive_; }
  const std::vector<Disc>& holes() const { return holes_; }

  bool contains(const Point& x) const;
  // n i.i.d. draws from the measure, as a d x n matrix. Deterministic in seed.
  PointSet sample(std::uint64_t seed, int n) const;
  // Box used for optimizer bounds and rejection sampling. The Gaussian
  // domain reports [-6, 6]^d.
  std::pair<Point, Point> bounding_box() const;

 private:
  Domain() = default;
  void check_point(const Point& x) const;

  DomainShape shape_ = DomainShape::Hypercube;
  int dim_ = 0;
  double lower_ = 0.0;
  double upper_ = 0.0;
  Point center_;
  double radius_ = 0.0;
  std::vector<Disc> positive_;
  std::vector<Disc> holes_;
};

inline constexpr double kGaussianBoxHalfWidth = 6.0;

}  // namespace ivar
