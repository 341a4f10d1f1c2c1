#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mpsfd/common.hpp"

namespace mpsfd {

struct Ball {
  Point center{};
  double radius = 0.0;
};

/// Axis-aligned box, optionally minus an open ball that reaches the box
/// boundary (or lies outside it). Level-set convention: phi < 0 inside,
/// phi = 0 on the boundary, phi > 0 outside.
class Domain {
 public:
  /// Throws std::invalid_argument for a bad dimension, an empty box, a
  /// non-positive radius, or a ball strictly inside the box (which would
  /// create a hole).
  Domain(int dim, Point lo, Point hi, std::optional<Ball> cut = std::nullopt);

  static Domain unit_box(int dim);
  /// [0,1]^d minus B((1/2, ..., 1/2, 1.1), 0.44).
  static Domain unit_box_with_cut(int dim);

  int dim() const { return dim_; }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }
  const std::optional<Ball>& cut() const { return cut_; }

  double phi(const Point& x) const;
  double phi_box(const Point& x) const;
  /// Signed distance to the ball surface (negative inside the ball).
  double phi_ball(const Point& x) const;

  /// Outward unit normal of the active level-set piece at x.
  Point outward_normal(const Point& x) const;

  double box_volume() const;

 private:
  int dim_;
  Point lo_;
  Point hi_;
  std::optional<Ball> cut_;
};

inline double phi(const Domain& domain, const Point& x) { return domain.phi(x); }

struct ConeCriterionParams {
  int dim = 2;
  double gamma = 0.0;  // total opening angle (radians)
  double beta = 0.0;   // tangent of the half angle
  int direction_samples = 256;  // 3d only
  // 3d only: angular covering radius of the direction sample set; the test
  // cone half angle is shrunk by this amount.
  double direction_margin = 0.0;

  /// 2d: beta = sqrt(2) - 1 (45 degrees); 3d: beta = sqrt((3 - sqrt(6)) / 6)
  /// (about 33.7 degrees).
  static ConeCriterionParams for_dimension(int dim, int direction_samples = 256);
};

/// True iff no closed half space through the origin contains every offset,
/// i.e. the necessary condition for a positive Laplace stencil holds.
bool half_space_check(std::span<const Point> offsets, int dim);

/// Sufficient condition for a positive Laplace stencil: every cone of the
/// criterion's opening angle contains an offset. False is inconclusive.
bool cone_criterion_check(std::span<const Point> offsets, const ConeCriterionParams& params);

inline constexpr double kDefaultRadiusSafety = 1.05;

/// Candidate radius safety * (h/2) / sin(gamma/2).
double candidate_radius(double h, const ConeCriterionParams& params, double safety = kDefaultRadiusSafety);

/// (h/2) (1 + 1/sin(gamma/2)): the smallest truncated cone that must hold a
/// point of a cloud with mesh size h. candidate_radius alone only places
/// the center of the h/2 hole inside the radius, so it can still fail.
double guaranteed_cone_radius(double h, const ConeCriterionParams& params);

inline constexpr double kCrackTolerance = 1e-9;

/// False iff a sampled interior point of the segment [x0, x] lies outside
/// the domain by more than kCrackTolerance.
bool visible_from(const Domain& domain, const Point& x0, const Point& x, int samples = 16);

/// Unit directions on the sphere from a Fibonacci lattice.
std::vector<Point> fibonacci_directions(int count);

}  // namespace mpsfd
