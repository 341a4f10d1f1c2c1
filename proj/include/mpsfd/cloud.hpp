#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "mpsfd/common.hpp"
#include "mpsfd/geometry.hpp"

namespace mpsfd {

/// Uniform binning of points over an axis-aligned bounding box. Supports
/// incremental insertion (used while generating clouds) and radius queries.
class SpatialGrid {
 public:
  SpatialGrid() = default;
  SpatialGrid(int dim, const Point& lo, const Point& hi, double cell_size);

  void insert(std::uint32_t id, const Point& x);

  /// Calls visit(id) for every stored point within the cells overlapping
  /// the ball of the given radius. Callers filter by exact distance.
  template <class Visit>
  void for_each_candidate(const Point& x, double radius, Visit&& visit) const {
    const auto lo = cell_of(x - Point{radius, radius, radius});
    const auto hi = cell_of(x + Point{radius, radius, radius});
    for (long k = lo[2]; k <= hi[2]; ++k)
      for (long j = lo[1]; j <= hi[1]; ++j)
        for (long i = lo[0]; i <= hi[0]; ++i)
          for (std::uint32_t id : cells_[flat({i, j, k})]) visit(id);
  }

  /// Distance from x to the nearest stored point (excluding `skip`), or
  /// +inf for an empty grid.
  double nearest_distance(const Point& x, std::span<const Point> points,
                          std::uint32_t skip = std::numeric_limits<std::uint32_t>::max()) const;

  /// True if some stored point lies strictly closer than radius.
  bool any_within(const Point& x, double radius, std::span<const Point> points) const;

  double cell_size() const { return cell_; }

 private:
  std::array<long, 3> cell_of(const Point& x) const;
  std::size_t flat(const std::array<long, 3>& c) const;

  int dim_ = 2;
  Point lo_{};
  double cell_ = 1.0;
  std::array<long, 3> counts_{1, 1, 1};
  std::vector<std::vector<std::uint32_t>> cells_;
  std::size_t size_ = 0;
};

/// Classified scattered points. Immutable after construction; the spatial
/// index is built once.
class PointCloud {
 public:
  PointCloud() = default;
  /// normals may be empty (all zero) or one entry per point; Neumann points
  /// need unit normals. index_cell_size <= 0 picks a size from the density.
  PointCloud(int dim, std::vector<Point> points, std::vector<Role> roles, std::vector<Point> normals = {},
             double index_cell_size = 0.0);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  const std::vector<Role>& roles() const { return roles_; }
  const std::vector<Point>& normals() const { return normals_; }
  const Point& point(std::size_t i) const { return points_[i]; }
  Role role(std::size_t i) const { return roles_[i]; }
  const Point& normal(std::size_t i) const { return normals_[i]; }
  const SpatialGrid& index() const { return index_; }

  std::size_t count(Role role) const;

  /// Copy with every boundary point accepted by `select` turned into a
  /// Neumann point whose normal is the domain's outward normal.
  PointCloud with_neumann(const Domain& domain, const std::function<bool(const Point&)>& select) const;

  bool operator==(const PointCloud& other) const {
    return dim_ == other.dim_ && points_ == other.points_ && roles_ == other.roles_ && normals_ == other.normals_;
  }

 private:
  int dim_ = 2;
  std::vector<Point> points_;
  std::vector<Role> roles_;
  std::vector<Point> normals_;
  SpatialGrid index_;
};

inline constexpr double kBoundaryTolerance = 1e-9;

struct GenerateOptions {
  // Boundary point spacing as a fraction of target_h (must be <= 1/2).
  double boundary_spacing_ratio = 1.0 / 3.0;
  // Interior points keep at least (4/pi) * d_p from the boundary.
  double boundary_layer_factor = 4.0 / 3.14159265358979323846;
  // Hole-filling scan resolution as a fraction of target_h.
  double scan_ratio = 0.1;
};

/// Dart throwing with minimum separation, then hole filling until the
/// covering radius reaches target_h / 2. Boundary points are placed on box
/// faces and the cut surface. Deterministic for a fixed seed.
///
/// Throws std::invalid_argument when delta_min is not in (0, target_h) or is
/// too large for the boundary spacing, and mpsfd::Error if the covering
/// target cannot be met.
PointCloud generate(const Domain& domain, double target_h, double delta_min, std::uint64_t seed,
                    const GenerateOptions& options = {});

struct CloudQualityReport {
  double mesh_size = 0.0;
  double min_separation = 0.0;
  double boundary_spacing = 0.0;
  double boundary_distance = 0.0;  // min over interior points of distance to the boundary
  // Interior points farther than r = guaranteed_cone_radius(mesh_size) from
  // the boundary whose neighbors within r fail the cone check.
  std::size_t cone_failures = 0;
};

/// Mesh size estimated as twice the largest nearest-point distance over a
/// sample grid of the domain closure.
CloudQualityReport measure_quality(const PointCloud& cloud, const Domain& domain, double sample_spacing);

/// Points (other than center) closer than radius and visible from the
/// center; sorted by distance, ties by index.
std::vector<std::size_t> neighbors_within(const PointCloud& cloud, std::size_t center, double radius,
                                          const Domain& domain);

/// Same as neighbors_within without the visibility filter.
std::vector<std::size_t> neighbors_within(const PointCloud& cloud, std::size_t center, double radius);

/// Two nearest in-radius points per quadrant (2d) or octant (3d). Bit a of
/// the sector index is set iff the offset's coordinate a is negative, so
/// points on an axis go to the lower-index sector. Sorted by distance.
std::vector<std::size_t> four_quadrant_neighbors(const PointCloud& cloud, std::size_t center, double radius);

/// Text format: header "dim n", then "x y [z] role [nx ny [nz]]" per point.
void write_cloud(std::ostream& out, const PointCloud& cloud);
PointCloud read_cloud(std::istream& in, double index_cell_size = 0.0);

}  // namespace mpsfd
