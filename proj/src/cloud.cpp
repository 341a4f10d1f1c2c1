#include "mpsfd/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mpsfd/random.hpp"

namespace mpsfd {

// ---------------------------------------------------------------------------
// SpatialGrid

SpatialGrid::SpatialGrid(int dim, const Point& lo, const Point& hi, double cell_size)
    : dim_(dim), lo_(lo), cell_(cell_size) {
  require_dimension(dim);
  require(cell_size > 0.0, "grid cell size must be positive");
  // Keep the table bounded for tiny cells; queries stay exact.
  double extent = 0.0;
  for (int a = 0; a < dim; ++a) extent = std::max(extent, hi[a] - lo[a]);
  cell_ = std::max(cell_, extent / 4096.0);
  std::size_t total = 1;
  for (int a = 0; a < 3; ++a) {
    counts_[a] = a < dim ? std::max(1L, static_cast<long>(std::ceil(std::max(hi[a] - lo[a], 0.0) / cell_))) : 1L;
    total *= static_cast<std::size_t>(counts_[a]);
  }
  cells_.resize(total);
}

std::array<long, 3> SpatialGrid::cell_of(const Point& x) const {
  std::array<long, 3> c{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    const double t = std::floor((x[a] - lo_[a]) / cell_);
    c[a] = static_cast<long>(std::clamp(t, 0.0, static_cast<double>(counts_[a] - 1)));
  }
  return c;
}

std::size_t SpatialGrid::flat(const std::array<long, 3>& c) const {
  return static_cast<std::size_t>((c[2] * counts_[1] + c[1]) * counts_[0] + c[0]);
}

void SpatialGrid::insert(std::uint32_t id, const Point& x) {
  cells_[flat(cell_of(x))].push_back(id);
  ++size_;
}

double SpatialGrid::nearest_distance(const Point& x, std::span<const Point> points, std::uint32_t skip) const {
  if (size_ == 0 || (size_ == 1 && skip != std::numeric_limits<std::uint32_t>::max()))
    return std::numeric_limits<double>::infinity();
  double extent = 0.0;
  for (int a = 0; a < dim_; ++a) extent = std::max(extent, counts_[a] * cell_);
  double radius = cell_;
  for (;;) {
    double best = std::numeric_limits<double>::infinity();
    for_each_candidate(x, radius, [&](std::uint32_t id) {
      if (id != skip) best = std::min(best, distance(x, points[id]));
    });
    if (best <= radius) return best;
    if (radius > 4.0 * extent + norm(x - lo_)) return best;
    radius *= 2.0;
  }
}

bool SpatialGrid::any_within(const Point& x, double radius, std::span<const Point> points) const {
  bool hit = false;
  for_each_candidate(x, radius, [&](std::uint32_t id) {
    if (!hit && distance(x, points[id]) < radius) hit = true;
  });
  return hit;
}

// ---------------------------------------------------------------------------
// PointCloud

namespace {

void bounding_box(int dim, const std::vector<Point>& points, Point& lo, Point& hi) {
  lo = {0, 0, 0};
  hi = {0, 0, 0};
  if (points.empty()) return;
  lo = points.front();
  hi = points.front();
  for (const auto& p : points)
    for (int a = 0; a < dim; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  for (int a = dim; a < 3; ++a) lo[a] = hi[a] = 0.0;
}

}  // namespace

PointCloud::PointCloud(int dim, std::vector<Point> points, std::vector<Role> roles, std::vector<Point> normals,
                       double index_cell_size)
    : dim_(dim), points_(std::move(points)), roles_(std::move(roles)), normals_(std::move(normals)) {
  require_dimension(dim);
  require(roles_.size() == points_.size(), "one role per point required");
  if (normals_.empty()) normals_.assign(points_.size(), Point{0, 0, 0});
  require(normals_.size() == points_.size(), "normals must be empty or one per point");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    for (int a = 0; a < dim; ++a) require(std::isfinite(points_[i][a]), "point coordinates must be finite");
    for (int a = dim; a < 3; ++a) {
      points_[i][a] = 0.0;
      normals_[i][a] = 0.0;
    }
    if (roles_[i] == Role::Neumann)
      require(std::abs(norm(normals_[i]) - 1.0) <= 1e-12, "Neumann normals must have unit length");
    else
      normals_[i] = {0, 0, 0};
  }

  Point lo, hi;
  bounding_box(dim, points_, lo, hi);
  double cell = index_cell_size;
  if (!(cell > 0.0)) {
    double volume = 1.0;
    double extent = 0.0;
    for (int a = 0; a < dim; ++a) {
      volume *= std::max(hi[a] - lo[a], 1e-12);
      extent = std::max(extent, hi[a] - lo[a]);
    }
    const double n = std::max<double>(1.0, static_cast<double>(points_.size()));
    cell = 2.0 * std::pow(volume / n, 1.0 / dim);
    if (!(cell > 0.0)) cell = std::max(extent, 1.0);
  }
  index_ = SpatialGrid(dim, lo, hi, cell);
  for (std::size_t i = 0; i < points_.size(); ++i) index_.insert(static_cast<std::uint32_t>(i), points_[i]);
}

std::size_t PointCloud::count(Role role) const { return static_cast<std::size_t>(std::count(roles_.begin(), roles_.end(), role)); }

PointCloud PointCloud::with_neumann(const Domain& domain, const std::function<bool(const Point&)>& select) const {
  auto roles = roles_;
  auto normals = normals_;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (roles[i] == Role::Interior || !select(points_[i])) continue;
    roles[i] = Role::Neumann;
    normals[i] = domain.outward_normal(points_[i]);
  }
  return PointCloud(dim_, points_, std::move(roles), std::move(normals), index_.cell_size());
}

// ---------------------------------------------------------------------------
// Generation

namespace {

class CloudBuilder {
 public:
  CloudBuilder(const Domain& domain, double delta_min)
      : domain_(domain), delta_min_(delta_min) {
    Point lo = domain.lo();
    Point hi = domain.hi();
    grid_ = SpatialGrid(domain.dim(), lo, hi, delta_min);
  }

  bool try_add(const Point& x) {
    if (grid_.any_within(x, delta_min_, points_)) return false;
    grid_.insert(static_cast<std::uint32_t>(points_.size()), x);
    points_.push_back(x);
    return true;
  }

  bool try_add_boundary(const Point& x) {
    if (std::abs(domain_.phi(x)) > kBoundaryTolerance) return false;
    return try_add(x);
  }

  double nearest(const Point& x) const { return grid_.nearest_distance(x, points_); }

  std::vector<Point>& points() { return points_; }

 private:
  const Domain& domain_;
  double delta_min_;
  SpatialGrid grid_;
  std::vector<Point> points_;
};

// Samples a circle (center c, radius rho) in the plane spanned by axes u, v.
void add_circle(CloudBuilder& builder, const Point& c, double rho, int u, int v, double spacing) {
  const int n = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * rho / spacing)));
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    Point x = c;
    x[u] += rho * std::cos(t);
    x[v] += rho * std::sin(t);
    builder.try_add_boundary(x);
  }
}

void add_boundary_2d(const Domain& domain, CloudBuilder& builder, double spacing) {
  const Point lo = domain.lo();
  const Point hi = domain.hi();
  // Where the cut circle meets the box edges.
  if (const auto& ball = domain.cut()) {
    for (int a = 0; a < 2; ++a) {
      const int b = 1 - a;
      for (double v : {lo[a], hi[a]}) {
        const double d = v - ball->center[a];
        if (std::abs(d) >= ball->radius) continue;
        const double s = std::sqrt(ball->radius * ball->radius - d * d);
        for (double sign : {-1.0, 1.0}) {
          Point x{0, 0, 0};
          x[a] = v;
          x[b] = ball->center[b] + sign * s;
          if (x[b] >= lo[b] - kBoundaryTolerance && x[b] <= hi[b] + kBoundaryTolerance) builder.try_add_boundary(x);
        }
      }
    }
  }
  // Box edges, corners first.
  for (double x0 : {lo[0], hi[0]})
    for (double x1 : {lo[1], hi[1]}) builder.try_add_boundary({x0, x1, 0.0});
  for (int a = 0; a < 2; ++a) {
    const int b = 1 - a;
    const int n = std::max(1, static_cast<int>(std::ceil((hi[b] - lo[b]) / spacing)));
    for (double v : {lo[a], hi[a]})
      for (int i = 1; i < n; ++i) {
        Point x{0, 0, 0};
        x[a] = v;
        x[b] = lo[b] + (hi[b] - lo[b]) * i / n;
        builder.try_add_boundary(x);
      }
  }
  if (const auto& ball = domain.cut()) add_circle(builder, ball->center, ball->radius, 0, 1, spacing);
}

void add_boundary_3d(const Domain& domain, CloudBuilder& builder, double spacing) {
  const Point lo = domain.lo();
  const Point hi = domain.hi();
  const auto& ball = domain.cut();
  // Intersection circles of the cut sphere with the face planes.
  if (ball) {
    for (int a = 0; a < 3; ++a) {
      const int u = (a + 1) % 3;
      const int v = (a + 2) % 3;
      for (double plane : {lo[a], hi[a]}) {
        const double d = plane - ball->center[a];
        if (std::abs(d) >= ball->radius) continue;
        Point c = ball->center;
        c[a] = plane;
        add_circle(builder, c, std::sqrt(ball->radius * ball->radius - d * d), u, v, spacing);
      }
    }
  }
  // Faces on a tensor grid (edges and corners included).
  for (int a = 0; a < 3; ++a) {
    const int u = (a + 1) % 3;
    const int v = (a + 2) % 3;
    const int nu = std::max(1, static_cast<int>(std::ceil((hi[u] - lo[u]) / spacing)));
    const int nv = std::max(1, static_cast<int>(std::ceil((hi[v] - lo[v]) / spacing)));
    for (double plane : {lo[a], hi[a]})
      for (int j = 0; j <= nv; ++j)
        for (int i = 0; i <= nu; ++i) {
          Point x{0, 0, 0};
          x[a] = plane;
          x[u] = lo[u] + (hi[u] - lo[u]) * i / nu;
          x[v] = lo[v] + (hi[v] - lo[v]) * j / nv;
          builder.try_add_boundary(x);
        }
  }
  if (ball) {
    const double area = 4.0 * std::numbers::pi * ball->radius * ball->radius;
    const int n = std::max(32, static_cast<int>(std::ceil(area / (0.8 * spacing * spacing))));
    for (const auto& dir : fibonacci_directions(n)) builder.try_add_boundary(ball->center + ball->radius * dir);
  }
}

struct ScanGrid {
  std::array<int, 3> n{0, 0, 0};
  std::array<double, 3> step{0, 0, 0};
  double max_step = 0.0;
};

ScanGrid make_scan(const Domain& domain, double spacing) {
  ScanGrid g;
  for (int a = 0; a < 3; ++a) {
    if (a < domain.dim()) {
      const double extent = domain.hi()[a] - domain.lo()[a];
      g.n[a] = std::max(1, static_cast<int>(std::ceil(extent / spacing)));
      g.step[a] = extent / g.n[a];
      g.max_step = std::max(g.max_step, g.step[a]);
    }
  }
  return g;
}

template <class Visit>
void for_each_scan_point(const Domain& domain, const ScanGrid& g, Visit&& visit) {
  const int nz = domain.dim() == 3 ? g.n[2] : 0;
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= g.n[1]; ++j)
      for (int i = 0; i <= g.n[0]; ++i) {
        Point x{domain.lo()[0] + g.step[0] * i, domain.lo()[1] + g.step[1] * j, 0.0};
        if (domain.dim() == 3) x[2] = domain.lo()[2] + g.step[2] * k;
        if (domain.phi(x) <= kBoundaryTolerance) visit(x);
      }
}

}  // namespace

PointCloud generate(const Domain& domain, double target_h, double delta_min, std::uint64_t seed,
                    const GenerateOptions& options) {
  require(target_h > 0.0, "target mesh size must be positive");
  require(delta_min > 0.0 && delta_min < target_h, "minimum separation must satisfy 0 < delta_min < target_h");
  require(options.boundary_spacing_ratio > 0.0 && options.boundary_spacing_ratio <= 0.5,
          "boundary spacing ratio must be in (0, 1/2]");
  const int dim = domain.dim();
  const double spacing = options.boundary_spacing_ratio * target_h;
  require(delta_min <= spacing * (1.0 + 1e-12),
          "minimum separation exceeds the boundary point spacing " + std::to_string(spacing) +
              "; no cloud can meet both");
  const double layer = options.boundary_layer_factor * spacing;

  CloudBuilder builder(domain, delta_min);
  if (dim == 2)
    add_boundary_2d(domain, builder, spacing);
  else
    add_boundary_3d(domain, builder, spacing);
  const std::size_t boundary_count = builder.points().size();

  Rng rng(seed);
  const auto darts = static_cast<std::size_t>(std::ceil(domain.box_volume() / std::pow(0.5 * target_h, dim)));
  for (std::size_t t = 0; t < darts; ++t) {
    Point x{0, 0, 0};
    for (int a = 0; a < dim; ++a) x[a] = rng.uniform(domain.lo()[a], domain.hi()[a]);
    if (domain.phi(x) <= -layer) builder.try_add(x);
  }

  const ScanGrid scan = make_scan(domain, options.scan_ratio * target_h);
  const double threshold = 0.5 * target_h - 0.5 * scan.max_step * std::sqrt(static_cast<double>(dim));
  for (int pass = 0; pass < 4; ++pass) {
    std::size_t inserted = 0;
    for_each_scan_point(domain, scan, [&](const Point& x) {
      if (builder.nearest(x) <= threshold) return;
      Point y = x;
      const double depth = -domain.phi(x);
      if (depth < layer) {
        y = x - ((layer - depth) * (1.0 + 1e-9)) * domain.outward_normal(x);
        if (domain.phi(y) > -layer * (1.0 - 1e-9)) return;
      }
      if (builder.try_add(y)) ++inserted;
    });
    if (inserted == 0) break;
  }

  double worst = 0.0;
  for_each_scan_point(domain, scan, [&](const Point& x) { worst = std::max(worst, builder.nearest(x)); });
  if (worst > 0.5 * target_h)
    throw Error("point cloud generation could not reach mesh size " + std::to_string(target_h) +
                " (largest hole radius " + std::to_string(worst) + ")");

  auto& points = builder.points();
  std::vector<Role> roles(points.size(), Role::Interior);
  std::fill(roles.begin(), roles.begin() + static_cast<std::ptrdiff_t>(boundary_count), Role::Dirichlet);
  const double cell = candidate_radius(target_h, ConeCriterionParams::for_dimension(dim, 16));
  return PointCloud(dim, std::move(points), std::move(roles), {}, cell);
}

// ---------------------------------------------------------------------------
// Quality and queries

CloudQualityReport measure_quality(const PointCloud& cloud, const Domain& domain, double sample_spacing) {
  require(cloud.size() > 0, "measure_quality needs a nonempty cloud");
  require(sample_spacing > 0.0, "sample spacing must be positive");
  const auto& points = cloud.points();
  CloudQualityReport report;

  double worst = 0.0;
  for_each_scan_point(domain, make_scan(domain, sample_spacing),
                      [&](const Point& x) { worst = std::max(worst, cloud.index().nearest_distance(x, points)); });
  report.mesh_size = 2.0 * worst;

  report.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    report.min_separation =
        std::min(report.min_separation, cloud.index().nearest_distance(points[i], points, static_cast<std::uint32_t>(i)));

  std::vector<Point> boundary;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (cloud.role(i) != Role::Interior) boundary.push_back(points[i]);
  if (boundary.size() > 1) {
    SpatialGrid grid(cloud.dim(), domain.lo(), domain.hi(), cloud.index().cell_size());
    for (std::size_t i = 0; i < boundary.size(); ++i) grid.insert(static_cast<std::uint32_t>(i), boundary[i]);
    for (std::size_t i = 0; i < boundary.size(); ++i)
      report.boundary_spacing =
          std::max(report.boundary_spacing, grid.nearest_distance(boundary[i], boundary, static_cast<std::uint32_t>(i)));
  }

  report.boundary_distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    if (cloud.role(i) == Role::Interior) report.boundary_distance = std::min(report.boundary_distance, -domain.phi(points[i]));

  const auto params = ConeCriterionParams::for_dimension(cloud.dim());
  const double r = guaranteed_cone_radius(report.mesh_size, params);
  std::vector<Point> offsets;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (cloud.role(i) != Role::Interior || -domain.phi(points[i]) <= r) continue;
    offsets.clear();
    for (std::size_t j : neighbors_within(cloud, i, r, domain)) offsets.push_back(points[j] - points[i]);
    if (offsets.empty() || !cone_criterion_check(offsets, params)) ++report.cone_failures;
  }
  return report;
}

namespace {

std::vector<std::size_t> collect_neighbors(const PointCloud& cloud, std::size_t center, double radius,
                                           const Domain* domain) {
  require(radius > 0.0, "neighbor radius must be positive");
  require(center < cloud.size(), "center index out of range");
  const Point& x0 = cloud.point(center);
  std::vector<std::pair<double, std::size_t>> found;
  cloud.index().for_each_candidate(x0, radius, [&](std::uint32_t id) {
    if (id == center) return;
    const double d = distance(x0, cloud.point(id));
    if (d >= radius) return;
    if (domain && !visible_from(*domain, x0, cloud.point(id))) return;
    found.emplace_back(d, id);
  });
  std::sort(found.begin(), found.end());
  std::vector<std::size_t> out;
  out.reserve(found.size());
  for (const auto& f : found) out.push_back(f.second);
  return out;
}

}  // namespace

std::vector<std::size_t> neighbors_within(const PointCloud& cloud, std::size_t center, double radius,
                                          const Domain& domain) {
  return collect_neighbors(cloud, center, radius, &domain);
}

std::vector<std::size_t> neighbors_within(const PointCloud& cloud, std::size_t center, double radius) {
  return collect_neighbors(cloud, center, radius, nullptr);
}

std::vector<std::size_t> four_quadrant_neighbors(const PointCloud& cloud, std::size_t center, double radius) {
  const auto candidates = neighbors_within(cloud, center, radius);
  const int dim = cloud.dim();
  std::vector<int> taken(std::size_t{1} << dim, 0);
  std::vector<std::size_t> out;
  const Point& x0 = cloud.point(center);
  for (std::size_t j : candidates) {
    const Point d = cloud.point(j) - x0;
    std::size_t sector = 0;
    for (int a = 0; a < dim; ++a)
      if (d[a] < 0.0) sector |= std::size_t{1} << a;
    if (taken[sector] < 2) {
      ++taken[sector];
      out.push_back(j);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format

void write_cloud(std::ostream& out, const PointCloud& cloud) {
  const int dim = cloud.dim();
  out << dim << ' ' << cloud.size() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < dim; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", cloud.point(i)[a]);
      out << buf << ' ';
    }
    out << to_string(cloud.role(i));
    if (cloud.role(i) == Role::Neumann)
      for (int a = 0; a < dim; ++a) {
        std::snprintf(buf, sizeof buf, "%.17g", cloud.normal(i)[a]);
        out << ' ' << buf;
      }
    out << '\n';
  }
}

PointCloud read_cloud(std::istream& in, double index_cell_size) {
  std::string line;
  int dim = 0;
  std::size_t n = 0;
  if (!std::getline(in, line)) throw Error("cloud file: missing header");
  {
    std::istringstream header(line);
    if (!(header >> dim >> n) || (dim != 2 && dim != 3)) throw Error("cloud file: malformed header '" + line + "'");
  }
  std::vector<Point> points;
  std::vector<Role> roles;
  std::vector<Point> normals;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw Error("cloud file: expected " + std::to_string(n) + " points, got " + std::to_string(i));
    std::istringstream row(line);
    Point x{0, 0, 0};
    Point normal{0, 0, 0};
    std::string tag;
    std::string token;
    for (int a = 0; a < dim; ++a) {
      if (!(row >> token)) throw Error("cloud file: line " + std::to_string(i + 2) + " is truncated");
      x[a] = std::strtod(token.c_str(), nullptr);
    }
    if (!(row >> tag)) throw Error("cloud file: line " + std::to_string(i + 2) + " lacks a role");
    Role role;
    if (tag == "I")
      role = Role::Interior;
    else if (tag == "D")
      role = Role::Dirichlet;
    else if (tag == "N")
      role = Role::Neumann;
    else
      throw Error("cloud file: unknown role '" + tag + "' on line " + std::to_string(i + 2));
    if (role == Role::Neumann)
      for (int a = 0; a < dim; ++a) {
        if (!(row >> token)) throw Error("cloud file: Neumann point on line " + std::to_string(i + 2) + " lacks a normal");
        normal[a] = std::strtod(token.c_str(), nullptr);
      }
    points.push_back(x);
    roles.push_back(role);
    normals.push_back(normal);
  }
  return PointCloud(dim, std::move(points), std::move(roles), std::move(normals), index_cell_size);
}

}  // namespace mpsfd
