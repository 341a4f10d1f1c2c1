#include "mpsfd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "mpsfd/simplex.hpp"

namespace mpsfd {

const char* to_string(Role role) {
  switch (role) {
    case Role::Interior: return "I";
    case Role::Dirichlet: return "D";
    case Role::Neumann: return "N";
  }
  return "?";
}

const char* to_string(Method method) { return method == Method::Mps ? "mps" : "lsq"; }

Method parse_method(const std::string& name) {
  if (name == "mps") return Method::Mps;
  if (name == "lsq") return Method::Lsq;
  throw std::invalid_argument("unknown method '" + name + "'");
}

Domain::Domain(int dim, Point lo, Point hi, std::optional<Ball> cut) : dim_(dim), lo_(lo), hi_(hi), cut_(cut) {
  require_dimension(dim);
  for (int i = 0; i < dim; ++i) require(hi_[i] > lo_[i], "box bounds must satisfy lo < hi");
  for (int i = dim; i < 3; ++i) {
    lo_[i] = 0.0;
    hi_[i] = 0.0;
  }
  if (cut_) {
    require(cut_->radius > 0.0, "cut ball radius must be positive");
    for (int i = dim; i < 3; ++i) cut_->center[i] = 0.0;
    bool strictly_inside = true;
    for (int i = 0; i < dim; ++i)
      if (!(cut_->center[i] - cut_->radius > lo_[i] && cut_->center[i] + cut_->radius < hi_[i])) strictly_inside = false;
    require(!strictly_inside, "cut ball lies strictly inside the box (interior holes are not supported)");
  }
}

Domain Domain::unit_box(int dim) { return Domain(dim, {0, 0, 0}, {1, 1, 1}); }

Domain Domain::unit_box_with_cut(int dim) {
  require_dimension(dim);
  Ball ball;
  ball.center = {0.5, 0.5, 0.5};
  ball.center[static_cast<std::size_t>(dim - 1)] = 1.1;
  ball.radius = 0.44;
  return Domain(dim, {0, 0, 0}, {1, 1, 1}, ball);
}

double Domain::phi_box(const Point& x) const {
  double v = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim_; ++i) {
    const double c = 0.5 * (lo_[i] + hi_[i]);
    const double hw = 0.5 * (hi_[i] - lo_[i]);
    v = std::max(v, std::abs(x[i] - c) - hw);
  }
  return v;
}

double Domain::phi_ball(const Point& x) const {
  if (!cut_) return std::numeric_limits<double>::infinity();
  Point d = x - cut_->center;
  for (int i = dim_; i < 3; ++i) d[i] = 0.0;
  return norm(d) - cut_->radius;
}

double Domain::phi(const Point& x) const {
  const double box = phi_box(x);
  if (!cut_) return box;
  return std::max(box, -phi_ball(x));
}

Point Domain::outward_normal(const Point& x) const {
  const double box = phi_box(x);
  if (cut_ && -phi_ball(x) > box) {
    Point d = cut_->center - x;
    for (int i = dim_; i < 3; ++i) d[i] = 0.0;
    const double n = norm(d);
    return n > 0.0 ? (1.0 / n) * d : Point{0, 0, 0};
  }
  int axis = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim_; ++i) {
    const double c = 0.5 * (lo_[i] + hi_[i]);
    const double hw = 0.5 * (hi_[i] - lo_[i]);
    const double v = std::abs(x[i] - c) - hw;
    if (v > best) {
      best = v;
      axis = i;
    }
  }
  Point n{0, 0, 0};
  const double c = 0.5 * (lo_[axis] + hi_[axis]);
  n[axis] = x[axis] >= c ? 1.0 : -1.0;
  return n;
}

double Domain::box_volume() const {
  double v = 1.0;
  for (int i = 0; i < dim_; ++i) v *= hi_[i] - lo_[i];
  return v;
}

std::vector<Point> fibonacci_directions(int count) {
  std::vector<Point> dirs;
  dirs.reserve(static_cast<std::size_t>(count));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double a = golden * i;
    dirs.push_back({r * std::cos(a), r * std::sin(a), z});
  }
  return dirs;
}

namespace {

// Largest angle from any direction on the sphere to the nearest sample,
// estimated on a 32x denser lattice and inflated by 10%.
double covering_angle(int count) {
  static std::mutex mutex;
  static std::map<int, double> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(count); it != cache.end()) return it->second;
  }
  const auto samples = fibonacci_directions(count);
  const auto probes = fibonacci_directions(32 * count + 7);
  double worst = 0.0;
  for (const auto& p : probes) {
    double best = -1.0;
    for (const auto& s : samples) best = std::max(best, dot(p, s));
    worst = std::max(worst, std::acos(std::clamp(best, -1.0, 1.0)));
  }
  const double margin = 1.1 * worst;
  std::lock_guard lock(mutex);
  cache.emplace(count, margin);
  return margin;
}

std::vector<double> sorted_angles(std::span<const Point> offsets) {
  std::vector<double> angles;
  angles.reserve(offsets.size());
  for (const auto& x : offsets) {
    if (x[0] == 0.0 && x[1] == 0.0) continue;
    angles.push_back(std::atan2(x[1], x[0]));
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

double max_angular_gap(std::span<const Point> offsets) {
  const auto angles = sorted_angles(offsets);
  if (angles.empty()) return 2.0 * std::numbers::pi;
  double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return gap;
}

}  // namespace

ConeCriterionParams ConeCriterionParams::for_dimension(int dim, int direction_samples) {
  require_dimension(dim);
  ConeCriterionParams p;
  p.dim = dim;
  p.beta = dim == 2 ? std::sqrt(2.0) - 1.0 : std::sqrt((3.0 - std::sqrt(6.0)) / 6.0);
  p.gamma = 2.0 * std::atan(p.beta);
  p.direction_samples = direction_samples;
  if (dim == 3) {
    require(direction_samples > 0, "direction sample count must be positive");
    p.direction_margin = covering_angle(direction_samples);
  }
  return p;
}

bool half_space_check(std::span<const Point> offsets, int dim) {
  require_dimension(dim);
  require(!offsets.empty(), "half_space_check needs at least one offset");
  if (dim == 2) return max_angular_gap(offsets) < std::numbers::pi - 1e-12;

  // The offsets avoid every closed half space iff their conic hull is all of
  // R^3, i.e. it contains the positive spanning set e1, e2, e3, -(e1+e2+e3).
  StandardLp lp;
  const auto m = static_cast<Eigen::Index>(offsets.size());
  lp.matrix.resize(3, m);
  for (Eigen::Index j = 0; j < m; ++j)
    for (int i = 0; i < 3; ++i) lp.matrix(i, j) = offsets[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  const double scale = lp.matrix.cwiseAbs().maxCoeff();
  if (scale == 0.0) return false;
  lp.matrix /= scale;
  lp.cost = Eigen::VectorXd::Zero(m);
  const Eigen::Vector3d targets[4] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, -1, -1}};
  for (const auto& t : targets) {
    lp.rhs = t;
    if (solve_lp(lp).status != LpStatus::Optimal) return false;
  }
  return true;
}

bool cone_criterion_check(std::span<const Point> offsets, const ConeCriterionParams& params) {
  require(!offsets.empty(), "cone_criterion_check needs at least one offset");
  if (params.dim == 2) return max_angular_gap(offsets) <= params.gamma + 1e-12;

  const double half = std::atan(params.beta) - params.direction_margin;
  if (half <= 0.0) return false;
  const double threshold = std::cos(half);
  std::vector<Point> units;
  units.reserve(offsets.size());
  for (const auto& x : offsets) {
    const double n = norm(x);
    if (n > 0.0) units.push_back((1.0 / n) * x);
  }
  for (const auto& v : fibonacci_directions(params.direction_samples)) {
    bool hit = false;
    for (const auto& u : units) {
      if (dot(v, u) > threshold) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

double candidate_radius(double h, const ConeCriterionParams& params, double safety) {
  require(h > 0.0, "mesh size must be positive");
  require(safety > 0.0, "radius safety factor must be positive");
  return safety * 0.5 * h / std::sin(0.5 * params.gamma);
}

double guaranteed_cone_radius(double h, const ConeCriterionParams& params) {
  require(h > 0.0, "mesh size must be positive");
  return 0.5 * h * (1.0 + 1.0 / std::sin(0.5 * params.gamma));
}

bool visible_from(const Domain& domain, const Point& x0, const Point& x, int samples) {
  if (x == x0) return true;
  const Point d = x - x0;
  for (int s = 1; s <= samples; ++s) {
    const double t = static_cast<double>(s) / (samples + 1);
    if (domain.phi(x0 + t * d) > kCrackTolerance) return false;
  }
  return true;
}

}  // namespace mpsfd
