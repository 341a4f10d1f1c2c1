#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mpsfd {

// Points always carry three coordinates; 2d data keeps the third at zero so
// dot products and norms need no dimension argument.
using Point = std::array<double, 3>;

inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point operator*(double t, const Point& a) { return {t * a[0], t * a[1], t * a[2]}; }

inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Point& a, const Point& b) { return norm(a - b); }

inline Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

enum class Role : std::uint8_t { Interior, Dirichlet, Neumann };

enum class Method { Mps, Lsq };

const char* to_string(Role role);
const char* to_string(Method method);
Method parse_method(const std::string& name);

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failures of the discretization or solve itself (infeasible stencil LP,
/// singular least-squares system, Krylov breakdown). The CLI maps these to
/// exit code 1.
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

inline void require_dimension(int dim) { require(dim == 2 || dim == 3, "dimension must be 2 or 3"); }

}  // namespace mpsfd
