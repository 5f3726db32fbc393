#pragma once

// Uniform cell-centred grid on the circle R/Z: x_i = (i + 1/2) / N.

#include <Eigen/Core>
#include <cmath>

namespace amencert {

using GridFunction = Eigen::VectorXd;
using Index = Eigen::Index;

inline double grid_point(Index i, Index n) {
  return (static_cast<double>(i) + 0.5) / static_cast<double>(n);
}

inline double frac(double x) { return x - std::floor(x); }

/// Arc-length distance on R/Z, in [0, 1/2].
inline double circle_distance(double u, double v) {
  const double d = frac(u - v);
  return std::min(d, 1.0 - d);
}

/// Periodic piecewise-linear interpolation of grid samples at an arbitrary point.
template <typename Derived>
typename Derived::Scalar periodic_interp(const Eigen::DenseBase<Derived>& f, double x) {
  const Index n = f.size();
  const double u = frac(x) * static_cast<double>(n) - 0.5;
  const double fl = std::floor(u);
  const double t = u - fl;
  Index i = static_cast<Index>(fl);
  if (i < 0) i += n;
  const Index j = (i + 1 == n) ? 0 : i + 1;
  return (1.0 - t) * f(i) + t * f(j);
}

/// Samples f at the points given by `at` (values interpreted mod 1).
template <typename Derived, typename Points>
GridFunction resample(const Eigen::DenseBase<Derived>& f, const Eigen::DenseBase<Points>& at) {
  GridFunction out(at.size());
  for (Index i = 0; i < at.size(); ++i) out(i) = periodic_interp(f, at(i));
  return out;
}

/// Midpoint rule for the Lebesgue integral over the circle.
template <typename Derived>
typename Derived::Scalar midpoint_integral(const Eigen::DenseBase<Derived>& f) {
  return f.sum() / static_cast<typename Derived::Scalar>(f.size());
}

inline GridFunction grid_points(Index n) {
  GridFunction x(n);
  for (Index i = 0; i < n; ++i) x(i) = grid_point(i, n);
  return x;
}

}  // namespace amencert
