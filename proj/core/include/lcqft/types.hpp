#pragma once

#include <Eigen/Dense>
#include <complex>

namespace lcqft {

using Complex = std::complex<double>;

// Grids are indexed (time level, spatial site); the spatial direction is periodic.
using Grid = Eigen::ArrayXXd;
using CGrid = Eigen::ArrayXXcd;

inline constexpr double kPi = 3.14159265358979323846;

// C1 ramp: 0 for y <= 0, 1 for y >= 1, cubic in between.
inline double smoothstep(double y) {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  return y * y * (3.0 - 2.0 * y);
}

// Compactly supported C^(p-1) bump on (-1, 1), equal to (1-u^2)^p inside.
inline double poly_bump(double u, int p = 4) {
  const double s = 1.0 - u * u;
  if (s <= 0.0) return 0.0;
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= s;
  return r;
}

// Derivative of poly_bump with respect to u.
inline double poly_bump_du(double u, int p = 4) {
  const double s = 1.0 - u * u;
  if (s <= 0.0) return 0.0;
  double r = 1.0;
  for (int i = 0; i < p - 1; ++i) r *= s;
  return -2.0 * p * u * r;
}

// Shortest signed distance between periodic site indices, in units of sites.
inline double periodic_delta(int x, int x0, int n_x) {
  int d = (x - x0) % n_x;
  if (d < 0) d += n_x;
  if (d > n_x / 2) d -= n_x;
  return static_cast<double>(d);
}

}  // namespace lcqft
