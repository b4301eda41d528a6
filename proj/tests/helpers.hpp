#pragma once

#include <random>

#include "lcqft/field_eq.hpp"
#include "lcqft/geometry.hpp"

namespace testutil {

using namespace lcqft;

inline Spacetime make_flat(int n_t, int n_x, double m_sq = 1.0, double xi = 0.0,
                           double dt_factor = 0.5) {
  const double dx = 2.0 * kPi / n_x;
  return Spacetime(n_t, n_x, dt_factor * dx, dx, Grid::Ones(n_t, n_x),
                   Grid::Ones(n_t, n_x), KGParams{m_sq, xi});
}

// Static spatial profile a(x); flat geometry in disguise (curvature zero) but
// with nonconstant coefficients.
inline Spacetime make_static_bump(int n_t, int n_x, double amp = 0.3,
                                  double m_sq = 1.0, double xi = 0.0) {
  const double dx = 2.0 * kPi / n_x;
  Grid a(n_t, n_x);
  for (int t = 0; t < n_t; ++t)
    for (int x = 0; x < n_x; ++x)
      a(t, x) = 1.0 + amp * poly_bump(periodic_delta(x, n_x / 2, n_x) / (0.3 * n_x));
  return Spacetime(n_t, n_x, 0.5 * dx, dx, Grid::Ones(n_t, n_x), std::move(a),
                   KGParams{m_sq, xi});
}

// Expanding profile a(t); genuinely curved.
inline Spacetime make_cosmological(int n_t, int n_x, double amp = 0.4,
                                   double m_sq = 1.0, double xi = 0.0) {
  const double dx = 2.0 * kPi / n_x;
  Grid a(n_t, n_x);
  for (int t = 0; t < n_t; ++t) {
    const double v = 1.0 + amp * smoothstep((t - 0.3 * n_t) / (0.4 * n_t));
    for (int x = 0; x < n_x; ++x) a(t, x) = v;
  }
  return Spacetime(n_t, n_x, 0.5 * dx, dx, Grid::Ones(n_t, n_x), std::move(a),
                   KGParams{m_sq, xi});
}

// Localized time-dependent curvature bump in both t and x.
inline Spacetime make_curvature_bump(int n_t, int n_x, double amp = 0.3,
                                     double m_sq = 1.0, double xi = 0.0) {
  const double dx = 2.0 * kPi / n_x;
  Grid a(n_t, n_x);
  for (int t = 0; t < n_t; ++t)
    for (int x = 0; x < n_x; ++x)
      a(t, x) = 1.0 + amp * poly_bump((t - 0.5 * n_t) / (0.22 * n_t)) *
                          poly_bump(periodic_delta(x, n_x / 2, n_x) / (0.25 * n_x));
  return Spacetime(n_t, n_x, 0.5 * dx, dx, Grid::Ones(n_t, n_x), std::move(a),
                   KGParams{m_sq, xi});
}

inline TestFunction random_bump(const Spacetime& M, std::mt19937& rng,
                                int t_lo = -1, int t_hi = -1) {
  const int pad = M.n_pad() + 1;
  if (t_lo < 0) t_lo = pad;
  if (t_hi < 0) t_hi = M.n_t() - 1 - pad;
  std::uniform_int_distribution<int> td(t_lo + 2, t_hi - 2);
  std::uniform_int_distribution<int> xd(0, M.n_x() - 1);
  std::uniform_real_distribution<double> wd(2.0, 5.0);
  std::uniform_real_distribution<double> ad(-1.0, 1.0);
  const int t0 = td(rng);
  const double wt = std::min(wd(rng), 0.5 * std::min(t0 - t_lo, t_hi - t0) + 0.5);
  return TestFunction::bump(M, t0, xd(rng), std::max(1.5, wt), wd(rng),
                            Complex(ad(rng), ad(rng)));
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

}  // namespace testutil
