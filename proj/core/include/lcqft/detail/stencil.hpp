#pragma once

#include <vector>

#include "lcqft/detail/dual.hpp"

namespace lcqft::detail {

// Coefficient arrays of the discrete wave operator in flux form,
//   (P u)_{t,x} = [ Ath_{t,x}(u_{t+1,x}-u_{t,x}) - Ath_{t-1,x}(u_{t,x}-u_{t-1,x}) ] / (w dt^2)
//              - [ Bxh_{t,x}(u_{t,x+1}-u_{t,x}) - Bxh_{t,x-1}(u_{t,x}-u_{t,x-1}) ] / (w dx^2)
//              + V_{t,x} u_{t,x},
// with volume weight w = a sqrt(beta), time coupling a/sqrt(beta) averaged onto
// half levels, space coupling sqrt(beta)/a averaged onto half sites, and
// potential V = m^2 + xi R.  The flux form makes P symmetric in the
// w-weighted inner product by construction.
template <class T>
struct StencilArrays {
  int n_t = 0, n_x = 0;
  std::vector<T> w;    // n_t * n_x
  std::vector<T> V;    // n_t * n_x
  std::vector<T> R;    // n_t * n_x (scalar curvature)
  std::vector<T> Ath;  // (n_t-1) * n_x, half time levels
  std::vector<T> Bxh;  // n_t * n_x, half sites (between x and x+1)
};

// Scalar curvature of g = beta dt^2 - a^2 dx^2 by centered differences.
// Time edges copy the adjacent interior row (edge rows are excluded from all
// identities anyway); space is periodic.
template <class T>
std::vector<T> scalar_curvature(int n_t, int n_x, double dt, double dx,
                                const std::vector<T>& b, const std::vector<T>& a) {
  auto at = [&](const std::vector<T>& g, int t, int x) -> const T& {
    if (t < 0) t = 0;
    if (t > n_t - 1) t = n_t - 1;
    x = ((x % n_x) + n_x) % n_x;
    return g[static_cast<size_t>(t) * n_x + x];
  };
  std::vector<T> R(static_cast<size_t>(n_t) * n_x);
  for (int t = 0; t < n_t; ++t) {
    const int tm = (t == 0) ? 1 : t - 1;      // one-sided copies at the edges
    const int tp = (t == n_t - 1) ? n_t - 2 : t + 1;
    for (int x = 0; x < n_x; ++x) {
      const T bc = at(b, t, x), ac = at(a, t, x);
      const T bt = (at(b, tp, x) - at(b, tm, x)) / T(2.0 * dt);
      const T bx = (at(b, t, x + 1) - at(b, t, x - 1)) / T(2.0 * dx);
      const T bxx = (at(b, t, x + 1) - T(2.0) * bc + at(b, t, x - 1)) / T(dx * dx);
      const T atd = (at(a, tp, x) - at(a, tm, x)) / T(2.0 * dt);
      const T att = (at(a, tp, x) - T(2.0) * ac + at(a, tm, x)) / T(dt * dt);
      const T ax = (at(a, t, x + 1) - at(a, t, x - 1)) / T(2.0 * dx);
      R[static_cast<size_t>(t) * n_x + x] =
          (ac * ac * atd * bt - T(2.0) * ac * ac * bc * att + ac * bc * bxx -
           ac * bx * bx / T(2.0) - ax * bc * bx) /
          (ac * ac * ac * bc * bc);
    }
  }
  return R;
}

template <class T>
StencilArrays<T> build_stencil(int n_t, int n_x, double dt, double dx,
                               const std::vector<T>& beta, const std::vector<T>& a,
                               double m_sq, double xi) {
  StencilArrays<T> s;
  s.n_t = n_t;
  s.n_x = n_x;
  const size_t n = static_cast<size_t>(n_t) * n_x;
  s.w.resize(n);
  s.V.resize(n);
  s.Bxh.resize(n);
  s.Ath.resize(static_cast<size_t>(n_t - 1) * n_x);
  s.R = scalar_curvature(n_t, n_x, dt, dx, beta, a);

  std::vector<T> Af(n), Bf(n);
  using std::sqrt;
  for (size_t i = 0; i < n; ++i) {
    const T sb = sqrt(beta[i]);
    s.w[i] = a[i] * sb;
    Af[i] = a[i] / sb;
    Bf[i] = sb / a[i];
    s.V[i] = T(m_sq) + T(xi) * s.R[i];
  }
  for (int t = 0; t + 1 < n_t; ++t)
    for (int x = 0; x < n_x; ++x) {
      const size_t i = static_cast<size_t>(t) * n_x + x;
      s.Ath[i] = (Af[i] + Af[i + n_x]) / T(2.0);
    }
  for (int t = 0; t < n_t; ++t)
    for (int x = 0; x < n_x; ++x) {
      const size_t i = static_cast<size_t>(t) * n_x + x;
      const size_t ip = static_cast<size_t>(t) * n_x + (x + 1) % n_x;
      s.Bxh[i] = (Bf[i] + Bf[ip]) / T(2.0);
    }
  return s;
}

}  // namespace lcqft::detail
