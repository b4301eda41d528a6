#include "lcqft/field_eq.hpp"

#include <cmath>
#include <stdexcept>

namespace lcqft {

namespace {

// The explicit solvers are templated on the field scalar so that heavy
// real-valued computations (conservation studies, map assembly) avoid the
// cost of complex arithmetic.

template <class S>
using Arr = Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic>;

template <class S>
Arr<S> apply_P_impl(const Spacetime& M, const Arr<S>& u) {
  const int n_t = M.n_t(), n_x = M.n_x();
  if (u.rows() != n_t || u.cols() != n_x)
    throw std::invalid_argument("field shape mismatch");
  const double idt2 = 1.0 / (M.dt() * M.dt());
  const double idx2 = 1.0 / (M.dx() * M.dx());
  Arr<S> out = Arr<S>::Zero(n_t, n_x);
  for (int t = 1; t < n_t - 1; ++t)
    for (int x = 0; x < n_x; ++x) {
      const int xp = (x + 1) % n_x, xm = (x - 1 + n_x) % n_x;
      const S tt = (M.Ath()(t, x) * (u(t + 1, x) - u(t, x)) -
                    M.Ath()(t - 1, x) * (u(t, x) - u(t - 1, x))) * idt2;
      const S xx = (M.Bxh()(t, x) * (u(t, xp) - u(t, x)) -
                    M.Bxh()(t, xm) * (u(t, x) - u(t, xm))) * idx2;
      out(t, x) = (tt - xx) / M.w()(t, x) + M.V()(t, x) * u(t, x);
    }
  return out;
}

// Forward sweep: solve P u = f on interior rows with u = 0 below supp f.
template <class S>
Arr<S> green_ret_impl(const Spacetime& M, const Arr<S>& f) {
  const int n_t = M.n_t(), n_x = M.n_x();
  if (f.rows() != n_t || f.cols() != n_x)
    throw std::invalid_argument("field shape mismatch");
  const double dt2 = M.dt() * M.dt();
  const double idx2 = 1.0 / (M.dx() * M.dx());
  Arr<S> u = Arr<S>::Zero(n_t, n_x);
  for (int t = 1; t < n_t - 1; ++t)
    for (int x = 0; x < n_x; ++x) {
      const int xp = (x + 1) % n_x, xm = (x - 1 + n_x) % n_x;
      const S xx = (M.Bxh()(t, x) * (u(t, xp) - u(t, x)) -
                    M.Bxh()(t, xm) * (u(t, x) - u(t, xm))) * idx2;
      const S rhs = M.w()(t, x) * (f(t, x) - M.V()(t, x) * u(t, x)) + xx +
                    M.Ath()(t - 1, x) * (u(t, x) - u(t - 1, x)) / dt2;
      u(t + 1, x) = u(t, x) + rhs * dt2 / M.Ath()(t, x);
    }
  return u;
}

// Backward sweep: u = 0 above supp f.
template <class S>
Arr<S> green_adv_impl(const Spacetime& M, const Arr<S>& f) {
  const int n_t = M.n_t(), n_x = M.n_x();
  if (f.rows() != n_t || f.cols() != n_x)
    throw std::invalid_argument("field shape mismatch");
  const double dt2 = M.dt() * M.dt();
  const double idx2 = 1.0 / (M.dx() * M.dx());
  Arr<S> u = Arr<S>::Zero(n_t, n_x);
  for (int t = n_t - 2; t > 0; --t)
    for (int x = 0; x < n_x; ++x) {
      const int xp = (x + 1) % n_x, xm = (x - 1 + n_x) % n_x;
      const S xx = (M.Bxh()(t, x) * (u(t, xp) - u(t, x)) -
                    M.Bxh()(t, xm) * (u(t, x) - u(t, xm))) * idx2;
      const S rhs = M.w()(t, x) * (f(t, x) - M.V()(t, x) * u(t, x)) + xx +
                    M.Ath()(t, x) * (u(t, x) - u(t + 1, x)) / dt2;
      u(t - 1, x) = u(t, x) + rhs * dt2 / M.Ath()(t - 1, x);
    }
  return u;
}

// One leapfrog step of a source-free solution: given rows (s, s+1), return
// row s+2 from P u = 0 at row s+1.
template <class S>
Eigen::Array<S, Eigen::Dynamic, 1> step_up(const Spacetime& M,
                                           const Eigen::Array<S, Eigen::Dynamic, 1>& us,
                                           const Eigen::Array<S, Eigen::Dynamic, 1>& usp,
                                           int s) {
  const int n_x = M.n_x(), t = s + 1;
  const double dt2 = M.dt() * M.dt();
  const double idx2 = 1.0 / (M.dx() * M.dx());
  Eigen::Array<S, Eigen::Dynamic, 1> out(n_x);
  for (int x = 0; x < n_x; ++x) {
    const int xp = (x + 1) % n_x, xm = (x - 1 + n_x) % n_x;
    const S xx = (M.Bxh()(t, x) * (usp(xp) - usp(x)) -
                  M.Bxh()(t, xm) * (usp(x) - usp(xm))) * idx2;
    const S rhs = -M.w()(t, x) * M.V()(t, x) * usp(x) + xx +
                  M.Ath()(t - 1, x) * (usp(x) - us(x)) / dt2;
    out(x) = usp(x) + rhs * dt2 / M.Ath()(t, x);
  }
  return out;
}

// Given rows (s, s+1), return row s-1 from P u = 0 at row s.
template <class S>
Eigen::Array<S, Eigen::Dynamic, 1> step_down(const Spacetime& M,
                                             const Eigen::Array<S, Eigen::Dynamic, 1>& us,
                                             const Eigen::Array<S, Eigen::Dynamic, 1>& usp,
                                             int s) {
  const int n_x = M.n_x(), t = s;
  const double dt2 = M.dt() * M.dt();
  const double idx2 = 1.0 / (M.dx() * M.dx());
  Eigen::Array<S, Eigen::Dynamic, 1> out(n_x);
  for (int x = 0; x < n_x; ++x) {
    const int xp = (x + 1) % n_x, xm = (x - 1 + n_x) % n_x;
    const S xx = (M.Bxh()(t, x) * (us(xp) - us(x)) -
                  M.Bxh()(t, xm) * (us(x) - us(xm))) * idx2;
    const S rhs = -M.w()(t, x) * M.V()(t, x) * us(x) + xx -
                  M.Ath()(t, x) * (usp(x) - us(x)) / dt2;
    out(x) = us(x) + rhs * dt2 / M.Ath()(t - 1, x);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// TestFunction

Region TestFunction::support(double tol) const {
  Region r = Region::empty_region(static_cast<int>(values.rows()),
                                  static_cast<int>(values.cols()));
  for (int t = 0; t < values.rows(); ++t)
    for (int x = 0; x < values.cols(); ++x)
      if (std::abs(values(t, x)) > tol) r.set(t, x);
  return r;
}

TestFunction TestFunction::zero(const Spacetime& M) {
  return {CGrid::Zero(M.n_t(), M.n_x())};
}

TestFunction TestFunction::delta(const Spacetime& M, int t, int x, Complex amp) {
  TestFunction f = zero(M);
  f.values(t, ((x % M.n_x()) + M.n_x()) % M.n_x()) = amp;
  return f;
}

TestFunction TestFunction::bump(const Spacetime& M, int t0, int x0, double wt,
                                double wx, Complex amp) {
  TestFunction f = zero(M);
  for (int t = 0; t < M.n_t(); ++t)
    for (int x = 0; x < M.n_x(); ++x) {
      const double b = poly_bump((t - t0) / wt) *
                       poly_bump(periodic_delta(x, x0, M.n_x()) / wx);
      if (b != 0.0) f.values(t, x) = amp * b;
    }
  return f;
}

// ---------------------------------------------------------------------------
// Operators

CGrid apply_P(const Spacetime& M, const CGrid& u) { return apply_P_impl<Complex>(M, u); }
Grid apply_P(const Spacetime& M, const Grid& u) { return apply_P_impl<double>(M, u); }
CGrid green_retarded(const Spacetime& M, const CGrid& f) { return green_ret_impl<Complex>(M, f); }
Grid green_retarded(const Spacetime& M, const Grid& f) { return green_ret_impl<double>(M, f); }
CGrid green_advanced(const Spacetime& M, const CGrid& f) { return green_adv_impl<Complex>(M, f); }
Grid green_advanced(const Spacetime& M, const Grid& f) { return green_adv_impl<double>(M, f); }

CGrid e_solution(const Spacetime& M, const CGrid& f) {
  return green_retarded(M, f) - green_advanced(M, f);
}
Grid e_solution(const Spacetime& M, const Grid& f) {
  return green_retarded(M, f) - green_advanced(M, f);
}

Complex pair_w(const Spacetime& M, const CGrid& u, const CGrid& v) {
  Complex s = 0.0;
  for (int t = 0; t < M.n_t(); ++t)
    for (int x = 0; x < M.n_x(); ++x) s += M.w()(t, x) * u(t, x) * v(t, x);
  return s * M.dt() * M.dx();
}

Complex commutator_function(const Spacetime& M, const TestFunction& f,
                            const TestFunction& h) {
  return pair_w(M, f.values, e_solution(M, h.values));
}

CauchyData data_of(const Spacetime& M, const CGrid& u, int s) {
  if (s < 0 || s + 1 >= M.n_t()) throw std::invalid_argument("surface out of range");
  CauchyData d;
  d.surface_t = s;
  d.phi.resize(M.n_x());
  d.pi.resize(M.n_x());
  for (int x = 0; x < M.n_x(); ++x) {
    d.phi(x) = 0.5 * (u(s, x) + u(s + 1, x));
    d.pi(x) = -M.Ath()(s, x) * (u(s + 1, x) - u(s, x)) / M.dt();
  }
  return d;
}

CauchyData to_quotient(const Spacetime& M, const TestFunction& f, int t_ref) {
  return data_of(M, e_solution(M, f.values), t_ref);
}

Complex symplectic_form(const Spacetime& M, const CauchyData& d1,
                        const CauchyData& d2) {
  if (d1.phi.size() != d2.phi.size())
    throw std::invalid_argument("data length mismatch");
  Complex s = 0.0;
  for (int x = 0; x < d1.phi.size(); ++x)
    s += d1.phi(x) * d2.pi(x) - d1.pi(x) * d2.phi(x);
  return s * M.dx();
}

TestFunction timeslice_representative(const Spacetime& M, const TestFunction& f,
                                      int band_lo, int band_hi) {
  if (band_hi - band_lo < 2) throw std::invalid_argument("band too thin");
  if (band_lo < 1 || band_hi > M.n_t() - 2)
    throw std::invalid_argument("band outside the padded interior");
  // cut rises from 0 below the band to 1 above it; since P(Ef) = 0, the
  // product rule confines P(cut * Ef) to the band (intersected with the
  // causal shadow of supp f), while the quotient data is preserved exactly.
  const CGrid Ef = e_solution(M, f.values);
  CGrid cut = CGrid::Zero(M.n_t(), M.n_x());
  for (int t = 0; t < M.n_t(); ++t) {
    const double c = smoothstep(static_cast<double>(t - band_lo) / (band_hi - band_lo));
    for (int x = 0; x < M.n_x(); ++x) cut(t, x) = c;
  }
  CGrid g = apply_P(M, CGrid(cut * Ef));
  // Outside the band the cut is constant, so the exact result vanishes there
  // (either cut * Ef = 0 or P(Ef) = 0); drop the cancellation roundoff.
  for (int t = 0; t < M.n_t(); ++t)
    if (t < band_lo || t > band_hi) g.row(t).setZero();
  return {std::move(g)};
}

CauchyData transport(const Spacetime& M, const CauchyData& d, int s_to) {
  if (s_to < 0 || s_to + 1 >= M.n_t()) throw std::invalid_argument("surface out of range");
  using Vec = Eigen::Array<Complex, Eigen::Dynamic, 1>;
  int s = d.surface_t;
  Vec us(M.n_x()), usp(M.n_x());
  for (int x = 0; x < M.n_x(); ++x) {
    const Complex dl = -d.pi(x) * M.dt() / M.Ath()(s, x);
    us(x) = d.phi(x) - 0.5 * dl;
    usp(x) = d.phi(x) + 0.5 * dl;
  }
  while (s < s_to) {
    Vec nxt = step_up<Complex>(M, us, usp, s);
    us = usp;
    usp = nxt;
    ++s;
  }
  while (s > s_to) {
    Vec prv = step_down<Complex>(M, us, usp, s);
    usp = us;
    us = prv;
    --s;
  }
  CauchyData out;
  out.surface_t = s;
  out.phi.resize(M.n_x());
  out.pi.resize(M.n_x());
  for (int x = 0; x < M.n_x(); ++x) {
    out.phi(x) = 0.5 * (us(x) + usp(x));
    out.pi(x) = -M.Ath()(s, x) * (usp(x) - us(x)) / M.dt();
  }
  return out;
}

CGrid solution_from_data(const Spacetime& M, const CauchyData& d) {
  using Vec = Eigen::Array<Complex, Eigen::Dynamic, 1>;
  const int s0 = d.surface_t;
  CGrid u = CGrid::Zero(M.n_t(), M.n_x());
  Vec us(M.n_x()), usp(M.n_x());
  for (int x = 0; x < M.n_x(); ++x) {
    const Complex dl = -d.pi(x) * M.dt() / M.Ath()(s0, x);
    us(x) = d.phi(x) - 0.5 * dl;
    usp(x) = d.phi(x) + 0.5 * dl;
  }
  for (int x = 0; x < M.n_x(); ++x) {
    u(s0, x) = us(x);
    u(s0 + 1, x) = usp(x);
  }
  Vec a = us, b = usp;
  for (int s = s0; s + 2 < M.n_t(); ++s) {
    Vec nxt = step_up<Complex>(M, a, b, s);
    for (int x = 0; x < M.n_x(); ++x) u(s + 2, x) = nxt(x);
    a = b;
    b = nxt;
  }
  a = us;
  b = usp;
  for (int s = s0; s > 0; --s) {
    Vec prv = step_down<Complex>(M, a, b, s);
    for (int x = 0; x < M.n_x(); ++x) u(s - 1, x) = prv(x);
    b = a;
    a = prv;
  }
  return u;
}

Grid solution_from_data_real(const Spacetime& M, const Eigen::VectorXd& phi,
                             const Eigen::VectorXd& pi, int s) {
  CauchyData d;
  d.surface_t = s;
  d.phi = phi.cast<Complex>();
  d.pi = pi.cast<Complex>();
  return solution_from_data(M, d).real();
}

Eigen::MatrixXd transport_matrix(const Spacetime& M, int s_from, int s_to) {
  const int n_x = M.n_x();
  Eigen::MatrixXd L(2 * n_x, 2 * n_x);
  for (int i = 0; i < 2 * n_x; ++i) {
    CauchyData d;
    d.surface_t = s_from;
    d.phi = Eigen::VectorXcd::Zero(n_x);
    d.pi = Eigen::VectorXcd::Zero(n_x);
    if (i < n_x) d.phi(i) = 1.0;
    else d.pi(i - n_x) = 1.0;
    const CauchyData out = transport(M, d, s_to);
    for (int x = 0; x < n_x; ++x) {
      L(x, i) = out.phi(x).real();
      L(n_x + x, i) = out.pi(x).real();
    }
  }
  return L;
}

TestFunction data_to_testfunction(const Spacetime& M, const CauchyData& d,
                                  int band_lo, int band_hi) {
  if (band_hi - band_lo < 2) throw std::invalid_argument("band too thin");
  if (band_lo < 1 || band_hi > M.n_t() - 2)
    throw std::invalid_argument("band outside the padded interior");
  const CGrid u = solution_from_data(M, d);
  CGrid cut = CGrid::Zero(M.n_t(), M.n_x());
  for (int t = 0; t < M.n_t(); ++t) {
    const double c = smoothstep(static_cast<double>(t - band_lo) / (band_hi - band_lo));
    for (int x = 0; x < M.n_x(); ++x) cut(t, x) = c;
  }
  return {apply_P(M, CGrid(cut * u))};
}

}  // namespace lcqft
