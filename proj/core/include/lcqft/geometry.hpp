#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lcqft/types.hpp"

namespace lcqft {

struct KGParams {
  double m_sq = 1.0;  // mass squared, >= 0
  double xi = 0.0;    // curvature coupling
};

// A 1+1D lattice spacetime: time window x circle with metric
// g = beta dt^2 - a^2 dx^2 (split form, dt future-directed).
// Construction validates positivity of beta and a and the CFL condition
// dt <= cfl_factor * dx * min(a / sqrt(beta)), and precomputes the
// wave-operator stencil coefficients.
class Spacetime {
 public:
  Spacetime(int n_t, int n_x, double dt, double dx, Grid beta, Grid a,
            KGParams kg, double cfl_factor = 0.8);

  int n_t() const { return n_t_; }
  int n_x() const { return n_x_; }
  double dt() const { return dt_; }
  double dx() const { return dx_; }
  const Grid& beta() const { return beta_; }
  const Grid& a() const { return a_; }
  const KGParams& kg() const { return kg_; }
  double cfl_factor() const { return cfl_factor_; }
  int n_pad() const { return 4; }

  // Stencil coefficient grids (see detail/stencil.hpp).
  const Grid& w() const { return w_; }
  const Grid& V() const { return V_; }
  const Grid& ricci() const { return R_; }
  const Grid& Ath() const { return Ath_; }  // (n_t-1) x n_x
  const Grid& Bxh() const { return Bxh_; }

  // Local characteristic speed sqrt(beta)/a at a grid point.
  double char_speed(int t, int x) const;
  bool is_static(double tol = 0.0) const;

 private:
  int n_t_, n_x_;
  double dt_, dx_, cfl_factor_;
  Grid beta_, a_;
  KGParams kg_;
  Grid w_, V_, R_, Ath_, Bxh_;
};

// Set of lattice points with O(1) membership.
struct Region {
  enum class Tag { diamond, slab, custom };

  int n_t = 0, n_x = 0;
  std::vector<uint8_t> mask;
  Tag tag = Tag::custom;

  static Region empty_region(int n_t, int n_x);
  static Region slab(int n_t, int n_x, int t0, int t1);  // rows t0..t1 inclusive
  static Region interval(int n_t, int n_x, int t, int x0, int radius);
  static Region single(int n_t, int n_x, int t, int x);

  bool contains(int t, int x) const {
    if (t < 0 || t >= n_t) return false;
    x = ((x % n_x) + n_x) % n_x;
    return mask[static_cast<size_t>(t) * n_x + x] != 0;
  }
  void set(int t, int x, bool v = true);
  int size() const;
  bool empty() const { return size() == 0; }
  int t_min() const;
  int t_max() const;
  std::vector<std::pair<int, int>> points() const;

  Region unite(const Region& o) const;
  Region intersect(const Region& o) const;
  Region minus(const Region& o) const;
  // Grow by one cell in both time and space.
  Region dilate1() const;
  bool is_subset_of(const Region& o) const;
};

// Compactly supported metric perturbation (delta beta, delta a).
struct MetricPerturbation {
  Grid d_beta, d_a;
  Region support;

  static MetricPerturbation zero(const Spacetime& M);
  // Product bump centered at (t0, x0) with half-widths (wt, wx) in cells.
  static MetricPerturbation bump(const Spacetime& M, int t0, int x0, double wt,
                                 double wx, double amp_beta, double amp_a);
  bool is_zero() const;
  MetricPerturbation scaled(double s) const;
};

// Timelike lattice curve with per-step proper time increments.
struct Worldline {
  std::vector<std::pair<int, int>> points;
  std::vector<double> dtau;  // one entry per step

  // Static observer at site x0 over rows [t0, t1].
  static Worldline static_line(const Spacetime& M, int x0, int t0, int t1);
};

// Nonnegative weight f^2 along a worldline's samples.
struct SamplingFunction {
  Eigen::VectorXd fsq;  // one entry per worldline point
  double norm = 0.0;    // integral of f^2 dtau

  static SamplingFunction bump(const Worldline& gamma, double center_frac,
                               double width_frac, int p = 3);
  static SamplingFunction gaussian(const Worldline& gamma, double center_frac,
                                   double width_frac);
};

// Lattice causal structure. Futures/pasts are over-approximated (cone dilated
// by one cell per step); Cauchy developments use the same over-approximated
// cone for paths and are therefore under-approximations of the continuum
// development.
Region causal_future(const Spacetime& M, const Region& S);
Region causal_past(const Spacetime& M, const Region& S);
Region causal_complement(const Spacetime& M, const Region& O);
Region cauchy_development(const Spacetime& M, const Region& base);
bool causally_disjoint(const Spacetime& M, const Region& O1, const Region& O2);
bool is_causally_convex(const Spacetime& M, const Region& O);

Spacetime perturb(const Spacetime& M, const MetricPerturbation& h);

struct LiePerturbation {
  MetricPerturbation h;
  Grid off_diag;         // residual dt dx component of the Lie derivative
  double off_diag_norm;  // max-norm of the residual
};

// Discrete Lie derivative of the metric along X = Xt d_t + Xx d_x,
// packaged as a diagonal perturbation plus an off-diagonal residual report.
LiePerturbation lie_perturbation(const Spacetime& M, const Grid& Xt, const Grid& Xx);

}  // namespace lcqft
