#include "lcqft/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lcqft/detail/stencil.hpp"

namespace lcqft {

namespace {

std::vector<double> to_vec(const Grid& g) {
  std::vector<double> v(static_cast<size_t>(g.rows()) * g.cols());
  for (int t = 0; t < g.rows(); ++t)
    for (int x = 0; x < g.cols(); ++x) v[static_cast<size_t>(t) * g.cols() + x] = g(t, x);
  return v;
}

Grid to_grid(const std::vector<double>& v, int n_t, int n_x) {
  Grid g(n_t, n_x);
  for (int t = 0; t < n_t; ++t)
    for (int x = 0; x < n_x; ++x) g(t, x) = v[static_cast<size_t>(t) * n_x + x];
  return g;
}

}  // namespace

Spacetime::Spacetime(int n_t, int n_x, double dt, double dx, Grid beta, Grid a,
                     KGParams kg, double cfl_factor)
    : n_t_(n_t), n_x_(n_x), dt_(dt), dx_(dx), cfl_factor_(cfl_factor),
      beta_(std::move(beta)), a_(std::move(a)), kg_(kg) {
  if (n_t_ < 4 || n_x_ < 4) throw std::invalid_argument("grid too small");
  if (dt_ <= 0.0 || dx_ <= 0.0) throw std::invalid_argument("spacings must be positive");
  if (beta_.rows() != n_t_ || beta_.cols() != n_x_ || a_.rows() != n_t_ || a_.cols() != n_x_)
    throw std::invalid_argument("metric grid shape mismatch");
  if (kg_.m_sq < 0.0) throw std::invalid_argument("m_sq must be nonnegative");
  if ((beta_ <= 0.0).any()) throw std::invalid_argument("beta must be positive");
  if ((a_ <= 0.0).any()) throw std::invalid_argument("a must be positive");
  const double min_ratio = (a_ / beta_.sqrt()).minCoeff();
  if (dt_ > cfl_factor_ * dx_ * min_ratio * (1.0 + 1e-12))
    throw std::invalid_argument("CFL condition violated");

  auto s = detail::build_stencil<double>(n_t_, n_x_, dt_, dx_, to_vec(beta_),
                                         to_vec(a_), kg_.m_sq, kg_.xi);
  w_ = to_grid(s.w, n_t_, n_x_);
  V_ = to_grid(s.V, n_t_, n_x_);
  R_ = to_grid(s.R, n_t_, n_x_);
  Ath_ = to_grid(s.Ath, n_t_ - 1, n_x_);
  Bxh_ = to_grid(s.Bxh, n_t_, n_x_);
}

double Spacetime::char_speed(int t, int x) const {
  return std::sqrt(beta_(t, x)) / a_(t, x);
}

bool Spacetime::is_static(double tol) const {
  for (int t = 1; t < n_t_; ++t)
    for (int x = 0; x < n_x_; ++x) {
      if (std::abs(beta_(t, x) - beta_(0, x)) > tol) return false;
      if (std::abs(a_(t, x) - a_(0, x)) > tol) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Region

Region Region::empty_region(int n_t, int n_x) {
  Region r;
  r.n_t = n_t;
  r.n_x = n_x;
  r.mask.assign(static_cast<size_t>(n_t) * n_x, 0);
  return r;
}

Region Region::slab(int n_t, int n_x, int t0, int t1) {
  Region r = empty_region(n_t, n_x);
  r.tag = Tag::slab;
  for (int t = std::max(0, t0); t <= std::min(n_t - 1, t1); ++t)
    for (int x = 0; x < n_x; ++x) r.set(t, x);
  return r;
}

Region Region::interval(int n_t, int n_x, int t, int x0, int radius) {
  Region r = empty_region(n_t, n_x);
  for (int d = -radius; d <= radius; ++d) r.set(t, x0 + d);
  return r;
}

Region Region::single(int n_t, int n_x, int t, int x) {
  Region r = empty_region(n_t, n_x);
  r.set(t, x);
  return r;
}

void Region::set(int t, int x, bool v) {
  if (t < 0 || t >= n_t) return;
  x = ((x % n_x) + n_x) % n_x;
  mask[static_cast<size_t>(t) * n_x + x] = v ? 1 : 0;
}

int Region::size() const {
  int n = 0;
  for (uint8_t m : mask) n += (m != 0);
  return n;
}

int Region::t_min() const {
  for (int t = 0; t < n_t; ++t)
    for (int x = 0; x < n_x; ++x)
      if (contains(t, x)) return t;
  return -1;
}

int Region::t_max() const {
  for (int t = n_t - 1; t >= 0; --t)
    for (int x = 0; x < n_x; ++x)
      if (contains(t, x)) return t;
  return -1;
}

std::vector<std::pair<int, int>> Region::points() const {
  std::vector<std::pair<int, int>> p;
  for (int t = 0; t < n_t; ++t)
    for (int x = 0; x < n_x; ++x)
      if (contains(t, x)) p.emplace_back(t, x);
  return p;
}

Region Region::unite(const Region& o) const {
  Region r = *this;
  for (size_t i = 0; i < mask.size(); ++i) r.mask[i] = mask[i] | o.mask[i];
  r.tag = Tag::custom;
  return r;
}

Region Region::intersect(const Region& o) const {
  Region r = *this;
  for (size_t i = 0; i < mask.size(); ++i) r.mask[i] = mask[i] & o.mask[i];
  r.tag = Tag::custom;
  return r;
}

Region Region::minus(const Region& o) const {
  Region r = *this;
  for (size_t i = 0; i < mask.size(); ++i) r.mask[i] = mask[i] & ~o.mask[i];
  r.tag = Tag::custom;
  return r;
}

Region Region::dilate1() const {
  Region r = empty_region(n_t, n_x);
  for (int t = 0; t < n_t; ++t)
    for (int x = 0; x < n_x; ++x) {
      if (!contains(t, x)) continue;
      for (int dt = -1; dt <= 1; ++dt)
        for (int dxs = -1; dxs <= 1; ++dxs) r.set(t + dt, x + dxs);
    }
  return r;
}

bool Region::is_subset_of(const Region& o) const {
  for (size_t i = 0; i < mask.size(); ++i)
    if (mask[i] && !o.mask[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Causal structure

namespace {

// Spatial reach (in cells) of one admissible lattice step between rows t and
// t + dir at source site x: one cell of dilation plus the metric cone.
int step_reach(const Spacetime& M, int t, int dir, int x) {
  const int t2 = t + dir;
  const double v = std::max(M.char_speed(t, x), M.char_speed(t2, x));
  return 1 + static_cast<int>(std::floor(M.dt() * v / M.dx() + 1e-12));
}

// Step admissibility symmetric in the two endpoints.
bool step_ok(const Spacetime& M, int t, int x_from, int dir, int x_to) {
  int d = std::abs(x_to - x_from) % M.n_x();
  d = std::min(d, M.n_x() - d);
  const int r = std::max(step_reach(M, t, dir, x_from),
                         step_reach(M, t + dir, -dir, x_to));
  return d <= r;
}

Region causal_cone(const Spacetime& M, const Region& S, int dir) {
  if (S.empty()) throw std::invalid_argument("empty region");
  Region out = S;
  out.tag = Region::Tag::custom;
  const int n_t = M.n_t(), n_x = M.n_x();
  std::vector<uint8_t> level(n_x, 0), next(n_x, 0);
  const int t_start = (dir > 0) ? S.t_min() : S.t_max();
  for (int x = 0; x < n_x; ++x) level[x] = S.contains(t_start, x);
  for (int t = t_start; t >= 0 && t < n_t; t += dir) {
    const int t2 = t + dir;
    if (t2 < 0 || t2 >= n_t) break;
    std::fill(next.begin(), next.end(), 0);
    for (int x = 0; x < n_x; ++x) {
      if (!level[x]) continue;
      const int r = step_reach(M, t, dir, x);
      for (int d = -r; d <= r; ++d) next[((x + d) % n_x + n_x) % n_x] = 1;
    }
    for (int x = 0; x < n_x; ++x) {
      if (S.contains(t2, x)) next[x] = 1;
      if (next[x]) out.set(t2, x);
      level[x] = next[x];
    }
  }
  return out;
}

}  // namespace

Region causal_future(const Spacetime& M, const Region& S) {
  return causal_cone(M, S, +1);
}

Region causal_past(const Spacetime& M, const Region& S) {
  return causal_cone(M, S, -1);
}

Region causal_complement(const Spacetime& M, const Region& O) {
  if (O.empty()) throw std::invalid_argument("empty region");
  const Region hull =
      causal_future(M, O).unite(causal_past(M, O)).dilate1();
  return Region::slab(M.n_t(), M.n_x(), 0, M.n_t() - 1).minus(hull);
}

Region cauchy_development(const Spacetime& M, const Region& base) {
  if (base.empty()) throw std::invalid_argument("empty region");
  const int n_t = M.n_t(), n_x = M.n_x();
  const double vmax = (M.beta().sqrt() / M.a()).maxCoeff();
  const int rmax = 1 + static_cast<int>(std::floor(M.dt() * vmax / M.dx() + 1e-12));
  // A point lies in the development iff it cannot be joined to both time
  // edges by causal lattice paths avoiding the base: escape(t, x, dir) marks
  // points with an avoiding path to the edge in direction dir.
  auto escapes = [&](int dir) {
    std::vector<uint8_t> esc(static_cast<size_t>(n_t) * n_x, 0);
    const int t_edge = (dir > 0) ? n_t - 1 : 0;
    for (int x = 0; x < n_x; ++x)
      esc[static_cast<size_t>(t_edge) * n_x + x] = !base.contains(t_edge, x);
    for (int t = t_edge - dir; t >= 0 && t < n_t; t -= dir) {
      for (int x = 0; x < n_x; ++x) {
        if (base.contains(t, x)) continue;
        for (int d = -rmax - 1; d <= rmax + 1; ++d) {
          const int xp = ((x + d) % n_x + n_x) % n_x;
          if (step_ok(M, t, x, dir, xp) &&
              esc[static_cast<size_t>(t + dir) * n_x + xp]) {
            esc[static_cast<size_t>(t) * n_x + x] = 1;
            break;
          }
        }
      }
    }
    return esc;
  };
  const auto up = escapes(+1);
  const auto down = escapes(-1);
  Region out = Region::empty_region(n_t, n_x);
  out.tag = Region::Tag::diamond;
  for (int t = 0; t < n_t; ++t)
    for (int x = 0; x < n_x; ++x) {
      const size_t i = static_cast<size_t>(t) * n_x + x;
      if (!(up[i] && down[i])) out.set(t, x);
    }
  return out;
}

bool causally_disjoint(const Spacetime& M, const Region& O1, const Region& O2) {
  const Region hull = causal_future(M, O1).unite(causal_past(M, O1));
  return hull.intersect(O2).empty();
}

bool is_causally_convex(const Spacetime& M, const Region& O) {
  const auto pts = O.points();
  for (const auto& [tp, xp] : pts) {
    const Region jp = causal_future(M, Region::single(M.n_t(), M.n_x(), tp, xp));
    for (const auto& [tq, xq] : pts) {
      if (tq <= tp) continue;
      if (!jp.contains(tq, xq)) continue;
      const Region jq = causal_past(M, Region::single(M.n_t(), M.n_x(), tq, xq));
      if (!jp.intersect(jq).is_subset_of(O)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Perturbations

MetricPerturbation MetricPerturbation::zero(const Spacetime& M) {
  MetricPerturbation h;
  h.d_beta = Grid::Zero(M.n_t(), M.n_x());
  h.d_a = Grid::Zero(M.n_t(), M.n_x());
  h.support = Region::empty_region(M.n_t(), M.n_x());
  return h;
}

MetricPerturbation MetricPerturbation::bump(const Spacetime& M, int t0, int x0,
                                            double wt, double wx,
                                            double amp_beta, double amp_a) {
  MetricPerturbation h = zero(M);
  for (int t = 0; t < M.n_t(); ++t)
    for (int x = 0; x < M.n_x(); ++x) {
      const double ut = (t - t0) / wt;
      const double ux = periodic_delta(x, x0, M.n_x()) / wx;
      const double b = poly_bump(ut) * poly_bump(ux);
      if (b != 0.0) {
        h.d_beta(t, x) = amp_beta * b;
        h.d_a(t, x) = amp_a * b;
        h.support.set(t, x);
      }
    }
  return h;
}

bool MetricPerturbation::is_zero() const {
  return (d_beta == 0.0).all() && (d_a == 0.0).all();
}

MetricPerturbation MetricPerturbation::scaled(double s) const {
  MetricPerturbation h = *this;
  h.d_beta *= s;
  h.d_a *= s;
  return h;
}

Spacetime perturb(const Spacetime& M, const MetricPerturbation& h) {
  const int pad = M.n_pad();
  if (!h.is_zero()) {
    const int lo = h.support.t_min(), hi = h.support.t_max();
    if (lo < pad || hi > M.n_t() - 1 - pad)
      throw std::invalid_argument("perturbation support touches the time padding");
  }
  try {
    return Spacetime(M.n_t(), M.n_x(), M.dt(), M.dx(), M.beta() + h.d_beta,
                     M.a() + h.d_a, M.kg(), M.cfl_factor());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("perturbation too large: ") + e.what());
  }
}

LiePerturbation lie_perturbation(const Spacetime& M, const Grid& Xt, const Grid& Xx) {
  const int n_t = M.n_t(), n_x = M.n_x(), pad = M.n_pad();
  const double dt = M.dt(), dx = M.dx();
  for (int t = 0; t < n_t; ++t)
    for (int x = 0; x < n_x; ++x)
      if ((Xt(t, x) != 0.0 || Xx(t, x) != 0.0) &&
          (t < pad + 1 || t > n_t - 2 - pad))
        throw std::invalid_argument("vector field support touches the time padding");

  auto d_t = [&](const Grid& g, int t, int x) {
    if (t == 0 || t == n_t - 1) return 0.0;
    return (g(t + 1, x) - g(t - 1, x)) / (2.0 * dt);
  };
  auto d_x = [&](const Grid& g, int t, int x) {
    return (g(t, (x + 1) % n_x) - g(t, (x - 1 + n_x) % n_x)) / (2.0 * dx);
  };

  LiePerturbation out;
  out.h = MetricPerturbation::zero(M);
  out.off_diag = Grid::Zero(n_t, n_x);
  const Grid& b = M.beta();
  const Grid& a = M.a();
  for (int t = 1; t < n_t - 1; ++t)
    for (int x = 0; x < n_x; ++x) {
      const double db = Xt(t, x) * d_t(b, t, x) + Xx(t, x) * d_x(b, t, x) +
                        2.0 * b(t, x) * d_t(Xt, t, x);
      const double da = Xt(t, x) * d_t(a, t, x) + Xx(t, x) * d_x(a, t, x) +
                        a(t, x) * d_x(Xx, t, x);
      const double od = b(t, x) * d_x(Xt, t, x) -
                        a(t, x) * a(t, x) * d_t(Xx, t, x);
      out.h.d_beta(t, x) = db;
      out.h.d_a(t, x) = da;
      out.off_diag(t, x) = od;
      if (db != 0.0 || da != 0.0) out.h.support.set(t, x);
    }
  out.off_diag_norm = out.off_diag.abs().maxCoeff();
  return out;
}

// ---------------------------------------------------------------------------
// Worldlines and sampling functions

Worldline Worldline::static_line(const Spacetime& M, int x0, int t0, int t1) {
  if (t0 >= t1) throw std::invalid_argument("worldline needs at least two points");
  Worldline g;
  x0 = ((x0 % M.n_x()) + M.n_x()) % M.n_x();
  for (int t = t0; t <= t1; ++t) g.points.emplace_back(t, x0);
  for (int t = t0; t < t1; ++t) {
    const double bmid = 0.5 * (M.beta()(t, x0) + M.beta()(t + 1, x0));
    g.dtau.push_back(std::sqrt(bmid) * M.dt());
  }
  return g;
}

SamplingFunction SamplingFunction::bump(const Worldline& gamma, double center_frac,
                                        double width_frac, int p) {
  const int n = static_cast<int>(gamma.points.size());
  SamplingFunction f;
  f.fsq.resize(n);
  const double c = center_frac * (n - 1);
  const double w = width_frac * (n - 1);
  for (int i = 0; i < n; ++i) f.fsq[i] = poly_bump((i - c) / w, p);
  f.norm = 0.0;
  for (int i = 0; i + 1 < n; ++i)
    f.norm += 0.5 * (f.fsq[i] + f.fsq[i + 1]) * gamma.dtau[i];
  return f;
}

SamplingFunction SamplingFunction::gaussian(const Worldline& gamma,
                                            double center_frac,
                                            double width_frac) {
  const int n = static_cast<int>(gamma.points.size());
  SamplingFunction f;
  f.fsq.resize(n);
  const double c = center_frac * (n - 1);
  const double w = width_frac * (n - 1);
  for (int i = 0; i < n; ++i) {
    const double u = (i - c) / w;
    f.fsq[i] = std::exp(-0.5 * u * u);
  }
  f.norm = 0.0;
  for (int i = 0; i + 1 < n; ++i)
    f.norm += 0.5 * (f.fsq[i] + f.fsq[i + 1]) * gamma.dtau[i];
  return f;
}

}  // namespace lcqft
