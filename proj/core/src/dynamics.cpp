#include "lcqft/dynamics.hpp"

#include <Eigen/SVD>
#include <random>
#include <stdexcept>

#include "lcqft/detail/dual.hpp"
#include "lcqft/detail/stencil.hpp"

namespace lcqft {

Eigen::VectorXd data_to_vector(const CauchyData& d) {
  const int n = static_cast<int>(d.phi.size());
  Eigen::VectorXd v(2 * n);
  for (int x = 0; x < n; ++x) {
    v(x) = d.phi(x).real();
    v(n + x) = d.pi(x).real();
  }
  return v;
}

CauchyData vector_to_data(int surface_t, const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size()) / 2;
  CauchyData d;
  d.surface_t = surface_t;
  d.phi = v.head(n).cast<Complex>();
  d.pi = v.tail(n).cast<Complex>();
  return d;
}

double data_norm(const Spacetime& M, const CauchyData& d) {
  double s = 0.0;
  for (int x = 0; x < d.phi.size(); ++x)
    s += std::norm(d.phi(x)) + std::norm(d.pi(x));
  return std::sqrt(s * M.dx());
}

TestFunction rce_testfunction(const Spacetime& M, const MetricPerturbation& h,
                              const TestFunction& f) {
  if (h.is_zero()) return f;
  const Region sf = f.support();
  if (sf.empty()) return f;
  if (sf.t_min() <= h.support.t_max() + 1)
    throw std::invalid_argument("f must be supported in M+");
  const Spacetime Mh = perturb(M, h);
  const CGrid u = green_advanced(Mh, f.values);
  // The difference operator is supported where the stencils differ, i.e. in a
  // one-cell dilation of supp h, strictly below supp f.
  return {CGrid(f.values - (apply_P(Mh, u) - apply_P(M, u)))};
}

RceMap rce(const Spacetime& M, const MetricPerturbation& h, int t_ref) {
  const int n_x = M.n_x();
  if (t_ref + 3 > M.n_t() - 2)
    throw std::invalid_argument("reference surface too close to the top edge");
  if (!h.is_zero() && h.support.t_max() >= t_ref)
    throw std::invalid_argument("perturbation must lie below the reference surface");
  RceMap R;
  R.t_ref = t_ref;
  R.s_lo = h.is_zero() ? t_ref : h.support.t_min() - 1;
  R.s_hi = h.is_zero() ? t_ref : h.support.t_max() + 1;
  R.map.resize(2 * n_x, 2 * n_x);
  for (int i = 0; i < 2 * n_x; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * n_x);
    e(i) = 1.0;
    const TestFunction fi =
        data_to_testfunction(M, vector_to_data(t_ref, e), t_ref, t_ref + 3);
    const TestFunction gi = rce_testfunction(M, h, fi);
    R.map.col(i) = data_to_vector(to_quotient(M, gi, t_ref));
  }
  return R;
}

RceMap rce_via_transport_at(const Spacetime& M, const MetricPerturbation& h,
                            int t_ref, int s_lo, int s_hi) {
  const int n_x = M.n_x();
  // The time coupling lives on half levels averaged from adjacent rows, so a
  // perturbation on rows [t_min, t_max] perturbs the three-row relations on
  // rows [t_min - 1, t_max + 1]; the sandwiched transport must clear those.
  if (!h.is_zero() &&
      (s_lo + 2 > h.support.t_min() || s_hi < h.support.t_max() + 2))
    throw std::invalid_argument("surfaces must bracket the perturbation support");
  if (s_lo < 0 || s_hi + 1 >= M.n_t())
    throw std::invalid_argument("surface out of range");
  const Spacetime Mh = perturb(M, h);
  RceMap R;
  R.t_ref = t_ref;
  R.s_lo = s_lo;
  R.s_hi = s_hi;
  R.map.resize(2 * n_x, 2 * n_x);
  for (int i = 0; i < 2 * n_x; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * n_x);
    e(i) = 1.0;
    // Up through the unperturbed metric, down through the perturbed one,
    // back up to the reference surface. Data are identified between the two
    // spacetimes at surfaces where the metrics agree.
    CauchyData d = transport(M, vector_to_data(t_ref, e), s_hi);
    d = transport(Mh, d, s_lo);
    d = transport(M, d, t_ref);
    R.map.col(i) = data_to_vector(d);
  }
  return R;
}

RceMap rce_via_transport(const Spacetime& M, const MetricPerturbation& h, int t_ref) {
  if (h.is_zero()) {
    RceMap R;
    R.t_ref = R.s_lo = R.s_hi = t_ref;
    R.map = Eigen::MatrixXd::Identity(2 * M.n_x(), 2 * M.n_x());
    return R;
  }
  return rce_via_transport_at(M, h, t_ref, h.support.t_min() - 2,
                              h.support.t_max() + 2);
}

double symplecticity_defect(const Spacetime& M, const RceMap& R) {
  // sigma(u, v) = u^T S v with S = dx [[0, I], [-I, 0]].
  const int n = static_cast<int>(R.map.rows()) / 2;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  S.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n) * M.dx();
  S.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n) * M.dx();
  return (R.map.transpose() * S * R.map - S).cwiseAbs().maxCoeff();
}

Grid apply_L(const Spacetime& M, const MetricPerturbation& h, const Grid& u) {
  using detail::Dual;
  const int n_t = M.n_t(), n_x = M.n_x();
  if (u.rows() != n_t || u.cols() != n_x)
    throw std::invalid_argument("field shape mismatch");
  std::vector<Dual> beta(static_cast<size_t>(n_t) * n_x), a(beta.size());
  for (int t = 0; t < n_t; ++t)
    for (int x = 0; x < n_x; ++x) {
      const size_t i = static_cast<size_t>(t) * n_x + x;
      beta[i] = Dual(M.beta()(t, x), h.d_beta(t, x));
      a[i] = Dual(M.a()(t, x), h.d_a(t, x));
    }
  const auto st = detail::build_stencil<Dual>(n_t, n_x, M.dt(), M.dx(), beta, a,
                                              M.kg().m_sq, M.kg().xi);
  const double idt2 = 1.0 / (M.dt() * M.dt());
  const double idx2 = 1.0 / (M.dx() * M.dx());
  auto at = [n_x](const std::vector<Dual>& g, int t, int x) -> const Dual& {
    return g[static_cast<size_t>(t) * n_x + ((x % n_x) + n_x) % n_x];
  };
  Grid out = Grid::Zero(n_t, n_x);
  for (int t = 1; t < n_t - 1; ++t)
    for (int x = 0; x < n_x; ++x) {
      const int xp = (x + 1) % n_x, xm = (x - 1 + n_x) % n_x;
      const Dual tt = (at(st.Ath, t, x) * (u(t + 1, x) - u(t, x)) -
                       at(st.Ath, t - 1, x) * (u(t, x) - u(t - 1, x))) *
                      Dual(idt2);
      const Dual xx = (at(st.Bxh, t, x) * (u(t, xp) - u(t, x)) -
                       at(st.Bxh, t, xm) * (u(t, x) - u(t, xm))) *
                      Dual(idx2);
      const Dual p = (tt - xx) / at(st.w, t, x) + at(st.V, t, x) * Dual(u(t, x));
      out(t, x) = -p.d;  // minus the derivative of P_{M[sh]} u at s = 0
    }
  return out;
}

Grid apply_L_fd(const Spacetime& M, const MetricPerturbation& h, const Grid& u,
                double s) {
  const Spacetime Mp = perturb(M, h.scaled(s));
  const Spacetime Mm = perturb(M, h.scaled(-s));
  return Grid(-(apply_P(Mp, u) - apply_P(Mm, u)) / (2.0 * s));
}

CauchyData stress_energy_pairing(const Spacetime& M, const MetricPerturbation& h,
                                 const TestFunction& f, int t_ref) {
  // e_solution is retarded-minus-advanced; with supp h strictly below supp f
  // the retarded branch does not meet the perturbation, so the derivative of
  // the response equals the quotient of L applied to the advanced branch.
  const Grid Ef = e_solution(M, Grid(f.values.real()));
  TestFunction g = TestFunction::zero(M);
  g.values = (-apply_L(M, h, Ef)).cast<Complex>();
  return to_quotient(M, g, t_ref);
}

namespace {

CauchyData quotient_response(const Spacetime& M, const MetricPerturbation& h,
                             const TestFunction& f, int t_ref, double s) {
  return to_quotient(M, rce_testfunction(M, h.scaled(s), f), t_ref);
}

CauchyData data_axpy(double a, const CauchyData& x, double b, const CauchyData& y) {
  CauchyData r;
  r.surface_t = x.surface_t;
  r.phi = a * x.phi + b * y.phi;
  r.pi = a * x.pi + b * y.pi;
  return r;
}

}  // namespace

CauchyData rce_derivative_fd(const Spacetime& M, const MetricPerturbation& h,
                             const TestFunction& f, int t_ref, double s) {
  const CauchyData p = quotient_response(M, h, f, t_ref, s);
  const CauchyData m = quotient_response(M, h, f, t_ref, -s);
  return data_axpy(0.5 / s, p, -0.5 / s, m);
}

CauchyData rce_derivative(const Spacetime& M, const MetricPerturbation& h,
                          const TestFunction& f, int t_ref, double s0) {
  const CauchyData d1 = rce_derivative_fd(M, h, f, t_ref, s0);
  const CauchyData d2 = rce_derivative_fd(M, h, f, t_ref, 0.5 * s0);
  return data_axpy(4.0 / 3.0, d2, -1.0 / 3.0, d1);
}

// ---------------------------------------------------------------------------
// Dynamically defined local observables

namespace {

bool bump_admissible(const Spacetime& M, const Region& allowed,
                     const MetricPerturbation& h) {
  if (h.is_zero()) return false;
  const int pad = M.n_pad();
  if (h.support.t_min() < pad || h.support.t_max() > M.n_t() - 1 - pad)
    return false;
  return h.support.is_subset_of(allowed);
}

double random_amp(std::mt19937& rng) {
  std::uniform_real_distribution<double> adist(-0.05, 0.05);
  double a = adist(rng);
  if (std::abs(a) < 0.01) a = (a < 0 ? -0.02 : 0.02);
  return a;
}

// Perturbations supported inside `allowed`. The binding constraints of the
// joint fixed space come from the cells of `allowed` nearest the reference
// surfaces, so boundary coverage matters: sweep single-row bumps hugging the
// admissible arcs on the two data rows first, then fill with random bumps.
std::vector<MetricPerturbation> sample_bumps(const Spacetime& M,
                                             const Region& allowed, int t_ref,
                                             int n_samples, std::mt19937& rng) {
  std::vector<MetricPerturbation> out;
  const int n_x = M.n_x();
  const double sweep_wt = 0.8, sweep_wx = 3.2;  // one row tall, seven sites wide
  const int sweep_rx = 3;
  for (int t0 : {t_ref, t_ref + 1}) {
    std::vector<uint8_t> eligible(n_x, 0);
    bool all = true;
    for (int x = 0; x < n_x; ++x) {
      bool ok = t0 >= M.n_pad() && t0 <= M.n_t() - 1 - M.n_pad();
      for (int d = -sweep_rx; d <= sweep_rx && ok; ++d)
        ok = allowed.contains(t0, x + d);
      eligible[x] = ok;
      all = all && ok;
    }
    auto emit = [&](int x0) {
      MetricPerturbation h = MetricPerturbation::bump(
          M, t0, x0, sweep_wt, sweep_wx, random_amp(rng), random_amp(rng));
      if (bump_admissible(M, allowed, h)) out.push_back(std::move(h));
    };
    if (all) {
      for (int x = 0; x < n_x; x += 2 * sweep_rx - 1) emit(x);
      continue;
    }
    // Walk each maximal eligible arc: ends plus interior every 2 rx - 1.
    for (int x = 0; x < n_x; ++x) {
      if (!eligible[x] || eligible[(x - 1 + n_x) % n_x]) continue;  // arc start
      int len = 0;
      while (len < n_x && eligible[(x + len) % n_x]) ++len;
      for (int o = 0; o < len; o += 2 * sweep_rx - 1) emit((x + o) % n_x);
      if ((len - 1) % (2 * sweep_rx - 1) != 0) emit((x + len - 1) % n_x);
    }
  }
  const auto pts = allowed.points();
  std::uniform_int_distribution<size_t> pick(0, pts.empty() ? 0 : pts.size() - 1);
  std::uniform_real_distribution<double> wtd(0.8, 2.5), wxd(1.5, 3.5);
  for (int attempt = 0; attempt < 4000 && !pts.empty() &&
                        static_cast<int>(out.size()) < n_samples;
       ++attempt) {
    const auto [t0, x0] = pts[pick(rng)];
    MetricPerturbation h = MetricPerturbation::bump(
        M, t0, x0, wtd(rng), wxd(rng), random_amp(rng), random_amp(rng));
    if (bump_admissible(M, allowed, h)) out.push_back(std::move(h));
  }
  return out;
}

Eigen::MatrixXd kernel_of(const Eigen::MatrixXd& A, double threshold) {
  const int d = static_cast<int>(A.cols());
  if (A.rows() == 0) return Eigen::MatrixXd::Identity(d, d);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int first = 0;
  while (first < sv.size() && sv(first) > threshold) ++first;
  return svd.matrixV().rightCols(d - first);
}

}  // namespace

FixedSubspace fixed_subspace(const Spacetime& M, const Region& K, int t_ref,
                             int n_samples, unsigned seed, double threshold) {
  const int d = 2 * M.n_x();
  const Region allowed = causal_complement(M, K);
  std::mt19937 rng(seed);
  FixedSubspace out;
  Eigen::MatrixXd stacked(0, d);
  for (const MetricPerturbation& h : sample_bumps(M, allowed, t_ref, n_samples, rng)) {
    const RceMap R = rce_via_transport(M, h, t_ref);
    stacked.conservativeResize(stacked.rows() + d, d);
    stacked.bottomRows(d) = R.map - Eigen::MatrixXd::Identity(d, d);
    out.dims_by_samples.push_back(
        static_cast<int>(kernel_of(stacked, threshold).cols()));
  }
  out.basis = kernel_of(stacked, threshold);
  return out;
}

DynLocReport dynamical_vs_kinematic(const Spacetime& M, const Region& O,
                                    int t_ref, int n_samples, unsigned seed) {
  DynLocReport rep;
  // The seed region K is the waist of O at the data rows, eroded by two
  // sites.  The causal complement of K (where the perturbations live) sits
  // one safety cell outside the causal hull of K, and a bump constrains data
  // one cell beyond its own support (the flux stencil couples neighbouring
  // sites), so the two erosion cells are paid back exactly: the joint fixed
  // space pinches down to the quotient deltas of O itself.
  Region K = Region::empty_region(M.n_t(), M.n_x());
  for (int t : {t_ref, t_ref + 1})
    for (int x = 0; x < M.n_x(); ++x) {
      bool inside = true;
      for (int d = -2; d <= 2 && inside; ++d) inside = O.contains(t, x + d);
      if (inside) K.set(t, x);
    }
  if (K.empty())
    throw std::invalid_argument(
        "region is too narrow at the reference rows (waist radius >= 2 "
        "required)");
  const bool whole_rows = K.size() == 2 * M.n_x();

  const FixedSubspace dyn =
      whole_rows ? FixedSubspace{Eigen::MatrixXd::Identity(2 * M.n_x(), 2 * M.n_x()), {}}
                 : fixed_subspace(M, K, t_ref, n_samples, seed);
  const KinematicSubalgebra kin = kinematic_subspace(M, O, t_ref);
  rep.dim_dynamical = dyn.dim();
  rep.dim_kinematic = kin.dim();
  rep.surplus = rep.dim_dynamical - rep.dim_kinematic;
  rep.angles = principal_angles(kin.basis, dyn.basis);
  rep.max_angle = rep.angles.size() ? rep.angles.maxCoeff() : 0.0;
  rep.containment = containment_defect(kin.basis, dyn.basis);
  if (rep.surplus == 0 && rep.max_angle <= 1e-3) {
    rep.verdict = "match";
  } else if (rep.surplus >= 1 && rep.containment <= 1e-3) {
    // Check whether the extra directions include the rigid constant shift.
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * M.n_x());
    c.head(M.n_x()).setConstant(1.0 / std::sqrt(static_cast<double>(M.n_x())));
    const double in_dyn = (c - dyn.basis * (dyn.basis.transpose() * c)).norm();
    const double in_kin = (c - kin.basis * (kin.basis.transpose() * c)).norm();
    rep.verdict = (in_dyn <= 1e-6 && in_kin > 1e-3)
                      ? "mismatch (+zero mode)"
                      : "mismatch (extra fixed directions)";
  } else {
    rep.verdict = "mismatch";
  }
  return rep;
}

}  // namespace lcqft
