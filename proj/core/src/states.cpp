#include "lcqft/states.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace lcqft {

namespace {

Eigen::MatrixXd symplectic_gram(int n_x, double dx) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * n_x, 2 * n_x);
  S.topRightCorner(n_x, n_x) = dx * Eigen::MatrixXd::Identity(n_x, n_x);
  S.bottomLeftCorner(n_x, n_x) = -dx * Eigen::MatrixXd::Identity(n_x, n_x);
  return S;
}

void require_ultrastatic(const Spacetime& M) {
  if (!M.is_static(1e-14) || (M.beta() - 1.0).abs().maxCoeff() > 1e-14)
    throw std::invalid_argument("ultrastatic required");
}

// Data-space vectors through which the mode coordinates act as smeared
// fields: q_k = Phi(uq_k), p_k = Phi(up_k).
Eigen::VectorXd mode_q_vector(const ModeData& md, int k) {
  const int n = static_cast<int>(md.a.size());
  Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * n);
  u.tail(n) = -(md.a.array() * md.modes.col(k).array()).matrix();
  return u;
}

Eigen::VectorXd mode_p_vector(const ModeData& md, int k) {
  const int n = static_cast<int>(md.a.size());
  Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * n);
  u.head(n) = md.modes.col(k);
  return u;
}

}  // namespace

ModeData spatial_modes(const Spacetime& M) {
  require_ultrastatic(M);
  const int n = M.n_x(), row = 1;
  const double idx2 = 1.0 / (M.dx() * M.dx());
  // A = diag(a) D is symmetric; D v = nu^2 v becomes A v = nu^2 diag(a) v.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    const int xp = (x + 1) % n, xm = (x - 1 + n) % n;
    A(x, x) = (M.Bxh()(row, x) + M.Bxh()(row, xm)) * idx2 +
              M.a()(row, x) * M.V()(row, x);
    A(x, xp) -= M.Bxh()(row, x) * idx2;
    A(x, xm) -= M.Bxh()(row, xm) * idx2;
    B(x, x) = M.a()(row, x);
  }
  ModeData md;
  md.a = M.a().row(row);
  if (M.kg().m_sq == 0.0 && M.kg().xi == 0.0) {
    A += (kRegulatorMass * kRegulatorMass) * B;
    md.regulated = true;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
  Eigen::VectorXd nu2 = es.eigenvalues();
  md.modes = es.eigenvectors() / std::sqrt(M.dx());
  md.nu.resize(n);
  md.omega.resize(n);
  for (int k = 0; k < n; ++k) {
    if (nu2(k) <= 0.0) {
      if (nu2(k) < -1e-12) throw std::runtime_error("non-positive mode frequency");
      nu2(k) = kRegulatorMass * kRegulatorMass;
    }
    md.nu(k) = std::sqrt(nu2(k));
    const double half = 0.5 * M.dt() * md.nu(k);
    if (half >= 0.999) throw std::runtime_error("mode frequency too close to the stability limit");
    md.omega(k) = md.nu(k) / std::sqrt(1.0 - half * half);
  }
  return md;
}

Eigen::Matrix2cd vacuum_mode_covariance(double omega) {
  Eigen::Matrix2cd c;
  c << Complex(0.5 / omega, 0.0), Complex(0.0, 0.5),
       Complex(0.0, -0.5), Complex(0.5 * omega, 0.0);
  return c;
}

Eigen::Matrix2cd squeezed_mode_covariance(double omega, double r, double theta) {
  Eigen::Matrix2d D = Eigen::Vector2d(1.0 / std::sqrt(omega), std::sqrt(omega)).asDiagonal();
  Eigen::Matrix2d R;
  R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  Eigen::Matrix2d Sq = Eigen::Vector2d(0.5 * std::exp(2.0 * r), 0.5 * std::exp(-2.0 * r)).asDiagonal();
  Eigen::Matrix2d re = D * R * Sq * R.transpose() * D;
  Eigen::Matrix2cd c = re.cast<Complex>();
  c(0, 1) += Complex(0.0, 0.5);
  c(1, 0) += Complex(0.0, -0.5);
  return c;
}

Eigen::Matrix2cd excited_mode_covariance(double omega, int nq) {
  Eigen::Matrix2cd c = vacuum_mode_covariance(omega);
  c(0, 0) += Complex(nq / omega, 0.0);
  c(1, 1) += Complex(nq * omega, 0.0);
  return c;
}

QuasifreeState state_from_mode_covariance(const Spacetime& M, int t_ref,
                                          const ModeData& md,
                                          const std::vector<Eigen::Matrix2cd>& C_modes) {
  const int n = M.n_x();
  if (static_cast<int>(C_modes.size()) != md.n_modes())
    throw std::invalid_argument("one covariance per mode required");
  // Site-operator covariance from the mode decomposition, then the two-point
  // matrix as the induced bilinear form on Cauchy data.
  Eigen::MatrixXd Q(2 * n, n), P(2 * n, n);
  for (int k = 0; k < n; ++k) {
    Q.col(k).head(n) = md.modes.col(k);
    Q.col(k).tail(n).setZero();
    P.col(k).head(n).setZero();
    P.col(k).tail(n) = (md.a.array() * md.modes.col(k).array()).matrix();
  }
  Eigen::VectorXcd cqq(n), cqp(n), cpq(n), cpp(n);
  for (int k = 0; k < n; ++k) {
    cqq(k) = C_modes[k](0, 0);
    cqp(k) = C_modes[k](0, 1);
    cpq(k) = C_modes[k](1, 0);
    cpp(k) = C_modes[k](1, 1);
  }
  Eigen::MatrixXcd Qc = Q.cast<Complex>(), Pc = P.cast<Complex>();
  Eigen::MatrixXcd C = Qc * cqq.asDiagonal() * Qc.transpose() +
                       Qc * cqp.asDiagonal() * Pc.transpose() +
                       Pc * cpq.asDiagonal() * Qc.transpose() +
                       Pc * cpp.asDiagonal() * Pc.transpose();
  const Eigen::MatrixXd S = symplectic_gram(n, M.dx());
  QuasifreeState st;
  st.t_ref = t_ref;
  st.dx = M.dx();
  st.W = S.transpose().cast<Complex>() * C * S.cast<Complex>();
  return st;
}

QuasifreeState ultrastatic_vacuum(const Spacetime& M, int t_ref) {
  const ModeData md = spatial_modes(M);
  std::vector<Eigen::Matrix2cd> C(md.n_modes());
  for (int k = 0; k < md.n_modes(); ++k) C[k] = vacuum_mode_covariance(md.omega(k));
  return state_from_mode_covariance(M, t_ref, md, C);
}

double ccr_defect(const Spacetime& M, const QuasifreeState& s) {
  const Eigen::MatrixXd S = symplectic_gram(s.n_x(), M.dx());
  return (s.W - s.W.transpose() - Complex(0.0, 1.0) * S.cast<Complex>())
      .cwiseAbs()
      .maxCoeff();
}

double min_eigenvalue(const QuasifreeState& s) {
  Eigen::MatrixXcd H = 0.5 * (s.W + s.W.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

namespace {

Eigen::VectorXcd quotient_vector(const Spacetime& M, const QuasifreeState& s,
                                 const TestFunction& f) {
  const CauchyData d = to_quotient(M, f, s.t_ref);
  Eigen::VectorXcd v(2 * M.n_x());
  v.head(M.n_x()) = d.phi;
  v.tail(M.n_x()) = d.pi;
  return v;
}

// Sum over perfect pairings in operator order of the pair matrix entries.
Complex wick_sum(const Eigen::MatrixXcd& pair, std::vector<int>& idx) {
  const size_t n = idx.size();
  if (n == 0) return 1.0;
  if (n % 2) return 0.0;
  const int first = idx[0];
  Complex total = 0.0;
  for (size_t j = 1; j < n; ++j) {
    std::vector<int> rest;
    rest.reserve(n - 2);
    for (size_t m = 1; m < n; ++m)
      if (m != j) rest.push_back(idx[m]);
    total += pair(first, idx[j]) * wick_sum(pair, rest);
  }
  return total;
}

}  // namespace

Complex two_point_data(const QuasifreeState& s, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& v) {
  return (u.cast<Complex>().transpose() * s.W * v.cast<Complex>())(0, 0);
}

Complex two_point(const Spacetime& M, const QuasifreeState& s,
                  const TestFunction& f, const TestFunction& h) {
  const Eigen::VectorXcd u = quotient_vector(M, s, f);
  const Eigen::VectorXcd v = quotient_vector(M, s, h);
  return (u.transpose() * s.W * v)(0, 0);
}

Complex n_point(const Spacetime& M, const QuasifreeState& s,
                const std::vector<TestFunction>& fs) {
  const int n = static_cast<int>(fs.size());
  if (n > 8) throw std::invalid_argument("n-point order limited to 8");
  if (n % 2) return 0.0;
  std::vector<Eigen::VectorXcd> v;
  v.reserve(n);
  for (const auto& f : fs) v.push_back(quotient_vector(M, s, f));
  Eigen::MatrixXcd pair(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pair(i, j) = (v[i].transpose() * s.W * v[j])(0, 0);
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  return wick_sum(pair, idx);
}

Complex expectation(const CcrContext& ctx, const QuasifreeState& s,
                    const AlgebraElement& A) {
  if (2 * s.n_x() != ctx.dim())
    throw std::invalid_argument("state/context dimension mismatch");
  Complex total = 0.0;
  for (const auto& [m, c] : A.terms) {
    if (m.empty()) {
      total += c;
      continue;
    }
    if (m.size() % 2) continue;
    const int n = static_cast<int>(m.size());
    Eigen::MatrixXcd pair(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) pair(i, j) = s.W(m[i], m[j]);
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    total += c * wick_sum(pair, idx);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Lightcone probe

HadamardReport hadamard_difference(const Spacetime& M, const QuasifreeState& s1,
                                   const QuasifreeState& s2, int t0, int x0,
                                   int m_max) {
  if (s1.t_ref != s2.t_ref) throw std::invalid_argument("states must share t_ref");
  const double c = M.char_speed(t0, x0);
  const int steps_per_cell = std::max(1, static_cast<int>(std::lround(M.dx() / (c * M.dt()))));
  HadamardReport rep;
  std::vector<int> ms;
  for (int m = m_max; m >= 1; m /= 2) ms.push_back(m);
  const TestFunction base = TestFunction::delta(M, t0, x0);
  double vmax = 0.0;
  for (int m : ms) {
    const int t1 = t0 + m * steps_per_cell;
    if (t1 > M.n_t() - 2) throw std::invalid_argument("probe leaves the grid");
    const TestFunction tip = TestFunction::delta(M, t1, x0 + m);
    const Complex d = two_point(M, s1, base, tip) - two_point(M, s2, base, tip);
    rep.separations.push_back(m);
    rep.values.push_back(std::abs(d));
    vmax = std::max(vmax, std::abs(d));
  }
  if (rep.values.size() >= 3) {
    const double d_first = std::abs(rep.values[1] - rep.values[0]);
    const double d_last = std::abs(rep.values.back() - rep.values[rep.values.size() - 2]);
    rep.growth_ratio = (d_first > 1e-13 * std::max(1.0, vmax))
                           ? d_last / d_first
                           : 0.0;
  }
  rep.bounded = rep.growth_ratio < 0.5;
  rep.verdict = rep.bounded ? "Hadamard-compatible pair" : "singular-structure mismatch";
  return rep;
}

// ---------------------------------------------------------------------------
// Energy density

namespace {

// Relative site covariances of the field and momentum operators, recovered
// from the data-form difference: phi(x) and pi(x) act as the data functionals
// (0, -e_x/dx) and (e_x/dx, 0).
void site_covariances(const QuasifreeState& s, const QuasifreeState& ref,
                      Eigen::MatrixXd& Cphi, Eigen::MatrixXd& Cpi) {
  const int n = s.n_x();
  const double idx2 = 1.0 / (s.dx * s.dx);
  const Eigen::MatrixXcd D = s.W - ref.W;
  Cphi = D.bottomRightCorner(n, n).real() * idx2;
  Cpi = D.topLeftCorner(n, n).real() * idx2;
}

}  // namespace

Eigen::VectorXd energy_density_profile(const Spacetime& M, const QuasifreeState& s,
                                       const QuasifreeState& ref) {
  if (s.t_ref != ref.t_ref) throw std::invalid_argument("states must share t_ref");
  const int n = M.n_x(), row = std::min(s.t_ref, M.n_t() - 1);
  Eigen::MatrixXd Cphi, Cpi;
  site_covariances(s, ref, Cphi, Cpi);
  const double idx2 = 1.0 / (M.dx() * M.dx());
  Eigen::VectorXd rho(n);
  for (int x = 0; x < n; ++x) {
    const int xp = (x + 1) % n, xm = (x - 1 + n) % n;
    const double a2 = M.a()(row, x) * M.a()(row, x);
    const double gp = (Cphi(xp, xp) - Cphi(x, xp) - Cphi(xp, x) + Cphi(x, x)) * idx2;
    const double gm = (Cphi(x, x) - Cphi(xm, x) - Cphi(x, xm) + Cphi(xm, xm)) * idx2;
    rho(x) = 0.5 * (Cpi(x, x) / a2 + 0.5 * (gp + gm) / a2 +
                    M.V()(row, x) * Cphi(x, x));
  }
  return rho;
}

double total_energy(const Spacetime& M, const QuasifreeState& s,
                    const QuasifreeState& ref) {
  const Eigen::VectorXd rho = energy_density_profile(M, s, ref);
  const int row = std::min(s.t_ref, M.n_t() - 1);
  double e = 0.0;
  for (int x = 0; x < M.n_x(); ++x) e += rho(x) * M.a()(row, x) * M.dx();
  return e;
}

Eigen::Matrix2d mode_step_matrix(const Spacetime& M, const ModeData& md, int k,
                                 int s) {
  const int n = M.n_x();
  Eigen::Matrix2d out;
  for (int col = 0; col < 2; ++col) {
    CauchyData d;
    d.surface_t = s;
    d.phi = Eigen::VectorXcd::Zero(n);
    d.pi = Eigen::VectorXcd::Zero(n);
    if (col == 0)
      d.phi = md.modes.col(k).cast<Complex>();
    else
      d.pi = (md.a.array() * md.modes.col(k).array()).matrix().cast<Complex>();
    const CauchyData e = transport(M, d, s + 1);
    double q = 0.0, p = 0.0;
    for (int x = 0; x < n; ++x) {
      q += md.a(x) * md.modes(x, k) * e.phi(x).real();
      p += md.modes(x, k) * e.pi(x).real();
    }
    out(0, col) = q * M.dx();
    out(1, col) = p * M.dx();
  }
  return out;
}

namespace {

// Quadratic form of the energy density at site x0 in mode-k coordinates,
// diag(<rho from q^2>, <rho from p^2>).
Eigen::Matrix2d mode_density_form(const Spacetime& M, const ModeData& md, int k,
                                  int x0) {
  const int n = M.n_x(), row = 1;
  const int xp = (x0 + 1) % n, xm = (x0 - 1 + n) % n;
  const double a2 = md.a(x0) * md.a(x0);
  const double gp = (md.modes(xp, k) - md.modes(x0, k)) / M.dx();
  const double gm = (md.modes(x0, k) - md.modes(xm, k)) / M.dx();
  const double grad2 = 0.5 * (gp * gp + gm * gm);
  double V = M.V()(row, x0);
  if (md.regulated) V += kRegulatorMass * kRegulatorMass;
  Eigen::Matrix2d g = Eigen::Matrix2d::Zero();
  g(0, 0) = 0.5 * (grad2 / a2 + V * md.modes(x0, k) * md.modes(x0, k));
  g(1, 1) = 0.5 * md.modes(x0, k) * md.modes(x0, k);
  return g;
}

}  // namespace

std::vector<double> worldline_energy_density(const Spacetime& M, const ModeData& md,
                                             const std::vector<Eigen::Matrix2cd>& C_modes,
                                             const Worldline& gamma) {
  require_ultrastatic(M);
  const int n_modes = md.n_modes();
  const int n_pts = static_cast<int>(gamma.points.size());
  std::vector<double> rho(n_pts, 0.0);
  for (int k = 0; k < n_modes; ++k) {
    const Eigen::Matrix2d M1 = mode_step_matrix(M, md, k, gamma.points[0].first);
    Eigen::Matrix2d Sg = C_modes[k].real();
    Eigen::Matrix2d Sv = vacuum_mode_covariance(md.omega(k)).real();
    for (int i = 0; i < n_pts; ++i) {
      const Eigen::Matrix2d g = mode_density_form(M, md, k, gamma.points[i].second);
      rho[i] += (g * (Sg - Sv)).trace();
      Sg = M1 * Sg * M1.transpose();
      Sv = M1 * Sv * M1.transpose();
    }
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Averaged energy bounds

QeiReport qei_check(const Spacetime& M, const Worldline& gamma,
                    const SamplingFunction& f, int n_states, unsigned seed) {
  require_ultrastatic(M);
  const ModeData md = spatial_modes(M);
  const int n_modes = md.n_modes();
  const int n_pts = static_cast<int>(gamma.points.size());
  if (static_cast<int>(f.fsq.size()) != n_pts)
    throw std::invalid_argument("sampling weights must match the worldline");

  // Per-mode averaged-energy quadratic forms G_k (positive semidefinite) and
  // their vacuum baselines.
  std::vector<Eigen::Matrix2d> G(n_modes, Eigen::Matrix2d::Zero());
  std::vector<Eigen::Matrix2d> Svac(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    const Eigen::Matrix2d M1 = mode_step_matrix(M, md, k, gamma.points[0].first);
    Eigen::Matrix2d T = Eigen::Matrix2d::Identity();
    for (int i = 0; i < n_pts; ++i) {
      const double wgt = f.fsq(i) * gamma.dtau[i > 0 ? i - 1 : 0];
      if (wgt != 0.0) {
        const Eigen::Matrix2d g =
            mode_density_form(M, md, k, gamma.points[i].second);
        G[k] += wgt * T.transpose() * g * T;
      }
      T = M1 * T;
    }
    G[k] = 0.5 * (G[k] + G[k].transpose().eval());
    Svac[k] = vacuum_mode_covariance(md.omega(k)).real();
  }

  // Family lower bound: per mode, min of tr(G Sigma) over covariances with
  // det Sigma >= 1/4 is sqrt(det G) (0 when G is singular).
  QeiReport rep;
  double bound = 0.0;
  std::vector<Eigen::Matrix2d> minimizer(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    const double dg = G[k].determinant();
    const double vac = (G[k] * Svac[k]).trace();
    if (dg > 1e-24 * std::max(1.0, G[k].squaredNorm())) {
      bound += std::sqrt(dg) - vac;
      minimizer[k] = 0.5 * std::sqrt(dg) * G[k].inverse();
    } else {
      // Singular form: the infimum of tr(G Sigma) over admissible covariances
      // is 0 and is not attained; keep the vacuum as the sampled stand-in.
      bound += -vac;
      minimizer[k] = Svac[k];
    }
  }
  rep.bound = bound;

  auto averaged = [&](const std::vector<Eigen::Matrix2d>& Sg) {
    double a = 0.0;
    for (int k = 0; k < n_modes; ++k) a += (G[k] * (Sg[k] - Svac[k])).trace();
    return a;
  };

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> rdist(0.0, 1.2);
  std::uniform_real_distribution<double> tdist(0.0, kPi);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const int n_active = std::min(12, n_modes);

  rep.values.push_back(averaged(Svac));  // vacuum
  rep.values.push_back(averaged(minimizer));
  for (int s = 2; s < n_states; ++s) {
    std::vector<Eigen::Matrix2d> Sg = Svac;
    for (int k = 0; k < n_active; ++k)
      if (coin(rng) < 0.5)
        Sg[k] = squeezed_mode_covariance(md.omega(k), rdist(rng), tdist(rng)).real();
    rep.values.push_back(averaged(Sg));
  }
  rep.n_states = static_cast<int>(rep.values.size());
  rep.min_sampled = rep.values[0];
  rep.max_sampled = rep.values[0];
  for (double v : rep.values) {
    rep.min_sampled = std::min(rep.min_sampled, v);
    rep.max_sampled = std::max(rep.max_sampled, v);
    if (v < 0.0) rep.negative_attained = true;
  }
  rep.all_above = rep.min_sampled >= rep.bound - 1e-8;
  return rep;
}

// ---------------------------------------------------------------------------
// Transport and particle content

QuasifreeState bogoliubov_transport(const Spacetime& M, const QuasifreeState& s,
                                    const Eigen::MatrixXd& L) {
  const Eigen::MatrixXd S = symplectic_gram(s.n_x(), M.dx());
  if ((L.transpose() * S * L - S).cwiseAbs().maxCoeff() > 1e-9)
    throw std::invalid_argument("map is not symplectic");
  QuasifreeState out = s;
  out.W = L.transpose().cast<Complex>() * s.W * L.cast<Complex>();
  return out;
}

ParticleReport particle_number(const Spacetime& M_ref, const QuasifreeState& s) {
  const ModeData md = spatial_modes(M_ref);
  ParticleReport rep;
  rep.n_k.resize(md.n_modes());
  for (int k = 0; k < md.n_modes(); ++k) {
    const Eigen::VectorXd uq = mode_q_vector(md, k);
    const Eigen::VectorXd up = mode_p_vector(md, k);
    const double sqq = two_point_data(s, uq, uq).real();
    const double spp = two_point_data(s, up, up).real();
    rep.n_k(k) = spp / (2.0 * md.omega(k)) + 0.5 * md.omega(k) * sqq - 0.5;
    rep.total += std::max(rep.n_k(k), 0.0);
  }
  return rep;
}

}  // namespace lcqft
