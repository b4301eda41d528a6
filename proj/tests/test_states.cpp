#include <algorithm>
#include <random>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "lcqft/states.hpp"

using namespace lcqft;
using namespace testutil;

namespace {

// Closed-form ascending spatial frequencies of the flat periodic lattice.
Eigen::VectorXd flat_frequencies(int n_x, double dx, double m_sq) {
  std::vector<double> nu(n_x);
  for (int j = 0; j < n_x; ++j) {
    const double kt = (2.0 / dx) * std::sin(kPi * j / n_x);
    nu[j] = std::sqrt(kt * kt + m_sq);
  }
  std::sort(nu.begin(), nu.end());
  return Eigen::Map<Eigen::VectorXd>(nu.data(), n_x);
}

// Sum over perfect pairings of two-point values, written independently of the
// library's recursion (explicit pairing enumeration).
Complex pairing_oracle(const Eigen::MatrixXcd& w, std::vector<int> idx) {
  if (idx.empty()) return 1.0;
  Complex total = 0.0;
  const int a = idx.front();
  for (size_t j = 1; j < idx.size(); ++j) {
    std::vector<int> rest;
    for (size_t m = 1; m < idx.size(); ++m)
      if (m != j) rest.push_back(idx[m]);
    total += w(a, idx[j]) * pairing_oracle(w, rest);
  }
  return total;
}

}  // namespace

TEST_CASE("spatial mode frequencies match the closed form on flat space") {
  for (double m_sq : {1.0, 0.3}) {
    const Spacetime M = make_flat(16, 48, m_sq);
    const ModeData md = spatial_modes(M);
    const Eigen::VectorXd want = flat_frequencies(48, M.dx(), m_sq);
    CHECK((md.nu - want).cwiseAbs().maxCoeff() <= 1e-11);
    for (int k = 0; k < 48; ++k) {
      const double half = 0.5 * M.dt() * md.nu(k);
      CHECK(md.omega(k) ==
            doctest::Approx(md.nu(k) / std::sqrt(1.0 - half * half)).epsilon(1e-12));
      // Normalization v^T diag(a) v dx = 1.
      const double nrm = md.modes.col(k).squaredNorm() * M.dx();
      CHECK(nrm == doctest::Approx(1.0).epsilon(1e-11));
    }
  }
  CHECK_THROWS_WITH_AS(spatial_modes(make_cosmological(32, 16)),
                       doctest::Contains("ultrastatic"), std::invalid_argument);
}

TEST_CASE("ground state: commutation defect, positivity, stationarity") {
  for (const Spacetime& M : {make_flat(48, 32), make_static_bump(48, 32)}) {
    const QuasifreeState v = ultrastatic_vacuum(M, 10);
    CHECK(ccr_defect(M, v) <= 1e-12);
    CHECK(min_eigenvalue(v) >= -1e-12);
    // Pull the state at a later surface back through the exact dynamics.
    const QuasifreeState v2 = ultrastatic_vacuum(M, 30);
    const QuasifreeState pulled =
        bogoliubov_transport(M, v2, transport_matrix(M, 10, 30));
    CHECK((pulled.W - v.W).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("antisymmetric part of the two-point function is the commutator") {
  const Spacetime M = make_flat(48, 32);
  const QuasifreeState v = ultrastatic_vacuum(M, 24);
  std::mt19937 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const TestFunction f = random_bump(M, rng);
    const TestFunction h = random_bump(M, rng);
    const Complex anti = two_point(M, v, f, h) - two_point(M, v, h, f);
    const Complex e = commutator_function(M, f, h);
    CHECK(std::abs(anti - Complex(0, 1) * e) <= 1e-12 * (1.0 + std::abs(e)));
  }
}

TEST_CASE("n-point functions: pairing oracle and algebra expectations agree") {
  const Spacetime M = make_flat(40, 24);
  const QuasifreeState v = ultrastatic_vacuum(M, 20);
  const CcrContext ctx = CcrContext::of(M);
  std::mt19937 rng(42);
  std::vector<TestFunction> fs;
  for (int i = 0; i < 6; ++i) fs.push_back(random_bump(M, rng));
  Eigen::MatrixXcd w(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) w(i, j) = two_point(M, v, fs[i], fs[j]);
  for (int n : {2, 4, 6}) {
    const std::vector<TestFunction> sub(fs.begin(), fs.begin() + n);
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    const Complex got = n_point(M, v, sub);
    const Complex want = pairing_oracle(w, idx);
    CHECK(std::abs(got - want) <= 1e-11 * (1.0 + std::abs(want)));
    // Independent route through the polynomial algebra.
    AlgebraElement prod = AlgebraElement::unit(ctx.dim());
    for (int i = 0; i < n; ++i) prod = mul(ctx, prod, gen(ctx, M, sub[i], v.t_ref));
    const Complex via_alg = expectation(ctx, v, prod);
    CHECK(std::abs(got - via_alg) <= 1e-11 * (1.0 + std::abs(want)));
  }
  // Odd orders vanish identically.
  CHECK(n_point(M, v, {fs[0], fs[1], fs[2]}) == Complex(0.0, 0.0));
}

TEST_CASE("state positivity on random polynomial observables") {
  const Spacetime M = make_flat(24, 16);
  const QuasifreeState v = ultrastatic_vacuum(M, 12);
  const CcrContext ctx = CcrContext::of(M);
  std::mt19937 rng(43);
  std::uniform_int_distribution<int> id(0, ctx.dim() - 1);
  std::uniform_int_distribution<int> deg(0, 3);
  std::uniform_real_distribution<double> ad(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    AlgebraElement A = AlgebraElement::zero(ctx.dim());
    for (int term = 0; term < 3; ++term) {
      Monomial m;
      const int d = deg(rng);
      for (int i = 0; i < d; ++i) m.push_back(id(rng));
      A.terms[m] += Complex(ad(rng), ad(rng));
    }
    const Complex val = expectation(ctx, v, mul(ctx, adjoint(ctx, A), A));
    CHECK(std::abs(val.imag()) <= 1e-9 * (1.0 + std::abs(val)));
    CHECK(val.real() >= -1e-9);
  }
}

TEST_CASE("lightcone probe of the two-point difference") {
  const Spacetime M = make_flat(48, 128);
  const int t_ref = 24;
  SUBCASE("vacua of different masses share the singular structure") {
    const Spacetime M2 = make_flat(48, 128, 4.0);
    const HadamardReport rep = hadamard_difference(
        M, ultrastatic_vacuum(M, t_ref), ultrastatic_vacuum(M2, t_ref), 4, 30, 8);
    CHECK(rep.bounded);
    CHECK(rep.verdict == "Hadamard-compatible pair");
  }
  SUBCASE("doubling the symmetric part breaks the singular structure") {
    const ModeData md = spatial_modes(M);
    std::vector<Eigen::Matrix2cd> C(md.n_modes());
    for (int k = 0; k < md.n_modes(); ++k) {
      C[k] = vacuum_mode_covariance(md.omega(k));
      C[k](0, 0) *= 2.0;
      C[k](1, 1) *= 2.0;
    }
    const QuasifreeState bad = state_from_mode_covariance(M, t_ref, md, C);
    CHECK(ccr_defect(M, bad) <= 1e-12);
    const HadamardReport rep = hadamard_difference(
        M, ultrastatic_vacuum(M, t_ref), bad, 4, 30, 8);
    CHECK(!rep.bounded);
  }
}

TEST_CASE("one-particle excitations carry one quantum of energy") {
  const Spacetime M = make_flat(16, 64);
  const ModeData md = spatial_modes(M);
  const QuasifreeState vac = ultrastatic_vacuum(M, 8);
  for (int k : {1, 2, 3}) {
    std::vector<Eigen::Matrix2cd> C(md.n_modes());
    for (int j = 0; j < md.n_modes(); ++j)
      C[j] = (j == k) ? excited_mode_covariance(md.omega(j), 1)
                      : vacuum_mode_covariance(md.omega(j));
    const QuasifreeState one = state_from_mode_covariance(M, 8, md, C);
    const double E = total_energy(M, one, vac);
    CHECK(std::abs(E - md.omega(k)) <= 0.02 * md.omega(k));
    // Occupation numbers recover the excitation.
    const ParticleReport pr = particle_number(M, one);
    CHECK(std::abs(pr.total - 1.0) <= 1e-9);
    CHECK(std::abs(pr.n_k(k) - 1.0) <= 1e-9);
  }
}

TEST_CASE("squeezed states have negative energy-density excursions") {
  const Spacetime M = make_flat(64, 32);
  const ModeData md = spatial_modes(M);
  const QuasifreeState vac = ultrastatic_vacuum(M, 10);
  std::vector<Eigen::Matrix2cd> C(md.n_modes());
  for (int j = 0; j < md.n_modes(); ++j)
    C[j] = vacuum_mode_covariance(md.omega(j));
  // Squeeze the field quadrature of a single mode: the density then dips
  // below the vacuum near the nodes of that mode, where only the (reduced)
  // momentum variance contributes.  Squeezing both members of a degenerate
  // +/-k pair identically would give a spatially constant, non-negative
  // shift instead.
  C[1] = squeezed_mode_covariance(md.omega(1), 1.2, 0.5 * kPi);
  const QuasifreeState sq = state_from_mode_covariance(M, 10, md, C);
  const Eigen::VectorXd rho = energy_density_profile(M, sq, vac);
  CHECK(rho.minCoeff() < 0.0);
  CHECK(total_energy(M, sq, vac) > 0.0);

  // The worldline evaluation agrees with the static profile at its start.
  const Worldline g = Worldline::static_line(M, 7, 10, 50);
  const std::vector<double> wl = worldline_energy_density(M, md, C, g);
  CHECK(std::abs(wl[0] - rho(7)) <= 1e-10 * (1.0 + std::abs(rho(7))));
  const double wl_min = *std::min_element(wl.begin(), wl.end());
  CHECK(wl_min < 0.0);
}

TEST_CASE("exact one-step mode evolution matrix") {
  const Spacetime M = make_static_bump(32, 24);
  const ModeData md = spatial_modes(M);
  for (int k : {0, 3, 10, 23}) {
    const Eigen::Matrix2d T = mode_step_matrix(M, md, k, 12);
    CHECK(std::abs(T.determinant() - 1.0) <= 1e-11);
    const double want_tr = 2.0 - M.dt() * M.dt() * md.nu(k) * md.nu(k);
    CHECK(std::abs(T.trace() - want_tr) <= 1e-9);
  }
}

TEST_CASE("averaged energy bound over the Gaussian family") {
  const Spacetime M = make_flat(64, 32);
  const Worldline g = Worldline::static_line(M, 5, 10, 55);
  const SamplingFunction f = SamplingFunction::bump(g, 0.5, 0.3);
  const QeiReport rep = qei_check(M, g, f, 60, 47);
  CHECK(rep.n_states >= 60);
  CHECK(rep.bound < 0.0);
  CHECK(rep.negative_attained);
  CHECK(rep.all_above);
  CHECK(rep.min_sampled >= rep.bound - 1e-8);
  // The bound is linear in the sampling weight.
  SamplingFunction f2 = f;
  f2.fsq *= 2.0;
  const QeiReport rep2 = qei_check(M, g, f2, 4, 47);
  CHECK(std::abs(rep2.bound - 2.0 * rep.bound) <= 1e-10 * std::abs(rep.bound));
}

TEST_CASE("sudden mass change creates the closed-form particle spectrum") {
  const Spacetime M1 = make_flat(32, 32, 1.0);
  const Spacetime M2 = make_flat(32, 32, 4.0);
  const ModeData md1 = spatial_modes(M1);
  const ModeData md2 = spatial_modes(M2);
  // The out-state of the quench is the mass-4 vacuum read as data of M1.
  const QuasifreeState out = ultrastatic_vacuum(M2, 16);
  const ParticleReport pr = particle_number(M1, out);
  for (int k = 0; k < 32; ++k) {
    const double w1 = md1.omega(k), w2 = md2.omega(k);
    const double want = (w1 - w2) * (w1 - w2) / (4.0 * w1 * w2);
    CHECK(std::abs(pr.n_k(k) - want) <= 1e-10 * (1.0 + want));
  }
  CHECK(pr.total > 0.0);
}

TEST_CASE("non-symplectic maps are rejected") {
  const Spacetime M = make_flat(24, 16);
  const QuasifreeState v = ultrastatic_vacuum(M, 12);
  CHECK_THROWS_WITH_AS(
      bogoliubov_transport(M, v, 2.0 * Eigen::MatrixXd::Identity(32, 32)),
      doctest::Contains("not symplectic"), std::invalid_argument);
}
