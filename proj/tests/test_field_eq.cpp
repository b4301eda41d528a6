#include <algorithm>
#include <random>

#include "dalembert_oracle.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "lcqft/dynamics.hpp"

using namespace lcqft;
using namespace testutil;

namespace {

// Symplectic Gram matrix of the (phi-delta, pi-delta) basis.
Eigen::MatrixXd gram_sigma(const Spacetime& M) {
  const int n = M.n_x();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  S.topRightCorner(n, n) = M.dx() * Eigen::MatrixXd::Identity(n, n);
  S.bottomLeftCorner(n, n) = -M.dx() * Eigen::MatrixXd::Identity(n, n);
  return S;
}

std::vector<Spacetime> stress_cases() {
  return {make_flat(48, 48), make_static_bump(48, 48),
          make_curvature_bump(48, 48, 0.25)};
}

}  // namespace

TEST_CASE("wave operator is symmetric in the volume-weighted pairing") {
  std::mt19937 rng(11);
  for (const Spacetime& M : stress_cases()) {
    for (int trial = 0; trial < 4; ++trial) {
      const TestFunction f = random_bump(M, rng);
      const TestFunction h = random_bump(M, rng);
      const Complex lhs = pair_w(M, f.values, apply_P(M, h.values));
      const Complex rhs = pair_w(M, apply_P(M, f.values), h.values);
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST_CASE("green operators invert the wave operator with causal support") {
  std::mt19937 rng(12);
  for (const Spacetime& M : stress_cases()) {
    const TestFunction f = random_bump(M, rng);
    const Region sf = f.support(1e-300);
    const CGrid ur = green_retarded(M, f.values);
    const CGrid ua = green_advanced(M, f.values);
    const CGrid rr = apply_P(M, ur) - f.values;
    const CGrid ra = apply_P(M, ua) - f.values;
    double dr = 0.0, da = 0.0;
    for (int t = 1; t < M.n_t() - 1; ++t)
      for (int x = 0; x < M.n_x(); ++x) {
        dr = std::max(dr, std::abs(rr(t, x)));
        da = std::max(da, std::abs(ra(t, x)));
      }
    CHECK(dr <= 1e-12);
    CHECK(da <= 1e-12);
    const Region fut = causal_future(M, sf);
    const Region past = causal_past(M, sf);
    for (int t = 0; t < M.n_t(); ++t)
      for (int x = 0; x < M.n_x(); ++x) {
        if (std::abs(ur(t, x)) > 1e-13) CHECK(fut.contains(t, x));
        if (std::abs(ua(t, x)) > 1e-13) CHECK(past.contains(t, x));
      }
  }
}

TEST_CASE("commutator function is antisymmetric") {
  std::mt19937 rng(13);
  for (const Spacetime& M : stress_cases()) {
    for (int trial = 0; trial < 4; ++trial) {
      const TestFunction f = random_bump(M, rng);
      const TestFunction h = random_bump(M, rng);
      const Complex efh = commutator_function(M, f, h);
      const Complex ehf = commutator_function(M, h, f);
      CHECK(std::abs(efh + ehf) <= 1e-12 * (1.0 + std::abs(efh)));
      CHECK(std::abs(commutator_function(M, f, f)) <=
            1e-12 * (1.0 + std::abs(efh)));
    }
  }
}

TEST_CASE("quotient map annihilates the image of the wave operator") {
  std::mt19937 rng(14);
  for (const Spacetime& M : stress_cases()) {
    const TestFunction g = random_bump(M, rng);
    TestFunction pg = TestFunction::zero(M);
    pg.values = apply_P(M, g.values);
    for (int t_ref : {5, M.n_t() / 2, M.n_t() - 7}) {
      const CauchyData d = to_quotient(M, pg, t_ref);
      CHECK(data_norm(M, d) <= 1e-12 * (1.0 + g.values.abs().maxCoeff()));
    }
  }
}

TEST_CASE("symplectic form of quotient data reproduces the commutator function") {
  std::mt19937 rng(15);
  for (const Spacetime& M : stress_cases()) {
    const TestFunction f = random_bump(M, rng);
    const TestFunction h = random_bump(M, rng);
    const Complex e = commutator_function(M, f, h);
    for (int t_ref : {5, M.n_t() / 2, M.n_t() - 7}) {
      const Complex s = symplectic_form(M, to_quotient(M, f, t_ref),
                                        to_quotient(M, h, t_ref));
      CHECK(std::abs(s - e) <= 1e-11 * (1.0 + std::abs(e)));
    }
  }
}

TEST_CASE("data transport agrees with solution restriction exactly") {
  std::mt19937 rng(16);
  for (const Spacetime& M : stress_cases()) {
    const TestFunction f = random_bump(M, rng);
    const CGrid u = e_solution(M, f.values);
    const int s1 = M.n_t() / 2;
    const CauchyData d1 = data_of(M, u, s1);
    for (int s2 : {3, s1 - 4, s1 + 5, M.n_t() - 3}) {
      const CauchyData d2 = data_of(M, u, s2);
      const CauchyData tr = transport(M, d1, s2);
      CHECK((tr.phi - d2.phi).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((tr.pi - d2.pi).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("transport matrices are exactly symplectic") {
  for (const Spacetime& M : stress_cases()) {
    const Eigen::MatrixXd S = gram_sigma(M);
    const Eigen::MatrixXd T = transport_matrix(M, M.n_t() / 3, 2 * M.n_t() / 3);
    CHECK((T.transpose() * S * T - S).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("band representatives preserve quotient data") {
  std::mt19937 rng(17);
  for (const Spacetime& M : stress_cases()) {
    const TestFunction f = random_bump(M, rng);
    const int band_lo = M.n_t() / 2 - 2, band_hi = M.n_t() / 2 + 2;
    const TestFunction g = timeslice_representative(M, f, band_lo, band_hi);
    const Region sg = g.support(1e-300);
    CHECK(sg.t_min() >= band_lo);
    CHECK(sg.t_max() <= band_hi);
    const int t_ref = 4;
    const CauchyData df = to_quotient(M, f, t_ref);
    const CauchyData dg = to_quotient(M, g, t_ref);
    const double scale = 1.0 + data_norm(M, df);
    CHECK((df.phi - dg.phi).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    CHECK((df.pi - dg.pi).cwiseAbs().maxCoeff() <= 1e-12 * scale);
  }
}

TEST_CASE("data to test function round trip") {
  std::mt19937 rng(18);
  for (const Spacetime& M : stress_cases()) {
    const int n = M.n_x();
    CauchyData d;
    d.surface_t = M.n_t() / 2;
    d.phi = Eigen::VectorXcd::Zero(n);
    d.pi = Eigen::VectorXcd::Zero(n);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (int x = 0; x < n; ++x) {
      d.phi(x) = Complex(ud(rng), ud(rng));
      d.pi(x) = Complex(ud(rng), ud(rng));
    }
    const TestFunction f =
        data_to_testfunction(M, d, d.surface_t, d.surface_t + 3);
    const CauchyData back = to_quotient(M, f, d.surface_t);
    CHECK((back.phi - d.phi).cwiseAbs().maxCoeff() <= 1e-11);
    CHECK((back.pi - d.pi).cwiseAbs().maxCoeff() <= 1e-11);
  }
}

TEST_CASE("solution from data solves the homogeneous equation") {
  std::mt19937 rng(19);
  for (const Spacetime& M : stress_cases()) {
    const TestFunction f = random_bump(M, rng);
    const CauchyData d = data_of(M, e_solution(M, f.values), M.n_t() / 2);
    const CGrid u = solution_from_data(M, d);
    const CGrid r = apply_P(M, u);
    double dm = 0.0;
    for (int t = 1; t < M.n_t() - 1; ++t) dm = std::max(dm, r.row(t).abs().maxCoeff());
    CHECK(dm <= 1e-11);
    const CauchyData back = data_of(M, u, d.surface_t);
    CHECK((back.phi - d.phi).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((back.pi - d.pi).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("retarded solution converges to the d'Alembert formula at order 2") {
  const double e0 = dalembert_green_error(64);
  const double e1 = dalembert_green_error(128);
  const double e2 = dalembert_green_error(256);
  CHECK(std::log2(e0 / e1) >= 1.8);
  CHECK(std::log2(e1 / e2) >= 1.8);
}
