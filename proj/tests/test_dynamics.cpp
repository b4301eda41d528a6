#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "lcqft/dynamics.hpp"

using namespace lcqft;
using namespace testutil;

namespace {

double data_diff(const CauchyData& a, const CauchyData& b) {
  return std::max((a.phi - b.phi).cwiseAbs().maxCoeff(),
                  (a.pi - b.pi).cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("zero perturbation gives the identity response") {
  const Spacetime M = make_flat(48, 32);
  const int n = 2 * M.n_x();
  const RceMap r1 = rce(M, MetricPerturbation::zero(M), 30);
  const RceMap r2 = rce_via_transport(M, MetricPerturbation::zero(M), 30);
  CHECK((r1.map - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((r2.map - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("response map: transport oracle, bracket independence, symplecticity") {
  for (const Spacetime& M : {make_flat(64, 32), make_static_bump(64, 32)}) {
    const MetricPerturbation h =
        MetricPerturbation::bump(M, 20, 16, 3.0, 3.0, 0.08, 0.05);
    const int t_ref = 40;
    const RceMap R = rce(M, h, t_ref);
    const RceMap Rt = rce_via_transport(M, h, t_ref);
    CHECK((R.map - Rt.map).cwiseAbs().maxCoeff() <= 1e-10);
    const RceMap Rw = rce_via_transport_at(M, h, t_ref, h.support.t_min() - 4,
                                           h.support.t_max() + 5);
    CHECK((Rt.map - Rw.map).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(symplecticity_defect(M, R) <= 1e-10);
    CHECK(symplecticity_defect(M, Rt) <= 1e-10);
  }
}

TEST_CASE("response is local: test-function form and disjoint subspaces") {
  const Spacetime M = make_flat(64, 32);
  const MetricPerturbation h =
      MetricPerturbation::bump(M, 20, 10, 3.0, 3.0, 0.08, 0.05);
  SUBCASE("f - rce(f) is supported in the dilated perturbation support") {
    const TestFunction f = TestFunction::bump(M, 30, 14, 3.0, 4.0, Complex(0.8, 0.2));
    const TestFunction g = rce_testfunction(M, h, f);
    const Region halo = h.support.dilate1();
    for (int t = 0; t < M.n_t(); ++t)
      for (int x = 0; x < M.n_x(); ++x)
        if (!halo.contains(t, x))
          CHECK(std::abs(g.values(t, x) - f.values(t, x)) <= 1e-13);
  }
  SUBCASE("identity on kinematic data of a causally disjoint region") {
    const int t_ref = 40;
    const RceMap R = rce(M, h, t_ref);
    const Region far = Region::interval(64, 32, 20, 26, 2)
                           .unite(Region::interval(64, 32, 21, 26, 2));
    const KinematicSubalgebra kin = kinematic_subspace(M, far, t_ref);
    CHECK(kin.dim() > 0);
    CHECK((R.map * kin.basis - kin.basis).cwiseAbs().maxCoeff() <= 1e-11);
  }
  SUBCASE("support precondition is enforced") {
    const TestFunction low = TestFunction::bump(M, 21, 10, 3.0, 3.0, 1.0);
    CHECK_THROWS_WITH_AS(rce_testfunction(M, h, low),
                         doctest::Contains("supported in M+"),
                         std::invalid_argument);
  }
}

TEST_CASE("exact derivative of the wave operator matches finite differences") {
  const Spacetime M = make_curvature_bump(48, 32, 0.2, 1.0, 0.3);
  const MetricPerturbation h =
      MetricPerturbation::bump(M, 24, 16, 3.0, 3.0, 0.1, 0.07);
  std::mt19937 rng(31);
  const Grid u = Grid(random_bump(M, rng).values.real());
  const Grid exact = apply_L(M, h, u);
  const Grid fd = apply_L_fd(M, h, u, 1e-4);
  CHECK((exact - fd).abs().maxCoeff() <= 1e-5 * (1.0 + exact.abs().maxCoeff()));
  // Linearity in the perturbation, exact by construction.
  const Grid scaled = apply_L(M, h.scaled(2.5), u);
  CHECK((scaled - 2.5 * exact).abs().maxCoeff() <=
        1e-12 * (1.0 + exact.abs().maxCoeff()));
}

TEST_CASE("response derivative equals the quotient of L applied to the field") {
  const Spacetime M = make_flat(64, 48);
  const MetricPerturbation h =
      MetricPerturbation::bump(M, 20, 24, 3.0, 3.0, 0.1, 0.06);
  const TestFunction f = TestFunction::bump(M, 28, 20, 3.0, 4.0, 0.9);
  const int t_ref = 40;
  const CauchyData want = stress_energy_pairing(M, h, f, t_ref);
  const double scale = data_norm(M, want);
  REQUIRE(scale > 0.0);
  const double e1 = data_diff(rce_derivative_fd(M, h, f, t_ref, 0.2), want);
  const double e2 = data_diff(rce_derivative_fd(M, h, f, t_ref, 0.1), want);
  CHECK(std::log2(e1 / e2) >= 1.8);
  const CauchyData rich = rce_derivative(M, h, f, t_ref, 0.1);
  CHECK(data_diff(rich, want) <= 1e-6 * scale);
}

TEST_CASE("stress-energy response vanishes for flow-generated perturbations") {
  // A time-reparametrization flow changes the metric without changing the
  // geometry; the response of the field to it is pure gauge and the pairing
  // must vanish relative to a generic perturbation of the same size.
  const int n_x = 256, n_t = 2048;
  const Spacetime M = make_flat(n_t, n_x, 1.0, 0.0, 0.125);
  const double T = n_t * M.dt();
  const double t0 = 0.35 * T, wt = 0.25 * T;

  MetricPerturbation gauge = MetricPerturbation::zero(M);
  for (int t = 0; t < n_t; ++t) {
    const double fp = poly_bump_du((t * M.dt() - t0) / wt, 6) / wt;
    if (fp == 0.0) continue;
    for (int x = 0; x < n_x; ++x) {
      gauge.d_beta(t, x) = 2.0 * fp;
      gauge.support.set(t, x);
    }
  }
  MetricPerturbation generic = MetricPerturbation::bump(
      M, static_cast<int>(0.35 * n_t), n_x / 3, n_t / 8.0, n_x / 6.0, 1.0, 0.0);
  const double scale = std::sqrt(gauge.d_beta.square().sum() /
                                 generic.d_beta.square().sum());
  generic = generic.scaled(scale);

  const TestFunction f = TestFunction::bump(
      M, static_cast<int>(0.78 * n_t), n_x / 2,
      std::max(4.0, n_t / 16.0), std::max(3.0, n_x / 10.0), 1.0);
  const int t_ref = static_cast<int>(0.92 * n_t);
  const double n_gauge = data_norm(M, stress_energy_pairing(M, gauge, f, t_ref));
  const double n_generic = data_norm(M, stress_energy_pairing(M, generic, f, t_ref));
  REQUIRE(n_generic > 0.0);
  CHECK(n_gauge / n_generic <= 1e-5);
}

TEST_CASE("joint fixed space of outside perturbations vs kinematic span") {
  const int n_t = 48, n_x = 32, t_c = 24;
  const Region waist = Region::interval(n_t, n_x, t_c, 8, 2)
                           .unite(Region::interval(n_t, n_x, t_c + 1, 8, 2));
  SUBCASE("massive field: match") {
    const Spacetime M = make_flat(n_t, n_x, 1.0);
    const Region O = cauchy_development(M, waist);
    const DynLocReport rep = dynamical_vs_kinematic(M, O, t_c, 20, 71);
    CHECK(rep.verdict == "match");
    CHECK(rep.dim_dynamical == rep.dim_kinematic);
    CHECK(rep.max_angle <= 1e-3);
  }
  SUBCASE("massless minimal coupling: constant zero mode survives") {
    const Spacetime M = make_flat(n_t, n_x, 0.0);
    const Region O = cauchy_development(M, waist);
    const DynLocReport rep = dynamical_vs_kinematic(M, O, t_c, 20, 72);
    CHECK(rep.surplus >= 1);
    CHECK(rep.verdict == "mismatch (+zero mode)");
  }
  SUBCASE("whole slab: trivially match") {
    const Spacetime M = make_flat(n_t, n_x, 1.0);
    const Region O = Region::slab(n_t, n_x, t_c, t_c + 1);
    const DynLocReport rep = dynamical_vs_kinematic(M, O, t_c, 4, 73);
    CHECK(rep.verdict == "match");
    CHECK(rep.dim_dynamical == 2 * n_x);
  }
}
