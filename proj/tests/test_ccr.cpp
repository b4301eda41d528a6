#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "lcqft/ccr_algebra.hpp"

using namespace lcqft;
using namespace testutil;

namespace {

// Sparse degree-1 element: a few random phi/pi generators.
AlgebraElement sparse_gen(const CcrContext& ctx, std::mt19937& rng, int n_terms = 4) {
  std::uniform_int_distribution<int> id(0, ctx.dim() - 1);
  std::uniform_real_distribution<double> ad(-1.0, 1.0);
  AlgebraElement e = AlgebraElement::zero(ctx.dim());
  for (int i = 0; i < n_terms; ++i)
    e.terms[{id(rng)}] += Complex(ad(rng), ad(rng));
  return e;
}

double diff_norm(const AlgebraElement& A, const AlgebraElement& B) {
  return sub(A, B).coeff_norm();
}

}  // namespace

TEST_CASE("product rewriting is associative") {
  const CcrContext ctx{16, 0.2, 6};
  std::mt19937 rng(21);
  for (int trial = 0; trial < 6; ++trial) {
    const AlgebraElement A = sparse_gen(ctx, rng);
    const AlgebraElement B = sparse_gen(ctx, rng);
    const AlgebraElement C = sparse_gen(ctx, rng);
    const AlgebraElement lhs = mul(ctx, mul(ctx, A, B), C);
    const AlgebraElement rhs = mul(ctx, A, mul(ctx, B, C));
    CHECK(diff_norm(lhs, rhs) <= 1e-13 * (1.0 + lhs.coeff_norm()));
  }
}

TEST_CASE("adjoint laws") {
  const CcrContext ctx{16, 0.2, 6};
  std::mt19937 rng(22);
  const AlgebraElement A = mul(ctx, sparse_gen(ctx, rng), sparse_gen(ctx, rng));
  const AlgebraElement B = sparse_gen(ctx, rng);
  CHECK(diff_norm(adjoint(ctx, adjoint(ctx, A)), A) <= 1e-13 * (1.0 + A.coeff_norm()));
  const AlgebraElement lhs = adjoint(ctx, mul(ctx, A, B));
  const AlgebraElement rhs = mul(ctx, adjoint(ctx, B), adjoint(ctx, A));
  CHECK(diff_norm(lhs, rhs) <= 1e-13 * (1.0 + lhs.coeff_norm()));
  CHECK(diff_norm(adjoint(ctx, AlgebraElement::unit(ctx.dim())),
                  AlgebraElement::unit(ctx.dim())) == 0.0);
}

TEST_CASE("smeared generators satisfy the canonical commutation relation") {
  const Spacetime M = make_curvature_bump(40, 24, 0.25);
  const CcrContext ctx = CcrContext::of(M);
  std::mt19937 rng(23);
  const int t_ref = 20;
  for (int trial = 0; trial < 4; ++trial) {
    const TestFunction f = random_bump(M, rng);
    const TestFunction h = random_bump(M, rng);
    const AlgebraElement comm =
        commutator(ctx, gen(ctx, M, f, t_ref), gen(ctx, M, h, t_ref));
    const Complex e = commutator_function(M, f, h);
    const AlgebraElement want = AlgebraElement::unit(ctx.dim(), Complex(0, 1) * e);
    CHECK(diff_norm(comm, want) <= 1e-12 * (1.0 + std::abs(e)));
  }
}

TEST_CASE("generators of wave-operator images vanish") {
  const Spacetime M = make_static_bump(40, 24);
  const CcrContext ctx = CcrContext::of(M);
  std::mt19937 rng(24);
  const TestFunction g = random_bump(M, rng);
  TestFunction pg = TestFunction::zero(M);
  pg.values = apply_P(M, g.values);
  CHECK(gen(ctx, M, pg, 20).coeff_norm() <= 1e-12 * (1.0 + g.values.abs().maxCoeff()));
}

TEST_CASE("degree truncation is enforced") {
  const CcrContext ctx{8, 0.3, 6};
  std::mt19937 rng(25);
  AlgebraElement A = sparse_gen(ctx, rng, 2);
  AlgebraElement P4 = mul(ctx, mul(ctx, A, A), mul(ctx, A, A));
  CHECK(P4.degree() == 4);
  CHECK_THROWS_AS(mul(ctx, P4, P4), std::length_error);
}

TEST_CASE("kinematic subspace of a region matches its development") {
  for (const Spacetime& M : {make_flat(32, 32), make_curvature_bump(32, 32, 0.2)}) {
    const Region O = Region::interval(32, 32, 16, 8, 4)
                         .unite(Region::interval(32, 32, 17, 8, 4));
    const Region D = cauchy_development(M, O);
    CHECK(D.size() > O.size());
    const int t_ref = 6;
    const KinematicSubalgebra kO = kinematic_subspace(M, O, t_ref);
    const KinematicSubalgebra kD = kinematic_subspace(M, D, t_ref);
    CHECK(kO.dim() == kD.dim());
    CHECK(principal_angles(kO.basis, kD.basis).maxCoeff() <= 1e-6);
    CHECK(containment_defect(kO.basis, kD.basis) <= 1e-6);
    CHECK(containment_defect(kD.basis, kO.basis) <= 1e-6);
  }
}

TEST_CASE("kinematic subspaces are monotone in the region") {
  const Spacetime M = make_flat(32, 32);
  const Region small = Region::interval(32, 32, 16, 8, 2);
  const Region big = Region::interval(32, 32, 16, 8, 6).unite(
      Region::interval(32, 32, 15, 8, 5));
  const KinematicSubalgebra ks = kinematic_subspace(M, small, 6);
  const KinematicSubalgebra kb = kinematic_subspace(M, big, 6);
  CHECK(containment_defect(ks.basis, kb.basis) <= 1e-9);
  CHECK(kb.dim() >= ks.dim());
}

TEST_CASE("pushforward along a time-slab embedding") {
  const Spacetime M = make_flat(16, 24);
  const Spacetime N = make_flat(40, 24);
  const Embedding e{10, 5, 0, 15};
  CHECK_NOTHROW(check_isometric(M, N, e));
  // Non-isometric target is rejected.
  const Spacetime Nb = make_static_bump(40, 24);
  CHECK_THROWS(check_isometric(M, Nb, e));

  const int t_ref_M = 8, t_ref_N = 30;
  const Eigen::MatrixXd L = pushforward_data_map(M, N, e, t_ref_M, t_ref_N);
  const int n = M.n_x();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  S.topRightCorner(n, n) = M.dx() * Eigen::MatrixXd::Identity(n, n);
  S.bottomLeftCorner(n, n) = -M.dx() * Eigen::MatrixXd::Identity(n, n);
  CHECK((L.transpose() * S * L - S).cwiseAbs().maxCoeff() <= 1e-11);

  SUBCASE("quotient data commutes with the embedding") {
    const TestFunction f = TestFunction::bump(M, 8, 12, 2.0, 3.0, Complex(0.7, -0.3));
    const CauchyData dM = to_quotient(M, f, t_ref_M);
    const CauchyData dN = to_quotient(N, push_testfunction(N, e, f), t_ref_N);
    Eigen::VectorXcd vM(2 * n);
    vM << dM.phi, dM.pi;
    Eigen::VectorXcd vN(2 * n);
    vN << dN.phi, dN.pi;
    CHECK((L * vM - vN).cwiseAbs().maxCoeff() <= 1e-11);
  }

  SUBCASE("algebra pushforward is a star homomorphism") {
    const CcrContext cM = CcrContext::of(M), cN = CcrContext::of(N);
    std::mt19937 rng(26);
    const AlgebraElement A = sparse_gen(cM, rng, 3);
    const AlgebraElement B = sparse_gen(cM, rng, 3);
    const AlgebraElement AB = mul(cM, A, B);
    const AlgebraElement lhs = push_element(cM, cN, L, AB);
    const AlgebraElement rhs =
        mul(cN, push_element(cM, cN, L, A), push_element(cM, cN, L, B));
    CHECK(sub(lhs, rhs).coeff_norm() <= 1e-11 * (1.0 + lhs.coeff_norm()));
    const AlgebraElement lads = push_element(cM, cN, L, adjoint(cM, A));
    const AlgebraElement rads = adjoint(cN, push_element(cM, cN, L, A));
    CHECK(sub(lads, rads).coeff_norm() <= 1e-11 * (1.0 + lads.coeff_norm()));
  }
}

TEST_CASE("even degree-2 span of a union exceeds the separate spans") {
  const Spacetime M = make_flat(24, 24);
  const Region O1 = Region::interval(24, 24, 12, 4, 1);
  const Region O2 = Region::interval(24, 24, 12, 16, 1);
  const EvenSpanReport rep = even_subalgebra_span(M, O1, O2, 12);
  CHECK(rep.d1 > 0);
  CHECK(rep.d2 > 0);
  CHECK(rep.deficit >= 1);
}
