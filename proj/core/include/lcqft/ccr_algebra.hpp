#pragma once

#include <map>
#include <string>
#include <vector>

#include "lcqft/field_eq.hpp"

namespace lcqft {

// Polynomial algebra over the one-particle (Cauchy data) space with the
// canonical commutation relations as rewriting rules. The basis consists of
// the 2 n_x site deltas on a reference surface: indices 0..n_x-1 are
// phi-deltas, n_x..2n_x-1 are pi-deltas. Monomials are stored in normal
// order (ascending basis index).
using Monomial = std::vector<int>;

struct CcrContext {
  int n_x = 0;
  double dx = 0.0;
  int d_max = 6;

  int dim() const { return 2 * n_x; }
  // Symplectic Gram matrix of the basis.
  double sigma(int i, int j) const {
    if (i < n_x && j >= n_x && j - n_x == i) return dx;
    if (i >= n_x && j < n_x && i - n_x == j) return -dx;
    return 0.0;
  }
  static CcrContext of(const Spacetime& M) { return {M.n_x(), M.dx(), 6}; }
};

struct AlgebraElement {
  int dim = 0;
  std::map<Monomial, Complex> terms;

  static AlgebraElement zero(int dim) { return {dim, {}}; }
  static AlgebraElement unit(int dim, Complex c = 1.0) {
    AlgebraElement e{dim, {}};
    e.terms[{}] = c;
    return e;
  }
  int degree() const;
  double coeff_norm() const;  // max absolute coefficient
  void prune(double rel_tol = 1e-14);
  std::string to_text() const;  // stable serialization for golden files
};

AlgebraElement add(const AlgebraElement& A, const AlgebraElement& B);
AlgebraElement sub(const AlgebraElement& A, const AlgebraElement& B);
AlgebraElement scale(Complex c, const AlgebraElement& A);
// Normal-ordered product; throws on degree overflow.
AlgebraElement mul(const CcrContext& ctx, const AlgebraElement& A,
                   const AlgebraElement& B);
AlgebraElement adjoint(const CcrContext& ctx, const AlgebraElement& A);
AlgebraElement commutator(const CcrContext& ctx, const AlgebraElement& A,
                          const AlgebraElement& B);

// Degree-1 generator with coefficients given by Cauchy data in the site basis.
AlgebraElement gen_from_data(const CcrContext& ctx, const CauchyData& d);
AlgebraElement gen(const CcrContext& ctx, const Spacetime& M,
                   const TestFunction& f, int t_ref);

// ---------------------------------------------------------------------------
// Kinematic subspaces (one-particle skeletons of the local algebras)

struct KinematicSubalgebra {
  Region O;
  Eigen::MatrixXd basis;  // orthonormal columns in R^(2 n_x)
  int dim() const { return static_cast<int>(basis.cols()); }
};

KinematicSubalgebra kinematic_subspace(const Spacetime& M, const Region& O,
                                       int t_ref, double drop_tol = 1e-10);

// Max residual of columns of `inner` after projection onto `outer`.
double containment_defect(const Eigen::MatrixXd& inner, const Eigen::MatrixXd& outer);
// Principal angles between the column spans (radians, ascending).
Eigen::VectorXd principal_angles(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);
// Orthonormalize columns, dropping singular directions below rel. tolerance.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& A, double drop_tol = 1e-10);

// ---------------------------------------------------------------------------
// Pushforward morphisms along isometric time-slab embeddings

struct Embedding {
  int t_offset = 0;  // row t of M maps to row t + t_offset of N
  int x_offset = 0;  // site x maps to x + x_offset (periodic)
  int t_lo = 0, t_hi = 0;  // embedded row range of M, inclusive
};

// Check the metric grids agree on the image; throws "not isometric" on failure.
void check_isometric(const Spacetime& M, const Spacetime& N, const Embedding& e,
                     double tol = 0.0);
TestFunction push_testfunction(const Spacetime& N, const Embedding& e,
                               const TestFunction& f);
// Induced one-particle map from data at M's t_ref to data at N's t_ref.
Eigen::MatrixXd pushforward_data_map(const Spacetime& M, const Spacetime& N,
                                     const Embedding& e, int t_ref_M, int t_ref_N);
// Extension to algebra elements via the data map.
AlgebraElement push_element(const CcrContext& ctx_M, const CcrContext& ctx_N,
                            const Eigen::MatrixXd& data_map, const AlgebraElement& A);

// ---------------------------------------------------------------------------
// Even-part additivity probe

struct EvenSpanReport {
  int d1 = 0, d2 = 0;
  int rank_separate = 0, rank_union = 0;
  int deficit = 0;
};

EvenSpanReport even_subalgebra_span(const Spacetime& M, const Region& O1,
                                    const Region& O2, int t_ref);

}  // namespace lcqft
