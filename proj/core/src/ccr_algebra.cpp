#include "lcqft/ccr_algebra.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lcqft {

namespace {

// Normal-order a generator word: repeatedly swap the first descending
// adjacent pair, emitting the commutator contraction i sigma_{jk} as a
// shorter word. Terminates because each branch strictly reduces either the
// inversion count or the length.
void normal_order(const CcrContext& ctx, Monomial word, Complex coef,
                  std::map<Monomial, Complex>& out) {
  struct Item {
    Monomial w;
    Complex c;
  };
  std::vector<Item> stack;
  stack.push_back({std::move(word), coef});
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    size_t k = 0;
    bool sorted = true;
    for (; k + 1 < it.w.size(); ++k)
      if (it.w[k] > it.w[k + 1]) {
        sorted = false;
        break;
      }
    if (sorted) {
      out[it.w] += it.c;
      continue;
    }
    const int i = it.w[k], j = it.w[k + 1];
    Monomial swapped = it.w;
    std::swap(swapped[k], swapped[k + 1]);
    stack.push_back({std::move(swapped), it.c});
    const double s = ctx.sigma(i, j);
    if (s != 0.0) {
      Monomial shorter;
      shorter.reserve(it.w.size() - 2);
      for (size_t m = 0; m < it.w.size(); ++m)
        if (m != k && m != k + 1) shorter.push_back(it.w[m]);
      stack.push_back({std::move(shorter), it.c * Complex(0.0, s)});
    }
  }
}

}  // namespace

int AlgebraElement::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms) d = std::max(d, static_cast<int>(m.size()));
  return d;
}

double AlgebraElement::coeff_norm() const {
  double n = 0.0;
  for (const auto& [m, c] : terms) n = std::max(n, std::abs(c));
  return n;
}

void AlgebraElement::prune(double rel_tol) {
  const double cut = coeff_norm() * rel_tol;
  for (auto it = terms.begin(); it != terms.end();)
    it = (std::abs(it->second) <= cut) ? terms.erase(it) : std::next(it);
}

std::string AlgebraElement::to_text() const {
  std::ostringstream os;
  os.precision(16);
  for (const auto& [m, c] : terms) {
    os << "[";
    for (size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
    os << "] " << c.real() << " " << c.imag() << "\n";
  }
  return os.str();
}

AlgebraElement add(const AlgebraElement& A, const AlgebraElement& B) {
  AlgebraElement r = A;
  for (const auto& [m, c] : B.terms) r.terms[m] += c;
  r.prune();
  return r;
}

AlgebraElement sub(const AlgebraElement& A, const AlgebraElement& B) {
  return add(A, scale(-1.0, B));
}

AlgebraElement scale(Complex c, const AlgebraElement& A) {
  AlgebraElement r = A;
  for (auto& [m, v] : r.terms) v *= c;
  return r;
}

AlgebraElement mul(const CcrContext& ctx, const AlgebraElement& A,
                   const AlgebraElement& B) {
  AlgebraElement r = AlgebraElement::zero(ctx.dim());
  for (const auto& [ma, ca] : A.terms)
    for (const auto& [mb, cb] : B.terms) {
      if (static_cast<int>(ma.size() + mb.size()) > ctx.d_max)
        throw std::length_error("truncation degree exceeded");
      Monomial w = ma;
      w.insert(w.end(), mb.begin(), mb.end());
      normal_order(ctx, std::move(w), ca * cb, r.terms);
    }
  r.prune();
  return r;
}

AlgebraElement adjoint(const CcrContext& ctx, const AlgebraElement& A) {
  AlgebraElement r = AlgebraElement::zero(ctx.dim());
  for (const auto& [m, c] : A.terms) {
    Monomial rev(m.rbegin(), m.rend());
    normal_order(ctx, std::move(rev), std::conj(c), r.terms);
  }
  // Keep every nonzero coefficient: the involution must be exact, so only
  // coefficients that cancel identically may be dropped.
  r.prune(0.0);
  return r;
}

AlgebraElement commutator(const CcrContext& ctx, const AlgebraElement& A,
                          const AlgebraElement& B) {
  return sub(mul(ctx, A, B), mul(ctx, B, A));
}

AlgebraElement gen_from_data(const CcrContext& ctx, const CauchyData& d) {
  if (d.phi.size() != ctx.n_x) throw std::invalid_argument("data size mismatch");
  AlgebraElement r = AlgebraElement::zero(ctx.dim());
  for (int x = 0; x < ctx.n_x; ++x) {
    if (d.phi(x) != 0.0) r.terms[{x}] = d.phi(x);
    if (d.pi(x) != 0.0) r.terms[{ctx.n_x + x}] = d.pi(x);
  }
  return r;
}

AlgebraElement gen(const CcrContext& ctx, const Spacetime& M,
                   const TestFunction& f, int t_ref) {
  return gen_from_data(ctx, to_quotient(M, f, t_ref));
}

// ---------------------------------------------------------------------------
// Subspaces

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& A, double drop_tol) {
  if (A.cols() == 0) return A;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int keep = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > drop_tol * sv(0)) ++keep;
  return svd.matrixU().leftCols(keep);
}

KinematicSubalgebra kinematic_subspace(const Spacetime& M, const Region& O,
                                       int t_ref, double drop_tol) {
  if (O.empty()) throw std::invalid_argument("empty region");
  const auto pts = O.points();
  Eigen::MatrixXd cols(2 * M.n_x(), pts.size());
  int j = 0;
  for (const auto& [t, x] : pts) {
    const CauchyData d = to_quotient(M, TestFunction::delta(M, t, x), t_ref);
    for (int i = 0; i < M.n_x(); ++i) {
      cols(i, j) = d.phi(i).real();
      cols(M.n_x() + i, j) = d.pi(i).real();
    }
    ++j;
  }
  return {O, orthonormalize(cols, drop_tol)};
}

double containment_defect(const Eigen::MatrixXd& inner, const Eigen::MatrixXd& outer) {
  double worst = 0.0;
  for (int j = 0; j < inner.cols(); ++j) {
    const Eigen::VectorXd v = inner.col(j);
    const Eigen::VectorXd res = v - outer * (outer.transpose() * v);
    worst = std::max(worst, res.norm() / v.norm());
  }
  return worst;
}

Eigen::VectorXd principal_angles(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A.transpose() * B);
  Eigen::VectorXd sv = svd.singularValues();
  Eigen::VectorXd ang(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    ang(i) = std::acos(std::min(1.0, std::max(-1.0, sv(i))));
  std::sort(ang.data(), ang.data() + ang.size());
  return ang;
}

// ---------------------------------------------------------------------------
// Pushforward morphisms

void check_isometric(const Spacetime& M, const Spacetime& N, const Embedding& e,
                     double tol) {
  if (M.n_x() != N.n_x() || M.dt() != N.dt() || M.dx() != N.dx())
    throw std::invalid_argument("not isometric: lattice mismatch");
  if (e.t_lo < 0 || e.t_hi >= M.n_t() || e.t_lo + e.t_offset < 0 ||
      e.t_hi + e.t_offset >= N.n_t())
    throw std::invalid_argument("embedding range out of bounds");
  for (int t = e.t_lo; t <= e.t_hi; ++t)
    for (int x = 0; x < M.n_x(); ++x) {
      const int xn = ((x + e.x_offset) % M.n_x() + M.n_x()) % M.n_x();
      if (std::abs(M.beta()(t, x) - N.beta()(t + e.t_offset, xn)) > tol ||
          std::abs(M.a()(t, x) - N.a()(t + e.t_offset, xn)) > tol)
        throw std::invalid_argument("not isometric");
    }
}

TestFunction push_testfunction(const Spacetime& N, const Embedding& e,
                               const TestFunction& f) {
  TestFunction g = TestFunction::zero(N);
  const int n_x = static_cast<int>(f.values.cols());
  for (int t = e.t_lo; t <= e.t_hi; ++t)
    for (int x = 0; x < n_x; ++x)
      g.values(t + e.t_offset, ((x + e.x_offset) % n_x + n_x) % n_x) = f.values(t, x);
  return g;
}

Eigen::MatrixXd pushforward_data_map(const Spacetime& M, const Spacetime& N,
                                     const Embedding& e, int t_ref_M, int t_ref_N) {
  check_isometric(M, N, e);
  const int n_x = M.n_x();
  // Identify data at a surface inside the image slab, then transport within N.
  const int s_mid_M = std::min(std::max(t_ref_M, e.t_lo), e.t_hi - 1);
  const int s_mid_N = s_mid_M + e.t_offset;
  Eigen::MatrixXd map(2 * n_x, 2 * n_x);
  for (int i = 0; i < 2 * n_x; ++i) {
    CauchyData d;
    d.surface_t = t_ref_M;
    d.phi = Eigen::VectorXcd::Zero(n_x);
    d.pi = Eigen::VectorXcd::Zero(n_x);
    if (i < n_x) d.phi(i) = 1.0;
    else d.pi(i - n_x) = 1.0;
    CauchyData dm = transport(M, d, s_mid_M);
    CauchyData dn;
    dn.surface_t = s_mid_N;
    dn.phi = Eigen::VectorXcd::Zero(n_x);
    dn.pi = Eigen::VectorXcd::Zero(n_x);
    for (int x = 0; x < n_x; ++x) {
      const int xn = ((x + e.x_offset) % n_x + n_x) % n_x;
      dn.phi(xn) = dm.phi(x);
      dn.pi(xn) = dm.pi(x);
    }
    const CauchyData out = transport(N, dn, t_ref_N);
    for (int x = 0; x < n_x; ++x) {
      map(x, i) = out.phi(x).real();
      map(n_x + x, i) = out.pi(x).real();
    }
  }
  return map;
}

AlgebraElement push_element(const CcrContext& ctx_M, const CcrContext& ctx_N,
                            const Eigen::MatrixXd& data_map, const AlgebraElement& A) {
  // Map each generator index through the one-particle matrix, expanding
  // monomials multiplicatively and re-normal-ordering.
  AlgebraElement out = AlgebraElement::zero(ctx_N.dim());
  for (const auto& [m, c] : A.terms) {
    // Build the product of mapped generators term by term.
    std::map<Monomial, Complex> acc;
    acc[{}] = c;
    for (int idx : m) {
      std::map<Monomial, Complex> next;
      for (const auto& [w, wc] : acc)
        for (int j = 0; j < data_map.rows(); ++j) {
          const double coef = data_map(j, idx);
          if (coef == 0.0) continue;
          Monomial w2 = w;
          w2.push_back(j);
          normal_order(ctx_N, std::move(w2), wc * coef, next);
        }
      acc = std::move(next);
    }
    for (const auto& [w, wc] : acc) out.terms[w] += wc;
  }
  out.prune();
  return out;
}

// ---------------------------------------------------------------------------
// Even-part additivity

namespace {

// Index of the symmetrized degree-2 monomial (i <= j) in a flat vector.
int sym_index(int i, int j, int d) {
  if (i > j) std::swap(i, j);
  return i * d - i * (i - 1) / 2 + (j - i);
}

Eigen::VectorXd sym_outer(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const int d = static_cast<int>(u.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d * (d + 1) / 2);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      out(sym_index(i, j, d)) += 0.5 * u(i) * v(j) + 0.5 * u(j) * v(i);
  return out;
}

int numeric_rank(const Eigen::MatrixXd& A, double tol = 1e-10) {
  if (A.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * sv(0)) ++r;
  return r;
}

}  // namespace

EvenSpanReport even_subalgebra_span(const Spacetime& M, const Region& O1,
                                    const Region& O2, int t_ref) {
  EvenSpanReport rep;
  const KinematicSubalgebra S1 = kinematic_subspace(M, O1, t_ref);
  rep.d1 = S1.dim();
  if (O2.empty()) {
    rep.d2 = 0;
    // Degree-2 even span of S1 alone; no cross terms can be missing.
    rep.rank_separate = rep.rank_union = rep.d1 * (rep.d1 + 1) / 2;
    rep.deficit = 0;
    return rep;
  }
  const KinematicSubalgebra S2 = kinematic_subspace(M, O2, t_ref);
  rep.d2 = S2.dim();
  const int d = 2 * M.n_x();
  const int nsym = d * (d + 1) / 2;
  std::vector<Eigen::VectorXd> sep, cross;
  for (int a = 0; a < rep.d1; ++a)
    for (int b = a; b < rep.d1; ++b)
      sep.push_back(sym_outer(S1.basis.col(a), S1.basis.col(b)));
  for (int a = 0; a < rep.d2; ++a)
    for (int b = a; b < rep.d2; ++b)
      sep.push_back(sym_outer(S2.basis.col(a), S2.basis.col(b)));
  for (int a = 0; a < rep.d1; ++a)
    for (int b = 0; b < rep.d2; ++b)
      cross.push_back(sym_outer(S1.basis.col(a), S2.basis.col(b)));

  Eigen::MatrixXd Asep(nsym, sep.size());
  for (size_t j = 0; j < sep.size(); ++j) Asep.col(j) = sep[j];
  Eigen::MatrixXd Afull(nsym, sep.size() + cross.size());
  Afull.leftCols(sep.size()) = Asep;
  for (size_t j = 0; j < cross.size(); ++j)
    Afull.col(sep.size() + j) = cross[j];

  rep.rank_separate = numeric_rank(Asep);
  rep.rank_union = numeric_rank(Afull);
  rep.deficit = rep.rank_union - rep.rank_separate;
  return rep;
}

}  // namespace lcqft
