#include "lcqft/deformation.hpp"

#include <random>
#include <stdexcept>

namespace lcqft {

Spacetime interpolating_spacetime(const Spacetime& M_from, const Spacetime& M_to,
                                  int band_lo, int band_hi) {
  if (M_from.n_t() != M_to.n_t() || M_from.n_x() != M_to.n_x() ||
      M_from.dt() != M_to.dt() || M_from.dx() != M_to.dx())
    throw std::invalid_argument("lattice mismatch");
  if (M_from.kg().m_sq != M_to.kg().m_sq || M_from.kg().xi != M_to.kg().xi)
    throw std::invalid_argument("field parameter mismatch");
  if (band_hi - band_lo < 2 || band_lo < 2 || band_hi > M_from.n_t() - 3)
    throw std::invalid_argument("blending band out of range");
  Grid beta(M_from.n_t(), M_from.n_x()), a(M_from.n_t(), M_from.n_x());
  for (int t = 0; t < M_from.n_t(); ++t) {
    const double c = smoothstep(static_cast<double>(t - band_lo) / (band_hi - band_lo));
    for (int x = 0; x < M_from.n_x(); ++x) {
      beta(t, x) = (1.0 - c) * M_from.beta()(t, x) + c * M_to.beta()(t, x);
      a(t, x) = (1.0 - c) * M_from.a()(t, x) + c * M_to.a()(t, x);
    }
  }
  try {
    return Spacetime(M_from.n_t(), M_from.n_x(), M_from.dt(), M_from.dx(),
                     std::move(beta), std::move(a), M_from.kg(),
                     M_from.cfl_factor());
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("interpolation failed (") + e.what() +
                             "); widen the blending band or relax the step");
  }
}

CauchyChain interpolate(const Spacetime& M_from, const Spacetime& M_to,
                        int band_lo, int band_hi, int t_ref_from, int t_ref_to) {
  const Spacetime I = interpolating_spacetime(M_from, M_to, band_lo, band_hi);
  CauchyChain ch;
  ch.band_lo = band_lo;
  ch.band_hi = band_hi;
  // Data surfaces whose stencil rows lie entirely outside the blend.
  ch.s_lo = band_lo - 1;
  ch.s_hi = band_hi;
  ch.t_ref_from = t_ref_from;
  ch.t_ref_to = t_ref_to;
  const Eigen::MatrixXd up = transport_matrix(M_from, t_ref_from, ch.s_lo);
  const Eigen::MatrixXd through = transport_matrix(I, ch.s_lo, ch.s_hi);
  const Eigen::MatrixXd down = transport_matrix(M_to, ch.s_hi, t_ref_to);
  ch.composite = down * through * up;

  const int n = M_from.n_x();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  S.topRightCorner(n, n) = M_from.dx() * Eigen::MatrixXd::Identity(n, n);
  S.bottomLeftCorner(n, n) = -M_from.dx() * Eigen::MatrixXd::Identity(n, n);
  ch.symplectic_defect =
      (ch.composite.transpose() * S * ch.composite - S).cwiseAbs().maxCoeff();
  if (ch.symplectic_defect > 1e-9)
    throw std::runtime_error("chain composite failed the symplecticity check");
  return ch;
}

QuasifreeState transport_state(const Spacetime& M_from, const CauchyChain& chain,
                               const QuasifreeState& state_on_to) {
  QuasifreeState out =
      bogoliubov_transport(M_from, state_on_to, chain.composite);
  out.t_ref = chain.t_ref_from;
  out.dx = M_from.dx();
  return out;
}

// ---------------------------------------------------------------------------
// Rigidity experiments

namespace {

TestFunction random_on_region(const Spacetime& M, const Region& O,
                              std::mt19937& rng) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  TestFunction f = TestFunction::zero(M);
  for (const auto& [t, x] : O.points()) f.values(t, x) = Complex(amp(rng), amp(rng));
  return f;
}

}  // namespace

RigidityReport verify_causality_rigidity(
    const Spacetime& M_flat, const Spacetime& M_def,
    const std::vector<std::pair<Region, Region>>& pairs, unsigned seed,
    double tol) {
  std::mt19937 rng(seed);
  RigidityReport rep;
  for (const auto& [O1, O2] : pairs) {
    if (!causally_disjoint(M_flat, O1, O2) || !causally_disjoint(M_def, O1, O2))
      throw std::invalid_argument("regions not causally disjoint");
    RigidityPair pr;
    pr.O1 = O1;
    pr.O2 = O2;
    const Region shadow = causal_future(M_def, O1).unite(causal_past(M_def, O1));
    pr.touching = !shadow.dilate1().intersect(O2).empty();
    const TestFunction f1 = random_on_region(M_flat, O1, rng);
    const TestFunction f2 = random_on_region(M_flat, O2, rng);
    pr.residual_flat = std::abs(commutator_function(M_flat, f1, f2));
    pr.residual_deformed = std::abs(commutator_function(M_def, f1, f2));
    rep.max_residual = std::max({rep.max_residual, pr.residual_flat,
                                 pr.residual_deformed});
    rep.pairs.push_back(std::move(pr));
  }
  rep.all_pass = rep.max_residual <= tol;
  return rep;
}

RigidityReport verify_causality_rigidity(const Spacetime& M_flat,
                                         const Spacetime& M_def, int n_pairs,
                                         unsigned seed, double tol) {
  std::mt19937 rng(seed);
  const int n_t = M_flat.n_t(), n_x = M_flat.n_x(), pad = M_flat.n_pad();
  std::uniform_int_distribution<int> tdist(pad + 1, n_t - pad - 2);
  std::uniform_int_distribution<int> xdist(0, n_x - 1);
  std::uniform_int_distribution<int> rdist(1, 3);
  std::vector<std::pair<Region, Region>> pairs;
  int want_touching = n_pairs / 3;
  int guard = 0;
  while (static_cast<int>(pairs.size()) < n_pairs && ++guard < 50000) {
    const Region O1 = Region::interval(n_t, n_x, tdist(rng), xdist(rng), rdist(rng));
    const Region O2 = Region::interval(n_t, n_x, tdist(rng), xdist(rng), rdist(rng));
    if (!causally_disjoint(M_flat, O1, O2) || !causally_disjoint(M_def, O1, O2))
      continue;
    const bool touches =
        !causal_future(M_def, O1).unite(causal_past(M_def, O1)).dilate1()
             .intersect(O2).empty();
    if (want_touching > 0 && !touches) {
      // Keep looking for a boundary-touching pair first.
      if (static_cast<int>(pairs.size()) < n_pairs - want_touching)
        pairs.emplace_back(O1, O2);
      continue;
    }
    if (touches && want_touching > 0) --want_touching;
    pairs.emplace_back(O1, O2);
  }
  if (static_cast<int>(pairs.size()) < n_pairs)
    throw std::runtime_error("could not sample enough disjoint region pairs");
  return verify_causality_rigidity(M_flat, M_def, pairs, seed + 1, tol);
}

}  // namespace lcqft
