#pragma once

#include <utility>
#include <vector>

#include "lcqft/states.hpp"

namespace lcqft {

// Link between two spacetimes on the same lattice through an interpolating
// metric: equal to the source below the blending band and to the target above
// it. The composite matrix maps Cauchy data of the source at t_ref_from to
// Cauchy data of the target at t_ref_to, through identification surfaces just
// outside the band; it is symplectic by construction.
struct CauchyChain {
  int band_lo = 0, band_hi = 0;
  int s_lo = 0, s_hi = 0;  // identification surfaces in the source / target
  int t_ref_from = 0, t_ref_to = 0;
  Eigen::MatrixXd composite;
  double symplectic_defect = 0.0;
};

// The blended spacetime (smoothstep in t across the band).
Spacetime interpolating_spacetime(const Spacetime& M_from, const Spacetime& M_to,
                                  int band_lo, int band_hi);

CauchyChain interpolate(const Spacetime& M_from, const Spacetime& M_to,
                        int band_lo, int band_hi, int t_ref_from, int t_ref_to);

// Pullback of a state on the target spacetime to the source spacetime along
// the chain; preserves the two-point invariants.
QuasifreeState transport_state(const Spacetime& M_from, const CauchyChain& chain,
                               const QuasifreeState& state_on_to);

// ---------------------------------------------------------------------------
// Commutator-vanishing experiments across a deformation

struct RigidityPair {
  Region O1, O2;
  bool touching = false;  // closures meet at one lattice cell after dilation
  double residual_flat = 0.0;
  double residual_deformed = 0.0;
};

struct RigidityReport {
  std::vector<RigidityPair> pairs;
  double max_residual = 0.0;
  bool all_pass = false;
};

// Checks E(f, h) = 0 for the given causally disjoint region pairs on both
// spacetimes with randomized test functions; throws if a pair is not causally
// disjoint in either spacetime.
RigidityReport verify_causality_rigidity(const Spacetime& M_flat,
                                         const Spacetime& M_def,
                                         const std::vector<std::pair<Region, Region>>& pairs,
                                         unsigned seed, double tol = 1e-10);

// Samples n_pairs random disjoint pairs (about a third boundary-touching)
// and runs the check above.
RigidityReport verify_causality_rigidity(const Spacetime& M_flat,
                                         const Spacetime& M_def, int n_pairs,
                                         unsigned seed, double tol = 1e-10);

}  // namespace lcqft
