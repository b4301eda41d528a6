#pragma once

#include <string>
#include <vector>

#include "lcqft/ccr_algebra.hpp"

namespace lcqft {

// Response of the dynamics to a compactly supported metric perturbation h:
// evolve data forward through the unperturbed metric past supp h, reinterpret
// on the perturbed spacetime, evolve back below supp h, reinterpret again and
// return to the reference surface. A linear map on Cauchy data at t_ref.
struct RceMap {
  int t_ref = 0;
  int s_lo = 0, s_hi = 0;  // bracketing data surfaces actually used
  Eigen::MatrixXd map;     // 2 n_x x 2 n_x over (phi-delta, pi-delta) basis
};

// Flatten Cauchy data to the real vector (phi_0..phi_{n-1}, pi_0..pi_{n-1}).
Eigen::VectorXd data_to_vector(const CauchyData& d);
CauchyData vector_to_data(int surface_t, const Eigen::VectorXd& v);
// sqrt(sum (phi^2 + pi^2) dx).
double data_norm(const Spacetime& M, const CauchyData& d);

// Test-function form of the response: f - (P_{M[h]} - P_M) applied to the
// advanced solution of f on the perturbed spacetime. Requires supp f strictly
// above supp h; throws "f must be supported in M+" otherwise.
TestFunction rce_testfunction(const Spacetime& M, const MetricPerturbation& h,
                              const TestFunction& f);

// Data map assembled by applying rce_testfunction to a generating family of
// band representatives at t_ref (requires supp h strictly below t_ref and
// t_ref + 3 <= n_t - 2).
RceMap rce(const Spacetime& M, const MetricPerturbation& h, int t_ref);

// Independent route through explicit Cauchy-surface transport; valid for any
// placement of t_ref relative to supp h. The result is independent of the
// choice of bracketing surfaces.
RceMap rce_via_transport(const Spacetime& M, const MetricPerturbation& h, int t_ref);
RceMap rce_via_transport_at(const Spacetime& M, const MetricPerturbation& h,
                            int t_ref, int s_lo, int s_hi);

// Max defect of sigma(L u, L v) = sigma(u, v) over the standard basis.
double symplecticity_defect(const Spacetime& M, const RceMap& R);

// Exact directional derivative of the wave operator along h, applied to u:
// L[h] u = -(d/ds) P_{M[s h]} u at s = 0, computed with dual-number
// coefficients (no truncation error).
Grid apply_L(const Spacetime& M, const MetricPerturbation& h, const Grid& u);

// Finite-difference derivative of apply_P along h (oracle for apply_L).
Grid apply_L_fd(const Spacetime& M, const MetricPerturbation& h, const Grid& u,
                double s);

// Quotient data of L[h] E f at t_ref: the stress-energy pairing direction.
CauchyData stress_energy_pairing(const Spacetime& M, const MetricPerturbation& h,
                                 const TestFunction& f, int t_ref);

// Central finite difference of the response of f's quotient data along s h,
// at step s; and its Richardson extrapolation over {s0, s0/2}.
CauchyData rce_derivative_fd(const Spacetime& M, const MetricPerturbation& h,
                             const TestFunction& f, int t_ref, double s);
CauchyData rce_derivative(const Spacetime& M, const MetricPerturbation& h,
                          const TestFunction& f, int t_ref, double s0);

// One-particle piece of the dynamically defined local observables: the joint
// fixed space of the response maps of random perturbations supported in the
// causal complement of K.
struct FixedSubspace {
  Eigen::MatrixXd basis;             // orthonormal columns in R^(2 n_x)
  std::vector<int> dims_by_samples;  // kernel dimension after 1..n samples
  int dim() const { return static_cast<int>(basis.cols()); }
};

FixedSubspace fixed_subspace(const Spacetime& M, const Region& K, int t_ref,
                             int n_samples, unsigned seed,
                             double threshold = 1e-8);

struct DynLocReport {
  int dim_dynamical = 0, dim_kinematic = 0;
  Eigen::VectorXd angles;  // principal angles kinematic vs dynamical
  double max_angle = 0.0;  // largest angle over the matched pairs
  double containment = 0.0;  // residual of kinematic inside dynamical
  int surplus = 0;         // dim_dynamical - dim_kinematic
  std::string verdict;
};

DynLocReport dynamical_vs_kinematic(const Spacetime& M, const Region& O,
                                    int t_ref, int n_samples, unsigned seed);

}  // namespace lcqft
