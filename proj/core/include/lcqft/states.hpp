#pragma once

#include <string>
#include <vector>

#include "lcqft/ccr_algebra.hpp"

namespace lcqft {

// Spatial mode decomposition of a static spacetime: eigenpairs of the spatial
// operator D v = nu^2 v (symmetric in the a-weighted inner product), with
// eigenvectors normalized to v^T diag(a) v dx = 1, and the lattice-corrected
// time frequencies used by the ground-state covariance.
struct ModeData {
  Eigen::VectorXd nu;     // spatial frequencies, ascending, >= 0
  Eigen::VectorXd omega;  // nu / sqrt(1 - (dt nu / 2)^2)
  Eigen::MatrixXd modes;  // columns v_k
  Eigen::VectorXd a;      // spatial weight row (t-independent)
  bool regulated = false; // true when the zero-mode regulator mass was added
  int n_modes() const { return static_cast<int>(nu.size()); }
};

// Gaussian (quasifree) state given by its two-point matrix over the Cauchy
// data basis at t_ref: W = C + (i/2) S with C real symmetric and S the
// symplectic Gram matrix. W is Hermitian positive semidefinite.
struct QuasifreeState {
  int t_ref = 0;
  double dx = 0.0;
  Eigen::MatrixXcd W;
  int n_x() const { return static_cast<int>(W.rows()) / 2; }
};

// Mass regulator injected for the massless minimally coupled zero mode.
inline constexpr double kRegulatorMass = 1e-4;

// Throws "ultrastatic required" unless the metric is t-independent with
// beta = 1.
ModeData spatial_modes(const Spacetime& M);

QuasifreeState ultrastatic_vacuum(const Spacetime& M, int t_ref);

// General product-over-modes Gaussian state: C_modes[k] is the 2x2 mode
// covariance [[<qq>, <qp>], [<pq>, <pp>]] (commutator part included, so the
// vacuum entry is [[1/(2w), i/2], [-i/2, w/2]]).
QuasifreeState state_from_mode_covariance(const Spacetime& M, int t_ref,
                                          const ModeData& md,
                                          const std::vector<Eigen::Matrix2cd>& C_modes);

Eigen::Matrix2cd vacuum_mode_covariance(double omega);
// Pure squeezed mode covariance: squeeze parameter r, phase theta.
Eigen::Matrix2cd squeezed_mode_covariance(double omega, double r, double theta);
// Mode-k covariance of the state with n quanta in mode k.
Eigen::Matrix2cd excited_mode_covariance(double omega, int n);

// Max-norm defect of W - W^T = i S.
double ccr_defect(const Spacetime& M, const QuasifreeState& s);
// Smallest eigenvalue of the Hermitian matrix W.
double min_eigenvalue(const QuasifreeState& s);

// Two-point function w2(f, h) through the quotient data at the state's t_ref.
Complex two_point(const Spacetime& M, const QuasifreeState& s,
                  const TestFunction& f, const TestFunction& h);
Complex two_point_data(const QuasifreeState& s, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& v);

// Quasifree n-point function: sum over perfect pairings of w2 factors in
// operator order; odd n gives 0. Throws for n > 8.
Complex n_point(const Spacetime& M, const QuasifreeState& s,
                const std::vector<TestFunction>& fs);

// Expectation of a polynomial algebra element by Wick pairing over W.
Complex expectation(const CcrContext& ctx, const QuasifreeState& s,
                    const AlgebraElement& A);

// ---------------------------------------------------------------------------
// Lightcone probe of the two-point difference

struct HadamardReport {
  std::vector<int> separations;  // probe separations in spatial cells
  std::vector<double> values;    // |(w2_1 - w2_2)(probe pair)|
  double growth_ratio = 0.0;     // last successive difference / first
  bool bounded = true;
  std::string verdict;
};

// Evaluates the two-point difference on pairs of lattice deltas approaching
// each other along the lightcone from (t0, x0); bounded differences indicate
// the states share their short-distance (singular) structure.
HadamardReport hadamard_difference(const Spacetime& M, const QuasifreeState& s1,
                                   const QuasifreeState& s2, int t0, int x0,
                                   int m_max);

// ---------------------------------------------------------------------------
// Energy density (always relative to a reference state)

// Density per site at the common reference surface.
Eigen::VectorXd energy_density_profile(const Spacetime& M, const QuasifreeState& s,
                                       const QuasifreeState& ref);
// Integral of the profile against the spatial volume element a dx.
double total_energy(const Spacetime& M, const QuasifreeState& s,
                    const QuasifreeState& ref);

// Exact per-mode one-step evolution matrix on (q, p) mode coordinates at
// surface s (computed from the leapfrog transport, not a closed form).
Eigen::Matrix2d mode_step_matrix(const Spacetime& M, const ModeData& md, int k,
                                 int s);

// Density at the worldline's sites for a mode-represented state evolved
// exactly along the lattice dynamics; vacuum-subtracted.
std::vector<double> worldline_energy_density(const Spacetime& M, const ModeData& md,
                                             const std::vector<Eigen::Matrix2cd>& C_modes,
                                             const Worldline& gamma);

// ---------------------------------------------------------------------------
// Averaged energy bounds over the Gaussian family

struct QeiReport {
  double bound = 0.0;        // family lower bound c(f)
  double min_sampled = 0.0;
  double max_sampled = 0.0;
  int n_states = 0;
  bool all_above = true;     // every sample >= bound - 1e-8
  bool negative_attained = false;
  std::vector<double> values;
};

// Averaged energy density along a static worldline with weight f^2 dtau, for
// n_states random product squeezed states plus the per-mode minimizer; the
// bound is the sum over modes of the exact minimum of the per-mode quadratic
// form over covariances satisfying the uncertainty relation.
QeiReport qei_check(const Spacetime& M, const Worldline& gamma,
                    const SamplingFunction& f, int n_states, unsigned seed);

// ---------------------------------------------------------------------------
// State transport and particle content

// Pullback of the state along a symplectic data map (throws if the map fails
// symplecticity at 1e-9).
QuasifreeState bogoliubov_transport(const Spacetime& M, const QuasifreeState& s,
                                    const Eigen::MatrixXd& L);

struct ParticleReport {
  Eigen::VectorXd n_k;  // occupation per mode of the reference decomposition
  double total = 0.0;
};

// Mode occupation numbers of a state relative to the static reference
// spacetime's vacuum decomposition.
ParticleReport particle_number(const Spacetime& M_ref, const QuasifreeState& s);

}  // namespace lcqft
