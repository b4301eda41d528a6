#pragma once

#include "lcqft/geometry.hpp"
#include "lcqft/types.hpp"

namespace lcqft {

// Compactly supported grid function (argument of smeared fields).
struct TestFunction {
  CGrid values;

  Region support(double tol = 0.0) const;
  static TestFunction zero(const Spacetime& M);
  static TestFunction delta(const Spacetime& M, int t, int x, Complex amp = 1.0);
  // Product bump centered at (t0, x0), half-widths in cells.
  static TestFunction bump(const Spacetime& M, int t0, int x0, double wt,
                           double wx, Complex amp = 1.0);
};

// Cauchy data (phi, pi) on the pair of rows (surface_t, surface_t + 1).
// phi is the midpoint value; pi is the weighted normal derivative with the
// volume factor a sqrt(beta) folded in (past-directed normal), so the
// symplectic form needs no metric factors.
struct CauchyData {
  Eigen::VectorXcd phi, pi;
  int surface_t = 0;
};

// Discrete Klein-Gordon operator (box + m^2 + xi R); interior rows only,
// boundary rows are returned as zero.
CGrid apply_P(const Spacetime& M, const CGrid& u);
Grid apply_P(const Spacetime& M, const Grid& u);

// Exact discrete retarded/advanced inverses: P u = f on interior rows with
// u = 0 below (resp. above) supp f, by explicit time stepping.
CGrid green_retarded(const Spacetime& M, const CGrid& f);
Grid green_retarded(const Spacetime& M, const Grid& f);
CGrid green_advanced(const Spacetime& M, const CGrid& f);
Grid green_advanced(const Spacetime& M, const Grid& f);

// Commutator solution E f = (E_ret - E_adv) f.
CGrid e_solution(const Spacetime& M, const CGrid& f);
Grid e_solution(const Spacetime& M, const Grid& f);

// Volume-weighted bilinear pairing <u, v>_w = sum w u v dt dx (no conjugation).
Complex pair_w(const Spacetime& M, const CGrid& u, const CGrid& v);

// E(f, h) = <f, E h>_w.
Complex commutator_function(const Spacetime& M, const TestFunction& f,
                            const TestFunction& h);

// Cauchy data of E f on the surface t_ref: the quotient map. Sends P g to 0
// at machine precision.
CauchyData to_quotient(const Spacetime& M, const TestFunction& f, int t_ref);
CauchyData data_of(const Spacetime& M, const CGrid& u, int s);

// sigma(d1, d2) = sum_x (phi1 pi2 - pi1 phi2) dx.
Complex symplectic_form(const Spacetime& M, const CauchyData& d1,
                        const CauchyData& d2);

// Band representative: a test function supported near the band with the same
// quotient data as f. The band must contain at least 3 time levels.
TestFunction timeslice_representative(const Spacetime& M, const TestFunction& f,
                                      int band_lo, int band_hi);

// Leapfrog evolution of Cauchy data between surfaces (exactly symplectic,
// exactly consistent with the Green operators).
CauchyData transport(const Spacetime& M, const CauchyData& d, int s_to);

// Full-grid solution with the given Cauchy data.
CGrid solution_from_data(const Spacetime& M, const CauchyData& d);
Grid solution_from_data_real(const Spacetime& M, const Eigen::VectorXd& phi,
                             const Eigen::VectorXd& pi, int s);

// Matrix of the data transport from surface s_from to s_to over the
// (phi-delta, pi-delta) basis; exactly symplectic.
Eigen::MatrixXd transport_matrix(const Spacetime& M, int s_from, int s_to);

// Test function supported in the band whose quotient data equals d.
TestFunction data_to_testfunction(const Spacetime& M, const CauchyData& d,
                                  int band_lo, int band_hi);

}  // namespace lcqft
