#pragma once

// Time integration: Hamiltonian orbits on the torus, the scalar connection
// ODE, and the parabolic cylinder equation between the perturbed critical
// loops.
//
// Orbits are integrated with classical RK4 on the lifted phase space; closure
// is measured against the nearest lattice translate.  The connection ODE
//
//     chi'(s) = (1 / 2pi) sin(2 pi chi(s))
//
// is integrated with RK4 in both directions from s = 0 and the endpoint
// values classified against the stationary values 0, 1/2, 1.  The cylinder
// solver evolves
//
//     dw/ds = d^2 w/dt^2 + grad V(t, w)
//
// for a circle-valued w(s, t) of winding k, written in the deviation variable
// phi(s, t) = w(s, t) - k t - q0 which is honestly periodic in t.  Stepping
// is implicit-explicit trapezoidal: Crank-Nicolson on the diffusion term
// (unconditionally stable), Heun on the bounded nonlinearity, second order in
// both grid spacings.  On t-constant data the scheme reduces exactly to Heun
// applied to the connection ODE.

#include <vector>

#include "loopmorse/torus.hpp"

namespace loopmorse {

// Phase-space trajectory over one period, sampled at t_i = i / steps.
struct HamiltonianOrbit {
    std::vector<Eigen::VectorXd> positions;   // lifted u(t_i), i = 0..steps
    std::vector<Eigen::VectorXd> covectors;   // v(t_i)
    double period = 1.0;
    double closure_defect = 0.0;   // max(|u(1)-u(0)-round(u(1)-u(0))|, |v(1)-v(0)|), sup norm
    double energy_drift = 0.0;     // max_i |H(t_i, x(t_i)) - H(0, x(0))|
};

// Integrate u' = dH/dv, v' = -dH/du from (u0, v0) over t in [0, 1] with RK4.
// Requires steps >= 100; throws instability_error on non-finite values.
HamiltonianOrbit integrate_orbit(const Hamiltonian& h,
                                 const Eigen::VectorXd& u0,
                                 const Eigen::VectorXd& v0,
                                 int steps = 1000);

enum class ChiLimit { lower, half, upper, undetermined };   // 0, 1/2, 1, none

// Fixed-width label: "0", "0.5", "1", "none".
const char* chi_limit_label(ChiLimit limit);

// Sampled solution of the connection ODE with classified end behavior.
struct FlowTrajectory {
    std::vector<double> s_grid;   // increasing, contains s = 0
    std::vector<double> chi;
    ChiLimit backward = ChiLimit::undetermined;   // limit as s -> -infinity
    ChiLimit forward = ChiLimit::undetermined;    // limit as s -> +infinity
};

// Integrate the connection ODE from chi(0) = chi0 in [0, 1) over
// [s_min, s_max] (s_min <= 0 <= s_max).  Ends are classified by proximity
// (< 1e-4) to a stationary value; if either end stays unclassified the window
// is doubled, up to four times.
FlowTrajectory integrate_chi(double chi0,
                             double s_min = -20.0,
                             double s_max = 20.0,
                             int steps = 4000);

// Point evaluation chi(s) of the connection ODE solution with chi(0) = chi0,
// by an RK4 march at the given step (s may be negative).
double connection_value(double chi0, double s, double step = 1e-3);

// Connecting-trajectory count between the two critical loops of the pendulum
// perturbation, shot from one transversal representative per side
// (chi(0) = 1/4 and 3/4); s-translates of each trajectory are identified.
struct OrbitCount {
    int count = 0;
    int parity = 0;   // count mod 2, the Morse-Witten boundary coefficient
};

// Requires k != 0 (the scalar reduction needs a nonconstant reference
// geodesic); the result does not depend on k or q0 beyond that.
OrbitCount count_connecting_orbits(long long k, double q0 = 0.0);

// Discrete solution of the cylinder equation.
struct CylinderGrid {
    long long k = 1;                       // winding of the reference loops
    double q0 = 0.0;
    std::vector<double> s_grid;            // stored slice times, increasing from 0
    std::vector<double> t_grid;            // N uniform points on the circle
    std::vector<std::vector<double>> w;    // w[j][i], lifted, winding k in t
    std::vector<double> energies;          // perturbed energy per stored slice
    double residual = 0.0;                 // sup distance of the final slice from gamma+ (mod 1)
};

// Evolve the cylinder equation from the initial loop w0 (winding must equal
// k).  w0 is resampled to t_points if needed; slices are stored every
// store_stride steps (0 = pick a stride giving ~300 slices).  Requires
// 0 < s_step <= pi (half the explicit-part stability bound 2pi).  Throws
// instability_error if the iteration produces non-finite values.
CylinderGrid solve_cylinder(long long k, double q0,
                            const LoopSample& w0,
                            double s_max = 15.0,
                            int t_points = 256,
                            double s_step = 1e-3,
                            int store_stride = 0);

// Extract one stored slice as a loop.
LoopSample cylinder_slice(const CylinderGrid& grid, int slice);

// Initial loop u(t) = k t + q0 + offset + amplitude * sin(2 pi t) as an
// N-sample lift.
LoopSample make_ansatz_loop(long long k, double q0, double offset,
                            double amplitude, int samples);

}  // namespace loopmorse
