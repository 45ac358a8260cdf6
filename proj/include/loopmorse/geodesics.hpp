#pragma once

/// Closed-geodesic components of the flat torus loop space and their
/// second-variation spectra, plus the two critical loops created by the
/// pendulum perturbation on each nonconstant component.

#include <array>
#include <vector>

#include "loopmorse/torus.hpp"

namespace loopmorse {

struct GeodesicComponent {
    LatticeVector k;
    double energy_value;   // 2*pi^2 * |k|^2
    int dim_component;     // the critical set is a torus of this dimension
    int morse_index;       // 0 for every component of the flat metric
    int nullity;           // equals dim_component
};

// All components with energy at most the bound, lexicographically ordered.
std::vector<GeodesicComponent> enumerate_components(const FlatTorus& torus, double action_bound);

// Max norm of the centered second difference of the lift; zero for geodesics.
double geodesic_residual(const LoopSample& loop);

struct SpectrumReport {
    std::vector<std::pair<double, int>> eigenvalues; // (value, multiplicity), ascending
    int kernel_dim;
    int negative_count;
};

// Spectrum of the Jacobi operator -d^2/dt^2 on loops, listed through the
// given Fourier mode cutoff: 0 with multiplicity n, then 4*pi^2*l^2 with
// multiplicity 2n.
SpectrumReport jacobi_spectrum(const FlatTorus& torus, int mode_cutoff);

enum class PerturbedSign { minus, plus };

// Hessian spectrum at the two perturbed critical loops: eigenvalues
// 4*pi^2*l^2 -+ 1 (minus branch first).  Both operators have trivial kernel.
SpectrumReport perturbed_jacobi_spectrum(PerturbedSign sign, int mode_cutoff);

struct PerturbedCriticalPair {
    LoopSample gamma_minus;          // k t + q0, index 1
    LoopSample gamma_plus;           // k t + q0 + 1/2, index 0
    std::array<int, 2> morse_indices;
    std::array<double, 2> actions;   // 2*pi^2*k^2 + 1 and 2*pi^2*k^2 - 1
    std::array<double, 2> residuals;
    PendulumPotential potential;
};

// The maximum and minimum of the perturbed functional on the winding-k
// component of the circle loop space.  Requires k != 0.
PerturbedCriticalPair perturbed_critical_points(long long k, double q0, int N = 256);

// Max norm of the Euler-Lagrange defect -u'' - grad V(t,u) on the samples.
double perturbed_residual(const LoopSample& loop, const PendulumPotential& pot);

} // namespace loopmorse
