#pragma once

/// Flat tori, sampled loops on them, and the loop-space functionals
/// (Dirichlet energy, pendulum-perturbed energy, symplectic action,
/// gauge-invariant H^1 distance).
///
/// Loops are stored as lifts: N uniform samples u_0..u_{N-1} of a map
/// [0,1] -> R^n together with an integer winding vector k, so that the
/// periodic extension satisfies u_{i+N} = u_i + k.  All quadrature is
/// composite trapezoid on the uniform grid (equivalently, a plain mean)
/// and derivatives are centered differences across the wrap.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "loopmorse/errors.hpp"

namespace loopmorse {

using LatticeVector = std::vector<long long>;

long long norm_sq(const LatticeVector& k);

struct FlatTorus {
    int dim;
    double metric_scale; // g = metric_scale * (identity); fixed to (2*pi)^2

    explicit FlatTorus(int n);
};

class LoopSample {
public:
    // Samples with an explicit winding vector; every lift step, including the
    // wrap step u_0 + k - u_{N-1}, must stay below 1/2 per coordinate.
    static LoopSample make(const FlatTorus& torus, Eigen::MatrixXd samples, LatticeVector winding);

    // Infers the winding as the nearest integer vector to u_{N-1} - u_0.
    static LoopSample from_samples(const FlatTorus& torus, Eigen::MatrixXd samples);

    int size() const { return static_cast<int>(samples_.rows()); }
    int dim() const { return torus_.dim; }
    const FlatTorus& torus() const { return torus_; }
    const Eigen::MatrixXd& samples() const { return samples_; }
    const LatticeVector& winding() const { return winding_; }

    // Periodic lift extension, valid for any integer index.
    Eigen::RowVectorXd sample_wrapped(long long i) const;

private:
    LoopSample(FlatTorus torus, Eigen::MatrixXd samples, LatticeVector winding);

    FlatTorus torus_;
    Eigen::MatrixXd samples_; // N x n
    LatticeVector winding_;
};

// Loop in phase space T*T^n: base samples plus covector samples.
class PhaseLoopSample {
public:
    static PhaseLoopSample make(LoopSample base, Eigen::MatrixXd covectors);

    const LoopSample& base() const { return base_; }
    const Eigen::MatrixXd& covectors() const { return covectors_; }
    int size() const { return base_.size(); }
    int dim() const { return base_.dim(); }

private:
    PhaseLoopSample(LoopSample base, Eigen::MatrixXd covectors);

    LoopSample base_;
    Eigen::MatrixXd covectors_; // N x n
};

// Time-dependent pendulum potential V(t,u) = -cos(2*pi*(u - k t - q0)) on the
// circle factor; drives every perturbed construction.  k = 0 is allowed for
// plain functional evaluation but rejected by the connecting-orbit machinery.
struct PendulumPotential {
    long long k = 1;
    double q0 = 0.0;

    double value(double t, double u) const;
    // Gradient with respect to the scaled metric: (1/(2*pi)) sin(2*pi*(u - k t - q0)).
    double gradient(double t, double u) const;
};

// Hamiltonian on T*T^n, optionally with analytic gradients.  When a gradient
// callback is missing, central differences with the given step are used.
struct Hamiltonian {
    std::function<double(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& v)> value;
    std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& v)> grad_u;
    std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& v)> grad_v;
    double fd_step = 1e-6;

    Eigen::VectorXd du(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
    Eigen::VectorXd dv(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
};

// Kinetic Hamiltonian |v|^2 / (2*(2*pi)^2).
Hamiltonian free_hamiltonian(const FlatTorus& torus);

// Kinetic term plus the pendulum potential; one-dimensional base.
Hamiltonian pendulum_hamiltonian(const PendulumPotential& pot);

// Recomputes the winding from the samples and cross-checks the stored value.
LatticeVector winding_vector(const LoopSample& loop);

// (1/2) \int g(du/dt, du/dt); exact for affine lifts.
double energy(const LoopSample& loop);

// energy(loop) - \int V(t, u(t)) dt.  One-dimensional base only.
double perturbed_energy(const LoopSample& loop, const PendulumPotential& pot);

// \int v . du/dt - \int H(t,u,v).
double symplectic_action(const PhaseLoopSample& z, const Hamiltonian& H);

// Distance in the H^1 sense after embedding T^n componentwise into C^n;
// invariant under integer shifts of either lift.
double h1_distance(const LoopSample& a, const LoopSample& b);

// Straight geodesic loop t -> k t + q sampled at N points.
LoopSample sample_geodesic(const FlatTorus& torus, const LatticeVector& k, const Eigen::VectorXd& q, int N);

// Lifted Hamiltonian orbit of the kinetic flow: (k t + u0, (2*pi)^2 k).
PhaseLoopSample make_free_orbit(const FlatTorus& torus, const LatticeVector& k, const Eigen::VectorXd& u0, int N);

// Rotates the sample origin by m grid points, keeping the lift consistent.
LoopSample cyclic_shift(const LoopSample& loop, int m);

} // namespace loopmorse
