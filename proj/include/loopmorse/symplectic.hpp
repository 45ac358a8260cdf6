#pragma once

/// Symplectic paths and their generalized Conley-Zehnder (Robbin-Salamon)
/// index: detection of eigenvalue-one crossings, crossing forms, the
/// half-integer crossing sum, the homotopy decomposition used for the
/// everywhere-degenerate kinetic shear, and the quadratic-generator formula
/// for short exponential paths.
///
/// Conventions, fixed once and used everywhere:
///   J0 = [0 -I; I 0],  omega0(x, y) = (J0 x) . y,
///   crossing form  Q(xi) = omega0(xi, dPsi/dt(t) xi)  on ker(Psi(t) - I).
/// With these choices the clockwise rotation carries signature -2 at its
/// identity crossing and exponential paths exp(-t*J*S) with |S| < 2*pi
/// carry index (number of negative eigenvalues of S) - n.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "loopmorse/errors.hpp"
#include "loopmorse/geodesics.hpp"
#include "loopmorse/torus.hpp"

namespace loopmorse {

// Exact half-integer: the stored numerator is over a fixed denominator of 2.
struct HalfInt {
    long long num = 0;

    double value() const { return static_cast<double>(num) / 2.0; }
    bool is_integer() const { return num % 2 == 0; }
    long long as_integer() const;
    std::string str() const;

    friend HalfInt operator+(HalfInt a, HalfInt b) { return HalfInt{a.num + b.num}; }
    friend bool operator==(HalfInt a, HalfInt b) { return a.num == b.num; }
    friend bool operator!=(HalfInt a, HalfInt b) { return a.num != b.num; }
};

Eigen::MatrixXd standard_complex_structure(int n);                 // J0, 2n x 2n
Eigen::MatrixXd metric_complex_structure(int n, double scale);     // [0 -I/scale; scale*I 0]

double omega0(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

bool is_symplectic(const Eigen::MatrixXd& m, double tol = 1e-9);

class SymplecticPath {
public:
    using MatrixFn = std::function<Eigen::MatrixXd(double)>;

    // Linearized kinetic return map [I, t/(2*pi)^2 * I; 0, I] on R^{2n}.
    static SymplecticPath shear(int n);

    // Plane rotation through the given number of turns; positive turns run
    // clockwise in (u, v), matching the polar part of the shear.
    static SymplecticPath rotation(double turns);

    // exp(-t * J * S) for symmetric S; J must make J*S trace-free so the
    // path stays symplectic.
    static SymplecticPath exponential(Eigen::MatrixXd S, Eigen::MatrixXd J);

    // Matrices given on a uniform grid over [0,1]; linear interpolation in
    // between, difference quotients as derivatives.
    static SymplecticPath sampled(std::vector<Eigen::MatrixXd> values);

    // Arbitrary value/derivative callbacks; no validation.
    static SymplecticPath analytic(int dim, MatrixFn value, MatrixFn derivative, std::string kind);

    // Same trace with parameter substitution t -> tau(t).
    static SymplecticPath reparametrize(const SymplecticPath& base,
                                        std::function<double(double)> tau,
                                        std::function<double(double)> dtau);

    Eigen::MatrixXd value(double t) const { return value_(t); }
    Eigen::MatrixXd derivative(double t) const { return derivative_(t); }
    int dim() const { return dim_; }
    const std::string& kind() const { return kind_; }

private:
    SymplecticPath(int dim, MatrixFn value, MatrixFn derivative, std::string kind);

    int dim_;
    MatrixFn value_;
    MatrixFn derivative_;
    std::string kind_;
};

struct Crossing {
    double t = 0.0;
    Eigen::MatrixXd kernel; // orthonormal columns spanning ker(Psi(t) - I)
    int signature = 0;
    bool regular = false;
    bool boundary = false;
};

struct CrossingScan {
    std::vector<Crossing> crossings;
    // Parameter ranges where Psi(t) - I is singular at every sampled point;
    // the crossing-sum method does not apply across these.
    std::vector<std::pair<double, double>> singular_spans;
};

// Grid scan for zeros of the smallest singular value of Psi(t) - I with
// sign-stable bisection (or golden-section on even-order zeros) down to a
// parameter window of 1e-12.  Crossing forms are evaluated along the way.
CrossingScan detect_crossings(const SymplecticPath& path, int grid = 512, double tol = 1e-8);

// Signature of the crossing form at the given crossing; escalates to the
// second parameter derivative when the first-order form vanishes (stationary
// reparametrizations), and marks the crossing non-regular when the form is
// degenerate.  Updates the crossing in place and returns the signature.
int crossing_form(const SymplecticPath& path, Crossing& crossing);

enum class IndexMethod { crossing_sum, homotopy_decomposition, sz_formula };

struct IndexResult {
    HalfInt value;
    IndexMethod method = IndexMethod::crossing_sum;
    std::vector<Crossing> crossings;
    std::string path_kind;
    int n = 0; // half the matrix dimension
};

// Half-weighted boundary crossing sum.  Throws non_regular_path_error when a
// degenerate crossing or an identically singular span is present.
IndexResult rs_index(const SymplecticPath& path, int grid = 512, double tol = 1e-8);

// Index of the kinetic shear on R^{2n}.  The path is degenerate throughout,
// so the value comes from a homotopy: a clockwise quarter-turn rotation
// (crossing -2 at the identity) followed by a connector that meets the
// degenerate locus only at its far endpoint (crossing +1), each endpoint
// half-weighted, then one copy per block.  Result: -n/2.
IndexResult generalized_cz_shear(int n);

// The same value from the two one-sided perturbations of the shear, pushed
// off the degenerate locus clockwise and counterclockwise; both are regular
// paths for eps below 1/(4*pi^3) and both sum to -1/2.
std::pair<IndexResult, IndexResult> sided_shear_indices(double eps = 4e-3, int grid = 2048);

// Index of exp(-t*J*S) read off the generator: (negative eigenvalue count
// of S) minus n.  Requires symmetric S with spectral norm below 2*pi.
int cz_from_quadratic(const Eigen::MatrixXd& S);

// Floer-to-Morse degree shift: mu + (dimension of the critical manifold)/2.
HalfInt grading_shift(HalfInt mu, int crit_dim);

// X_H = (dH/dv, -dH/du) at a phase-space point.
std::pair<Eigen::VectorXd, Eigen::VectorXd>
hamiltonian_vector_field(const Hamiltonian& H, double t, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Linearization of the kinetic flow along any of its closed orbits.
SymplecticPath linearized_flow(const FlatTorus& torus);

// Linearization of the pendulum flow along the two perturbed orbits.
SymplecticPath linearized_flow(PerturbedSign sign);

// Scaled Hessian generator of the linearized pendulum flow at the two
// critical orbits: diag(1, 1) on the minus branch, diag(-1, 1) on the plus
// branch.
Eigen::MatrixXd perturbed_generator(PerturbedSign sign);

} // namespace loopmorse
