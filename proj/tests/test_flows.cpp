#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "loopmorse/flows.hpp"
#include "oracles.hpp"

using namespace loopmorse;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kG = 4.0 * kPi * kPi;

double slice_defect(const CylinderGrid& grid, size_t slice)
{
    // Max distance of the deviation from the sink value 1/2, on the circle.
    double worst = 0.0;
    for (size_t j = 0; j < grid.t_grid.size(); ++j) {
        const double phi = grid.w[slice][j] - grid.k * grid.t_grid[j] - grid.q0;
        worst = std::max(worst, std::abs(std::remainder(phi - 0.5, 1.0)));
    }
    return worst;
}

} // namespace

TEST_CASE("closed-form solution satisfies the connection ODE")
{
    // Guard for the oracle itself: d/ds of (1/pi) atan(tan(pi chi0) e^s)
    // equals sin(2 pi chi)/(2 pi) along the solution.
    for (double chi0 : {0.1, 0.25, 0.49, 0.6, 0.75}) {
        for (double s : {-2.0, -0.5, 0.0, 0.7, 2.0}) {
            const double h = 1e-5;
            const double fd = (oracles::chi_closed_form(chi0, s + h)
                               - oracles::chi_closed_form(chi0, s - h)) / (2.0 * h);
            const double rhs = std::sin(2.0 * kPi * oracles::chi_closed_form(chi0, s)) / (2.0 * kPi);
            CHECK(fd == doctest::Approx(rhs).epsilon(1e-8));
        }
    }
}

TEST_CASE("chi integration matches the closed form")
{
    const FlowTrajectory traj = integrate_chi(0.25, -20.0, 20.0, 10000);
    REQUIRE(traj.s_grid.size() == traj.chi.size());
    double worst = 0.0;
    for (size_t i = 0; i < traj.s_grid.size(); ++i)
        worst = std::max(worst,
                         std::abs(traj.chi[i] - oracles::chi_closed_form(0.25, traj.s_grid[i])));
    CHECK(worst < 1e-8);
    CHECK(traj.backward == ChiLimit::lower);
    CHECK(traj.forward == ChiLimit::half);
    CHECK(chi_limit_label(traj.backward) == "0");
    CHECK(chi_limit_label(traj.forward) == "0.5");

    // The trajectory grid contains s = 0 with the initial value on it.
    bool found = false;
    for (size_t i = 0; i < traj.s_grid.size(); ++i)
        if (traj.s_grid[i] == 0.0) {
            found = true;
            CHECK(traj.chi[i] == doctest::Approx(0.25).epsilon(1e-15));
        }
    CHECK(found);
}

TEST_CASE("chi limits by branch")
{
    const FlowTrajectory up = integrate_chi(0.75, -20.0, 20.0, 8000);
    CHECK(up.backward == ChiLimit::upper);
    CHECK(up.forward == ChiLimit::half);
    CHECK(chi_limit_label(up.backward) == "1");

    const FlowTrajectory fixed_zero = integrate_chi(0.0, -10.0, 10.0, 4000);
    CHECK(fixed_zero.backward == ChiLimit::lower);
    CHECK(fixed_zero.forward == ChiLimit::lower);
    for (double c : fixed_zero.chi) CHECK(c == 0.0);

    const FlowTrajectory fixed_half = integrate_chi(0.5, -10.0, 10.0, 4000);
    CHECK(fixed_half.backward == ChiLimit::half);
    CHECK(fixed_half.forward == ChiLimit::half);

    // Monotone increase on (0, 1/2), decrease on (1/2, 1).
    const FlowTrajectory inc = integrate_chi(0.25, -5.0, 5.0, 2000);
    for (size_t i = 1; i < inc.chi.size(); ++i) CHECK(inc.chi[i] > inc.chi[i - 1]);
    const FlowTrajectory dec = integrate_chi(0.75, -5.0, 5.0, 2000);
    for (size_t i = 1; i < dec.chi.size(); ++i) CHECK(dec.chi[i] < dec.chi[i - 1]);
}

TEST_CASE("chi window doubles until the limits classify")
{
    const FlowTrajectory traj = integrate_chi(1e-3, -2.0, 2.0, 1000);
    CHECK(traj.backward == ChiLimit::lower);
    CHECK(traj.forward == ChiLimit::half);
    CHECK(traj.s_grid.back() >= 16.0); // the initial window cannot classify; 2 -> 4 -> 8 -> 16
}

TEST_CASE("chi integration validates its arguments")
{
    CHECK_THROWS_AS(integrate_chi(-0.1, -1.0, 1.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(integrate_chi(1.0, -1.0, 1.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(integrate_chi(0.25, 1.0, 2.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(integrate_chi(0.25, -1.0, 1.0, 8), std::invalid_argument);
}

TEST_CASE("dense connection values")
{
    for (double s : {-3.0, -0.5, 0.5, 3.0})
        CHECK(connection_value(0.25, s)
              == doctest::Approx(oracles::chi_closed_form(0.25, s)).epsilon(1e-10));
    CHECK(connection_value(0.25, 0.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS(connection_value(0.25, 1.0, -1e-3), std::invalid_argument);
}

TEST_CASE("two connecting orbits with even parity")
{
    for (long long k : {1LL, 2LL, -1LL}) {
        const OrbitCount count = count_connecting_orbits(k);
        CHECK(count.count == 2);
        CHECK(count.parity == 0);
    }
    CHECK_THROWS_AS(count_connecting_orbits(0), std::invalid_argument);
}

TEST_CASE("free hamiltonian orbits close on lattice momenta")
{
    FlatTorus torus(1);
    Hamiltonian h = free_hamiltonian(torus);

    const HamiltonianOrbit lattice = integrate_orbit(
        h, Eigen::VectorXd::Constant(1, 0.3), Eigen::VectorXd::Constant(1, 2.0 * kG), 1000);
    CHECK(lattice.closure_defect < 1e-10);
    CHECK(lattice.positions.back()(0) == doctest::Approx(2.3).epsilon(1e-10));
    CHECK(lattice.energy_drift < 1e-9 * (2.0 * kG));

    const HamiltonianOrbit half = integrate_orbit(
        h, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 1.5 * kG), 1000);
    CHECK(half.closure_defect > 0.1);
    CHECK(half.closure_defect == doctest::Approx(0.5).epsilon(1e-10));

    CHECK_THROWS_AS(
        integrate_orbit(h, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), 50),
        std::invalid_argument);
    CHECK_THROWS_AS(
        integrate_orbit(h, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(1), 1000),
        std::invalid_argument);
}

TEST_CASE("perturbed critical orbits are closed orbits of the pendulum flow")
{
    PendulumPotential pot{1, 0.2};
    Hamiltonian h = pendulum_hamiltonian(pot);
    const HamiltonianOrbit orbit = integrate_orbit(
        h, Eigen::VectorXd::Constant(1, pot.q0), Eigen::VectorXd::Constant(1, kG), 1000);
    CHECK(orbit.closure_defect < 1e-8);
    const double h0 = kG / 2.0 - 1.0;
    CHECK(orbit.energy_drift < 1e-9 * std::abs(h0));
}

TEST_CASE("non-finite steps raise the instability error")
{
    Hamiltonian bad;
    bad.value = [](double, const Eigen::VectorXd&, const Eigen::VectorXd&) { return 0.0; };
    bad.grad_u = [](double, const Eigen::VectorXd& u, const Eigen::VectorXd&) {
        return Eigen::VectorXd::Constant(u.size(), std::numeric_limits<double>::quiet_NaN()).eval();
    };
    bad.grad_v = [](double, const Eigen::VectorXd&, const Eigen::VectorXd& v) { return v; };
    CHECK_THROWS_AS(
        integrate_orbit(bad, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), 200),
        instability_error);
}

TEST_CASE("stationary cylinder stays on the attracting orbit")
{
    LoopSample sink = make_ansatz_loop(1, 0.3, 0.5, 0.0, 64);
    const CylinderGrid grid = solve_cylinder(1, 0.3, sink, 5.0, 64, 1e-3);
    CHECK(grid.residual < 1e-10);
    REQUIRE(!grid.w.empty());
    REQUIRE(grid.w.size() == grid.s_grid.size());
    CHECK(grid.s_grid.front() == 0.0);
    CHECK(grid.s_grid.back() == doctest::Approx(5.0).epsilon(1e-12));
    for (size_t i = 0; i < grid.w.size(); ++i) CHECK(slice_defect(grid, i) < 1e-12);
    const double sink_energy = 2.0 * kPi * kPi - 1.0;
    for (double e : grid.energies) CHECK(e == doctest::Approx(sink_energy).epsilon(1e-10));
}

TEST_CASE("t-constant data reduces the PDE to the connection ODE")
{
    LoopSample w0 = make_ansatz_loop(1, 0.0, 0.25, 0.0, 64);
    const CylinderGrid grid = solve_cylinder(1, 0.0, w0, 10.0, 64, 1e-3);
    double worst = 0.0;
    for (size_t i = 0; i < grid.s_grid.size(); ++i) {
        const double chi = grid.w[i][0] - grid.k * grid.t_grid[0] - grid.q0 + 0.0;
        const double ref = connection_value(0.25, grid.s_grid[i], 2.5e-4);
        worst = std::max(worst, std::abs(chi - ref));
    }
    CHECK(worst < 1e-6);

    // Heun time stepping: halving the step divides the defect by about four.
    const CylinderGrid coarse = solve_cylinder(1, 0.0, w0, 4.0, 32, 4e-3);
    const CylinderGrid fine = solve_cylinder(1, 0.0, w0, 4.0, 32, 2e-3);
    const auto ode_error = [](const CylinderGrid& g) {
        double worst_err = 0.0;
        for (size_t i = 0; i < g.s_grid.size(); ++i) {
            const double chi = g.w[i][0] - g.k * g.t_grid[0] - g.q0;
            worst_err = std::max(worst_err,
                                 std::abs(chi - connection_value(0.25, g.s_grid[i], 1e-4)));
        }
        return worst_err;
    };
    const double e_coarse = ode_error(coarse);
    const double e_fine = ode_error(fine);
    const double order = std::log2(e_coarse / e_fine);
    CHECK(order > 1.7);
    CHECK(order < 2.3);
}

TEST_CASE("perturbed initial data flows to the minimum with decreasing energy")
{
    LoopSample w0 = make_ansatz_loop(1, 0.0, 0.3, 0.05, 128);
    const CylinderGrid grid = solve_cylinder(1, 0.0, w0, 15.0, 128, 1e-3);
    CHECK(grid.residual < 1e-4);
    for (size_t i = 1; i < grid.energies.size(); ++i)
        CHECK(grid.energies[i] <= grid.energies[i - 1] + 1e-8);
    CHECK(grid.energies.back() == doctest::Approx(2.0 * kPi * kPi - 1.0).epsilon(1e-6));

    const LoopSample last = cylinder_slice(grid, grid.w.size() - 1);
    CHECK(last.winding() == LatticeVector{1});
    CHECK(perturbed_energy(last, PendulumPotential{1, 0.0})
          == doctest::Approx(grid.energies.back()).epsilon(1e-12));
    CHECK_THROWS_AS(cylinder_slice(grid, grid.w.size()), std::out_of_range);
}

TEST_CASE("cylinder solver validates its inputs")
{
    LoopSample w0 = make_ansatz_loop(1, 0.0, 0.25, 0.0, 64);
    CHECK_THROWS_AS(solve_cylinder(2, 0.0, w0, 5.0, 64, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(solve_cylinder(1, 0.0, w0, 5.0, 3, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(solve_cylinder(1, 0.0, w0, -1.0, 64, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(solve_cylinder(1, 0.0, w0, 5.0, 64, 3.5), std::invalid_argument);
    CHECK_THROWS_AS(solve_cylinder(1, 0.0, w0, 5.0, 64, 0.0), std::invalid_argument);

    LoopSample flat2 = sample_geodesic(FlatTorus(2), {1, 0}, Eigen::VectorXd::Zero(2), 16);
    CHECK_THROWS_AS(solve_cylinder(1, 0.0, flat2, 5.0, 64, 1e-3), unsupported_dimension_error);
}

TEST_CASE("ansatz loops sample the stated lift")
{
    const LoopSample loop = make_ansatz_loop(2, 0.1, 0.25, 0.03, 64);
    CHECK(loop.winding() == LatticeVector{2});
    for (int i = 0; i < 64; ++i) {
        const double t = i / 64.0;
        const double expected = 2.0 * t + 0.1 + 0.25 + 0.03 * std::sin(2.0 * kPi * t);
        CHECK(loop.samples()(i, 0) == doctest::Approx(expected).epsilon(1e-14));
    }
}
