#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "loopmorse/torus.hpp"
#include "oracles.hpp"

using namespace loopmorse;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kG = 4.0 * kPi * kPi;

LoopSample oscillating_loop(int N)
{
    FlatTorus torus(1);
    Eigen::MatrixXd samples(N, 1);
    for (int i = 0; i < N; ++i) {
        const double t = static_cast<double>(i) / N;
        samples(i, 0) = t + 0.1 * std::sin(2.0 * kPi * t);
    }
    return LoopSample::make(torus, samples, {1});
}

LoopSample random_loop(std::mt19937& rng, const FlatTorus& torus, int N)
{
    std::uniform_real_distribution<double> coeff(-0.05, 0.05);
    std::uniform_int_distribution<long long> wind(-1, 1);
    Eigen::MatrixXd samples(N, torus.dim);
    LatticeVector k(torus.dim);
    for (int c = 0; c < torus.dim; ++c) {
        k[c] = wind(rng);
        const double q = coeff(rng), a1 = coeff(rng), b1 = coeff(rng), a2 = coeff(rng);
        for (int i = 0; i < N; ++i) {
            const double t = static_cast<double>(i) / N;
            samples(i, c) = k[c] * t + q + a1 * std::cos(2.0 * kPi * t) + b1 * std::sin(2.0 * kPi * t)
                          + a2 * std::sin(4.0 * kPi * t);
        }
    }
    return LoopSample::make(torus, samples, k);
}

} // namespace

TEST_CASE("flat torus metric and validation")
{
    FlatTorus t2(2);
    CHECK(t2.dim == 2);
    CHECK(t2.metric_scale == doctest::Approx(kG).epsilon(1e-15));
    CHECK_THROWS_AS(FlatTorus(0), std::invalid_argument);
    CHECK_THROWS_AS(FlatTorus(-1), std::invalid_argument);
}

TEST_CASE("loop construction rejects malformed lifts")
{
    FlatTorus torus(1);

    Eigen::MatrixXd jump(4, 1);
    jump << 0.0, 0.6, 0.7, 0.8; // first step is 0.6 >= 1/2
    CHECK_THROWS_AS(LoopSample::make(torus, jump, {1}), malformed_lift_error);

    Eigen::MatrixXd fine(4, 1);
    fine << 0.0, 0.25, 0.5, 0.75;
    CHECK_NOTHROW(LoopSample::make(torus, fine, {1}));
    // Claiming the wrong winding puts the wrap step at a full unit.
    CHECK_THROWS_AS(LoopSample::make(torus, fine, {2}), malformed_lift_error);
    CHECK_THROWS_AS(LoopSample::make(torus, fine, {0}), malformed_lift_error);

    Eigen::MatrixXd tiny(3, 1);
    tiny << 0.0, 0.3, 0.6;
    CHECK_THROWS_AS(LoopSample::make(torus, tiny, {1}), std::invalid_argument);

    CHECK_THROWS_AS(LoopSample::make(FlatTorus(2), fine, {1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(LoopSample::make(torus, fine, {1, 0}), std::invalid_argument);
}

TEST_CASE("winding inference and the half-integer ambiguity")
{
    FlatTorus torus(1);
    const int N = 8;
    Eigen::MatrixXd samples(N, 1);
    for (int i = 0; i < N; ++i) samples(i, 0) = 2.0 * i / N + 0.125;
    LoopSample loop = LoopSample::from_samples(torus, samples);
    CHECK(loop.winding() == LatticeVector{2});
    CHECK(winding_vector(loop) == LatticeVector{2});

    // Period gap of exactly 1/2: no nearest integer, must refuse.
    Eigen::MatrixXd halfgap(8, 1);
    for (int i = 0; i < 8; ++i) halfgap(i, 0) = 0.5 * i / 7;
    CHECK_THROWS_AS(LoopSample::from_samples(torus, halfgap), malformed_lift_error);
}

TEST_CASE("periodic lift extension")
{
    FlatTorus torus(1);
    LoopSample loop = sample_geodesic(torus, {2}, Eigen::VectorXd::Constant(1, 0.3), 16);
    for (long long i : {-17LL, -1LL, 0LL, 5LL, 16LL, 35LL}) {
        const double direct = loop.sample_wrapped(i)(0);
        const double base = loop.samples()(static_cast<int>(((i % 16) + 16) % 16), 0);
        const double shift = 2.0 * std::floor(static_cast<double>(i) / 16.0);
        CHECK(direct == doctest::Approx(base + shift).epsilon(1e-14));
    }
}

TEST_CASE("energy is exact on geodesic loops")
{
    std::mt19937 rng(7101);
    std::uniform_real_distribution<double> offset(-1.0, 1.0);
    for (int n = 1; n <= 3; ++n) {
        FlatTorus torus(n);
        std::vector<LatticeVector> ks;
        if (n == 1) ks = {{0}, {1}, {-2}, {3}};
        if (n == 2) ks = {{0, 0}, {1, 0}, {2, -1}, {3, 3}};
        if (n == 3) ks = {{1, 0, 0}, {-1, 2, 2}, {3, -3, 1}};
        for (const auto& k : ks) {
            Eigen::VectorXd q(n);
            for (int c = 0; c < n; ++c) q(c) = offset(rng);
            LoopSample loop = sample_geodesic(torus, k, q, 64);
            const double expected = 2.0 * kPi * kPi * norm_sq(k);
            CHECK(energy(loop) == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("energy discretization error is second order on an oscillating loop")
{
    const double exact = 2.0 * kPi * kPi * (1.0 + 0.02 * kPi * kPi);
    const double e512 = std::abs(energy(oscillating_loop(512)) - exact);
    const double e1024 = std::abs(energy(oscillating_loop(1024)) - exact);
    const double e8192 = std::abs(energy(oscillating_loop(8192)) - exact);

    // Centered differences are O(h^2): the error at N = 512 sits near 2e-4
    // and falls by 4x per refinement; only at N = 8192 does it cross 1e-6.
    CHECK(e512 > 1e-4);
    CHECK(e512 < 3e-4);
    CHECK(e512 / e1024 == doctest::Approx(4.0).epsilon(0.05));
    CHECK(e8192 < 1e-6);
}

TEST_CASE("perturbed energy shifts the two pendulum loops by one")
{
    FlatTorus torus(1);
    PendulumPotential pot{2, 0.3};
    const double base = 2.0 * kPi * kPi * 4.0;

    Eigen::MatrixXd minus(128, 1), plus(128, 1);
    for (int i = 0; i < 128; ++i) {
        const double t = i / 128.0;
        minus(i, 0) = 2.0 * t + 0.3;
        plus(i, 0) = 2.0 * t + 0.8;
    }
    CHECK(perturbed_energy(LoopSample::make(torus, minus, {2}), pot)
          == doctest::Approx(base + 1.0).epsilon(1e-12));
    CHECK(perturbed_energy(LoopSample::make(torus, plus, {2}), pot)
          == doctest::Approx(base - 1.0).epsilon(1e-12));

    LoopSample flat2 = sample_geodesic(FlatTorus(2), {1, 0}, Eigen::VectorXd::Zero(2), 16);
    CHECK_THROWS_AS(perturbed_energy(flat2, pot), unsupported_dimension_error);
}

TEST_CASE("symplectic action of free orbits equals geodesic energy")
{
    for (int n = 1; n <= 3; ++n) {
        FlatTorus torus(n);
        Hamiltonian h = free_hamiltonian(torus);
        LatticeVector k(n, 0);
        k[0] = 2;
        if (n > 1) k[n - 1] = -1;
        PhaseLoopSample orbit = make_free_orbit(torus, k, Eigen::VectorXd::Constant(n, 0.2), 96);
        const double expected = 2.0 * kPi * kPi * norm_sq(k);
        CHECK(symplectic_action(orbit, h) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(symplectic_action(orbit, h) == doctest::Approx(energy(orbit.base())).epsilon(1e-12));
    }
}

TEST_CASE("symplectic action with an oscillating covector")
{
    // u = t, v = 4 pi^2 + sin(2 pi t): the trapezoid sums are exact, giving
    // 2 pi^2 - 1/(16 pi^2) independent of the grid size.
    FlatTorus torus(1);
    Hamiltonian h = free_hamiltonian(torus);
    const double expected = 2.0 * kPi * kPi - 1.0 / (16.0 * kPi * kPi);
    for (int N : {64, 256, 1024}) {
        Eigen::MatrixXd u(N, 1), v(N, 1);
        for (int i = 0; i < N; ++i) {
            const double t = static_cast<double>(i) / N;
            u(i, 0) = t;
            v(i, 0) = kG + std::sin(2.0 * kPi * t);
        }
        PhaseLoopSample z = PhaseLoopSample::make(LoopSample::make(torus, u, {1}), v);
        CHECK(symplectic_action(z, h) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("symplectic action of the perturbed orbits matches the perturbed energy")
{
    FlatTorus torus(1);
    PendulumPotential pot{1, 0.25};
    Hamiltonian h = pendulum_hamiltonian(pot);
    const int N = 256;
    for (double shift : {0.0, 0.5}) {
        Eigen::MatrixXd u(N, 1);
        for (int i = 0; i < N; ++i) u(i, 0) = static_cast<double>(i) / N + 0.25 + shift;
        LoopSample base = LoopSample::make(torus, u, {1});
        PhaseLoopSample orbit = PhaseLoopSample::make(base, Eigen::MatrixXd::Constant(N, 1, kG));
        CHECK(symplectic_action(orbit, h)
              == doctest::Approx(perturbed_energy(base, pot)).epsilon(1e-12));
    }
}

TEST_CASE("phase loop construction checks shapes")
{
    FlatTorus torus(1);
    LoopSample base = sample_geodesic(torus, {1}, Eigen::VectorXd::Zero(1), 16);
    CHECK_THROWS_AS(PhaseLoopSample::make(base, Eigen::MatrixXd::Zero(8, 1)), std::invalid_argument);
    CHECK_THROWS_AS(PhaseLoopSample::make(base, Eigen::MatrixXd::Zero(16, 2)), std::invalid_argument);
}

TEST_CASE("h1 distance anchors")
{
    FlatTorus torus(1);
    const int N = 512;
    LoopSample zero = sample_geodesic(torus, {0}, Eigen::VectorXd::Zero(1), N);
    LoopSample half = sample_geodesic(torus, {0}, Eigen::VectorXd::Constant(1, 0.5), N);
    CHECK(h1_distance(zero, half) == doctest::Approx(2.0).epsilon(1e-12));

    LoopSample g0 = sample_geodesic(torus, {1}, Eigen::VectorXd::Zero(1), N);
    LoopSample g4 = sample_geodesic(torus, {1}, Eigen::VectorXd::Constant(1, 0.25), N);
    CHECK(h1_distance(g0, g4) == doctest::Approx(std::sqrt(2.0 + 8.0 * kPi * kPi)).epsilon(1e-12));
}

TEST_CASE("h1 distance is a gauge-invariant metric")
{
    std::mt19937 rng(2218);
    FlatTorus torus(2);
    const int N = 64;
    for (int trial = 0; trial < 10; ++trial) {
        LoopSample a = random_loop(rng, torus, N);
        LoopSample b = random_loop(rng, torus, N);
        LoopSample c = random_loop(rng, torus, N);
        CHECK(h1_distance(a, a) == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(h1_distance(a, b) == doctest::Approx(h1_distance(b, a)).epsilon(1e-12));
        CHECK(h1_distance(a, c) <= h1_distance(a, b) + h1_distance(b, c) + 1e-12);

        // Integer shifts of the lift are the same loop on the torus; the
        // distance only sees them through cos(2 pi k), so roundoff leaves a
        // square-root-of-epsilon residue.
        LoopSample shifted =
            LoopSample::make(torus, (a.samples().array() + 1.0).matrix(), a.winding());
        CHECK(h1_distance(a, shifted) < 1e-6);
    }
    CHECK_THROWS_AS(
        h1_distance(random_loop(rng, torus, N), random_loop(rng, torus, 2 * N)),
        std::invalid_argument);
}

TEST_CASE("cyclic shift preserves the loop")
{
    LoopSample loop = oscillating_loop(64);
    LoopSample shifted = cyclic_shift(loop, 17);
    CHECK(shifted.winding() == loop.winding());
    CHECK(energy(shifted) == doctest::Approx(energy(loop)).epsilon(1e-13));
    for (int i = 0; i < 8; ++i)
        CHECK(shifted.samples()(i, 0)
              == doctest::Approx(loop.sample_wrapped(i + 17)(0)).epsilon(1e-14));
    CHECK(h1_distance(loop, shifted) > 0.01); // rotated in time, a genuinely different loop
}

TEST_CASE("pendulum potential value and metric gradient")
{
    PendulumPotential pot{3, 0.4};
    CHECK(pot.value(0.0, 0.4) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(pot.value(0.0, 0.9) == doctest::Approx(1.0).epsilon(1e-15));
    std::mt19937 rng(5005);
    std::uniform_real_distribution<double> pt(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double t = pt(rng), u = pt(rng), h = 1e-6;
        const double fd = (pot.value(t, u + h) - pot.value(t, u - h)) / (2.0 * h);
        // gradient() is taken with respect to the scaled metric g = (2 pi)^2.
        CHECK(kG * pot.gradient(t, u) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("hamiltonian finite-difference fallback matches analytic gradients")
{
    PendulumPotential pot{1, 0.1};
    Hamiltonian analytic = pendulum_hamiltonian(pot);
    Hamiltonian fd{analytic.value, nullptr, nullptr, 1e-6};
    std::mt19937 rng(303);
    std::uniform_real_distribution<double> pt(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double t = pt(rng);
        Eigen::VectorXd u = Eigen::VectorXd::Constant(1, pt(rng));
        Eigen::VectorXd v = Eigen::VectorXd::Constant(1, kG * pt(rng));
        CHECK((fd.du(t, u, v) - analytic.du(t, u, v)).norm() < 1e-5);
        CHECK((fd.dv(t, u, v) - analytic.dv(t, u, v)).norm() < 1e-5);
    }
}
