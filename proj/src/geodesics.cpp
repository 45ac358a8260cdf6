#include "loopmorse/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace loopmorse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kTwoPiSq = 2.0 * std::numbers::pi * std::numbers::pi;

void enumerate_rec(int coord, int n, double budget_sq, LatticeVector& current,
                   std::vector<LatticeVector>& out)
{
    if (coord == n) {
        out.push_back(current);
        return;
    }
    const long long bound = static_cast<long long>(std::floor(std::sqrt(std::max(0.0, budget_sq))));
    for (long long c = -bound; c <= bound; ++c) {
        const double used = static_cast<double>(c * c);
        if (used > budget_sq) continue;
        current[static_cast<size_t>(coord)] = c;
        enumerate_rec(coord + 1, n, budget_sq - used, current, out);
    }
    current[static_cast<size_t>(coord)] = 0;
}

} // namespace

std::vector<GeodesicComponent> enumerate_components(const FlatTorus& torus, double action_bound)
{
    std::vector<GeodesicComponent> components;
    if (action_bound < 0.0) return components;

    // 2*pi^2*|k|^2 <= a  <=>  |k|^2 <= a / (2*pi^2)
    const double budget_sq = action_bound / kTwoPiSq;
    std::vector<LatticeVector> vectors;
    LatticeVector current(static_cast<size_t>(torus.dim), 0);
    enumerate_rec(0, torus.dim, budget_sq, current, vectors);

    // The recursion with a floating budget can be off by a rounding error at
    // the boundary; re-test with the same expression used for energies.
    vectors.erase(std::remove_if(vectors.begin(), vectors.end(),
                                 [&](const LatticeVector& k) {
                                     return !(kTwoPiSq * static_cast<double>(norm_sq(k)) <= action_bound);
                                 }),
                  vectors.end());
    std::sort(vectors.begin(), vectors.end());

    components.reserve(vectors.size());
    for (auto& k : vectors) {
        GeodesicComponent c;
        c.energy_value = kTwoPiSq * static_cast<double>(norm_sq(k));
        c.k = std::move(k);
        c.dim_component = torus.dim;
        c.morse_index = 0;
        c.nullity = torus.dim;
        components.push_back(std::move(c));
    }
    return components;
}

double geodesic_residual(const LoopSample& loop)
{
    const int N = loop.size();
    const int n = loop.dim();
    const double invh2 = static_cast<double>(N) * static_cast<double>(N);
    double worst = 0.0;
    for (int i = 0; i < N; ++i) {
        const Eigen::RowVectorXd fwd = loop.sample_wrapped(i + 1);
        const Eigen::RowVectorXd mid = loop.sample_wrapped(i);
        const Eigen::RowVectorXd bwd = loop.sample_wrapped(i - 1);
        for (int j = 0; j < n; ++j) {
            const double acc = (fwd(j) - 2.0 * mid(j) + bwd(j)) * invh2;
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

SpectrumReport jacobi_spectrum(const FlatTorus& torus, int mode_cutoff)
{
    if (mode_cutoff < 0) throw std::invalid_argument("jacobi_spectrum: negative mode cutoff");
    SpectrumReport report;
    report.eigenvalues.emplace_back(0.0, torus.dim);
    for (int l = 1; l <= mode_cutoff; ++l) {
        const double lam = 4.0 * std::numbers::pi * std::numbers::pi * static_cast<double>(l) * static_cast<double>(l);
        report.eigenvalues.emplace_back(lam, 2 * torus.dim);
    }
    report.kernel_dim = torus.dim;
    report.negative_count = 0;
    return report;
}

SpectrumReport perturbed_jacobi_spectrum(PerturbedSign sign, int mode_cutoff)
{
    if (mode_cutoff < 0) throw std::invalid_argument("perturbed_jacobi_spectrum: negative mode cutoff");
    const double shift = (sign == PerturbedSign::minus) ? -1.0 : 1.0;
    SpectrumReport report;
    report.eigenvalues.emplace_back(shift, 1);
    for (int l = 1; l <= mode_cutoff; ++l) {
        const double lam = 4.0 * std::numbers::pi * std::numbers::pi * static_cast<double>(l) * static_cast<double>(l) + shift;
        report.eigenvalues.emplace_back(lam, 2);
    }
    report.kernel_dim = 0;
    report.negative_count = (sign == PerturbedSign::minus) ? 1 : 0;
    return report;
}

PerturbedCriticalPair perturbed_critical_points(long long k, double q0, int N)
{
    if (k == 0)
        throw std::invalid_argument("perturbed_critical_points: winding must be nonzero");

    const FlatTorus circle(1);
    const LatticeVector kv{k};
    Eigen::VectorXd q_minus(1), q_plus(1);
    q_minus(0) = q0;
    q_plus(0) = q0 + 0.5;

    PerturbedCriticalPair pair{
        sample_geodesic(circle, kv, q_minus, N),
        sample_geodesic(circle, kv, q_plus, N),
        {1, 0},
        {0.0, 0.0},
        {0.0, 0.0},
        PendulumPotential{k, q0},
    };
    const double base = kTwoPiSq * static_cast<double>(k * k);
    pair.actions = {base + 1.0, base - 1.0};
    pair.residuals = {perturbed_residual(pair.gamma_minus, pair.potential),
                      perturbed_residual(pair.gamma_plus, pair.potential)};
    return pair;
}

double perturbed_residual(const LoopSample& loop, const PendulumPotential& pot)
{
    if (loop.dim() != 1)
        throw unsupported_dimension_error("perturbed_residual: pendulum potential lives on the circle");
    const int N = loop.size();
    const double invh2 = static_cast<double>(N) * static_cast<double>(N);
    double worst = 0.0;
    for (int i = 0; i < N; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(N);
        const double fwd = loop.sample_wrapped(i + 1)(0);
        const double mid = loop.samples()(i, 0);
        const double bwd = loop.sample_wrapped(i - 1)(0);
        const double acc = (fwd - 2.0 * mid + bwd) * invh2;
        const double defect = -acc - pot.gradient(t, mid);
        worst = std::max(worst, std::abs(defect));
    }
    return worst;
}

} // namespace loopmorse
