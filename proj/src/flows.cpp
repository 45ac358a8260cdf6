#include "loopmorse/flows.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "loopmorse/errors.hpp"

namespace loopmorse {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLimitTol = 1e-4;

double connection_rhs(double chi) { return std::sin(kTwoPi * chi) / kTwoPi; }

// One RK4 step of chi' = dir * connection_rhs(chi).
double rk4_chi(double chi, double h, double dir)
{
    const double k1 = dir * connection_rhs(chi);
    const double k2 = dir * connection_rhs(chi + 0.5 * h * k1);
    const double k3 = dir * connection_rhs(chi + 0.5 * h * k2);
    const double k4 = dir * connection_rhs(chi + h * k3);
    return chi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

ChiLimit classify_limit(double chi)
{
    if (std::abs(chi) < kLimitTol) return ChiLimit::lower;
    if (std::abs(chi - 0.5) < kLimitTol) return ChiLimit::half;
    if (std::abs(chi - 1.0) < kLimitTol) return ChiLimit::upper;
    return ChiLimit::undetermined;
}

// Constant-coefficient symmetric cyclic tridiagonal solver: diagonal `diag`,
// sub-/super-diagonal and corner entries `off`.  The cyclic corners are
// folded into a rank-one update (Sherman-Morrison); the remaining tridiagonal
// system is solved by the Thomas algorithm with precomputed factors.
class CyclicThomas {
public:
    CyclicThomas(int n, double diag, double off)
        : n_(n), off_(off), alpha_(-diag)
    {
        std::vector<double> d(static_cast<size_t>(n), diag);
        d.front() = diag - alpha_;
        d.back() = diag - off * off / alpha_;
        denom_.resize(static_cast<size_t>(n));
        ratio_.resize(static_cast<size_t>(n));
        denom_[0] = d[0];
        ratio_[0] = off / denom_[0];
        for (int i = 1; i < n; ++i) {
            denom_[static_cast<size_t>(i)] = d[static_cast<size_t>(i)] - off * ratio_[static_cast<size_t>(i - 1)];
            ratio_[static_cast<size_t>(i)] = off / denom_[static_cast<size_t>(i)];
        }
        Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
        u(0) = alpha_;
        u(n - 1) = off;
        z_ = tri_solve(u);
        factor_ = 1.0 + z_(0) + (off / alpha_) * z_(n - 1);
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const
    {
        Eigen::VectorXd y = tri_solve(rhs);
        const double s = (y(0) + (off_ / alpha_) * y(n_ - 1)) / factor_;
        return y - s * z_;
    }

private:
    Eigen::VectorXd tri_solve(const Eigen::VectorXd& r) const
    {
        Eigen::VectorXd x(n_);
        x(0) = r(0) / denom_[0];
        for (int i = 1; i < n_; ++i)
            x(i) = (r(i) - off_ * x(i - 1)) / denom_[static_cast<size_t>(i)];
        for (int i = n_ - 2; i >= 0; --i)
            x(i) -= ratio_[static_cast<size_t>(i)] * x(i + 1);
        return x;
    }

    int n_;
    double off_;
    double alpha_;
    double factor_;
    std::vector<double> denom_;
    std::vector<double> ratio_;
    Eigen::VectorXd z_;
};

// Piecewise-linear resample of a one-dimensional lift onto n uniform points.
Eigen::VectorXd resample_lift(const LoopSample& loop, int n)
{
    const long long m = loop.size();
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
        const double pos = static_cast<double>(i) / n * static_cast<double>(m);
        const auto i0 = static_cast<long long>(std::floor(pos));
        const double frac = pos - static_cast<double>(i0);
        out(i) = (1.0 - frac) * loop.sample_wrapped(i0)(0) + frac * loop.sample_wrapped(i0 + 1)(0);
    }
    return out;
}

}  // namespace

HamiltonianOrbit integrate_orbit(const Hamiltonian& h,
                                 const Eigen::VectorXd& u0,
                                 const Eigen::VectorXd& v0,
                                 int steps)
{
    if (steps < 100) throw std::invalid_argument("integrate_orbit: need at least 100 steps");
    if (u0.size() != v0.size() || u0.size() < 1)
        throw std::invalid_argument("integrate_orbit: u0 and v0 must have equal positive dimension");

    const double dt = 1.0 / steps;
    HamiltonianOrbit orbit;
    orbit.positions.reserve(static_cast<size_t>(steps) + 1);
    orbit.covectors.reserve(static_cast<size_t>(steps) + 1);
    orbit.positions.push_back(u0);
    orbit.covectors.push_back(v0);

    Eigen::VectorXd u = u0, v = v0;
    const auto slope_u = [&h](double t, const Eigen::VectorXd& uu, const Eigen::VectorXd& vv) { return h.dv(t, uu, vv); };
    const auto slope_v = [&h](double t, const Eigen::VectorXd& uu, const Eigen::VectorXd& vv) {
        return Eigen::VectorXd(-h.du(t, uu, vv));
    };

    for (int i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const Eigen::VectorXd ku1 = slope_u(t, u, v), kv1 = slope_v(t, u, v);
        const Eigen::VectorXd ku2 = slope_u(t + 0.5 * dt, u + 0.5 * dt * ku1, v + 0.5 * dt * kv1);
        const Eigen::VectorXd kv2 = slope_v(t + 0.5 * dt, u + 0.5 * dt * ku1, v + 0.5 * dt * kv1);
        const Eigen::VectorXd ku3 = slope_u(t + 0.5 * dt, u + 0.5 * dt * ku2, v + 0.5 * dt * kv2);
        const Eigen::VectorXd kv3 = slope_v(t + 0.5 * dt, u + 0.5 * dt * ku2, v + 0.5 * dt * kv2);
        const Eigen::VectorXd ku4 = slope_u(t + dt, u + dt * ku3, v + dt * kv3);
        const Eigen::VectorXd kv4 = slope_v(t + dt, u + dt * ku3, v + dt * kv3);
        u += dt / 6.0 * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4);
        v += dt / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
        if (!u.allFinite() || !v.allFinite()) {
            std::ostringstream msg;
            msg << "integrate_orbit: non-finite state at t = " << (static_cast<double>(i) + 1.0) * dt
                << " with dt = " << dt;
            throw instability_error(msg.str());
        }
        orbit.positions.push_back(u);
        orbit.covectors.push_back(v);
    }

    double du = 0.0;
    for (Eigen::Index j = 0; j < u0.size(); ++j) {
        const double gap = u(j) - u0(j);
        du = std::max(du, std::abs(gap - std::round(gap)));
    }
    const double dv = (v - v0).cwiseAbs().maxCoeff();
    orbit.closure_defect = std::max(du, dv);

    const double h0 = h.value(0.0, u0, v0);
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        orbit.energy_drift = std::max(
            orbit.energy_drift,
            std::abs(h.value(t, orbit.positions[static_cast<size_t>(i)], orbit.covectors[static_cast<size_t>(i)]) - h0));
    }
    return orbit;
}

const char* chi_limit_label(ChiLimit limit)
{
    switch (limit) {
        case ChiLimit::lower: return "0";
        case ChiLimit::half: return "0.5";
        case ChiLimit::upper: return "1";
        case ChiLimit::undetermined: return "none";
    }
    return "none";
}

FlowTrajectory integrate_chi(double chi0, double s_min, double s_max, int steps)
{
    if (chi0 < 0.0 || chi0 >= 1.0) throw std::invalid_argument("integrate_chi: chi0 must lie in [0, 1)");
    if (s_min > 0.0 || s_max < 0.0 || s_min >= s_max)
        throw std::invalid_argument("integrate_chi: need s_min <= 0 <= s_max with s_min < s_max");
    if (steps < 16) throw std::invalid_argument("integrate_chi: too few steps");

    FlowTrajectory traj;
    for (int attempt = 0; attempt <= 4; ++attempt) {
        const double h = (s_max - s_min) / steps;
        const int n_back = s_min < 0.0 ? std::max(1, static_cast<int>(std::llround(-s_min / h))) : 0;
        const int n_fwd = s_max > 0.0 ? std::max(1, static_cast<int>(std::llround(s_max / h))) : 0;
        const double h_back = n_back > 0 ? -s_min / n_back : 0.0;
        const double h_fwd = n_fwd > 0 ? s_max / n_fwd : 0.0;

        std::vector<double> back(static_cast<size_t>(n_back) + 1);
        back[0] = chi0;
        for (int i = 0; i < n_back; ++i)
            back[static_cast<size_t>(i) + 1] = rk4_chi(back[static_cast<size_t>(i)], h_back, -1.0);

        traj.s_grid.assign(static_cast<size_t>(n_back) + static_cast<size_t>(n_fwd) + 1, 0.0);
        traj.chi.assign(traj.s_grid.size(), 0.0);
        for (int i = 0; i <= n_back; ++i) {
            traj.s_grid[static_cast<size_t>(n_back - i)] = -h_back * i;
            traj.chi[static_cast<size_t>(n_back - i)] = back[static_cast<size_t>(i)];
        }
        double chi = chi0;
        for (int i = 1; i <= n_fwd; ++i) {
            chi = rk4_chi(chi, h_fwd, 1.0);
            traj.s_grid[static_cast<size_t>(n_back + i)] = h_fwd * i;
            traj.chi[static_cast<size_t>(n_back + i)] = chi;
        }

        traj.backward = classify_limit(traj.chi.front());
        traj.forward = classify_limit(traj.chi.back());
        if (traj.backward != ChiLimit::undetermined && traj.forward != ChiLimit::undetermined) break;
        s_min *= 2.0;
        s_max *= 2.0;
        steps *= 2;
    }
    return traj;
}

double connection_value(double chi0, double s, double step)
{
    if (step <= 0.0) throw std::invalid_argument("connection_value: step must be positive");
    if (s == 0.0) return chi0;
    const auto n = std::max<long long>(1, static_cast<long long>(std::ceil(std::abs(s) / step)));
    const double h = std::abs(s) / static_cast<double>(n);
    const double dir = s > 0.0 ? 1.0 : -1.0;
    double chi = chi0;
    for (long long i = 0; i < n; ++i) chi = rk4_chi(chi, h, dir);
    return chi;
}

OrbitCount count_connecting_orbits(long long k, double q0)
{
    if (k == 0) throw std::invalid_argument("count_connecting_orbits: requires k != 0");
    (void)q0;   // the deviation equation is independent of the base point

    OrbitCount result;
    for (const double chi0 : {0.25, 0.75}) {
        const FlowTrajectory traj = integrate_chi(chi0);
        const bool from_reference = traj.backward == ChiLimit::lower || traj.backward == ChiLimit::upper;
        if (from_reference && traj.forward == ChiLimit::half) ++result.count;
    }
    result.parity = result.count % 2;
    return result;
}

CylinderGrid solve_cylinder(long long k, double q0, const LoopSample& w0,
                            double s_max, int t_points, double s_step, int store_stride)
{
    if (w0.dim() != 1)
        throw unsupported_dimension_error("solve_cylinder: implemented for one-dimensional tori");
    if (w0.winding()[0] != k)
        throw std::invalid_argument("solve_cylinder: initial loop winding must equal k");
    if (t_points < 4) throw std::invalid_argument("solve_cylinder: need at least 4 t points");
    if (s_max <= 0.0) throw std::invalid_argument("solve_cylinder: s_max must be positive");
    if (s_step <= 0.0 || s_step > std::numbers::pi)
        throw std::invalid_argument("solve_cylinder: s_step must lie in (0, pi]");

    const int n = t_points;
    const double h = 1.0 / n;
    const auto n_steps = static_cast<long long>(std::ceil(s_max / s_step - 1e-12));
    const double ds = s_max / static_cast<double>(n_steps);
    const long long stride = store_stride > 0
        ? store_stride
        : std::max<long long>(1, static_cast<long long>(std::llround(static_cast<double>(n_steps) / 300.0)));

    // Deviation phi(s, t) = w(s, t) - k t - q0, periodic in t.
    Eigen::VectorXd phi(n);
    const Eigen::VectorXd lift = resample_lift(w0, n);
    for (int i = 0; i < n; ++i)
        phi(i) = lift(i) - static_cast<double>(k) * (static_cast<double>(i) * h) - q0;

    const double c2 = ds / (2.0 * h * h);
    const CyclicThomas solver(n, 1.0 + 2.0 * c2, -c2);

    const auto apply_half_diffusion = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd out(n);
        for (int i = 0; i < n; ++i) {
            const double left = x((i + n - 1) % n), right = x((i + 1) % n);
            out(i) = (1.0 - 2.0 * c2) * x(i) + c2 * (left + right);
        }
        return out;
    };
    const auto nonlinearity = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd out(n);
        for (int i = 0; i < n; ++i) out(i) = connection_rhs(x(i));
        return out;
    };

    CylinderGrid grid;
    grid.k = k;
    grid.q0 = q0;
    grid.t_grid.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) grid.t_grid[static_cast<size_t>(i)] = static_cast<double>(i) * h;

    const PendulumPotential pot{k, q0};
    const FlatTorus circle(1);
    const auto store_slice = [&](double s, const Eigen::VectorXd& p) {
        grid.s_grid.push_back(s);
        std::vector<double> row(static_cast<size_t>(n));
        Eigen::MatrixXd samples(n, 1);
        for (int i = 0; i < n; ++i) {
            const double w = p(i) + static_cast<double>(k) * (static_cast<double>(i) * h) + q0;
            row[static_cast<size_t>(i)] = w;
            samples(i, 0) = w;
        }
        grid.w.push_back(std::move(row));
        grid.energies.push_back(perturbed_energy(LoopSample::make(circle, samples, {k}), pot));
    };

    store_slice(0.0, phi);
    for (long long step = 1; step <= n_steps; ++step) {
        const Eigen::VectorXd base = apply_half_diffusion(phi);
        const Eigen::VectorXd f0 = nonlinearity(phi);
        const Eigen::VectorXd predictor = solver.solve(base + ds * f0);
        phi = solver.solve(base + 0.5 * ds * (f0 + nonlinearity(predictor)));
        if (!phi.allFinite()) {
            std::ostringstream msg;
            msg << "solve_cylinder: non-finite slice at s = " << static_cast<double>(step) * ds
                << " (s_step = " << ds << ", t step = " << h << ")";
            throw instability_error(msg.str());
        }
        if (step % stride == 0 || step == n_steps)
            store_slice(static_cast<double>(step) * ds, phi);
    }

    grid.residual = 0.0;
    for (int i = 0; i < n; ++i)
        grid.residual = std::max(grid.residual, std::abs(std::remainder(phi(i) - 0.5, 1.0)));
    return grid;
}

LoopSample cylinder_slice(const CylinderGrid& grid, int slice)
{
    if (slice < 0 || static_cast<size_t>(slice) >= grid.w.size())
        throw std::out_of_range("cylinder_slice: slice index out of range");
    const auto n = static_cast<Eigen::Index>(grid.t_grid.size());
    Eigen::MatrixXd samples(n, 1);
    for (Eigen::Index i = 0; i < n; ++i)
        samples(i, 0) = grid.w[static_cast<size_t>(slice)][static_cast<size_t>(i)];
    return LoopSample::make(FlatTorus(1), samples, {grid.k});
}

LoopSample make_ansatz_loop(long long k, double q0, double offset, double amplitude, int samples)
{
    Eigen::MatrixXd lift(samples, 1);
    for (int i = 0; i < samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        lift(i, 0) = static_cast<double>(k) * t + q0 + offset + amplitude * std::sin(kTwoPi * t);
    }
    return LoopSample::make(FlatTorus(1), lift, {k});
}

}  // namespace loopmorse
