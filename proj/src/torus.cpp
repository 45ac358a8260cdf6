#include "loopmorse/torus.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace loopmorse {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double round_to_int(double x) { return std::nearbyint(x); }

} // namespace

long long norm_sq(const LatticeVector& k)
{
    long long s = 0;
    for (long long c : k) s += c * c;
    return s;
}

FlatTorus::FlatTorus(int n)
    : dim(n), metric_scale(kTwoPi * kTwoPi)
{
    if (n < 1) throw std::invalid_argument("FlatTorus: dimension must be positive");
}

LoopSample::LoopSample(FlatTorus torus, Eigen::MatrixXd samples, LatticeVector winding)
    : torus_(torus), samples_(std::move(samples)), winding_(std::move(winding))
{
}

LoopSample LoopSample::make(const FlatTorus& torus, Eigen::MatrixXd samples, LatticeVector winding)
{
    const auto N = samples.rows();
    const auto n = samples.cols();
    if (N < 4) throw std::invalid_argument("LoopSample: need at least 4 samples");
    if (n != torus.dim) throw std::invalid_argument("LoopSample: sample dimension does not match torus");
    if (static_cast<int>(winding.size()) != torus.dim)
        throw std::invalid_argument("LoopSample: winding dimension does not match torus");

    for (Eigen::Index i = 0; i + 1 < N; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(std::abs(samples(i + 1, j) - samples(i, j)) < 0.5))
                throw malformed_lift_error("LoopSample: lift step of 1/2 or more between samples");
        }
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        const double wrap = samples(0, j) + static_cast<double>(winding[j]) - samples(N - 1, j);
        if (!(std::abs(wrap) < 0.5))
            throw malformed_lift_error("LoopSample: wrap step of 1/2 or more; winding inconsistent with samples");
    }
    return LoopSample(torus, std::move(samples), std::move(winding));
}

LoopSample LoopSample::from_samples(const FlatTorus& torus, Eigen::MatrixXd samples)
{
    const auto N = samples.rows();
    const auto n = samples.cols();
    if (N < 4) throw std::invalid_argument("LoopSample: need at least 4 samples");
    if (n != torus.dim) throw std::invalid_argument("LoopSample: sample dimension does not match torus");

    LatticeVector winding(static_cast<size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        const double gap = samples(N - 1, j) - samples(0, j);
        const double k = round_to_int(gap);
        if (std::abs(gap - k) >= 0.5 - 1e-9)
            throw malformed_lift_error("LoopSample: period gap is half-integer up to 1e-9, winding ambiguous");
        winding[static_cast<size_t>(j)] = static_cast<long long>(k);
    }
    return make(torus, std::move(samples), std::move(winding));
}

Eigen::RowVectorXd LoopSample::sample_wrapped(long long i) const
{
    const long long N = size();
    long long q = i / N;
    long long r = i % N;
    if (r < 0) { r += N; q -= 1; }
    Eigen::RowVectorXd out = samples_.row(r);
    if (q != 0) {
        for (int j = 0; j < dim(); ++j)
            out(j) += static_cast<double>(q * winding_[static_cast<size_t>(j)]);
    }
    return out;
}

PhaseLoopSample::PhaseLoopSample(LoopSample base, Eigen::MatrixXd covectors)
    : base_(std::move(base)), covectors_(std::move(covectors))
{
}

PhaseLoopSample PhaseLoopSample::make(LoopSample base, Eigen::MatrixXd covectors)
{
    if (covectors.rows() != base.size() || covectors.cols() != base.dim())
        throw std::invalid_argument("PhaseLoopSample: covector array shape mismatch");
    return PhaseLoopSample(std::move(base), std::move(covectors));
}

double PendulumPotential::value(double t, double u) const
{
    return -std::cos(kTwoPi * (u - static_cast<double>(k) * t - q0));
}

double PendulumPotential::gradient(double t, double u) const
{
    return std::sin(kTwoPi * (u - static_cast<double>(k) * t - q0)) / kTwoPi;
}

Eigen::VectorXd Hamiltonian::du(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& v) const
{
    if (grad_u) return grad_u(t, u, v);
    Eigen::VectorXd g(u.size());
    Eigen::VectorXd up = u;
    for (Eigen::Index j = 0; j < u.size(); ++j) {
        const double uj = u(j);
        up(j) = uj + fd_step;
        const double fp = value(t, up, v);
        up(j) = uj - fd_step;
        const double fm = value(t, up, v);
        up(j) = uj;
        g(j) = (fp - fm) / (2.0 * fd_step);
    }
    return g;
}

Eigen::VectorXd Hamiltonian::dv(double t, const Eigen::VectorXd& u, const Eigen::VectorXd& v) const
{
    if (grad_v) return grad_v(t, u, v);
    Eigen::VectorXd g(v.size());
    Eigen::VectorXd vp = v;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
        const double vj = v(j);
        vp(j) = vj + fd_step;
        const double fp = value(t, u, vp);
        vp(j) = vj - fd_step;
        const double fm = value(t, u, vp);
        vp(j) = vj;
        g(j) = (fp - fm) / (2.0 * fd_step);
    }
    return g;
}

Hamiltonian free_hamiltonian(const FlatTorus& torus)
{
    const double scale = torus.metric_scale;
    Hamiltonian H;
    H.value = [scale](double, const Eigen::VectorXd&, const Eigen::VectorXd& v) {
        return v.squaredNorm() / (2.0 * scale);
    };
    H.grad_u = [](double, const Eigen::VectorXd& u, const Eigen::VectorXd&) {
        return Eigen::VectorXd::Zero(u.size()).eval();
    };
    H.grad_v = [scale](double, const Eigen::VectorXd&, const Eigen::VectorXd& v) {
        return (v / scale).eval();
    };
    return H;
}

Hamiltonian pendulum_hamiltonian(const PendulumPotential& pot)
{
    const FlatTorus circle(1);
    Hamiltonian H = free_hamiltonian(circle);
    auto kinetic_value = H.value;
    auto kinetic_gv = H.grad_v;
    H.value = [pot, kinetic_value](double t, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
        return kinetic_value(t, u, v) + pot.value(t, u(0));
    };
    H.grad_u = [pot](double t, const Eigen::VectorXd& u, const Eigen::VectorXd&) {
        Eigen::VectorXd g(1);
        g(0) = kTwoPi * std::sin(kTwoPi * (u(0) - static_cast<double>(pot.k) * t - pot.q0));
        return g;
    };
    H.grad_v = kinetic_gv;
    return H;
}

LatticeVector winding_vector(const LoopSample& loop)
{
    const auto& u = loop.samples();
    const auto N = u.rows();
    LatticeVector k(static_cast<size_t>(loop.dim()));
    for (int j = 0; j < loop.dim(); ++j) {
        const double gap = u(N - 1, j) - u(0, j);
        const double kj = round_to_int(gap);
        if (std::abs(gap - kj) >= 0.5 - 1e-9)
            throw malformed_lift_error("winding_vector: period gap is half-integer up to 1e-9");
        k[static_cast<size_t>(j)] = static_cast<long long>(kj);
    }
    if (k != loop.winding())
        throw malformed_lift_error("winding_vector: stored winding disagrees with samples");
    return k;
}

double energy(const LoopSample& loop)
{
    const int N = loop.size();
    const int n = loop.dim();
    const double invh = static_cast<double>(N);
    double sum = 0.0;
    for (int i = 0; i < N; ++i) {
        const Eigen::RowVectorXd fwd = loop.sample_wrapped(i + 1);
        const Eigen::RowVectorXd bwd = loop.sample_wrapped(i - 1);
        for (int j = 0; j < n; ++j) {
            const double d = (fwd(j) - bwd(j)) * 0.5 * invh;
            sum += d * d;
        }
    }
    return 0.5 * loop.torus().metric_scale * sum / static_cast<double>(N);
}

double perturbed_energy(const LoopSample& loop, const PendulumPotential& pot)
{
    if (loop.dim() != 1)
        throw unsupported_dimension_error("perturbed_energy: pendulum potential lives on the circle");
    const int N = loop.size();
    double pot_mean = 0.0;
    for (int i = 0; i < N; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(N);
        pot_mean += pot.value(t, loop.samples()(i, 0));
    }
    pot_mean /= static_cast<double>(N);
    return energy(loop) - pot_mean;
}

double symplectic_action(const PhaseLoopSample& z, const Hamiltonian& H)
{
    const int N = z.size();
    const int n = z.dim();
    const double invh = static_cast<double>(N);
    const auto& v = z.covectors();
    double sum = 0.0;
    for (int i = 0; i < N; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(N);
        const Eigen::RowVectorXd fwd = z.base().sample_wrapped(i + 1);
        const Eigen::RowVectorXd bwd = z.base().sample_wrapped(i - 1);
        double pairing = 0.0;
        for (int j = 0; j < n; ++j)
            pairing += v(i, j) * (fwd(j) - bwd(j)) * 0.5 * invh;
        sum += pairing - H.value(t, z.base().samples().row(i).transpose(), v.row(i).transpose());
    }
    return sum / static_cast<double>(N);
}

double h1_distance(const LoopSample& a, const LoopSample& b)
{
    if (a.dim() != b.dim())
        throw std::invalid_argument("h1_distance: dimension mismatch");
    if (a.size() != b.size())
        throw std::invalid_argument("h1_distance: sample count mismatch");

    const int N = a.size();
    const int n = a.dim();
    const double invh = static_cast<double>(N);
    const double scale = a.torus().metric_scale;
    double sum = 0.0;
    for (int i = 0; i < N; ++i) {
        const Eigen::RowVectorXd afwd = a.sample_wrapped(i + 1);
        const Eigen::RowVectorXd abwd = a.sample_wrapped(i - 1);
        const Eigen::RowVectorXd bfwd = b.sample_wrapped(i + 1);
        const Eigen::RowVectorXd bbwd = b.sample_wrapped(i - 1);
        for (int j = 0; j < n; ++j) {
            const double da = (afwd(j) - abwd(j)) * 0.5 * invh;
            const double db = (bfwd(j) - bbwd(j)) * 0.5 * invh;
            const double c = std::cos(kTwoPi * (a.samples()(i, j) - b.samples()(i, j)));
            sum += 2.0 * (1.0 - c);
            sum += scale * (da * da + db * db - 2.0 * da * db * c);
        }
    }
    // Roundoff can push the accumulated square a few ulp below zero when the
    // loops agree up to an integer lift shift.
    return std::sqrt(std::max(0.0, sum) / static_cast<double>(N));
}

LoopSample sample_geodesic(const FlatTorus& torus, const LatticeVector& k, const Eigen::VectorXd& q, int N)
{
    if (static_cast<int>(k.size()) != torus.dim || q.size() != torus.dim)
        throw std::invalid_argument("sample_geodesic: dimension mismatch");
    Eigen::MatrixXd samples(N, torus.dim);
    for (int i = 0; i < N; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(N);
        for (int j = 0; j < torus.dim; ++j)
            samples(i, j) = static_cast<double>(k[static_cast<size_t>(j)]) * t + q(j);
    }
    return LoopSample::make(torus, std::move(samples), k);
}

PhaseLoopSample make_free_orbit(const FlatTorus& torus, const LatticeVector& k, const Eigen::VectorXd& u0, int N)
{
    LoopSample base = sample_geodesic(torus, k, u0, N);
    Eigen::MatrixXd covectors(N, torus.dim);
    for (int j = 0; j < torus.dim; ++j)
        covectors.col(j).setConstant(torus.metric_scale * static_cast<double>(k[static_cast<size_t>(j)]));
    return PhaseLoopSample::make(std::move(base), std::move(covectors));
}

LoopSample cyclic_shift(const LoopSample& loop, int m)
{
    const int N = loop.size();
    Eigen::MatrixXd samples(N, loop.dim());
    for (int i = 0; i < N; ++i)
        samples.row(i) = loop.sample_wrapped(static_cast<long long>(i) + m);
    return LoopSample::make(loop.torus(), std::move(samples), loop.winding());
}

} // namespace loopmorse
