#include "loopmorse/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

namespace loopmorse {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRefineWindow = 1e-12;

Eigen::MatrixXd plane_rotation(double theta_clockwise)
{
    Eigen::MatrixXd r(2, 2);
    const double c = std::cos(theta_clockwise);
    const double s = std::sin(theta_clockwise);
    r << c, s, -s, c;
    return r;
}

double min_singular_value(const Eigen::MatrixXd& m)
{
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().minCoeff();
}

struct FormEval {
    Eigen::MatrixXd q;
    double scale = 0.0;
};

FormEval form_on_kernel(const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& dpsi)
{
    const int k = static_cast<int>(kernel.cols());
    const int n = static_cast<int>(kernel.rows()) / 2;
    const Eigen::MatrixXd j0 = standard_complex_structure(n);
    FormEval out;
    out.q = Eigen::MatrixXd(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b <= a; ++b) {
            const double qab = 0.5 * ((j0 * kernel.col(a)).dot(dpsi * kernel.col(b)) +
                                      (j0 * kernel.col(b)).dot(dpsi * kernel.col(a)));
            out.q(a, b) = qab;
            out.q(b, a) = qab;
        }
    out.scale = out.q.cwiseAbs().maxCoeff();
    return out;
}

// Second parameter derivative from the derivative callback; one-sided at the
// interval ends.
Eigen::MatrixXd second_derivative(const SymplecticPath& path, double t)
{
    const double h = 1e-5;
    if (t < h) return (-3.0 * path.derivative(t) + 4.0 * path.derivative(t + h) - path.derivative(t + 2.0 * h)) / (2.0 * h);
    if (t > 1.0 - h) return (3.0 * path.derivative(t) - 4.0 * path.derivative(t - h) + path.derivative(t - 2.0 * h)) / (2.0 * h);
    return (path.derivative(t + h) - path.derivative(t - h)) / (2.0 * h);
}

// Scans for a minimum of sigma_min(Psi(t) - I) by golden section.
double refine_by_minimization(const SymplecticPath& path, double lo, double hi)
{
    const int dim = path.dim();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    auto f = [&](double t) { return min_singular_value(path.value(t) - id); };
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > kRefineWindow) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

double refine_by_bisection(const SymplecticPath& path, double lo, double hi, double flo)
{
    const int dim = path.dim();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
    auto f = [&](double t) { return (path.value(t) - id).determinant(); };
    double a = lo, b = hi, fa = flo;
    while (b - a > kRefineWindow) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fa < 0.0) == (fm < 0.0)) { a = m; fa = fm; }
        else { b = m; }
    }
    return 0.5 * (a + b);
}

} // namespace

long long HalfInt::as_integer() const
{
    if (!is_integer()) throw std::logic_error("HalfInt: not an integer: " + str());
    return num / 2;
}

std::string HalfInt::str() const
{
    if (is_integer()) return std::to_string(num / 2);
    return std::to_string(num) + "/2";
}

Eigen::MatrixXd standard_complex_structure(int n)
{
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    j.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    return j;
}

Eigen::MatrixXd metric_complex_structure(int n, double scale)
{
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n) / scale;
    j.bottomLeftCorner(n, n) = scale * Eigen::MatrixXd::Identity(n, n);
    return j;
}

double omega0(const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
    if (x.size() != y.size() || x.size() % 2 != 0)
        throw std::invalid_argument("omega0: arguments must share an even dimension");
    const int n = static_cast<int>(x.size()) / 2;
    return (standard_complex_structure(n) * x).dot(y);
}

bool is_symplectic(const Eigen::MatrixXd& m, double tol)
{
    if (m.rows() != m.cols() || m.rows() % 2 != 0) return false;
    const int n = static_cast<int>(m.rows()) / 2;
    const Eigen::MatrixXd j0 = standard_complex_structure(n);
    return ((m.transpose() * j0 * m) - j0).cwiseAbs().maxCoeff() <= tol;
}

SymplecticPath::SymplecticPath(int dim, MatrixFn value, MatrixFn derivative, std::string kind)
    : dim_(dim), value_(std::move(value)), derivative_(std::move(derivative)), kind_(std::move(kind))
{
}

SymplecticPath SymplecticPath::shear(int n)
{
    if (n < 1) throw std::invalid_argument("SymplecticPath::shear: dimension must be positive");
    const double c = 1.0 / (kTwoPi * kTwoPi);
    auto value = [n, c](double t) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2 * n, 2 * n);
        m.topRightCorner(n, n) = (c * t) * Eigen::MatrixXd::Identity(n, n);
        return m;
    };
    auto derivative = [n, c](double) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
        m.topRightCorner(n, n) = c * Eigen::MatrixXd::Identity(n, n);
        return m;
    };
    return SymplecticPath(2 * n, value, derivative, "shear");
}

SymplecticPath SymplecticPath::rotation(double turns)
{
    const double rate = kTwoPi * turns;
    auto value = [rate](double t) { return plane_rotation(rate * t); };
    auto derivative = [rate](double t) {
        Eigen::MatrixXd d(2, 2);
        const double c = std::cos(rate * t);
        const double s = std::sin(rate * t);
        d << -s, c, -c, -s;
        return (rate * d).eval();
    };
    return SymplecticPath(2, value, derivative, "rotation");
}

SymplecticPath SymplecticPath::exponential(Eigen::MatrixXd S, Eigen::MatrixXd J)
{
    if (S.rows() != S.cols() || S.rows() % 2 != 0)
        throw std::invalid_argument("SymplecticPath::exponential: S must be square of even dimension");
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("SymplecticPath::exponential: S must be symmetric");
    if (J.rows() != S.rows() || J.cols() != S.cols())
        throw std::invalid_argument("SymplecticPath::exponential: J shape mismatch");

    const Eigen::MatrixXd gen = (-J * S).eval();
    // exp(t*gen) stays in Sp(2n) iff gen is Hamiltonian: gen^T J0 + J0 gen = 0.
    const Eigen::MatrixXd j0 = standard_complex_structure(static_cast<int>(S.rows()) / 2);
    if ((gen.transpose() * j0 + j0 * gen).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, gen.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("SymplecticPath::exponential: -J*S is not Hamiltonian, path leaves Sp(2n)");

    const int dim = static_cast<int>(S.rows());
    auto value = [gen](double t) { return (t * gen).exp().eval(); };
    auto derivative = [gen](double t) { return (gen * (t * gen).exp()).eval(); };
    return SymplecticPath(dim, value, derivative, "exponential");
}

SymplecticPath SymplecticPath::sampled(std::vector<Eigen::MatrixXd> values)
{
    if (values.size() < 2)
        throw std::invalid_argument("SymplecticPath::sampled: need at least two samples");
    const int dim = static_cast<int>(values.front().rows());
    if (dim % 2 != 0)
        throw std::invalid_argument("SymplecticPath::sampled: odd dimension");
    for (const auto& m : values) {
        if (m.rows() != dim || m.cols() != dim)
            throw std::invalid_argument("SymplecticPath::sampled: inconsistent shapes");
        if (!is_symplectic(m, 1e-8))
            throw std::invalid_argument("SymplecticPath::sampled: sample fails the symplecticity check");
    }
    if ((values.front() - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("SymplecticPath::sampled: path must start at the identity");

    auto samples = std::make_shared<std::vector<Eigen::MatrixXd>>(std::move(values));
    const int segments = static_cast<int>(samples->size()) - 1;
    auto value = [samples, segments](double t) {
        const double x = std::clamp(t, 0.0, 1.0) * segments;
        const int i = std::min(static_cast<int>(x), segments - 1);
        const double w = x - i;
        return ((1.0 - w) * (*samples)[static_cast<size_t>(i)] + w * (*samples)[static_cast<size_t>(i + 1)]).eval();
    };
    auto derivative = [samples, segments](double t) {
        const double h = 1.0 / segments;
        const int i = std::clamp(static_cast<int>(std::lround(std::clamp(t, 0.0, 1.0) * segments)), 0, segments);
        if (i == 0)
            return ((-3.0 * (*samples)[0] + 4.0 * (*samples)[1] - (*samples)[2]) / (2.0 * h)).eval();
        if (i == segments)
            return ((3.0 * (*samples)[static_cast<size_t>(segments)] - 4.0 * (*samples)[static_cast<size_t>(segments - 1)] +
                     (*samples)[static_cast<size_t>(segments - 2)]) / (2.0 * h)).eval();
        return (((*samples)[static_cast<size_t>(i + 1)] - (*samples)[static_cast<size_t>(i - 1)]) / (2.0 * h)).eval();
    };
    return SymplecticPath(dim, value, derivative, "sampled");
}

SymplecticPath SymplecticPath::analytic(int dim, MatrixFn value, MatrixFn derivative, std::string kind)
{
    return SymplecticPath(dim, std::move(value), std::move(derivative), std::move(kind));
}

SymplecticPath SymplecticPath::reparametrize(const SymplecticPath& base,
                                             std::function<double(double)> tau,
                                             std::function<double(double)> dtau)
{
    auto value = [base, tau](double t) { return base.value(tau(t)); };
    auto derivative = [base, tau, dtau](double t) { return (dtau(t) * base.derivative(tau(t))).eval(); };
    return SymplecticPath(base.dim(), value, derivative, base.kind() + "_reparam");
}

int crossing_form(const SymplecticPath& path, Crossing& crossing)
{
    FormEval form = form_on_kernel(crossing.kernel, path.derivative(crossing.t));
    // A vanishing first-order form usually means the parametrization is
    // stationary here; the second derivative then carries the crossing.
    if (form.scale < 1e-9) {
        FormEval second = form_on_kernel(crossing.kernel, second_derivative(path, crossing.t));
        if (second.scale < 1e-7) {
            crossing.signature = 0;
            crossing.regular = false;
            return 0;
        }
        form = second;
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(form.q);
    const double zero_tol = 1e-7 * form.scale;
    int pos = 0, neg = 0;
    bool degenerate = false;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()(i);
        if (lam > zero_tol) ++pos;
        else if (lam < -zero_tol) ++neg;
        else degenerate = true;
    }
    crossing.signature = pos - neg;
    crossing.regular = !degenerate;
    return crossing.signature;
}

CrossingScan detect_crossings(const SymplecticPath& path, int grid, double tol)
{
    if (grid < 16) throw std::invalid_argument("detect_crossings: grid too coarse");
    const int dim = path.dim();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);

    std::vector<double> ts(static_cast<size_t>(grid) + 1);
    std::vector<double> sigma(static_cast<size_t>(grid) + 1);
    std::vector<double> det(static_cast<size_t>(grid) + 1);
    std::vector<bool> zero(static_cast<size_t>(grid) + 1);
    for (int i = 0; i <= grid; ++i) {
        const double t = static_cast<double>(i) / grid;
        const Eigen::MatrixXd m = path.value(t) - id;
        ts[static_cast<size_t>(i)] = t;
        sigma[static_cast<size_t>(i)] = min_singular_value(m);
        det[static_cast<size_t>(i)] = m.determinant();
        // Zero is judged against the local size of Psi(t) - I.
        zero[static_cast<size_t>(i)] = sigma[static_cast<size_t>(i)] < tol * std::max(1.0, m.cwiseAbs().maxCoeff());
    }
    auto is_zero_at = [&](double t) {
        const Eigen::MatrixXd m = path.value(t) - id;
        return min_singular_value(m) < tol * std::max(1.0, m.cwiseAbs().maxCoeff());
    };

    CrossingScan scan;

    // Identically singular stretches: three or more consecutive grid points
    // at numerical zero.
    {
        int run_start = -1;
        for (int i = 0; i <= grid + 1; ++i) {
            const bool z = i <= grid && zero[static_cast<size_t>(i)];
            if (z && run_start < 0) run_start = i;
            if (!z && run_start >= 0) {
                if (i - run_start >= 3)
                    scan.singular_spans.emplace_back(ts[static_cast<size_t>(run_start)], ts[static_cast<size_t>(i - 1)]);
                run_start = -1;
            }
        }
    }

    std::vector<double> candidates;
    auto in_span = [&](double t) {
        for (const auto& [a, b] : scan.singular_spans)
            if (t >= a - 1e-9 && t <= b + 1e-9) return true;
        return false;
    };

    if (zero.front()) candidates.push_back(0.0);
    if (zero.back()) candidates.push_back(1.0);

    for (int i = 0; i < grid; ++i) {
        const double a = ts[static_cast<size_t>(i)], b = ts[static_cast<size_t>(i + 1)];
        if (in_span(a) && in_span(b)) continue;

        // Grid point sitting on the zero set.
        if (i > 0 && zero[static_cast<size_t>(i)] && !in_span(a)) {
            candidates.push_back(refine_by_minimization(path, ts[static_cast<size_t>(i - 1)], b));
            continue;
        }

        const double da = det[static_cast<size_t>(i)], db = det[static_cast<size_t>(i + 1)];
        if (!zero[static_cast<size_t>(i)] && !zero[static_cast<size_t>(i + 1)] &&
            da != 0.0 && db != 0.0 && (da < 0.0) != (db < 0.0)) {
            candidates.push_back(refine_by_bisection(path, a, b, da));
            continue;
        }

        // Interior dip of sigma_min without a determinant sign change: an
        // even-order zero between grid points.  Refine the local minimum and
        // keep it only if it actually reaches zero.
        if (i > 0 && i < grid) {
            const double s = sigma[static_cast<size_t>(i)];
            if (!zero[static_cast<size_t>(i)] &&
                s < sigma[static_cast<size_t>(i - 1)] && s <= sigma[static_cast<size_t>(i + 1)]) {
                const double t_star = refine_by_minimization(path, ts[static_cast<size_t>(i - 1)], b);
                if (is_zero_at(t_star)) candidates.push_back(t_star);
            }
        }
    }

    std::sort(candidates.begin(), candidates.end());
    std::vector<double> unique_ts;
    for (double t : candidates) {
        if (t < 1e-9) t = 0.0;
        if (t > 1.0 - 1e-9) t = 1.0;
        if (in_span(t)) continue;
        if (!unique_ts.empty() && std::abs(t - unique_ts.back()) < 1e-9) continue;
        unique_ts.push_back(t);
    }

    for (double t : unique_ts) {
        Crossing crossing;
        crossing.t = t;
        crossing.boundary = (t == 0.0 || t == 1.0);

        const Eigen::MatrixXd m = path.value(t) - id;
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
        const Eigen::VectorXd sv = svd.singularValues();
        const double kernel_tol = std::max(tol * sv.maxCoeff(), tol);
        int kdim = 0;
        for (int i = static_cast<int>(sv.size()) - 1; i >= 0 && sv(i) < kernel_tol; --i) ++kdim;
        if (kdim == 0) continue; // refined point drифted off; not a crossing
        crossing.kernel = svd.matrixV().rightCols(kdim);

        crossing_form(path, crossing);
        scan.crossings.push_back(std::move(crossing));
    }
    return scan;
}

IndexResult rs_index(const SymplecticPath& path, int grid, double tol)
{
    const CrossingScan scan = detect_crossings(path, grid, tol);
    if (!scan.singular_spans.empty())
        throw non_regular_path_error("rs_index: path has an identically singular span; use a homotopy decomposition");
    for (const auto& c : scan.crossings)
        if (!c.regular)
            throw non_regular_path_error("rs_index: degenerate crossing form at t = " + std::to_string(c.t));

    long long num = 0;
    for (const auto& c : scan.crossings)
        num += c.boundary ? c.signature : 2LL * c.signature;

    IndexResult result;
    result.value = HalfInt{num};
    result.method = IndexMethod::crossing_sum;
    result.crossings = scan.crossings;
    result.path_kind = path.kind();
    result.n = path.dim() / 2;
    return result;
}

IndexResult generalized_cz_shear(int n)
{
    if (n < 1) throw std::invalid_argument("generalized_cz_shear: dimension must be positive");

    // Quarter clockwise turn; its only crossing is the identity at t = 0.
    const IndexResult rot = rs_index(SymplecticPath::rotation(0.25));

    // Connector from the rotated endpoint back to the time-one shear; it
    // meets the degenerate locus exactly at s = 1.
    const double c = 1.0 / (kTwoPi * kTwoPi);
    const double theta1 = kPi / 2.0;
    auto shear2 = [c](double s) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
        m(0, 1) = c * s;
        return m;
    };
    auto value = [=](double s) { return (plane_rotation((1.0 - s) * theta1) * shear2(s)).eval(); };
    auto derivative = [=](double s) {
        Eigen::MatrixXd dshear = Eigen::MatrixXd::Zero(2, 2);
        dshear(0, 1) = c;
        const Eigen::MatrixXd j0 = standard_complex_structure(1);
        // d/ds of exp(-(1-s) theta1 J0) is theta1 J0 times the rotation.
        return (theta1 * j0 * plane_rotation((1.0 - s) * theta1) * shear2(s) +
                plane_rotation((1.0 - s) * theta1) * dshear).eval();
    };
    const SymplecticPath connector = SymplecticPath::analytic(2, value, derivative, "connector");
    const IndexResult conn = rs_index(connector);

    const long long block_num = rot.value.num + conn.value.num;

    IndexResult result;
    result.value = HalfInt{static_cast<long long>(n) * block_num};
    result.method = IndexMethod::homotopy_decomposition;
    result.path_kind = "shear";
    result.n = n;
    result.crossings = rot.crossings;
    for (Crossing c2 : conn.crossings) result.crossings.push_back(std::move(c2));
    return result;
}

std::pair<IndexResult, IndexResult> sided_shear_indices(double eps, int grid)
{
    const double c = 1.0 / (kTwoPi * kTwoPi);
    if (!(eps > 0.0) || !(eps * kPi < c))
        throw std::invalid_argument("sided_shear_indices: eps must lie in (0, 1/(4*pi^3))");

    auto make_side = [&](double sign) {
        auto shear2 = [c](double t) {
            Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
            m(0, 1) = c * t;
            return m;
        };
        // Clockwise rotation by -sign * eps * sin(pi t); sign +1 pushes the
        // path counterclockwise off the eigenvalue-one locus.
        auto value = [=](double t) { return (shear2(t) * plane_rotation(-sign * eps * std::sin(kPi * t))).eval(); };
        auto derivative = [=](double t) {
            Eigen::MatrixXd dshear = Eigen::MatrixXd::Zero(2, 2);
            dshear(0, 1) = c;
            const Eigen::MatrixXd j0 = standard_complex_structure(1);
            const double theta = -sign * eps * std::sin(kPi * t);
            const double dtheta = -sign * eps * kPi * std::cos(kPi * t);
            // plane_rotation(x) = exp(-x J0), so d/dt = -dtheta * J0 * rot.
            return (dshear * plane_rotation(theta) -
                    dtheta * shear2(t) * j0 * plane_rotation(theta)).eval();
        };
        return SymplecticPath::analytic(2, value, derivative, "shear_sided");
    };

    return {rs_index(make_side(-1.0), grid), rs_index(make_side(+1.0), grid)};
}

int cz_from_quadratic(const Eigen::MatrixXd& S)
{
    if (S.rows() != S.cols() || S.rows() % 2 != 0)
        throw std::invalid_argument("cz_from_quadratic: S must be square of even dimension");
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("cz_from_quadratic: S must be symmetric");

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    const double norm = es.eigenvalues().cwiseAbs().maxCoeff();
    if (!(norm < kTwoPi))
        throw std::domain_error("cz_from_quadratic: spectral norm must stay below 2*pi");

    int negatives = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) < -1e-12) ++negatives;
    return negatives - static_cast<int>(S.rows()) / 2;
}

HalfInt grading_shift(HalfInt mu, int crit_dim)
{
    return HalfInt{mu.num + crit_dim};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd>
hamiltonian_vector_field(const Hamiltonian& H, double t, const Eigen::VectorXd& u, const Eigen::VectorXd& v)
{
    return {H.dv(t, u, v), (-H.du(t, u, v)).eval()};
}

SymplecticPath linearized_flow(const FlatTorus& torus)
{
    return SymplecticPath::shear(torus.dim);
}

SymplecticPath linearized_flow(PerturbedSign sign)
{
    return SymplecticPath::exponential(perturbed_generator(sign),
                                       metric_complex_structure(1, kTwoPi * kTwoPi));
}

Eigen::MatrixXd perturbed_generator(PerturbedSign sign)
{
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(2, 2);
    s(0, 0) = (sign == PerturbedSign::minus) ? 1.0 : -1.0;
    return s;
}

} // namespace loopmorse
