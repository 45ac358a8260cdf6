// Command-line front end: geodesic component tables, homology tables with a
// three-way cross-check, Conley-Zehnder index reports, the perturbed-component
// report, flow/PDE runs, and a self-checking anchor suite (`paper`).
//
// Exit codes: 0 success, 1 check failure, 2 usage error.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "loopmorse/errors.hpp"
#include "loopmorse/flows.hpp"
#include "loopmorse/geodesics.hpp"
#include "loopmorse/homology.hpp"
#include "loopmorse/io.hpp"
#include "loopmorse/symplectic.hpp"
#include "loopmorse/torus.hpp"

namespace {

using namespace loopmorse;

constexpr double kPi = std::numbers::pi;

std::vector<long long> parse_lattice(const std::string& text)
{
    std::vector<long long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
    if (out.empty()) throw std::invalid_argument("empty lattice vector");
    return out;
}

std::vector<double> parse_doubles(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

Eigen::MatrixXd diagonal_form(const std::vector<double>& entries)
{
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(entries.size()),
                                              static_cast<Eigen::Index>(entries.size()));
    for (size_t i = 0; i < entries.size(); ++i)
        s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = entries[i];
    return s;
}

Json components_to_json(const std::vector<GeodesicComponent>& components)
{
    Json arr = Json::array();
    for (const auto& c : components) {
        Json e;
        e["k"] = c.k;
        e["energy"] = round12(c.energy_value);
        e["morse_index"] = c.morse_index;
        e["nullity"] = c.nullity;
        arr.push_back(std::move(e));
    }
    return arr;
}

void emit(const std::string& text, const std::string& out_path)
{
    std::cout << text;
    if (!out_path.empty()) write_text_file(out_path, text);
}

// ---------------------------------------------------------------- geodesics

int run_geodesics(int n, double a, const std::string& format, const std::string& out_path)
{
    const FlatTorus torus(n);
    const auto components = enumerate_components(torus, a);
    if (format == "json") {
        emit(components_to_json(components).dump(2) + "\n", out_path);
    } else {
        emit(components_to_csv(components, n), out_path);
    }
    std::cout << "components: " << components.size() << "\n";
    return 0;
}

// ----------------------------------------------------------------- homology

long long norm_sq_of(const std::vector<long long>& k)
{
    long long s = 0;
    for (long long c : k) s += c * c;
    return s;
}

const HomologyGroup* group_at(const HomologyTable& t, int degree)
{
    const auto it = t.entries.find(degree);
    return it == t.entries.end() ? nullptr : &it->second;
}

bool tables_agree(const HomologyTable& morse, const HomologyTable& floer,
                  const HomologyTable& singular, std::string& diff)
{
    std::ostringstream msg;
    bool ok = true;
    std::vector<int> degrees;
    for (const auto& [d, g] : morse.entries) degrees.push_back(d);
    for (const auto& [d, g] : singular.entries)
        if (!group_at(morse, d)) degrees.push_back(d);
    for (const auto& [d, g] : floer.entries)
        if (!group_at(morse, -d)) degrees.push_back(-d);
    std::sort(degrees.begin(), degrees.end());
    degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());

    for (int d : degrees) {
        const HomologyGroup* m = group_at(morse, d);
        const HomologyGroup* s = group_at(singular, d);
        const HomologyGroup* f = group_at(floer, -d);
        const long long rm = m ? m->free_rank : 0;
        const long long rs = s ? s->free_rank : 0;
        const long long rf = f ? f->free_rank : 0;
        const bool torsion_free = (!m || m->torsion.empty()) && (!s || s->torsion.empty()) && (!f || f->torsion.empty());
        if (rm != rs || rm != rf || !torsion_free) {
            ok = false;
            msg << "degree " << d << ": morse " << rm << ", singular " << rs
                << ", floer(-" << d << ") " << rf << (torsion_free ? "" : ", torsion present") << "\n";
        }
    }
    diff = msg.str();
    return ok;
}

int run_homology(int n, const std::vector<long long>& k, const std::string& side,
                 bool check_all, const std::string& format, const std::string& out_path)
{
    const FlatTorus torus(n);
    if (static_cast<int>(k.size()) != n)
        throw std::invalid_argument("homology: --k must have n entries");
    const double bound = 2.0 * kPi * kPi * static_cast<double>(norm_sq_of(k));

    const auto render = [&](const HomologyTable& table) {
        if (format == "json") {
            emit(homology_to_json(table).dump(2) + "\n", out_path);
        } else {
            std::cout << "label: " << table.label << "\n";
            emit(homology_to_csv(table), out_path);
        }
    };

    if (check_all) {
        const HomologyTable morse = morse_bott_homology(torus, bound);
        const HomologyTable floer = floer_bott_cohomology(torus, bound);
        const HomologyTable singular = sublevel_singular_homology(torus, k);
        std::string diff;
        if (!tables_agree(morse, floer, singular, diff)) {
            std::cout << "disagreement:\n" << diff;
            return 1;
        }
        std::cout << "agreement: morse = floer(regraded) = singular\n";
        render(morse);
        return 0;
    }

    if (side == "morse") {
        render(morse_bott_homology(torus, bound));
    } else if (side == "floer") {
        render(floer_bott_cohomology(torus, bound));
    } else if (side == "singular") {
        render(sublevel_singular_homology(torus, k));
    } else {
        throw std::invalid_argument("homology: --side must be morse, floer, or singular");
    }
    return 0;
}

// ----------------------------------------------------------------------- cz

void print_index_report(const IndexResult& result, const std::string& out_path)
{
    std::cout << "path: " << result.path_kind << "  (n = " << result.n << ")\n";
    std::cout << "crossings:\n";
    for (const auto& c : result.crossings)
        std::cout << "  t = " << fmt12(c.t) << "  kernel_dim = " << c.kernel.cols()
                  << "  signature = " << c.signature << (c.boundary ? "  [boundary]" : "") << "\n";
    std::cout << "index = " << result.value.str() << "\n";
    if (!out_path.empty()) write_text_file(out_path, index_to_json(result).dump(2) + "\n");
}

int run_cz(bool shear, int n, const std::string& quadratic, const std::string& exp_path,
           const std::string& out_path)
{
    const int modes = (shear ? 1 : 0) + (quadratic.empty() ? 0 : 1) + (exp_path.empty() ? 0 : 1);
    if (modes != 1)
        throw std::invalid_argument("cz: pass exactly one of --shear, --quadratic, --exp-path");

    if (shear) {
        print_index_report(generalized_cz_shear(n), out_path);
        return 0;
    }
    if (!quadratic.empty()) {
        const Eigen::MatrixXd s = diagonal_form(parse_doubles(quadratic));
        std::cout << "index = " << cz_from_quadratic(s) << "\n";
        return 0;
    }
    const Eigen::MatrixXd s = diagonal_form(parse_doubles(exp_path));
    const auto path = SymplecticPath::exponential(s, standard_complex_structure(static_cast<int>(s.rows()) / 2));
    const IndexResult result = rs_index(path);
    print_index_report(result, out_path);
    const int direct = cz_from_quadratic(s);
    const bool consistent = result.value == HalfInt{2LL * direct};
    std::cout << "quadratic backend: " << direct << "  ["
              << (consistent ? "consistent" : "INCONSISTENT") << "]\n";
    return consistent ? 0 : 1;
}

// ------------------------------------------------------------------ perturb

int run_perturb(long long k, double q0, const std::string& out_path)
{
    if (k == 0) {
        std::cerr << "perturb: k = 0 is rejected; the perturbation needs a nonconstant reference\n"
                  << "geodesic (pick any k != 0)\n";
        return 2;
    }
    const auto pair = perturbed_critical_points(k, q0);
    const auto spec_minus = perturbed_jacobi_spectrum(PerturbedSign::minus, 3);
    const auto spec_plus = perturbed_jacobi_spectrum(PerturbedSign::plus, 3);
    const int cz_minus = cz_from_quadratic(perturbed_generator(PerturbedSign::minus));
    const int cz_plus = cz_from_quadratic(perturbed_generator(PerturbedSign::plus));
    const IndexResult rs_minus = rs_index(linearized_flow(PerturbedSign::minus));
    const IndexResult rs_plus = rs_index(linearized_flow(PerturbedSign::plus));
    const OrbitCount orbits = count_connecting_orbits(k, q0);
    const HomologyTable mw = mod2_homology_of_complex(
        morse_witten_complex_perturbed(k, orbits.parity), "morse_witten_mod2");

    const bool relation = cz_minus == -pair.morse_indices[0] && cz_plus == -pair.morse_indices[1];
    const bool backends = rs_minus.value == HalfInt{2LL * cz_minus} && rs_plus.value == HalfInt{2LL * cz_plus};
    const auto* h0 = group_at(mw, 0);
    const auto* h1 = group_at(mw, 1);
    const bool witten = orbits.count == 2 && orbits.parity == 0 &&
                        h0 && h0->free_rank == 1 && h1 && h1->free_rank == 1;

    std::cout << "component k = " << k << ", q0 = " << fmt12(q0) << "\n";
    std::cout << "actions: minus " << fmt12(pair.actions[0]) << ", plus " << fmt12(pair.actions[1]) << "\n";
    std::cout << "residuals: minus " << fmt12(pair.residuals[0]) << ", plus " << fmt12(pair.residuals[1]) << "\n";
    std::cout << "morse indices: (" << pair.morse_indices[0] << ", " << pair.morse_indices[1] << ")\n";
    std::cout << "lowest eigenvalues: minus " << fmt12(spec_minus.eigenvalues.front().first)
              << ", plus " << fmt12(spec_plus.eigenvalues.front().first) << "\n";
    std::cout << "cz indices: (" << cz_minus << ", " << cz_plus << ")"
              << (backends ? "" : "  [crossing-sum backend disagrees]") << "\n";
    std::cout << "relation cz = -morse_index: " << (relation ? "PASS" : "FAIL") << "\n";
    std::cout << "connecting orbits: count " << orbits.count << ", parity " << orbits.parity << "\n";
    std::cout << "morse-witten homology (Z/2): degrees 0 and 1 "
              << (witten ? "each of dimension 1" : "UNEXPECTED") << "\n";

    if (!out_path.empty()) {
        Json j;
        j["k"] = k;
        j["q0"] = round12(q0);
        j["actions"] = {round12(pair.actions[0]), round12(pair.actions[1])};
        j["morse_indices"] = {pair.morse_indices[0], pair.morse_indices[1]};
        j["cz_indices"] = {cz_minus, cz_plus};
        j["orbit_count"] = orbits.count;
        j["orbit_parity"] = orbits.parity;
        j["relation_holds"] = relation;
        write_text_file(out_path, j.dump(2) + "\n");
    }
    return relation && backends && witten ? 0 : 1;
}

// --------------------------------------------------------------------- flow

int run_flow_chi(double chi0, const std::string& range, int steps, const std::string& out_path)
{
    const auto ends = parse_doubles(range);
    if (ends.size() != 2) throw std::invalid_argument("flow: --range needs two numbers a,b");
    const FlowTrajectory traj = integrate_chi(chi0, ends[0], ends[1], steps);
    std::cout << "limits (" << chi_limit_label(traj.backward) << ", " << chi_limit_label(traj.forward) << ")\n";
    if (!out_path.empty()) write_text_file(out_path, trajectory_to_csv(traj));
    return 0;
}

int run_flow_orbit(int n, const std::vector<long long>& k, const std::string& u0_text,
                   const std::string& v0_text, int steps, const std::string& out_path)
{
    const FlatTorus torus(n);
    Eigen::VectorXd u0 = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd v0(n);
    if (static_cast<int>(k.size()) != n) throw std::invalid_argument("flow: --k must have n entries");
    for (int i = 0; i < n; ++i) v0(i) = torus.metric_scale * static_cast<double>(k[static_cast<size_t>(i)]);
    if (!u0_text.empty()) {
        const auto vals = parse_doubles(u0_text);
        if (static_cast<int>(vals.size()) != n) throw std::invalid_argument("flow: --u0 must have n entries");
        for (int i = 0; i < n; ++i) u0(i) = vals[static_cast<size_t>(i)];
    }
    if (!v0_text.empty()) {
        const auto vals = parse_doubles(v0_text);
        if (static_cast<int>(vals.size()) != n) throw std::invalid_argument("flow: --v0 must have n entries");
        for (int i = 0; i < n; ++i) v0(i) = vals[static_cast<size_t>(i)];
    }

    const HamiltonianOrbit orbit = integrate_orbit(free_hamiltonian(torus), u0, v0, steps);
    std::cout << "closure_defect = " << fmt12(orbit.closure_defect) << "\n";
    std::cout << "energy_drift = " << fmt12(orbit.energy_drift) << "\n";
    if (!out_path.empty()) {
        Json j;
        j["closure_defect"] = round12(orbit.closure_defect);
        j["energy_drift"] = round12(orbit.energy_drift);
        Json uf = Json::array(), vf = Json::array();
        for (int i = 0; i < n; ++i) {
            uf.push_back(round12(orbit.positions.back()(i)));
            vf.push_back(round12(orbit.covectors.back()(i)));
        }
        j["final_u"] = std::move(uf);
        j["final_v"] = std::move(vf);
        write_text_file(out_path, j.dump(2) + "\n");
    }
    return 0;
}

int run_flow_cylinder(long long k, double q0, std::optional<double> chi0, const std::string& w0_path,
                      double s_max, int t_points, double s_step,
                      const std::string& out_path, const std::string& out_loop_path)
{
    if (chi0.has_value() == !w0_path.empty())
        throw std::invalid_argument("flow: pass exactly one of --chi0, --w0");

    LoopSample w0 = chi0 ? make_ansatz_loop(k, q0, *chi0, 0.0, t_points)
                         : loop_from_json(read_json_file(w0_path));
    const CylinderGrid grid = solve_cylinder(k, q0, w0, s_max, t_points, s_step);

    std::cout << "slices stored: " << grid.s_grid.size() << "\n";
    std::cout << "final residual vs gamma+: " << fmt12(grid.residual) << "\n";
    std::cout << "final energy: " << fmt12(grid.energies.back()) << "\n";

    int exit_code = 0;
    if (chi0) {
        // t-constant initial data must track the scalar connection ODE.
        double coherence = 0.0;
        for (size_t j = 0; j < grid.s_grid.size(); ++j) {
            const double chi_s = connection_value(*chi0, grid.s_grid[j], 0.25 * s_step);
            for (size_t i = 0; i < grid.t_grid.size(); ++i) {
                const double expected = static_cast<double>(k) * grid.t_grid[i] + q0 + chi_s;
                coherence = std::max(coherence, std::abs(grid.w[j][i] - expected));
            }
        }
        std::cout << "ansatz coherence max deviation: " << fmt12(coherence) << "\n";
        if (s_step <= 1.5e-3 && coherence >= 1e-6) {
            std::cout << "coherence check: FAIL (bound 1e-06)\n";
            exit_code = 1;
        }
    }

    if (!out_path.empty()) write_text_file(out_path, cylinder_to_json(grid).dump(2) + "\n");
    if (!out_loop_path.empty()) {
        const LoopSample last = cylinder_slice(grid, static_cast<int>(grid.w.size()) - 1);
        write_text_file(out_loop_path, loop_to_json(last).dump(2) + "\n");
    }
    return exit_code;
}

// -------------------------------------------------------------------- paper

struct Anchor {
    std::string id;
    std::string category;
    std::string description;
    bool pass = false;
    std::string detail;
};

bool close_rel(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

std::vector<Anchor> run_anchors(const std::string& only)
{
    std::vector<Anchor> anchors;
    const auto add = [&](const std::string& category, const std::string& id,
                         const std::string& description, bool pass, const std::string& detail) {
        if (only.empty() || only == category) anchors.push_back({id, category, description, pass, detail});
    };
    const auto want = [&](const std::string& category) { return only.empty() || only == category; };

    // ---- core: energies, actions, distances ----
    if (want("core")) {
        {
            bool ok = true;
            double worst = 0.0;
            for (int n = 1; n <= 3; ++n) {
                const FlatTorus torus(n);
                for (const auto& comp : enumerate_components(torus, 2.0 * kPi * kPi * 4.0 + 1.0)) {
                    const LoopSample loop =
                        sample_geodesic(torus, comp.k, Eigen::VectorXd::Constant(n, 0.37), 128);
                    const double err = std::abs(energy(loop) - comp.energy_value);
                    worst = std::max(worst, err);
                    ok = ok && err <= 1e-9 * std::max(1.0, comp.energy_value);
                }
            }
            add("core", "core.energy_geodesics", "I(gamma_{k,q}) = 2 pi^2 |k|^2 over n <= 3, |k|^2 <= 4",
                ok, "max abs error " + fmt12(worst));
        }
        {
            bool ok = true;
            double worst = 0.0;
            for (int n = 1; n <= 2; ++n) {
                const FlatTorus torus(n);
                const Hamiltonian h = free_hamiltonian(torus);
                for (const auto& comp : enumerate_components(torus, 2.0 * kPi * kPi * 2.0 + 1.0)) {
                    const PhaseLoopSample z =
                        make_free_orbit(torus, comp.k, Eigen::VectorXd::Constant(n, 0.11), 128);
                    const double err = std::abs(symplectic_action(z, h) - comp.energy_value);
                    worst = std::max(worst, err);
                    ok = ok && err <= 1e-9 * std::max(1.0, comp.energy_value);
                }
            }
            add("core", "core.action_equals_energy",
                "A_H(lifted geodesic) = I(geodesic) for the free Hamiltonian", ok,
                "max abs error " + fmt12(worst));
        }
        {
            const FlatTorus torus(1);
            const int n_samples = 256;
            Eigen::MatrixXd base(n_samples, 1), cov(n_samples, 1);
            for (int i = 0; i < n_samples; ++i) {
                const double t = static_cast<double>(i) / n_samples;
                base(i, 0) = t;
                cov(i, 0) = torus.metric_scale + std::sin(2.0 * kPi * t);
            }
            const PhaseLoopSample z = PhaseLoopSample::make(LoopSample::make(torus, base, {1}), cov);
            const double value = symplectic_action(z, free_hamiltonian(torus));
            const double expected = 2.0 * kPi * kPi - 1.0 / (16.0 * kPi * kPi);
            add("core", "core.action_oscillating",
                "A_H for v = (2pi)^2 + sin(2 pi t) over u = t equals 2 pi^2 - 1/(16 pi^2)",
                close_rel(value, expected, 1e-12), "value " + fmt12(value));
        }
        {
            const FlatTorus torus(1);
            Eigen::MatrixXd a = Eigen::MatrixXd::Constant(64, 1, 0.2);
            Eigen::MatrixXd b = Eigen::MatrixXd::Constant(64, 1, 0.7);
            const double d_half = h1_distance(LoopSample::make(torus, a, {0}), LoopSample::make(torus, b, {0}));
            const LoopSample g0 = sample_geodesic(torus, {1}, Eigen::VectorXd::Zero(1), 128);
            const LoopSample gq = sample_geodesic(torus, {1}, Eigen::VectorXd::Constant(1, 0.25), 128);
            const double d_shift = h1_distance(g0, gq);
            const bool ok = close_rel(d_half * d_half, 4.0, 1e-9) &&
                            close_rel(d_shift * d_shift, 2.0 + 8.0 * kPi * kPi, 1e-9);
            add("core", "core.h1_distance", "flat-distance anchors: antipodal constants and shifted geodesics",
                ok, "d(q, q+1/2) = " + fmt12(d_half) + ", d(gamma_0, gamma_{1/4}) = " + fmt12(d_shift));
        }
    }

    // ---- geodesics: component counts and spectra ----
    if (want("geodesics")) {
        {
            const size_t c1 = enumerate_components(FlatTorus(1), 19.74).size();
            const size_t c2 = enumerate_components(FlatTorus(2), 19.74).size();
            const size_t c20 = enumerate_components(FlatTorus(2), 0.0).size();
            const size_t c3 = enumerate_components(FlatTorus(3), 2.0 * kPi * kPi + 0.01).size();
            const bool ok = c1 == 3 && c2 == 5 && c20 == 1 && c3 == 7;
            std::ostringstream detail;
            detail << "counts " << c1 << ", " << c2 << ", " << c20 << ", " << c3;
            add("geodesics", "geodesics.component_counts",
                "component counts at a = 19.74 (n = 1, 2), a = 0, and just above 2 pi^2 (n = 3)",
                ok, detail.str());
        }
        {
            bool ok = true;
            for (int n = 1; n <= 3 && ok; ++n) {
                const SpectrumReport report = jacobi_spectrum(FlatTorus(n), 4);
                ok = report.kernel_dim == n && report.negative_count == 0 &&
                     report.eigenvalues.front() == std::pair<double, int>(0.0, n);
                for (int l = 1; l <= 4 && ok; ++l)
                    ok = close_rel(report.eigenvalues[static_cast<size_t>(l)].first,
                                   4.0 * kPi * kPi * l * l, 1e-12) &&
                         report.eigenvalues[static_cast<size_t>(l)].second == 2 * n;
            }
            add("geodesics", "geodesics.jacobi_spectrum",
                "Jacobi spectrum 0 (mult n), 4 pi^2 l^2 (mult 2n); index 0, nullity n", ok, "n = 1..3");
        }
    }

    // ---- homology ----
    if (want("homology")) {
        {
            const FlatTorus torus(2);
            const double bound = 2.0 * kPi * kPi;
            const HomologyTable morse = morse_bott_homology(torus, bound);
            const auto* g0 = group_at(morse, 0);
            const auto* g1 = group_at(morse, 1);
            const auto* g2 = group_at(morse, 2);
            const bool ok = g0 && g0->free_rank == 5 && g1 && g1->free_rank == 10 && g2 && g2->free_rank == 5;
            add("homology", "homology.ranks_5_10_5",
                "sublevel ranks (5, 10, 5) for n = 2 at the |k| = 1 level", ok,
                "ranks " + std::to_string(g0 ? g0->free_rank : -1) + ", " +
                    std::to_string(g1 ? g1->free_rank : -1) + ", " + std::to_string(g2 ? g2->free_rank : -1));
        }
        {
            bool ok = true;
            std::string diff;
            for (int n = 1; n <= 3 && ok; ++n) {
                const FlatTorus torus(n);
                for (long long ksq = 0; ksq <= (n < 3 ? 2 : 1) && ok; ++ksq) {
                    std::vector<long long> k(static_cast<size_t>(n), 0);
                    k[0] = ksq;
                    const double bound = 2.0 * kPi * kPi * static_cast<double>(norm_sq_of(k));
                    ok = tables_agree(morse_bott_homology(torus, bound), floer_bott_cohomology(torus, bound),
                                      sublevel_singular_homology(torus, k), diff);
                }
            }
            add("homology", "homology.three_way",
                "Morse-Bott homology = regraded cochain tables = sublevel singular homology", ok,
                ok ? "n <= 3" : diff);
        }
        {
            const IntegerChainComplex klein{
                0, {1, 2, 1}, {BigMat::from_rows({{0, 0}}), BigMat::from_rows({{0}, {2}})}};
            const HomologyTable h = homology_of_complex(klein, "klein");
            const auto* h0 = group_at(h, 0);
            const auto* h1 = group_at(h, 1);
            const auto* h2 = group_at(h, 2);
            const bool ok = h0 && h0->free_rank == 1 && h0->torsion.empty() &&
                            h1 && h1->free_rank == 1 && h1->torsion == std::vector<long long>{2} &&
                            h2 && h2->free_rank == 0 && h2->torsion.empty();
            add("homology", "homology.torsion_regression",
                "integer homology with torsion: Z, Z + Z/2, 0 from a twisted 2-complex", ok, "");
        }
    }

    // ---- index ----
    if (want("index")) {
        {
            bool ok = true;
            std::string values;
            for (int n = 1; n <= 3; ++n) {
                const IndexResult r = generalized_cz_shear(n);
                ok = ok && r.value == HalfInt{-n};
                values += (n > 1 ? ", " : "") + r.value.str();
            }
            add("index", "index.shear", "generalized index of the geodesic shear is -n/2", ok, values);
        }
        {
            const auto [clockwise, counter] = sided_shear_indices();
            const bool ok = clockwise.value == HalfInt{-1} && counter.value == HalfInt{-1};
            add("index", "index.sided_shear",
                "both rotation-perturbed shears carry index -1/2 (n = 1)", ok,
                clockwise.value.str() + " and " + counter.value.str());
        }
        {
            const int minus = cz_from_quadratic(perturbed_generator(PerturbedSign::minus));
            const int plus = cz_from_quadratic(perturbed_generator(PerturbedSign::plus));
            const IndexResult rs_minus = rs_index(linearized_flow(PerturbedSign::minus));
            const IndexResult rs_plus = rs_index(linearized_flow(PerturbedSign::plus));
            const bool ok = minus == -1 && plus == 0 && rs_minus.value == HalfInt{-2} &&
                            rs_plus.value == HalfInt{0};
            add("index", "index.nondegenerate_pair",
                "cz(exp(-tJS)) = (negative eigenvalues of S) - n on the perturbed pair: (-1, 0)", ok,
                "quadratic (" + std::to_string(minus) + ", " + std::to_string(plus) + "), crossing-sum (" +
                    rs_minus.value.str() + ", " + rs_plus.value.str() + ")");
        }
        {
            const IndexResult loop = rs_index(SymplecticPath::rotation(1.0));
            add("index", "index.rotation_loop", "full clockwise rotation has index -2 (Maslov loop)",
                loop.value == HalfInt{-4}, "value " + loop.value.str());
        }
    }

    // ---- appendix: perturbed dynamics ----
    if (want("appendix")) {
        {
            bool ok = true;
            std::string values;
            for (long long k = 1; k <= 2; ++k) {
                const auto pair = perturbed_critical_points(k, 0.0);
                const double base = 2.0 * kPi * kPi * static_cast<double>(k * k);
                ok = ok && close_rel(pair.actions[0], base + 1.0, 1e-9) &&
                     close_rel(pair.actions[1], base - 1.0, 1e-9) && pair.morse_indices[0] == 1 &&
                     pair.morse_indices[1] == 0 && pair.residuals[0] < 1e-9 && pair.residuals[1] < 1e-9;
                values += (k > 1 ? "; " : "") + fmt12(pair.actions[0]) + ", " + fmt12(pair.actions[1]);
            }
            add("appendix", "appendix.actions", "perturbed actions 2 pi^2 k^2 +/- 1 with indices (1, 0)", ok,
                values);
        }
        {
            const SpectrumReport minus = perturbed_jacobi_spectrum(PerturbedSign::minus, 3);
            const SpectrumReport plus = perturbed_jacobi_spectrum(PerturbedSign::plus, 3);
            bool ok = minus.negative_count == 1 && plus.negative_count == 0 && minus.kernel_dim == 0 &&
                      plus.kernel_dim == 0 && close_rel(minus.eigenvalues.front().first, -1.0, 1e-12) &&
                      close_rel(plus.eigenvalues.front().first, 1.0, 1e-12);
            for (int l = 1; l <= 3 && ok; ++l) {
                ok = close_rel(minus.eigenvalues[static_cast<size_t>(l)].first,
                               4.0 * kPi * kPi * l * l - 1.0, 1e-12) &&
                     close_rel(plus.eigenvalues[static_cast<size_t>(l)].first,
                               4.0 * kPi * kPi * l * l + 1.0, 1e-12);
            }
            add("appendix", "appendix.spectra", "perturbed spectra 4 pi^2 l^2 -/+ 1, nondegenerate", ok, "");
        }
        {
            const FlowTrajectory traj = integrate_chi(0.25, -20.0, 20.0, 10000);
            double worst = 0.0;
            for (size_t i = 0; i < traj.s_grid.size(); ++i) {
                const double closed = std::atan(std::tan(kPi * 0.25) * std::exp(traj.s_grid[i])) / kPi;
                worst = std::max(worst, std::abs(traj.chi[i] - closed));
            }
            const bool ok = worst < 1e-8 && traj.backward == ChiLimit::lower && traj.forward == ChiLimit::half;
            add("appendix", "appendix.connection_ode",
                "connection ODE matches the separable closed form; limits (0, 1/2)", ok,
                "max error " + fmt12(worst));
        }
        {
            const OrbitCount orbits = count_connecting_orbits(1, 0.0);
            const HomologyTable mw = mod2_homology_of_complex(
                morse_witten_complex_perturbed(1, orbits.parity), "morse_witten_mod2");
            const auto* h0 = group_at(mw, 0);
            const auto* h1 = group_at(mw, 1);
            const bool ok = orbits.count == 2 && orbits.parity == 0 && h0 && h0->free_rank == 1 && h1 &&
                            h1->free_rank == 1;
            add("appendix", "appendix.connecting_orbits",
                "two connecting orbits, parity 0, Morse-Witten homology Z/2 in degrees 0 and 1", ok,
                "count " + std::to_string(orbits.count) + ", parity " + std::to_string(orbits.parity));
        }
        {
            const LoopSample w0 = make_ansatz_loop(1, 0.0, 0.25, 0.0, 128);
            const CylinderGrid grid = solve_cylinder(1, 0.0, w0, 12.0, 128, 1e-3);
            double coherence = 0.0;
            for (size_t j = 0; j < grid.s_grid.size(); ++j) {
                const double chi_s = connection_value(0.25, grid.s_grid[j], 2.5e-4);
                for (size_t i = 0; i < grid.t_grid.size(); ++i)
                    coherence = std::max(coherence,
                                         std::abs(grid.w[j][i] - grid.t_grid[i] - chi_s));
            }
            bool monotone = true;
            for (size_t j = 1; j < grid.energies.size(); ++j)
                monotone = monotone && grid.energies[j] <= grid.energies[j - 1] + 1e-8;
            const bool ok = coherence < 1e-6 && monotone && grid.residual < 1e-4;
            add("appendix", "appendix.cylinder",
                "t-constant cylinder data tracks the scalar ODE; energy decays; converges to the minimum",
                ok, "coherence " + fmt12(coherence) + ", residual " + fmt12(grid.residual));
        }
        {
            const FlatTorus torus(1);
            const Hamiltonian free_h = free_hamiltonian(torus);
            const HamiltonianOrbit closed = integrate_orbit(
                free_h, Eigen::VectorXd::Constant(1, 0.3), Eigen::VectorXd::Constant(1, torus.metric_scale * 2.0), 1000);
            const HamiltonianOrbit open_orbit = integrate_orbit(
                free_h, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, torus.metric_scale * 1.5), 1000);
            const PendulumPotential pot{1, 0.2};
            const HamiltonianOrbit pert = integrate_orbit(
                pendulum_hamiltonian(pot), Eigen::VectorXd::Constant(1, pot.q0),
                Eigen::VectorXd::Constant(1, torus.metric_scale), 1000);
            const bool ok = closed.closure_defect < 1e-10 && closed.energy_drift < 1e-9 &&
                            std::abs(open_orbit.closure_defect - 0.5) < 1e-10 && pert.closure_defect < 1e-8;
            add("appendix", "appendix.orbit_closure",
                "lattice momenta close up (defect < 1e-10), half-integer momenta miss by 1/2, "
                "perturbed solutions close (defect < 1e-8)",
                ok,
                "defects " + fmt12(closed.closure_defect) + ", " + fmt12(open_orbit.closure_defect) + ", " +
                    fmt12(pert.closure_defect));
        }
    }

    return anchors;
}

int run_paper(const std::string& only, const std::string& json_path)
{
    if (!only.empty() && only != "core" && only != "geodesics" && only != "homology" &&
        only != "index" && only != "appendix")
        throw std::invalid_argument("paper: --only must be one of core, geodesics, homology, index, appendix");

    const std::vector<Anchor> anchors = run_anchors(only);
    int passed = 0;
    for (const auto& a : anchors) {
        std::cout << (a.pass ? "[PASS] " : "[FAIL] ") << a.id << "  " << a.description;
        if (!a.detail.empty()) std::cout << "  (" << a.detail << ")";
        std::cout << "\n";
        if (a.pass) ++passed;
    }
    std::cout << "passed " << passed << "/" << anchors.size() << "\n";

    if (!json_path.empty()) {
        Json arr = Json::array();
        for (const auto& a : anchors) {
            Json e;
            e["id"] = a.id;
            e["category"] = a.category;
            e["description"] = a.description;
            e["pass"] = a.pass;
            e["detail"] = a.detail;
            arr.push_back(std::move(e));
        }
        write_text_file(json_path, arr.dump(2) + "\n");
    }
    return passed == static_cast<int>(anchors.size()) ? 0 : 1;
}

// --------------------------------------------------------------------- main

// Optional JSON config {option: value}: injected as flags right after the
// subcommand name so explicit flags, parsed later, win.
std::vector<std::string> assemble_args(int argc, char** argv)
{
    std::vector<std::string> args;
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--config" && i + 1 < argc) {
            config_path = argv[++i];
            continue;
        }
        args.emplace_back(argv[i]);
    }
    if (config_path.empty()) return args;

    const Json config = read_json_file(config_path);
    std::vector<std::string> injected;
    for (const auto& [key, value] : config.items()) {
        if (value.is_boolean()) {
            if (value.get<bool>()) injected.push_back("--" + key);
            continue;
        }
        injected.push_back("--" + key);
        if (value.is_string()) {
            injected.push_back(value.get<std::string>());
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& item : value) {
                if (!joined.empty()) joined += ",";
                joined += item.is_string() ? item.get<std::string>() : Json(item).dump();
            }
            injected.push_back(joined);
        } else {
            injected.push_back(value.dump());
        }
    }
    const bool has_subcommand = !args.empty() && args.front()[0] != '-';
    args.insert(args.begin() + (has_subcommand ? 1 : 0), injected.begin(), injected.end());
    return args;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"flat-torus loop spaces: geodesics, homology tables, Conley-Zehnder indices, dynamics"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    int geo_n = 1;
    double geo_a = 2.0 * kPi * kPi + 0.01;
    std::string geo_format = "csv", geo_out;
    auto* geodesics_cmd = app.add_subcommand("geodesics", "enumerate critical components below an energy bound");
    geodesics_cmd->add_option("--n", geo_n, "torus dimension")->check(CLI::Range(1, 8));
    geodesics_cmd->add_option("--a", geo_a, "energy bound");
    geodesics_cmd->add_option("--format", geo_format)->check(CLI::IsMember({"csv", "json"}));
    geodesics_cmd->add_option("--out", geo_out, "write the table to this path");

    int hom_n = 2;
    std::string hom_k = "1,0", hom_side = "morse", hom_format = "csv", hom_out;
    bool hom_check_all = false;
    auto* homology_cmd = app.add_subcommand("homology", "sublevel homology tables");
    homology_cmd->add_option("--n", hom_n, "torus dimension")->check(CLI::Range(1, 8));
    homology_cmd->add_option("--k", hom_k, "lattice vector fixing the sublevel, comma-separated");
    homology_cmd->add_option("--side", hom_side)->check(CLI::IsMember({"morse", "floer", "singular"}));
    homology_cmd->add_flag("--check-all", hom_check_all, "require agreement of all three computations");
    homology_cmd->add_option("--format", hom_format)->check(CLI::IsMember({"csv", "json"}));
    homology_cmd->add_option("--out", hom_out);

    bool cz_shear = false;
    int cz_n = 1;
    std::string cz_quadratic, cz_exp_path, cz_out;
    auto* cz_cmd = app.add_subcommand("cz", "Conley-Zehnder / Robbin-Salamon index reports");
    cz_cmd->add_flag("--shear", cz_shear, "index of the geodesic shear path");
    cz_cmd->add_option("--n", cz_n, "block count for --shear")->check(CLI::Range(1, 16));
    cz_cmd->add_option("--quadratic", cz_quadratic, "diagonal of S; nondegenerate index formula");
    cz_cmd->add_option("--exp-path", cz_exp_path, "diagonal of S; crossing-sum index of exp(-t J0 S)");
    cz_cmd->add_option("--out", cz_out, "write the index report JSON to this path");

    long long pert_k = 1;
    double pert_q0 = 0.0;
    std::string pert_out;
    auto* perturb_cmd = app.add_subcommand("perturb", "perturbed-component report");
    perturb_cmd->add_option("--k", pert_k, "winding of the perturbed component");
    perturb_cmd->add_option("--q0", pert_q0, "base point");
    perturb_cmd->add_option("--out", pert_out);

    std::optional<double> flow_chi, flow_chi0;
    bool flow_orbit = false, flow_cylinder = false;
    std::string flow_range = "-20,20", flow_k = "1", flow_u0, flow_v0, flow_w0, flow_out, flow_out_loop;
    int flow_n = 1, flow_steps = 0, flow_t_points = 256;
    double flow_q0 = 0.0, flow_s_max = 15.0, flow_s_step = 1e-3;
    auto* flow_cmd = app.add_subcommand("flow", "integrate the connection ODE, a Hamiltonian orbit, or the cylinder equation");
    flow_cmd->add_option("--chi", flow_chi, "connection ODE from this initial value");
    flow_cmd->add_option("--range", flow_range, "s-window a,b for --chi");
    flow_cmd->add_flag("--orbit", flow_orbit, "integrate a free Hamiltonian orbit");
    flow_cmd->add_option("--n", flow_n, "torus dimension for --orbit")->check(CLI::Range(1, 8));
    flow_cmd->add_option("--k", flow_k, "lattice momentum (--orbit) or winding (--cylinder)");
    flow_cmd->add_option("--u0", flow_u0, "initial position override, comma-separated");
    flow_cmd->add_option("--v0", flow_v0, "initial covector override, comma-separated");
    flow_cmd->add_option("--steps", flow_steps, "integration steps (0 = default)");
    flow_cmd->add_flag("--cylinder", flow_cylinder, "evolve the cylinder equation");
    flow_cmd->add_option("--q0", flow_q0, "cylinder base point");
    flow_cmd->add_option("--chi0", flow_chi0, "t-constant initial offset for --cylinder");
    flow_cmd->add_option("--w0", flow_w0, "initial loop JSON for --cylinder");
    flow_cmd->add_option("--s-max", flow_s_max, "cylinder evolution time");
    flow_cmd->add_option("--t-points", flow_t_points, "cylinder circle resolution");
    flow_cmd->add_option("--s-step", flow_s_step, "cylinder time step");
    flow_cmd->add_option("--out", flow_out, "trajectory/grid export path");
    flow_cmd->add_option("--out-loop", flow_out_loop, "write the final cylinder slice as loop JSON");

    std::string paper_only, paper_json;
    auto* paper_cmd = app.add_subcommand("paper", "run every anchored value and report PASS/FAIL");
    paper_cmd->add_option("--only", paper_only, "restrict to one category");
    paper_cmd->add_option("--json", paper_json, "write the machine-readable anchor list here");

    std::vector<std::string> args;
    try {
        args = assemble_args(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (geodesics_cmd->parsed()) return run_geodesics(geo_n, geo_a, geo_format, geo_out);
        if (homology_cmd->parsed())
            return run_homology(hom_n, parse_lattice(hom_k), hom_side, hom_check_all, hom_format, hom_out);
        if (cz_cmd->parsed()) return run_cz(cz_shear, cz_n, cz_quadratic, cz_exp_path, cz_out);
        if (perturb_cmd->parsed()) return run_perturb(pert_k, pert_q0, pert_out);
        if (flow_cmd->parsed()) {
            const int modes = (flow_chi ? 1 : 0) + (flow_orbit ? 1 : 0) + (flow_cylinder ? 1 : 0);
            if (modes != 1) throw std::invalid_argument("flow: pass exactly one of --chi, --orbit, --cylinder");
            if (flow_chi) return run_flow_chi(*flow_chi, flow_range, flow_steps > 0 ? flow_steps : 4000, flow_out);
            if (flow_orbit)
                return run_flow_orbit(flow_n, parse_lattice(flow_k), flow_u0, flow_v0,
                                      flow_steps > 0 ? flow_steps : 1000, flow_out);
            const auto ck = parse_lattice(flow_k);
            if (ck.size() != 1) throw std::invalid_argument("flow: --cylinder needs a scalar --k");
            return run_flow_cylinder(ck[0], flow_q0, flow_chi0, flow_w0, flow_s_max, flow_t_points,
                                     flow_s_step, flow_out, flow_out_loop);
        }
        if (paper_cmd->parsed()) return run_paper(paper_only, paper_json);
    } catch (const malformed_lift_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const unsupported_dimension_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
