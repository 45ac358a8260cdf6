#include "loopmorse/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace loopmorse {
namespace {

Json rounded(double x) { return Json(round12(x)); }

}  // namespace

std::string fmt12(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double round12(double x) { return std::strtod(fmt12(x).c_str(), nullptr); }

Json loop_to_json(const LoopSample& loop)
{
    Json j;
    j["dim"] = loop.dim();
    j["N"] = loop.size();
    j["winding"] = loop.winding();
    Json rows = Json::array();
    for (long long i = 0; i < loop.size(); ++i) {
        Json row = Json::array();
        for (int c = 0; c < loop.dim(); ++c) row.push_back(rounded(loop.samples()(i, c)));
        rows.push_back(std::move(row));
    }
    j["samples"] = std::move(rows);
    return j;
}

LoopSample loop_from_json(const Json& j)
{
    const int dim = j.at("dim").get<int>();
    const auto n = j.at("N").get<long long>();
    const auto winding = j.at("winding").get<std::vector<long long>>();
    const auto& rows = j.at("samples");
    if (static_cast<long long>(rows.size()) != n)
        throw std::invalid_argument("loop_from_json: N does not match the sample count");
    Eigen::MatrixXd samples(n, dim);
    for (long long i = 0; i < n; ++i) {
        const auto& row = rows.at(static_cast<size_t>(i));
        if (static_cast<int>(row.size()) != dim)
            throw std::invalid_argument("loop_from_json: sample row width does not match dim");
        for (int c = 0; c < dim; ++c) samples(i, c) = row.at(static_cast<size_t>(c)).get<double>();
    }
    return LoopSample::make(FlatTorus(dim), samples, winding);
}

Json homology_to_json(const HomologyTable& table)
{
    Json j;
    j["label"] = table.label;
    j["grading"] = table.grading == GradingConvention::homological ? "homological" : "cohomological_negative";
    Json entries = Json::array();
    for (const auto& [degree, group] : table.entries) {
        Json e;
        e["degree"] = degree;
        e["free_rank"] = group.free_rank;
        e["torsion"] = group.torsion;
        entries.push_back(std::move(e));
    }
    j["entries"] = std::move(entries);
    return j;
}

std::string homology_to_csv(const HomologyTable& table)
{
    std::ostringstream out;
    out << "degree,free_rank,torsion\n";
    for (const auto& [degree, group] : table.entries) {
        out << degree << ',' << group.free_rank << ',';
        for (size_t i = 0; i < group.torsion.size(); ++i) {
            if (i) out << ';';
            out << group.torsion[i];
        }
        out << '\n';
    }
    return out.str();
}

Json index_to_json(const IndexResult& result)
{
    Json j;
    j["path_kind"] = result.path_kind;
    j["n"] = result.n;
    switch (result.method) {
        case IndexMethod::crossing_sum: j["method"] = "crossing_sum"; break;
        case IndexMethod::homotopy_decomposition: j["method"] = "homotopy_decomposition"; break;
        case IndexMethod::sz_formula: j["method"] = "sz_formula"; break;
    }
    Json crossings = Json::array();
    for (const auto& c : result.crossings) {
        Json e;
        e["t"] = rounded(c.t);
        e["kernel_dim"] = c.kernel.cols();
        e["signature"] = c.signature;
        e["boundary"] = c.boundary;
        crossings.push_back(std::move(e));
    }
    j["crossings"] = std::move(crossings);
    j["value_num"] = result.value.num;
    j["value_den"] = 2;
    return j;
}

std::string components_to_csv(const std::vector<GeodesicComponent>& components, int dim)
{
    std::ostringstream out;
    for (int c = 0; c < dim; ++c) out << 'k' << (c + 1) << ',';
    out << "energy,morse_index,nullity\n";
    for (const auto& comp : components) {
        for (int c = 0; c < dim; ++c) out << comp.k[static_cast<size_t>(c)] << ',';
        out << fmt12(comp.energy_value) << ',' << comp.morse_index << ',' << comp.nullity << '\n';
    }
    return out.str();
}

Json spectrum_to_json(const SpectrumReport& report)
{
    Json j;
    Json eigenvalues = Json::array();
    for (const auto& [value, multiplicity] : report.eigenvalues) {
        Json e;
        e["value"] = rounded(value);
        e["multiplicity"] = multiplicity;
        eigenvalues.push_back(std::move(e));
    }
    j["eigenvalues"] = std::move(eigenvalues);
    j["kernel_dim"] = report.kernel_dim;
    j["negative_count"] = report.negative_count;
    return j;
}

std::string trajectory_to_csv(const FlowTrajectory& traj)
{
    std::ostringstream out;
    out << "# limits," << chi_limit_label(traj.backward) << ',' << chi_limit_label(traj.forward) << '\n';
    out << "s,chi\n";
    for (size_t i = 0; i < traj.s_grid.size(); ++i)
        out << fmt12(traj.s_grid[i]) << ',' << fmt12(traj.chi[i]) << '\n';
    return out.str();
}

Json cylinder_to_json(const CylinderGrid& grid)
{
    Json j;
    j["k"] = grid.k;
    j["q0"] = rounded(grid.q0);
    Json s = Json::array();
    for (double v : grid.s_grid) s.push_back(rounded(v));
    j["s_grid"] = std::move(s);
    Json t = Json::array();
    for (double v : grid.t_grid) t.push_back(rounded(v));
    j["t_grid"] = std::move(t);
    Json w = Json::array();
    for (const auto& slice : grid.w) {
        Json row = Json::array();
        for (double v : slice) row.push_back(rounded(v));
        w.push_back(std::move(row));
    }
    j["w"] = std::move(w);
    Json energies = Json::array();
    for (double v : grid.energies) energies.push_back(rounded(v));
    j["energies"] = std::move(energies);
    j["residual"] = rounded(grid.residual);
    return j;
}

void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Json read_json_file(const std::string& path) { return Json::parse(read_text_file(path)); }

}  // namespace loopmorse
