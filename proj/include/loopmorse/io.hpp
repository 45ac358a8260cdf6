#pragma once

// Serialization of the library's result types.  JSON objects keep a fixed
// field order and all floating-point values are rounded to 12 significant
// digits before storage, so identical computations serialize byte-identically.

#include <string>
#include <vector>

#include <json.hpp>

#include "loopmorse/flows.hpp"
#include "loopmorse/geodesics.hpp"
#include "loopmorse/homology.hpp"
#include "loopmorse/symplectic.hpp"
#include "loopmorse/torus.hpp"

namespace loopmorse {

using Json = nlohmann::ordered_json;

// "%.12g" rendering and its round-tripped double value.
std::string fmt12(double x);
double round12(double x);

// Loops: {dim, N, winding: [int], samples: [[real]]}.
Json loop_to_json(const LoopSample& loop);
LoopSample loop_from_json(const Json& j);

// Homology tables: {label, grading, entries: [{degree, free_rank, torsion}]}.
Json homology_to_json(const HomologyTable& table);
std::string homology_to_csv(const HomologyTable& table);

// Index reports: {path_kind, n, method, crossings: [{t, kernel_dim,
// signature, boundary}], value_num, value_den = 2}.
Json index_to_json(const IndexResult& result);

// Component tables: CSV columns k_1..k_n, energy, morse_index, nullity.
std::string components_to_csv(const std::vector<GeodesicComponent>& components, int dim);

// Spectra: {eigenvalues: [{value, multiplicity}], kernel_dim, negative_count}.
Json spectrum_to_json(const SpectrumReport& report);

// Connection-ODE trajectories: CSV columns s, chi plus a limits header row.
std::string trajectory_to_csv(const FlowTrajectory& traj);

// Cylinder grids: {k, q0, s_grid, t_grid, w, energies, residual}.
Json cylinder_to_json(const CylinderGrid& grid);

// Whole-file helpers.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
Json read_json_file(const std::string& path);

}  // namespace loopmorse
