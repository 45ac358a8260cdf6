#pragma once

/// Integer chain complexes and their homology, computed exactly through
/// Smith normal form over arbitrary-precision integers, together with the
/// specific complexes attached to loop spaces of flat tori: the critical
/// manifold complex below an action bound, its cohomological regrading, the
/// sublevel-set singular homology, and the two-generator mod-2 complex of the
/// pendulum perturbation.

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loopmorse/errors.hpp"
#include "loopmorse/torus.hpp"

namespace loopmorse {

using BigInt = boost::multiprecision::cpp_int;

// Dense integer matrix, row major.  Small sizes only; exactness over speed.
struct BigMat {
    int rows = 0;
    int cols = 0;
    std::vector<BigInt> data;

    BigMat() = default;
    BigMat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), 0) {}

    BigInt& at(int i, int j) { return data[static_cast<size_t>(i) * static_cast<size_t>(cols) + static_cast<size_t>(j)]; }
    const BigInt& at(int i, int j) const { return data[static_cast<size_t>(i) * static_cast<size_t>(cols) + static_cast<size_t>(j)]; }

    static BigMat identity(int n);
    static BigMat from_rows(const std::vector<std::vector<long long>>& rows);
};

BigMat multiply(const BigMat& a, const BigMat& b);
bool operator==(const BigMat& a, const BigMat& b);

// Exact determinant by fraction-free elimination.
BigInt determinant(const BigMat& m);

struct SnfResult {
    BigMat U; // rows x rows, |det| = 1
    BigMat D; // diagonal, nonnegative, d1 | d2 | ...
    BigMat V; // cols x cols, |det| = 1
};

// U * M * V = D with unimodular U, V.
SnfResult smith_normal_form(const BigMat& m);

// Number of nonzero diagonal entries of the Smith form; the rank over Q.
int snf_rank(const BigMat& m);

// Rank of the matrix over the field with two elements, read off the Smith
// form: unimodular factors stay invertible mod 2, so the mod-2 rank is the
// number of odd invariant factors.
int mod2_rank(const BigMat& m);

// Bounded chain complex of free abelian groups.  boundaries[i] maps degree
// lowest+i+1 to degree lowest+i and has shape ranks[i] x ranks[i+1].
struct IntegerChainComplex {
    int lowest = 0;
    std::vector<long long> ranks;
    std::vector<BigMat> boundaries;

    int highest() const { return lowest + static_cast<int>(ranks.size()) - 1; }
    void validate() const; // shapes and d*d = 0
};

struct HomologyGroup {
    long long free_rank = 0;
    std::vector<long long> torsion; // invariant factors > 1, each dividing the next
};

enum class GradingConvention { homological, cohomological_negative };

struct HomologyTable {
    std::string label;
    GradingConvention grading = GradingConvention::homological;
    std::map<int, HomologyGroup> entries;
};

HomologyTable homology_of_complex(const IntegerChainComplex& c, const std::string& label = "homology");

// Same complex read with coefficients in the field with two elements.
HomologyTable mod2_homology_of_complex(const IntegerChainComplex& c, const std::string& label = "homology_mod2");

// Minimal CW structure of the n-torus: binomial(n, i) cells in degree i and
// zero boundary maps.
IntegerChainComplex torus_cw_complex(int n);

// One torus_cw_complex block per geodesic component below the action bound.
IntegerChainComplex morse_bott_complex(const FlatTorus& torus, double action_bound);

HomologyTable morse_bott_homology(const FlatTorus& torus, double action_bound);

// Same groups placed in degree -i (cohomological indexing of the fixed-point
// Floer theory of the kinetic flow).
HomologyTable floer_bott_cohomology(const FlatTorus& torus, double action_bound);

// Singular homology of the sublevel set through the disk-bundle description:
// rank binomial(n, i) times the number of lattice vectors l with |l| <= |k|,
// counted by direct enumeration.
HomologyTable sublevel_singular_homology(const FlatTorus& torus, const LatticeVector& k);

// Two-generator mod-2 complex of the pendulum perturbation on a winding-k
// circle component; the boundary coefficient is the parity of the connecting
// orbit count, which the caller must supply.
IntegerChainComplex morse_witten_complex_perturbed(long long k, std::optional<int> orbit_parity);

} // namespace loopmorse
