#include "loopmorse/homology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "loopmorse/geodesics.hpp"

namespace loopmorse {

namespace {

BigInt abs_big(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

// Row and column operations tracked in U and V.

void swap_rows(BigMat& m, BigMat& u, int a, int b)
{
    if (a == b) return;
    for (int j = 0; j < m.cols; ++j) std::swap(m.at(a, j), m.at(b, j));
    for (int j = 0; j < u.cols; ++j) std::swap(u.at(a, j), u.at(b, j));
}

void swap_cols(BigMat& m, BigMat& v, int a, int b)
{
    if (a == b) return;
    for (int i = 0; i < m.rows; ++i) std::swap(m.at(i, a), m.at(i, b));
    for (int i = 0; i < v.rows; ++i) std::swap(v.at(i, a), v.at(i, b));
}

// row[a] -= q * row[b]
void add_row(BigMat& m, BigMat& u, int a, int b, const BigInt& q)
{
    if (q == 0) return;
    for (int j = 0; j < m.cols; ++j) m.at(a, j) -= q * m.at(b, j);
    for (int j = 0; j < u.cols; ++j) u.at(a, j) -= q * u.at(b, j);
}

// col[a] -= q * col[b]
void add_col(BigMat& m, BigMat& v, int a, int b, const BigInt& q)
{
    if (q == 0) return;
    for (int i = 0; i < m.rows; ++i) m.at(i, a) -= q * m.at(i, b);
    for (int i = 0; i < v.rows; ++i) v.at(i, a) -= q * v.at(i, b);
}

void negate_row(BigMat& m, BigMat& u, int a)
{
    for (int j = 0; j < m.cols; ++j) m.at(a, j) = -m.at(a, j);
    for (int j = 0; j < u.cols; ++j) u.at(a, j) = -u.at(a, j);
}

// g = s*a + w*b with g = gcd(a, b) >= 0.
void ext_gcd(const BigInt& a, const BigInt& b, BigInt& g, BigInt& s, BigInt& w)
{
    BigInt r0 = a, r1 = b, s0 = 1, s1 = 0, w0 = 0, w1 = 1;
    while (r1 != 0) {
        const BigInt q = r0 / r1;
        r0 -= q * r1; std::swap(r0, r1);
        s0 -= q * s1; std::swap(s0, s1);
        w0 -= q * w1; std::swap(w0, w1);
    }
    if (r0 < 0) { r0 = -r0; s0 = -s0; w0 = -w0; }
    g = r0; s = s0; w = w0;
}

// Unimodular 2x2 transform on rows t and i putting gcd(d(t,t), d(i,t)) at
// the pivot and zero below it.  When the pivot already divides, this is a
// plain elimination that leaves row t untouched -- the property that stops
// repeated passes from re-polluting each other.
void gcd_rows(BigMat& m, BigMat& u, int t, int i)
{
    const BigInt a = m.at(t, t), b = m.at(i, t);
    if (b == 0) return;
    if (a != 0 && b % a == 0) { add_row(m, u, i, t, b / a); return; }
    BigInt g, s, w;
    ext_gcd(a, b, g, s, w);
    const BigInt p = a / g, q = b / g;
    for (int j = 0; j < m.cols; ++j) {
        const BigInt rt = m.at(t, j), ri = m.at(i, j);
        m.at(t, j) = s * rt + w * ri;
        m.at(i, j) = p * ri - q * rt;
    }
    for (int j = 0; j < u.cols; ++j) {
        const BigInt rt = u.at(t, j), ri = u.at(i, j);
        u.at(t, j) = s * rt + w * ri;
        u.at(i, j) = p * ri - q * rt;
    }
}

void gcd_cols(BigMat& m, BigMat& v, int t, int j)
{
    const BigInt a = m.at(t, t), b = m.at(t, j);
    if (b == 0) return;
    if (a != 0 && b % a == 0) { add_col(m, v, j, t, b / a); return; }
    BigInt g, s, w;
    ext_gcd(a, b, g, s, w);
    const BigInt p = a / g, q = b / g;
    for (int i = 0; i < m.rows; ++i) {
        const BigInt ct = m.at(i, t), cj = m.at(i, j);
        m.at(i, t) = s * ct + w * cj;
        m.at(i, j) = p * cj - q * ct;
    }
    for (int i = 0; i < v.rows; ++i) {
        const BigInt ct = v.at(i, t), cj = v.at(i, j);
        v.at(i, t) = s * ct + w * cj;
        v.at(i, j) = p * cj - q * ct;
    }
}

long long to_ll(const BigInt& x)
{
    return x.convert_to<long long>();
}

long long binomial(int n, int k)
{
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

BigMat BigMat::identity(int n)
{
    BigMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

BigMat BigMat::from_rows(const std::vector<std::vector<long long>>& rows)
{
    const int r = static_cast<int>(rows.size());
    const int c = r > 0 ? static_cast<int>(rows[0].size()) : 0;
    BigMat m(r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[static_cast<size_t>(i)].size()) != c)
            throw std::invalid_argument("BigMat::from_rows: ragged rows");
        for (int j = 0; j < c; ++j)
            m.at(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    return m;
}

BigMat multiply(const BigMat& a, const BigMat& b)
{
    if (a.cols != b.rows) throw std::invalid_argument("BigMat multiply: shape mismatch");
    BigMat out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const BigInt& aik = a.at(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < b.cols; ++j)
                out.at(i, j) += aik * b.at(k, j);
        }
    return out;
}

bool operator==(const BigMat& a, const BigMat& b)
{
    return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
}

BigInt determinant(const BigMat& m)
{
    if (m.rows != m.cols) throw std::invalid_argument("determinant: matrix not square");
    const int n = m.rows;
    if (n == 0) return 1;

    // Bareiss fraction-free elimination; divisions are exact.
    BigMat a = m;
    BigInt prev = 1;
    int sign = 1;
    for (int k = 0; k + 1 < n; ++k) {
        if (a.at(k, k) == 0) {
            int pivot = -1;
            for (int i = k + 1; i < n; ++i)
                if (a.at(i, k) != 0) { pivot = i; break; }
            if (pivot < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(pivot, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j)
                a.at(i, j) = (a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j)) / prev;
            a.at(i, k) = 0;
        }
        prev = a.at(k, k);
    }
    return sign > 0 ? a.at(n - 1, n - 1) : BigInt(-a.at(n - 1, n - 1));
}

SnfResult smith_normal_form(const BigMat& m)
{
    BigMat d = m;
    BigMat u = BigMat::identity(m.rows);
    BigMat v = BigMat::identity(m.cols);
    const int steps = std::min(m.rows, m.cols);

    // Clears column t then row t with gcd transforms.  A pass that only used
    // plain eliminations leaves the other line intact, so the loop exits; a
    // pass that needed a general transform replaced the pivot by a proper
    // divisor, which happens at most log2(pivot) times.
    const auto clear_cross = [&](int t) {
        while (true) {
            for (int i = t + 1; i < d.rows; ++i) gcd_rows(d, u, t, i);
            for (int j = t + 1; j < d.cols; ++j) gcd_cols(d, v, t, j);
            bool clean = true;
            for (int i = t + 1; i < d.rows && clean; ++i) clean = d.at(i, t) == 0;
            for (int j = t + 1; j < d.cols && clean; ++j) clean = d.at(t, j) == 0;
            if (clean) return;
        }
    };

    // Phase 1: diagonalize.  Divisibility is deliberately ignored here;
    // interleaving it with the clearing blows the coefficients up.
    int rank = 0;
    for (int t = 0; t < steps; ++t) {
        int pi = -1, pj = -1;
        BigInt best = 0;
        for (int i = t; i < d.rows; ++i)
            for (int j = t; j < d.cols; ++j) {
                if (d.at(i, j) == 0) continue;
                const BigInt mag = abs_big(d.at(i, j));
                if (pi < 0 || mag < best) { pi = i; pj = j; best = mag; }
            }
        if (pi < 0) break; // trailing block is zero

        swap_rows(d, u, t, pi);
        swap_cols(d, v, t, pj);
        clear_cross(t);
        rank = t + 1;
    }

    // Phase 2: repair the divisibility chain on the diagonal.  Each offending
    // adjacent pair (a, b) is turned into (gcd, +-lcm) by folding b into row
    // t and re-clearing the 2x2 block; entries stay bounded by |a*b|.
    bool changed = true;
    while (changed) {
        changed = false;
        for (int t = 0; t + 1 < rank; ++t) {
            if (d.at(t + 1, t + 1) % d.at(t, t) == 0) continue;
            add_row(d, u, t, t + 1, BigInt(-1)); // row t += row t+1
            clear_cross(t);
            changed = true;
        }
    }
    for (int t = 0; t < rank; ++t)
        if (d.at(t, t) < 0) negate_row(d, u, t);

    return SnfResult{std::move(u), std::move(d), std::move(v)};
}

int snf_rank(const BigMat& m)
{
    if (m.rows == 0 || m.cols == 0) return 0;
    const SnfResult snf = smith_normal_form(m);
    int r = 0;
    for (int i = 0; i < std::min(m.rows, m.cols); ++i)
        if (snf.D.at(i, i) != 0) ++r;
    return r;
}

int mod2_rank(const BigMat& m)
{
    if (m.rows == 0 || m.cols == 0) return 0;
    const SnfResult snf = smith_normal_form(m);
    int r = 0;
    for (int i = 0; i < std::min(m.rows, m.cols); ++i)
        if (snf.D.at(i, i) % 2 != 0) ++r;
    return r;
}

void IntegerChainComplex::validate() const
{
    if (ranks.empty()) throw invalid_complex_error("chain complex: empty degree range");
    for (long long r : ranks)
        if (r < 0) throw invalid_complex_error("chain complex: negative rank");
    if (boundaries.size() + 1 != ranks.size())
        throw invalid_complex_error("chain complex: boundary count does not match degree range");
    for (size_t i = 0; i < boundaries.size(); ++i) {
        if (boundaries[i].rows != ranks[i] || boundaries[i].cols != ranks[i + 1])
            throw invalid_complex_error("chain complex: boundary shape mismatch");
    }
    for (size_t i = 0; i + 1 < boundaries.size(); ++i) {
        const BigMat prod = multiply(boundaries[i], boundaries[i + 1]);
        for (const BigInt& x : prod.data)
            if (x != 0) throw invalid_complex_error("chain complex: boundary composition is nonzero");
    }
}

HomologyTable homology_of_complex(const IntegerChainComplex& c, const std::string& label)
{
    c.validate();
    HomologyTable table;
    table.label = label;
    table.grading = GradingConvention::homological;

    const int degrees = static_cast<int>(c.ranks.size());
    for (int i = 0; i < degrees; ++i) {
        // boundary out of degree lowest+i is boundaries[i-1]; into it, boundaries[i].
        HomologyGroup g;
        long long rank_out = 0;
        long long rank_in = 0;
        if (i > 0) rank_out = snf_rank(c.boundaries[static_cast<size_t>(i - 1)]);
        if (i < degrees - 1) {
            const SnfResult snf = smith_normal_form(c.boundaries[static_cast<size_t>(i)]);
            const int lim = std::min(c.boundaries[static_cast<size_t>(i)].rows,
                                     c.boundaries[static_cast<size_t>(i)].cols);
            for (int s = 0; s < lim; ++s) {
                const BigInt& dss = snf.D.at(s, s);
                if (dss == 0) continue;
                ++rank_in;
                if (dss > 1) g.torsion.push_back(to_ll(dss));
            }
        }
        g.free_rank = c.ranks[static_cast<size_t>(i)] - rank_out - rank_in;
        table.entries[c.lowest + i] = std::move(g);
    }
    return table;
}

HomologyTable mod2_homology_of_complex(const IntegerChainComplex& c, const std::string& label)
{
    c.validate();
    HomologyTable table;
    table.label = label;
    table.grading = GradingConvention::homological;

    const int degrees = static_cast<int>(c.ranks.size());
    for (int i = 0; i < degrees; ++i) {
        HomologyGroup g;
        long long rank_out = 0;
        long long rank_in = 0;
        if (i > 0) rank_out = mod2_rank(c.boundaries[static_cast<size_t>(i - 1)]);
        if (i < degrees - 1) rank_in = mod2_rank(c.boundaries[static_cast<size_t>(i)]);
        g.free_rank = c.ranks[static_cast<size_t>(i)] - rank_out - rank_in;
        table.entries[c.lowest + i] = std::move(g);
    }
    return table;
}

IntegerChainComplex torus_cw_complex(int n)
{
    if (n < 1) throw std::invalid_argument("torus_cw_complex: dimension must be positive");
    IntegerChainComplex c;
    c.lowest = 0;
    for (int i = 0; i <= n; ++i) c.ranks.push_back(binomial(n, i));
    for (int i = 0; i < n; ++i)
        c.boundaries.emplace_back(static_cast<int>(c.ranks[static_cast<size_t>(i)]),
                                  static_cast<int>(c.ranks[static_cast<size_t>(i + 1)]));
    return c;
}

IntegerChainComplex morse_bott_complex(const FlatTorus& torus, double action_bound)
{
    const auto components = enumerate_components(torus, action_bound);
    const long long count = static_cast<long long>(components.size());
    IntegerChainComplex c = torus_cw_complex(torus.dim);
    for (auto& r : c.ranks) r *= count;
    for (size_t i = 0; i < c.boundaries.size(); ++i)
        c.boundaries[i] = BigMat(static_cast<int>(c.ranks[i]), static_cast<int>(c.ranks[i + 1]));
    return c;
}

HomologyTable morse_bott_homology(const FlatTorus& torus, double action_bound)
{
    return homology_of_complex(morse_bott_complex(torus, action_bound), "morse_bott");
}

HomologyTable floer_bott_cohomology(const FlatTorus& torus, double action_bound)
{
    const HomologyTable morse = morse_bott_homology(torus, action_bound);
    HomologyTable table;
    table.label = "floer_bott";
    table.grading = GradingConvention::cohomological_negative;
    for (const auto& [degree, group] : morse.entries)
        table.entries[-degree] = group;
    return table;
}

HomologyTable sublevel_singular_homology(const FlatTorus& torus, const LatticeVector& k)
{
    if (static_cast<int>(k.size()) != torus.dim)
        throw std::invalid_argument("sublevel_singular_homology: winding dimension mismatch");

    // Lattice points with |l|^2 <= |k|^2, by direct box enumeration over
    // integers; no floating point and no shared code with the component scan.
    const long long bound_sq = norm_sq(k);
    const long long box = static_cast<long long>(std::floor(std::sqrt(static_cast<double>(bound_sq)))) + 1;
    long long count = 0;
    std::vector<long long> l(static_cast<size_t>(torus.dim), -box);
    while (true) {
        long long s = 0;
        for (long long c : l) s += c * c;
        if (s <= bound_sq) ++count;
        int j = 0;
        while (j < torus.dim) {
            if (++l[static_cast<size_t>(j)] <= box) break;
            l[static_cast<size_t>(j)] = -box;
            ++j;
        }
        if (j == torus.dim) break;
    }

    HomologyTable table;
    table.label = "sublevel_singular";
    table.grading = GradingConvention::homological;
    for (int i = 0; i <= torus.dim; ++i) {
        HomologyGroup g;
        g.free_rank = binomial(torus.dim, i) * count;
        table.entries[i] = std::move(g);
    }
    return table;
}

IntegerChainComplex morse_witten_complex_perturbed(long long k, std::optional<int> orbit_parity)
{
    if (k == 0)
        throw std::invalid_argument("morse_witten_complex_perturbed: winding must be nonzero");
    if (!orbit_parity.has_value())
        throw std::invalid_argument("morse_witten_complex_perturbed: orbit parity input missing");
    if (*orbit_parity != 0 && *orbit_parity != 1)
        throw std::invalid_argument("morse_witten_complex_perturbed: parity must be 0 or 1");

    IntegerChainComplex c;
    c.lowest = 0;
    c.ranks = {1, 1}; // degree 0: the minimum; degree 1: the maximum
    BigMat d(1, 1);
    d.at(0, 0) = *orbit_parity;
    c.boundaries.push_back(std::move(d));
    return c;
}

} // namespace loopmorse
