#include "colucb/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "colucb/errors.hpp"

namespace colucb {
namespace oracle {

namespace {

/// Solves the dense square system M z = b by Gaussian elimination with
/// partial pivoting; returns false when M is (numerically) singular.
bool solve_square(std::vector<std::vector<double>> M, std::vector<double> b,
                  std::vector<double>& z) {
    const std::size_t n = M.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
        if (std::fabs(M[piv][col]) < 1e-11) return false;
        std::swap(M[piv], M[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = M[r][col] / M[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) M[r][c] -= f * M[col][c];
            b[r] -= f * b[col];
        }
    }
    z.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= M[i][c] * z[c];
        z[i] = acc / M[i][i];
    }
    return true;
}

} // namespace

double lp_value_by_vertex_enumeration(const LpProblem& lp) {
    lp.validate();
    const std::size_t n = lp.num_vars;
    const std::size_t m = lp.num_rows();
    if (m == 0) throw InvalidArgument("vertex enumeration: needs at least one row");

    // Slack form: one column per variable, plus +1/-1 slack columns for
    // inequality rows.  A basic solution picks m columns and solves exactly.
    std::vector<std::vector<double>> cols;   // cols[j][i] = coefficient in row i
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> c(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) c[i] = lp.rows[i][j];
        cols.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (lp.senses[i] == RowSense::Eq) continue;
        std::vector<double> c(m, 0.0);
        c[i] = lp.senses[i] == RowSense::Le ? 1.0 : -1.0;
        cols.push_back(std::move(c));
    }
    const std::size_t N = cols.size();
    if (N < m) throw InvalidArgument("vertex enumeration: more rows than columns");

    double scale = 1.0;
    for (double b : lp.rhs) scale = std::max(scale, std::fabs(b));
    const double tol = 1e-7 * scale;

    bool found = false;
    double best = -std::numeric_limits<double>::infinity();

    std::vector<std::size_t> comb(m);
    std::iota(comb.begin(), comb.end(), 0);
    for (;;) {
        std::vector<std::vector<double>> B(m, std::vector<double>(m));
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t i = 0; i < m; ++i) B[i][k] = cols[comb[k]][i];
        std::vector<double> z;
        if (solve_square(std::move(B), lp.rhs, z)) {
            bool feas = true;
            for (double v : z) feas = feas && v >= -tol;
            if (feas) {
                std::vector<double> x(n, 0.0);
                for (std::size_t k = 0; k < m; ++k)
                    if (comb[k] < n) x[comb[k]] = std::max(0.0, z[k]);
                // Re-check the original rows (guards against solve error on
                // near-singular bases).
                for (std::size_t i = 0; i < m && feas; ++i) {
                    double dot = 0.0;
                    for (std::size_t j = 0; j < n; ++j) dot += lp.rows[i][j] * x[j];
                    switch (lp.senses[i]) {
                        case RowSense::Le: feas = dot <= lp.rhs[i] + tol; break;
                        case RowSense::Ge: feas = dot >= lp.rhs[i] - tol; break;
                        case RowSense::Eq: feas = std::fabs(dot - lp.rhs[i]) <= tol; break;
                    }
                }
                if (feas) {
                    double val = 0.0;
                    for (std::size_t j = 0; j < n; ++j) val += lp.objective[j] * x[j];
                    best = std::max(best, val);
                    found = true;
                }
            }
        }
        // Next lexicographic m-combination of {0..N-1}.
        std::size_t k = m;
        while (k-- > 0) {
            if (comb[k] + (m - k) < N) {
                ++comb[k];
                for (std::size_t j = k + 1; j < m; ++j) comb[j] = comb[j - 1] + 1;
                break;
            }
            if (k == 0) {
                if (!found)
                    throw InternalError("vertex enumeration: no feasible basic solution");
                return best;
            }
        }
    }
}

Rational t0_by_subset_enumeration(const GroupStructure& structure) {
    structure.validate();
    const unsigned G = structure.num_groups();
    if (G > 24) throw InvalidArgument("t0 enumeration: more than 24 groups");
    const std::uint64_t all = (G == 64) ? ~0ULL : ((1ULL << G) - 1);

    std::int64_t bn = 0, bd = 1;   // best ratio as a fraction
    for (std::uint64_t mask = 1; mask <= all; ++mask) {
        Bits64 inside;
        Bits64 outside_cov;
        for (unsigned g = 0; g < G; ++g) {
            if ((mask >> g) & 1) inside = inside | structure.groups[g];
            else outside_cov = outside_cov | structure.groups[g];
        }
        const std::int64_t num = (std::int64_t)inside.minus(outside_cov).count();
        const std::int64_t den = (std::int64_t)Bits64(mask).count();
        if (num * bd > bn * den) { bn = num; bd = den; }
    }
    const std::int64_t g = std::gcd(bn, bd);
    return Rational{bn / (g ? g : 1), bd / (g ? g : 1)};
}

CoverEnum cover_by_enumeration(const GroupStructure& structure, Bits64 S) {
    structure.validate();
    const unsigned G = structure.num_groups();
    if (G > 20) throw InvalidArgument("cover enumeration: more than 20 groups");
    if (S.empty() || !S.subset_of(structure.all_arms()))
        throw InvalidArgument("cover enumeration: S must be a nonempty subset of the arms");

    Bits64 touching;
    for (unsigned g = 0; g < G; ++g)
        if (structure.groups[g].intersects(S)) touching.set(g);

    CoverEnum out;
    for (std::uint64_t mask = 1; mask < (1ULL << G); ++mask) {
        Bits64 cov;
        for (unsigned g : Bits64(mask)) cov = cov | structure.groups[g];
        if (!S.subset_of(cov)) continue;
        const std::int64_t size = (std::int64_t)Bits64(mask).count();
        if (out.cover_count < 0 || size < out.cover_count) out.cover_count = size;
        std::int64_t confined = 0;
        for (unsigned g : touching)
            if (structure.groups[g].subset_of(cov)) ++confined;
        if (out.confined_count < 0 || confined < out.confined_count)
            out.confined_count = confined;
    }
    return out;
}

std::int64_t max_flow_by_cut_enumeration(unsigned num_nodes,
                                         const std::vector<FlowEdge>& edges,
                                         unsigned source, unsigned sink) {
    if (num_nodes > 24) throw InvalidArgument("cut enumeration: more than 24 nodes");
    if (source >= num_nodes || sink >= num_nodes || source == sink)
        throw InvalidArgument("cut enumeration: bad source/sink");
    std::int64_t best = -1;
    for (std::uint64_t mask = 0; mask < (1ULL << num_nodes); ++mask) {
        if (!((mask >> source) & 1) || ((mask >> sink) & 1)) continue;
        std::int64_t cap = 0;
        for (const FlowEdge& e : edges)
            if (((mask >> e.from) & 1) && !((mask >> e.to) & 1)) cap += e.capacity;
        if (best < 0 || cap < best) best = cap;
    }
    return best;
}

double all_shared_m_eps(unsigned num_groups, unsigned num_arms, double eps) {
    return (double)num_groups / (eps * (double)num_arms);
}

double all_shared_t_value(unsigned num_groups, unsigned num_arms, double eps) {
    return ((double)num_arms / (2.0 * num_groups)) * (1.0 / (eps * eps) - 1.0);
}

double all_shared_r_value(unsigned num_groups, unsigned num_arms, double eps) {
    return ((double)num_arms / num_groups) * (1.0 / eps - 1.0);
}

double all_shared_eps_t(unsigned num_groups, unsigned num_arms, double t_target) {
    return 1.0 / std::sqrt(1.0 + 2.0 * num_groups * t_target / (double)num_arms);
}

double all_shared_eps_star(unsigned num_groups, unsigned num_arms, std::uint64_t horizon) {
    return std::sqrt((double)num_arms / ((double)num_groups * (double)horizon));
}

LpProblem random_boxed_lp(Rng& rng, unsigned num_vars, unsigned num_rows) {
    if (num_vars == 0 || num_rows == 0)
        throw InvalidArgument("random_boxed_lp: empty problem");
    LpProblem lp;
    lp.num_vars = num_vars;
    for (unsigned j = 0; j < num_vars; ++j)
        lp.objective.push_back(2.0 * rng.uniform01() - 1.0);
    for (unsigned i = 0; i < num_rows; ++i) {
        std::vector<double> row;
        for (unsigned j = 0; j < num_vars; ++j)
            row.push_back(3.0 * rng.uniform01() - 1.0);
        lp.add_row(std::move(row), RowSense::Le, 0.5 + 2.5 * rng.uniform01());
    }
    lp.add_row(std::vector<double>(num_vars, 1.0), RowSense::Le, 2.0 * num_vars);
    return lp;
}

std::vector<FlowEdge> random_flow_network(Rng& rng, unsigned num_nodes, unsigned num_edges,
                                          std::int64_t max_capacity) {
    if (num_nodes < 2) throw InvalidArgument("random_flow_network: needs >= 2 nodes");
    if (max_capacity < 1) throw InvalidArgument("random_flow_network: capacity must be >= 1");
    std::vector<FlowEdge> edges;
    const auto cap = [&] {
        return (std::int64_t)(rng.uniform01() * (double)max_capacity) + 1;
    };
    for (unsigned v = 0; v + 1 < num_nodes; ++v)
        edges.push_back({v, v + 1, cap()});
    for (unsigned e = 0; e < num_edges; ++e) {
        const unsigned from = (unsigned)(rng.uniform01() * num_nodes) % num_nodes;
        unsigned to = (unsigned)(rng.uniform01() * num_nodes) % num_nodes;
        if (to == from) to = (to + 1) % num_nodes;
        edges.push_back({from, to, cap()});
    }
    return edges;
}

} // namespace oracle
} // namespace colucb
