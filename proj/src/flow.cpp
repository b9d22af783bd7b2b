#include "colucb/flow.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "colucb/lp.hpp"

namespace colucb {

namespace {

/// Dinic with an explicit residual edge list; `orig` maps back to the caller's
/// edge indices so per-edge flows can be reported.
struct Dinic {
    struct E { unsigned to; std::int64_t cap; std::size_t rev; int orig; };
    std::vector<std::vector<E>> adj;
    std::vector<int> level, it;

    explicit Dinic(unsigned n) : adj(n), level(n), it(n) {}

    void add_edge(unsigned u, unsigned v, std::int64_t cap, int orig) {
        adj[u].push_back({v, cap, adj[v].size(), orig});
        adj[v].push_back({u, 0, adj[u].size() - 1, -1});
    }

    bool bfs(unsigned s, unsigned t) {
        std::fill(level.begin(), level.end(), -1);
        std::queue<unsigned> q;
        level[s] = 0;
        q.push(s);
        while (!q.empty()) {
            unsigned u = q.front(); q.pop();
            for (const E& e : adj[u])
                if (e.cap > 0 && level[e.to] < 0) {
                    level[e.to] = level[u] + 1;
                    q.push(e.to);
                }
        }
        return level[t] >= 0;
    }

    std::int64_t dfs(unsigned u, unsigned t, std::int64_t f) {
        if (u == t) return f;
        for (int& i = it[u]; i < (int)adj[u].size(); ++i) {
            E& e = adj[u][i];
            if (e.cap > 0 && level[e.to] == level[u] + 1) {
                std::int64_t d = dfs(e.to, t, std::min(f, e.cap));
                if (d > 0) {
                    e.cap -= d;
                    adj[e.to][e.rev].cap += d;
                    return d;
                }
            }
        }
        return 0;
    }

    std::int64_t run(unsigned s, unsigned t) {
        std::int64_t total = 0;
        while (bfs(s, t)) {
            std::fill(it.begin(), it.end(), 0);
            while (std::int64_t f = dfs(s, t, INT64_MAX)) total += f;
        }
        return total;
    }

    /// Nodes reachable from s in the residual graph (the source side of a
    /// minimum cut once run() has finished).
    std::vector<bool> source_side(unsigned s) const {
        std::vector<bool> seen(adj.size(), false);
        std::queue<unsigned> q;
        seen[s] = true;
        q.push(s);
        while (!q.empty()) {
            unsigned u = q.front(); q.pop();
            for (const E& e : adj[u])
                if (e.cap > 0 && !seen[e.to]) {
                    seen[e.to] = true;
                    q.push(e.to);
                }
        }
        return seen;
    }
};

} // namespace

FlowResult max_flow(unsigned num_nodes, const std::vector<FlowEdge>& edges,
                    unsigned source, unsigned sink) {
    if (source >= num_nodes || sink >= num_nodes || source == sink)
        throw InvalidArgument("max_flow: bad source/sink");
    Dinic d(num_nodes);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const FlowEdge& e = edges[i];
        if (e.from >= num_nodes || e.to >= num_nodes)
            throw InvalidArgument("max_flow: edge endpoint out of range");
        if (e.capacity < 0) throw InvalidArgument("max_flow: negative capacity");
        d.add_edge(e.from, e.to, e.capacity, (int)i);
    }
    FlowResult r;
    r.value = d.run(source, sink);
    r.flow.assign(edges.size(), 0);
    for (const auto& list : d.adj)
        for (const auto& e : list)
            if (e.orig >= 0) r.flow[e.orig] = edges[e.orig].capacity - e.cap;
    return r;
}

double compute_t0(const GroupStructure& structure) {
    structure.validate();
    const unsigned A = structure.num_arms, G = structure.num_groups();

    // Variables: x_{g,a} for every (group, member arm) pair, then t.
    std::vector<std::vector<int>> var(G, std::vector<int>(A, -1));
    std::size_t nv = 0;
    for (unsigned g = 0; g < G; ++g)
        for (unsigned a : structure.groups[g]) var[g][a] = (int)nv++;
    const std::size_t t_var = nv++;

    LpProblem lp;
    lp.num_vars = nv;
    lp.objective.assign(nv, 0.0);
    lp.objective[t_var] = -1.0;   // minimize t
    for (unsigned g = 0; g < G; ++g) {
        std::vector<double> row(nv, 0.0);
        for (unsigned a : structure.groups[g]) row[var[g][a]] = 1.0;
        row[t_var] = -1.0;
        lp.add_row(std::move(row), RowSense::Le, 0.0);
    }
    for (unsigned a = 0; a < A; ++a) {
        std::vector<double> row(nv, 0.0);
        for (unsigned g = 0; g < G; ++g)
            if (var[g][a] >= 0) row[var[g][a]] = 1.0;
        lp.add_row(std::move(row), RowSense::Ge, 1.0);
    }
    LpSolution s = solve_lp(lp);
    if (s.status != LpStatus::Optimal)
        throw InternalError("compute_t0: allocation LP was " + to_string(s.status));
    return -s.value;
}

namespace {

/// max over all G' (possibly empty) of  q * |{a : owners(a) ⊆ G'}| - p * |G'|,
/// and one maximizing G' (source side of the min cut).
std::pair<std::int64_t, Bits64> best_subset_for(const GroupStructure& st,
                                                std::int64_t p, std::int64_t q) {
    const unsigned A = st.num_arms, G = st.num_groups();
    const unsigned source = 0, sink = 1 + A + G;
    Dinic d(2 + A + G);
    const std::int64_t big = q * (std::int64_t)A + 1;
    for (unsigned a = 0; a < A; ++a) {
        d.add_edge(source, 1 + a, q, -1);
        for (unsigned g = 0; g < G; ++g)
            if (st.groups[g].test(a)) d.add_edge(1 + a, 1 + A + g, big, -1);
    }
    for (unsigned g = 0; g < G; ++g) d.add_edge(1 + A + g, sink, p, -1);
    const std::int64_t cut = d.run(source, sink);
    const std::vector<bool> side = d.source_side(source);
    Bits64 chosen;
    for (unsigned g = 0; g < G; ++g)
        if (side[1 + A + g]) chosen.set(g);
    return {q * (std::int64_t)A - cut, chosen};
}

std::int64_t captured_arms(const GroupStructure& st, Bits64 gs) {
    // |{a : every group owning a is in gs}| = |Cov(gs) \ Cov(G \ gs)|.
    std::int64_t n = 0;
    for (unsigned a = 0; a < st.num_arms; ++a)
        if (st.groups_containing(a).subset_of(gs)) ++n;
    return n;
}

} // namespace

Rational t0_rational(const GroupStructure& structure) {
    structure.validate();
    // Dinkelbach iterations over exact fractions: start from G' = G and
    // repeatedly ask a min-cut whether any subset beats the current ratio.
    Bits64 current = Bits64::first_n(structure.num_groups());
    std::int64_t p = captured_arms(structure, current);   // = |A|
    std::int64_t q = structure.num_groups();
    for (;;) {
        auto [value, better] = best_subset_for(structure, p, q);
        if (value <= 0) break;   // nothing strictly beats p/q
        if (better.empty())
            throw InternalError("t0_rational: positive value with empty subset");
        p = captured_arms(structure, better);
        q = better.count();
    }
    const std::int64_t g = std::gcd(p, q);
    return Rational{p / g, q / g};
}

BurninSchedule burn_in_schedule(const GroupStructure& structure, std::uint64_t n0) {
    structure.validate();
    if (n0 == 0) throw InvalidArgument("burn_in_schedule: n0 must be >= 1");
    const unsigned A = structure.num_arms, G = structure.num_groups();

    BurninSchedule sched;
    sched.n0 = n0;
    sched.t0 = t0_rational(structure);
    // ceil(n0 * p / q) in integers.
    sched.length = (std::uint64_t)(((std::int64_t)n0 * sched.t0.num + sched.t0.den - 1) /
                                   sched.t0.den);

    // Distribute n0 units per arm over the owning groups under a per-group
    // budget of `length` rounds; integral max-flow (the fractional optimum is
    // achievable, and the flow polytope has integral vertices).
    const unsigned source = 0, sink = 1 + G + A;
    std::vector<FlowEdge> edges;
    std::vector<std::pair<unsigned, unsigned>> ga_of_edge;  // group, arm per g->a edge
    for (unsigned g = 0; g < G; ++g)
        edges.push_back({source, 1 + g, (std::int64_t)sched.length});
    for (unsigned g = 0; g < G; ++g)
        for (unsigned a : structure.groups[g]) {
            ga_of_edge.emplace_back(g, a);
            edges.push_back({1 + g, 1 + G + a, (std::int64_t)n0});
        }
    for (unsigned a = 0; a < A; ++a)
        edges.push_back({1 + G + a, sink, (std::int64_t)n0});

    FlowResult flow = max_flow(2 + G + A, edges, source, sink);
    if (flow.value != (std::int64_t)n0 * A)
        throw InternalError("burn_in_schedule: flow failed to saturate the arms (got " +
                            std::to_string(flow.value) + ")");

    std::vector<std::vector<std::uint64_t>> quota(G, std::vector<std::uint64_t>(A, 0));
    for (std::size_t i = 0; i < ga_of_edge.size(); ++i) {
        const auto [g, a] = ga_of_edge[i];
        quota[g][a] = (std::uint64_t)flow.flow[G + i];
    }

    // Unpack: each group cycles through its quota'd arms in ascending id
    // order (one pull per arm per sweep while its quota lasts); rounds beyond
    // the group's total quota repeat its lowest-id arm.
    sched.pulls.assign(sched.length, std::vector<std::uint8_t>(G, 0));
    sched.arm_pull_count.assign(A, 0);
    for (unsigned g = 0; g < G; ++g) {
        std::vector<std::uint64_t> left;
        std::vector<std::uint8_t> arms;
        for (unsigned a : structure.groups[g]) {
            if (quota[g][a] > 0) {
                arms.push_back((std::uint8_t)a);
                left.push_back(quota[g][a]);
            }
        }
        const std::uint8_t pad_arm = (std::uint8_t)structure.groups[g].lowest();
        std::uint64_t round = 0;
        while (round < sched.length) {
            bool emitted = false;
            for (std::size_t i = 0; i < arms.size() && round < sched.length; ++i) {
                if (left[i] > 0) {
                    --left[i];
                    sched.pulls[round][g] = arms[i];
                    ++sched.arm_pull_count[arms[i]];
                    ++round;
                    emitted = true;
                }
            }
            if (!emitted) {   // quota exhausted; pad the remaining rounds
                sched.pulls[round][g] = pad_arm;
                ++sched.arm_pull_count[pad_arm];
                ++round;
            }
        }
    }

    for (unsigned a = 0; a < A; ++a)
        if (sched.arm_pull_count[a] < n0)
            throw InternalError("burn_in_schedule: arm " + std::to_string(a) +
                                " scheduled fewer than n0 pulls");
    return sched;
}

} // namespace colucb
