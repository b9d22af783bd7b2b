#pragma once
#include <cstdint>
#include <vector>

#include "colucb/core.hpp"
#include "colucb/flow.hpp"
#include "colucb/lp.hpp"

namespace colucb {
/// Independent reference implementations used to cross-check the production
/// code paths.  Deliberately brute-force and structurally unrelated to the
/// implementations they validate; shared by the test suites and `selftest`.
namespace oracle {

/// LP optimum by enumerating every basic solution of the slack-form system
/// (all C(n+k, m) bases).  Feasible-bounded problems only; tolerance on
/// basic-solution feasibility 1e-7.
double lp_value_by_vertex_enumeration(const LpProblem& lp);

/// max over nonempty G' of |Cov(G') \ Cov(G \ G')| / |G'| by direct subset
/// enumeration; also returns the exact fraction.  Requires |G| <= 24.
Rational t0_by_subset_enumeration(const GroupStructure& structure);

/// Min cover size and min confined-count by enumerating all group subsets.
/// Requires |G| <= 20.  Returns integer numerators (divide by |S| for the
/// sharing quantities); cover_count = -1 if S cannot be covered (cannot
/// happen on validated structures).
struct CoverEnum {
    std::int64_t cover_count = -1;
    std::int64_t confined_count = -1;
};
CoverEnum cover_by_enumeration(const GroupStructure& structure, Bits64 S);

/// Max-flow value by enumerating all source/sink cuts (num_nodes <= 24) and
/// taking the minimum cut capacity.
std::int64_t max_flow_by_cut_enumeration(unsigned num_nodes,
                                         const std::vector<FlowEdge>& edges,
                                         unsigned source, unsigned sink);

/// Closed forms on the family where every group sees every arm and all means
/// are equal:
///   m_eps      = |G| / (eps |A|)
///   t_value    = (|A| / (2 |G|)) (eps^-2 - 1)
///   r_value    = (|A| / |G|) (1/eps - 1)
///   eps_t      = (1 + 2 |G| T / |A|)^(-1/2)
///   eps_star   = sqrt(|A| / (|G| T))
double all_shared_m_eps(unsigned num_groups, unsigned num_arms, double eps);
double all_shared_t_value(unsigned num_groups, unsigned num_arms, double eps);
double all_shared_r_value(unsigned num_groups, unsigned num_arms, double eps);
double all_shared_eps_t(unsigned num_groups, unsigned num_arms, double t_target);
double all_shared_eps_star(unsigned num_groups, unsigned num_arms, std::uint64_t horizon);

/// Random feasible-bounded LP for the equivalence suite: <= rows with
/// nonnegative rhs plus a bounding simplex row, so x = 0 is feasible and the
/// feasible set is compact.
LpProblem random_boxed_lp(Rng& rng, unsigned num_vars, unsigned num_rows);

/// Random flow network on num_nodes nodes (node 0 source, last node sink).
std::vector<FlowEdge> random_flow_network(Rng& rng, unsigned num_nodes, unsigned num_edges,
                                          std::int64_t max_capacity);

} // namespace oracle

/// Self-check suites runnable from the shipped library (the CLI `selftest`
/// command).  Each suite returns true on pass and appends one line to `log`.
struct SelftestOptions {
    std::uint64_t seed = 20260823;
    /// Test hook: when >= 0, used as feas/gap/pivot tolerance of the LP
    /// duality suite's solver.  An absurd value like 1.0 rejects every pivot
    /// and the suite fails — proof that the harness can detect failures.
    double lp_tolerance_override = -1.0;
};

struct SelftestResult {
    bool passed = false;
    std::string log;   // one "suite: pass|FAIL (detail)" line per suite
};

SelftestResult run_selftest(const SelftestOptions& options);

} // namespace colucb
