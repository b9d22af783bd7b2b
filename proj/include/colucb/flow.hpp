#pragma once
#include <cstdint>
#include <vector>

#include "colucb/core.hpp"

namespace colucb {

/// Directed edge with integer capacity for max-flow.
struct FlowEdge {
    unsigned from = 0;
    unsigned to = 0;
    std::int64_t capacity = 0;
};

struct FlowResult {
    std::int64_t value = 0;
    std::vector<std::int64_t> flow;   // per input edge, 0 <= flow <= capacity
};

/// Dinic's algorithm.  Integer capacities >= 0; conservation and capacity
/// constraints hold exactly on the returned flow.
FlowResult max_flow(unsigned num_nodes, const std::vector<FlowEdge>& edges,
                    unsigned source, unsigned sink);

/// Smallest per-round group budget (fractional) that lets every arm collect
/// one unit of pull mass:
///   minimize t  s.t.  sum_{a in A_g} x_{g,a} <= t per group,
///                     sum_{g owning a} x_{g,a} >= 1 per arm,  x >= 0.
/// Equals max over nonempty G' of |Cov(G') \ Cov(G\G')| / |G'|.
double compute_t0(const GroupStructure& structure);

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double to_double() const { return (double)num / (double)den; }
};

/// Exact value of compute_t0 as a reduced fraction p/q (p <= |A|, q <= |G|),
/// found by integer max-flow decision tests — no subset enumeration, so there
/// is no size cap.
Rational t0_rational(const GroupStructure& structure);

/// Burn-in schedule: per-round arm choice for every group such that after
/// `length` rounds each arm has been pulled at least n0 times, with
/// length = ceil(n0 * t0) (integer arithmetic on the exact rational t0).
struct BurninSchedule {
    std::uint64_t n0 = 0;
    std::uint64_t length = 0;                    // t_min
    Rational t0;
    std::vector<std::vector<std::uint8_t>> pulls;  // pulls[round][group] = arm id
    std::vector<std::uint64_t> arm_pull_count;     // per arm, >= n0
};

/// Builds the schedule from an integral max-flow (source -> groups with
/// capacity t_min, groups -> their arms, arms -> sink with capacity n0) and
/// unpacks each group's allocated arm multiset by cycling through its arms in
/// ascending id order.  Rounds beyond a group's allocation repeat its
/// lowest-id arm.  Throws InvalidArgument if n0 == 0.
BurninSchedule burn_in_schedule(const GroupStructure& structure, std::uint64_t n0);

} // namespace colucb
