#pragma once
#include <cstdint>
#include <vector>

#include "colucb/core.hpp"
#include "colucb/sets.hpp"

namespace colucb {

/// Subset enumeration over arms (2^|A| work) is refused above this size
/// unless the caller passes force = true.
inline constexpr unsigned kEnumerationCap = 24;

// ------------------------------------------------ combinatorial sharing

/// |{g : A_g ∩ S nonempty}| / |S|.  S must be a nonempty subset of the arms.
double h1(const GroupStructure& structure, Bits64 S);

struct CoverResult {
    double value = 0.0;      // count / |S|
    Bits64 cover;            // group set achieving the minimum
    std::int64_t count = 0;  // the integer numerator
};

/// Minimum number of groups whose union covers S, divided by |S|.
/// Exact: plain enumeration when at most 16 groups touch S, otherwise
/// branch-and-bound with memoization on the uncovered-arm set.
CoverResult h2_minus(const GroupStructure& structure, Bits64 S);

/// min over covers G' of S of |{g : A_g ∩ S nonempty and A_g ⊆ Cov(G')}| / |S|:
/// the smallest number of groups that end up confined inside the covered
/// region once S is covered.  Exact (enumeration <= 16 touching groups,
/// branch-and-bound beyond, pruned by the monotonicity of the confined count).
CoverResult h2_plus(const GroupStructure& structure, Bits64 S);

struct HtPair {
    double minus = 0.0;   // h1 + h2_minus^(3/2) sqrt(T)
    double plus = 0.0;    // h1 + h2_plus^(3/2) sqrt(T)
};

HtPair ht_bounds(const GroupStructure& structure, Bits64 S, std::uint64_t horizon);

struct BarHtResult {
    double minus = 0.0;
    double plus = 0.0;
    Bits64 argmin_minus;
    Bits64 argmin_plus;
};

/// min over nonempty S of ht_bounds; enumerates all 2^|A|-1 subsets.
/// Throws InvalidArgument when num_arms > kEnumerationCap and !force.
BarHtResult bar_ht(const GroupStructure& structure, std::uint64_t horizon, bool force = false);

// ------------------------------------------------ instance-dependent scale

/// Arms still contested at tolerance eps:
///   union over groups with gap_min[g] <= eps of { a in A_g : gap[g][a] <= eps }.
Bits64 contention_star(const Instance& instance, double eps);

/// Optimal value of
///   maximize M  s.t.  sum_{a in A_g} max(gap[g][a], eps) x_{g,a} <= 1 per group,
///                     sum_{g owning a} x_{g,a} >= M per arm in C*(eps),
/// i.e. the best guaranteed per-unit-time exploration rate of the contested
/// arms.  +inf when C*(eps) is empty.  Requires eps > 0.
double m_eps(const Instance& instance, double eps);

/// Sorted distinct positive gap values (clipped to (0, 1]); the points where
/// contention_star or the max(gap, eps) coefficients change.
std::vector<double> gap_breakpoints(const Instance& instance);

struct Functionals {
    double t_value = 0.0;   // integral_eps^1 sigma dz / (M(sigma z) z^4)
    double r_value = 0.0;   // integral_eps^1 sigma^2 dz / (M(sigma z) z^3)
};

/// Both integrals by adaptive Simpson on each interval between gap
/// breakpoints (relative tolerance 1e-7, absolute floor 1e-12); intervals
/// where M = +inf contribute zero.  Requires 0 < eps <= 1, sigma > 0.
Functionals t_r_functionals(const Instance& instance, double eps, double sigma = 1.0);

/// Smallest eps in (0,1] with t_value(eps) <= t_target (bisection to relative
/// width 1e-8; T(.) is non-increasing).  When even T(1e-9) < t_target —
/// possible when no group has tied optima, so T saturates — returns 1e-9,
/// below which R and T are constant anyway.
double eps_t(const Instance& instance, double t_target, double sigma = 1.0);

/// min({ z in (0,1] : M(z) z^3 T >= 1 } ∪ {1}), scanning breakpoint intervals
/// in ascending z; z with M(z) = +inf never qualifies (first finite piece
/// rule).  M(z) z^3 need not be monotone, so each interval is grid-scanned
/// before the crossing is bisected.
double eps_star(const Instance& instance, std::uint64_t horizon);

struct ConditionReport {
    bool holds = false;
    double worst_ratio = 0.0;   // max over pairs of lhs / rhs (finite pairs)
    double worst_z1 = 0.0, worst_z2 = 0.0;
};

/// Checks M(z1) <= c1 * (z2/z1)^(2-alpha) * M(z2) for all grid pairs
/// z1 <= z2 on a log grid refined with the gap breakpoints.  Pairs with
/// infinite right side hold vacuously; infinite left with finite right is a
/// violation.
ConditionReport condition_check(const Instance& instance, double c1, double alpha,
                                unsigned grid_points = 64);

/// (1/2) min over nonempty S of [ h1(S) + (1/eps - 1) h2_minus(S) ].
/// Requires 0 < eps <= 1; enumeration cap as bar_ht.
double phi(const GroupStructure& structure, double eps, bool force = false);

struct ImprovementReport {
    bool improves = false;
    double lhs = 0.0;     // min over nonempty S of h1(S)
    double rhs = 0.0;     // alpha * sqrt(T) / max_g |A_g|^(3/2)
};

/// Collaboration beats the trivial per-group bound when
/// min_S h1(S) >= alpha sqrt(T) / max_g |A_g|^(3/2).
ImprovementReport sufficient_improvement(const GroupStructure& structure,
                                         std::uint64_t horizon, double alpha,
                                         bool force = false);

} // namespace colucb
