#pragma once
#include <cstdint>
#include <vector>

#include "colucb/core.hpp"

namespace colucb {

struct ZtResult {
    double z = 0.0;          // argmin of M(z) z^2 over [eps_t, (1+eps_t)/2]
    double eps_t = 0.0;      // left end of the search interval
    double objective = 0.0;  // M(z) z^2 at the argmin
};

/// Hardest-to-certify tolerance for horizon T: minimizes M(z) z^2 over
/// [eps_T, (1+eps_T)/2] on a grid of 256 log-spaced points plus the gap
/// breakpoints inside the interval, then refines locally.  Ties keep the
/// smallest z.
ZtResult z_t(const Instance& instance, std::uint64_t horizon);

/// Moves arm a0's mean to (second-best mean of group g0 among its other
/// arms) + sign * eps, leaving every other arm untouched.  sign is +1 or -1.
/// When clamp_quarter is set (the bounded-mean variant) the base means must
/// lie in [1/4, 3/4] and eps is first replaced by min(eps, 1/4).  For
/// Bernoulli bases the perturbed mean must stay inside [0, 1] or the call
/// throws DataError.
Instance perturb_second_best(const Instance& base, unsigned a0, unsigned g0,
                             double eps, int sign, bool clamp_quarter = false);

struct AdversaryResult {
    Instance j_plus;
    Instance j_minus;
    double z = 0.0;          // the z_t value used
    unsigned a0 = 0;         // perturbed arm (least pilot-pulled contested arm)
    unsigned g0 = 0;         // witness group with gap_min <= z and gap[g0][a0] <= z
    double nu = 0.0;         // second-best mean of g0 without a0
    std::vector<double> pilot_pulls;  // mean pull count per arm over pilot runs
};

/// Builds the two perturbed instances that are statistically hardest to tell
/// apart from the base within horizon T: z = z_t(base, T), a0 = the
/// least-pulled arm of C*(z) under `pilot_seeds` pilot runs of the algorithm
/// (ties lowest id), g0 = lowest-id group witnessing a0 in C*(z), and arm
/// a0's mean moved to nu ± z.  Requires Gaussian rewards with variance 1.
AdversaryResult theorem4_adversary(const Instance& base, const AlgoConfig& config,
                                   std::uint64_t base_seed = 1,
                                   unsigned pilot_seeds = 20);

/// Three-level minimax instance: means 1 outside Cov(cover_groups),
/// 0 on Cov(cover_groups) \ S, 1/2 on S.  Requires S nonempty and
/// S ⊆ Cov(cover_groups).
Instance minimax_family(const GroupStructure& structure, Bits64 S, Bits64 cover_groups,
                        RewardKind kind);

} // namespace colucb
