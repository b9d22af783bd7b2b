#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "colucb/errors.hpp"
#include "colucb/rng.hpp"
#include "colucb/sets.hpp"

namespace colucb {

inline constexpr unsigned kMaxArms = 64;
inline constexpr unsigned kMaxGroups = 64;

/// Which arms each group is allowed to play.  Arms and groups are dense
/// 0-based ids; every arm must belong to at least one group and every group
/// must be nonempty.
struct GroupStructure {
    unsigned num_arms = 0;
    std::vector<Bits64> groups;   // groups[g] = arm set of group g

    unsigned num_groups() const { return (unsigned)groups.size(); }
    Bits64 all_arms() const { return Bits64::first_n(num_arms); }
    /// Union of the arm sets of the groups in `gs`.
    Bits64 cover(Bits64 gs) const;
    /// Groups whose arm set contains arm a.
    Bits64 groups_containing(unsigned a) const;
    unsigned max_group_size() const;

    /// Throws DataError unless: 1 <= num_arms <= 64, 1 <= |G| <= 64, every
    /// group nonempty and within [0, num_arms), and the groups cover all arms.
    void validate() const;
};

enum class RewardKind { Gaussian, Bernoulli };

/// Per-arm reward distribution.  Gaussian: mean + sqrt(variance) * N(0,1).
/// Bernoulli: mean in [0,1], variance field ignored.
struct RewardModel {
    RewardKind kind = RewardKind::Gaussian;
    double mean = 0.0;
    double variance = 1.0;

    void validate() const;
    /// Consumes exactly one raw draw from `rng`.
    double sample(Rng& rng) const;
};

/// A grouped bandit problem: structure plus one reward model per arm, with
/// the per-group suboptimality gaps precomputed at construction.
struct Instance {
    GroupStructure structure;
    std::vector<RewardModel> rewards;        // size num_arms

    // Derived at build_instance time:
    std::vector<double> mean;                // mean[a]
    std::vector<double> group_best;          // max mean over the group's arms
    std::vector<std::vector<double>> gap;    // gap[g][a] = group_best[g]-mean[a], 0 outside g
    std::vector<double> gap_min;             // smallest positive margin of the group's
                                             // best arm over its runner-up (0 on a tie)
    double gap_max = 0.0;                    // largest gap over all (g, a in A_g)

    unsigned num_arms() const { return structure.num_arms; }
    unsigned num_groups() const { return structure.num_groups(); }
};

/// Validates and derives.  Throws DataError on invalid input
/// (structure invalid, rewards.size() != num_arms, invalid reward model).
Instance build_instance(GroupStructure structure, std::vector<RewardModel> rewards);

/// Convenience: Gaussian (variance 1) or Bernoulli arms from a mean vector.
Instance make_gaussian_instance(GroupStructure structure, const std::vector<double>& means,
                                double variance = 1.0);
Instance make_bernoulli_instance(GroupStructure structure, const std::vector<double>& means);

// ------------------------------------------------------------- generators

/// Every group sees every arm.
GroupStructure all_shared_structure(unsigned num_groups, unsigned num_arms);
/// Disjoint consecutive blocks with the given sizes; one group per block.
GroupStructure disjoint_structure(const std::vector<unsigned>& sizes);
/// Disjoint consecutive blocks of size k (k must divide num_arms).
GroupStructure partition_groups(unsigned num_arms, unsigned k);
/// All size-k subsets of the arms, one group each; requires C(num_arms, k) <= 64.
GroupStructure all_k_subset_groups(unsigned num_arms, unsigned k);
/// Random connected-ish structure for property tests: each group draws a
/// random nonempty subset, then uncovered arms are patched into random groups.
GroupStructure random_structure(Rng& rng, unsigned num_arms, unsigned num_groups,
                                unsigned max_group_size = kMaxArms);

// ------------------------------------------------------------- configuration

enum class DefaultArm { EmpiricalBest, UcbBest };

/// Tuned constants for one run.  With const_scale = 1 these are the
/// theoretical values:
///   log_ratio  = 1 + log(max(|A|, |G|)) / log(T)
///   conf_const = 60 * log_ratio * const_scale
///   burnin_pulls(n0) = ceil(16 * conf_const * log T)
/// const_scale exists because the theoretical constants are far too large
/// for desk-scale horizons; it scales conf_const (and hence n0).
struct AlgoConfig {
    std::uint64_t horizon = 0;        // T, >= 2
    double const_scale = 1.0;         // > 0
    double log_ratio = 0.0;           // derived
    double conf_const = 0.0;          // C in the width sqrt(C log T / n)
    std::uint64_t burnin_pulls = 0;   // n0 >= 1
    DefaultArm default_arm = DefaultArm::EmpiricalBest;

    void validate() const;
};

/// Derives log_ratio / conf_const / burnin_pulls from (structure, T, scale).
AlgoConfig make_config(const GroupStructure& structure, std::uint64_t horizon,
                       double const_scale = 1.0,
                       DefaultArm default_arm = DefaultArm::EmpiricalBest);

/// sqrt(conf_const * log T / pulls); +inf when pulls == 0.
double confidence_width(const AlgoConfig& cfg, std::uint64_t pulls);

std::string to_string(RewardKind k);
std::string to_string(DefaultArm d);
RewardKind reward_kind_from_string(const std::string& s);
DefaultArm default_arm_from_string(const std::string& s);

} // namespace colucb
