#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "colucb/algo.hpp"
#include "colucb/core.hpp"

namespace colucb {

/// A Monte Carlo experiment: one instance, several policies, matched seeds.
struct ExperimentConfig {
    Instance instance;
    std::vector<PolicyKind> policies;
    std::uint64_t horizon = 0;
    std::uint32_t num_seeds = 1;
    std::uint64_t base_seed = 1;
    double const_scale = 1.0;
    DefaultArm default_arm = DefaultArm::EmpiricalBest;
    bool coupled_streams = true;     // share reward noise across policies per trial
    unsigned downsample_points = 512;
    unsigned jobs = 0;               // 0 = hardware concurrency

    void validate() const;
};

struct CurvePoint {
    std::uint64_t t = 0;
    double mean_regret = 0.0;        // mean over seeds of max-group regret at t
    double stderr_regret = 0.0;      // NaN when num_seeds == 1
    double mean_contention = 0.0;    // mean |C(t)|
    double mean_q = 0.0;             // mean LP value (NaN if no LP ever ran at t)
};

struct EpochDiagnostic {
    int epoch = 0;
    double mean_q = 0.0;
    double mean_contention = 0.0;
    std::uint64_t rounds = 0;        // total (round, seed) pairs in the epoch
};

struct PolicyReport {
    PolicyKind policy = PolicyKind::ColUcb;
    std::vector<double> per_seed_final;  // collaborative regret at T, per seed
    std::vector<double> per_seed_mid;    // collaborative regret at floor(T/2)
    double mean_regret = 0.0;
    double stderr_regret = 0.0;          // NaN when num_seeds == 1
    std::vector<double> mean_group_regret;  // [group] mean at T
    std::vector<CurvePoint> curve;       // <= downsample_points, log-spaced in t
    std::vector<EpochDiagnostic> epochs;
};

struct PairedComparison {
    PolicyKind policy_a = PolicyKind::ColUcb;
    PolicyKind policy_b = PolicyKind::ColUcb;
    double delta = 0.0;     // mean over seeds of (regret_a - regret_b)
    double z_score = 0.0;   // delta / (sd(diffs)/sqrt(n)); NaN if sd == 0 or n < 2
};

struct ExperimentReport {
    ExperimentConfig config;             // fully resolved
    std::uint64_t burnin_length = 0;     // of the Col-UCB config (0 if absent)
    std::vector<PolicyReport> policies;
    std::vector<PairedComparison> comparisons;  // all ordered pairs (a, b), a != b
    double wall_seconds = 0.0;
};

/// Runs every (policy, seed) trajectory (embarrassingly parallel over a
/// thread pool of `jobs` workers; reductions happen after the join in fixed
/// seed order with compensated summation, so the report is independent of
/// scheduling).  Trial seeds are base_seed + trial derived per stream.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Paired-by-seed comparison; requires both policies present with >= 2 seeds.
PairedComparison compare(const ExperimentReport& report, PolicyKind a, PolicyKind b);

/// Log-spaced round indices 1..horizon (ascending, distinct, always includes
/// 1 and horizon), at most max_points of them.
std::vector<std::uint64_t> downsample_rounds(std::uint64_t horizon, unsigned max_points);

} // namespace colucb
