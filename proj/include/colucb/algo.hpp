#pragma once
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "colucb/core.hpp"
#include "colucb/flow.hpp"
#include "colucb/lp.hpp"
#include "colucb/rng.hpp"

namespace colucb {

enum class PolicyKind { ColUcb, IndependentUcb, PooledUcb };

std::string to_string(PolicyKind p);
PolicyKind policy_kind_from_string(const std::string& s);

/// Pooled pull statistics as seen at the start of a round: counts and sums
/// cover all pulls of strictly earlier rounds.
struct PooledStats {
    std::vector<std::uint64_t> pull_count;   // per arm
    std::vector<double> reward_sum;          // per arm
    double mean(unsigned a) const { return reward_sum[a] / (double)pull_count[a]; }
};

/// One round of a recorded trajectory.
struct TrajectoryRow {
    std::vector<std::uint8_t> action;        // per group, arm id
    std::vector<double> regret_increment;    // per group, true gap of the action
    std::uint8_t contention_size = 0;        // |C(t)| at the decision point
    double q_value = std::numeric_limits<double>::quiet_NaN();  // LP value; NaN if no LP ran
    double eps_t = std::numeric_limits<double>::infinity();     // sqrt(C log T / P(t))
    std::int8_t epoch = -1;                  // k with eps_t in (2^-k-2, 2^-k-1]; -1 if none
};

struct Trajectory {
    PolicyKind policy = PolicyKind::ColUcb;
    std::uint64_t seed = 0;
    std::vector<TrajectoryRow> rows;         // size = horizon

    /// Cumulative pseudo-regret of one group over the first t rounds.
    double group_regret(unsigned g, std::uint64_t t) const;
    /// max over groups of group_regret(g, t).
    double collaborative_regret(std::uint64_t t) const;
};

/// Epoch index of a confidence radius: k = 0 covers eps in (1/4, +inf]
/// (the opening epoch), and k >= 1 covers eps in (2^-(k+2), 2^-(k+1)].
/// Returns -1 for eps <= 0 or NaN (no active epoch, e.g. contention empty).
int epoch_of_eps(double eps);

// ----------------------------------------------------------------- Col-UCB

/// Full algorithm state between rounds.  `round` counts completed rounds;
/// all statistics describe pulls from rounds 1..round, i.e. they are the
/// "strictly before round round+1" counts the decision rule needs.
struct ColUcbState {
    const Instance* instance = nullptr;
    AlgoConfig config;
    BurninSchedule burnin;

    std::uint64_t round = 0;                 // completed rounds
    PooledStats stats;

    std::vector<Bits64> candidate;           // per group: plausible-best arm set
    std::vector<Bits64> cumulative_candidate;// per group: running intersection of the
                                             // candidate sets, where a singleton round
                                             // contributes the empty set (resolved)
    Bits64 contention;                       // union over groups of the above
    std::uint64_t p_min = 0;                 // min pulls over contention arms (0 if empty)
    double eps_t = std::numeric_limits<double>::infinity();

    // Last solved allocation (post-burn-in rounds with nonempty contention):
    bool lp_ran = false;
    double q_value = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> alloc;  // alloc[g][a], 0 outside C(t) ∩ A_g
    LpSolution last_lp;                      // for invariant audits
    LpProblem last_lp_problem;
};

/// round = 0, zeroed statistics, candidate sets = full group arm sets,
/// contention = all arms, burn-in schedule precomputed.
ColUcbState init_state(const Instance& instance, const AlgoConfig& config);

/// Plausible-best arms of group g from the pooled stats:
///   { a in A_g : ucb(a) >= max_{a' in A_g} lcb(a') }.
/// Unpulled arms have ucb = +inf, lcb = -inf.  Requires stats arrays sized.
Bits64 candidate_set(const ColUcbState& st, unsigned g);

/// Re-derives candidate sets, folds them into the running intersections,
/// rebuilds contention = union of intersections, and recomputes p_min/eps_t.
/// A group whose running intersection has emptied stays empty forever.
void update_contention(ColUcbState& st);

/// The allocation LP for the current state (requires nonempty contention):
///   maximize q s.t.
///     (i)  sum_{a in C∩A_g} gap_hat[g][a] x_{g,a} <= eps_t   per group
///          (all rows omitted while p_min == 0, i.e. eps_t = +inf)
///     (ii) sum_{a in C∩A_g} x_{g,a} <= 1                     per group
///     (iii) sum_{g owning a} x_{g,a} >= q                     per arm in C.
/// Variable order: x_{g,a} for g ascending, a ascending within g; q last.
LpProblem build_q_problem(const ColUcbState& st);

/// Plays one round: burn-in schedule while round < burn-in length, otherwise
/// refreshes contention, solves the LP when contention is nonempty, samples
/// one arm per group (leftover probability goes to the default arm), then
/// draws one reward per group in ascending group order and folds it into the
/// pooled statistics.  Appends one TrajectoryRow describing the round.
/// Throws InvalidArgument once round == horizon.
void col_ucb_step(ColUcbState& st, Rng& env, Rng& policy, Trajectory& out);

// ----------------------------------------------------------------- policies

/// A policy is a deterministic function of (instance, config, streams).
class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyKind kind() const = 0;
    /// Plays one round and appends one TrajectoryRow.
    virtual void step(Rng& env, Rng& policy_stream, Trajectory& out) = 0;
};

std::unique_ptr<Policy> make_policy(PolicyKind kind, const Instance& instance,
                                    const AlgoConfig& config);

/// Wrapper exposing the Col-UCB internals for audits.
class ColUcbPolicy final : public Policy {
public:
    ColUcbPolicy(const Instance& instance, const AlgoConfig& config);
    PolicyKind kind() const override { return PolicyKind::ColUcb; }
    void step(Rng& env, Rng& policy_stream, Trajectory& out) override;
    const ColUcbState& state() const { return st_; }

private:
    ColUcbState st_;
};

/// Runs `horizon` rounds of the given policy with streams derived from
/// (base_seed, trial, policy_index, kind).  When coupled_env is true the
/// environment stream ignores policy_index, so different policies on the same
/// trial see identical reward noise.
Trajectory run_policy(PolicyKind kind, const Instance& instance, const AlgoConfig& config,
                      std::uint64_t base_seed, std::uint64_t trial = 0,
                      bool coupled_env = false);

} // namespace colucb
