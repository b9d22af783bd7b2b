#include "colucb/algo.hpp"

#include <algorithm>
#include <cmath>

namespace colucb {

std::string to_string(PolicyKind p) {
    switch (p) {
        case PolicyKind::ColUcb: return "col_ucb";
        case PolicyKind::IndependentUcb: return "independent_ucb";
        case PolicyKind::PooledUcb: return "pooled_ucb";
    }
    return "?";
}

PolicyKind policy_kind_from_string(const std::string& s) {
    if (s == "col_ucb") return PolicyKind::ColUcb;
    if (s == "independent_ucb") return PolicyKind::IndependentUcb;
    if (s == "pooled_ucb") return PolicyKind::PooledUcb;
    throw DataError("unknown policy '" + s +
                    "' (expected col_ucb|independent_ucb|pooled_ucb)");
}

double Trajectory::group_regret(unsigned g, std::uint64_t t) const {
    double sum = 0;
    const std::uint64_t upto = std::min<std::uint64_t>(t, rows.size());
    for (std::uint64_t i = 0; i < upto; ++i) sum += rows[i].regret_increment[g];
    return sum;
}

double Trajectory::collaborative_regret(std::uint64_t t) const {
    if (rows.empty()) return 0.0;
    const std::size_t groups = rows[0].regret_increment.size();
    double best = 0.0;
    for (unsigned g = 0; g < groups; ++g) best = std::max(best, group_regret(g, t));
    return best;
}

int epoch_of_eps(double eps) {
    if (std::isnan(eps) || eps <= 0) return -1;
    if (eps > 0.25) return 0;   // includes +inf: the opening epoch
    const int k = (int)std::floor(std::log2(1.0 / eps)) - 1;
    return std::min(k, 120);
}

// ------------------------------------------------------------- Col-UCB

ColUcbState init_state(const Instance& instance, const AlgoConfig& config) {
    config.validate();
    ColUcbState st;
    st.instance = &instance;
    st.config = config;
    st.burnin = burn_in_schedule(instance.structure, config.burnin_pulls);
    const unsigned A = instance.num_arms(), G = instance.num_groups();
    st.stats.pull_count.assign(A, 0);
    st.stats.reward_sum.assign(A, 0.0);
    st.candidate = instance.structure.groups;
    st.cumulative_candidate = instance.structure.groups;
    st.contention = instance.structure.all_arms();
    st.p_min = 0;
    st.eps_t = std::numeric_limits<double>::infinity();
    st.alloc.assign(G, std::vector<double>(A, 0.0));
    return st;
}

Bits64 candidate_set(const ColUcbState& st, unsigned g) {
    const Instance& inst = *st.instance;
    const Bits64 arms = inst.structure.groups[g];
    double best_lcb = -std::numeric_limits<double>::infinity();
    for (unsigned a : arms) {
        const std::uint64_t n = st.stats.pull_count[a];
        if (n == 0) continue;   // lcb = -inf, never the max
        best_lcb = std::max(best_lcb, st.stats.mean(a) - confidence_width(st.config, n));
    }
    Bits64 result;
    for (unsigned a : arms) {
        const std::uint64_t n = st.stats.pull_count[a];
        const double ucb = n == 0 ? std::numeric_limits<double>::infinity()
                                  : st.stats.mean(a) + confidence_width(st.config, n);
        if (ucb >= best_lcb) result.set(a);
    }
    return result;
}

void update_contention(ColUcbState& st) {
    const unsigned G = st.instance->num_groups();
    Bits64 contention;
    for (unsigned g = 0; g < G; ++g) {
        st.candidate[g] = candidate_set(st, g);
        // A group whose round-candidate set is a singleton is resolved this
        // round and contributes the empty set, emptying its running
        // intersection for good.  An intersection that shrinks to one arm
        // across rounds without any singleton round still counts.
        const Bits64 effective =
            st.candidate[g].count() == 1 ? Bits64::none() : st.candidate[g];
        st.cumulative_candidate[g] &= effective;
        contention |= st.cumulative_candidate[g];
    }
    st.contention = contention;
    if (contention.empty()) {
        st.p_min = 0;
        st.eps_t = 0.0;   // min over an empty set is +inf pulls: zero radius
        return;
    }
    std::uint64_t p = UINT64_MAX;
    for (unsigned a : contention) p = std::min(p, st.stats.pull_count[a]);
    st.p_min = p;
    st.eps_t = confidence_width(st.config, p);
}

LpProblem build_q_problem(const ColUcbState& st) {
    if (st.contention.empty())
        throw InvalidArgument("build_q_problem: contention set is empty");
    const Instance& inst = *st.instance;
    const unsigned A = inst.num_arms(), G = inst.num_groups();

    // Empirical gaps at the decision point.
    std::vector<std::vector<double>> gap_hat(G, std::vector<double>(A, 0.0));
    for (unsigned g = 0; g < G; ++g) {
        double best = -std::numeric_limits<double>::infinity();
        for (unsigned a : inst.structure.groups[g])
            if (st.stats.pull_count[a] > 0) best = std::max(best, st.stats.mean(a));
        for (unsigned a : inst.structure.groups[g])
            gap_hat[g][a] = st.stats.pull_count[a] > 0 ? best - st.stats.mean(a) : 0.0;
    }

    std::vector<std::vector<int>> var(G, std::vector<int>(A, -1));
    std::size_t nv = 0;
    for (unsigned g = 0; g < G; ++g)
        for (unsigned a : st.contention & inst.structure.groups[g]) var[g][a] = (int)nv++;
    const std::size_t q_var = nv++;

    LpProblem lp;
    lp.num_vars = nv;
    lp.objective.assign(nv, 0.0);
    lp.objective[q_var] = 1.0;

    const bool budget_rows = std::isfinite(st.eps_t);   // all dropped while eps = +inf
    for (unsigned g = 0; g < G; ++g) {
        const Bits64 mine = st.contention & inst.structure.groups[g];
        if (mine.empty()) continue;
        if (budget_rows) {
            std::vector<double> row(nv, 0.0);
            for (unsigned a : mine) row[var[g][a]] = gap_hat[g][a];
            lp.add_row(std::move(row), RowSense::Le, st.eps_t);
        }
        std::vector<double> mass(nv, 0.0);
        for (unsigned a : mine) mass[var[g][a]] = 1.0;
        lp.add_row(std::move(mass), RowSense::Le, 1.0);
    }
    for (unsigned a : st.contention) {
        std::vector<double> row(nv, 0.0);
        for (unsigned g = 0; g < G; ++g)
            if (var[g][a] >= 0) row[var[g][a]] = 1.0;
        row[q_var] = -1.0;
        lp.add_row(std::move(row), RowSense::Ge, 0.0);
    }
    return lp;
}

namespace {

unsigned empirical_best_arm(const ColUcbState& st, unsigned g) {
    double best = -std::numeric_limits<double>::infinity();
    unsigned pick = st.instance->structure.groups[g].lowest();
    for (unsigned a : st.instance->structure.groups[g]) {
        const double m = st.stats.pull_count[a] > 0
                             ? st.stats.mean(a)
                             : -std::numeric_limits<double>::infinity();
        if (m > best) { best = m; pick = a; }
    }
    return pick;
}

unsigned ucb_best_arm(const ColUcbState& st, unsigned g) {
    double best = -std::numeric_limits<double>::infinity();
    unsigned pick = st.instance->structure.groups[g].lowest();
    for (unsigned a : st.instance->structure.groups[g]) {
        const std::uint64_t n = st.stats.pull_count[a];
        const double u = n == 0 ? std::numeric_limits<double>::infinity()
                                : st.stats.mean(a) + confidence_width(st.config, n);
        if (u > best) { best = u; pick = a; }
    }
    return pick;
}

unsigned default_arm_for(const ColUcbState& st, unsigned g) {
    return st.config.default_arm == DefaultArm::UcbBest ? ucb_best_arm(st, g)
                                                        : empirical_best_arm(st, g);
}

} // namespace

void col_ucb_step(ColUcbState& st, Rng& env, Rng& policy, Trajectory& out) {
    if (st.round >= st.config.horizon)
        throw InvalidArgument("col_ucb_step: horizon exhausted");
    const Instance& inst = *st.instance;
    const unsigned G = inst.num_groups();

    TrajectoryRow row;
    row.action.resize(G);
    row.regret_increment.resize(G);

    if (st.round < st.burnin.length) {
        // Burn-in: fixed schedule; candidate/contention sets stay at their
        // initial values, but the confidence radius still tracks pull counts.
        for (unsigned g = 0; g < G; ++g) row.action[g] = st.burnin.pulls[st.round][g];
        std::uint64_t p = UINT64_MAX;
        for (unsigned a : st.contention) p = std::min(p, st.stats.pull_count[a]);
        st.p_min = p;
        st.eps_t = confidence_width(st.config, p);
        st.lp_ran = false;
        st.q_value = std::numeric_limits<double>::quiet_NaN();
    } else {
        update_contention(st);
        if (st.contention.any()) {
            st.last_lp_problem = build_q_problem(st);
            st.last_lp = solve_lp(st.last_lp_problem);
            if (st.last_lp.status != LpStatus::Optimal)
                throw InternalError("col_ucb_step: allocation LP was " +
                                    to_string(st.last_lp.status));
            st.q_value = st.last_lp.value;
            st.lp_ran = true;
            for (auto& r : st.alloc) std::fill(r.begin(), r.end(), 0.0);
            {
                std::size_t v = 0;
                for (unsigned g = 0; g < G; ++g)
                    for (unsigned a : st.contention & inst.structure.groups[g])
                        st.alloc[g][a] = std::max(0.0, st.last_lp.x[v++]);
            }
            // One uniform draw per group: walk the partial distribution over
            // the group's contested arms in ascending id order; leftover
            // probability mass goes to the default arm.
            for (unsigned g = 0; g < G; ++g) {
                const double u = policy.uniform01();
                double cum = 0.0;
                unsigned pick = UINT32_MAX;
                for (unsigned a : st.contention & inst.structure.groups[g]) {
                    cum += st.alloc[g][a];
                    if (u < cum) { pick = a; break; }
                }
                if (pick == UINT32_MAX) pick = default_arm_for(st, g);
                row.action[g] = (std::uint8_t)pick;
            }
        } else {
            // Every group is resolved: play the empirical best, no LP.
            st.q_value = std::numeric_limits<double>::quiet_NaN();
            st.lp_ran = false;
            for (unsigned g = 0; g < G; ++g)
                row.action[g] = (std::uint8_t)empirical_best_arm(st, g);
        }
    }

    // One reward draw per group, ascending id order, pooled statistics.
    for (unsigned g = 0; g < G; ++g) {
        const unsigned a = row.action[g];
        const double r = inst.rewards[a].sample(env);
        st.stats.pull_count[a] += 1;
        st.stats.reward_sum[a] += r;
        row.regret_increment[g] = inst.gap[g][a];
    }

    row.contention_size = (std::uint8_t)st.contention.count();
    row.q_value = st.q_value;
    row.eps_t = st.eps_t;
    row.epoch = (std::int8_t)epoch_of_eps(st.eps_t);
    st.round += 1;
    out.rows.push_back(std::move(row));
}

ColUcbPolicy::ColUcbPolicy(const Instance& instance, const AlgoConfig& config)
    : st_(init_state(instance, config)) {}

void ColUcbPolicy::step(Rng& env, Rng& policy_stream, Trajectory& out) {
    col_ucb_step(st_, env, policy_stream, out);
}

// ------------------------------------------------------------- baselines

namespace {

/// Each group runs plain UCB on its own observations.
class IndependentUcbPolicy final : public Policy {
public:
    IndependentUcbPolicy(const Instance& inst, const AlgoConfig& cfg)
        : inst_(inst), cfg_(cfg),
          count_(inst.num_groups(), std::vector<std::uint64_t>(inst.num_arms(), 0)),
          sum_(inst.num_groups(), std::vector<double>(inst.num_arms(), 0.0)) {
        cfg_.validate();
        round_ = 0;
    }

    PolicyKind kind() const override { return PolicyKind::IndependentUcb; }

    void step(Rng& env, Rng&, Trajectory& out) override {
        if (round_ >= cfg_.horizon)
            throw InvalidArgument("independent_ucb: horizon exhausted");
        const unsigned G = inst_.num_groups();
        TrajectoryRow row;
        row.action.resize(G);
        row.regret_increment.resize(G);
        row.eps_t = std::numeric_limits<double>::quiet_NaN();
        for (unsigned g = 0; g < G; ++g) {
            double best = -std::numeric_limits<double>::infinity();
            unsigned pick = inst_.structure.groups[g].lowest();
            for (unsigned a : inst_.structure.groups[g]) {
                const std::uint64_t n = count_[g][a];
                const double u = n == 0 ? std::numeric_limits<double>::infinity()
                                        : sum_[g][a] / (double)n + confidence_width(cfg_, n);
                if (u > best) { best = u; pick = a; }
            }
            row.action[g] = (std::uint8_t)pick;
        }
        for (unsigned g = 0; g < G; ++g) {
            const unsigned a = row.action[g];
            const double r = inst_.rewards[a].sample(env);
            count_[g][a] += 1;
            sum_[g][a] += r;
            row.regret_increment[g] = inst_.gap[g][a];
        }
        ++round_;
        out.rows.push_back(std::move(row));
    }

private:
    const Instance& inst_;
    AlgoConfig cfg_;
    std::vector<std::vector<std::uint64_t>> count_;
    std::vector<std::vector<double>> sum_;
    std::uint64_t round_ = 0;
};

/// Every group plays UCB on the pooled observations of all groups.
class PooledUcbPolicy final : public Policy {
public:
    PooledUcbPolicy(const Instance& inst, const AlgoConfig& cfg) : inst_(inst), cfg_(cfg) {
        cfg_.validate();
        count_.assign(inst.num_arms(), 0);
        sum_.assign(inst.num_arms(), 0.0);
    }

    PolicyKind kind() const override { return PolicyKind::PooledUcb; }

    void step(Rng& env, Rng&, Trajectory& out) override {
        if (round_ >= cfg_.horizon)
            throw InvalidArgument("pooled_ucb: horizon exhausted");
        const unsigned G = inst_.num_groups();
        TrajectoryRow row;
        row.action.resize(G);
        row.regret_increment.resize(G);
        row.eps_t = std::numeric_limits<double>::quiet_NaN();
        for (unsigned g = 0; g < G; ++g) {
            double best = -std::numeric_limits<double>::infinity();
            unsigned pick = inst_.structure.groups[g].lowest();
            for (unsigned a : inst_.structure.groups[g]) {
                const std::uint64_t n = count_[a];
                const double u = n == 0 ? std::numeric_limits<double>::infinity()
                                        : sum_[a] / (double)n + confidence_width(cfg_, n);
                if (u > best) { best = u; pick = a; }
            }
            row.action[g] = (std::uint8_t)pick;
        }
        for (unsigned g = 0; g < G; ++g) {
            const unsigned a = row.action[g];
            const double r = inst_.rewards[a].sample(env);
            count_[a] += 1;
            sum_[a] += r;
            row.regret_increment[g] = inst_.gap[g][a];
        }
        ++round_;
        out.rows.push_back(std::move(row));
    }

private:
    const Instance& inst_;
    AlgoConfig cfg_;
    std::vector<std::uint64_t> count_;
    std::vector<double> sum_;
    std::uint64_t round_ = 0;
};

} // namespace

std::unique_ptr<Policy> make_policy(PolicyKind kind, const Instance& instance,
                                    const AlgoConfig& config) {
    switch (kind) {
        case PolicyKind::ColUcb: return std::make_unique<ColUcbPolicy>(instance, config);
        case PolicyKind::IndependentUcb:
            return std::make_unique<IndependentUcbPolicy>(instance, config);
        case PolicyKind::PooledUcb:
            return std::make_unique<PooledUcbPolicy>(instance, config);
    }
    throw InvalidArgument("make_policy: unknown policy kind");
}

Trajectory run_policy(PolicyKind kind, const Instance& instance, const AlgoConfig& config,
                      std::uint64_t base_seed, std::uint64_t trial, bool coupled_env) {
    const std::uint64_t pk = (std::uint64_t)kind + 1;
    Rng env(derive_seed(base_seed, trial, coupled_env ? 0 : pk, StreamKind::Environment));
    Rng pol(derive_seed(base_seed, trial, pk, StreamKind::Policy));
    auto policy = make_policy(kind, instance, config);
    Trajectory traj;
    traj.policy = kind;
    traj.seed = base_seed + trial;
    traj.rows.reserve(config.horizon);
    for (std::uint64_t t = 0; t < config.horizon; ++t) policy->step(env, pol, traj);
    return traj;
}

} // namespace colucb
