#include "colucb/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace colucb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Kahan {
    double sum = 0.0, carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

double mean_of(const std::vector<double>& v) {
    Kahan k;
    for (double x : v) k.add(x);
    return v.empty() ? 0.0 : k.sum / (double)v.size();
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return kNaN;
    const double m = mean_of(v);
    Kahan k;
    for (double x : v) k.add((x - m) * (x - m));
    return std::sqrt(k.sum / (double)(v.size() - 1)) / std::sqrt((double)v.size());
}

/// Everything the reducer needs from one (policy, seed) trajectory.
struct SeedSummary {
    double final_regret = 0.0;
    double mid_regret = 0.0;
    std::vector<double> group_regret;        // at T
    std::vector<double> curve_regret;        // at each sample round
    std::vector<double> curve_contention;
    std::vector<double> curve_q;             // NaN where no LP ran
    struct Epoch {
        Kahan q, contention;
        std::uint64_t rounds = 0, q_rounds = 0;
    };
    std::vector<Epoch> epochs;               // indexed by epoch id
};

SeedSummary summarize(const Trajectory& traj, const std::vector<std::uint64_t>& samples,
                      std::uint64_t horizon) {
    SeedSummary s;
    const unsigned G = traj.rows.empty() ? 0 : (unsigned)traj.rows[0].regret_increment.size();
    s.group_regret.assign(G, 0.0);
    std::vector<Kahan> run(G);
    const std::uint64_t mid = horizon / 2;
    std::size_t next_sample = 0;
    for (std::uint64_t t = 1; t <= traj.rows.size(); ++t) {
        const TrajectoryRow& row = traj.rows[t - 1];
        for (unsigned g = 0; g < G; ++g) run[g].add(row.regret_increment[g]);
        if (row.epoch >= 0) {
            if ((std::size_t)row.epoch >= s.epochs.size()) s.epochs.resize(row.epoch + 1);
            auto& ep = s.epochs[row.epoch];
            ep.contention.add(row.contention_size);
            ep.rounds += 1;
            if (std::isfinite(row.q_value)) {
                ep.q.add(row.q_value);
                ep.q_rounds += 1;
            }
        }
        const bool sampled = next_sample < samples.size() && samples[next_sample] == t;
        if (sampled || t == mid || t == traj.rows.size()) {
            double worst = 0.0;
            for (unsigned g = 0; g < G; ++g) worst = std::max(worst, run[g].sum);
            if (sampled) {
                s.curve_regret.push_back(worst);
                s.curve_contention.push_back(row.contention_size);
                s.curve_q.push_back(row.q_value);
                ++next_sample;
            }
            if (t == mid) s.mid_regret = worst;
            if (t == traj.rows.size()) s.final_regret = worst;
        }
    }
    for (unsigned g = 0; g < G; ++g) s.group_regret[g] = run[g].sum;
    return s;
}

} // namespace

void ExperimentConfig::validate() const {
    instance.structure.validate();
    if (policies.empty()) throw DataError("experiment: at least one policy required");
    for (std::size_t i = 0; i < policies.size(); ++i)
        for (std::size_t j = i + 1; j < policies.size(); ++j)
            if (policies[i] == policies[j])
                throw DataError("experiment: duplicate policy " + to_string(policies[i]));
    if (horizon < 2) throw DataError("experiment: horizon must be >= 2");
    if (num_seeds < 1) throw DataError("experiment: num_seeds must be >= 1");
    if (!(const_scale > 0)) throw DataError("experiment: const_scale must be > 0");
    if (downsample_points < 2) throw DataError("experiment: downsample_points must be >= 2");
}

std::vector<std::uint64_t> downsample_rounds(std::uint64_t horizon, unsigned max_points) {
    std::vector<std::uint64_t> out;
    if (horizon <= max_points) {
        for (std::uint64_t t = 1; t <= horizon; ++t) out.push_back(t);
        return out;
    }
    for (unsigned i = 0; i < max_points; ++i) {
        const double f = (double)i / (max_points - 1);
        const std::uint64_t t =
            (std::uint64_t)std::llround(std::pow((double)horizon, f));
        out.push_back(std::min<std::uint64_t>(std::max<std::uint64_t>(t, 1), horizon));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto t_start = std::chrono::steady_clock::now();

    const AlgoConfig algo_cfg = make_config(config.instance.structure, config.horizon,
                                            config.const_scale, config.default_arm);
    const std::vector<std::uint64_t> samples =
        downsample_rounds(config.horizon, config.downsample_points);

    const std::size_t P = config.policies.size(), N = config.num_seeds;
    std::vector<std::vector<SeedSummary>> results(P, std::vector<SeedSummary>(N));

    // Embarrassingly parallel over (policy, seed); reductions happen after
    // the join in fixed seed order, so scheduling cannot change the report.
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= P * N) return;
            const std::size_t pi = task / N, seed = task % N;
            const Trajectory traj =
                run_policy(config.policies[pi], config.instance, algo_cfg,
                           config.base_seed, seed, config.coupled_streams);
            results[pi][seed] = summarize(traj, samples, config.horizon);
        }
    };
    unsigned jobs = config.jobs ? config.jobs : std::thread::hardware_concurrency();
    jobs = std::max(1u, std::min<unsigned>(jobs, (unsigned)(P * N)));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < jobs; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ExperimentReport report;
    report.config = config;
    for (PolicyKind p : config.policies)
        if (p == PolicyKind::ColUcb)
            report.burnin_length =
                burn_in_schedule(config.instance.structure, algo_cfg.burnin_pulls).length;

    const unsigned G = config.instance.num_groups();
    for (std::size_t pi = 0; pi < P; ++pi) {
        PolicyReport pr;
        pr.policy = config.policies[pi];
        for (std::size_t s = 0; s < N; ++s) {
            pr.per_seed_final.push_back(results[pi][s].final_regret);
            pr.per_seed_mid.push_back(results[pi][s].mid_regret);
        }
        pr.mean_regret = mean_of(pr.per_seed_final);
        pr.stderr_regret = stderr_of(pr.per_seed_final);

        pr.mean_group_regret.assign(G, 0.0);
        for (unsigned g = 0; g < G; ++g) {
            Kahan k;
            for (std::size_t s = 0; s < N; ++s) k.add(results[pi][s].group_regret[g]);
            pr.mean_group_regret[g] = k.sum / (double)N;
        }

        for (std::size_t i = 0; i < samples.size(); ++i) {
            CurvePoint cp;
            cp.t = samples[i];
            Kahan reg, cont, q;
            std::size_t q_n = 0;
            for (std::size_t s = 0; s < N; ++s) {
                reg.add(results[pi][s].curve_regret[i]);
                cont.add(results[pi][s].curve_contention[i]);
                const double qv = results[pi][s].curve_q[i];
                if (std::isfinite(qv)) { q.add(qv); ++q_n; }
            }
            cp.mean_regret = reg.sum / (double)N;
            cp.mean_contention = cont.sum / (double)N;
            cp.mean_q = q_n ? q.sum / (double)q_n : kNaN;
            if (N >= 2) {
                std::vector<double> vals;
                for (std::size_t s = 0; s < N; ++s)
                    vals.push_back(results[pi][s].curve_regret[i]);
                cp.stderr_regret = stderr_of(vals);
            } else {
                cp.stderr_regret = kNaN;
            }
            pr.curve.push_back(cp);
        }

        std::size_t max_epoch = 0;
        for (std::size_t s = 0; s < N; ++s)
            max_epoch = std::max(max_epoch, results[pi][s].epochs.size());
        for (std::size_t k = 0; k < max_epoch; ++k) {
            EpochDiagnostic ed;
            ed.epoch = (int)k;
            Kahan q, cont;
            std::uint64_t rounds = 0, q_rounds = 0;
            for (std::size_t s = 0; s < N; ++s) {
                if (k >= results[pi][s].epochs.size()) continue;
                const auto& ep = results[pi][s].epochs[k];
                q.add(ep.q.sum);
                cont.add(ep.contention.sum);
                rounds += ep.rounds;
                q_rounds += ep.q_rounds;
            }
            if (rounds == 0) continue;
            ed.rounds = rounds;
            ed.mean_contention = cont.sum / (double)rounds;
            ed.mean_q = q_rounds ? q.sum / (double)q_rounds : kNaN;
            pr.epochs.push_back(ed);
        }
        report.policies.push_back(std::move(pr));
    }

    if (N >= 2) {
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t j = 0; j < P; ++j)
                if (i != j)
                    report.comparisons.push_back(
                        compare(report, config.policies[i], config.policies[j]));
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

PairedComparison compare(const ExperimentReport& report, PolicyKind a, PolicyKind b) {
    const PolicyReport* ra = nullptr;
    const PolicyReport* rb = nullptr;
    for (const auto& pr : report.policies) {
        if (pr.policy == a) ra = &pr;
        if (pr.policy == b) rb = &pr;
    }
    if (!ra || !rb)
        throw InvalidArgument("compare: policy missing from the report");
    if (ra->per_seed_final.size() < 2 || ra->per_seed_final.size() != rb->per_seed_final.size())
        throw InvalidArgument("compare: need >= 2 matched seeds per policy");

    // Matched by seed index: differences are seed-wise, so any reordering of
    // the seed set permutes the diffs without changing delta.
    std::vector<double> diffs;
    for (std::size_t s = 0; s < ra->per_seed_final.size(); ++s)
        diffs.push_back(ra->per_seed_final[s] - rb->per_seed_final[s]);

    PairedComparison cmp;
    cmp.policy_a = a;
    cmp.policy_b = b;
    cmp.delta = mean_of(diffs);
    const double se = stderr_of(diffs);
    cmp.z_score = (std::isfinite(se) && se > 0) ? cmp.delta / se : kNaN;
    return cmp;
}

} // namespace colucb
