#include "colucb/lowerbound.hpp"

#include <algorithm>
#include <cmath>

#include "colucb/algo.hpp"
#include "colucb/analysis.hpp"

namespace colucb {

ZtResult z_t(const Instance& instance, std::uint64_t horizon) {
    if (horizon < 1) throw InvalidArgument("z_t: horizon must be >= 1");
    ZtResult res;
    res.eps_t = eps_t(instance, (double)horizon);
    const double lo = res.eps_t, hi = 0.5 * (1.0 + res.eps_t);

    auto objective = [&](double z) {
        const double m = m_eps(instance, z);
        return std::isinf(m) ? std::numeric_limits<double>::infinity() : m * z * z;
    };

    // Grid: 256 log-spaced points plus the gap breakpoints inside [lo, hi];
    // earliest strict minimum wins (tie rule: smallest z).
    std::vector<double> grid;
    constexpr int kPoints = 256;
    for (int i = 0; i <= kPoints; ++i)
        grid.push_back(lo * std::pow(hi / lo, (double)i / kPoints));
    for (double b : gap_breakpoints(instance))
        if (b > lo && b < hi) grid.push_back(b);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::size_t best_i = 0;
    double best = objective(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double v = objective(grid[i]);
        if (v < best) { best = v; best_i = i; }
    }

    // Local refinement between the grid neighbours of the incumbent,
    // keeping the earliest minimum on each re-grid.
    double a = best_i > 0 ? grid[best_i - 1] : grid[best_i];
    double b = best_i + 1 < grid.size() ? grid[best_i + 1] : grid[best_i];
    double arg = grid[best_i];
    for (int pass = 0; pass < 4; ++pass) {
        constexpr int kFine = 32;
        double pa = a, pb = b;
        for (int i = 0; i <= kFine; ++i) {
            const double z = pa + (pb - pa) * i / kFine;
            const double v = objective(z);
            if (v < best) {
                best = v;
                arg = z;
                a = std::max(pa, z - (pb - pa) / kFine);
                b = std::min(pb, z + (pb - pa) / kFine);
            }
        }
        if (pb - pa <= 1e-12 * arg) break;
        if (a == pa && b == pb) {   // no improvement: shrink around incumbent
            a = std::max(pa, arg - (pb - pa) / kFine);
            b = std::min(pb, arg + (pb - pa) / kFine);
        }
    }
    res.z = arg;
    res.objective = best;
    return res;
}

Instance perturb_second_best(const Instance& base, unsigned a0, unsigned g0,
                             double eps, int sign, bool clamp_quarter) {
    if (sign != 1 && sign != -1)
        throw InvalidArgument("perturb_second_best: sign must be +1 or -1");
    if (g0 >= base.num_groups())
        throw InvalidArgument("perturb_second_best: group id out of range");
    if (a0 >= base.num_arms() || !base.structure.groups[g0].test(a0))
        throw InvalidArgument("perturb_second_best: arm not in the group");
    if (!(eps > 0)) throw InvalidArgument("perturb_second_best: eps must be positive");
    if (base.structure.groups[g0].count() < 2)
        throw InvalidArgument("perturb_second_best: the group needs another arm");

    double use_eps = eps;
    if (clamp_quarter) {
        for (double m : base.mean)
            if (m < 0.25 || m > 0.75)
                throw DataError("perturb_second_best: clamped variant needs means in [1/4, 3/4]");
        use_eps = std::min(eps, 0.25);
    }

    // nu = best mean of the group excluding the perturbed arm.
    double nu = -std::numeric_limits<double>::infinity();
    for (unsigned a : base.structure.groups[g0])
        if (a != a0) nu = std::max(nu, base.mean[a]);

    std::vector<RewardModel> rewards = base.rewards;
    rewards[a0].mean = nu + sign * use_eps;
    if (rewards[a0].kind == RewardKind::Bernoulli &&
        (rewards[a0].mean < 0.0 || rewards[a0].mean > 1.0))
        throw DataError("perturb_second_best: perturbed bernoulli mean leaves [0, 1]");
    return build_instance(base.structure, std::move(rewards));
}

AdversaryResult theorem4_adversary(const Instance& base, const AlgoConfig& config,
                                   std::uint64_t base_seed, unsigned pilot_seeds) {
    config.validate();
    if (pilot_seeds < 1)
        throw InvalidArgument("theorem4_adversary: need at least one pilot seed");
    for (const auto& r : base.rewards)
        if (r.kind != RewardKind::Gaussian || r.variance != 1.0)
            throw DataError("theorem4_adversary: base must have unit-variance gaussian arms");

    AdversaryResult res;
    res.z = z_t(base, config.horizon).z;

    const Bits64 contested = contention_star(base, res.z);
    if (contested.empty())
        throw DataError("theorem4_adversary: no contested arm at tolerance z_t");

    // Pilot runs of the algorithm to find the least-pulled contested arm.
    res.pilot_pulls.assign(base.num_arms(), 0.0);
    for (unsigned s = 0; s < pilot_seeds; ++s) {
        const Trajectory traj =
            run_policy(PolicyKind::ColUcb, base, config, base_seed, s, false);
        for (const auto& row : traj.rows)
            for (std::uint8_t a : row.action) res.pilot_pulls[a] += 1.0;
    }
    for (double& v : res.pilot_pulls) v /= pilot_seeds;

    unsigned a0 = contested.lowest();
    for (unsigned a : contested)
        if (res.pilot_pulls[a] < res.pilot_pulls[a0]) a0 = a;   // ties keep lowest id
    res.a0 = a0;

    // Witness group: gap_min <= z and gap(g, a0) <= z, lowest id.
    unsigned g0 = UINT32_MAX;
    for (unsigned g = 0; g < base.num_groups(); ++g) {
        if (!base.structure.groups[g].test(a0)) continue;
        if (base.gap_min[g] <= res.z && base.gap[g][a0] <= res.z) { g0 = g; break; }
    }
    if (g0 == UINT32_MAX)
        throw InternalError("theorem4_adversary: contested arm without a witness group");
    res.g0 = g0;

    double nu = -std::numeric_limits<double>::infinity();
    for (unsigned a : base.structure.groups[g0])
        if (a != a0) nu = std::max(nu, base.mean[a]);
    res.nu = nu;

    res.j_plus = perturb_second_best(base, a0, g0, res.z, +1);
    res.j_minus = perturb_second_best(base, a0, g0, res.z, -1);
    return res;
}

Instance minimax_family(const GroupStructure& structure, Bits64 S, Bits64 cover_groups,
                        RewardKind kind) {
    structure.validate();
    if (S.empty()) throw InvalidArgument("minimax_family: S must be nonempty");
    if (!S.subset_of(structure.all_arms()))
        throw InvalidArgument("minimax_family: S contains an arm >= num_arms");
    if (cover_groups.empty() ||
        !cover_groups.subset_of(Bits64::first_n(structure.num_groups())))
        throw InvalidArgument("minimax_family: invalid cover group set");
    const Bits64 covered = structure.cover(cover_groups);
    if (!S.subset_of(covered))
        throw InvalidArgument("minimax_family: the chosen groups do not cover S");

    std::vector<double> means(structure.num_arms, 1.0);
    for (unsigned a : covered) means[a] = 0.0;
    for (unsigned a : S) means[a] = 0.5;
    return kind == RewardKind::Gaussian
               ? make_gaussian_instance(structure, means)
               : make_bernoulli_instance(structure, means);
}

} // namespace colucb
