#include "colucb/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace colucb {

// ----------------------------------------------------------------- rng

std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t trial,
                          std::uint64_t policy_index, StreamKind kind) {
    std::uint64_t s = mix64(base_seed ^ 0xc0ffee123456789ULL);
    s = mix64(s ^ (trial * 0x9e3779b97f4a7c15ULL));
    s = mix64(s ^ (policy_index * 0xd1342543de82ef95ULL));
    s = mix64(s ^ ((std::uint64_t)kind * 0x2545f4914f6cdd1dULL));
    return s;
}

double Rng::normal_quantile(double p) {
    // Wichura (1988), algorithm AS 241, PPND16.
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = q < 0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0 ? -v : v;
}

// ----------------------------------------------------------- structure

Bits64 GroupStructure::cover(Bits64 gs) const {
    Bits64 c;
    for (unsigned g : gs) c |= groups[g];
    return c;
}

Bits64 GroupStructure::groups_containing(unsigned a) const {
    Bits64 r;
    for (unsigned g = 0; g < num_groups(); ++g)
        if (groups[g].test(a)) r.set(g);
    return r;
}

unsigned GroupStructure::max_group_size() const {
    unsigned m = 0;
    for (const auto& gr : groups) m = std::max(m, (unsigned)gr.count());
    return m;
}

void GroupStructure::validate() const {
    if (num_arms < 1 || num_arms > kMaxArms)
        throw DataError("structure: num_arms must be in [1, 64], got " +
                        std::to_string(num_arms));
    if (groups.empty() || groups.size() > kMaxGroups)
        throw DataError("structure: number of groups must be in [1, 64], got " +
                        std::to_string(groups.size()));
    const Bits64 all = all_arms();
    Bits64 covered;
    for (unsigned g = 0; g < num_groups(); ++g) {
        if (groups[g].empty())
            throw DataError("structure: group " + std::to_string(g) + " is empty");
        if (!groups[g].subset_of(all))
            throw DataError("structure: group " + std::to_string(g) +
                            " references an arm >= num_arms");
        covered |= groups[g];
    }
    if (covered != all)
        throw DataError("structure: arms not covered by any group exist");
}

// ----------------------------------------------------------- rewards

void RewardModel::validate() const {
    if (!std::isfinite(mean)) throw DataError("reward model: mean must be finite");
    if (kind == RewardKind::Gaussian) {
        if (!std::isfinite(variance) || variance <= 0)
            throw DataError("reward model: gaussian variance must be positive");
    } else {
        if (mean < 0.0 || mean > 1.0)
            throw DataError("reward model: bernoulli mean must lie in [0, 1]");
    }
}

double RewardModel::sample(Rng& rng) const {
    if (kind == RewardKind::Gaussian)
        return mean + std::sqrt(variance) * rng.gaussian();
    return rng.bernoulli(mean) ? 1.0 : 0.0;
}

// ----------------------------------------------------------- instance

Instance build_instance(GroupStructure structure, std::vector<RewardModel> rewards) {
    structure.validate();
    if (rewards.size() != structure.num_arms)
        throw DataError("instance: expected " + std::to_string(structure.num_arms) +
                        " reward models, got " + std::to_string(rewards.size()));
    for (const auto& r : rewards) r.validate();

    Instance inst;
    inst.structure = std::move(structure);
    inst.rewards = std::move(rewards);
    const unsigned A = inst.num_arms(), G = inst.num_groups();
    inst.mean.resize(A);
    for (unsigned a = 0; a < A; ++a) inst.mean[a] = inst.rewards[a].mean;

    inst.group_best.assign(G, 0.0);
    inst.gap.assign(G, std::vector<double>(A, 0.0));
    inst.gap_min.assign(G, 0.0);
    inst.gap_max = 0.0;
    for (unsigned g = 0; g < G; ++g) {
        const Bits64 arms = inst.structure.groups[g];
        double best = -std::numeric_limits<double>::infinity();
        for (unsigned a : arms) best = std::max(best, inst.mean[a]);
        inst.group_best[g] = best;
        double second = -std::numeric_limits<double>::infinity();
        bool seen_best = false;
        for (unsigned a : arms) {
            inst.gap[g][a] = best - inst.mean[a];
            inst.gap_max = std::max(inst.gap_max, inst.gap[g][a]);
            if (!seen_best && inst.mean[a] == best) {
                seen_best = true;   // skip one copy of the maximizer
            } else {
                second = std::max(second, inst.mean[a]);
            }
        }
        // Margin of the best arm over the runner-up; 0 on an exact tie and
        // +inf for a single-arm group (nothing to separate).
        inst.gap_min[g] = arms.count() == 1 ? std::numeric_limits<double>::infinity()
                                            : best - second;
    }
    return inst;
}

Instance make_gaussian_instance(GroupStructure structure, const std::vector<double>& means,
                                double variance) {
    std::vector<RewardModel> rewards;
    rewards.reserve(means.size());
    for (double m : means) rewards.push_back({RewardKind::Gaussian, m, variance});
    return build_instance(std::move(structure), std::move(rewards));
}

Instance make_bernoulli_instance(GroupStructure structure, const std::vector<double>& means) {
    std::vector<RewardModel> rewards;
    rewards.reserve(means.size());
    for (double m : means) rewards.push_back({RewardKind::Bernoulli, m, 0.0});
    return build_instance(std::move(structure), std::move(rewards));
}

// ----------------------------------------------------------- generators

GroupStructure all_shared_structure(unsigned num_groups, unsigned num_arms) {
    GroupStructure s;
    s.num_arms = num_arms;
    s.groups.assign(num_groups, Bits64::first_n(num_arms));
    s.validate();
    return s;
}

GroupStructure disjoint_structure(const std::vector<unsigned>& sizes) {
    GroupStructure s;
    unsigned next = 0;
    for (unsigned size : sizes) {
        Bits64 g;
        for (unsigned i = 0; i < size; ++i) g.set(next + i);
        s.groups.push_back(g);
        next += size;
    }
    s.num_arms = next;
    s.validate();
    return s;
}

GroupStructure partition_groups(unsigned num_arms, unsigned k) {
    if (k == 0 || num_arms % k != 0)
        throw InvalidArgument("partition_groups: k must divide num_arms");
    return disjoint_structure(std::vector<unsigned>(num_arms / k, k));
}

GroupStructure all_k_subset_groups(unsigned num_arms, unsigned k) {
    if (k == 0 || k > num_arms)
        throw InvalidArgument("all_k_subset_groups: need 1 <= k <= num_arms");
    GroupStructure s;
    s.num_arms = num_arms;
    // Walk all subsets in ascending mask order, keeping those with k bits.
    const std::uint64_t end = num_arms >= 64 ? ~0ULL : (1ULL << num_arms);
    for (std::uint64_t m = 1; m < end; ++m) {
        if (std::popcount(m) == (int)k) {
            if (s.groups.size() >= kMaxGroups)
                throw InvalidArgument("all_k_subset_groups: C(n, k) exceeds the 64-group cap");
            s.groups.push_back(Bits64{m});
        }
    }
    s.validate();
    return s;
}

GroupStructure random_structure(Rng& rng, unsigned num_arms, unsigned num_groups,
                                unsigned max_group_size) {
    GroupStructure s;
    s.num_arms = num_arms;
    for (unsigned g = 0; g < num_groups; ++g) {
        const unsigned size =
            1 + (unsigned)(rng.raw() % std::min(max_group_size, num_arms));
        Bits64 arms;
        while ((unsigned)arms.count() < size) arms.set((unsigned)(rng.raw() % num_arms));
        s.groups.push_back(arms);
    }
    // Patch uncovered arms into random groups so validate() passes.
    Bits64 covered;
    for (const auto& g : s.groups) covered |= g;
    for (unsigned a = 0; a < num_arms; ++a)
        if (!covered.test(a)) s.groups[rng.raw() % num_groups].set(a);
    s.validate();
    return s;
}

// ----------------------------------------------------------- config

void AlgoConfig::validate() const {
    if (horizon < 2) throw DataError("config: horizon must be >= 2");
    if (!(const_scale > 0)) throw DataError("config: const_scale must be > 0");
    if (!(conf_const > 0)) throw DataError("config: conf_const must be > 0");
    if (burnin_pulls < 1) throw DataError("config: burnin_pulls must be >= 1");
}

AlgoConfig make_config(const GroupStructure& structure, std::uint64_t horizon,
                       double const_scale, DefaultArm default_arm) {
    structure.validate();
    if (horizon < 2) throw DataError("config: horizon must be >= 2");
    if (!(const_scale > 0)) throw DataError("config: const_scale must be > 0");
    AlgoConfig cfg;
    cfg.horizon = horizon;
    cfg.const_scale = const_scale;
    cfg.default_arm = default_arm;
    const double biggest = std::max(structure.num_arms, structure.num_groups());
    cfg.log_ratio = 1.0 + std::log(biggest) / std::log((double)horizon);
    cfg.conf_const = 60.0 * cfg.log_ratio * const_scale;
    cfg.burnin_pulls =
        (std::uint64_t)std::ceil(16.0 * cfg.conf_const * std::log((double)horizon));
    if (cfg.burnin_pulls < 1) cfg.burnin_pulls = 1;
    cfg.validate();
    return cfg;
}

double confidence_width(const AlgoConfig& cfg, std::uint64_t pulls) {
    if (pulls == 0) return std::numeric_limits<double>::infinity();
    return std::sqrt(cfg.conf_const * std::log((double)cfg.horizon) / (double)pulls);
}

// ----------------------------------------------------------- names

std::string to_string(RewardKind k) {
    return k == RewardKind::Gaussian ? "gaussian" : "bernoulli";
}

std::string to_string(DefaultArm d) {
    return d == DefaultArm::EmpiricalBest ? "empirical_best" : "ucb_best";
}

RewardKind reward_kind_from_string(const std::string& s) {
    if (s == "gaussian") return RewardKind::Gaussian;
    if (s == "bernoulli") return RewardKind::Bernoulli;
    throw DataError("unknown reward kind '" + s + "' (expected gaussian|bernoulli)");
}

DefaultArm default_arm_from_string(const std::string& s) {
    if (s == "empirical_best") return DefaultArm::EmpiricalBest;
    if (s == "ucb_best") return DefaultArm::UcbBest;
    throw DataError("unknown default_arm '" + s + "' (expected empirical_best|ucb_best)");
}

} // namespace colucb
