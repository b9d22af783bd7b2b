#include <cmath>
#include <vector>

#include "colucb/sim.hpp"
#include "doctest.h"

using namespace colucb;

namespace {

GroupStructure chain3() {
    GroupStructure s;
    s.num_arms = 3;
    s.groups = {Bits64{0b011}, Bits64{0b110}};
    return s;
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.instance = make_gaussian_instance(chain3(), {0.9, 0.6, 0.7});
    cfg.policies = {PolicyKind::ColUcb, PolicyKind::IndependentUcb};
    cfg.horizon = 400;
    cfg.num_seeds = 3;
    cfg.base_seed = 5;
    cfg.const_scale = 0.02;
    cfg.jobs = 1;
    return cfg;
}

bool same_or_both_nan(double a, double b) {
    return (std::isnan(a) && std::isnan(b)) || a == b;
}

} // namespace

TEST_CASE("experiment validation") {
    ExperimentConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    SUBCASE("duplicate policy") {
        cfg.policies = {PolicyKind::ColUcb, PolicyKind::ColUcb};
        CHECK_THROWS_AS(cfg.validate(), DataError);
    }
    SUBCASE("no policies") {
        cfg.policies.clear();
        CHECK_THROWS_AS(cfg.validate(), DataError);
    }
    SUBCASE("tiny horizon") {
        cfg.horizon = 1;
        CHECK_THROWS_AS(cfg.validate(), DataError);
    }
    SUBCASE("zero seeds") {
        cfg.num_seeds = 0;
        CHECK_THROWS_AS(cfg.validate(), DataError);
    }
    SUBCASE("bad scale") {
        cfg.const_scale = 0.0;
        CHECK_THROWS_AS(cfg.validate(), DataError);
    }
    SUBCASE("degenerate downsampling") {
        cfg.downsample_points = 1;
        CHECK_THROWS_AS(cfg.validate(), DataError);
    }
}

TEST_CASE("log-spaced downsampling") {
    SUBCASE("small horizons keep every round") {
        const std::vector<std::uint64_t> r = downsample_rounds(20, 512);
        REQUIRE(r.size() == 20);
        for (std::uint64_t t = 1; t <= 20; ++t) CHECK(r[t - 1] == t);
    }
    SUBCASE("large horizons compress but keep the endpoints") {
        const std::vector<std::uint64_t> r = downsample_rounds(100000, 64);
        CHECK(r.size() <= 64);
        CHECK(r.front() == 1);
        CHECK(r.back() == 100000);
        for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
    }
}

TEST_CASE("experiment report shape and determinism") {
    const ExperimentConfig cfg = small_config();
    const ExperimentReport rep = run_experiment(cfg);

    REQUIRE(rep.policies.size() == 2);
    CHECK(rep.burnin_length > 0);
    CHECK(rep.burnin_length < cfg.horizon);
    CHECK(rep.wall_seconds >= 0.0);
    for (const PolicyReport& p : rep.policies) {
        REQUIRE(p.per_seed_final.size() == 3);
        REQUIRE(p.per_seed_mid.size() == 3);
        REQUIRE(p.mean_group_regret.size() == 2);
        REQUIRE_FALSE(p.curve.empty());
        CHECK(p.curve.front().t == 1);
        CHECK(p.curve.back().t == cfg.horizon);
        CHECK(p.curve.back().mean_regret == doctest::Approx(p.mean_regret).epsilon(1e-12));
        // Collaborative regret is a max over groups: its mean dominates the
        // mean of every single group.
        for (const double gr : p.mean_group_regret) CHECK(p.mean_regret >= gr - 1e-9);
        // Curves are cumulative, hence non-decreasing in t.
        for (std::size_t i = 1; i < p.curve.size(); ++i)
            CHECK(p.curve[i].mean_regret >= p.curve[i - 1].mean_regret - 1e-9);
    }
    // Comparisons cover both ordered pairs and are antisymmetric.
    REQUIRE(rep.comparisons.size() == 2);
    CHECK(rep.comparisons[0].delta == doctest::Approx(-rep.comparisons[1].delta));
    if (!std::isnan(rep.comparisons[0].z_score))
        CHECK(rep.comparisons[0].z_score ==
              doctest::Approx(-rep.comparisons[1].z_score));

    SUBCASE("identical rerun is bitwise identical") {
        const ExperimentReport rep2 = run_experiment(cfg);
        for (std::size_t i = 0; i < rep.policies.size(); ++i) {
            CHECK(rep.policies[i].mean_regret == rep2.policies[i].mean_regret);
            CHECK(rep.policies[i].per_seed_final == rep2.policies[i].per_seed_final);
        }
    }
    SUBCASE("thread count does not change the numbers") {
        ExperimentConfig threaded = cfg;
        threaded.jobs = 3;
        const ExperimentReport rep3 = run_experiment(threaded);
        for (std::size_t i = 0; i < rep.policies.size(); ++i) {
            CHECK(rep.policies[i].per_seed_final == rep3.policies[i].per_seed_final);
            CHECK(rep.policies[i].mean_regret == rep3.policies[i].mean_regret);
            CHECK(same_or_both_nan(rep.policies[i].stderr_regret,
                                   rep3.policies[i].stderr_regret));
            REQUIRE(rep.policies[i].curve.size() == rep3.policies[i].curve.size());
            for (std::size_t k = 0; k < rep.policies[i].curve.size(); ++k)
                CHECK(rep.policies[i].curve[k].mean_regret ==
                      rep3.policies[i].curve[k].mean_regret);
        }
    }
}

TEST_CASE("paired comparison bookkeeping") {
    const ExperimentConfig cfg = small_config();
    const ExperimentReport rep = run_experiment(cfg);
    const PairedComparison c = compare(rep, PolicyKind::ColUcb, PolicyKind::IndependentUcb);
    // delta recomputed from the per-seed vectors.
    double want = 0.0;
    for (std::size_t s = 0; s < 3; ++s)
        want += rep.policies[0].per_seed_final[s] - rep.policies[1].per_seed_final[s];
    want /= 3.0;
    CHECK(c.delta == doctest::Approx(want).epsilon(1e-12));
    CHECK_THROWS_AS(compare(rep, PolicyKind::ColUcb, PolicyKind::PooledUcb),
                    InvalidArgument);
}

TEST_CASE("degenerate statistics") {
    SUBCASE("equal means mean zero regret everywhere") {
        ExperimentConfig cfg = small_config();
        cfg.instance = make_gaussian_instance(chain3(), {0.5, 0.5, 0.5});
        cfg.policies = {PolicyKind::ColUcb, PolicyKind::IndependentUcb};
        const ExperimentReport rep = run_experiment(cfg);
        for (const PolicyReport& p : rep.policies) {
            CHECK(p.mean_regret == 0.0);
            CHECK(p.stderr_regret == 0.0);
        }
        // Identical per-seed diffs of zero: the z-score has no spread.
        CHECK(std::isnan(rep.comparisons[0].z_score));
        CHECK(rep.comparisons[0].delta == 0.0);
    }
    SUBCASE("single seed has no spread estimate") {
        ExperimentConfig cfg = small_config();
        cfg.num_seeds = 1;
        cfg.policies = {PolicyKind::IndependentUcb};
        const ExperimentReport rep = run_experiment(cfg);
        CHECK(std::isnan(rep.policies[0].stderr_regret));
        CHECK(rep.policies[0].per_seed_final.size() == 1);
        CHECK(rep.comparisons.empty());
        CHECK(rep.burnin_length == 0);   // no Col-UCB in the roster
    }
}

TEST_CASE("epoch diagnostics") {
    ExperimentConfig cfg = small_config();
    cfg.policies = {PolicyKind::ColUcb};
    const ExperimentReport rep = run_experiment(cfg);
    const PolicyReport& p = rep.policies[0];
    REQUIRE_FALSE(p.epochs.empty());
    std::uint64_t total_rounds = 0;
    for (std::size_t i = 0; i < p.epochs.size(); ++i) {
        CHECK(p.epochs[i].rounds > 0);
        if (i > 0) CHECK(p.epochs[i].epoch > p.epochs[i - 1].epoch);
        total_rounds += p.epochs[i].rounds;
    }
    // Epochs partition the rounds with an active confidence radius; resolved
    // rounds (epoch -1) fall outside.
    CHECK(total_rounds <= cfg.horizon * cfg.num_seeds);
    // The baselines never report epochs.
    ExperimentConfig base = small_config();
    base.policies = {PolicyKind::IndependentUcb};
    CHECK(run_experiment(base).policies[0].epochs.empty());
}

TEST_CASE("curve q and contention respond to resolution") {
    ExperimentConfig cfg = small_config();
    cfg.policies = {PolicyKind::ColUcb};
    cfg.horizon = 2000;
    const ExperimentReport rep = run_experiment(cfg);
    const PolicyReport& p = rep.policies[0];
    // Early rounds: full contention (3 arms).  Gap 0.1 at T = 2000 with a
    // small scale resolves: late contention drops below the start.
    CHECK(p.curve.front().mean_contention == doctest::Approx(3.0));
    CHECK(p.curve.back().mean_contention < 3.0);
}
