#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "colucb/analysis.hpp"
#include "colucb/flow.hpp"
#include "colucb/lp.hpp"
#include "colucb/oracle.hpp"

namespace colucb {

namespace {

/// Runs `body` (which returns an empty string on pass, a failure detail
/// otherwise), appends one log line, and folds the verdict into `all_pass`.
void suite(const std::string& name, bool& all_pass, std::string& log,
           const std::function<std::string()>& body) {
    std::string detail;
    try {
        detail = body();
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    if (detail.empty()) {
        log += name + ": pass\n";
    } else {
        log += name + ": FAIL (" + detail + ")\n";
        all_pass = false;
    }
}

std::string check_close(const char* what, double got, double want, double tol) {
    if (std::fabs(got - want) <= tol * std::max(1.0, std::fabs(want))) return {};
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: got %.12g, want %.12g", what, got, want);
    return buf;
}

} // namespace

SelftestResult run_selftest(const SelftestOptions& options) {
    SelftestResult out;
    bool all_pass = true;

    suite("lp_duality", all_pass, out.log, [&]() -> std::string {
        Rng rng(derive_seed(options.seed, 0, 1, StreamKind::Policy));
        LpTolerances tol;
        if (options.lp_tolerance_override >= 0.0) {
            tol.feas_tol = options.lp_tolerance_override;
            tol.gap_tol = options.lp_tolerance_override;
            tol.pivot_tol = options.lp_tolerance_override;
        }
        for (int k = 0; k < 60; ++k) {
            const unsigned n = 2 + (unsigned)(rng.uniform01() * 5) % 5;
            const unsigned m = 1 + (unsigned)(rng.uniform01() * 6) % 6;
            const LpProblem lp = oracle::random_boxed_lp(rng, n, m);
            const LpSolution sol = solve_lp(lp, tol);
            if (sol.status != LpStatus::Optimal)
                return "case " + std::to_string(k) + ": boxed LP not Optimal";
            const double ref = oracle::lp_value_by_vertex_enumeration(lp);
            const std::string err =
                check_close(("case " + std::to_string(k)).c_str(), sol.value, ref, 1e-7);
            if (!err.empty()) return err;
            if (sol.duality_gap > 1e-7 * std::max(1.0, std::fabs(sol.value)))
                return "case " + std::to_string(k) + ": duality gap " +
                       std::to_string(sol.duality_gap);
        }
        return {};
    });

    suite("set_cover", all_pass, out.log, [&]() -> std::string {
        Rng rng(derive_seed(options.seed, 0, 2, StreamKind::Policy));
        for (int k = 0; k < 40; ++k) {
            const unsigned arms = 3 + (unsigned)(rng.uniform01() * 10) % 10;
            const unsigned groups = 2 + (unsigned)(rng.uniform01() * 8) % 8;
            const GroupStructure st = random_structure(rng, arms, groups);
            Bits64 S;
            for (unsigned a = 0; a < arms; ++a)
                if (rng.uniform01() < 0.5) S.set(a);
            if (S.empty()) S.set(0);
            const oracle::CoverEnum ref = oracle::cover_by_enumeration(st, S);
            const CoverResult hm = h2_minus(st, S);
            const CoverResult hp = h2_plus(st, S);
            if (hm.count != ref.cover_count)
                return "case " + std::to_string(k) + ": min cover " +
                       std::to_string(hm.count) + " != " + std::to_string(ref.cover_count);
            if (hp.count != ref.confined_count)
                return "case " + std::to_string(k) + ": min confined " +
                       std::to_string(hp.count) + " != " + std::to_string(ref.confined_count);
        }
        return {};
    });

    suite("max_flow", all_pass, out.log, [&]() -> std::string {
        Rng rng(derive_seed(options.seed, 0, 3, StreamKind::Policy));
        for (int k = 0; k < 40; ++k) {
            const unsigned n = 4 + (unsigned)(rng.uniform01() * 7) % 7;
            const unsigned extra = (unsigned)(rng.uniform01() * 16) % 16;
            const auto edges = oracle::random_flow_network(rng, n, extra, 20);
            const FlowResult got = max_flow(n, edges, 0, n - 1);
            const std::int64_t ref = oracle::max_flow_by_cut_enumeration(n, edges, 0, n - 1);
            if (got.value != ref)
                return "case " + std::to_string(k) + ": flow " + std::to_string(got.value) +
                       " != cut " + std::to_string(ref);
        }
        return {};
    });

    suite("t0", all_pass, out.log, [&]() -> std::string {
        Rng rng(derive_seed(options.seed, 0, 4, StreamKind::Policy));
        for (int k = 0; k < 40; ++k) {
            const unsigned arms = 2 + (unsigned)(rng.uniform01() * 10) % 10;
            const unsigned groups = 1 + (unsigned)(rng.uniform01() * 8) % 8;
            const GroupStructure st = random_structure(rng, arms, groups);
            const Rational exact = t0_rational(st);
            const Rational ref = oracle::t0_by_subset_enumeration(st);
            if (exact.num != ref.num || exact.den != ref.den)
                return "case " + std::to_string(k) + ": rational " +
                       std::to_string(exact.num) + "/" + std::to_string(exact.den) +
                       " != enumerated " + std::to_string(ref.num) + "/" +
                       std::to_string(ref.den);
            const std::string err = check_close(("case " + std::to_string(k)).c_str(),
                                                compute_t0(st), ref.to_double(), 1e-9);
            if (!err.empty()) return err;
        }
        return {};
    });

    suite("functionals", all_pass, out.log, [&]() -> std::string {
        const std::pair<unsigned, unsigned> shapes[] = {{2, 4}, {3, 5}, {5, 3}};
        for (auto [groups, arms] : shapes) {
            const Instance inst = make_gaussian_instance(
                all_shared_structure(groups, arms), std::vector<double>(arms, 0.5));
            for (double eps : {0.9, 0.5, 0.2, 0.05}) {
                std::string err = check_close(
                    "m_eps", m_eps(inst, eps), oracle::all_shared_m_eps(groups, arms, eps),
                    1e-9);
                if (!err.empty()) return err;
                const Functionals f = t_r_functionals(inst, eps);
                err = check_close("t_value", f.t_value,
                                  oracle::all_shared_t_value(groups, arms, eps), 1e-5);
                if (!err.empty()) return err;
                err = check_close("r_value", f.r_value,
                                  oracle::all_shared_r_value(groups, arms, eps), 1e-5);
                if (!err.empty()) return err;
            }
            std::string err =
                check_close("eps_t", eps_t(inst, 500.0),
                            oracle::all_shared_eps_t(groups, arms, 500.0), 1e-6);
            if (!err.empty()) return err;
            err = check_close("eps_star", eps_star(inst, 1000),
                              oracle::all_shared_eps_star(groups, arms, 1000), 1e-6);
            if (!err.empty()) return err;
        }
        return {};
    });

    suite("burnin_schedule", all_pass, out.log, [&]() -> std::string {
        Rng rng(derive_seed(options.seed, 0, 5, StreamKind::Policy));
        for (int k = 0; k < 25; ++k) {
            const unsigned arms = 2 + (unsigned)(rng.uniform01() * 10) % 10;
            const unsigned groups = 1 + (unsigned)(rng.uniform01() * 8) % 8;
            const GroupStructure st = random_structure(rng, arms, groups);
            const std::uint64_t n0 = 1 + (unsigned)(rng.uniform01() * 5) % 5;
            const BurninSchedule sched = burn_in_schedule(st, n0);
            const Rational t0 = t0_rational(st);
            const std::uint64_t want_len =
                ((std::uint64_t)n0 * (std::uint64_t)t0.num + (std::uint64_t)t0.den - 1) /
                (std::uint64_t)t0.den;
            if (sched.length != want_len)
                return "case " + std::to_string(k) + ": length " +
                       std::to_string(sched.length) + " != " + std::to_string(want_len);
            std::vector<std::uint64_t> count(arms, 0);
            for (const auto& round : sched.pulls)
                for (unsigned g = 0; g < groups; ++g) {
                    if (!st.groups[g].test(round[g]))
                        return "case " + std::to_string(k) + ": group " + std::to_string(g) +
                               " scheduled outside its arm set";
                    ++count[round[g]];
                }
            for (unsigned a = 0; a < arms; ++a)
                if (count[a] < n0)
                    return "case " + std::to_string(k) + ": arm " + std::to_string(a) +
                           " pulled " + std::to_string(count[a]) + " < n0";
        }
        return {};
    });

    out.passed = all_pass;
    return out;
}

} // namespace colucb
