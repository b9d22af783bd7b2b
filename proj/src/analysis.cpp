#include "colucb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "colucb/lp.hpp"

namespace colucb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_subset(const GroupStructure& st, Bits64 S, const char* who) {
    if (S.empty()) throw InvalidArgument(std::string(who) + ": S must be nonempty");
    if (!S.subset_of(st.all_arms()))
        throw InvalidArgument(std::string(who) + ": S contains an arm >= num_arms");
}

/// Groups whose arm set intersects S, as indices.
std::vector<unsigned> touching_groups(const GroupStructure& st, Bits64 S) {
    std::vector<unsigned> t;
    for (unsigned g = 0; g < st.num_groups(); ++g)
        if (st.groups[g].intersects(S)) t.push_back(g);
    return t;
}

// --- exact minimum set cover of S by group arm sets -----------------------

struct CoverSearch {
    const GroupStructure& st;
    Bits64 S;
    std::vector<unsigned> touching;

    /// Minimum cover size via subset enumeration (<= 16 touching groups).
    std::pair<int, Bits64> min_cover_enum() const {
        int best = INT32_MAX;
        Bits64 best_set;
        const std::size_t n = touching.size();
        for (std::uint64_t m = 1; m < (1ULL << n); ++m) {
            if (std::popcount(m) >= best) continue;
            Bits64 cov;
            for (std::size_t i = 0; i < n; ++i)
                if ((m >> i) & 1) cov |= st.groups[touching[i]];
            if (S.subset_of(cov)) {
                best = std::popcount(m);
                best_set = Bits64::none();
                for (std::size_t i = 0; i < n; ++i)
                    if ((m >> i) & 1) best_set.set(touching[i]);
            }
        }
        return {best, best_set};
    }

    /// Branch-and-bound on the first uncovered arm, memoized on the
    /// still-uncovered subset of S.
    std::unordered_map<std::uint64_t, int> memo;
    int best_overall = INT32_MAX;
    Bits64 best_cover;

    void bnb(Bits64 uncovered, int used, Bits64 chosen) {
        if (uncovered.empty()) {
            if (used < best_overall) { best_overall = used; best_cover = chosen; }
            return;
        }
        if (used + 1 >= best_overall) return;
        auto it = memo.find(uncovered.w);
        if (it != memo.end() && it->second <= used) return;
        memo[uncovered.w] = used;
        // Branch on the uncovered arm with the fewest covering groups.
        unsigned pick = 0;
        int fewest = INT32_MAX;
        for (unsigned a : uncovered) {
            int cnt = 0;
            for (unsigned g : touching)
                if (st.groups[g].test(a)) ++cnt;
            if (cnt < fewest) { fewest = cnt; pick = a; }
        }
        for (unsigned g : touching) {
            if (st.groups[g].test(pick))
                bnb(uncovered.minus(st.groups[g]), used + 1, chosen | Bits64::single(g));
        }
    }

    std::pair<int, Bits64> min_cover() {
        if (touching.size() <= 16) return min_cover_enum();
        best_overall = INT32_MAX;
        bnb(S, 0, Bits64::none());
        return {best_overall, best_cover};
    }
};

/// Groups touching S that are confined within Cov(chosen): A_g ⊆ Cov.
std::pair<int, Bits64> confined_in(const GroupStructure& st,
                                   const std::vector<unsigned>& touching, Bits64 cover_set) {
    const Bits64 cov = st.cover(cover_set);
    int n = 0;
    Bits64 which;
    for (unsigned g : touching)
        if (st.groups[g].subset_of(cov)) { ++n; which.set(g); }
    return {n, which};
}

struct ConfinedSearch {
    const GroupStructure& st;
    Bits64 S;
    std::vector<unsigned> touching;
    int best = INT32_MAX;
    Bits64 best_set;

    void consider(Bits64 chosen) {
        auto [n, _] = confined_in(st, touching, chosen);
        if (n < best) { best = n; best_set = chosen; }
    }

    void run_enum() {
        const std::size_t n = touching.size();
        for (std::uint64_t m = 1; m < (1ULL << n); ++m) {
            Bits64 chosen, cov;
            for (std::size_t i = 0; i < n; ++i)
                if ((m >> i) & 1) { chosen.set(touching[i]); cov |= st.groups[touching[i]]; }
            if (S.subset_of(cov)) consider(chosen);
        }
    }

    /// Branch on the first uncovered arm; the confined count of a partial
    /// selection only grows as groups are added, so it is a valid bound.
    void bnb(Bits64 uncovered, Bits64 chosen) {
        auto [partial, _] = confined_in(st, touching, chosen);
        if (partial >= best) return;
        if (uncovered.empty()) {
            best = partial;
            best_set = chosen;
            return;
        }
        const unsigned pick = uncovered.lowest();
        for (unsigned g : touching)
            if (st.groups[g].test(pick) && !chosen.test(g))
                bnb(uncovered.minus(st.groups[g]), chosen | Bits64::single(g));
    }

    std::pair<int, Bits64> run() {
        if (touching.size() <= 16) run_enum();
        else bnb(S, Bits64::none());
        return {best, best_set};
    }
};

} // namespace

double h1(const GroupStructure& structure, Bits64 S) {
    require_subset(structure, S, "h1");
    return (double)touching_groups(structure, S).size() / (double)S.count();
}

CoverResult h2_minus(const GroupStructure& structure, Bits64 S) {
    require_subset(structure, S, "h2_minus");
    CoverSearch cs{structure, S, touching_groups(structure, S), {}, INT32_MAX, {}};
    auto [count, cover] = cs.min_cover();
    if (count == INT32_MAX)
        throw InternalError("h2_minus: S not coverable (structure invariant broken)");
    return CoverResult{(double)count / (double)S.count(), cover, count};
}

CoverResult h2_plus(const GroupStructure& structure, Bits64 S) {
    require_subset(structure, S, "h2_plus");
    ConfinedSearch cs{structure, S, touching_groups(structure, S), INT32_MAX, {}};
    auto [count, cover] = cs.run();
    if (count == INT32_MAX)
        throw InternalError("h2_plus: S not coverable (structure invariant broken)");
    return CoverResult{(double)count / (double)S.count(), cover, count};
}

HtPair ht_bounds(const GroupStructure& structure, Bits64 S, std::uint64_t horizon) {
    const double one = h1(structure, S);
    const double hm = h2_minus(structure, S).value;
    const double hp = h2_plus(structure, S).value;
    const double rt = std::sqrt((double)horizon);
    // x^(3/2) as x*sqrt(x): exact for the power-of-two values the identities
    // in the tests hit.
    return HtPair{one + hm * std::sqrt(hm) * rt, one + hp * std::sqrt(hp) * rt};
}

BarHtResult bar_ht(const GroupStructure& structure, std::uint64_t horizon, bool force) {
    structure.validate();
    if (structure.num_arms > kEnumerationCap && !force)
        throw InvalidArgument("bar_ht: " + std::to_string(structure.num_arms) +
                              " arms exceeds the enumeration cap (" +
                              std::to_string(kEnumerationCap) + "); pass force to override");
    BarHtResult r;
    r.minus = r.plus = kInf;
    const std::uint64_t end = structure.num_arms >= 64 ? ~0ULL : (1ULL << structure.num_arms);
    for (std::uint64_t m = 1; m < end && m != 0; ++m) {
        const Bits64 S{m};
        const HtPair ht = ht_bounds(structure, S, horizon);
        if (ht.minus < r.minus) { r.minus = ht.minus; r.argmin_minus = S; }
        if (ht.plus < r.plus) { r.plus = ht.plus; r.argmin_plus = S; }
    }
    return r;
}

// ---------------------------------------------------------------- scale

Bits64 contention_star(const Instance& instance, double eps) {
    if (!(eps > 0)) throw InvalidArgument("contention_star: eps must be positive");
    Bits64 c;
    for (unsigned g = 0; g < instance.num_groups(); ++g) {
        if (instance.gap_min[g] > eps) continue;   // group separated beyond eps
        for (unsigned a : instance.structure.groups[g])
            if (instance.gap[g][a] <= eps) c.set(a);
    }
    return c;
}

double m_eps(const Instance& instance, double eps) {
    if (!(eps > 0)) throw InvalidArgument("m_eps: eps must be positive");
    const Bits64 cstar = contention_star(instance, eps);
    if (cstar.empty()) return kInf;

    const unsigned A = instance.num_arms(), G = instance.num_groups();
    std::vector<std::vector<int>> var(G, std::vector<int>(A, -1));
    std::size_t nv = 0;
    for (unsigned g = 0; g < G; ++g)
        for (unsigned a : instance.structure.groups[g]) var[g][a] = (int)nv++;
    const std::size_t m_var = nv++;

    LpProblem lp;
    lp.num_vars = nv;
    lp.objective.assign(nv, 0.0);
    lp.objective[m_var] = 1.0;
    for (unsigned g = 0; g < G; ++g) {
        std::vector<double> row(nv, 0.0);
        for (unsigned a : instance.structure.groups[g])
            row[var[g][a]] = std::max(instance.gap[g][a], eps);
        lp.add_row(std::move(row), RowSense::Le, 1.0);
    }
    for (unsigned a : cstar) {
        std::vector<double> row(nv, 0.0);
        for (unsigned g = 0; g < G; ++g)
            if (var[g][a] >= 0) row[var[g][a]] = 1.0;
        row[m_var] = -1.0;
        lp.add_row(std::move(row), RowSense::Ge, 0.0);
    }
    const LpSolution s = solve_lp(lp);
    if (s.status != LpStatus::Optimal)
        throw InternalError("m_eps: exploration LP was " + to_string(s.status));
    return s.value;
}

std::vector<double> gap_breakpoints(const Instance& instance) {
    std::vector<double> b;
    for (unsigned g = 0; g < instance.num_groups(); ++g) {
        for (unsigned a : instance.structure.groups[g]) {
            const double d = instance.gap[g][a];
            if (d > 0 && d < 1) b.push_back(d);
        }
        const double gm = instance.gap_min[g];
        if (gm > 0 && gm < 1 && std::isfinite(gm)) b.push_back(gm);
    }
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

namespace {

/// Memoizing evaluator for M(sigma z) and the two integrals, with the
/// interval lattice fixed by the gap breakpoints so suffix pieces are
/// integrated at most once per evaluator lifetime.
struct Evaluator {
    const Instance& inst;
    double sigma;
    std::vector<double> lattice;    // ascending points in (0, 1], last = 1
    std::unordered_map<std::uint64_t, double> m_cache;

    Evaluator(const Instance& i, double s) : inst(i), sigma(s) {
        for (double b : gap_breakpoints(inst)) {
            const double z = b / sigma;
            if (z > 0 && z < 1) lattice.push_back(z);
        }
        std::sort(lattice.begin(), lattice.end());
        lattice.erase(std::unique(lattice.begin(), lattice.end()), lattice.end());
        lattice.push_back(1.0);
    }

    double M(double z) {
        const double e = sigma * z;
        std::uint64_t key;
        static_assert(sizeof(key) == sizeof(e));
        std::memcpy(&key, &e, sizeof(key));
        auto it = m_cache.find(key);
        if (it != m_cache.end()) return it->second;
        const double v = m_eps(inst, e);
        m_cache.emplace(key, v);
        return v;
    }

    double f_t(double z) {
        const double m = M(z);
        return std::isinf(m) ? 0.0 : sigma / (m * z * z * z * z);
    }
    double f_r(double z) {
        const double m = M(z);
        return std::isinf(m) ? 0.0 : sigma * sigma / (m * z * z * z);
    }

    template <class F>
    double simpson(F&& f, double a, double fa, double b, double fb, double fm,
                   double whole, double tol, int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = f(lm), frm = f(rm);
        const double left = (m - a) / 6.0 * (fa + 4 * flm + fm);
        const double right = (b - m) / 6.0 * (fm + 4 * frm + fb);
        const double delta = left + right - whole;
        if (depth >= 24 || std::fabs(delta) <= 15.0 * tol)
            return left + right + delta / 15.0;
        return simpson(f, a, fa, m, fm, flm,
                       left, 0.5 * tol, depth + 1) +
               simpson(f, m, fm, b, fb, frm,
                       right, 0.5 * tol, depth + 1);
    }

    template <class F>
    double integrate(F&& f, double a, double b) {
        if (b <= a) return 0.0;
        const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4 * fm + fb);
        const double tol = std::max(1e-12, 1e-7 * std::fabs(whole));
        return simpson(f, a, fa, b, fb, fm, whole, tol, 0);
    }

    // Cached suffix pieces: piece i spans [lattice[i-1], lattice[i]] with
    // lattice[-1] treated as 0 (never integrated from 0; callers clip).
    std::vector<double> piece_t, piece_r;
    std::vector<bool> piece_done;

    void ensure_pieces() {
        if (!piece_done.empty()) return;
        piece_t.assign(lattice.size(), 0.0);
        piece_r.assign(lattice.size(), 0.0);
        piece_done.assign(lattice.size(), false);
    }

    void compute_piece(std::size_t i) {
        ensure_pieces();
        if (piece_done[i]) return;
        const double lo = i == 0 ? 0.0 : lattice[i - 1];
        const double hi = lattice[i];
        if (lo <= 0) {   // only integrated from a positive eps; handled by caller
            piece_done[i] = true;
            return;
        }
        if (std::isinf(M(0.5 * (lo + hi)))) {
            piece_t[i] = piece_r[i] = 0.0;   // no contention in this piece
        } else {
            piece_t[i] = integrate([this](double z) { return f_t(z); }, lo, hi);
            piece_r[i] = integrate([this](double z) { return f_r(z); }, lo, hi);
        }
        piece_done[i] = true;
    }

    Functionals from(double eps) {
        if (!(eps > 0) || eps > 1)
            throw InvalidArgument("t_r_functionals: eps must lie in (0, 1]");
        Functionals out;
        if (eps >= 1.0) return out;
        ensure_pieces();
        // Find the piece containing eps.
        std::size_t j = 0;
        while (j < lattice.size() && lattice[j] <= eps) ++j;
        if (j == lattice.size()) return out;
        // Partial piece [eps, lattice[j]] plus cached full pieces above.
        if (!std::isinf(M(0.5 * (eps + lattice[j])))) {
            out.t_value += integrate([this](double z) { return f_t(z); }, eps, lattice[j]);
            out.r_value += integrate([this](double z) { return f_r(z); }, eps, lattice[j]);
        }
        for (std::size_t i = j + 1; i < lattice.size(); ++i) {
            compute_piece(i);
            out.t_value += piece_t[i];
            out.r_value += piece_r[i];
        }
        return out;
    }
};

} // namespace

Functionals t_r_functionals(const Instance& instance, double eps, double sigma) {
    if (!(sigma > 0)) throw InvalidArgument("t_r_functionals: sigma must be positive");
    Evaluator ev(instance, sigma);
    return ev.from(eps);
}

double eps_t(const Instance& instance, double t_target, double sigma) {
    if (!(t_target > 0)) throw InvalidArgument("eps_t: t_target must be positive");
    if (!(sigma > 0)) throw InvalidArgument("eps_t: sigma must be positive");
    Evaluator ev(instance, sigma);
    constexpr double kFloor = 1e-9;
    double lo = kFloor, hi = 1.0;
    if (ev.from(lo).t_value < t_target) return lo;   // T saturates below the target
    while (hi - lo > 1e-8 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (ev.from(mid).t_value >= t_target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double eps_star(const Instance& instance, std::uint64_t horizon) {
    if (horizon < 1) throw InvalidArgument("eps_star: horizon must be >= 1");
    const double T = (double)horizon;
    std::vector<double> bounds = gap_breakpoints(instance);
    bounds.push_back(1.0);
    // Ascending scan of the pieces; within a finite piece the product
    // M(z) z^3 is continuous but not necessarily monotone, so grid-scan for
    // the first sign change, then bisect it down.
    auto f = [&](double z) {
        const double m = m_eps(instance, z);
        return std::isinf(m) ? -kInf : m * z * z * z * T - 1.0;   // -inf marks "skip"
    };
    double lo = 0.0;
    for (double hi : bounds) {
        if (hi <= lo) continue;
        // Open the piece just inside its left edge (the left boundary point
        // itself belongs to the previous piece's closure).
        const double a = lo == 0.0 ? std::min(hi * 0.5, 1e-9) : lo;
        const double fa = f(a);
        if (fa >= 0) return a;
        constexpr int kGrid = 32;
        double prev = a, fprev = fa;
        for (int i = 1; i <= kGrid; ++i) {
            const double z = a + (hi - a) * i / kGrid;
            const double fz = f(z);
            if (fz >= 0 && std::isfinite(fprev)) {
                double l = prev, r = z;
                for (int it = 0; it < 60 && r - l > 1e-12 * r; ++it) {
                    const double mid = 0.5 * (l + r);
                    (f(mid) >= 0 ? r : l) = mid;
                }
                return r;
            }
            prev = z;
            fprev = fz;
        }
        lo = hi;
    }
    return 1.0;
}

ConditionReport condition_check(const Instance& instance, double c1, double alpha,
                                unsigned grid_points) {
    if (!(c1 > 0)) throw InvalidArgument("condition_check: c1 must be positive");
    if (grid_points < 2) throw InvalidArgument("condition_check: need >= 2 grid points");
    std::vector<double> grid;
    const double zmin = 1e-3;
    for (unsigned i = 0; i < grid_points; ++i)
        grid.push_back(zmin * std::pow(1.0 / zmin, (double)i / (grid_points - 1)));
    for (double b : gap_breakpoints(instance)) grid.push_back(b);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<double> m(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) m[i] = m_eps(instance, grid[i]);

    ConditionReport rep;
    rep.holds = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t j = i; j < grid.size(); ++j) {
            const double z1 = grid[i], z2 = grid[j];
            if (std::isinf(m[j])) continue;              // infinite right side: vacuous
            if (std::isinf(m[i])) {                      // infinite left, finite right
                rep.holds = false;
                rep.worst_ratio = kInf;
                rep.worst_z1 = z1;
                rep.worst_z2 = z2;
                return rep;
            }
            const double bound = c1 * std::pow(z2 / z1, 2.0 - alpha) * m[j];
            const double ratio = m[i] / bound;
            if (ratio > rep.worst_ratio) {
                rep.worst_ratio = ratio;
                rep.worst_z1 = z1;
                rep.worst_z2 = z2;
            }
        }
    }
    rep.holds = rep.worst_ratio <= 1.0;
    return rep;
}

double phi(const GroupStructure& structure, double eps, bool force) {
    structure.validate();
    if (!(eps > 0) || eps > 1) throw InvalidArgument("phi: eps must lie in (0, 1]");
    if (structure.num_arms > kEnumerationCap && !force)
        throw InvalidArgument("phi: arms exceed the enumeration cap; pass force to override");
    const double lever = 1.0 / eps - 1.0;
    double best = kInf;
    const std::uint64_t end = structure.num_arms >= 64 ? ~0ULL : (1ULL << structure.num_arms);
    for (std::uint64_t mask = 1; mask < end && mask != 0; ++mask) {
        const Bits64 S{mask};
        best = std::min(best, h1(structure, S) + lever * h2_minus(structure, S).value);
    }
    return 0.5 * best;
}

ImprovementReport sufficient_improvement(const GroupStructure& structure,
                                         std::uint64_t horizon, double alpha, bool force) {
    structure.validate();
    if (structure.num_arms > kEnumerationCap && !force)
        throw InvalidArgument(
            "sufficient_improvement: arms exceed the enumeration cap; pass force to override");
    double lhs = kInf;
    const std::uint64_t end = structure.num_arms >= 64 ? ~0ULL : (1ULL << structure.num_arms);
    for (std::uint64_t mask = 1; mask < end && mask != 0; ++mask)
        lhs = std::min(lhs, h1(structure, Bits64{mask}));
    const double k = (double)structure.max_group_size();
    ImprovementReport rep;
    rep.lhs = lhs;
    rep.rhs = alpha * std::sqrt((double)horizon) / (k * std::sqrt(k));
    rep.improves = lhs >= rep.rhs;
    return rep;
}

} // namespace colucb
