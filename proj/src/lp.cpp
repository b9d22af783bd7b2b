#include "colucb/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "colucb/errors.hpp"

namespace colucb {

void LpProblem::add_row(std::vector<double> coeffs, RowSense sense, double b) {
    rows.push_back(std::move(coeffs));
    senses.push_back(sense);
    rhs.push_back(b);
}

void LpProblem::validate() const {
    if (num_vars == 0) throw InvalidArgument("lp: num_vars must be positive");
    if (objective.size() != num_vars)
        throw InvalidArgument("lp: objective size mismatch");
    if (senses.size() != rows.size() || rhs.size() != rows.size())
        throw InvalidArgument("lp: row arrays size mismatch");
    for (const auto& r : rows)
        if (r.size() != num_vars) throw InvalidArgument("lp: row size mismatch");
    for (double b : rhs)
        if (!std::isfinite(b)) throw InvalidArgument("lp: rhs must be finite");
    for (const auto& r : rows)
        for (double v : r)
            if (!std::isfinite(v)) throw InvalidArgument("lp: coefficients must be finite");
    for (double v : objective)
        if (!std::isfinite(v)) throw InvalidArgument("lp: objective must be finite");
}

namespace {

// Dense tableau simplex over the slack form
//   max c.x  s.t.  A x (+ slack/surplus) (+ artificial) = b,  all vars >= 0
// with rows pre-negated so b >= 0.  Bland's rule throughout: the entering
// column is the lowest-index one with a reduced cost beyond tolerance, the
// leaving row breaks min-ratio ties by lowest basis variable index.  This is
// slow in theory, cycle-free and bit-reproducible in practice.
struct Tableau {
    std::size_t m, total;              // rows, structural+slack+artificial vars
    std::vector<std::vector<double>> a;  // m x (total + 1), last col = rhs
    std::vector<std::size_t> basis;      // per row, variable index
    double pivot_tol;

    double& rhs(std::size_t i) { return a[i][total]; }

    /// One simplex phase maximizing `cost` (size total).  Returns false when
    /// the problem is unbounded in the improving direction.
    bool iterate(const std::vector<double>& cost, const std::vector<bool>& banned) {
        for (;;) {
            // Reduced costs z_j - c_j via the current basis: z_j = cB . column_j.
            // Stored implicitly: with the tableau kept in canonical form, the
            // reduced cost of column j is c_j - sum_i cB_i a[i][j].
            std::size_t enter = total;
            for (std::size_t j = 0; j < total; ++j) {
                if (banned[j]) continue;
                double red = cost[j];
                for (std::size_t i = 0; i < m; ++i) {
                    const double cb = cost[basis[i]];
                    if (cb != 0.0) red -= cb * a[i][j];
                }
                if (red > pivot_tol) { enter = j; break; }   // Bland: lowest index
            }
            if (enter == total) return true;   // optimal for this phase

            double min_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i)
                if (a[i][enter] > pivot_tol)
                    min_ratio = std::min(min_ratio, rhs(i) / a[i][enter]);
            if (min_ratio == std::numeric_limits<double>::infinity())
                return false;                  // unbounded ray
            // Bland again: among (near-)tied min-ratio rows, lowest basis id.
            std::size_t leave = m;
            const double band = min_ratio + 1e-12 * (1.0 + std::fabs(min_ratio));
            for (std::size_t i = 0; i < m; ++i)
                if (a[i][enter] > pivot_tol && rhs(i) / a[i][enter] <= band)
                    if (leave == m || basis[i] < basis[leave]) leave = i;
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        const double p = a[row][col];
        for (double& v : a[row]) v /= p;
        a[row][col] = 1.0;   // kill roundoff on the pivot itself
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = a[i][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= total; ++j) a[i][j] -= f * a[row][j];
            a[i][col] = 0.0;
        }
        basis[row] = col;
    }
};

} // namespace

LpSolution solve_lp(const LpProblem& lp, const LpTolerances& tol) {
    lp.validate();
    const std::size_t n = lp.num_vars, m = lp.num_rows();

    LpSolution sol;
    if (m == 0) {
        // No constraints: optimum 0 at x = 0 unless some objective
        // coefficient is positive, in which case the problem is unbounded.
        for (double c : lp.objective)
            if (c > 0) { sol.status = LpStatus::Unbounded; return sol; }
        sol.x.assign(n, 0.0);
        sol.value = 0.0;
        return sol;
    }

    // Normalize to b >= 0, then append one slack/surplus per inequality and
    // artificials where the identity start basis needs them.
    std::vector<std::vector<double>> rows = lp.rows;
    std::vector<double> b = lp.rhs;
    std::vector<RowSense> senses = lp.senses;
    std::vector<int> flipped(m, 1);
    for (std::size_t i = 0; i < m; ++i) {
        if (b[i] < 0) {
            for (double& v : rows[i]) v = -v;
            b[i] = -b[i];
            flipped[i] = -1;
            if (senses[i] == RowSense::Le) senses[i] = RowSense::Ge;
            else if (senses[i] == RowSense::Ge) senses[i] = RowSense::Le;
        }
    }

    // A >=-row with zero rhs equals its negation as a <=-row, and that form
    // starts from the slack basis directly — no artificial, no phase 1.  The
    // allocation programs solved every round consist solely of such rows plus
    // plain <= rows, so this keeps phase 1 off the simulation hot path.
    for (std::size_t i = 0; i < m; ++i) {
        if (senses[i] == RowSense::Ge && b[i] == 0.0) {
            for (double& v : rows[i]) v = -v;
            flipped[i] = -flipped[i];
            senses[i] = RowSense::Le;
        }
    }

    std::size_t num_slack = 0;
    for (auto s : senses)
        if (s != RowSense::Eq) ++num_slack;

    // A row needs an artificial unless its slack can start basic (Le rows).
    std::vector<bool> needs_art(m, false);
    std::size_t num_art = 0;
    for (std::size_t i = 0; i < m; ++i) {
        needs_art[i] = senses[i] != RowSense::Le;
        if (needs_art[i]) ++num_art;
    }

    Tableau t;
    t.m = m;
    t.total = n + num_slack + num_art;
    t.pivot_tol = tol.pivot_tol;
    t.a.assign(m, std::vector<double>(t.total + 1, 0.0));
    t.basis.assign(m, 0);

    std::vector<std::size_t> slack_col(m, SIZE_MAX), art_col(m, SIZE_MAX);
    {
        std::size_t next_slack = n, next_art = n + num_slack;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) t.a[i][j] = rows[i][j];
            t.a[i][t.total] = b[i];
            if (senses[i] != RowSense::Eq) {
                slack_col[i] = next_slack++;
                t.a[i][slack_col[i]] = senses[i] == RowSense::Le ? 1.0 : -1.0;
            }
            if (needs_art[i]) {
                art_col[i] = next_art++;
                t.a[i][art_col[i]] = 1.0;
                t.basis[i] = art_col[i];
            } else {
                t.basis[i] = slack_col[i];
            }
        }
    }

    std::vector<bool> banned(t.total, false);

    // Phase 1: maximize -(sum of artificials).
    if (num_art > 0) {
        std::vector<double> cost1(t.total, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            if (art_col[i] != SIZE_MAX) cost1[art_col[i]] = -1.0;
        if (!t.iterate(cost1, banned))
            throw InternalError("lp: phase-1 reported unbounded (cannot happen)");
        double art_sum = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (t.basis[i] >= n + num_slack) art_sum += t.rhs(i);
        if (art_sum > tol.feas_tol * std::max<std::size_t>(1, m)) {
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        // Pivot leftover (degenerate) artificials out where possible, then
        // ban every artificial column from re-entering.
        for (std::size_t i = 0; i < m; ++i) {
            if (t.basis[i] >= n + num_slack) {
                std::size_t j = 0;
                for (; j < n + num_slack; ++j)
                    if (std::fabs(t.a[i][j]) > tol.pivot_tol) break;
                if (j < n + num_slack) t.pivot(i, j);
                // else: the row is all-zero up to artificials — redundant
                // constraint; the artificial stays basic at value ~0.
            }
        }
        for (std::size_t j = n + num_slack; j < t.total; ++j) banned[j] = true;
    }

    // Phase 2: maximize the real objective.
    std::vector<double> cost2(t.total, 0.0);
    for (std::size_t j = 0; j < n; ++j) cost2[j] = lp.objective[j];
    if (!t.iterate(cost2, banned)) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }

    sol.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (t.basis[i] < n) sol.x[t.basis[i]] = t.rhs(i);
    double value = 0;
    for (std::size_t j = 0; j < n; ++j) value += lp.objective[j] * sol.x[j];
    sol.value = value;

    // Dual multipliers y solve  B^T y = c_B  for the final basis columns of
    // the *original* slack-form matrix.  Solved by Gaussian elimination with
    // partial pivoting on the small m x m system.
    {
        std::vector<std::vector<double>> bt(m, std::vector<double>(m + 1, 0.0));
        for (std::size_t col = 0; col < m; ++col) {
            const std::size_t var = t.basis[col];
            for (std::size_t i = 0; i < m; ++i) {
                double orig;
                if (var < n) orig = rows[i][var];
                else if (var < n + num_slack)
                    orig = (slack_col[i] == var) ? (senses[i] == RowSense::Le ? 1.0 : -1.0) : 0.0;
                else
                    orig = (art_col[i] == var) ? 1.0 : 0.0;
                bt[col][i] = orig;   // row `col` of B^T = column of B
            }
            bt[col][m] = cost2[var];
        }
        for (std::size_t k = 0; k < m; ++k) {
            std::size_t piv = k;
            for (std::size_t i = k + 1; i < m; ++i)
                if (std::fabs(bt[i][k]) > std::fabs(bt[piv][k])) piv = i;
            std::swap(bt[k], bt[piv]);
            if (std::fabs(bt[k][k]) < 1e-13)
                throw InternalError("lp: singular basis while extracting duals");
            for (std::size_t i = k + 1; i < m; ++i) {
                const double f = bt[i][k] / bt[k][k];
                if (f == 0.0) continue;
                for (std::size_t j = k; j <= m; ++j) bt[i][j] -= f * bt[k][j];
            }
        }
        std::vector<double> y(m);
        for (std::size_t k = m; k-- > 0;) {
            double s = bt[k][m];
            for (std::size_t j = k + 1; j < m; ++j) s -= bt[k][j] * y[j];
            y[k] = s / bt[k][k];
        }
        // Undo the row negations so multipliers refer to the caller's rows.
        sol.dual.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) sol.dual[i] = flipped[i] * y[i];

        double dual_value = 0;
        for (std::size_t i = 0; i < m; ++i) dual_value += b[i] * y[i];
        sol.duality_gap = std::fabs(dual_value - value);
    }

    // Certification: primal feasibility against the caller's rows.  The
    // allowance is relative to the magnitudes actually in play — both the rhs
    // and the solution itself (badly scaled rows can make |x| ~ 1/coeff huge,
    // and a residual of |x| * machine-eps is then unavoidable roundoff).
    double scale = 1.0;
    for (double bi : lp.rhs) scale = std::max(scale, std::fabs(bi));
    for (double xj : sol.x) scale = std::max(scale, std::fabs(xj));
    double resid = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double ax = 0;
        for (std::size_t j = 0; j < n; ++j) ax += lp.rows[i][j] * sol.x[j];
        double v = 0;
        switch (lp.senses[i]) {
            case RowSense::Le: v = std::max(0.0, ax - lp.rhs[i]); break;
            case RowSense::Ge: v = std::max(0.0, lp.rhs[i] - ax); break;
            case RowSense::Eq: v = std::fabs(ax - lp.rhs[i]); break;
        }
        resid = std::max(resid, v);
    }
    for (double xj : sol.x) resid = std::max(resid, -xj);
    sol.primal_residual = resid;

    // ...and strong duality.  A certified Optimal is the only Optimal.
    if (resid > tol.feas_tol * scale * 10)
        throw InternalError("lp: optimal basis fails primal feasibility (residual " +
                            std::to_string(resid) + ")");
    if (sol.duality_gap > tol.gap_tol * std::max(1.0, std::fabs(value)))
        throw InternalError("lp: duality gap " + std::to_string(sol.duality_gap) +
                            " exceeds tolerance");
    sol.status = LpStatus::Optimal;
    return sol;
}

std::string to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "?";
}

} // namespace colucb
