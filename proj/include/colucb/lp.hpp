#pragma once
#include <cstddef>
#include <string>
#include <vector>

namespace colucb {

enum class RowSense { Le, Ge, Eq };

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// maximize c.x  subject to per-row  a.x (<=|>=|==) b  and  x >= 0.
struct LpProblem {
    std::size_t num_vars = 0;
    std::vector<double> objective;              // size num_vars
    std::vector<std::vector<double>> rows;      // each size num_vars
    std::vector<RowSense> senses;
    std::vector<double> rhs;

    std::size_t num_rows() const { return rows.size(); }
    void add_row(std::vector<double> coeffs, RowSense sense, double b);
    void validate() const;
};

struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    double value = 0.0;
    std::vector<double> x;       // primal (num_vars), empty unless Optimal
    std::vector<double> dual;    // one multiplier per row, empty unless Optimal
    /// Certificate data filled in when status == Optimal:
    double primal_residual = 0.0;  // max constraint violation of x
    double duality_gap = 0.0;      // |c.x - b.y|
};

struct LpTolerances {
    double feas_tol = 1e-9;    // feasibility residual allowed in certification
    double gap_tol = 1e-8;     // relative duality gap allowed in certification
    double pivot_tol = 1e-10;  // entries below this are treated as zero pivots
};

/// Dense two-phase primal simplex with Bland's rule (deterministic: identical
/// problems give bit-identical solutions).  On Optimal the solution is
/// certified: primal residual <= feas_tol * scale * 10 and duality gap
/// <= gap_tol * max(1, |value|), where scale = max(1, max |rhs|, max |x_j|).
/// Certification failure throws InternalError rather than returning a
/// silently wrong answer.  Degenerate ties broken by lowest index.
LpSolution solve_lp(const LpProblem& lp, const LpTolerances& tol = {});

std::string to_string(LpStatus s);

} // namespace colucb
