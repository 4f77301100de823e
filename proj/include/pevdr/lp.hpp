#pragma once

#include <vector>

namespace pevdr {

// Small dense linear program:
//   minimize    objective . x
//   subject to  lo_i <= rows[i].coeffs . x <= hi_i
//               lower_j <= x_j <= upper_j        (all bounds finite)
// Equality rows use lo == hi; a variable is pinned with lower == upper.
struct LpRow {
    std::vector<double> coeffs;
    double lo = 0.0;
    double hi = 0.0;
};

struct LpProblem {
    std::vector<double> objective;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<LpRow> rows;
};

struct LpSolution {
    std::vector<double> x;
    double objective = 0.0;
};

// Two-phase primal simplex with bounded variables. Sized for the per-user
// scheduling problems here (tens of variables); throws InfeasibleError when
// the constraint set is empty.
LpSolution solve_lp(const LpProblem& problem);

} // namespace pevdr
