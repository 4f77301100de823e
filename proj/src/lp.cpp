#include "pevdr/lp.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "pevdr/errors.hpp"

namespace pevdr {

namespace {

constexpr double kTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarStatus { AtLower, AtUpper, Basic };

// Working state for the standard-form problem
//   min c.z   s.t.  A z = b,  0 <= z_j <= ub_j
// where z packs shifted structurals, row slacks, then phase-1 artificials.
struct Tableau {
    std::size_t m = 0;      // rows
    std::size_t total = 0;  // columns
    std::vector<double> a;  // m x total, row-major, kept as B^-1 * A
    std::vector<double> xb; // basic variable values, one per row
    std::vector<double> ub;
    std::vector<double> cost;
    std::vector<std::size_t> basis;
    std::vector<VarStatus> status;

    double& at(std::size_t i, std::size_t j) { return a[i * total + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * total + j]; }

    double value(std::size_t j) const {
        if (status[j] == VarStatus::AtLower) return 0.0;
        if (status[j] == VarStatus::AtUpper) return ub[j];
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] == j) return xb[i];
        }
        return 0.0;
    }

    double reduced_cost(std::size_t j) const {
        double z = cost[j];
        for (std::size_t i = 0; i < m; ++i) z -= cost[basis[i]] * at(i, j);
        return z;
    }

    void pivot(std::size_t row, std::size_t col) {
        const double p = at(row, col);
        const double inv = 1.0 / p;
        for (std::size_t j = 0; j < total; ++j) at(row, j) *= inv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = at(i, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < total; ++j) at(i, j) -= f * at(row, j);
        }
    }
};

// One phase of the bounded-variable simplex; returns when no improving
// nonbasic variable remains.
void optimize(Tableau& t) {
    const std::size_t iter_soft = 200 + 20 * (t.m + t.total);
    const std::size_t iter_hard = 200000;

    for (std::size_t iter = 0; iter < iter_hard; ++iter) {
        const bool bland = iter >= iter_soft;

        // Entering variable.
        std::size_t enter = t.total;
        int dir = 0;
        double best = kTol;
        for (std::size_t j = 0; j < t.total; ++j) {
            if (t.status[j] == VarStatus::Basic) continue;
            if (t.ub[j] <= kTol && t.status[j] == VarStatus::AtLower) continue; // fixed at 0
            const double z = t.reduced_cost(j);
            double viol = 0.0;
            int d = 0;
            if (t.status[j] == VarStatus::AtLower && z < -kTol) { viol = -z; d = +1; }
            else if (t.status[j] == VarStatus::AtUpper && z > kTol) { viol = z; d = -1; }
            else continue;
            if (bland) { enter = j; dir = d; break; }
            if (viol > best) { best = viol; enter = j; dir = d; }
        }
        if (enter == t.total) return; // optimal

        // Ratio test: step length before a basic variable or the entering
        // variable itself hits a bound.
        double step = t.ub[enter]; // bound flip distance (may be +inf)
        std::size_t leave_row = t.m;
        bool leave_at_upper = false;
        double best_pivot = 0.0;

        for (std::size_t i = 0; i < t.m; ++i) {
            const double d_i = -static_cast<double>(dir) * t.at(i, enter);
            double limit = kInf;
            bool hits_upper = false;
            if (d_i < -kTol) {
                limit = t.xb[i] / (-d_i); // basic drops to 0
            } else if (d_i > kTol) {
                const double room = t.ub[t.basis[i]];
                if (room == kInf) continue;
                limit = (room - t.xb[i]) / d_i; // basic rises to its bound
                hits_upper = true;
            } else {
                continue;
            }
            if (limit < -kTol) limit = 0.0;
            const double piv = std::fabs(t.at(i, enter));
            const bool better = bland
                ? (limit < step - kTol || (limit < step + kTol && leave_row == t.m))
                : (limit < step - kTol || (limit < step + kTol && piv > best_pivot));
            if (better) {
                step = std::min(step, std::max(limit, 0.0));
                leave_row = i;
                leave_at_upper = hits_upper;
                best_pivot = piv;
            }
        }

        if (step == kInf) throw ContractError("simplex: unbounded direction encountered");

        if (leave_row == t.m) {
            // Entering variable flips to its opposite bound.
            for (std::size_t i = 0; i < t.m; ++i) {
                t.xb[i] += -static_cast<double>(dir) * t.at(i, enter) * step;
            }
            t.status[enter] = (dir > 0) ? VarStatus::AtUpper : VarStatus::AtLower;
            continue;
        }

        // Update basic values, then swap basis.
        for (std::size_t i = 0; i < t.m; ++i) {
            if (i == leave_row) continue;
            t.xb[i] += -static_cast<double>(dir) * t.at(i, enter) * step;
        }
        const double enter_start = (t.status[enter] == VarStatus::AtUpper) ? t.ub[enter] : 0.0;
        const double enter_value = enter_start + static_cast<double>(dir) * step;

        const std::size_t leaving = t.basis[leave_row];
        t.status[leaving] = leave_at_upper ? VarStatus::AtUpper : VarStatus::AtLower;
        t.pivot(leave_row, enter);
        t.basis[leave_row] = enter;
        t.status[enter] = VarStatus::Basic;
        t.xb[leave_row] = enter_value;
    }
    throw ContractError("simplex: iteration limit exceeded");
}

} // namespace

LpSolution solve_lp(const LpProblem& problem) {
    const std::size_t n = problem.objective.size();
    const std::size_t m = problem.rows.size();
    if (problem.lower.size() != n || problem.upper.size() != n) {
        throw ContractError("lp: bound vectors must match objective size");
    }

    for (std::size_t j = 0; j < n; ++j) {
        if (!(problem.lower[j] <= problem.upper[j] + kTol)) {
            throw InfeasibleError("lp: variable " + std::to_string(j) + " has empty bound interval");
        }
    }

    // Shift structurals to zero lower bounds; attach a ranged slack per row.
    const std::size_t total = n + m + m; // structural + slack + artificial
    Tableau t;
    t.m = m;
    t.total = total;
    t.a.assign(m * total, 0.0);
    t.xb.assign(m, 0.0);
    t.ub.assign(total, 0.0);
    t.cost.assign(total, 0.0);
    t.basis.assign(m, 0);
    t.status.assign(total, VarStatus::AtLower);

    for (std::size_t j = 0; j < n; ++j) t.ub[j] = problem.upper[j] - problem.lower[j];

    std::vector<double> b(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const LpRow& row = problem.rows[i];
        if (row.coeffs.size() != n) throw ContractError("lp: row coefficient size mismatch");
        double shift = 0.0;
        for (std::size_t j = 0; j < n; ++j) shift += row.coeffs[j] * problem.lower[j];
        const double lo = row.lo - shift;
        const double hi = row.hi - shift;
        if (lo > hi + kTol) throw InfeasibleError("lp: row " + std::to_string(i) + " has empty range");

        double sign = 1.0;
        if (hi < 0.0) sign = -1.0; // keep rhs non-negative for the artificial start
        for (std::size_t j = 0; j < n; ++j) t.at(i, j) = sign * row.coeffs[j];
        t.at(i, n + i) = sign;                  // slack: coeffs.x + s = hi, 0 <= s <= hi-lo
        t.ub[n + i] = std::max(hi - lo, 0.0);
        b[i] = sign * hi;

        t.at(i, n + m + i) = 1.0; // artificial
        t.ub[n + m + i] = kInf;
        t.basis[i] = n + m + i;
        t.status[n + m + i] = VarStatus::Basic;
        t.xb[i] = b[i];
    }

    // Phase 1: drive artificial infeasibility to zero.
    for (std::size_t j = 0; j < m; ++j) t.cost[n + m + j] = 1.0;
    optimize(t);
    double infeas = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (t.basis[i] >= n + m) infeas += t.xb[i];
    }
    if (infeas > 1e-7) throw InfeasibleError("lp: no feasible point (phase-1 residual " +
                                             std::to_string(infeas) + ")");

    // Phase 2: real objective; artificials frozen at zero.
    for (std::size_t j = 0; j < total; ++j) t.cost[j] = 0.0;
    for (std::size_t j = 0; j < n; ++j) t.cost[j] = problem.objective[j];
    for (std::size_t j = 0; j < m; ++j) t.ub[n + m + j] = 0.0;
    optimize(t);

    LpSolution sol;
    sol.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) sol.x[j] = problem.lower[j] + t.value(j);
    double obj = 0.0;
    for (std::size_t j = 0; j < n; ++j) obj += problem.objective[j] * sol.x[j];
    sol.objective = obj;
    return sol;
}

} // namespace pevdr
