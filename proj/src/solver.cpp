#include "pevdr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pevdr/errors.hpp"
#include "pevdr/lp.hpp"

namespace pevdr {

namespace {

constexpr double kFeasTol = 1e-9;

// Solves min cost.l over one PEV's window with an optional frozen prefix
// (hours chronologically before t0 pinned to the committed values).
ScheduleVector solve_window_lp(const PevProfile& profile, bool v2g_enabled,
                               double soc_floor_fraction, const HourVector& cost,
                               int t0, const ScheduleVector* committed) {
    const auto window = permissible_slots(profile);
    const std::size_t w = window.size();
    const double p = profile.power_limit;
    const double lo_bound = v2g_enabled ? -p : 0.0;
    const double soc0 = profile.soc_at_arrival;
    const double floor = soc_floor_fraction * profile.capacity;

    LpProblem lp;
    lp.objective.resize(w);
    lp.lower.resize(w);
    lp.upper.resize(w);

    double scale = 1.0;
    for (std::size_t k = 0; k < w; ++k) {
        scale = std::max(scale, std::fabs(cost[static_cast<std::size_t>(window[k] - 1)]));
    }
    for (std::size_t k = 0; k < w; ++k) {
        const int hour = window[k];
        // Tiny position bias so ties break toward earlier window slots.
        lp.objective[k] = cost[static_cast<std::size_t>(hour - 1)] +
                          1e-9 * scale * static_cast<double>(k + 1) / static_cast<double>(w);
        if (t0 >= 1 && hour < t0) {
            const double v = committed->slots[static_cast<std::size_t>(hour - 1)];
            lp.lower[k] = v;
            lp.upper[k] = v;
        } else {
            lp.lower[k] = lo_bound;
            lp.upper[k] = p;
        }
    }

    // SOC corridor after every window slot, then the energy balance.
    for (std::size_t k = 0; k < w; ++k) {
        LpRow row;
        row.coeffs.assign(w, 0.0);
        for (std::size_t j = 0; j <= k; ++j) row.coeffs[j] = 1.0;
        row.lo = floor - soc0;
        row.hi = profile.capacity - soc0;
        lp.rows.push_back(std::move(row));
    }
    {
        LpRow row;
        row.coeffs.assign(w, 1.0);
        row.lo = profile.energy_need;
        row.hi = profile.energy_need;
        lp.rows.push_back(std::move(row));
    }

    const LpSolution sol = solve_lp(lp);

    ScheduleVector out;
    for (std::size_t k = 0; k < w; ++k) {
        double v = sol.x[k];
        v = std::clamp(v, lp.lower[k], lp.upper[k]);
        if (std::fabs(v) < 1e-12) v = 0.0;
        out.slots[static_cast<std::size_t>(window[k] - 1)] = v;
    }
    if (t0 >= 1) {
        for (std::size_t k = 0; k < w; ++k) {
            const int hour = window[k];
            if (hour < t0) {
                out.slots[static_cast<std::size_t>(hour - 1)] =
                    committed->slots[static_cast<std::size_t>(hour - 1)];
            }
        }
    }

    const auto bad = check_schedule(out, profile, v2g_enabled, soc_floor_fraction, kFeasTol,
                                    t0, committed);
    if (bad.has_value()) throw ContractError("solver: returned schedule failed re-check: " + *bad);
    return out;
}

HourVector shaping_cost(const ShapingInput& in) {
    HourVector c{};
    for (int h = 0; h < kHoursPerDay; ++h) {
        const auto i = static_cast<std::size_t>(h);
        c[i] = in.own_baseline[i] + in.others_aggregate[i] - in.target_da[i];
    }
    return c;
}

HourVector altering_cost(const AlteringInput& in) {
    const HourVector base = shaping_cost(in.shaping);
    const double b = static_cast<double>(in.b_sign);
    HourVector c{};
    for (int h = 0; h < kHoursPerDay; ++h) {
        const auto i = static_cast<std::size_t>(h);
        c[i] = (in.b_scope == BScope::Full ? b : 1.0) * in.lambda * base[i];
    }
    c[static_cast<std::size_t>(in.t0 - 1)] += b * (1.0 - in.lambda);
    return c;
}

} // namespace

ScheduleVector solve_shaping(const ShapingInput& input) {
    validate_profile(input.profile);
    return solve_window_lp(input.profile, input.v2g_enabled, input.soc_floor_fraction,
                           shaping_cost(input), 0, nullptr);
}

ScheduleVector solve_altering(const AlteringInput& input) {
    if (input.lambda < 0.0 || input.lambda > 1.0) {
        throw ContractError("solve_altering: lambda must lie in [0, 1]");
    }
    if (input.b_sign != 1 && input.b_sign != -1) {
        throw ContractError("solve_altering: b_sign must be -1 or +1");
    }
    if (input.t0 < 1 || input.t0 > kHoursPerDay) {
        throw ContractError("solve_altering: t0 must lie in 1..24");
    }
    validate_profile(input.shaping.profile);
    return solve_window_lp(input.shaping.profile, input.shaping.v2g_enabled,
                           input.shaping.soc_floor_fraction, altering_cost(input), input.t0,
                           &input.committed);
}

double shaping_objective(const ShapingInput& input, const ScheduleVector& schedule) {
    const HourVector c = shaping_cost(input);
    double sum = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h) {
        sum += c[static_cast<std::size_t>(h)] * schedule.slots[static_cast<std::size_t>(h)];
    }
    return sum;
}

double altering_objective(const AlteringInput& input, const ScheduleVector& schedule) {
    const HourVector base = shaping_cost(input.shaping);
    double corr = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h) {
        corr += base[static_cast<std::size_t>(h)] * schedule.slots[static_cast<std::size_t>(h)];
    }
    const auto i0 = static_cast<std::size_t>(input.t0 - 1);
    const double instantaneous = input.shaping.others_aggregate[i0] +
                                 input.shaping.own_baseline[i0] + schedule.slots[i0];
    const double b = static_cast<double>(input.b_sign);
    if (input.b_scope == BScope::Full) {
        return b * (input.lambda * corr + (1.0 - input.lambda) * instantaneous);
    }
    return input.lambda * corr + b * (1.0 - input.lambda) * instantaneous;
}

std::optional<std::string> check_schedule(const ScheduleVector& schedule, const PevProfile& profile,
                                          bool v2g_enabled, double soc_floor_fraction, double tol,
                                          int t0, const ScheduleVector* committed) {
    const auto window = permissible_slots(profile);
    std::vector<bool> in_window(kHoursPerDay, false);
    for (int h : window) in_window[static_cast<std::size_t>(h - 1)] = true;

    for (int h = 1; h <= kHoursPerDay; ++h) {
        const double v = schedule.slots[static_cast<std::size_t>(h - 1)];
        if (!in_window[static_cast<std::size_t>(h - 1)]) {
            if (std::fabs(v) > tol) return "nonzero assignment outside window at hour " + std::to_string(h);
            continue;
        }
        if (v > profile.power_limit + tol) return "power bound exceeded at hour " + std::to_string(h);
        const double lo = v2g_enabled ? -profile.power_limit : 0.0;
        if (v < lo - tol) return "lower power bound violated at hour " + std::to_string(h);
    }

    double sum = 0.0;
    double soc = profile.soc_at_arrival;
    const double floor = soc_floor_fraction * profile.capacity;
    for (int h : window) {
        const double v = schedule.slots[static_cast<std::size_t>(h - 1)];
        sum += v;
        soc += v;
        if (soc < floor - tol) return "SOC floor violated at hour " + std::to_string(h);
        if (soc > profile.capacity + tol) return "SOC ceiling violated at hour " + std::to_string(h);
    }
    if (std::fabs(sum - profile.energy_need) > tol) {
        return "energy balance off by " + std::to_string(sum - profile.energy_need) + " kWh";
    }

    if (t0 >= 1 && committed != nullptr) {
        for (int h : window) {
            if (h >= t0) continue;
            if (schedule.slots[static_cast<std::size_t>(h - 1)] !=
                committed->slots[static_cast<std::size_t>(h - 1)]) {
                return "frozen prefix changed at hour " + std::to_string(h);
            }
        }
    }
    return std::nullopt;
}

namespace {

struct OracleSearch {
    const OracleSpec* spec = nullptr;
    double step = 0.1;
    std::vector<int> window;
    std::vector<bool> is_free;      // per window position
    std::vector<double> pinned;     // committed value per window position (frozen only)
    double lo = 0.0, hi = 0.0;      // per-slot grid bounds
    double floor = 0.0;

    double best_obj = 0.0;
    bool found = false;
    std::vector<double> best;       // per window position
    std::vector<double> current;

    void search(std::size_t pos, double soc, double sum, double obj) {
        if (pos == window.size()) {
            if (std::fabs(sum - spec->profile.energy_need) > 1e-7) return;
            if (!found || obj < best_obj - 1e-15) {
                found = true;
                best_obj = obj;
                best = current;
            }
            return;
        }

        // Remaining free capacity must still be able to close the balance.
        std::size_t free_left = 0;
        for (std::size_t k = pos; k < window.size(); ++k) {
            if (is_free[k]) ++free_left;
        }
        double frozen_rest = 0.0;
        for (std::size_t k = pos; k < window.size(); ++k) {
            if (!is_free[k]) frozen_rest += pinned[k];
        }
        const double need = spec->profile.energy_need - sum - frozen_rest;
        if (need < static_cast<double>(free_left) * lo - 1e-7 ||
            need > static_cast<double>(free_left) * hi + 1e-7) {
            return;
        }

        const int hour = window[pos];
        const double coeff = spec->objective[static_cast<std::size_t>(hour - 1)];

        if (!is_free[pos]) {
            const double v = pinned[pos];
            const double soc2 = soc + v;
            if (soc2 < floor - 1e-9 || soc2 > spec->profile.capacity + 1e-9) return;
            current[pos] = v;
            search(pos + 1, soc2, sum + v, obj + coeff * v);
            return;
        }

        const int kmin = static_cast<int>(std::ceil(lo / step - 1e-9));
        const int kmax = static_cast<int>(std::floor(hi / step + 1e-9));
        for (int k = kmin; k <= kmax; ++k) {
            const double v = static_cast<double>(k) * step;
            const double soc2 = soc + v;
            if (soc2 < floor - 1e-9 || soc2 > spec->profile.capacity + 1e-9) continue;
            current[pos] = v;
            search(pos + 1, soc2, sum + v, obj + coeff * v);
        }
    }
};

} // namespace

ScheduleVector brute_force_oracle(const OracleSpec& spec, double grid_step) {
    if (grid_step < 0.1 - 1e-12) throw ContractError("oracle: grid step below 0.1 kWh refused");
    validate_profile(spec.profile);

    OracleSearch s;
    s.spec = &spec;
    s.step = grid_step;
    s.window = permissible_slots(spec.profile);
    s.lo = spec.v2g_enabled ? -spec.profile.power_limit : 0.0;
    s.hi = spec.profile.power_limit;
    s.floor = spec.soc_floor_fraction * spec.profile.capacity;

    std::size_t free_count = 0;
    for (int h : s.window) {
        const bool frozen = spec.t0 >= 1 && h < spec.t0;
        s.is_free.push_back(!frozen);
        s.pinned.push_back(frozen ? spec.committed.slots[static_cast<std::size_t>(h - 1)] : 0.0);
        if (!frozen) ++free_count;
    }
    if (free_count > 5) throw ContractError("oracle: more than 5 free slots refused");

    s.current.assign(s.window.size(), 0.0);
    s.search(0, spec.profile.soc_at_arrival, 0.0, 0.0);
    if (!s.found) throw InfeasibleError("oracle: no feasible grid schedule");

    ScheduleVector out;
    for (std::size_t k = 0; k < s.window.size(); ++k) {
        out.slots[static_cast<std::size_t>(s.window[k] - 1)] = s.best[k];
    }
    return out;
}

} // namespace pevdr
