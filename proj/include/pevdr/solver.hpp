#pragma once

#include <optional>
#include <string>

#include "pevdr/fleet.hpp"
#include "pevdr/prices.hpp"

namespace pevdr {

// Hourly energy assignment for one PEV, kWh per slot. Positive entries charge
// the battery, negative entries discharge into the grid (V2G).
struct ScheduleVector {
    HourVector slots{};
};

enum class BScope {
    Full,              // the altering sign multiplies the whole objective
    InstantaneousOnly  // the sign flips only the slot-t0 term
};

struct ShapingInput {
    HourVector target_da{};         // l^d at fleet scale, kWh
    HourVector others_aggregate{};  // l_-n, kWh
    HourVector own_baseline{};      // l_A,n, kWh
    PevProfile profile;
    bool v2g_enabled = true;
    double soc_floor_fraction = 0.2;
};

struct AlteringInput {
    ShapingInput shaping;
    int t0 = 1;                // current slot; hours before t0 are frozen
    ScheduleVector committed;  // schedule in force before the altering call
    double lambda = 0.5;
    int b_sign = +1;
    BScope b_scope = BScope::Full;
};

// Offline shaping: minimize <l_PEV, baseline + others - target> over the
// availability window, subject to energy balance, the power box, and the SOC
// floor/ceiling corridor. Deterministic; ties resolve toward earlier window
// slots.
ScheduleVector solve_shaping(const ShapingInput& input);

// Online altering at slot t0: the committed hours stay fixed, the remainder
// re-optimizes b*[lambda*<l', cost> + (1-lambda)*l'(t0)] (plus the constant
// aggregate terms the sign also covers).
ScheduleVector solve_altering(const AlteringInput& input);

// Linear cost of a schedule under the shaping objective.
double shaping_objective(const ShapingInput& input, const ScheduleVector& schedule);
double altering_objective(const AlteringInput& input, const ScheduleVector& schedule);

// Returns a description of the first violated constraint, or nullopt when the
// schedule is feasible to within tol. When t0 >= 1, also checks the prefix
// against `committed`.
std::optional<std::string> check_schedule(const ScheduleVector& schedule, const PevProfile& profile,
                                          bool v2g_enabled, double soc_floor_fraction,
                                          double tol = 1e-9, int t0 = 0,
                                          const ScheduleVector* committed = nullptr);

// Test oracle: exhaustive search over a kWh grid. Refuses more than 5 free
// slots or a step below 0.1 kWh.
struct OracleSpec {
    HourVector objective{};  // cost coefficient per hour
    PevProfile profile;
    bool v2g_enabled = true;
    double soc_floor_fraction = 0.2;
    int t0 = 0;                // 0 = no frozen prefix
    ScheduleVector committed;  // consulted when t0 >= 1
};

ScheduleVector brute_force_oracle(const OracleSpec& spec, double grid_step);

} // namespace pevdr
