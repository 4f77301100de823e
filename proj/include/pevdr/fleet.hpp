#pragma once

#include <cstdint>
#include <istream>
#include <vector>

#include "pevdr/prices.hpp"

namespace pevdr {

// One vehicle's daily availability and battery parameters. Hours are 1..24;
// a departure earlier than the arrival wraps the window through midnight.
struct PevProfile {
    int arrival = 19;
    int departure = 7;
    double energy_need = 10.0;     // kWh to deliver over the window
    double power_limit = 1.8;      // kW, charging and discharging magnitude
    double capacity = 24.0;        // kWh
    double soc_at_arrival = 14.0;  // kWh
};

// Inflexible appliance load, kWh per hourly slot.
struct Household {
    HourVector baseline{};
};

struct User {
    Household home;
    PevProfile pev;
};

struct FleetConfig {
    int n_users = 50;
    double charger_kw = 1.8;    // NEMA 5-15 outlet
    double battery_kwh = 24.0;  // Nissan Leaf pack
    bool v2g_enabled = true;
    double soc_floor_fraction = 0.2;

    // Synthesis distributions (all overridable from the scenario file).
    double arrival_mean = 18.0, arrival_sd = 2.0;      // truncated normal, hours
    double departure_mean = 7.5, departure_sd = 1.5;   // truncated normal, hours
    double energy_min = 4.0, energy_max = 16.0;        // uniform, kWh

    // Household baseline: template shape scaled per user by uniform noise.
    HourVector baseline_template{};
    double baseline_noise_lo = 0.8, baseline_noise_hi = 1.2;

    FleetConfig();
};

// State of charge at plug-in assuming the vehicle left full this morning:
// the battery is missing exactly what the trip consumed.
// SOC% = 100 * (1 - E/C); returned in kWh. For the 24 kWh reference pack this
// is 24 - E. Throws ContractError when the need exceeds capacity.
double soc_at_arrival(double energy_need, double capacity);

// Hours the PEV is connected, in window order from arrival to departure
// (inclusive), wrapping 24 -> 1 overnight.
std::vector<int> permissible_slots(const PevProfile& profile);

// Throws ContractError naming the violated invariant.
void validate_profile(const PevProfile& profile);
void validate_household(const Household& home);

// Draws n_users (household, PEV) pairs from the configured distributions.
// Deterministic per seed. Profiles violating invariants are resampled; more
// than 1000 retries for one user raises ContractError.
std::vector<User> synthesize_fleet(const FleetConfig& cfg, std::uint64_t rng_seed);

// Rows of: arrival, departure, energy_kwh, power_kw, capacity_kwh, then 24
// baseline values. Each row is validated; errors name the row.
std::vector<User> load_fleet(std::istream& source);

} // namespace pevdr
