#include "pevdr/fleet.hpp"

#include <cmath>
#include <string>

#include "pevdr/csv.hpp"
#include "pevdr/errors.hpp"
#include "pevdr/rng.hpp"

namespace pevdr {

FleetConfig::FleetConfig() {
    // Double-peaked residential shape, kWh per hour per household.
    baseline_template = {0.60, 0.50, 0.45, 0.45, 0.50, 0.70, 1.10, 1.40,
                         1.20, 1.00, 0.90, 0.90, 0.95, 0.90, 0.90, 1.00,
                         1.30, 1.80, 2.20, 2.40, 2.20, 1.80, 1.20, 0.80};
}

double soc_at_arrival(double energy_need, double capacity) {
    if (capacity <= 0.0) throw ContractError("soc_at_arrival: capacity must be positive");
    if (energy_need < 0.0 || energy_need > capacity) {
        throw InfeasibleError("soc_at_arrival: energy need " + std::to_string(energy_need) +
                              " kWh outside [0, capacity]");
    }
    return capacity * (1.0 - energy_need / capacity);
}

std::vector<int> permissible_slots(const PevProfile& profile) {
    std::vector<int> slots;
    int h = profile.arrival;
    slots.push_back(h);
    while (h != profile.departure) {
        h = (h % kHoursPerDay) + 1;
        slots.push_back(h);
    }
    return slots;
}

void validate_profile(const PevProfile& p) {
    if (p.arrival < 1 || p.arrival > kHoursPerDay) throw ContractError("profile: arrival hour outside 1..24");
    if (p.departure < 1 || p.departure > kHoursPerDay) throw ContractError("profile: departure hour outside 1..24");
    if (p.power_limit <= 0.0) throw ContractError("profile: power limit must be positive");
    if (p.capacity <= 0.0) throw ContractError("profile: capacity must be positive");
    if (p.energy_need < 0.0) throw ContractError("profile: energy need must be non-negative");
    const auto window = permissible_slots(p);
    const double deliverable = p.power_limit * static_cast<double>(window.size());
    if (p.energy_need > deliverable + 1e-9) {
        throw ContractError("profile: energy need " + std::to_string(p.energy_need) +
                            " kWh exceeds deliverable " + std::to_string(deliverable) + " kWh");
    }
    if (p.soc_at_arrival < -1e-9 || p.soc_at_arrival > p.capacity + 1e-9) {
        throw ContractError("profile: arrival SOC outside [0, capacity]");
    }
    if (p.soc_at_arrival + p.energy_need > p.capacity + 1e-9) {
        throw ContractError("profile: arrival SOC plus energy need exceeds capacity");
    }
}

void validate_household(const Household& home) {
    for (double v : home.baseline) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ContractError("household: baseline entries must be finite and non-negative");
        }
    }
}

namespace {

int truncated_hour(Rng& rng, double mean, double sd) {
    for (int tries = 0; tries < 100; ++tries) {
        const int h = static_cast<int>(std::lround(rng.normal(mean, sd)));
        if (h >= 1 && h <= kHoursPerDay) return h;
    }
    return static_cast<int>(std::lround(mean));
}

} // namespace

std::vector<User> synthesize_fleet(const FleetConfig& cfg, std::uint64_t rng_seed) {
    if (cfg.n_users < 1) throw ContractError("fleet config: n_users must be >= 1");
    if (cfg.soc_floor_fraction < 0.0 || cfg.soc_floor_fraction >= 1.0) {
        throw ContractError("fleet config: soc_floor_fraction must be in [0, 1)");
    }
    Rng rng(rng_seed);
    std::vector<User> users;
    users.reserve(static_cast<std::size_t>(cfg.n_users));

    for (int n = 0; n < cfg.n_users; ++n) {
        User user;
        const double scale = rng.uniform(cfg.baseline_noise_lo, cfg.baseline_noise_hi);
        for (int h = 0; h < kHoursPerDay; ++h) {
            user.home.baseline[static_cast<std::size_t>(h)] =
                cfg.baseline_template[static_cast<std::size_t>(h)] * scale;
        }

        bool ok = false;
        for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
            PevProfile p;
            p.arrival = truncated_hour(rng, cfg.arrival_mean, cfg.arrival_sd);
            p.departure = truncated_hour(rng, cfg.departure_mean, cfg.departure_sd);
            p.power_limit = cfg.charger_kw;
            p.capacity = cfg.battery_kwh;
            double need = rng.uniform(cfg.energy_min, cfg.energy_max);
            if (need > p.capacity) need = p.capacity;
            p.energy_need = need;
            try {
                p.soc_at_arrival = soc_at_arrival(p.energy_need, p.capacity);
                validate_profile(p);
            } catch (const std::runtime_error&) {
                continue;
            }
            user.pev = p;
            ok = true;
        }
        if (!ok) {
            throw ContractError("synthesize_fleet: could not draw a feasible profile for user " +
                                std::to_string(n) + " after 1000 attempts");
        }
        users.push_back(user);
    }
    return users;
}

std::vector<User> load_fleet(std::istream& source) {
    const auto lines = csv::read_lines(source);
    if (lines.empty()) throw ParseError("fleet data: empty stream");

    std::size_t first = 0;
    {
        const auto fields = csv::split_fields(lines[0]);
        if (!fields.empty() && !csv::parse_number(fields[0]).has_value()) first = 1;
    }

    std::vector<User> users;
    for (std::size_t row = first; row < lines.size(); ++row) {
        const auto fields = csv::split_fields(lines[row]);
        const std::size_t expected = 5 + kHoursPerDay;
        if (fields.size() != expected) {
            throw ParseError("fleet data: row " + std::to_string(row + 1) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(expected));
        }
        std::vector<double> v;
        v.reserve(expected);
        for (std::size_t i = 0; i < expected; ++i) {
            const auto num = csv::parse_number(fields[i]);
            if (!num.has_value()) {
                throw ParseError("fleet data: row " + std::to_string(row + 1) + ", field " +
                                 std::to_string(i + 1) + " is not a number");
            }
            v.push_back(*num);
        }

        User user;
        user.pev.arrival = static_cast<int>(std::lround(v[0]));
        user.pev.departure = static_cast<int>(std::lround(v[1]));
        user.pev.energy_need = v[2];
        user.pev.power_limit = v[3];
        user.pev.capacity = v[4];
        for (int h = 0; h < kHoursPerDay; ++h) {
            user.home.baseline[static_cast<std::size_t>(h)] = v[static_cast<std::size_t>(5 + h)];
        }
        try {
            user.pev.soc_at_arrival = soc_at_arrival(user.pev.energy_need, user.pev.capacity);
            validate_profile(user.pev);
            validate_household(user.home);
        } catch (const std::runtime_error& e) {
            throw ParseError("fleet data: row " + std::to_string(row + 1) + ": " + e.what());
        }
        users.push_back(user);
    }
    return users;
}

} // namespace pevdr
