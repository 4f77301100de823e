#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "pevdr/coordinator.hpp"
#include "pevdr/fleet.hpp"
#include "pevdr/prices.hpp"

namespace pevdr {

// Flat, human-editable experiment description. Every field has a default so
// a run directory can always carry the fully resolved configuration.
struct Scenario {
    // Fleet
    int n_users = 50;
    std::string fleet_file;  // empty -> synthesize per seed
    double charger_kw = 1.8;
    double battery_kwh = 24.0;
    bool v2g_enabled = true;
    double soc_floor_fraction = 0.2;
    bool no_pev = false;
    bool resample_fleet_daily = true;
    double arrival_mean = 18.0, arrival_sd = 2.0;
    double departure_mean = 7.5, departure_sd = 1.5;
    double energy_min = 4.0, energy_max = 16.0;

    // Prices
    std::string da_prices_file;  // empty -> synthetic
    std::string rt_prices_file;
    int synth_days = 365;
    int spike_day = -1;  // day index (0-based) to receive the injected spike; -1 = none
    int spike_hour = 6;
    double spike_price = 500.0;
    int trough_hour = 3;
    double trough_price = 5.0;

    // Algorithm
    double lambda = 0.5;
    int window_k = 3;
    double deadband_epsilon = 0.0;
    std::string b_scope = "full";  // "full" | "instantaneous-only"
    bool sellback = true;
    int max_sweeps = 5;
    double mse_tolerance = 1e-6;

    // Run selection
    int day_index = 0;

    // Seeds
    std::uint64_t seed_fleet = 1;
    std::uint64_t seed_clearing = 2;
    std::uint64_t seed_prices = 3;
};

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(std::istream& in, const std::string& origin);
void save_scenario(const Scenario& s, std::ostream& out);

AlgoConfig make_algo_config(const Scenario& s);
FleetConfig make_fleet_config(const Scenario& s);

// Fleet for a given horizon day, honoring fleet_file / resampling / seeds.
std::vector<User> fleet_for_day(const Scenario& s, int day);

// Synthetic market year: smooth double-peaked DA curve with day-level noise;
// RT adds heavier-tailed noise plus the optional injected spike/trough pair.
// Prices are kept positive so fixture-based cost orderings are meaningful.
std::pair<PriceMatrix, PriceMatrix> synth_prices(const Scenario& s);

// Loads configured files or synthesizes, returning (DA, RT).
std::pair<PriceMatrix, PriceMatrix> scenario_prices(const Scenario& s);

DayPrices day_prices(const PriceMatrix& da, const PriceMatrix& rt, int day);

// Hourly RT volatility for operating the given day. Uses only days before it
// (the operated day may contain an unprecedented spike that no history could
// have predicted); with fewer than two days of history it falls back to the
// whole matrix.
HourlyStd sigma_for_day(const PriceMatrix& rt, int day);

void save_fleet(const std::vector<User>& users, std::ostream& out);
void save_price_matrix(const PriceMatrix& matrix, std::ostream& out);

PriceMatrix load_price_file(const std::filesystem::path& path, MarketKind kind);
std::vector<User> load_fleet_file(const std::filesystem::path& path);

// Run-directory emission.
void write_day_run(const std::filesystem::path& dir, const Scenario& s, const DayResult& result);
void write_year_run(const std::filesystem::path& dir, const Scenario& s, const HorizonReport& report);
void write_stats(const std::filesystem::path& dir, const Scenario& s, const HourlyStd& sigma_da,
                 const HourlyStd& sigma_rt, const std::vector<OnlineEvent>& gamma_trace);
void write_fixtures(const std::filesystem::path& dir, const Scenario& s);

} // namespace pevdr
