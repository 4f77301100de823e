// Command-line front end: scenario-driven day/year simulations, price
// statistics, and fixture generation.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "pevdr/coordinator.hpp"
#include "pevdr/errors.hpp"
#include "pevdr/prices.hpp"
#include "pevdr/scenario.hpp"

namespace {

struct CommonArgs {
    std::string scenario_file;
    std::string out_dir = "run";
    std::optional<std::uint64_t> seed;
    std::optional<int> day;
    std::optional<int> n_users;
    std::optional<double> lambda;
    std::optional<int> window_k;
    std::optional<double> epsilon;
    std::optional<bool> v2g;
    std::optional<bool> sellback;
    std::optional<bool> no_pev;
    std::optional<std::string> b_scope;
    std::optional<std::string> da_file, rt_file, fleet_file;
    std::optional<int> synth_days;
    std::optional<int> spike_day;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--scenario", args.scenario_file, "Scenario config file (key = value lines)");
    cmd->add_option("--out-dir", args.out_dir, "Output directory for run artifacts");
    cmd->add_option("--seed", args.seed, "Master seed; fleet/clearing/price seeds derive from it");
    cmd->add_option("--day", args.day, "Day index to simulate (0-based)");
    cmd->add_option("--n-users", args.n_users, "Fleet size");
    cmd->add_option("--lambda", args.lambda, "Altering weight in [0,1]");
    cmd->add_option("--window-k", args.window_k, "Threshold moving-average K");
    cmd->add_option("--epsilon", args.epsilon, "Threshold dead-band ($/MWh)");
    cmd->add_option("--v2g", args.v2g, "Enable vehicle-to-grid discharge");
    cmd->add_option("--sellback", args.sellback, "Sell surplus back at RT prices");
    cmd->add_option("--no-pev", args.no_pev, "Households only, no PEVs");
    cmd->add_option("--b-scope", args.b_scope, "Altering sign scope: full | instantaneous-only");
    cmd->add_option("--da-prices", args.da_file, "DA price CSV (365x24 style)");
    cmd->add_option("--rt-prices", args.rt_file, "RT price CSV");
    cmd->add_option("--fleet-file", args.fleet_file, "Fleet CSV instead of synthesis");
    cmd->add_option("--synth-days", args.synth_days, "Days of synthetic prices");
    cmd->add_option("--spike-day", args.spike_day, "Day index receiving the injected RT spike");
}

pevdr::Scenario resolve(const CommonArgs& args) {
    pevdr::Scenario s;
    if (!args.scenario_file.empty()) s = pevdr::load_scenario(args.scenario_file);
    if (args.seed) {
        s.seed_fleet = *args.seed;
        s.seed_clearing = *args.seed + 1;
        s.seed_prices = *args.seed + 2;
    }
    if (args.day) s.day_index = *args.day;
    if (args.n_users) s.n_users = *args.n_users;
    if (args.lambda) s.lambda = *args.lambda;
    if (args.window_k) s.window_k = *args.window_k;
    if (args.epsilon) s.deadband_epsilon = *args.epsilon;
    if (args.v2g) s.v2g_enabled = *args.v2g;
    if (args.sellback) s.sellback = *args.sellback;
    if (args.no_pev) s.no_pev = *args.no_pev;
    if (args.b_scope) s.b_scope = *args.b_scope;
    if (args.da_file) s.da_prices_file = *args.da_file;
    if (args.rt_file) s.rt_prices_file = *args.rt_file;
    if (args.fleet_file) s.fleet_file = *args.fleet_file;
    if (args.synth_days) s.synth_days = *args.synth_days;
    if (args.spike_day) s.spike_day = *args.spike_day;
    return s;
}

int cmd_run_day(const CommonArgs& args) {
    const pevdr::Scenario s = resolve(args);
    const auto [da, rt] = pevdr::scenario_prices(s);
    const pevdr::HourlyStd sigma = pevdr::sigma_for_day(rt, s.day_index);
    const pevdr::DayPrices day = pevdr::day_prices(da, rt, s.day_index);
    auto users = pevdr::fleet_for_day(s, s.day_index);
    const pevdr::DayResult result = pevdr::run_day(std::move(users), day, sigma,
                                                   pevdr::make_algo_config(s), s.seed_clearing,
                                                   s.sellback, !s.no_pev);
    pevdr::write_day_run(args.out_dir, s, result);
    std::cout << "run-day: wrote " << args.out_dir << " (total cost $"
              << result.ledger.total_cost << ")\n";
    return 0;
}

int cmd_run_year(const CommonArgs& args) {
    const pevdr::Scenario s = resolve(args);
    const auto [da, rt] = pevdr::scenario_prices(s);
    const pevdr::HorizonReport report = pevdr::run_horizon(
        [&s](int d) { return pevdr::fleet_for_day(s, d); }, da, rt, pevdr::make_algo_config(s),
        s.seed_clearing, s.sellback, !s.no_pev);
    pevdr::write_year_run(args.out_dir, s, report);
    std::cout << "run-year: " << report.daily.size() << " days, uncoordinated $"
              << report.totals.real_uncoordinated << "\n";
    return 0;
}

int cmd_stats(const CommonArgs& args) {
    const pevdr::Scenario s = resolve(args);
    const auto [da, rt] = pevdr::scenario_prices(s);
    const pevdr::HourlyStd sigma_da = pevdr::hourly_std(da);
    const pevdr::HourlyStd sigma_rt = pevdr::hourly_std(rt);
    const pevdr::HourlyStd sigma_gamma = pevdr::sigma_for_day(rt, s.day_index);
    const pevdr::DayPrices day = pevdr::day_prices(da, rt, s.day_index);

    pevdr::ThresholdConfig tc;
    tc.window_k = s.window_k;
    tc.deadband_epsilon = s.deadband_epsilon;
    std::vector<pevdr::OnlineEvent> trace;
    for (int t = 1; t <= pevdr::kHoursPerDay; ++t) {
        pevdr::OnlineEvent e;
        e.t0 = t;
        e.rt_price = day.rt[static_cast<std::size_t>(t - 1)];
        e.gamma = pevdr::threshold_gamma(day, sigma_gamma, tc, t,
                                         std::span<const double>(day.rt.data(), static_cast<std::size_t>(t)));
        trace.push_back(e);
    }
    pevdr::write_stats(args.out_dir, s, sigma_da, sigma_rt, trace);
    std::cout << "stats: wrote " << args.out_dir << "\n";
    return 0;
}

int cmd_make_fixtures(const CommonArgs& args) {
    pevdr::Scenario s = resolve(args);
    if (s.spike_day < 0) s.spike_day = 67;  // give the year fixture one black-swan day
    pevdr::write_fixtures(args.out_dir, s);
    std::cout << "make-fixtures: wrote " << args.out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PEV fleet demand response market simulator"};
    app.require_subcommand(1);

    CommonArgs run_day_args, run_year_args, stats_args, fixtures_args;
    CLI::App* run_day = app.add_subcommand("run-day", "Simulate one day end to end");
    add_common(run_day, run_day_args);
    CLI::App* run_year = app.add_subcommand("run-year", "Simulate the full price horizon");
    add_common(run_year, run_year_args);
    CLI::App* stats = app.add_subcommand("stats", "Hourly sigma table and threshold trace");
    add_common(stats, stats_args);
    CLI::App* fixtures = app.add_subcommand("make-fixtures", "Write synthetic price/fleet fixtures");
    add_common(fixtures, fixtures_args);

    try {
        app.parse(argc, argv);
        if (run_day->parsed()) return cmd_run_day(run_day_args);
        if (run_year->parsed()) return cmd_run_year(run_year_args);
        if (stats->parsed()) return cmd_stats(stats_args);
        if (fixtures->parsed()) return cmd_make_fixtures(fixtures_args);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const pevdr::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const pevdr::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
