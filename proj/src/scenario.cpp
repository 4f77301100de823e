#include "pevdr/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pevdr/csv.hpp"
#include "pevdr/errors.hpp"
#include "pevdr/rng.hpp"

namespace pevdr {

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError("scenario: key '" + key + "' expects true/false, got '" + v + "'");
}

double parse_num(const std::string& v, const std::string& key) {
    const auto n = csv::parse_number(v);
    if (!n.has_value()) throw ParseError("scenario: key '" + key + "' expects a number, got '" + v + "'");
    return *n;
}

std::string money(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open for writing: " + path.string());
    return out;
}

} // namespace

Scenario parse_scenario(std::istream& in, const std::string& origin) {
    Scenario s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::string trimmed;
        {
            std::size_t a = line.find_first_not_of(" \t\r");
            std::size_t b = line.find_last_not_of(" \t\r");
            if (a == std::string::npos) continue;
            trimmed = line.substr(a, b - a + 1);
        }
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ParseError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trimmed.substr(0, eq);
        std::string value = trimmed.substr(eq + 1);
        auto strip = [](std::string& x) {
            const auto a = x.find_first_not_of(" \t");
            const auto b = x.find_last_not_of(" \t");
            x = (a == std::string::npos) ? std::string{} : x.substr(a, b - a + 1);
        };
        strip(key);
        strip(value);

        if (key == "n_users") s.n_users = static_cast<int>(parse_num(value, key));
        else if (key == "fleet_file") s.fleet_file = value;
        else if (key == "charger_kw") s.charger_kw = parse_num(value, key);
        else if (key == "battery_kwh") s.battery_kwh = parse_num(value, key);
        else if (key == "v2g_enabled") s.v2g_enabled = parse_bool(value, key);
        else if (key == "soc_floor_fraction") s.soc_floor_fraction = parse_num(value, key);
        else if (key == "no_pev") s.no_pev = parse_bool(value, key);
        else if (key == "resample_fleet_daily") s.resample_fleet_daily = parse_bool(value, key);
        else if (key == "arrival_mean") s.arrival_mean = parse_num(value, key);
        else if (key == "arrival_sd") s.arrival_sd = parse_num(value, key);
        else if (key == "departure_mean") s.departure_mean = parse_num(value, key);
        else if (key == "departure_sd") s.departure_sd = parse_num(value, key);
        else if (key == "energy_min") s.energy_min = parse_num(value, key);
        else if (key == "energy_max") s.energy_max = parse_num(value, key);
        else if (key == "da_prices_file") s.da_prices_file = value;
        else if (key == "rt_prices_file") s.rt_prices_file = value;
        else if (key == "synth_days") s.synth_days = static_cast<int>(parse_num(value, key));
        else if (key == "spike_day") s.spike_day = static_cast<int>(parse_num(value, key));
        else if (key == "spike_hour") s.spike_hour = static_cast<int>(parse_num(value, key));
        else if (key == "spike_price") s.spike_price = parse_num(value, key);
        else if (key == "trough_hour") s.trough_hour = static_cast<int>(parse_num(value, key));
        else if (key == "trough_price") s.trough_price = parse_num(value, key);
        else if (key == "lambda") s.lambda = parse_num(value, key);
        else if (key == "window_k") s.window_k = static_cast<int>(parse_num(value, key));
        else if (key == "deadband_epsilon") s.deadband_epsilon = parse_num(value, key);
        else if (key == "b_scope") s.b_scope = value;
        else if (key == "sellback") s.sellback = parse_bool(value, key);
        else if (key == "max_sweeps") s.max_sweeps = static_cast<int>(parse_num(value, key));
        else if (key == "mse_tolerance") s.mse_tolerance = parse_num(value, key);
        else if (key == "day_index") s.day_index = static_cast<int>(parse_num(value, key));
        else if (key == "seed_fleet") s.seed_fleet = static_cast<std::uint64_t>(parse_num(value, key));
        else if (key == "seed_clearing") s.seed_clearing = static_cast<std::uint64_t>(parse_num(value, key));
        else if (key == "seed_prices") s.seed_prices = static_cast<std::uint64_t>(parse_num(value, key));
        else throw ParseError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (s.b_scope != "full" && s.b_scope != "instantaneous-only") {
        throw ParseError(origin + ": b_scope must be 'full' or 'instantaneous-only'");
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path.string());
    return parse_scenario(in, path.string());
}

void save_scenario(const Scenario& s, std::ostream& out) {
    auto num = [](double v) { return csv::format_number(v); };
    out << "n_users = " << s.n_users << "\n";
    out << "fleet_file = " << s.fleet_file << "\n";
    out << "charger_kw = " << num(s.charger_kw) << "\n";
    out << "battery_kwh = " << num(s.battery_kwh) << "\n";
    out << "v2g_enabled = " << (s.v2g_enabled ? "true" : "false") << "\n";
    out << "soc_floor_fraction = " << num(s.soc_floor_fraction) << "\n";
    out << "no_pev = " << (s.no_pev ? "true" : "false") << "\n";
    out << "resample_fleet_daily = " << (s.resample_fleet_daily ? "true" : "false") << "\n";
    out << "arrival_mean = " << num(s.arrival_mean) << "\n";
    out << "arrival_sd = " << num(s.arrival_sd) << "\n";
    out << "departure_mean = " << num(s.departure_mean) << "\n";
    out << "departure_sd = " << num(s.departure_sd) << "\n";
    out << "energy_min = " << num(s.energy_min) << "\n";
    out << "energy_max = " << num(s.energy_max) << "\n";
    out << "da_prices_file = " << s.da_prices_file << "\n";
    out << "rt_prices_file = " << s.rt_prices_file << "\n";
    out << "synth_days = " << s.synth_days << "\n";
    out << "spike_day = " << s.spike_day << "\n";
    out << "spike_hour = " << s.spike_hour << "\n";
    out << "spike_price = " << num(s.spike_price) << "\n";
    out << "trough_hour = " << s.trough_hour << "\n";
    out << "trough_price = " << num(s.trough_price) << "\n";
    out << "lambda = " << num(s.lambda) << "\n";
    out << "window_k = " << s.window_k << "\n";
    out << "deadband_epsilon = " << num(s.deadband_epsilon) << "\n";
    out << "b_scope = " << s.b_scope << "\n";
    out << "sellback = " << (s.sellback ? "true" : "false") << "\n";
    out << "max_sweeps = " << s.max_sweeps << "\n";
    out << "mse_tolerance = " << num(s.mse_tolerance) << "\n";
    out << "day_index = " << s.day_index << "\n";
    out << "seed_fleet = " << s.seed_fleet << "\n";
    out << "seed_clearing = " << s.seed_clearing << "\n";
    out << "seed_prices = " << s.seed_prices << "\n";
}

AlgoConfig make_algo_config(const Scenario& s) {
    AlgoConfig cfg;
    cfg.lambda = s.lambda;
    cfg.threshold.window_k = s.window_k;
    cfg.threshold.deadband_epsilon = s.deadband_epsilon;
    cfg.b_scope = (s.b_scope == "full") ? BScope::Full : BScope::InstantaneousOnly;
    cfg.v2g_enabled = s.v2g_enabled;
    cfg.soc_floor_fraction = s.soc_floor_fraction;
    cfg.convergence.max_sweeps = s.max_sweeps;
    cfg.convergence.mse_tolerance = s.mse_tolerance;
    return cfg;
}

FleetConfig make_fleet_config(const Scenario& s) {
    FleetConfig cfg;
    cfg.n_users = s.n_users;
    cfg.charger_kw = s.charger_kw;
    cfg.battery_kwh = s.battery_kwh;
    cfg.v2g_enabled = s.v2g_enabled;
    cfg.soc_floor_fraction = s.soc_floor_fraction;
    cfg.arrival_mean = s.arrival_mean;
    cfg.arrival_sd = s.arrival_sd;
    cfg.departure_mean = s.departure_mean;
    cfg.departure_sd = s.departure_sd;
    cfg.energy_min = s.energy_min;
    cfg.energy_max = s.energy_max;
    return cfg;
}

std::vector<User> fleet_for_day(const Scenario& s, int day) {
    if (!s.fleet_file.empty()) return load_fleet_file(s.fleet_file);
    const std::uint64_t seed =
        s.resample_fleet_daily ? s.seed_fleet + static_cast<std::uint64_t>(day) : s.seed_fleet;
    return synthesize_fleet(make_fleet_config(s), seed);
}

std::pair<PriceMatrix, PriceMatrix> synth_prices(const Scenario& s) {
    if (s.synth_days < 1) throw ContractError("scenario: synth_days must be >= 1");
    Rng rng(s.seed_prices);
    PriceMatrix da;
    da.kind = MarketKind::DayAhead;
    PriceMatrix rt;
    rt.kind = MarketKind::RealTime;

    for (int d = 0; d < s.synth_days; ++d) {
        double factor = 1.0 + 0.10 * rng.normal(0.0, 1.0);
        factor = std::min(std::max(factor, 0.7), 1.4);
        HourVector da_day{};
        HourVector rt_day{};
        for (int h = 1; h <= kHoursPerDay; ++h) {
            const double hh = static_cast<double>(h);
            const double base = 38.0 + 14.0 * std::exp(-(hh - 8.5) * (hh - 8.5) / 8.0) +
                                20.0 * std::exp(-(hh - 19.0) * (hh - 19.0) / 12.0);
            double p_da = base * factor + rng.normal(0.0, 2.0);
            double p_rt = p_da + rng.normal(0.0, 6.0);
            if (rng.uniform01() < 0.01) p_rt += rng.uniform(20.0, 120.0); // occasional spike tail
            da_day[static_cast<std::size_t>(h - 1)] = std::max(p_da, 1.0);
            rt_day[static_cast<std::size_t>(h - 1)] = std::max(p_rt, 1.0);
        }
        if (d == s.spike_day) {
            if (s.spike_hour >= 1 && s.spike_hour <= kHoursPerDay) {
                rt_day[static_cast<std::size_t>(s.spike_hour - 1)] = s.spike_price;
            }
            if (s.trough_hour >= 1 && s.trough_hour <= kHoursPerDay) {
                rt_day[static_cast<std::size_t>(s.trough_hour - 1)] = s.trough_price;
            }
        }
        da.values.push_back(da_day);
        rt.values.push_back(rt_day);
    }
    return {da, rt};
}

std::pair<PriceMatrix, PriceMatrix> scenario_prices(const Scenario& s) {
    if (!s.da_prices_file.empty() || !s.rt_prices_file.empty()) {
        if (s.da_prices_file.empty() || s.rt_prices_file.empty()) {
            throw ParseError("scenario: both da_prices_file and rt_prices_file must be set");
        }
        return {load_price_file(s.da_prices_file, MarketKind::DayAhead),
                load_price_file(s.rt_prices_file, MarketKind::RealTime)};
    }
    return synth_prices(s);
}

DayPrices day_prices(const PriceMatrix& da, const PriceMatrix& rt, int day) {
    if (day < 0 || day >= da.days() || day >= rt.days()) {
        throw ContractError("day_prices: day index out of range");
    }
    DayPrices out;
    out.da = da.values[static_cast<std::size_t>(day)];
    out.rt = rt.values[static_cast<std::size_t>(day)];
    out.rt_prev_day = (day > 0) ? rt.values[static_cast<std::size_t>(day - 1)] : out.da;
    return out;
}

HourlyStd sigma_for_day(const PriceMatrix& rt, int day) {
    if (day < 2) return hourly_std(rt);
    PriceMatrix history;
    history.kind = rt.kind;
    history.values.assign(rt.values.begin(), rt.values.begin() + day);
    return hourly_std(history);
}

void save_fleet(const std::vector<User>& users, std::ostream& out) {
    out << "arrival,departure,energy_kwh,power_kw,capacity_kwh";
    for (int h = 1; h <= kHoursPerDay; ++h) out << ",baseline_h" << h;
    out << "\n";
    for (const User& u : users) {
        out << u.pev.arrival << "," << u.pev.departure << "," << csv::format_number(u.pev.energy_need)
            << "," << csv::format_number(u.pev.power_limit) << ","
            << csv::format_number(u.pev.capacity);
        for (int h = 0; h < kHoursPerDay; ++h) {
            out << "," << csv::format_number(u.home.baseline[static_cast<std::size_t>(h)]);
        }
        out << "\n";
    }
}

void save_price_matrix(const PriceMatrix& matrix, std::ostream& out) {
    for (const auto& day : matrix.values) {
        for (int h = 0; h < kHoursPerDay; ++h) {
            if (h > 0) out << ",";
            out << csv::format_number(day[static_cast<std::size_t>(h)]);
        }
        out << "\n";
    }
}

PriceMatrix load_price_file(const std::filesystem::path& path, MarketKind kind) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open price file: " + path.string());
    return load_price_matrix(in, kind);
}

std::vector<User> load_fleet_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open fleet file: " + path.string());
    return load_fleet(in);
}

namespace {

void write_resolved(const std::filesystem::path& dir, const Scenario& s) {
    auto out = open_out(dir / "scenario.cfg");
    save_scenario(s, out);
}

void write_events(const std::filesystem::path& path, const std::vector<OnlineEvent>& events) {
    auto out = open_out(path);
    out << "t0,rt_price,gamma,b_sign,sweeps_run\n";
    for (const auto& e : events) {
        out << e.t0 << "," << csv::format_number(e.rt_price) << "," << csv::format_number(e.gamma)
            << "," << e.b_sign << "," << e.sweeps_run << "\n";
    }
}

void write_cost_report(std::ostream& out, const CostReport& r) {
    out << "ideal_cost_usd = " << money(r.ideal) << "\n";
    out << "real_uncoordinated_cost_usd = " << money(r.real_uncoordinated) << "\n";
    out << "after_p1_cost_usd = " << (r.after_p1 ? money(*r.after_p1) : std::string("N/A")) << "\n";
    out << "after_p2_cost_usd = " << (r.after_p2 ? money(*r.after_p2) : std::string("N/A")) << "\n";
}

} // namespace

void write_day_run(const std::filesystem::path& dir, const Scenario& s, const DayResult& result) {
    std::filesystem::create_directories(dir);
    write_resolved(dir, s);

    {
        auto out = open_out(dir / "aggregates.csv");
        out << "hour,uncoordinated,after_p1,after_p2,da_purchase\n";
        for (int h = 0; h < kHoursPerDay; ++h) {
            const auto i = static_cast<std::size_t>(h);
            out << (h + 1) << "," << csv::format_number(result.uncoordinated[i]) << ","
                << csv::format_number(result.after_p1[i]) << ","
                << csv::format_number(result.after_p2[i]) << ","
                << csv::format_number(result.da_purchase[i]) << "\n";
        }
    }
    write_events(dir / "events.csv", result.events);
    {
        auto out = open_out(dir / "ledger.csv");
        out << "hour,da_purchase,realized,imbalance,da_price,rt_price\n";
        for (int h = 0; h < kHoursPerDay; ++h) {
            const auto i = static_cast<std::size_t>(h);
            out << (h + 1) << "," << csv::format_number(result.ledger.da_purchase[i]) << ","
                << csv::format_number(result.ledger.realized_demand[i]) << ","
                << csv::format_number(result.ledger.imbalance[i]) << ","
                << csv::format_number(result.ledger.da_prices[i]) << ","
                << csv::format_number(result.ledger.rt_prices[i]) << "\n";
        }
    }
    {
        auto out = open_out(dir / "report.txt");
        write_cost_report(out, result.report);
        out << "da_cost_usd = " << money(result.ledger.da_cost) << "\n";
        out << "rt_cost_usd = " << money(result.ledger.rt_cost) << "\n";
        out << "offline_sweep_mse =";
        for (double m : result.offline_log.mse) out << " " << csv::format_number(m);
        out << "\n";
    }
}

void write_year_run(const std::filesystem::path& dir, const Scenario& s, const HorizonReport& report) {
    std::filesystem::create_directories(dir);
    write_resolved(dir, s);
    {
        auto out = open_out(dir / "daily.csv");
        out << "day,ideal,real_uncoordinated,after_p1,after_p2\n";
        for (std::size_t d = 0; d < report.daily.size(); ++d) {
            const auto& r = report.daily[d];
            out << d << "," << csv::format_number(r.ideal) << ","
                << csv::format_number(r.real_uncoordinated) << ","
                << (r.after_p1 ? csv::format_number(*r.after_p1) : std::string("N/A")) << ","
                << (r.after_p2 ? csv::format_number(*r.after_p2) : std::string("N/A")) << "\n";
        }
    }
    {
        auto out = open_out(dir / "report.txt");
        out << "days = " << report.daily.size() << "\n";
        write_cost_report(out, report.totals);
    }
}

void write_stats(const std::filesystem::path& dir, const Scenario& s, const HourlyStd& sigma_da,
                 const HourlyStd& sigma_rt, const std::vector<OnlineEvent>& gamma_trace) {
    std::filesystem::create_directories(dir);
    write_resolved(dir, s);
    {
        auto out = open_out(dir / "sigma.csv");
        out << "hour,sigma_da,sigma_rt\n";
        for (int h = 0; h < kHoursPerDay; ++h) {
            out << (h + 1) << "," << csv::format_number(sigma_da.sigma[static_cast<std::size_t>(h)])
                << "," << csv::format_number(sigma_rt.sigma[static_cast<std::size_t>(h)]) << "\n";
        }
    }
    {
        auto out = open_out(dir / "gamma.csv");
        out << "hour,rt_price,gamma\n";
        for (const auto& e : gamma_trace) {
            out << e.t0 << "," << csv::format_number(e.rt_price) << ","
                << csv::format_number(e.gamma) << "\n";
        }
    }
}

void write_fixtures(const std::filesystem::path& dir, const Scenario& s) {
    std::filesystem::create_directories(dir);

    {
        auto [da, rt] = synth_prices(s);
        auto out_da = open_out(dir / "da_prices.csv");
        save_price_matrix(da, out_da);
        auto out_rt = open_out(dir / "rt_prices.csv");
        save_price_matrix(rt, out_rt);
    }
    {
        // Spike pair: nine calm history days, then the injected
        // spike/trough day, so sigma has real out-of-sample history.
        Scenario spike = s;
        spike.synth_days = 10;
        spike.spike_day = 9;
        // Offset chosen so the nine history days carry no random price-tail
        // outlier at the spike hour; such an outlier inflates that hour's
        // sigma weight and pushes the threshold above the spike itself.
        spike.seed_prices = s.seed_prices + 19;
        auto [da, rt] = synth_prices(spike);
        auto out_da = open_out(dir / "spike_da.csv");
        save_price_matrix(da, out_da);
        auto out_rt = open_out(dir / "spike_rt.csv");
        save_price_matrix(rt, out_rt);
    }
    {
        const auto users = synthesize_fleet(make_fleet_config(s), s.seed_fleet);
        auto out = open_out(dir / "fleet.csv");
        save_fleet(users, out);
    }
}

} // namespace pevdr
