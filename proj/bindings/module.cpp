// Python bindings for the core simulator operations.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "pevdr/coordinator.hpp"
#include "pevdr/errors.hpp"
#include "pevdr/scenario.hpp"

namespace py = pybind11;
using namespace pevdr;

namespace {

HourVector to_hours(const std::vector<double>& v, const char* name) {
    if (v.size() != kHoursPerDay) {
        throw ContractError(std::string(name) + " must have exactly 24 entries");
    }
    HourVector out{};
    for (int h = 0; h < kHoursPerDay; ++h) out[static_cast<std::size_t>(h)] = v[static_cast<std::size_t>(h)];
    return out;
}

std::vector<double> from_hours(const HourVector& v) {
    return {v.begin(), v.end()};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "PEV fleet demand response market simulator";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);

    py::enum_<MarketKind>(m, "MarketKind")
        .value("DA", MarketKind::DayAhead)
        .value("RT", MarketKind::RealTime);

    py::class_<PriceMatrix>(m, "PriceMatrix")
        .def_property_readonly("days", &PriceMatrix::days)
        .def("at", &PriceMatrix::at, py::arg("day"), py::arg("hour"))
        .def_property_readonly("rows", [](const PriceMatrix& pm) {
            std::vector<std::vector<double>> rows;
            for (const auto& r : pm.values) rows.push_back(from_hours(r));
            return rows;
        });

    py::class_<PevProfile>(m, "PevProfile")
        .def(py::init<>())
        .def_readwrite("arrival", &PevProfile::arrival)
        .def_readwrite("departure", &PevProfile::departure)
        .def_readwrite("energy_need", &PevProfile::energy_need)
        .def_readwrite("power_limit", &PevProfile::power_limit)
        .def_readwrite("capacity", &PevProfile::capacity)
        .def_readwrite("soc_at_arrival", &PevProfile::soc_at_arrival);

    m.def("load_price_matrix", [](const std::string& text, MarketKind kind) {
        std::istringstream in(text);
        return load_price_matrix(in, kind);
    }, py::arg("text"), py::arg("kind"));
    m.def("load_price_file", &load_price_file, py::arg("path"), py::arg("kind"));

    m.def("hourly_std", [](const PriceMatrix& pm) { return from_hours(hourly_std(pm).sigma); });
    m.def("wrap_hour", &wrap_hour, py::arg("i"));

    m.def("threshold_gamma",
          [](const std::vector<double>& rt_prev, const std::vector<double>& observed_rt,
             const std::vector<double>& sigma, int t, int window_k) {
              DayPrices day;
              day.rt_prev_day = to_hours(rt_prev, "rt_prev_day");
              HourlyStd hs;
              hs.sigma = to_hours(sigma, "sigma");
              ThresholdConfig cfg;
              cfg.window_k = window_k;
              return threshold_gamma(day, hs, cfg, t,
                                     std::span<const double>(observed_rt.data(), observed_rt.size()));
          },
          py::arg("rt_prev_day"), py::arg("observed_rt"), py::arg("sigma"), py::arg("t"),
          py::arg("window_k") = 3);

    m.def("clear_da_demand", [](const std::vector<double>& required, std::uint64_t seed) {
        return from_hours(clear_da_demand(to_hours(required, "required"), seed));
    }, py::arg("required"), py::arg("seed"));

    m.def("soc_at_arrival", &soc_at_arrival, py::arg("energy_need"), py::arg("capacity"));
    m.def("permissible_slots", &permissible_slots, py::arg("profile"));

    m.def("solve_shaping",
          [](const PevProfile& profile, const std::vector<double>& cost, bool v2g, double floor_frac) {
              ShapingInput input;
              input.profile = profile;
              input.others_aggregate = to_hours(cost, "cost");
              input.v2g_enabled = v2g;
              input.soc_floor_fraction = floor_frac;
              return from_hours(solve_shaping(input).slots);
          },
          py::arg("profile"), py::arg("cost"), py::arg("v2g") = true,
          py::arg("soc_floor_fraction") = 0.2,
          "Minimize cost . schedule over the availability window");

    m.def("settle_day",
          [](const std::vector<double>& purchase, const std::vector<double>& realized,
             const std::vector<double>& da_prices, const std::vector<double>& rt_prices,
             bool sellback) {
              const DayLedger ledger =
                  settle_day(to_hours(purchase, "da_purchase"), to_hours(realized, "realized"),
                             to_hours(da_prices, "da_prices"), to_hours(rt_prices, "rt_prices"),
                             sellback);
              py::dict out;
              out["da_cost"] = ledger.da_cost;
              out["rt_cost"] = ledger.rt_cost;
              out["total_cost"] = ledger.total_cost;
              out["imbalance"] = from_hours(ledger.imbalance);
              return out;
          },
          py::arg("da_purchase"), py::arg("realized"), py::arg("da_prices"), py::arg("rt_prices"),
          py::arg("sellback") = true);

    m.def("ideal_cost", [](const std::vector<double>& realized, const std::vector<double>& da) {
        return ideal_cost(to_hours(realized, "realized"), to_hours(da, "da_prices"));
    }, py::arg("realized"), py::arg("da_prices"));

    py::class_<CostReport>(m, "CostReport")
        .def_readonly("ideal", &CostReport::ideal)
        .def_readonly("real_uncoordinated", &CostReport::real_uncoordinated)
        .def_readonly("after_p1", &CostReport::after_p1)
        .def_readonly("after_p2", &CostReport::after_p2);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("n_users", &Scenario::n_users)
        .def_readwrite("synth_days", &Scenario::synth_days)
        .def_readwrite("spike_day", &Scenario::spike_day)
        .def_readwrite("day_index", &Scenario::day_index)
        .def_readwrite("lambda_weight", &Scenario::lambda)
        .def_readwrite("window_k", &Scenario::window_k)
        .def_readwrite("v2g_enabled", &Scenario::v2g_enabled)
        .def_readwrite("sellback", &Scenario::sellback)
        .def_readwrite("no_pev", &Scenario::no_pev)
        .def_readwrite("seed_fleet", &Scenario::seed_fleet)
        .def_readwrite("seed_clearing", &Scenario::seed_clearing)
        .def_readwrite("seed_prices", &Scenario::seed_prices);

    m.def("run_day_report",
          [](const Scenario& s) {
              const auto [da, rt] = scenario_prices(s);
              const HourlyStd sigma = sigma_for_day(rt, s.day_index);
              const DayPrices day = day_prices(da, rt, s.day_index);
              auto users = fleet_for_day(s, s.day_index);
              const DayResult r = run_day(std::move(users), day, sigma, make_algo_config(s),
                                          s.seed_clearing, s.sellback, !s.no_pev);
              return r.report;
          },
          py::arg("scenario"), "Simulate one day, returning the four-way cost report");
}
