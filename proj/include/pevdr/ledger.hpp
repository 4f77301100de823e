#pragma once

#include <optional>

#include "pevdr/prices.hpp"

namespace pevdr {

// Settlement record for one delivery day. Quantities are kWh, prices $/MWh;
// the kWh -> MWh bridge happens only inside the cost sums.
struct DayLedger {
    HourVector da_purchase{};
    HourVector da_prices{};
    HourVector rt_prices{};
    HourVector realized_demand{};
    HourVector imbalance{};  // realized - purchased, signed
    double da_cost = 0.0;
    double rt_cost = 0.0;
    double total_cost = 0.0;
};

// Table-style comparison across the four operating modes. The PEV columns are
// absent when the scenario has no PEVs.
struct CostReport {
    double ideal = 0.0;
    double real_uncoordinated = 0.0;
    std::optional<double> after_p1;
    std::optional<double> after_p2;
};

// DA settlement plus RT imbalance settlement. With sellback enabled a
// negative imbalance earns revenue at the RT price; disabled, surplus energy
// is stranded (only positive imbalance is billed).
DayLedger settle_day(const HourVector& da_purchase, const HourVector& realized_demand,
                     const HourVector& da_prices, const HourVector& rt_prices,
                     bool sellback_enabled);

// Cost if the DA purchase had matched realized demand exactly.
double ideal_cost(const HourVector& realized_demand, const HourVector& da_prices);

} // namespace pevdr
