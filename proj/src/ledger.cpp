#include "pevdr/ledger.hpp"

#include <algorithm>

#include "pevdr/errors.hpp"

namespace pevdr {

DayLedger settle_day(const HourVector& da_purchase, const HourVector& realized_demand,
                     const HourVector& da_prices, const HourVector& rt_prices,
                     bool sellback_enabled) {
    DayLedger ledger;
    ledger.da_purchase = da_purchase;
    ledger.da_prices = da_prices;
    ledger.rt_prices = rt_prices;
    ledger.realized_demand = realized_demand;

    double da_cost = 0.0;
    double rt_cost = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h) {
        const auto i = static_cast<std::size_t>(h);
        const double imb = realized_demand[i] - da_purchase[i];
        ledger.imbalance[i] = imb;
        da_cost += da_prices[i] * da_purchase[i] / 1000.0;
        const double settled = sellback_enabled ? imb : std::max(imb, 0.0);
        rt_cost += rt_prices[i] * settled / 1000.0;
    }
    ledger.da_cost = da_cost;
    ledger.rt_cost = rt_cost;
    ledger.total_cost = da_cost + rt_cost;
    return ledger;
}

double ideal_cost(const HourVector& realized_demand, const HourVector& da_prices) {
    double cost = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h) {
        const auto i = static_cast<std::size_t>(h);
        cost += da_prices[i] * realized_demand[i] / 1000.0;
    }
    return cost;
}

} // namespace pevdr
