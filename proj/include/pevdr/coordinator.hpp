#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pevdr/fleet.hpp"
#include "pevdr/ledger.hpp"
#include "pevdr/prices.hpp"
#include "pevdr/solver.hpp"

namespace pevdr {

struct ConvergenceConfig {
    int max_sweeps = 5;
    double mse_tolerance = 1e-6;  // (kWh)^2 per slot between consecutive sweeps
};

struct AlgoConfig {
    double lambda = 0.5;
    ThresholdConfig threshold;
    BScope b_scope = BScope::Full;
    bool v2g_enabled = true;
    double soc_floor_fraction = 0.2;
    ConvergenceConfig convergence;
};

// Fleet plus live schedules with an incrementally maintained aggregate.
class FleetState {
public:
    FleetState() = default;

    // Every PEV starts with the uncoordinated plug-and-charge profile.
    static FleetState initialize(std::vector<User> users, bool with_pev_schedules = true);

    std::size_t size() const { return users_.size(); }
    const std::vector<User>& users() const { return users_; }
    const ScheduleVector& schedule(std::size_t n) const { return schedules_[n]; }
    const HourVector& aggregate() const { return aggregate_; }

    // Baseline plus PEV schedule for one user.
    HourVector footprint(std::size_t n) const;

    void set_schedule(std::size_t n, const ScheduleVector& schedule);

    // Full recomputation, used to validate the incremental cache.
    HourVector recompute_aggregate() const;

private:
    std::vector<User> users_;
    std::vector<ScheduleVector> schedules_;
    HourVector aggregate_{};
};

// Retailer-side state computation. Deliberately takes and returns only
// 24-vectors: nothing user-private crosses this call.
HourVector retailer_signal(const HourVector& aggregate, const HourVector& user_footprint,
                           const HourVector& target_da);

// Uncoordinated baseline behaviour: charge at full power from arrival until
// the energy need is met.
ScheduleVector plug_and_charge(const PevProfile& profile);

struct SweepLog {
    std::vector<double> mse;  // one entry per completed sweep
};

struct OnlineEvent {
    int t0 = 0;
    double rt_price = 0.0;
    double gamma = 0.0;
    int b_sign = 0;  // 0 when the price stayed inside the dead-band
    int sweeps_run = 0;
};

using AggregateObserver = std::function<void(const HourVector&)>;

// Gauss-Seidel shaping sweeps until the aggregate MSE between consecutive
// sweeps drops below tolerance or max_sweeps is hit. The observer, when set,
// sees the aggregate after every single user update.
SweepLog offline_shape(FleetState& fleet, const HourVector& target_da, const AlgoConfig& cfg,
                       const AggregateObserver& observer = {});

// One slot of the online phase: threshold check, then altering sweeps over
// users still connected at or after t0. Slots before t0 are never touched.
OnlineEvent online_step(FleetState& fleet, const DayPrices& day, const HourlyStd& sigma,
                        const HourVector& target_da, int t0, const AlgoConfig& cfg,
                        const AggregateObserver& observer = {});

struct DayResult {
    HourVector uncoordinated{};
    HourVector after_p1{};
    HourVector after_p2{};
    HourVector da_purchase{};
    DayLedger ledger;  // settlement of the fully coordinated day
    CostReport report;
    std::vector<OnlineEvent> events;
    SweepLog offline_log;
};

// Full Algorithm-1 day: uncoordinated profile, DA clearing, offline shaping,
// then the online pass over all 24 slots, with the four-way cost comparison
// computed from identical seeds.
DayResult run_day(std::vector<User> users, const DayPrices& day, const HourlyStd& sigma,
                  const AlgoConfig& cfg, std::uint64_t clearing_seed, bool sellback_enabled,
                  bool pevs_present = true);

struct HorizonReport {
    std::vector<CostReport> daily;
    CostReport totals;
};

// Runs run_day over every row of the price matrices (which must have equal
// day counts). fleet_for_day supplies the user population per day index.
HorizonReport run_horizon(const std::function<std::vector<User>(int)>& fleet_for_day,
                          const PriceMatrix& da, const PriceMatrix& rt, const AlgoConfig& cfg,
                          std::uint64_t clearing_seed, bool sellback_enabled,
                          bool pevs_present = true, std::vector<DayResult>* day_results = nullptr);

} // namespace pevdr
