#include "pevdr/coordinator.hpp"

#include <cmath>
#include <string>

#include "pevdr/errors.hpp"

namespace pevdr {

namespace {

double mse_between(const HourVector& a, const HourVector& b) {
    double sum = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h) {
        const double d = a[static_cast<std::size_t>(h)] - b[static_cast<std::size_t>(h)];
        sum += d * d;
    }
    return sum / static_cast<double>(kHoursPerDay);
}

bool improves(double fresh, double incumbent) {
    return fresh < incumbent - 1e-12 * (1.0 + std::fabs(incumbent));
}

// Quadratic tracking error of the aggregate against the DA purchase, up to a
// constant. The retailer can evaluate this from aggregates alone.
double tracking_potential(const HourVector& aggregate, const HourVector& target) {
    double p = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h) {
        const auto i = static_cast<std::size_t>(h);
        p += aggregate[i] * (aggregate[i] - 2.0 * target[i]);
    }
    return p;
}

} // namespace

FleetState FleetState::initialize(std::vector<User> users, bool with_pev_schedules) {
    FleetState state;
    state.users_ = std::move(users);
    state.schedules_.resize(state.users_.size());
    if (with_pev_schedules) {
        for (std::size_t n = 0; n < state.users_.size(); ++n) {
            state.schedules_[n] = plug_and_charge(state.users_[n].pev);
        }
    }
    state.aggregate_ = state.recompute_aggregate();
    return state;
}

HourVector FleetState::footprint(std::size_t n) const {
    HourVector out{};
    for (int h = 0; h < kHoursPerDay; ++h) {
        const auto i = static_cast<std::size_t>(h);
        out[i] = users_[n].home.baseline[i] + schedules_[n].slots[i];
    }
    return out;
}

void FleetState::set_schedule(std::size_t n, const ScheduleVector& schedule) {
    for (int h = 0; h < kHoursPerDay; ++h) {
        const auto i = static_cast<std::size_t>(h);
        aggregate_[i] += schedule.slots[i] - schedules_[n].slots[i];
    }
    schedules_[n] = schedule;
}

HourVector FleetState::recompute_aggregate() const {
    HourVector out{};
    for (std::size_t n = 0; n < users_.size(); ++n) {
        for (int h = 0; h < kHoursPerDay; ++h) {
            const auto i = static_cast<std::size_t>(h);
            out[i] += users_[n].home.baseline[i] + schedules_[n].slots[i];
        }
    }
    return out;
}

HourVector retailer_signal(const HourVector& aggregate, const HourVector& user_footprint,
                           const HourVector& target_da) {
    HourVector signal{};
    for (int h = 0; h < kHoursPerDay; ++h) {
        const auto i = static_cast<std::size_t>(h);
        signal[i] = aggregate[i] - user_footprint[i] - target_da[i];
    }
    return signal;
}

ScheduleVector plug_and_charge(const PevProfile& profile) {
    ScheduleVector schedule;
    double remaining = profile.energy_need;
    for (int h : permissible_slots(profile)) {
        if (remaining <= 0.0) break;
        const double amount = std::min(profile.power_limit, remaining);
        schedule.slots[static_cast<std::size_t>(h - 1)] = amount;
        remaining -= amount;
    }
    return schedule;
}

SweepLog offline_shape(FleetState& fleet, const HourVector& target_da, const AlgoConfig& cfg,
                       const AggregateObserver& observer) {
    SweepLog log;
    HourVector previous = fleet.aggregate();

    for (int sweep = 0; sweep < cfg.convergence.max_sweeps; ++sweep) {
        // One sweep keeps passing over the fleet until a full pass lands no
        // proposal, so a converged sweep leaves nothing for the next one.
        constexpr int kMaxPasses = 50;
        for (int pass = 0; pass < kMaxPasses; ++pass) {
            bool any_accepted = false;
            for (std::size_t n = 0; n < fleet.size(); ++n) {
                // Protocol boundary: the retailer computes l_-n - l^d from
                // aggregates only; the user folds in its own baseline.
                const HourVector signal =
                    retailer_signal(fleet.aggregate(), fleet.footprint(n), target_da);

                ShapingInput input;
                input.target_da = HourVector{};  // already folded into the signal
                input.others_aggregate = signal;
                input.own_baseline = fleet.users()[n].home.baseline;
                input.profile = fleet.users()[n].pev;
                input.v2g_enabled = cfg.v2g_enabled;
                input.soc_floor_fraction = cfg.soc_floor_fraction;

                ScheduleVector fresh;
                try {
                    fresh = solve_shaping(input);
                } catch (const InfeasibleError& e) {
                    throw InfeasibleError("offline_shape: user " + std::to_string(n) + ": " + e.what());
                }
                const double incumbent = shaping_objective(input, fleet.schedule(n));
                if (improves(shaping_objective(input, fresh), incumbent)) {
                    // Retailer-side guard: a proposal only lands if it also
                    // lowers the aggregate tracking error, so full-power best
                    // responses cannot overshoot the target and oscillate.
                    HourVector candidate = fleet.aggregate();
                    for (int h = 0; h < kHoursPerDay; ++h) {
                        const auto i = static_cast<std::size_t>(h);
                        candidate[i] += fresh.slots[i] - fleet.schedule(n).slots[i];
                    }
                    if (improves(tracking_potential(candidate, target_da),
                                 tracking_potential(fleet.aggregate(), target_da))) {
                        fleet.set_schedule(n, fresh);
                        any_accepted = true;
                    }
                }
                if (observer) observer(fleet.aggregate());
            }
            if (!any_accepted) break;
        }
        const double mse = mse_between(fleet.aggregate(), previous);
        log.mse.push_back(mse);
        if (mse < cfg.convergence.mse_tolerance) break;
        previous = fleet.aggregate();
    }
    return log;
}

OnlineEvent online_step(FleetState& fleet, const DayPrices& day, const HourlyStd& sigma,
                        const HourVector& target_da, int t0, const AlgoConfig& cfg,
                        const AggregateObserver& observer) {
    OnlineEvent event;
    event.t0 = t0;
    event.rt_price = day.rt[static_cast<std::size_t>(t0 - 1)];
    event.gamma = threshold_gamma(day, sigma, cfg.threshold, t0,
                                  std::span<const double>(day.rt.data(), static_cast<std::size_t>(t0)));

    const double eps = cfg.threshold.deadband_epsilon;
    if (std::fabs(event.rt_price - event.gamma) <= eps) return event;
    event.b_sign = (event.rt_price > event.gamma) ? +1 : -1;

    // At lambda = 1 the altering weight on the instantaneous term vanishes
    // and the profile is left as shaped.
    if (cfg.lambda >= 1.0) return event;

    HourVector previous = fleet.aggregate();
    for (int sweep = 0; sweep < cfg.convergence.max_sweeps; ++sweep) {
        bool any_accepted = false;
        for (std::size_t n = 0; n < fleet.size(); ++n) {
            // Only users whose PEV is still connected at or after t0 can act.
            bool connected = false;
            for (int h : permissible_slots(fleet.users()[n].pev)) {
                if (h >= t0) { connected = true; break; }
            }
            if (!connected) continue;

            const HourVector signal = retailer_signal(fleet.aggregate(), fleet.footprint(n), target_da);

            AlteringInput input;
            input.shaping.target_da = HourVector{};
            input.shaping.others_aggregate = signal;
            input.shaping.own_baseline = fleet.users()[n].home.baseline;
            input.shaping.profile = fleet.users()[n].pev;
            input.shaping.v2g_enabled = cfg.v2g_enabled;
            input.shaping.soc_floor_fraction = cfg.soc_floor_fraction;
            input.t0 = t0;
            input.committed = fleet.schedule(n);
            input.lambda = cfg.lambda;
            input.b_sign = event.b_sign;
            input.b_scope = cfg.b_scope;

            ScheduleVector fresh;
            try {
                fresh = solve_altering(input);
            } catch (const InfeasibleError&) {
                continue;  // keep the previous feasible schedule for this slot
            }
            const double incumbent = altering_objective(input, fleet.schedule(n));
            if (improves(altering_objective(input, fresh), incumbent)) {
                // Retailer-side guard: score the proposal with a fleet-level
                // blend of tracking error and the signed slot-t0 push. The
                // quadratic term caps how far a proposal may distort other
                // hours per kWh it moves at t0, which keeps the full-bracket
                // b = -1 responses from thrashing the profile.
                const auto t0_i = static_cast<std::size_t>(t0 - 1);
                const double push =
                    6.0 * fleet.users()[n].pev.power_limit * static_cast<double>(event.b_sign);
                HourVector candidate = fleet.aggregate();
                for (int h = 0; h < kHoursPerDay; ++h) {
                    const auto i = static_cast<std::size_t>(h);
                    candidate[i] += fresh.slots[i] - fleet.schedule(n).slots[i];
                }
                const double before = cfg.lambda * tracking_potential(fleet.aggregate(), target_da) +
                                      (1.0 - cfg.lambda) * push * fleet.aggregate()[t0_i];
                const double after = cfg.lambda * tracking_potential(candidate, target_da) +
                                     (1.0 - cfg.lambda) * push * candidate[t0_i];
                if (improves(after, before)) {
                    fleet.set_schedule(n, fresh);
                    any_accepted = true;
                }
            }
            if (observer) observer(fleet.aggregate());
        }
        event.sweeps_run = sweep + 1;
        if (!any_accepted) break;
        const double mse = mse_between(fleet.aggregate(), previous);
        if (mse < cfg.convergence.mse_tolerance) break;
        previous = fleet.aggregate();
    }
    return event;
}

DayResult run_day(std::vector<User> users, const DayPrices& day, const HourlyStd& sigma,
                  const AlgoConfig& cfg, std::uint64_t clearing_seed, bool sellback_enabled,
                  bool pevs_present) {
    DayResult result;
    FleetState fleet = FleetState::initialize(std::move(users), pevs_present);

    result.uncoordinated = fleet.aggregate();
    result.da_purchase = clear_da_demand(result.uncoordinated, clearing_seed);

    if (pevs_present && fleet.size() > 0) {
        result.offline_log = offline_shape(fleet, result.da_purchase, cfg);
        result.after_p1 = fleet.aggregate();
        for (int t = 1; t <= kHoursPerDay; ++t) {
            result.events.push_back(online_step(fleet, day, sigma, result.da_purchase, t, cfg));
        }
        result.after_p2 = fleet.aggregate();
    } else {
        result.after_p1 = result.uncoordinated;
        result.after_p2 = result.uncoordinated;
    }

    result.ledger = settle_day(result.da_purchase, result.after_p2, day.da, day.rt, sellback_enabled);

    // The ideal column is the perfect-bidding benchmark: the day-ahead
    // purchase exactly matches the demand the fleet ends up realizing, so
    // there is no real-time settlement at all.
    result.report.ideal = ideal_cost(result.after_p2, day.da);
    result.report.real_uncoordinated =
        settle_day(result.da_purchase, result.uncoordinated, day.da, day.rt, sellback_enabled).total_cost;
    if (pevs_present && fleet.size() > 0) {
        result.report.after_p1 =
            settle_day(result.da_purchase, result.after_p1, day.da, day.rt, sellback_enabled).total_cost;
        result.report.after_p2 = result.ledger.total_cost;
    }
    return result;
}

HorizonReport run_horizon(const std::function<std::vector<User>(int)>& fleet_for_day,
                          const PriceMatrix& da, const PriceMatrix& rt, const AlgoConfig& cfg,
                          std::uint64_t clearing_seed, bool sellback_enabled, bool pevs_present,
                          std::vector<DayResult>* day_results) {
    if (da.days() != rt.days()) {
        throw ContractError("run_horizon: DA and RT matrices must cover the same days");
    }
    if (da.days() < 1) throw ContractError("run_horizon: no price days");

    const HourlyStd sigma = hourly_std(rt);
    HorizonReport report;
    report.totals.after_p1 = pevs_present ? std::optional<double>(0.0) : std::nullopt;
    report.totals.after_p2 = pevs_present ? std::optional<double>(0.0) : std::nullopt;

    for (int d = 0; d < da.days(); ++d) {
        DayPrices day;
        day.da = da.values[static_cast<std::size_t>(d)];
        day.rt = rt.values[static_cast<std::size_t>(d)];
        // First day has no realized RT history; its own DA prices stand in.
        day.rt_prev_day = (d > 0) ? rt.values[static_cast<std::size_t>(d - 1)] : day.da;

        DayResult result;
        try {
            result = run_day(fleet_for_day(d), day, sigma, cfg,
                             clearing_seed + static_cast<std::uint64_t>(d), sellback_enabled,
                             pevs_present);
        } catch (const std::runtime_error& e) {
            throw ContractError("run_horizon: day " + std::to_string(d) + " failed: " + e.what());
        }

        report.daily.push_back(result.report);
        report.totals.ideal += result.report.ideal;
        report.totals.real_uncoordinated += result.report.real_uncoordinated;
        if (report.totals.after_p1 && result.report.after_p1) *report.totals.after_p1 += *result.report.after_p1;
        if (report.totals.after_p2 && result.report.after_p2) *report.totals.after_p2 += *result.report.after_p2;
        if (day_results != nullptr) day_results->push_back(std::move(result));
    }
    return report;
}

} // namespace pevdr
