#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <span>
#include <vector>

namespace pevdr {

inline constexpr int kHoursPerDay = 24;

using HourVector = std::array<double, kHoursPerDay>;

enum class MarketKind { DayAhead, RealTime };

// Hourly price grid for one market: one row per day, 24 columns ($/MWh).
// Negative prices are legal; every entry must be finite.
struct PriceMatrix {
    MarketKind kind = MarketKind::DayAhead;
    std::vector<HourVector> values;

    int days() const { return static_cast<int>(values.size()); }
    double at(int day, int hour) const { return values[static_cast<std::size_t>(day)][static_cast<std::size_t>(hour - 1)]; }
};

// Per-hour-of-day price standard deviation across the year.
struct HourlyStd {
    HourVector sigma{};
};

// One simulation day's prices. rt_prev_day supplies the hours the altering
// threshold needs when its window wraps past midnight.
struct DayPrices {
    HourVector da{};
    HourVector rt{};
    HourVector rt_prev_day{};
};

struct ThresholdConfig {
    int window_k = 3;               // window covers K+1 slots
    double deadband_epsilon = 0.0;  // trigger only when |p - gamma| > epsilon
};

// Parses rows of 24 comma-separated prices, one day per row. A single leading
// header row (non-numeric first field) is skipped. Throws ParseError naming
// the offending row on malformed input or an empty stream.
PriceMatrix load_price_matrix(std::istream& source, MarketKind kind);

// Population (1/D) standard deviation of each hour-of-day column.
HourlyStd hourly_std(const PriceMatrix& matrix);

// Maps any signed slot index onto 1..24 (mathematical modulo, 0 -> 24).
int wrap_hour(int i);

// Weighted moving-average threshold over the K+1 slots ending at t. Weights
// are sigma(hour)/sigma(hour at t-K). Window hours at or before slot 0 read
// from day.rt_prev_day; current-day hours read from observed_rt (which must
// cover hours 1..t). Throws ContractError when the normalizing sigma is zero.
double threshold_gamma(const DayPrices& day, const HourlyStd& sigma, const ThresholdConfig& cfg,
                       int t, std::span<const double> observed_rt);

// Cleared day-ahead purchase: required demand plus i.i.d. uniform noise on
// [-0.2*required, 0.2*required) per slot. Deterministic for a given seed.
HourVector clear_da_demand(const HourVector& required, std::uint64_t rng_seed);

} // namespace pevdr
