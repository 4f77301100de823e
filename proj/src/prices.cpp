#include "pevdr/prices.hpp"

#include <cmath>
#include <string>

#include "pevdr/csv.hpp"
#include "pevdr/errors.hpp"
#include "pevdr/rng.hpp"

namespace pevdr {

PriceMatrix load_price_matrix(std::istream& source, MarketKind kind) {
    const auto lines = csv::read_lines(source);
    if (lines.empty()) throw ParseError("price data: empty stream");

    PriceMatrix matrix;
    matrix.kind = kind;

    std::size_t first = 0;
    {
        const auto fields = csv::split_fields(lines[0]);
        if (!fields.empty() && !csv::parse_number(fields[0]).has_value()) first = 1; // header row
    }
    if (first >= lines.size()) throw ParseError("price data: header only, no data rows");

    for (std::size_t row = first; row < lines.size(); ++row) {
        const auto fields = csv::split_fields(lines[row]);
        if (fields.size() != kHoursPerDay) {
            throw ParseError("price data: row " + std::to_string(row + 1) + " has " +
                             std::to_string(fields.size()) + " fields, expected 24");
        }
        HourVector day{};
        for (int h = 0; h < kHoursPerDay; ++h) {
            const auto v = csv::parse_number(fields[static_cast<std::size_t>(h)]);
            if (!v.has_value() || !std::isfinite(*v)) {
                throw ParseError("price data: row " + std::to_string(row + 1) + ", field " +
                                 std::to_string(h + 1) + " is not a finite number");
            }
            day[static_cast<std::size_t>(h)] = *v;
        }
        matrix.values.push_back(day);
    }
    return matrix;
}

HourlyStd hourly_std(const PriceMatrix& matrix) {
    if (matrix.days() < 1) throw ContractError("hourly_std: matrix has no rows");
    const double d = static_cast<double>(matrix.days());
    HourlyStd out;
    for (int h = 0; h < kHoursPerDay; ++h) {
        double mean = 0.0;
        for (const auto& row : matrix.values) mean += row[static_cast<std::size_t>(h)];
        mean /= d;
        double ss = 0.0;
        for (const auto& row : matrix.values) {
            const double dev = row[static_cast<std::size_t>(h)] - mean;
            ss += dev * dev;
        }
        out.sigma[static_cast<std::size_t>(h)] = std::sqrt(ss / d);
    }
    return out;
}

int wrap_hour(int i) {
    int m = (i - 1) % kHoursPerDay;
    if (m < 0) m += kHoursPerDay;
    return m + 1;
}

double threshold_gamma(const DayPrices& day, const HourlyStd& sigma, const ThresholdConfig& cfg,
                       int t, std::span<const double> observed_rt) {
    if (t < 1 || t > kHoursPerDay) throw ContractError("threshold_gamma: t out of 1..24");
    if (cfg.window_k < 1 || cfg.window_k > 23) throw ContractError("threshold_gamma: window_k out of 1..23");
    if (observed_rt.size() < static_cast<std::size_t>(t)) {
        throw ContractError("threshold_gamma: observed_rt must cover hours 1..t");
    }

    const int anchor = wrap_hour(t - cfg.window_k);
    const double sigma0 = sigma.sigma[static_cast<std::size_t>(anchor - 1)];
    if (sigma0 <= 0.0) {
        throw ContractError("threshold_gamma: sigma(" + std::to_string(anchor) +
                            ") is zero, weights cannot normalize");
    }

    double sum = 0.0;
    for (int i = t - cfg.window_k; i <= t; ++i) {
        const int hour = wrap_hour(i);
        const double w = sigma.sigma[static_cast<std::size_t>(hour - 1)] / sigma0;
        const double price = (i >= 1) ? observed_rt[static_cast<std::size_t>(i - 1)]
                                      : day.rt_prev_day[static_cast<std::size_t>(hour - 1)];
        sum += w * price;
    }
    return sum / static_cast<double>(cfg.window_k);
}

HourVector clear_da_demand(const HourVector& required, std::uint64_t rng_seed) {
    for (double r : required) {
        if (r < 0.0) throw ContractError("clear_da_demand: required demand must be non-negative");
    }
    Rng rng(rng_seed);
    HourVector cleared{};
    for (int h = 0; h < kHoursPerDay; ++h) {
        const double r = required[static_cast<std::size_t>(h)];
        const double u = rng.uniform(-0.2 * r, 0.2 * r);
        cleared[static_cast<std::size_t>(h)] = r + u;
    }
    return cleared;
}

} // namespace pevdr
