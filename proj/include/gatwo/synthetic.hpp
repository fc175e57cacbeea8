#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

#include "gatwo/market_data.hpp"

namespace gatwo {

/// Parameters of a synthetic series whose next-day direction is driven by
/// RSI(window): below 50 the next close rises, above 50 it falls, and the
/// rule is obeyed with probability `hit_rate`.
struct PlantedSignalConfig {
    std::size_t bars = 1500;
    int window = 11;
    double hit_rate = 0.8;
    double daily_volatility = 0.01;
    double start_price = 100.0;
    std::uint64_t seed = 0;
    std::string symbol = "SYNTH";
};

/// Weekday calendar starting 2000-01-03.
inline PriceSeries planted_signal_series(const PlantedSignalConfig& config) {
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    PriceSeries series{config.symbol, {}};
    series.bars.reserve(config.bars);
    std::chrono::sys_days day = std::chrono::year{2000} / std::chrono::January / 3;
    const auto next_weekday = [&] {
        do {
            day += std::chrono::days{1};
        } while (std::chrono::weekday{day} == std::chrono::Saturday ||
                 std::chrono::weekday{day} == std::chrono::Sunday);
    };

    const auto w = static_cast<std::size_t>(config.window);
    const double vol = config.daily_volatility;
    double close = config.start_price;
    for (std::size_t t = 0; t < config.bars; ++t) {
        double open = close;
        if (t > 0) {
            // Direction of this bar's close relative to the previous close.
            bool up = uniform(rng) < 0.5;
            if (t - 1 >= w) {
                double gain = 0.0;
                double loss = 0.0;
                for (std::size_t s = t - w; s <= t - 1; ++s) {
                    const double change = series.bars[s].close - series.bars[s - 1].close;
                    (change > 0.0 ? gain : loss) += std::abs(change);
                }
                const double rsi = loss == 0.0 ? (gain == 0.0 ? 50.0 : 100.0)
                                               : 100.0 - 100.0 / (1.0 + gain / loss);
                const bool rule = rsi < 50.0;
                up = uniform(rng) < config.hit_rate ? rule : !rule;
            }
            const double move = vol * (0.25 + std::abs(normal(rng)));
            const double prev = close;
            close = prev * (up ? 1.0 + move : 1.0 / (1.0 + move));
            open = prev * (1.0 + 0.25 * vol * normal(rng));
        }
        const double spread_hi = 0.5 * vol * std::abs(normal(rng));
        const double spread_lo = 0.5 * vol * std::abs(normal(rng));
        Bar bar;
        bar.date = std::chrono::year_month_day{day};
        bar.open = open;
        bar.close = close;
        bar.high = std::max(open, close) * (1.0 + spread_hi);
        bar.low = std::min(open, close) / (1.0 + spread_lo);
        bar.volume = std::round(100'000.0 + 900'000.0 * uniform(rng));
        series.bars.push_back(bar);
        next_weekday();
    }
    return series;
}

} // namespace gatwo
