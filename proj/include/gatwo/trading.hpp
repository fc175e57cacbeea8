#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "gatwo/error.hpp"
#include "gatwo/market_data.hpp"

namespace gatwo::trading {

struct TradingConfig {
    double initial_cash = 100'000.0;
    double cost_per_transaction = 5.0;
};

enum class Action { Buy, Sell };

struct TradeEvent {
    std::size_t bar = 0;
    Action action = Action::Buy;
    std::int64_t shares = 0;
    double price = 0.0;

    friend bool operator==(const TradeEvent&, const TradeEvent&) = default;
};

struct Position {
    std::int64_t shares = 0;
    double cash = 0.0;
};

struct SimulationResult {
    std::vector<TradeEvent> trades;
    /// Account value (cash + shares * close) after each simulated bar.
    std::vector<double> equity_curve;
    double total_profit = 0.0;
    /// Percent of initial cash.
    double rate_of_return = 0.0;
    /// Percent, <= 0.
    double max_drawdown = 0.0;
    /// True when the last BUY was never sold; it is marked to the final close.
    bool open_position = false;

    /// Fraction of simulated bars on which a trade happened.
    [[nodiscard]] double trade_fraction() const {
        return equity_curve.empty() ? 0.0
                                    : static_cast<double>(trades.size()) /
                                          static_cast<double>(equity_curve.size());
    }
};

inline void check_config(const TradingConfig& config) {
    if (!(config.initial_cash > 0.0))
        throw Error(ErrorKind::InvalidArgument, "initial cash must be > 0");
    if (!(config.cost_per_transaction >= 0.0))
        throw Error(ErrorKind::InvalidArgument, "transaction cost must be >= 0");
}

/// Sale proceeds minus purchase cost over the round trips, minus one
/// transaction cost per BUY and per SELL. A trailing open BUY counts at
/// `mark_price` when given and is otherwise ignored (its cost still counts).
inline double total_profit(std::span<const TradeEvent> trades, const TradingConfig& config,
                           std::optional<double> mark_price = std::nullopt) {
    double profit = 0.0;
    const TradeEvent* open = nullptr;
    for (const TradeEvent& e : trades) {
        if (e.action == Action::Buy) {
            if (open) throw Error(ErrorKind::MalformedLedger, "BUY while already long");
            open = &e;
        } else {
            if (!open) throw Error(ErrorKind::MalformedLedger, "SELL without a position");
            if (e.shares != open->shares)
                throw Error(ErrorKind::MalformedLedger, "SELL size differs from the open BUY");
            profit += static_cast<double>(e.shares) * e.price - static_cast<double>(open->shares) * open->price;
            open = nullptr;
        }
    }
    if (open && mark_price)
        profit += static_cast<double>(open->shares) * (*mark_price - open->price);
    return profit - static_cast<double>(trades.size()) * config.cost_per_transaction;
}

inline double rate_of_return(double total_profit, double invested) {
    return total_profit / invested * 100.0;
}

/// Worst drop from the running peak, in percent (<= 0).
inline double max_drawdown(std::span<const double> equity_curve) {
    if (equity_curve.empty()) throw Error(ErrorKind::EmptyCurve, "equity curve is empty");
    double peak = equity_curve.front();
    double worst = 0.0;
    for (double v : equity_curve) {
        peak = std::max(peak, v);
        worst = std::min(worst, (v / peak - 1.0) * 100.0);
    }
    return worst;
}

/// All-in/all-out long-only simulation. Signal t (1 = up expected) executes
/// at bar t's close: flat + 1 buys as many whole shares as cash allows after
/// the cost, long + 0 sells everything, anything else holds.
inline SimulationResult simulate(const PriceSeries& series, std::span<const int> signals,
                                 const TradingConfig& config) {
    check_config(config);
    if (series.empty()) throw Error(ErrorKind::EmptySeries, "nothing to simulate");
    if (signals.size() != series.size())
        throw Error(ErrorKind::SignalLengthMismatch, std::to_string(signals.size()) + " signals for " +
                                                         std::to_string(series.size()) + " bars");
    SimulationResult result;
    result.equity_curve.reserve(series.size());
    Position pos{0, config.initial_cash};
    const double cost = config.cost_per_transaction;
    for (std::size_t t = 0; t < series.size(); ++t) {
        const double price = series[t].close;
        if (pos.shares == 0 && signals[t] == 1) {
            const auto shares = static_cast<std::int64_t>(std::floor((pos.cash - cost) / price));
            if (shares > 0) {
                pos.cash -= static_cast<double>(shares) * price + cost;
                pos.shares = shares;
                result.trades.push_back({t, Action::Buy, shares, price});
            }
        } else if (pos.shares > 0 && signals[t] == 0) {
            pos.cash += static_cast<double>(pos.shares) * price - cost;
            result.trades.push_back({t, Action::Sell, pos.shares, price});
            pos.shares = 0;
        }
        result.equity_curve.push_back(pos.cash + static_cast<double>(pos.shares) * price);
    }
    result.open_position = pos.shares > 0;
    result.total_profit = total_profit(result.trades, config, series.bars.back().close);
    result.rate_of_return = rate_of_return(result.total_profit, config.initial_cash);
    result.max_drawdown = max_drawdown(result.equity_curve);
    return result;
}

/// Buy at the first close, sell at the last close.
inline SimulationResult buy_and_hold(const PriceSeries& series, const TradingConfig& config) {
    if (series.size() < 2) throw Error(ErrorKind::TooShort, "buy and hold needs at least 2 bars");
    std::vector<int> signals(series.size(), 1);
    signals.back() = 0;
    return simulate(series, signals, config);
}

/// `date,equity` rows for external plotting.
inline void write_equity_csv(const PriceSeries& series, const SimulationResult& result, std::ostream& out) {
    out << "date,equity\n";
    const std::size_t n = std::min(series.size(), result.equity_curve.size());
    for (std::size_t t = 0; t < n; ++t)
        out << format_date(series[t].date) << ',' << format_number(result.equity_curve[t]) << '\n';
}

} // namespace gatwo::trading
