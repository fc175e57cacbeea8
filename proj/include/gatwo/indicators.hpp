#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gatwo/error.hpp"
#include "gatwo/market_data.hpp"
#include "gatwo/matrix.hpp"

namespace gatwo {

enum class IndicatorId { Stk, Std, Rsi, Psy, WmaBias, Cci, PlusDi, MinusDi, Adx, AroonUp };

inline constexpr std::array<IndicatorId, 10> kAllIndicators{
    IndicatorId::Stk,     IndicatorId::Std,     IndicatorId::Rsi,    IndicatorId::Psy,
    IndicatorId::WmaBias, IndicatorId::Cci,     IndicatorId::PlusDi, IndicatorId::MinusDi,
    IndicatorId::Adx,     IndicatorId::AroonUp,
};

constexpr std::string_view to_string(IndicatorId id) noexcept {
    switch (id) {
    case IndicatorId::Stk: return "STK";
    case IndicatorId::Std: return "STD";
    case IndicatorId::Rsi: return "RSI";
    case IndicatorId::Psy: return "PSY";
    case IndicatorId::WmaBias: return "WMA_BIAS";
    case IndicatorId::Cci: return "CCI";
    case IndicatorId::PlusDi: return "PLUS_DI";
    case IndicatorId::MinusDi: return "MINUS_DI";
    case IndicatorId::Adx: return "ADX";
    case IndicatorId::AroonUp: return "AROON_UP";
    }
    return "?";
}

inline std::optional<IndicatorId> parse_indicator(std::string_view name) {
    for (IndicatorId id : kAllIndicators)
        if (to_string(id) == name) return id;
    return std::nullopt;
}

/// An indicator and its time window. `k_window` is only read by STD: it is
/// the lookback of the %K series that STD averages.
struct IndicatorSpec {
    IndicatorId id = IndicatorId::Stk;
    int window = 1;
    int k_window = 9;

    friend bool operator==(const IndicatorSpec&, const IndicatorSpec&) = default;
};

/// Index of the first bar at which the indicator is defined. Every window
/// ends at and includes bar t.
constexpr std::size_t warmup(const IndicatorSpec& spec) noexcept {
    const auto n = static_cast<std::size_t>(spec.window);
    switch (spec.id) {
    case IndicatorId::Stk:
    case IndicatorId::WmaBias:
    case IndicatorId::Cci:
        return n - 1;
    case IndicatorId::Std:
        return static_cast<std::size_t>(spec.k_window) - 1 + n - 1;
    case IndicatorId::Rsi:
    case IndicatorId::Psy:
    case IndicatorId::PlusDi:
    case IndicatorId::MinusDi:
    case IndicatorId::AroonUp:
        return n;
    case IndicatorId::Adx:
        return 2 * n - 1;
    }
    return n;
}

struct IndicatorColumn {
    IndicatorSpec spec;
    std::vector<std::optional<double>> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

namespace detail {

inline void check_window(const PriceSeries& series, const IndicatorSpec& spec) {
    if (spec.window < 1 || (spec.id == IndicatorId::Std && spec.k_window < 1))
        throw Error(ErrorKind::InvalidArgument,
                    std::string(to_string(spec.id)) + " window must be >= 1");
    if (warmup(spec) >= series.size())
        throw Error(ErrorKind::WindowTooLargeForSeries,
                    std::string(to_string(spec.id)) + "(" + std::to_string(spec.window) +
                        ") needs more than " + std::to_string(series.size()) + " bars");
}

/// Zero-denominator rule shared by every ratio-style indicator.
inline double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

} // namespace detail

/// Stochastic %K: position of the close inside the n-bar high/low range, 0..100.
inline IndicatorColumn stochastic_k(const PriceSeries& series, int n) {
    const IndicatorSpec spec{IndicatorId::Stk, n};
    detail::check_window(series, spec);
    const auto w = static_cast<std::size_t>(n);
    IndicatorColumn col{spec, std::vector<std::optional<double>>(series.size())};
    std::deque<std::size_t> highs;
    std::deque<std::size_t> lows;
    for (std::size_t t = 0; t < series.size(); ++t) {
        while (!highs.empty() && series[highs.back()].high <= series[t].high) highs.pop_back();
        highs.push_back(t);
        while (!lows.empty() && series[lows.back()].low >= series[t].low) lows.pop_back();
        lows.push_back(t);
        if (highs.front() + w <= t) highs.pop_front();
        if (lows.front() + w <= t) lows.pop_front();
        if (t + 1 >= w) {
            const double hh = series[highs.front()].high;
            const double ll = series[lows.front()].low;
            col.values[t] = detail::safe_ratio(series[t].close - ll, hh - ll) * 100.0;
        }
    }
    return col;
}

/// Stochastic %D: n-value simple moving average of a %K column.
inline IndicatorColumn stochastic_d(const IndicatorColumn& stk, int n) {
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "STD window must be >= 1");
    const IndicatorSpec spec{IndicatorId::Std, n, stk.spec.window};
    const auto w = static_cast<std::size_t>(n);
    IndicatorColumn col{spec, std::vector<std::optional<double>>(stk.size())};
    bool any = false;
    for (std::size_t t = 0; t < stk.size(); ++t) {
        if (t + 1 < w) continue;
        double sum = 0.0;
        bool complete = true;
        for (std::size_t i = t + 1 - w; i <= t && complete; ++i) {
            if (!stk.values[i]) complete = false;
            else sum += *stk.values[i];
        }
        if (complete) {
            col.values[t] = sum / static_cast<double>(w);
            any = true;
        }
    }
    if (!any)
        throw Error(ErrorKind::WindowTooLargeForSeries,
                    "STD(" + std::to_string(n) + ") has no complete %K window");
    return col;
}

/// RSI from close-to-close changes over the last n periods.
inline IndicatorColumn rsi(const PriceSeries& series, int n) {
    const IndicatorSpec spec{IndicatorId::Rsi, n};
    detail::check_window(series, spec);
    const auto w = static_cast<std::size_t>(n);
    IndicatorColumn col{spec, std::vector<std::optional<double>>(series.size())};
    for (std::size_t t = w; t < series.size(); ++t) {
        double up = 0.0;
        double down = 0.0;
        for (std::size_t s = t + 1 - w; s <= t; ++s) {
            const double change = series[s].close - series[s - 1].close;
            if (change > 0.0) up += change;
            else down -= change;
        }
        if (down == 0.0) col.values[t] = up == 0.0 ? 50.0 : 100.0;
        else col.values[t] = 100.0 - 100.0 / (1.0 + up / down);
    }
    return col;
}

/// Psychological line: percentage of the last n periods that closed strictly higher.
inline IndicatorColumn psy(const PriceSeries& series, int n) {
    const IndicatorSpec spec{IndicatorId::Psy, n};
    detail::check_window(series, spec);
    const auto w = static_cast<std::size_t>(n);
    IndicatorColumn col{spec, std::vector<std::optional<double>>(series.size())};
    std::size_t rising = 0;
    for (std::size_t t = 1; t < series.size(); ++t) {
        if (series[t].close > series[t - 1].close) ++rising;
        if (t > w && series[t - w].close > series[t - w - 1].close) --rising;
        if (t >= w) col.values[t] = static_cast<double>(rising) / static_cast<double>(w) * 100.0;
    }
    return col;
}

/// Close minus its linearly weighted moving average (weights n..1, newest heaviest).
inline IndicatorColumn wma_bias(const PriceSeries& series, int n) {
    const IndicatorSpec spec{IndicatorId::WmaBias, n};
    detail::check_window(series, spec);
    const auto w = static_cast<std::size_t>(n);
    const double norm = static_cast<double>(w) * static_cast<double>(w + 1) / 2.0;
    IndicatorColumn col{spec, std::vector<std::optional<double>>(series.size())};
    for (std::size_t t = w - 1; t < series.size(); ++t) {
        double weighted = 0.0;
        for (std::size_t lag = 0; lag < w; ++lag)
            weighted += static_cast<double>(w - lag) * series[t - lag].close;
        col.values[t] = series[t].close - weighted / norm;
    }
    return col;
}

/// Commodity channel index on the typical price (H + L + C) / 3.
inline IndicatorColumn cci(const PriceSeries& series, int n) {
    const IndicatorSpec spec{IndicatorId::Cci, n};
    detail::check_window(series, spec);
    const auto w = static_cast<std::size_t>(n);
    std::vector<double> typical(series.size());
    for (std::size_t t = 0; t < series.size(); ++t)
        typical[t] = (series[t].high + series[t].low + series[t].close) / 3.0;
    IndicatorColumn col{spec, std::vector<std::optional<double>>(series.size())};
    for (std::size_t t = w - 1; t < series.size(); ++t) {
        const std::span<const double> window(typical.data() + t + 1 - w, w);
        double mean = 0.0;
        for (double m : window) mean += m;
        mean /= static_cast<double>(w);
        double deviation = 0.0;
        for (double m : window) deviation += std::abs(m - mean);
        deviation /= static_cast<double>(w);
        col.values[t] = detail::safe_ratio(typical[t] - mean, 0.015 * deviation);
    }
    return col;
}

/// Per-bar +DM, -DM and true range; undefined at bar 0.
struct DirectionalMovement {
    std::vector<std::optional<double>> plus_dm;
    std::vector<std::optional<double>> minus_dm;
    std::vector<std::optional<double>> true_range;
};

inline DirectionalMovement directional_movement(const PriceSeries& series) {
    if (series.size() < 2)
        throw Error(ErrorKind::TooShort, "directional movement needs at least 2 bars");
    const std::size_t size = series.size();
    DirectionalMovement dm{std::vector<std::optional<double>>(size),
                           std::vector<std::optional<double>>(size),
                           std::vector<std::optional<double>>(size)};
    for (std::size_t t = 1; t < size; ++t) {
        const Bar& cur = series[t];
        const Bar& prev = series[t - 1];
        dm.plus_dm[t] = std::max(cur.high - prev.high, 0.0);
        dm.minus_dm[t] = std::max(prev.low - cur.low, 0.0);
        dm.true_range[t] = std::max({cur.high - cur.low, std::abs(cur.high - prev.close),
                                     std::abs(cur.low - prev.close)});
    }
    return dm;
}

enum class DiSign { Plus, Minus };

namespace detail {

inline std::vector<std::optional<double>> di_values(const DirectionalMovement& dm, std::size_t w,
                                                    DiSign sign) {
    const auto& moves = sign == DiSign::Plus ? dm.plus_dm : dm.minus_dm;
    std::vector<std::optional<double>> out(moves.size());
    for (std::size_t t = w; t < moves.size(); ++t) {
        double move_sum = 0.0;
        double range_sum = 0.0;
        for (std::size_t s = t + 1 - w; s <= t; ++s) {
            move_sum += *moves[s];
            range_sum += *dm.true_range[s];
        }
        out[t] = safe_ratio(move_sum, range_sum) * 100.0;
    }
    return out;
}

} // namespace detail

/// Directional indicator: windowed sum of +DM (or -DM) over windowed sum of TR, x100.
inline IndicatorColumn di(const PriceSeries& series, int n, DiSign sign) {
    const IndicatorSpec spec{sign == DiSign::Plus ? IndicatorId::PlusDi : IndicatorId::MinusDi, n};
    detail::check_window(series, spec);
    return IndicatorColumn{
        spec, detail::di_values(directional_movement(series), static_cast<std::size_t>(n), sign)};
}

/// ADX: n-bar simple average of DX = |+DI - -DI| / (+DI + -DI) x100, with DI at window n.
inline IndicatorColumn adx(const PriceSeries& series, int n) {
    const IndicatorSpec spec{IndicatorId::Adx, n};
    detail::check_window(series, spec);
    const auto w = static_cast<std::size_t>(n);
    const auto dm = directional_movement(series);
    const auto plus = detail::di_values(dm, w, DiSign::Plus);
    const auto minus = detail::di_values(dm, w, DiSign::Minus);
    std::vector<double> dx(series.size(), 0.0);
    for (std::size_t t = w; t < series.size(); ++t)
        dx[t] = detail::safe_ratio(std::abs(*plus[t] - *minus[t]), *plus[t] + *minus[t]) * 100.0;
    IndicatorColumn col{spec, std::vector<std::optional<double>>(series.size())};
    for (std::size_t t = 2 * w - 1; t < series.size(); ++t) {
        double sum = 0.0;
        for (std::size_t s = t + 1 - w; s <= t; ++s) sum += dx[s];
        col.values[t] = sum / static_cast<double>(w);
    }
    return col;
}

/// Aroon Up over the n + 1 bars t-n..t: 100 when today is the highest high,
/// 0 when the highest high is n bars old. Ties resolve to the most recent bar.
inline IndicatorColumn aroon_up(const PriceSeries& series, int n) {
    const IndicatorSpec spec{IndicatorId::AroonUp, n};
    detail::check_window(series, spec);
    const auto w = static_cast<std::size_t>(n);
    IndicatorColumn col{spec, std::vector<std::optional<double>>(series.size())};
    std::deque<std::size_t> highs;
    for (std::size_t t = 0; t < series.size(); ++t) {
        while (!highs.empty() && series[highs.back()].high <= series[t].high) highs.pop_back();
        highs.push_back(t);
        if (highs.front() + w < t) highs.pop_front();
        if (t >= w) {
            const auto since = static_cast<double>(t - highs.front());
            col.values[t] = (static_cast<double>(w) - since) / static_cast<double>(w) * 100.0;
        }
    }
    return col;
}

inline IndicatorColumn compute_indicator(const PriceSeries& series, const IndicatorSpec& spec) {
    switch (spec.id) {
    case IndicatorId::Stk: return stochastic_k(series, spec.window);
    case IndicatorId::Std: {
        detail::check_window(series, spec);
        return stochastic_d(stochastic_k(series, spec.k_window), spec.window);
    }
    case IndicatorId::Rsi: return rsi(series, spec.window);
    case IndicatorId::Psy: return psy(series, spec.window);
    case IndicatorId::WmaBias: return wma_bias(series, spec.window);
    case IndicatorId::Cci: return cci(series, spec.window);
    case IndicatorId::PlusDi: return di(series, spec.window, DiSign::Plus);
    case IndicatorId::MinusDi: return di(series, spec.window, DiSign::Minus);
    case IndicatorId::Adx: return adx(series, spec.window);
    case IndicatorId::AroonUp: return aroon_up(series, spec.window);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown indicator");
}

/// Raw feature rows for bars first_row .. N-1, columns in spec order.
struct FeatureTable {
    std::vector<IndicatorSpec> specs;
    std::size_t first_row = 0;
    FeatureMatrix values;
};

inline FeatureTable build_features(const PriceSeries& series, std::span<const IndicatorSpec> specs) {
    if (specs.empty()) throw Error(ErrorKind::EmptySpec, "no indicators requested");
    for (std::size_t i = 0; i < specs.size(); ++i)
        for (std::size_t j = i + 1; j < specs.size(); ++j)
            if (specs[i].id == specs[j].id)
                throw Error(ErrorKind::InvalidArgument,
                            "duplicate indicator " + std::string(to_string(specs[i].id)));

    std::vector<IndicatorColumn> columns;
    columns.reserve(specs.size());
    std::size_t first_row = 0;
    for (const IndicatorSpec& spec : specs) {
        columns.push_back(compute_indicator(series, spec));
        first_row = std::max(first_row, warmup(spec));
    }

    FeatureTable table{{specs.begin(), specs.end()}, first_row,
                       FeatureMatrix(series.size() - first_row, specs.size())};
    for (std::size_t t = first_row; t < series.size(); ++t)
        for (std::size_t c = 0; c < columns.size(); ++c)
            table.values(t - first_row, c) = *columns[c].values[t];
    return table;
}

} // namespace gatwo
