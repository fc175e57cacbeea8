#pragma once

// Direct re-scan of every window at every bar. Slow on purpose: nothing
// here shares code or running state with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "gatwo/market_data.hpp"

namespace oracle {

using Column = std::vector<std::optional<double>>;

inline Column stk(const gatwo::PriceSeries& s, int n) {
    Column out(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
        if (t + 1 < static_cast<std::size_t>(n)) continue;
        double ll = s[t].low, hh = s[t].high;
        for (int i = 0; i < n; ++i) {
            ll = std::min(ll, s[t - i].low);
            hh = std::max(hh, s[t - i].high);
        }
        out[t] = hh == ll ? 0.0 : (s[t].close - ll) / (hh - ll) * 100.0;
    }
    return out;
}

inline Column std_d(const gatwo::PriceSeries& s, int k, int n) {
    const Column base = stk(s, k);
    Column out(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
        if (t + 1 < static_cast<std::size_t>(n)) continue;
        double sum = 0.0;
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            if (!base[t - i]) ok = false;
            else sum += *base[t - i];
        }
        if (ok) out[t] = sum / n;
    }
    return out;
}

inline Column rsi(const gatwo::PriceSeries& s, int n) {
    Column out(s.size());
    for (std::size_t t = n; t < s.size(); ++t) {
        double up = 0.0, dw = 0.0;
        for (std::size_t j = t - n + 1; j <= t; ++j) {
            const double d = s[j].close - s[j - 1].close;
            if (d > 0) up += d;
            if (d < 0) dw -= d;
        }
        if (up == 0.0 && dw == 0.0) out[t] = 50.0;
        else if (dw == 0.0) out[t] = 100.0;
        else out[t] = 100.0 - 100.0 / (1.0 + up / dw);
    }
    return out;
}

inline Column psy(const gatwo::PriceSeries& s, int n) {
    Column out(s.size());
    for (std::size_t t = n; t < s.size(); ++t) {
        int rising = 0;
        for (std::size_t j = t - n + 1; j <= t; ++j)
            if (s[j].close > s[j - 1].close) ++rising;
        out[t] = 100.0 * rising / n;
    }
    return out;
}

inline Column wma_bias(const gatwo::PriceSeries& s, int n) {
    Column out(s.size());
    for (std::size_t t = n - 1; t < s.size(); ++t) {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
            num += (n - i) * s[t - i].close;
            den += n - i;
        }
        out[t] = s[t].close - num / den;
    }
    return out;
}

inline Column cci(const gatwo::PriceSeries& s, int n) {
    Column out(s.size());
    const auto m = [&](std::size_t j) { return (s[j].high + s[j].low + s[j].close) / 3.0; };
    for (std::size_t t = n - 1; t < s.size(); ++t) {
        double sm = 0.0;
        for (int i = 0; i < n; ++i) sm += m(t - i);
        sm /= n;
        double d = 0.0;
        for (int i = 0; i < n; ++i) d += std::abs(m(t - i) - sm);
        d /= n;
        out[t] = d == 0.0 ? 0.0 : (m(t) - sm) / (0.015 * d);
    }
    return out;
}

inline double plus_dm(const gatwo::PriceSeries& s, std::size_t t) {
    return std::max(s[t].high - s[t - 1].high, 0.0);
}
inline double minus_dm(const gatwo::PriceSeries& s, std::size_t t) {
    return std::max(s[t - 1].low - s[t].low, 0.0);
}
inline double true_range(const gatwo::PriceSeries& s, std::size_t t) {
    const double pc = s[t - 1].close;
    return std::max({s[t].high - s[t].low, std::abs(s[t].high - pc), std::abs(s[t].low - pc)});
}

inline Column di(const gatwo::PriceSeries& s, int n, bool plus) {
    Column out(s.size());
    for (std::size_t t = n; t < s.size(); ++t) {
        double dm = 0.0, tr = 0.0;
        for (std::size_t j = t - n + 1; j <= t; ++j) {
            dm += plus ? plus_dm(s, j) : minus_dm(s, j);
            tr += true_range(s, j);
        }
        out[t] = tr == 0.0 ? 0.0 : dm / tr * 100.0;
    }
    return out;
}

inline Column adx(const gatwo::PriceSeries& s, int n) {
    const Column p = di(s, n, true);
    const Column m = di(s, n, false);
    Column out(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) {
        if (t + 1 < 2 * static_cast<std::size_t>(n)) continue;
        double sum = 0.0;
        for (std::size_t j = t - n + 1; j <= t; ++j) {
            const double den = *p[j] + *m[j];
            sum += den == 0.0 ? 0.0 : std::abs(*p[j] - *m[j]) / den * 100.0;
        }
        out[t] = sum / n;
    }
    return out;
}

inline Column aroon_up(const gatwo::PriceSeries& s, int n) {
    Column out(s.size());
    for (std::size_t t = n; t < s.size(); ++t) {
        std::size_t best = t - n;
        for (std::size_t j = t - n; j <= t; ++j)
            if (s[j].high >= s[best].high) best = j;
        out[t] = 100.0 * static_cast<double>(n - static_cast<int>(t - best)) / n;
    }
    return out;
}

} // namespace oracle
