#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "gatwo/market_data.hpp"

namespace test {

inline gatwo::Date day(int offset) {
    using namespace std::chrono;
    return year_month_day{sys_days{year{2001} / January / 1} + days{offset}};
}

/// Random-walk OHLCV bars. Prices are rounded to cents so flat windows and
/// tied highs actually occur.
inline gatwo::PriceSeries random_series(std::size_t n, std::uint64_t seed, std::string symbol = "RND") {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, 0.8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto cents = [](double v) { return std::round(v * 100.0) / 100.0; };
    gatwo::PriceSeries s{std::move(symbol), {}};
    double close = 50.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double open = cents(std::max(1.0, close + 0.3 * step(rng)));
        close = u(rng) < 0.08 ? close : cents(std::max(1.0, close + step(rng)));
        double high = std::max(open, close);
        double low = std::min(open, close);
        if (u(rng) < 0.8) high = cents(high + std::abs(step(rng)) * 0.5);
        if (u(rng) < 0.8) low = cents(std::max(0.5, low - std::abs(step(rng)) * 0.5));
        s.bars.push_back({day(static_cast<int>(t)), open, high, low, close, std::round(1e5 * (1.0 + u(rng)))});
    }
    return s;
}

/// Series whose bars all have open = high = low = close.
inline gatwo::PriceSeries from_closes(const std::vector<double>& closes) {
    gatwo::PriceSeries s{"C", {}};
    for (std::size_t t = 0; t < closes.size(); ++t)
        s.bars.push_back({day(static_cast<int>(t)), closes[t], closes[t], closes[t], closes[t], 1000.0});
    return s;
}

inline gatwo::PriceSeries from_hlc(const std::vector<double>& h, const std::vector<double>& l,
                                   const std::vector<double>& c) {
    gatwo::PriceSeries s{"HLC", {}};
    for (std::size_t t = 0; t < c.size(); ++t)
        s.bars.push_back({day(static_cast<int>(t)), std::clamp(c[t], l[t], h[t]), h[t], l[t], c[t], 1000.0});
    return s;
}

/// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("gatwo_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace test

#include "gatwo/synthetic.hpp"

namespace test {

/// Planted-signal data cut into one training part and two evaluation parts
/// (40/20/20 of `bars`; the last 20% is left for out-of-sample checks).
struct SplitData {
    std::vector<gatwo::LabeledSeries> train;
    std::vector<gatwo::LabeledSeries> eval;
    gatwo::PriceSeries test;
};

inline SplitData planted_split(std::uint64_t seed, std::size_t bars = 1500) {
    gatwo::PlantedSignalConfig cfg;
    cfg.seed = seed;
    cfg.bars = bars;
    const auto s = gatwo::planted_signal_series(cfg);
    const std::size_t a = bars * 2 / 5, b = bars * 3 / 5, c = bars * 4 / 5;
    return {{gatwo::label(s.slice(0, a))},
            {gatwo::label(s.slice(a, b - a)), gatwo::label(s.slice(b, c - b))},
            s.slice(c, bars - c)};
}

} // namespace test
