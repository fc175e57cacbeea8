#include <catch_amalgamated.hpp>

#include <cmath>

#include "gatwo/genetic.hpp"
#include "gatwo/indicators.hpp"
#include "oracles/naive_indicators.hpp"
#include "support.hpp"

using namespace gatwo;
using Catch::Approx;

namespace {

oracle::Column naive(const PriceSeries& s, const IndicatorSpec& spec) {
    switch (spec.id) {
    case IndicatorId::Stk: return oracle::stk(s, spec.window);
    case IndicatorId::Std: return oracle::std_d(s, spec.k_window, spec.window);
    case IndicatorId::Rsi: return oracle::rsi(s, spec.window);
    case IndicatorId::Psy: return oracle::psy(s, spec.window);
    case IndicatorId::WmaBias: return oracle::wma_bias(s, spec.window);
    case IndicatorId::Cci: return oracle::cci(s, spec.window);
    case IndicatorId::PlusDi: return oracle::di(s, spec.window, true);
    case IndicatorId::MinusDi: return oracle::di(s, spec.window, false);
    case IndicatorId::Adx: return oracle::adx(s, spec.window);
    case IndicatorId::AroonUp: return oracle::aroon_up(s, spec.window);
    }
    return {};
}

/// Largest absolute difference; -1 when the defined/undefined pattern differs.
double max_diff(const std::vector<std::optional<double>>& a, const oracle::Column& b) {
    if (a.size() != b.size()) return -1.0;
    double worst = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        if (a[t].has_value() != b[t].has_value()) return -1.0;
        if (a[t]) worst = std::max(worst, std::abs(*a[t] - *b[t]));
    }
    return worst;
}

double at(const IndicatorColumn& c, std::size_t t) {
    REQUIRE(c.values[t].has_value());
    return *c.values[t];
}

} // namespace

TEST_CASE("every indicator matches the naive reference at every legal window") {
    const auto s = test::random_series(1000, 42);
    for (const auto& gene : ga::standard_gene_specs()) {
        for (int n = gene.tw_min; n <= gene.tw_max; ++n) {
            const int k_lo = gene.indicator == IndicatorId::Std ? 8 : 9;
            const int k_hi = gene.indicator == IndicatorId::Std ? 14 : 9;
            for (int k = k_lo; k <= k_hi; ++k) {
                const IndicatorSpec spec{gene.indicator, n, k};
                const auto col = compute_indicator(s, spec);
                INFO(to_string(spec.id) << " n=" << n << " k=" << k);
                const double d = max_diff(col.values, naive(s, spec));
                CHECK(d >= 0.0);
                CHECK(d <= 1e-9);
                CHECK_FALSE(col.values[warmup(spec) - 1].has_value());
                CHECK(col.values[warmup(spec)].has_value());
            }
        }
    }
}

TEST_CASE("bounded indicators stay in [0, 100]") {
    const auto s = test::random_series(600, 9);
    for (auto id : kAllIndicators) {
        if (id == IndicatorId::Cci || id == IndicatorId::WmaBias) continue;
        for (int n : {3, 7, 14}) {
            const auto col = compute_indicator(s, {id, n, 9});
            for (const auto& v : col.values)
                if (v) CHECK((*v >= 0.0 && *v <= 100.0));
        }
    }
}

TEST_CASE("appending bars leaves earlier values unchanged") {
    const auto full = test::random_series(400, 5);
    const auto head = full.slice(0, 250);
    for (auto id : kAllIndicators) {
        const IndicatorSpec spec{id, 10, 12};
        const auto a = compute_indicator(head, spec);
        const auto b = compute_indicator(full, spec);
        for (std::size_t t = 0; t < head.size(); ++t) {
            REQUIRE(a.values[t].has_value() == b.values[t].has_value());
            if (a.values[t]) CHECK(*a.values[t] == *b.values[t]);
        }
    }
}

TEST_CASE("larger windows never start earlier") {
    const auto s = test::random_series(200, 11);
    for (auto id : kAllIndicators) {
        for (int n = 1; n < 30; ++n) {
            const auto small = compute_indicator(s, {id, n, 9});
            const auto large = compute_indicator(s, {id, n + 1, 9});
            for (std::size_t t = 0; t < s.size(); ++t)
                if (large.values[t]) CHECK(small.values[t].has_value());
        }
    }
}

TEST_CASE("stochastic %K") {
    // Close at the window high, then at the window low.
    const auto s = test::from_hlc({10, 12, 11, 9}, {8, 9, 9, 7}, {9, 12, 10, 7});
    CHECK(at(stochastic_k(s, 2), 1) == 100.0);
    CHECK(at(stochastic_k(s, 2), 3) == 0.0);
    const auto k = stochastic_k(s, 2);
    CHECK(at(k, 2) == Approx(*oracle::stk(s, 2)[2]).margin(1e-12));
    CHECK(at(k, 2) == Approx((10.0 - 9.0) / (12.0 - 9.0) * 100.0));
    CHECK(at(stochastic_k(test::from_closes({5, 5, 5}), 3), 2) == 0.0);
}

TEST_CASE("stochastic %D") {
    IndicatorColumn k{{IndicatorId::Stk, 1}, {40.0, 40.0, 40.0, 40.0}};
    for (int n = 1; n <= 4; ++n) CHECK(at(stochastic_d(k, n), 3) == 40.0);
    IndicatorColumn k2{{IndicatorId::Stk, 2}, {std::nullopt, 0.0, 100.0}};
    const auto d = stochastic_d(k2, 2);
    CHECK_FALSE(d.values[1].has_value());
    CHECK(at(d, 2) == 50.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 100);
    IndicatorColumn k3{{IndicatorId::Stk, 1}, {}};
    for (int i = 0; i < 50; ++i) k3.values.push_back(u(rng));
    const auto d3 = stochastic_d(k3, 3);
    for (std::size_t t = 2; t < 50; ++t)
        CHECK(at(d3, t) == Approx((*k3.values[t] + *k3.values[t - 1] + *k3.values[t - 2]) / 3.0).margin(1e-12));
    CHECK_THROWS_AS(stochastic_d(k2, 5), Error);
}

TEST_CASE("rsi") {
    CHECK(at(rsi(test::from_closes({1, 2, 3, 4, 5}), 4), 4) == 100.0);
    CHECK(at(rsi(test::from_closes({5, 4, 3, 2, 1}), 4), 4) == 0.0);
    CHECK(at(rsi(test::from_closes({3, 3, 3}), 2), 2) == 50.0);
    // [44, 45, 44, 46], n = 3: up = 1 + 2, down = 1.
    CHECK(at(rsi(test::from_closes({44, 45, 44, 46}), 3), 3) == Approx(100.0 - 100.0 / (1.0 + 3.0 / 1.0)));
}

TEST_CASE("psy") {
    CHECK(at(psy(test::from_closes({1, 2, 3, 4, 5}), 4), 4) == 100.0);
    CHECK(at(psy(test::from_closes({5, 5, 4, 4, 3}), 4), 4) == 0.0);
    CHECK(at(psy(test::from_closes({1, 2, 2, 3, 1}), 4), 4) == 50.0);
}

TEST_CASE("wma bias") {
    const auto flat = wma_bias(test::from_closes({7, 7, 7, 7, 7}), 3);
    for (std::size_t t = 2; t < 5; ++t) CHECK(at(flat, t) == Approx(0.0).margin(1e-12));
    CHECK(at(wma_bias(test::from_closes({1, 2, 3}), 3), 2) == Approx(3.0 - 14.0 / 6.0));
}

TEST_CASE("cci") {
    CHECK(at(cci(test::from_closes({4, 4, 4}), 3), 2) == 0.0);
    CHECK(at(cci(test::from_closes({10, 12, 14}), 3), 2) == Approx((14.0 - 12.0) / (0.015 * (4.0 / 3.0))));
}

TEST_CASE("directional movement") {
    const auto rising = test::from_hlc({10, 11, 13, 14}, {8, 9, 10, 12}, {9, 10, 12, 13});
    const auto dm = directional_movement(rising);
    CHECK_FALSE(dm.plus_dm[0].has_value());
    for (std::size_t t = 1; t < 4; ++t) CHECK(*dm.minus_dm[t] == 0.0);
    CHECK(*dm.plus_dm[2] == 2.0);
    const auto gap = test::from_hlc({13, 10}, {11, 8}, {12, 9});
    CHECK(*directional_movement(gap).true_range[1] == 4.0);
    CHECK_THROWS_AS(directional_movement(test::from_closes({1})), Error);
}

TEST_CASE("directional indicators") {
    const auto rising = test::from_hlc({10, 11, 13, 14, 16}, {8, 9, 10, 12, 13}, {9, 10, 12, 13, 15});
    const auto minus = di(rising, 2, DiSign::Minus);
    for (std::size_t t = 2; t < 5; ++t) CHECK(at(minus, t) == 0.0);
    // Closes at the high and gapless ranges: +DM sum equals TR sum.
    const auto stairs = test::from_hlc({2, 3, 4, 5}, {1, 2, 3, 4}, {2, 3, 4, 5});
    CHECK(at(di(stairs, 3, DiSign::Plus), 3) == Approx(100.0));
    const auto s = test::random_series(120, 4);
    CHECK(max_diff(di(s, 5, DiSign::Plus).values, oracle::di(s, 5, true)) <= 1e-9);
    CHECK(max_diff(di(s, 5, DiSign::Minus).values, oracle::di(s, 5, false)) <= 1e-9);
}

TEST_CASE("adx") {
    const auto stairs = test::from_hlc({2, 3, 4, 5, 6, 7, 8}, {1, 2, 3, 4, 5, 6, 7}, {2, 3, 4, 5, 6, 7, 8});
    CHECK(at(adx(stairs, 3), 6) == Approx(100.0));
    // Alternating up and down moves of equal size: +DI = -DI.
    const auto zigzag = test::from_hlc({10, 11, 10, 11, 10, 11, 10, 11, 10},
                                       {9, 10, 9, 10, 9, 10, 9, 10, 9},
                                       {9.5, 10.5, 9.5, 10.5, 9.5, 10.5, 9.5, 10.5, 9.5});
    CHECK(at(adx(zigzag, 2), 8) == Approx(0.0).margin(1e-12));
    const auto s = test::random_series(150, 8);
    CHECK(max_diff(adx(s, 6).values, oracle::adx(s, 6)) <= 1e-9);
}

TEST_CASE("aroon up") {
    CHECK(at(aroon_up(test::from_hlc({1, 2, 3, 4}, {1, 1, 1, 1}, {1, 2, 3, 4}), 3), 3) == 100.0);
    CHECK(at(aroon_up(test::from_hlc({9, 2, 3, 4}, {1, 1, 1, 1}, {1, 2, 3, 4}), 3), 3) == 0.0);
    // Ties resolve to the most recent maximum.
    CHECK(at(aroon_up(test::from_hlc({9, 9, 3, 4}, {1, 1, 1, 1}, {1, 2, 3, 4}), 3), 3) == Approx(100.0 / 3.0));
    const auto s = test::random_series(300, 6);
    CHECK(max_diff(aroon_up(s, 25).values, oracle::aroon_up(s, 25)) <= 1e-9);
}

TEST_CASE("build_features") {
    const auto s = test::random_series(100, 1);
    const std::vector<IndicatorSpec> one{{IndicatorId::Rsi, 6}};
    const auto t1 = build_features(s, one);
    CHECK(t1.values.cols() == 1);
    CHECK(t1.first_row == 6);
    CHECK(t1.values.rows() == 94);
    CHECK(t1.values(0, 0) == *rsi(s, 6).values[6]);

    const std::vector<IndicatorSpec> two{{IndicatorId::AroonUp, 25}, {IndicatorId::Stk, 9}};
    const auto t2 = build_features(s, two);
    CHECK(t2.first_row == std::max(warmup(two[0]), warmup(two[1])));
    CHECK(t2.values(0, 0) == *aroon_up(s, 25).values[t2.first_row]);
    CHECK(t2.values(0, 1) == *stochastic_k(s, 9).values[t2.first_row]);

    const auto kind = [&](std::span<const IndicatorSpec> specs, const PriceSeries& series) {
        try {
            build_features(series, specs);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;
    };
    CHECK(kind({}, s) == ErrorKind::EmptySpec);
    const std::vector<IndicatorSpec> huge{{IndicatorId::Adx, 60}};
    CHECK(kind(huge, s) == ErrorKind::WindowTooLargeForSeries);
    const std::vector<IndicatorSpec> dup{{IndicatorId::Rsi, 6}, {IndicatorId::Rsi, 7}};
    CHECK_THROWS_AS(build_features(s, dup), Error);
    const std::vector<IndicatorSpec> zero{{IndicatorId::Rsi, 0}};
    CHECK_THROWS_AS(build_features(s, zero), Error);
}

TEST_CASE("indicator names round-trip") {
    for (auto id : kAllIndicators) CHECK(parse_indicator(to_string(id)) == id);
    CHECK_FALSE(parse_indicator("MACD"));
}
