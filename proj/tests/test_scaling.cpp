#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "gatwo/model_io.hpp"
#include "gatwo/scaling.hpp"

using namespace gatwo;
using Catch::Approx;

namespace {

FeatureMatrix column(std::initializer_list<double> values) {
    FeatureMatrix m(0, 1);
    for (double v : values) m.append_row(std::span<const double>(&v, 1));
    return m;
}

FeatureMatrix random_table(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(3.0, 7.0);
    FeatureMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = c == 2 ? 4.25 : n(rng) * static_cast<double>(c + 1);
    return m;
}

} // namespace

TEST_CASE("fit examples") {
    const auto flat = fit_scaler(column({2, 2, 2}));
    CHECK(flat.mean[0] == 2.0);
    CHECK(flat.stddev[0] == 0.0);
    const auto two = fit_scaler(column({0, 10}));
    CHECK(two.mean[0] == 5.0);
    CHECK(two.stddev[0] == 5.0);
    const auto mm = fit_scaler(column({3, 7, 5}), ScalingMethod::MinMax);
    CHECK(mm.min[0] == 3.0);
    CHECK(mm.max[0] == 7.0);
    CHECK_THROWS_AS(fit_scaler(FeatureMatrix()), Error);
}

TEST_CASE("transform examples") {
    const auto state = fit_scaler(column({0, 10}));
    CHECK(transform(column({5}), state)(0, 0) == 0.0);
    CHECK(transform(column({15}), state)(0, 0) == 2.0);
    // A constant training column maps everything to 0, even unseen values.
    const auto flat = fit_scaler(column({2, 2, 2}));
    CHECK(transform(column({100}), flat)(0, 0) == 0.0);
    const auto mm = fit_scaler(column({3, 7, 5}), ScalingMethod::MinMax);
    CHECK(transform(column({6}), mm)(0, 0) == 0.75);
    CHECK(transform(column({6}), fit_scaler(column({1, 1}), ScalingMethod::MinMax))(0, 0) == 0.0);
    CHECK_THROWS_AS(transform(FeatureMatrix(1, 2), state), Error);
}

TEST_CASE("zscore standardises the training table") {
    const auto x = random_table(500, 4, 1);
    const auto state = fit_scaler(x);
    const auto z = transform(x, state);
    for (std::size_t c = 0; c < 4; ++c) {
        double mean = 0.0, var = 0.0;
        for (std::size_t r = 0; r < z.rows(); ++r) mean += z(r, c);
        mean /= static_cast<double>(z.rows());
        for (std::size_t r = 0; r < z.rows(); ++r) var += (z(r, c) - mean) * (z(r, c) - mean);
        const double sd = std::sqrt(var / static_cast<double>(z.rows()));
        CHECK(std::abs(mean) <= 1e-9);
        if (c == 2) CHECK(sd == 0.0);
        else CHECK(std::abs(sd - 1.0) <= 1e-9);
    }
}

TEST_CASE("transform is affine per column") {
    const auto state = fit_scaler(random_table(100, 3, 2));
    const auto a = transform(random_table(20, 3, 3), state);
    const auto b = transform(random_table(20, 3, 4), state);
    const auto ra = random_table(20, 3, 3);
    const auto rb = random_table(20, 3, 4);
    for (std::size_t r = 0; r < 20; ++r)
        for (std::size_t c : {0u, 1u})
            CHECK(a(r, c) - b(r, c) == Approx((ra(r, c) - rb(r, c)) / state.stddev[c]).epsilon(1e-12));
}

TEST_CASE("a persisted scaler transforms bit-identically") {
    for (auto method : {ScalingMethod::ZScore, ScalingMethod::MinMax}) {
        const auto state = fit_scaler(random_table(50, 3, 5), method);
        const Json j = {{"mean", state.mean}, {"stddev", state.stddev}, {"min", state.min}, {"max", state.max}};
        ScalerState back{method, j["mean"].get<std::vector<double>>(), j["stddev"].get<std::vector<double>>(),
                         j["min"].get<std::vector<double>>(), j["max"].get<std::vector<double>>()};
        const auto reparsed = Json::parse(j.dump());
        back.mean = reparsed["mean"].get<std::vector<double>>();
        back.stddev = reparsed["stddev"].get<std::vector<double>>();
        back.min = reparsed["min"].get<std::vector<double>>();
        back.max = reparsed["max"].get<std::vector<double>>();
        CHECK(back == state);
        const auto probe = random_table(30, 3, 6);
        CHECK(transform(probe, back) == transform(probe, state));
    }
}
