#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "gatwo/error.hpp"
#include "gatwo/matrix.hpp"

namespace gatwo {

enum class ScalingMethod { ZScore, MinMax };

constexpr std::string_view to_string(ScalingMethod method) noexcept {
    return method == ScalingMethod::ZScore ? "zscore" : "minmax";
}

/// Per-feature parameters learned on the training table. Only the pair that
/// matches `method` is populated: (mean, stddev) for zscore, (min, max) for minmax.
struct ScalerState {
    ScalingMethod method = ScalingMethod::ZScore;
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<double> min;
    std::vector<double> max;

    [[nodiscard]] std::size_t features() const noexcept {
        return method == ScalingMethod::ZScore ? mean.size() : min.size();
    }

    friend bool operator==(const ScalerState&, const ScalerState&) = default;
};

/// Column means and population standard deviations (or extrema for minmax).
inline ScalerState fit_scaler(const FeatureMatrix& features, ScalingMethod method = ScalingMethod::ZScore) {
    if (features.empty() || features.cols() == 0)
        throw Error(ErrorKind::EmptyTable, "cannot fit a scaler on an empty table");
    const std::size_t rows = features.rows();
    const std::size_t cols = features.cols();
    ScalerState state{method, {}, {}, {}, {}};
    if (method == ScalingMethod::ZScore) {
        state.mean.assign(cols, 0.0);
        state.stddev.assign(cols, 0.0);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) state.mean[c] += features(r, c);
        for (double& m : state.mean) m /= static_cast<double>(rows);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                const double d = features(r, c) - state.mean[c];
                state.stddev[c] += d * d;
            }
        for (double& s : state.stddev) s = std::sqrt(s / static_cast<double>(rows));
    } else {
        state.min.assign(features.row(0).begin(), features.row(0).end());
        state.max = state.min;
        for (std::size_t r = 1; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                state.min[c] = std::min(state.min[c], features(r, c));
                state.max[c] = std::max(state.max[c], features(r, c));
            }
    }
    return state;
}

/// Scales one row in place. A zero spread (constant training column) maps to 0.
inline void transform_row(std::span<double> row, const ScalerState& state) {
    if (row.size() != state.features())
        throw Error(ErrorKind::DimensionMismatch, "row has " + std::to_string(row.size()) +
                                                      " features, scaler has " +
                                                      std::to_string(state.features()));
    for (std::size_t c = 0; c < row.size(); ++c) {
        if (state.method == ScalingMethod::ZScore) {
            row[c] = state.stddev[c] == 0.0 ? 0.0 : (row[c] - state.mean[c]) / state.stddev[c];
        } else {
            const double range = state.max[c] - state.min[c];
            row[c] = range == 0.0 ? 0.0 : (row[c] - state.min[c]) / range;
        }
    }
}

inline FeatureMatrix transform(FeatureMatrix features, const ScalerState& state) {
    if (features.cols() != state.features())
        throw Error(ErrorKind::DimensionMismatch, "table has " + std::to_string(features.cols()) +
                                                      " columns, scaler has " +
                                                      std::to_string(state.features()));
    for (std::size_t r = 0; r < features.rows(); ++r) transform_row(features.row(r), state);
    return features;
}

} // namespace gatwo
