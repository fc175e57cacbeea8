#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gatwo/error.hpp"
#include "gatwo/indicators.hpp"
#include "gatwo/market_data.hpp"
#include "gatwo/scaling.hpp"
#include "gatwo/svm.hpp"
#include "gatwo/trading.hpp"

namespace gatwo {

/// Everything the model-building pipeline needs besides data and features.
struct PipelineConfig {
    svm::Config svm;
    trading::TradingConfig trading;
    ScalingMethod scaling = ScalingMethod::ZScore;
};

/// Selected features with their windows, the fitted scaler and the classifier.
struct TrainedModel {
    std::vector<IndicatorSpec> features;
    ScalerState scaler;
    svm::Model svm;
};

struct LabeledTable {
    FeatureMatrix x;
    std::vector<int> y;
};

/// Stacks the feature rows of every training series that have a label
/// (i.e. all post-warm-up bars except each series' last).
inline LabeledTable assemble_training(std::span<const LabeledSeries> train_sets,
                                      std::span<const IndicatorSpec> specs) {
    if (train_sets.empty()) throw Error(ErrorKind::InvalidArgument, "no training sets");
    LabeledTable out{FeatureMatrix(0, specs.size()), {}};
    for (const LabeledSeries& set : train_sets) {
        const FeatureTable table = build_features(set.series, specs);
        for (std::size_t r = 0; r < table.values.rows(); ++r) {
            const std::size_t bar = table.first_row + r;
            if (bar >= set.labels.size()) break;
            out.x.append_row(table.values.row(r));
            out.y.push_back(set.labels[bar]);
        }
    }
    if (out.x.empty()) throw Error(ErrorKind::EmptyTable, "no labeled rows after warm-up");
    return out;
}

inline TrainedModel train_model(std::span<const LabeledSeries> train_sets,
                                std::span<const IndicatorSpec> specs, const PipelineConfig& config) {
    LabeledTable table = assemble_training(train_sets, specs);
    ScalerState scaler = fit_scaler(table.x, config.scaling);
    const FeatureMatrix scaled = transform(std::move(table.x), scaler);
    return TrainedModel{{specs.begin(), specs.end()}, std::move(scaler),
                        svm::train(scaled, table.y, config.svm)};
}

/// Result of running a trained model over one price series. `traded` is the
/// post-warm-up part of the series, one signal per bar.
struct EvaluationRun {
    PriceSeries traded;
    std::vector<int> signals;
    trading::SimulationResult result;
};

inline EvaluationRun evaluate_series(const TrainedModel& model, const PriceSeries& series,
                                     const trading::TradingConfig& trading) {
    FeatureTable table;
    try {
        table = build_features(series, model.features);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::WindowTooLargeForSeries)
            throw Error(ErrorKind::SeriesTooShortForWarmup, series.symbol + ": " + e.what());
        throw;
    }
    if (table.values.cols() != model.scaler.features() || table.values.cols() != model.svm.dimension())
        throw Error(ErrorKind::DimensionMismatch, "model and feature dimensions differ");
    const FeatureMatrix scaled = transform(std::move(table.values), model.scaler);
    EvaluationRun run{series.slice(table.first_row, series.size()), svm::predict_all(model.svm, scaled), {}};
    run.result = trading::simulate(run.traded, run.signals, trading);
    return run;
}

} // namespace gatwo
