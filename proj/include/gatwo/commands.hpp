#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gatwo/error.hpp"
#include "gatwo/genetic.hpp"
#include "gatwo/market_data.hpp"
#include "gatwo/model_io.hpp"
#include "gatwo/pipeline.hpp"
#include "gatwo/trading.hpp"

namespace gatwo::cli {

inline const std::vector<double> kDefaultCostGrid{0.125, 0.25, 0.5, 1, 2, 4, 8, 16, 32, 64, 100};
inline const std::vector<double> kDefaultGammaGrid{0.1, 0.25, 0.5, 1, 2, 5, 10};

/// Parameters shared by every command. Defaults: c = 1, gamma = 0.25,
/// $5 per transaction, $100,000 starting cash, GA rates per GaConfig.
struct RunConfig {
    std::vector<std::string> train;
    std::vector<std::string> eval;
    std::vector<std::string> test;
    std::uint64_t seed = 0;
    std::string out = ".";
    /// Model file; train defaults to OUT/model.json.
    std::string model;
    std::string csv_schema;
    bool force = false;
    bool fast = false;
    PipelineConfig pipeline;
    ga::GaConfig ga;
    std::vector<double> c_values = kDefaultCostGrid;
    std::vector<double> gamma_values = kDefaultGammaGrid;

    [[nodiscard]] ga::GaConfig ga_config() const {
        ga::GaConfig g = ga;
        g.rng_seed = seed;
        return g;
    }
    [[nodiscard]] std::filesystem::path model_path() const {
        return model.empty() ? std::filesystem::path(out) / "model.json" : std::filesystem::path(model);
    }
};

inline std::vector<LabeledSeries> load_sets(const std::vector<std::string>& paths, const CsvSchema& schema) {
    std::vector<LabeledSeries> sets;
    for (const auto& p : paths) sets.push_back(label(load_csv(p, schema)));
    return sets;
}

inline std::vector<DataRef> data_refs(const std::vector<std::string>& paths) {
    std::vector<DataRef> refs;
    for (const auto& p : paths) refs.push_back({p, file_fingerprint(p)});
    return refs;
}

inline void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

namespace detail {

inline std::string fixed(double v, int digits = 4) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

inline std::string selected_genes(const std::vector<ga::GeneSpec>& specs, const ga::Chromosome& c) {
    std::string out;
    for (std::size_t g = 0; g < specs.size(); ++g) {
        if (!c.genes[g].selected) continue;
        if (!out.empty()) out += ' ';
        out += std::string(to_string(specs[g].indicator)) + "=" + std::to_string(c.genes[g].tw);
    }
    return out;
}

inline std::string history_csv(const std::vector<ga::GenerationStats>& history) {
    std::string out = "generation,best,mean,stall\n";
    for (const auto& h : history)
        out += std::to_string(h.generation) + "," + format_number(h.best) + "," + format_number(h.mean) +
               "," + std::to_string(h.stall) + "\n";
    return out;
}

inline std::string safe_name(std::string s) {
    for (char& ch : s)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.')) ch = '_';
    return s;
}

} // namespace detail

// ---------------------------------------------------------------- grid search

struct GridRow {
    double c = 0.0;
    double gamma = 0.0;
    double score = 0.0;
    ga::Chromosome chromosome;
};

/// Scores every (c, gamma) cell by a full GA run (or by the default
/// chromosome in fast mode) and writes OUT/grid.csv ranked best first.
inline std::vector<GridRow> cmd_grid_search(const RunConfig& config, std::ostream& log) {
    require(!config.train.empty() && !config.eval.empty(), "grid-search needs --train and --eval");
    require(!config.c_values.empty() && !config.gamma_values.empty(), "grid values must be non-empty");
    const auto schema = CsvSchema::parse(config.csv_schema);
    const auto train = load_sets(config.train, schema);
    const auto eval = load_sets(config.eval, schema);
    const auto specs = ga::standard_gene_specs();

    std::vector<GridRow> rows;
    for (double c : config.c_values) {
        for (double gamma : config.gamma_values) {
            PipelineConfig pipeline = config.pipeline;
            pipeline.svm.cost = c;
            pipeline.svm.kernel = svm::Kernel::rbf(gamma);
            GridRow row{c, gamma, -std::numeric_limits<double>::infinity(), ga::default_chromosome(specs)};
            if (config.fast) {
                row.score = ga::fitness(row.chromosome, specs, train, eval, pipeline).score;
            } else {
                try {
                    const auto result = ga::evolve(train, eval, specs, config.ga_config(), pipeline);
                    row.score = result.best.fitness;
                    row.chromosome = result.best.chromosome;
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::NoViableChromosome) throw;
                }
            }
            log << "c=" << c << " gamma=" << gamma << " score=" << detail::fixed(row.score) << '\n';
            rows.push_back(std::move(row));
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) { return a.score > b.score; });

    std::string csv = "rank,c,gamma,score,selected\n";
    for (std::size_t r = 0; r < rows.size(); ++r)
        csv += std::to_string(r + 1) + "," + format_number(rows[r].c) + "," + format_number(rows[r].gamma) + "," +
               format_number(rows[r].score) + "," + detail::selected_genes(specs, rows[r].chromosome) + "\n";
    write_text_file(std::filesystem::path(config.out) / "grid.csv", csv, config.force);
    return rows;
}

// ---------------------------------------------------------------------- train

struct TrainResult {
    ModelFile file;
    std::vector<ga::GenerationStats> history;
};

/// Evolves a model, writes it to the model path and OUT/history.csv, and
/// prints the selected (indicator, window) pairs.
inline TrainResult cmd_train(const RunConfig& config, std::ostream& log) {
    require(!config.train.empty() && !config.eval.empty(), "train needs --train and --eval");
    const auto model_path = config.model_path();
    const auto history_path = std::filesystem::path(config.out) / "history.csv";
    if (!config.force) {
        for (const auto& p : {model_path, history_path})
            if (std::filesystem::exists(p))
                throw Error(ErrorKind::OutputExists, p.string() + " exists (use --force)");
    }
    const auto schema = CsvSchema::parse(config.csv_schema);
    const auto train = load_sets(config.train, schema);
    const auto eval = load_sets(config.eval, schema);
    const auto specs = ga::standard_gene_specs();

    auto evolved = ga::evolve(train, eval, specs, config.ga_config(), config.pipeline,
                              [&](const ga::GenerationStats& s) {
                                  log << "gen " << s.generation << " best " << detail::fixed(s.best)
                                      << " mean " << detail::fixed(s.mean) << " stall " << s.stall << '\n';
                              });

    TrainResult result{{std::move(evolved.best),
                        Provenance{config.seed, data_refs(config.train), data_refs(config.eval),
                                   config.pipeline.trading, config.pipeline.svm.tol, config.csv_schema}},
                       std::move(evolved.history)};
    save_model(model_path, result.file, true);
    write_text_file(history_path, detail::history_csv(result.history), true);

    const auto& b = result.file.bundle;
    log << "fitness " << detail::fixed(b.fitness) << " (generation " << b.generation_found << ")\n";
    log << "feature    tw\n";
    for (std::size_t g = 0; g < b.gene_specs.size(); ++g)
        if (b.chromosome.genes[g].selected)
            log << std::left << std::setw(10) << to_string(b.gene_specs[g].indicator) << ' '
                << b.chromosome.genes[g].tw << '\n';
    log << "model written to " << model_path.string() << '\n';
    return result;
}

// ------------------------------------------------------------------- evaluate

/// One stock: the model's simulation and buy-and-hold over the same bars.
struct StockReport {
    std::string symbol;
    std::string path;
    trading::SimulationResult model;
    trading::SimulationResult buy_and_hold;
};

inline StockReport evaluate_stock(const TrainedModel& model, const std::string& path, const PriceSeries& series,
                                  const trading::TradingConfig& trading) {
    auto run = evaluate_series(model, series, trading);
    StockReport report{series.symbol, path, std::move(run.result), {}};
    report.buy_and_hold = trading::buy_and_hold(run.traded, trading);
    return report;
}

inline Json stock_json(const StockReport& s) {
    return Json{{"symbol", s.symbol},
                {"path", s.path},
                {"rr", s.model.rate_of_return},
                {"mdd", s.model.max_drawdown},
                {"rr_bh", s.buy_and_hold.rate_of_return},
                {"mdd_bh", s.buy_and_hold.max_drawdown},
                {"model", summary_json(s.model)},
                {"buy_and_hold", summary_json(s.buy_and_hold)}};
}

struct EvaluationReport {
    std::vector<StockReport> stocks;
    double mean_rr = 0.0;
};

/// Rates a saved model on each --test series against buy-and-hold; writes
/// OUT/report.json and one OUT/equity_<symbol>.csv per series.
inline EvaluationReport cmd_evaluate(const RunConfig& config, std::ostream& log) {
    require(!config.model.empty(), "evaluate needs --model");
    require(!config.test.empty(), "evaluate needs --test");
    const auto file = load_model(config.model);
    const auto model = file.bundle.trained_model();
    const auto schema = CsvSchema::parse(config.csv_schema);
    const auto trading = config.pipeline.trading;

    EvaluationReport report;
    Json stocks = Json::array();
    for (const auto& path : config.test) {
        const auto series = load_csv(path, schema);
        auto stock = evaluate_stock(model, path, series, trading);
        report.mean_rr += stock.model.rate_of_return;
        std::ostringstream equity;
        trading::write_equity_csv(series.slice(series.size() - stock.model.equity_curve.size(), series.size()),
                                  stock.model, equity);
        write_text_file(std::filesystem::path(config.out) / ("equity_" + detail::safe_name(stock.symbol) + ".csv"),
                        equity.str(), config.force);
        stocks.push_back(stock_json(stock));
        report.stocks.push_back(std::move(stock));
    }
    report.mean_rr /= static_cast<double>(report.stocks.size());

    const Json doc{{"model", config.model},
                   {"initial_cash", trading.initial_cash},
                   {"cost_per_transaction", trading.cost_per_transaction},
                   {"stocks", std::move(stocks)},
                   {"mean_rr", report.mean_rr}};
    write_text_file(std::filesystem::path(config.out) / "report.json", doc.dump(2) + "\n", config.force);

    log << std::left << std::setw(12) << "stock" << std::right << std::setw(10) << "RR[%]" << std::setw(10)
        << "MDD[%]" << std::setw(12) << "RR B&H[%]" << std::setw(12) << "MDD B&H[%]" << std::setw(10)
        << "trades[%]" << '\n';
    for (const auto& s : report.stocks)
        log << std::left << std::setw(12) << s.symbol << std::right << std::setw(10)
            << detail::fixed(s.model.rate_of_return, 2) << std::setw(10) << detail::fixed(s.model.max_drawdown, 2)
            << std::setw(12) << detail::fixed(s.buy_and_hold.rate_of_return, 2) << std::setw(12)
            << detail::fixed(s.buy_and_hold.max_drawdown, 2) << std::setw(10)
            << detail::fixed(100.0 * s.model.trade_fraction(), 1) << '\n';
    log << "mean RR " << detail::fixed(report.mean_rr) << '\n';
    return report;
}

// ------------------------------------------------------------ compare-default

struct ComparisonRow {
    StockReport optimized;
    StockReport baseline;
};

/// Trains a default-window model on the same training data and compares it
/// with the saved model on each --test series. Writes OUT/compare.json and
/// OUT/compare.csv.
inline std::vector<ComparisonRow> cmd_compare_default(const RunConfig& config, std::ostream& log) {
    require(!config.model.empty(), "compare-default needs --model");
    require(!config.test.empty(), "compare-default needs --test");
    const auto file = load_model(config.model);
    const auto optimized = file.bundle.trained_model();

    std::vector<std::string> train_paths = config.train;
    if (train_paths.empty())
        for (const auto& ref : file.provenance.train) train_paths.push_back(ref.path);
    require(!train_paths.empty(), "no training data: pass --train");
    const auto train_schema =
        CsvSchema::parse(config.train.empty() ? file.provenance.csv_schema : config.csv_schema);
    const auto train = load_sets(train_paths, train_schema);

    PipelineConfig pipeline;
    pipeline.svm.kernel = file.bundle.svm.kernel;
    pipeline.svm.cost = file.bundle.svm.cost;
    pipeline.svm.tol = file.provenance.svm_tol;
    pipeline.scaling = file.bundle.scaler.method;
    const auto& specs = file.bundle.gene_specs;
    const auto baseline = train_model(train, ga::indicator_specs(specs, ga::default_chromosome(specs)), pipeline);

    const auto schema = CsvSchema::parse(config.csv_schema);
    const auto trading = config.pipeline.trading;
    std::vector<ComparisonRow> rows;
    Json stocks = Json::array();
    std::string csv = "symbol,rr,mdd,rr_bh,mdd_bh,default_rr,default_mdd,default_rr_bh,default_mdd_bh\n";
    for (const auto& path : config.test) {
        const auto series = load_csv(path, schema);
        ComparisonRow row{evaluate_stock(optimized, path, series, trading),
                          evaluate_stock(baseline, path, series, trading)};
        const auto& o = row.optimized;
        const auto& d = row.baseline;
        csv += o.symbol + "," + format_number(o.model.rate_of_return) + "," + format_number(o.model.max_drawdown) +
               "," + format_number(o.buy_and_hold.rate_of_return) + "," +
               format_number(o.buy_and_hold.max_drawdown) + "," + format_number(d.model.rate_of_return) + "," +
               format_number(d.model.max_drawdown) + "," + format_number(d.buy_and_hold.rate_of_return) + "," +
               format_number(d.buy_and_hold.max_drawdown) + "\n";
        stocks.push_back(Json{{"symbol", o.symbol},
                              {"optimized", {{"rr", o.model.rate_of_return},
                                             {"mdd", o.model.max_drawdown},
                                             {"rr_bh", o.buy_and_hold.rate_of_return},
                                             {"mdd_bh", o.buy_and_hold.max_drawdown}}},
                              {"default", {{"rr", d.model.rate_of_return},
                                           {"mdd", d.model.max_drawdown},
                                           {"rr_bh", d.buy_and_hold.rate_of_return},
                                           {"mdd_bh", d.buy_and_hold.max_drawdown}}}});
        rows.push_back(std::move(row));
    }
    const auto out = std::filesystem::path(config.out);
    write_text_file(out / "compare.csv", csv, config.force);
    write_text_file(out / "compare.json",
                    Json{{"model", config.model}, {"stocks", std::move(stocks)}}.dump(2) + "\n", config.force);

    log << std::left << std::setw(12) << "stock" << std::right << std::setw(10) << "RR[%]" << std::setw(10)
        << "MDD[%]" << std::setw(12) << "default RR" << std::setw(12) << "default MDD" << '\n';
    for (const auto& r : rows)
        log << std::left << std::setw(12) << r.optimized.symbol << std::right << std::setw(10)
            << detail::fixed(r.optimized.model.rate_of_return, 2) << std::setw(10)
            << detail::fixed(r.optimized.model.max_drawdown, 2) << std::setw(12)
            << detail::fixed(r.baseline.model.rate_of_return, 2) << std::setw(12)
            << detail::fixed(r.baseline.model.max_drawdown, 2) << '\n';
    return rows;
}

} // namespace gatwo::cli
