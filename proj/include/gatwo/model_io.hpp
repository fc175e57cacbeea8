#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gatwo/error.hpp"
#include "gatwo/genetic.hpp"
#include "gatwo/trading.hpp"

namespace gatwo {

using Json = nlohmann::ordered_json;

/// A data file a model was built from, identified by path and content hash.
struct DataRef {
    std::string path;
    std::uint64_t fingerprint = 0;

    friend bool operator==(const DataRef&, const DataRef&) = default;
};

struct Provenance {
    std::uint64_t seed = 0;
    std::vector<DataRef> train;
    std::vector<DataRef> eval;
    trading::TradingConfig trading;
    double svm_tol = 1e-3;
    std::string csv_schema;
};

struct ModelFile {
    ga::ModelBundle bundle;
    Provenance provenance;
};

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline std::string hex64(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << v;
    return out.str();
}

inline std::uint64_t parse_hex64(const std::string& s) {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used, 16);
    if (used != s.size()) throw Error(ErrorKind::ModelFormat, "bad fingerprint '" + s + "'");
    return v;
}

inline Json data_refs_to_json(const std::vector<DataRef>& refs) {
    Json arr = Json::array();
    for (const auto& r : refs) arr.push_back({{"path", r.path}, {"fnv1a64", hex64(r.fingerprint)}});
    return arr;
}

inline std::vector<DataRef> data_refs_from_json(const Json& arr) {
    std::vector<DataRef> out;
    for (const auto& r : arr)
        out.push_back({r.at("path").get<std::string>(), parse_hex64(r.at("fnv1a64").get<std::string>())});
    return out;
}

inline svm::Kernel kernel_from_json(const Json& j) {
    const auto kind = j.at("kernel").get<std::string>();
    if (kind == "linear") return svm::Kernel::linear();
    if (kind == "polynomial") return svm::Kernel::polynomial(j.at("degree").get<int>());
    if (kind == "rbf") return svm::Kernel::rbf(j.at("gamma").get<double>());
    throw Error(ErrorKind::ModelFormat, "unknown kernel '" + kind + "'");
}

} // namespace detail

inline Json to_json(const ModelFile& file) {
    const auto& b = file.bundle;
    Json genes = Json::array();
    for (std::size_t g = 0; g < b.gene_specs.size(); ++g) {
        const auto& s = b.gene_specs[g];
        genes.push_back({{"indicator", std::string(to_string(s.indicator))},
                         {"tw", b.chromosome.genes[g].tw},
                         {"selected", b.chromosome.genes[g].selected},
                         {"tw_min", s.tw_min},
                         {"tw_max", s.tw_max},
                         {"default_tw", s.default_tw}});
    }

    Json scaler = {{"method", std::string(to_string(b.scaler.method))}};
    if (b.scaler.method == ScalingMethod::ZScore) {
        scaler["mean"] = b.scaler.mean;
        scaler["stddev"] = b.scaler.stddev;
    } else {
        scaler["min"] = b.scaler.min;
        scaler["max"] = b.scaler.max;
    }

    Json vectors = Json::array();
    for (std::size_t k = 0; k < b.svm.support_vectors.rows(); ++k) {
        const auto row = b.svm.support_vectors.row(k);
        vectors.push_back(std::vector<double>(row.begin(), row.end()));
    }
    Json model = {{"kernel", std::string(svm::to_string(b.svm.kernel.kind))},
                  {"gamma", b.svm.kernel.gamma},
                  {"degree", b.svm.kernel.degree},
                  {"c", b.svm.cost},
                  {"bias", b.svm.bias},
                  {"dimension", b.svm.dimension()},
                  {"support_vectors", std::move(vectors)},
                  {"dual_coefs", b.svm.dual_coefs}};

    const auto& p = file.provenance;
    Json provenance = {{"seed", p.seed},
                       {"fitness", b.fitness},
                       {"generation_found", b.generation_found},
                       {"train", detail::data_refs_to_json(p.train)},
                       {"eval", detail::data_refs_to_json(p.eval)},
                       {"initial_cash", p.trading.initial_cash},
                       {"cost_per_transaction", p.trading.cost_per_transaction},
                       {"svm_tol", p.svm_tol},
                       {"csv_schema", p.csv_schema}};

    return Json{{"format_version", kModelFormatVersion},
                {"genes", std::move(genes)},
                {"scaler", std::move(scaler)},
                {"svm", std::move(model)},
                {"provenance", std::move(provenance)}};
}

inline ModelFile model_from_json(const Json& j) {
    try {
        if (j.at("format_version").get<int>() != kModelFormatVersion)
            throw Error(ErrorKind::ModelFormat, "unsupported format_version");
        ModelFile file;
        auto& b = file.bundle;
        for (const auto& g : j.at("genes")) {
            const auto name = g.at("indicator").get<std::string>();
            const auto id = parse_indicator(name);
            if (!id) throw Error(ErrorKind::ModelFormat, "unknown indicator '" + name + "'");
            b.gene_specs.push_back(
                {*id, g.at("tw_min").get<int>(), g.at("tw_max").get<int>(), g.at("default_tw").get<int>()});
            b.chromosome.genes.push_back({g.at("tw").get<int>(), g.at("selected").get<bool>()});
        }

        const auto& s = j.at("scaler");
        const auto method = s.at("method").get<std::string>();
        if (method == "zscore") {
            b.scaler.method = ScalingMethod::ZScore;
            b.scaler.mean = s.at("mean").get<std::vector<double>>();
            b.scaler.stddev = s.at("stddev").get<std::vector<double>>();
            if (b.scaler.mean.size() != b.scaler.stddev.size())
                throw Error(ErrorKind::ModelFormat, "scaler mean/stddev lengths differ");
        } else if (method == "minmax") {
            b.scaler.method = ScalingMethod::MinMax;
            b.scaler.min = s.at("min").get<std::vector<double>>();
            b.scaler.max = s.at("max").get<std::vector<double>>();
            if (b.scaler.min.size() != b.scaler.max.size())
                throw Error(ErrorKind::ModelFormat, "scaler min/max lengths differ");
        } else {
            throw Error(ErrorKind::ModelFormat, "unknown scaling method '" + method + "'");
        }

        const auto& m = j.at("svm");
        b.svm.kernel = detail::kernel_from_json(m);
        b.svm.cost = m.at("c").get<double>();
        b.svm.bias = m.at("bias").get<double>();
        const auto dim = m.at("dimension").get<std::size_t>();
        b.svm.support_vectors = FeatureMatrix(0, dim);
        for (const auto& row : m.at("support_vectors"))
            b.svm.support_vectors.append_row(row.get<std::vector<double>>());
        b.svm.dual_coefs = m.at("dual_coefs").get<std::vector<double>>();
        if (b.svm.dual_coefs.size() != b.svm.support_vectors.rows())
            throw Error(ErrorKind::ModelFormat, "support vector and coefficient counts differ");

        const auto& p = j.at("provenance");
        b.fitness = p.at("fitness").get<double>();
        b.generation_found = p.at("generation_found").get<std::size_t>();
        file.provenance.seed = p.at("seed").get<std::uint64_t>();
        file.provenance.train = detail::data_refs_from_json(p.at("train"));
        file.provenance.eval = detail::data_refs_from_json(p.at("eval"));
        file.provenance.trading.initial_cash = p.at("initial_cash").get<double>();
        file.provenance.trading.cost_per_transaction = p.at("cost_per_transaction").get<double>();
        file.provenance.svm_tol = p.at("svm_tol").get<double>();
        file.provenance.csv_schema = p.at("csv_schema").get<std::string>();

        const std::size_t selected = b.chromosome.selected_count();
        if (b.scaler.features() != selected || dim != selected)
            throw Error(ErrorKind::ModelFormat, "scaler/svm dimensions do not match the selected genes");
        return file;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ModelFormat, e.what());
    } catch (const std::invalid_argument& e) {
        throw Error(ErrorKind::ModelFormat, e.what());
    }
}

inline std::string serialize(const ModelFile& file) { return to_json(file).dump(2) + "\n"; }

inline ModelFile deserialize(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ModelFormat, e.what());
    }
    return model_from_json(j);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text, bool overwrite) {
    if (!overwrite && std::filesystem::exists(path))
        throw Error(ErrorKind::OutputExists, path.string() + " exists (use --force)");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::FileNotFound, "cannot write " + path.string());
    out << text;
}

inline void save_model(const std::filesystem::path& path, const ModelFile& file, bool overwrite) {
    write_text_file(path, serialize(file), overwrite);
}

inline ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::FileNotFound, path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return deserialize(text.str());
}

/// `{tp, rr, mdd, n_trades, ...}` summary of one simulation.
inline Json summary_json(const trading::SimulationResult& r) {
    return Json{{"tp", r.total_profit},
                {"rr", r.rate_of_return},
                {"mdd", r.max_drawdown},
                {"n_trades", r.trades.size()},
                {"n_bars", r.equity_curve.size()},
                {"trade_fraction", r.trade_fraction()},
                {"open_position", r.open_position}};
}

} // namespace gatwo
