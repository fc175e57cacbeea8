#include <catch_amalgamated.hpp>

#include "gatwo/model_io.hpp"
#include "support.hpp"

using namespace gatwo;

namespace {

ModelFile trained_file() {
    const auto data = test::planted_split(2, 600);
    const auto specs = ga::standard_gene_specs();
    auto c = ga::default_chromosome(specs);
    c.genes[3].selected = false;
    c.genes[2].tw = 11;
    auto r = ga::fitness(c, specs, data.train, data.eval, PipelineConfig{});
    REQUIRE(r.viable());
    r.bundle->generation_found = 7;
    return {*r.bundle, Provenance{42, {{"a.csv", 0x0123456789abcdefULL}}, {{"b.csv", 1}, {"c.csv", 2}},
                                  {100000.0, 5.0}, 1e-3, "close=Adj Close"}};
}

ErrorKind load_error(const std::string& text) {
    try {
        deserialize(text);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InvalidArgument;
}

} // namespace

TEST_CASE("model file round-trips losslessly") {
    const auto file = trained_file();
    const auto text = serialize(file);
    const auto back = deserialize(text);
    CHECK(back.bundle == file.bundle);
    CHECK(back.provenance.seed == 42);
    CHECK(back.provenance.train == file.provenance.train);
    CHECK(back.provenance.eval == file.provenance.eval);
    CHECK(back.provenance.csv_schema == "close=Adj Close");
    CHECK(serialize(back) == text);

    const auto dir = test::scratch_dir("model_io");
    save_model(dir / "m.json", file, false);
    CHECK(load_model(dir / "m.json").bundle == file.bundle);
    CHECK(test::read_file(dir / "m.json") == text);
    try {
        save_model(dir / "m.json", file, false);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::OutputExists);
    }
    save_model(dir / "m.json", file, true);
}

TEST_CASE("model file layout") {
    const auto j = Json::parse(serialize(trained_file()));
    CHECK(j["format_version"] == 1);
    CHECK(j["genes"].size() == 10);
    CHECK(j["genes"][2]["indicator"] == "RSI");
    CHECK(j["genes"][2]["tw"] == 11);
    CHECK(j["genes"][3]["selected"] == false);
    CHECK(j["scaler"]["method"] == "zscore");
    CHECK(j["scaler"]["mean"].size() == 9);
    CHECK(j["svm"]["kernel"] == "rbf");
    CHECK(j["svm"]["gamma"] == 0.25);
    CHECK(j["svm"]["c"] == 1.0);
    CHECK(j["svm"]["dimension"] == 9);
    CHECK(j["svm"]["support_vectors"].size() == j["svm"]["dual_coefs"].size());
    CHECK(j["provenance"]["generation_found"] == 7);
    CHECK(j["provenance"]["train"][0]["fnv1a64"] == "0123456789abcdef");
}

TEST_CASE("a reloaded model predicts identically") {
    const auto data = test::planted_split(2, 600);
    const auto file = trained_file();
    const auto back = deserialize(serialize(file));
    const auto a = evaluate_series(file.bundle.trained_model(), data.test, {});
    const auto b = evaluate_series(back.bundle.trained_model(), data.test, {});
    CHECK(a.signals == b.signals);
    CHECK(a.result.rate_of_return == b.result.rate_of_return);
}

TEST_CASE("corrupt model files are rejected") {
    auto j = Json::parse(serialize(trained_file()));
    CHECK(load_error("{not json") == ErrorKind::ModelFormat);
    CHECK(load_error("{}") == ErrorKind::ModelFormat);
    auto bad = j;
    bad["format_version"] = 99;
    CHECK(load_error(bad.dump()) == ErrorKind::ModelFormat);
    bad = j;
    bad["genes"][0]["indicator"] = "MACD";
    CHECK(load_error(bad.dump()) == ErrorKind::ModelFormat);
    bad = j;
    bad["genes"][3]["selected"] = true;
    CHECK(load_error(bad.dump()) == ErrorKind::ModelFormat);
    bad = j;
    bad["svm"]["dual_coefs"].erase(0);
    CHECK(load_error(bad.dump()) == ErrorKind::ModelFormat);
    bad = j;
    bad["svm"]["kernel"] = "sigmoid";
    CHECK(load_error(bad.dump()) == ErrorKind::ModelFormat);
    bad = j;
    bad["provenance"]["train"][0]["fnv1a64"] = "xyz";
    CHECK(load_error(bad.dump()) == ErrorKind::ModelFormat);
    CHECK(Error(ErrorKind::ModelFormat, "").is_data_error());
}

TEST_CASE("simulation summary json") {
    const auto r = trading::simulate(test::from_closes({100, 110}), std::vector<int>{1, 0}, {});
    const auto j = summary_json(r);
    CHECK(j["tp"] == 9980.0);
    CHECK(j["rr"] == 9.98);
    CHECK(j["mdd"] == 0.0);
    CHECK(j["n_trades"] == 2);
}
