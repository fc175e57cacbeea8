#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gatwo/model_io.hpp"
#include "gatwo/synthetic.hpp"

// Writes a synthetic series with a planted RSI rule, split into a training
// part, two fitness-evaluation parts and a held-out test part (40/20/20/20).
int main(int argc, char** argv) {
    gatwo::PlantedSignalConfig config;
    std::string out = ".";
    bool force = false;

    CLI::App app{"Synthetic OHLCV generator with a planted RSI signal"};
    app.name("gatwo-synth");
    app.add_option("--out", out, "Output directory")->capture_default_str();
    app.add_option("--seed", config.seed)->capture_default_str();
    app.add_option("--bars", config.bars)->capture_default_str()->check(CLI::Range(50, 1'000'000));
    app.add_option("--window", config.window, "RSI window of the planted rule")
        ->capture_default_str()->check(CLI::Range(2, 100));
    app.add_option("--hit-rate", config.hit_rate, "Probability the rule is obeyed")
        ->capture_default_str()->check(CLI::Range(0.0, 1.0));
    app.add_option("--volatility", config.daily_volatility)->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--symbol", config.symbol)->capture_default_str();
    app.add_flag("--force", force, "Overwrite existing files");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto series = gatwo::planted_signal_series(config);
        const std::size_t n = series.size();
        const std::size_t cut[] = {0, n * 2 / 5, n * 3 / 5, n * 4 / 5, n};
        const char* names[] = {"train", "eval1", "eval2", "test"};
        const auto dir = std::filesystem::path(out);
        const auto write = [&](const gatwo::PriceSeries& s, const std::string& file) {
            std::ostringstream text;
            gatwo::write_csv(s, text);
            gatwo::write_text_file(dir / file, text.str(), force);
            std::cout << (dir / file).string() << ' ' << s.size() << " bars\n";
        };
        write(series, config.symbol + ".csv");
        for (int k = 0; k < 4; ++k)
            write(series.slice(cut[k], cut[k + 1] - cut[k]), config.symbol + "_" + names[k] + ".csv");
    } catch (const gatwo::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == gatwo::ErrorKind::OutputExists ? 1 : 3;
    }
    return 0;
}
