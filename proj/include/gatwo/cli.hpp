#pragma once

#include <algorithm>
#include <cctype>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gatwo/commands.hpp"

namespace gatwo::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kPipelineError = 3 };

inline int exit_code(const Error& e) {
    if (e.is_data_error()) return kDataError;
    if (e.kind() == ErrorKind::OutputExists || e.kind() == ErrorKind::InvalidArgument) return kUsage;
    return kPipelineError;
}

namespace detail {

inline const std::set<std::string>& list_keys() {
    static const std::set<std::string> keys{"train", "eval", "test", "c-values", "gamma-values"};
    return keys;
}

/// Reads `key = value` lines (`#` starts a comment) into command-line
/// tokens. List keys take whitespace- or comma-separated values.
inline std::vector<std::pair<std::string, std::vector<std::string>>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::FileNotFound, "config file " + path);
    std::vector<std::pair<std::string, std::vector<std::string>>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string text(gatwo::detail::trim(line));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::InvalidArgument, path + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key(gatwo::detail::trim(std::string_view(text).substr(0, eq)));
        std::string value(gatwo::detail::trim(std::string_view(text).substr(eq + 1)));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        std::vector<std::string> values;
        if (list_keys().count(key)) {
            std::replace(value.begin(), value.end(), ',', ' ');
            std::istringstream words(value);
            for (std::string w; words >> w;) values.push_back(w);
        } else {
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
                value = value.substr(1, value.size() - 2);
            values.push_back(value);
        }
        entries.emplace_back(std::move(key), std::move(values));
    }
    return entries;
}

/// Command-line tokens with config-file entries spliced in before the
/// user's own flags; a key given on the command line wins.
inline std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string config_path;
    std::vector<std::string> rest;
    std::set<std::string> given;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config" && i + 1 < args.size()) {
            config_path = args[++i];
            continue;
        }
        if (a.rfind("--config=", 0) == 0) {
            config_path = a.substr(9);
            continue;
        }
        if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos
                                                                                                : a.find('=') - 2));
        rest.push_back(a);
    }
    if (config_path.empty() || rest.empty()) return rest;

    std::vector<std::string> out{rest.front()};
    for (auto& [key, values] : read_config_file(config_path)) {
        if (given.count(key)) continue;
        if (values.size() == 1 && (values[0] == "true" || values[0] == "false")) {
            if (values[0] == "true") out.push_back("--" + key);
            continue;
        }
        out.push_back("--" + key);
        out.insert(out.end(), values.begin(), values.end());
    }
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

} // namespace detail

/// Effective defaults as `key=value` lines, in flag spelling.
inline std::string describe(const RunConfig& c) {
    const auto join = [](const std::vector<double>& v) {
        std::string s;
        for (double x : v) s += (s.empty() ? "" : ",") + format_number(x);
        return s;
    };
    std::ostringstream out;
    out << "c=" << format_number(c.pipeline.svm.cost) << '\n'
        << "gamma=" << format_number(c.pipeline.svm.kernel.gamma) << '\n'
        << "tol=" << format_number(c.pipeline.svm.tol) << '\n'
        << "scaling=" << to_string(c.pipeline.scaling) << '\n'
        << "cash=" << format_number(c.pipeline.trading.initial_cash) << '\n'
        << "cost=" << format_number(c.pipeline.trading.cost_per_transaction) << '\n'
        << "population=" << c.ga.population_size << '\n'
        << "elite=" << format_number(c.ga.elite_fraction) << '\n'
        << "crossover=" << format_number(c.ga.crossover_fraction) << '\n'
        << "mutation=" << format_number(c.ga.mutation_rate) << '\n'
        << "stall=" << c.ga.stall_generations << '\n'
        << "max-generations=" << c.ga.max_generations << '\n'
        << "threads=" << c.ga.threads << '\n'
        << "seed=" << c.seed << '\n'
        << "c-values=" << join(c.c_values) << '\n'
        << "gamma-values=" << join(c.gamma_values) << '\n';
    return out.str();
}

/// Parses and runs one command. Progress goes to `out`, diagnostics to `err`.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    RunConfig config;
    std::string config_file;
    double gamma = config.pipeline.svm.kernel.gamma;
    std::string scaling = std::string(to_string(config.pipeline.scaling));

    CLI::App app{"Genetic time-window optimisation of technical indicators for SVM trading"};
    app.name("gatwo");
    app.require_subcommand(1);

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--csv-schema", config.csv_schema,
                        "Column names, e.g. \"date=Date,close=Adj Close\"");
        cmd->add_option("--out", config.out, "Output directory")->capture_default_str();
        cmd->add_option("--cost", config.pipeline.trading.cost_per_transaction, "Cost per transaction")
            ->capture_default_str()->check(CLI::NonNegativeNumber);
        cmd->add_option("--cash", config.pipeline.trading.initial_cash, "Initial cash")
            ->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_flag("--force", config.force, "Overwrite existing outputs");
        cmd->add_option("--config", config_file, "Read options from a key = value file");
    };
    const auto add_training = [&](CLI::App* cmd) {
        cmd->add_option("--train", config.train, "Training CSV files")->required();
        cmd->add_option("--eval", config.eval, "Fitness-evaluation CSV files")->required();
        cmd->add_option("--seed", config.seed, "Random seed")->capture_default_str();
        cmd->add_option("--tol", config.pipeline.svm.tol, "SVM stopping tolerance")
            ->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_option("--scaling", scaling, "zscore or minmax")
            ->capture_default_str()->check(CLI::IsMember({"zscore", "minmax"}));
        cmd->add_option("--population", config.ga.population_size)->capture_default_str();
        cmd->add_option("--elite", config.ga.elite_fraction, "Surviving fraction")->capture_default_str();
        cmd->add_option("--crossover", config.ga.crossover_fraction, "Crossover fraction")->capture_default_str();
        cmd->add_option("--mutation", config.ga.mutation_rate, "Per-gene mutation rate")->capture_default_str();
        cmd->add_option("--stall", config.ga.stall_generations, "Stop after this many generations without improvement")
            ->capture_default_str();
        cmd->add_option("--max-generations", config.ga.max_generations, "Generation cap (0 = none)")
            ->capture_default_str();
        cmd->add_option("--threads", config.ga.threads, "Worker threads (0 = hardware)")->capture_default_str();
    };

    auto* grid = app.add_subcommand("grid-search", "Rank (c, gamma) pairs by average rate of return");
    add_common(grid);
    add_training(grid);
    grid->add_option("--c-values", config.c_values, "Cost parameters to try");
    grid->add_option("--gamma-values", config.gamma_values, "RBF gamma values to try");
    grid->add_flag("--fast", config.fast, "Score the default windows instead of running the GA");

    auto* train = app.add_subcommand("train", "Evolve indicator windows and save the model");
    add_common(train);
    add_training(train);
    train->add_option("--c", config.pipeline.svm.cost, "SVM cost")->capture_default_str()->check(CLI::PositiveNumber);
    train->add_option("--gamma", gamma, "RBF gamma")->capture_default_str()->check(CLI::PositiveNumber);
    train->add_option("--model", config.model, "Model path (default OUT/model.json)");

    auto* evaluate = app.add_subcommand("evaluate", "Trade a saved model on test series against buy-and-hold");
    add_common(evaluate);
    evaluate->add_option("--model", config.model, "Model file")->required();
    evaluate->add_option("--test", config.test, "Test CSV files")->required();

    auto* compare = app.add_subcommand("compare-default", "Compare a saved model with default windows");
    add_common(compare);
    compare->add_option("--model", config.model, "Model file")->required();
    compare->add_option("--test", config.test, "Test CSV files")->required();
    compare->add_option("--train", config.train, "Training CSV files (default: those recorded in the model)");

    auto* defaults = app.add_subcommand("defaults", "Print default settings");

    try {
        auto expanded = detail::expand_config(args);
        std::reverse(expanded.begin(), expanded.end());
        app.parse(expanded);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e);
    }

    try {
        config.pipeline.svm.kernel = svm::Kernel::rbf(gamma);
        config.pipeline.scaling = scaling == "minmax" ? ScalingMethod::MinMax : ScalingMethod::ZScore;
        if (defaults->parsed()) {
            out << describe(config);
        } else if (grid->parsed()) {
            cmd_grid_search(config, out);
        } else if (train->parsed()) {
            cmd_train(config, out);
        } else if (evaluate->parsed()) {
            cmd_evaluate(config, out);
        } else if (compare->parsed()) {
            cmd_compare_default(config, out);
        }
    } catch (const Error& e) {
        err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kPipelineError;
    }
    return kOk;
}

inline int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(std::move(args), out, err);
}

} // namespace gatwo::cli
