#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "gatwo/error.hpp"
#include "gatwo/indicators.hpp"
#include "gatwo/pipeline.hpp"

namespace gatwo::ga {

/// Time-window bounds (inclusive) and the conventional default window of one indicator.
struct GeneSpec {
    IndicatorId indicator = IndicatorId::Stk;
    int tw_min = 1;
    int tw_max = 1;
    int default_tw = 1;

    friend bool operator==(const GeneSpec&, const GeneSpec&) = default;
};

/// The ten indicators with their searchable windows and defaults. ADX, +DI and
/// -DI share a range but each carries its own gene.
inline std::vector<GeneSpec> standard_gene_specs() {
    return {
        {IndicatorId::Stk, 8, 14, 9},      {IndicatorId::Std, 3, 6, 3},
        {IndicatorId::Rsi, 5, 14, 6},      {IndicatorId::Psy, 10, 15, 12},
        {IndicatorId::WmaBias, 6, 15, 10}, {IndicatorId::Cci, 6, 15, 14},
        {IndicatorId::PlusDi, 6, 15, 10},  {IndicatorId::MinusDi, 6, 15, 10},
        {IndicatorId::Adx, 6, 15, 10},     {IndicatorId::AroonUp, 19, 28, 25},
    };
}

struct Gene {
    int tw = 1;
    bool selected = false;

    friend auto operator<=>(const Gene&, const Gene&) = default;
};

/// One (time window, selection bit) pair per gene spec, in spec order.
struct Chromosome {
    std::vector<Gene> genes;

    [[nodiscard]] std::size_t selected_count() const {
        return static_cast<std::size_t>(
            std::count_if(genes.begin(), genes.end(), [](const Gene& g) { return g.selected; }));
    }

    friend auto operator<=>(const Chromosome&, const Chromosome&) = default;
};

struct GaConfig {
    std::size_t population_size = 30;
    double elite_fraction = 0.70;
    double crossover_fraction = 0.40;
    double mutation_rate = 0.10;
    std::size_t stall_generations = 100;
    /// 0 = no cap besides the stall rule.
    std::size_t max_generations = 0;
    std::uint64_t rng_seed = 0;
    /// Fitness evaluations run on this many threads; 0 = hardware concurrency.
    std::size_t threads = 0;
};

inline void check_config(const GaConfig& config) {
    auto fraction = [](double f) { return f >= 0.0 && f <= 1.0; };
    if (config.population_size < 2)
        throw Error(ErrorKind::InvalidArgument, "population size must be >= 2");
    if (!fraction(config.elite_fraction) || !fraction(config.crossover_fraction) ||
        !fraction(config.mutation_rate))
        throw Error(ErrorKind::InvalidArgument, "GA rates must lie in [0, 1]");
}

inline bool within_bounds(const Chromosome& c, std::span<const GeneSpec> specs) {
    if (c.genes.size() != specs.size()) return false;
    for (std::size_t g = 0; g < specs.size(); ++g)
        if (c.genes[g].tw < specs[g].tw_min || c.genes[g].tw > specs[g].tw_max) return false;
    return true;
}

/// Every indicator selected at its default window.
inline Chromosome default_chromosome(std::span<const GeneSpec> specs) {
    Chromosome c;
    for (const GeneSpec& s : specs) c.genes.push_back({s.default_tw, true});
    return c;
}

/// Selected indicators in gene order. STD reads %K at the STK gene's window,
/// whether or not STK itself is selected.
inline std::vector<IndicatorSpec> indicator_specs(std::span<const GeneSpec> specs, const Chromosome& c) {
    if (c.genes.size() != specs.size())
        throw Error(ErrorKind::DimensionMismatch, "chromosome and gene specs differ in length");
    int k_window = 9;
    for (std::size_t g = 0; g < specs.size(); ++g)
        if (specs[g].indicator == IndicatorId::Stk) k_window = c.genes[g].tw;
    std::vector<IndicatorSpec> out;
    for (std::size_t g = 0; g < specs.size(); ++g)
        if (c.genes[g].selected) out.push_back({specs[g].indicator, c.genes[g].tw, k_window});
    return out;
}

/// Independent, reproducible stream for (seed, generation, stream id).
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t generation, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(generation), static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

inline constexpr std::uint64_t kCloneStream = 1ULL << 40;
inline constexpr std::uint64_t kCrossoverStream = (1ULL << 40) + 1;

/// Turns on one uniformly chosen bit if nothing is selected.
inline void repair_selection(Chromosome& c, std::mt19937_64& rng) {
    if (c.genes.empty() || c.selected_count() > 0) return;
    std::uniform_int_distribution<std::size_t> pick(0, c.genes.size() - 1);
    c.genes[pick(rng)].selected = true;
}

inline Chromosome random_chromosome(std::span<const GeneSpec> specs, std::mt19937_64& rng) {
    Chromosome c;
    std::bernoulli_distribution coin(0.5);
    for (const GeneSpec& s : specs) {
        std::uniform_int_distribution<int> tw(s.tw_min, s.tw_max);
        const int value = tw(rng);
        c.genes.push_back({value, coin(rng)});
    }
    repair_selection(c, rng);
    return c;
}

inline std::vector<Chromosome> init_population(std::span<const GeneSpec> specs, const GaConfig& config) {
    check_config(config);
    std::vector<Chromosome> population;
    population.reserve(config.population_size);
    for (std::size_t slot = 0; slot < config.population_size; ++slot) {
        auto rng = make_rng(config.rng_seed, 0, slot);
        population.push_back(random_chromosome(specs, rng));
    }
    return population;
}

inline std::size_t elite_count(const GaConfig& config) {
    const double raw = config.elite_fraction * static_cast<double>(config.population_size);
    const auto n = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return std::clamp<std::size_t>(n, 1, config.population_size);
}

inline std::size_t crossover_count(const GaConfig& config) {
    const double raw = config.crossover_fraction * static_cast<double>(config.population_size);
    const auto n = static_cast<std::size_t>(std::floor(raw + 1e-9));
    return n - n % 2;
}

/// Indices of the population ranked best first; equal scores keep index order.
inline std::vector<std::size_t> rank(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

/// Keeps the top ceil(elite_fraction * size) individuals (best first) and
/// fills the remaining slots with clones of uniformly drawn survivors.
inline std::vector<Chromosome> select_elite(std::span<const Chromosome> population,
                                            std::span<const double> scores, const GaConfig& config,
                                            std::mt19937_64& rng) {
    if (population.size() != scores.size())
        throw Error(ErrorKind::DimensionMismatch, "scores and population differ in size");
    const auto order = rank(scores);
    const std::size_t keep = std::min(elite_count(config), population.size());
    std::vector<Chromosome> next;
    next.reserve(population.size());
    for (std::size_t k = 0; k < keep; ++k) next.push_back(population[order[k]]);
    std::uniform_int_distribution<std::size_t> pick(0, keep - 1);
    while (next.size() < population.size()) next.push_back(next[pick(rng)]);
    return next;
}

/// Pairs crossover_count() random individuals and swaps each (tw, selected)
/// pair between partners with probability 1/2. `exempt` never takes part.
inline void crossover(std::vector<Chromosome>& population, const GaConfig& config, std::mt19937_64& rng,
                      std::optional<std::size_t> exempt = std::nullopt) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < population.size(); ++i)
        if (!exempt || *exempt != i) candidates.push_back(i);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    std::size_t count = std::min(crossover_count(config), candidates.size());
    count -= count % 2;
    std::bernoulli_distribution coin(0.5);
    for (std::size_t k = 0; k + 1 < count; k += 2) {
        auto& a = population[candidates[k]].genes;
        auto& b = population[candidates[k + 1]].genes;
        for (std::size_t g = 0; g < a.size() && g < b.size(); ++g)
            if (coin(rng)) std::swap(a[g], b[g]);
    }
}

/// Each gene mutates independently with probability `rate`: a window redraws
/// uniformly within its bounds, a selection bit flips. Returns the number of
/// mutation events (a redraw may land on the old value).
inline std::size_t mutate_chromosome(Chromosome& c, std::span<const GeneSpec> specs, double rate,
                                     std::mt19937_64& rng) {
    std::bernoulli_distribution hit(rate);
    std::size_t events = 0;
    for (std::size_t g = 0; g < c.genes.size(); ++g) {
        if (hit(rng)) {
            std::uniform_int_distribution<int> tw(specs[g].tw_min, specs[g].tw_max);
            c.genes[g].tw = tw(rng);
            ++events;
        }
        if (hit(rng)) {
            c.genes[g].selected = !c.genes[g].selected;
            ++events;
        }
    }
    repair_selection(c, rng);
    return events;
}

/// Mutates every slot but `exempt`, each from its own (seed, generation, slot) stream.
inline void mutate(std::vector<Chromosome>& population, std::span<const GeneSpec> specs,
                   const GaConfig& config, std::uint64_t generation,
                   std::optional<std::size_t> exempt = std::nullopt) {
    for (std::size_t slot = 0; slot < population.size(); ++slot) {
        if (exempt && *exempt == slot) continue;
        auto rng = make_rng(config.rng_seed, generation, slot);
        mutate_chromosome(population[slot], specs, config.mutation_rate, rng);
    }
}

/// The trained artifact: chromosome, scaler and classifier plus the fitness it earned.
struct ModelBundle {
    std::vector<GeneSpec> gene_specs;
    Chromosome chromosome;
    ScalerState scaler;
    svm::Model svm;
    double fitness = 0.0;
    std::size_t generation_found = 0;

    [[nodiscard]] TrainedModel trained_model() const {
        return {indicator_specs(gene_specs, chromosome), scaler, svm};
    }

    friend bool operator==(const ModelBundle&, const ModelBundle&) = default;
};

struct FitnessResult {
    double score = -std::numeric_limits<double>::infinity();
    std::vector<double> per_set_rr;
    std::optional<ModelBundle> bundle;

    [[nodiscard]] bool viable() const { return std::isfinite(score); }
};

/// Mean rate of return over the evaluation sets of the model the chromosome
/// builds on the training sets. Pipeline failures score -infinity.
inline FitnessResult fitness(const Chromosome& chromosome, std::span<const GeneSpec> specs,
                             std::span<const LabeledSeries> train_sets,
                             std::span<const LabeledSeries> eval_sets, const PipelineConfig& config) {
    FitnessResult out;
    if (eval_sets.empty()) throw Error(ErrorKind::InvalidArgument, "no evaluation sets");
    try {
        const auto features = indicator_specs(specs, chromosome);
        if (features.empty()) throw Error(ErrorKind::EmptySpec, "no indicator selected");
        TrainedModel model = train_model(train_sets, features, config);
        double sum = 0.0;
        for (const LabeledSeries& set : eval_sets) {
            const double rr = evaluate_series(model, set.series, config.trading).result.rate_of_return;
            out.per_set_rr.push_back(rr);
            sum += rr;
        }
        out.score = sum / static_cast<double>(eval_sets.size());
        out.bundle = ModelBundle{{specs.begin(), specs.end()}, chromosome, std::move(model.scaler),
                                 std::move(model.svm), out.score, 0};
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidArgument) throw;
        out = FitnessResult{};
    }
    return out;
}

struct GenerationStats {
    std::size_t generation = 0;
    double best = 0.0;
    /// Mean over individuals with a finite score.
    double mean = 0.0;
    std::size_t stall = 0;
};

struct EvolutionResult {
    ModelBundle best;
    std::vector<GenerationStats> history;
};

namespace detail {

/// Evaluates `jobs` on up to `threads` workers; result k belongs to job k.
inline std::vector<FitnessResult> evaluate_all(const std::vector<Chromosome>& jobs,
                                               const std::function<FitnessResult(const Chromosome&)>& eval,
                                               std::size_t threads) {
    std::vector<FitnessResult> results(jobs.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, jobs.size());
    if (threads <= 1) {
        for (std::size_t k = 0; k < jobs.size(); ++k) results[k] = eval(jobs[k]);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (std::size_t k = next++; k < jobs.size(); k = next++) results[k] = eval(jobs[k]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

} // namespace detail

/// Elitist GA over (time window, selection) genes. Each generation: keep the
/// elite, clone survivors into the freed slots, cross over, mutate, score.
/// The best-ever individual is exempt from crossover and mutation. Stops after
/// `stall_generations` generations without a strict improvement.
inline EvolutionResult evolve(std::span<const LabeledSeries> train_sets,
                              std::span<const LabeledSeries> eval_sets, std::span<const GeneSpec> specs,
                              const GaConfig& ga_config, const PipelineConfig& pipeline,
                              const std::function<void(const GenerationStats&)>& on_generation = {},
                              const std::function<void(std::size_t, const std::vector<Chromosome>&)>&
                                  on_population = {}) {
    check_config(ga_config);
    std::map<Chromosome, double> cache;

    std::optional<ModelBundle> best;
    EvolutionResult result;
    std::size_t stall = 0;

    auto score_population = [&](const std::vector<Chromosome>& population, std::size_t generation) {
        std::vector<Chromosome> jobs;
        for (const Chromosome& c : population)
            if (!cache.contains(c) && std::find(jobs.begin(), jobs.end(), c) == jobs.end()) jobs.push_back(c);
        auto fresh = detail::evaluate_all(
            jobs,
            [&](const Chromosome& c) { return fitness(c, specs, train_sets, eval_sets, pipeline); },
            ga_config.threads);
        for (std::size_t k = 0; k < jobs.size(); ++k) cache.emplace(jobs[k], fresh[k].score);

        std::vector<double> scores;
        scores.reserve(population.size());
        for (const Chromosome& c : population) scores.push_back(cache.at(c));

        // Candidate: best of this generation, lowest index on ties.
        const std::size_t top = rank(scores).front();
        const bool improved = std::isfinite(scores[top]) && (!best || scores[top] > best->fitness);
        if (improved) {
            const auto job = std::find(jobs.begin(), jobs.end(), population[top]);
            // A chromosome already in the cache scored no better than the best so far.
            best = *fresh[static_cast<std::size_t>(job - jobs.begin())].bundle;
            best->generation_found = generation;
            stall = 0;
        } else if (generation > 0) {
            ++stall;
        }

        GenerationStats stats{generation, best ? best->fitness : -std::numeric_limits<double>::infinity(),
                              0.0, stall};
        std::size_t finite = 0;
        for (double s : scores)
            if (std::isfinite(s)) {
                stats.mean += s;
                ++finite;
            }
        stats.mean = finite > 0 ? stats.mean / static_cast<double>(finite) : stats.best;
        result.history.push_back(stats);
        if (on_population) on_population(generation, population);
        if (on_generation) on_generation(stats);
        return scores;
    };

    std::vector<Chromosome> population = init_population(specs, ga_config);
    std::vector<double> scores = score_population(population, 0);
    if (!best) throw Error(ErrorKind::NoViableChromosome, "every initial chromosome failed");

    for (std::size_t generation = 1;; ++generation) {
        if (stall >= ga_config.stall_generations) break;
        if (ga_config.max_generations != 0 && generation > ga_config.max_generations) break;

        auto clone_rng = make_rng(ga_config.rng_seed, generation, kCloneStream);
        population = select_elite(population, scores, ga_config, clone_rng);

        std::optional<std::size_t> exempt;
        const auto it = std::find(population.begin(), population.end(), best->chromosome);
        if (it != population.end()) exempt = static_cast<std::size_t>(it - population.begin());

        auto crossover_rng = make_rng(ga_config.rng_seed, generation, kCrossoverStream);
        crossover(population, ga_config, crossover_rng, exempt);
        mutate(population, specs, ga_config, generation, exempt);
        scores = score_population(population, generation);
    }
    result.best = std::move(*best);
    return result;
}

} // namespace gatwo::ga
