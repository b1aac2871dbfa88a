#pragma once

#include "evoml/data.hpp"
#include "evoml/fitness.hpp"
#include "evoml/pipeline.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evoml {

/// dynamic: every living individual is re-scored each generation under a fresh
/// fold seed and its fitness is the lifetime mean. static: one k-fold score with
/// a fixed seed, computed once per individual.
enum class FitnessMode { dynamic, static_kfold };

std::string_view to_string(FitnessMode mode);
FitnessMode parse_mode(std::string_view text);

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when the time budget ran out before generation 1 completed.
class InsufficientBudget : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EvolutionConfig {
    std::size_t population_size { 24 };
    std::optional<std::size_t> offspring_size; // defaults to population_size
    std::size_t k { 5 };
    std::optional<long> max_generations { 20 };
    std::optional<double> time_budget_seconds;
    FitnessMode mode { FitnessMode::dynamic };
    std::uint64_t master_seed { 0 };
    std::size_t max_depth { kDefaultMaxDepth };
    double mutation_probability { 0.9 };
    double crossover_probability { 0.1 };
    std::size_t workers { 1 };
    // Keeps population + offspring every generation instead of running selection.
    bool survive_all { false };

    [[nodiscard]] std::size_t offspring() const { return offspring_size.value_or(population_size); }
    void validate() const;
};

struct FrontierEntry {
    std::uint64_t id;
    std::string pipeline;
    double objective1;
    std::size_t objective2;
    long birth_generation;
};

struct GenerationLog {
    long generation { 0 };
    std::int64_t evaluations_this_generation { 0 };
    std::int64_t evaluations_performed { 0 }; // cumulative model trainings, k per scored individual
    double best_objective1 { 0.0 };
    std::vector<FrontierEntry> frontier;
    double elapsed_seconds { 0.0 };
};

struct EvolveResult {
    Individual final_individual;
    Fitness final_fitness;
    std::vector<GenerationLog> logs;
    std::vector<Individual> frontier;
    std::vector<Individual> population;
    long generations_completed { 0 };
    std::int64_t evaluations { 0 };
    bool stopped_by_time { false };

    [[nodiscard]] long final_age() const { return final_individual.age(generations_completed); }
};

/// a dominates b: no worse in both objectives and strictly better in one.
bool dominates(Fitness const& a, Fitness const& b);

/// Fronts of indices; front 0 is the non-dominated set. Indices ascend within each front.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<Fitness const> points);

/// Crowding distance per member of one front. Extremes in either objective are infinite.
std::vector<double> crowding_distance(std::span<Fitness const> front);

/// NSGA-II survivor selection over fitness/id pairs; returns pool indices ordered by (rank, id).
std::vector<std::size_t> nsga2_select_indices(std::span<Fitness const> fitness, std::span<std::uint64_t const> ids, std::size_t n);

std::vector<Individual> nsga2_select(std::span<Individual const> pool, std::size_t n, std::size_t max_depth = kDefaultMaxDepth);

using GenerationCallback = std::function<void(GenerationLog const&)>;

EvolveResult evolve(EvolutionConfig const& cfg, Dataset const& train, GenerationCallback const& on_generation = {});

/// Model trainings performed by `evolve` after `generations` generations (generation 0 included).
std::int64_t evaluation_count(FitnessMode mode, std::int64_t k, std::int64_t generations, std::int64_t population_size, std::int64_t offspring_size);

/// Cost of explicitly repeating k-fold r times for every offspring.
std::int64_t repeated_kfold_count(std::int64_t r, std::int64_t k, std::int64_t generations, std::int64_t offspring_size);

std::uint64_t generation_fold_seed(EvolutionConfig const& cfg, long generation);

} // namespace evoml
