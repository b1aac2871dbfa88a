#include "evoml/evolution.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace evoml {

std::string_view to_string(FitnessMode mode)
{
    return mode == FitnessMode::dynamic ? "dynamic" : "static";
}

FitnessMode parse_mode(std::string_view text)
{
    if (text == "dynamic") {
        return FitnessMode::dynamic;
    }
    if (text == "static") {
        return FitnessMode::static_kfold;
    }
    throw ConfigError("unknown fitness mode '" + std::string(text) + "' (expected dynamic or static)");
}

void EvolutionConfig::validate() const
{
    if (population_size < 2) {
        throw ConfigError("population size must be at least 2");
    }
    if (offspring() < 1) {
        throw ConfigError("offspring size must be at least 1");
    }
    if (k < 2) {
        throw ConfigError("k must be at least 2");
    }
    if (max_depth < 1) {
        throw ConfigError("max depth must be at least 1");
    }
    if (!max_generations && !time_budget_seconds) {
        throw ConfigError("either a generation limit or a time budget must be finite");
    }
    if (max_generations && *max_generations < 0) {
        throw ConfigError("generation limit must be non-negative");
    }
    if (time_budget_seconds && !(*time_budget_seconds >= 0.0)) {
        throw ConfigError("time budget must be non-negative");
    }
    if (max_generations && *max_generations == 0 && time_budget_seconds && *time_budget_seconds == 0.0) {
        throw ConfigError("zero generations with a zero time budget leaves no work");
    }
    if (mutation_probability < 0.0 || crossover_probability < 0.0 || mutation_probability + crossover_probability <= 0.0) {
        throw ConfigError("operator probabilities must be non-negative and not both zero");
    }
}

bool dominates(Fitness const& a, Fitness const& b)
{
    bool const no_worse = a.objective1 >= b.objective1 && a.objective2 <= b.objective2;
    bool const better = a.objective1 > b.objective1 || a.objective2 < b.objective2;
    return no_worse && better;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<Fitness const> points)
{
    auto const n = points.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> counter(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (dominates(points[p], points[q])) {
                dominated[p].push_back(q);
            } else if (dominates(points[q], points[p])) {
                ++counter[p];
            }
        }
        if (counter[p] == 0) {
            fronts[0].push_back(p);
        }
    }
    for (std::size_t i = 0; i < fronts.size() && !fronts[i].empty(); ++i) {
        std::vector<std::size_t> next;
        for (auto p : fronts[i]) {
            for (auto q : dominated[p]) {
                if (--counter[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        if (!next.empty()) {
            fronts.push_back(std::move(next));
        }
    }
    if (fronts.back().empty()) {
        fronts.pop_back();
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<Fitness const> front)
{
    auto const n = front.size();
    std::vector<double> distance(n, 0.0);
    if (n == 0) {
        return distance;
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> order(n);

    auto accumulate = [&](auto value) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return value(a) < value(b); });
        distance[order.front()] = inf;
        distance[order.back()] = inf;
        double const span = value(order.back()) - value(order.front());
        if (span <= 0.0) {
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            distance[order[i]] += (value(order[i + 1]) - value(order[i - 1])) / span;
        }
    };
    accumulate([&](std::size_t i) { return front[i].objective1; });
    accumulate([&](std::size_t i) { return static_cast<double>(front[i].objective2); });
    return distance;
}

std::vector<std::size_t> nsga2_select_indices(std::span<Fitness const> fitness, std::span<std::uint64_t const> ids, std::size_t n)
{
    if (fitness.size() < n) {
        throw std::invalid_argument("nsga2_select: pool smaller than the requested size");
    }
    if (ids.size() != fitness.size()) {
        throw std::invalid_argument("nsga2_select: id count does not match pool");
    }
    auto const by_id = [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; };

    std::vector<std::size_t> chosen;
    for (auto const& front : fast_nondominated_sort(fitness)) {
        if (chosen.size() == n) {
            break;
        }
        std::vector<std::size_t> members(front);
        if (chosen.size() + members.size() > n) {
            std::vector<Fitness> points;
            for (auto i : members) {
                points.push_back(fitness[i]);
            }
            auto const distance = crowding_distance(points);
            std::vector<std::size_t> order(members.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](auto a, auto b) {
                if (distance[a] != distance[b]) {
                    return distance[a] > distance[b];
                }
                return ids[members[a]] < ids[members[b]];
            });
            order.resize(n - chosen.size());
            std::vector<std::size_t> kept;
            for (auto o : order) {
                kept.push_back(members[o]);
            }
            members = std::move(kept);
        }
        std::sort(members.begin(), members.end(), by_id);
        chosen.insert(chosen.end(), members.begin(), members.end());
    }
    return chosen;
}

std::vector<Individual> nsga2_select(std::span<Individual const> pool, std::size_t n, std::size_t max_depth)
{
    std::vector<Fitness> fitness;
    std::vector<std::uint64_t> ids;
    for (auto const& ind : pool) {
        fitness.push_back(ind.fitness(max_depth));
        ids.push_back(ind.id);
    }
    std::vector<Individual> out;
    for (auto i : nsga2_select_indices(fitness, ids, n)) {
        out.push_back(pool[i]);
    }
    return out;
}

std::int64_t evaluation_count(FitnessMode mode, std::int64_t k, std::int64_t generations, std::int64_t population_size, std::int64_t offspring_size)
{
    std::int64_t const initial = k * population_size;
    if (mode == FitnessMode::static_kfold) {
        return k * generations * offspring_size + initial;
    }
    return k * generations * (offspring_size + population_size) + initial;
}

std::int64_t repeated_kfold_count(std::int64_t r, std::int64_t k, std::int64_t generations, std::int64_t offspring_size)
{
    return r * k * generations * offspring_size;
}

std::uint64_t generation_fold_seed(EvolutionConfig const& cfg, long generation)
{
    if (cfg.mode == FitnessMode::static_kfold) {
        return cfg.master_seed;
    }
    return cfg.master_seed + static_cast<std::uint64_t>(generation);
}

namespace {

struct Ranking {
    std::vector<std::size_t> rank;
    std::vector<double> crowding;
};

Ranking rank_population(std::vector<Fitness> const& fitness)
{
    Ranking r { std::vector<std::size_t>(fitness.size(), 0), std::vector<double>(fitness.size(), 0.0) };
    auto const fronts = fast_nondominated_sort(fitness);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        std::vector<Fitness> points;
        for (auto i : fronts[f]) {
            points.push_back(fitness[i]);
        }
        auto const distance = crowding_distance(points);
        for (std::size_t j = 0; j < fronts[f].size(); ++j) {
            r.rank[fronts[f][j]] = f;
            r.crowding[fronts[f][j]] = distance[j];
        }
    }
    return r;
}

class Engine {
public:
    Engine(EvolutionConfig const& cfg, Dataset const& train)
        : cfg_(cfg), train_(train), started_(std::chrono::steady_clock::now()) {}

    EvolveResult run(GenerationCallback const& on_generation)
    {
        std::vector<Individual> population;
        for (std::size_t i = 0; i < cfg_.population_size; ++i) {
            auto tree = random_pipeline(derive_seed(cfg_.master_seed, { 0x1417ULL, i }), cfg_.max_depth);
            population.push_back(Individual { next_id_++, std::move(tree), 0, {} });
        }
        auto evaluated = evaluate(population, 0);
        log_generation(0, evaluated, population, on_generation);

        long completed = 0;
        bool stopped_by_time = false;
        for (long gen = 1;; ++gen) {
            if (cfg_.max_generations && gen > *cfg_.max_generations) {
                break;
            }
            if (cfg_.time_budget_seconds && elapsed() >= *cfg_.time_budget_seconds) {
                stopped_by_time = true;
                break;
            }
            auto offspring = breed(population, gen);
            std::vector<Individual> pool;
            pool.reserve(population.size() + offspring.size());
            std::move(population.begin(), population.end(), std::back_inserter(pool));
            std::move(offspring.begin(), offspring.end(), std::back_inserter(pool));

            evaluated = evaluate(pool, gen);
            population = cfg_.survive_all ? std::move(pool) : nsga2_select(pool, cfg_.population_size, cfg_.max_depth);
            log_generation(gen, evaluated, population, on_generation);
            completed = gen;
        }

        if (completed == 0 && stopped_by_time && cfg_.max_generations.value_or(1) > 0) {
            throw InsufficientBudget("time budget exhausted before the first generation completed");
        }

        auto frontier = frontier_of(population);
        auto best = std::max_element(frontier.begin(), frontier.end(), [&](auto const& a, auto const& b) {
            auto const fa = a.fitness(cfg_.max_depth);
            auto const fb = b.fitness(cfg_.max_depth);
            if (fa.objective1 != fb.objective1) {
                return fa.objective1 < fb.objective1;
            }
            if (fa.objective2 != fb.objective2) {
                return fa.objective2 > fb.objective2;
            }
            return a.id > b.id;
        });
        EvolveResult result { *best, best->fitness(cfg_.max_depth), std::move(logs_), std::move(frontier), std::move(population), completed, evaluations_, stopped_by_time };
        return result;
    }

private:
    double elapsed() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    }

    // Scores every individual that needs a score this generation and appends it to
    // its ledger. Returns the number of individuals scored.
    std::size_t evaluate(std::vector<Individual>& individuals, long gen)
    {
        std::vector<std::size_t> pending;
        for (std::size_t i = 0; i < individuals.size(); ++i) {
            if (cfg_.mode == FitnessMode::dynamic || individuals[i].ledger.empty()) {
                pending.push_back(i);
            }
        }
        auto const fold_seed = generation_fold_seed(cfg_, gen);
        std::vector<KFoldResult> results(pending.size());
        detail::parallel_for(pending.size(), cfg_.workers, [&](std::size_t j) {
            results[j] = kfold_score(individuals[pending[j]].tree, train_, cfg_.k, fold_seed);
        });
        for (std::size_t j = 0; j < pending.size(); ++j) {
            auto& ind = individuals[pending[j]];
            ind = record_generation(std::move(ind), results[j].score, gen, results[j].failed);
        }
        evaluations_ += static_cast<std::int64_t>(cfg_.k * pending.size());
        return pending.size();
    }

    std::vector<Individual> breed(std::vector<Individual> const& population, long gen)
    {
        std::vector<Fitness> fitness;
        for (auto const& ind : population) {
            fitness.push_back(ind.fitness(cfg_.max_depth));
        }
        auto const ranking = rank_population(fitness);
        auto better = [&](std::size_t a, std::size_t b) {
            if (ranking.rank[a] != ranking.rank[b]) {
                return ranking.rank[a] < ranking.rank[b];
            }
            if (ranking.crowding[a] != ranking.crowding[b]) {
                return ranking.crowding[a] > ranking.crowding[b];
            }
            return population[a].id < population[b].id;
        };
        auto tournament = [&](Rng& rng) -> PipelineTree const& {
            auto const a = rng.index(population.size());
            auto const b = rng.index(population.size());
            return population[better(b, a) ? b : a].tree;
        };

        double const crossover_share = cfg_.crossover_probability / (cfg_.crossover_probability + cfg_.mutation_probability);
        std::vector<Individual> offspring;
        for (std::size_t j = 0; j < cfg_.offspring(); ++j) {
            Rng rng(derive_seed(cfg_.master_seed, { 0x0ff5ULL, static_cast<std::uint64_t>(gen), j }));
            bool const cross = rng.chance(crossover_share);
            auto const& first = tournament(rng);
            auto tree = cross ? crossover(first, tournament(rng), rng.next(), cfg_.max_depth) : mutate(first, rng.next(), cfg_.max_depth);
            offspring.push_back(Individual { next_id_++, std::move(tree), gen, {} });
        }
        return offspring;
    }

    std::vector<Individual> frontier_of(std::vector<Individual> const& population) const
    {
        std::vector<Fitness> fitness;
        for (auto const& ind : population) {
            fitness.push_back(ind.fitness(cfg_.max_depth));
        }
        std::vector<Individual> frontier;
        if (population.empty()) {
            return frontier;
        }
        auto const fronts = fast_nondominated_sort(fitness);
        for (auto i : fronts.front()) {
            frontier.push_back(population[i]);
        }
        return frontier;
    }

    void log_generation(long gen, std::size_t scored, std::vector<Individual> const& population, GenerationCallback const& on_generation)
    {
        GenerationLog log;
        log.generation = gen;
        log.evaluations_this_generation = static_cast<std::int64_t>(cfg_.k * scored);
        log.evaluations_performed = evaluations_;
        log.best_objective1 = 0.0;
        for (auto const& ind : frontier_of(population)) {
            auto const f = ind.fitness(cfg_.max_depth);
            log.best_objective1 = std::max(log.best_objective1, f.objective1);
            log.frontier.push_back({ ind.id, ind.tree.to_string(), f.objective1, f.objective2, ind.birth_generation });
        }
        log.elapsed_seconds = elapsed();
        if (on_generation) {
            on_generation(log);
        }
        logs_.push_back(std::move(log));
    }

    EvolutionConfig const& cfg_;
    Dataset const& train_;
    std::chrono::steady_clock::time_point started_;
    std::uint64_t next_id_ { 0 };
    std::int64_t evaluations_ { 0 };
    std::vector<GenerationLog> logs_;
};

} // namespace

EvolveResult evolve(EvolutionConfig const& cfg, Dataset const& train, GenerationCallback const& on_generation)
{
    cfg.validate();
    return Engine(cfg, train).run(on_generation);
}

} // namespace evoml
