#include "evoml/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

namespace evoml {

double RunReport::difference() const
{
    return evoml::difference(internal_score, external_score);
}

double difference(double internal_score, double external_score)
{
    return std::abs(internal_score - external_score);
}

std::uint64_t replicate_split_seed(std::uint64_t master_seed, int repeat)
{
    return derive_seed(master_seed, { 0x5c2ULL, static_cast<std::uint64_t>(repeat) });
}

std::uint64_t replicate_master_seed(std::uint64_t master_seed, Replicate r)
{
    return derive_seed(master_seed, { 0x5eedULL, static_cast<std::uint64_t>(r.repeat), static_cast<std::uint64_t>(r.half) });
}

RunReport run_single(Dataset const& train, Dataset const& test, EvolutionConfig const& cfg, Replicate replicate, GenerationCallback const& on_generation)
{
    RunReport report;
    report.dataset_name = train.name();
    report.mode = cfg.mode;
    report.replicate = replicate;
    report.master_seed = cfg.master_seed;

    auto const started = std::chrono::steady_clock::now();
    auto const seconds = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(); };
    try {
        auto const result = evolve(cfg, train, on_generation);
        auto const& best = result.final_individual;
        report.final_pipeline = best.tree.to_string();
        report.internal_score = result.final_fitness.objective1;
        report.birth_generation = best.birth_generation;
        report.termination_generation = result.generations_completed;
        report.generations_completed = result.generations_completed;
        report.age = result.final_age();
        report.complexity = best.tree.complexity();
        report.evaluations = result.evaluations;
        try {
            auto const predicted = execute(best.tree, train, test, derive_seed(cfg.master_seed, { 0xf17aULL }));
            report.external_score = weighted_f1(test.labels(), predicted, test.num_classes());
        } catch (ComponentError const& e) {
            report.note = std::string("final pipeline failed on the test half: ") + e.what();
        }
        if (report.generations_completed < kMinGenerations) {
            report.excluded = true;
            report.note = "fewer than " + std::to_string(kMinGenerations) + " generations completed";
        }
    } catch (InsufficientBudget const& e) {
        report.excluded = true;
        report.insufficient_budget = true;
        report.note = e.what();
    }
    report.wall_seconds = seconds();
    return report;
}

std::vector<RunReport> run_5x2(Dataset const& dataset, EvolutionConfig cfg, FitnessMode mode, ReplicateCallback const& on_generation)
{
    auto const master = cfg.master_seed;
    cfg.mode = mode;
    std::vector<RunReport> reports;
    for (int repeat = 1; repeat <= 5; ++repeat) {
        auto const split_seed = replicate_split_seed(master, repeat);
        auto const split = train_test_split(dataset, 0.5, split_seed);
        for (int half = 1; half <= 2; ++half) {
            Replicate const rep { repeat, half };
            cfg.master_seed = replicate_master_seed(master, rep);
            auto const& train = half == 1 ? split.train : split.test;
            auto const& test = half == 1 ? split.test : split.train;
            GenerationCallback forward;
            if (on_generation) {
                forward = [&](GenerationLog const& log) { on_generation(rep, log); };
            }
            auto report = run_single(train, test, cfg, rep, forward);
            report.split_seed = split_seed;
            reports.push_back(std::move(report));
        }
    }
    return reports;
}

WilcoxonResult wilcoxon_signed_rank(std::span<double const> paired_diffs)
{
    std::vector<double> d;
    std::copy_if(paired_diffs.begin(), paired_diffs.end(), std::back_inserter(d), [](double v) { return v != 0.0; });
    if (d.size() < 5) {
        throw InsufficientPairs("insufficient pairs: " + std::to_string(d.size()) + " nonzero differences, need at least 5");
    }
    auto const n = d.size();

    WilcoxonResult result;
    result.n = n;
    result.ranks.assign(n, 0.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(d[a]) < std::abs(d[b]); });
    std::vector<std::size_t> tie_sizes;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) {
            ++j;
        }
        double const mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) {
            result.ranks[order[t]] = mid;
        }
        tie_sizes.push_back(j - i + 1);
        i = j + 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        (d[i] > 0 ? result.w_plus : result.w_minus) += result.ranks[i];
    }
    result.statistic = std::min(result.w_plus, result.w_minus);

    auto const nd = static_cast<double>(n);
    if (n <= kExactWilcoxonLimit) {
        // exact null distribution of W+ over all 2^n sign assignments, on doubled ranks
        std::vector<long> doubled;
        long total = 0;
        for (double r : result.ranks) {
            doubled.push_back(std::lround(2.0 * r));
            total += doubled.back();
        }
        std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
        ways[0] = 1.0;
        for (auto r : doubled) {
            for (long s = total; s >= r; --s) {
                ways[static_cast<std::size_t>(s)] += ways[static_cast<std::size_t>(s - r)];
            }
        }
        long const limit = std::lround(2.0 * result.statistic);
        double tail = 0.0;
        for (long s = 0; s <= limit; ++s) {
            tail += ways[static_cast<std::size_t>(s)];
        }
        result.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, static_cast<int>(n)));
        result.exact = true;
    } else {
        double tie_term = 0.0;
        for (auto t : tie_sizes) {
            auto const td = static_cast<double>(t);
            tie_term += td * td * td - td;
        }
        double const expected = nd * (nd + 1.0) / 4.0;
        double const variance = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
        double const z = (result.statistic - expected) / std::sqrt(variance);
        result.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
        result.exact = false;
    }
    return result;
}

std::string_view to_string(Dominance d)
{
    switch (d) {
    case Dominance::a_dominates:
        return "a_dominates";
    case Dominance::b_dominates:
        return "b_dominates";
    default:
        return "none";
    }
}

Dominance dominance_classify(ObjectivePair const& a, ObjectivePair const& b)
{
    auto const covers = [](ObjectivePair const& x, ObjectivePair const& y) {
        bool const no_worse = x.performance >= y.performance && x.complexity <= y.complexity;
        bool const better = x.performance > y.performance || x.complexity < y.complexity;
        return no_worse && better;
    };
    if (covers(a, b)) {
        return Dominance::a_dominates;
    }
    if (covers(b, a)) {
        return Dominance::b_dominates;
    }
    return Dominance::none;
}

double mean(std::span<double const> values)
{
    if (values.empty()) {
        return 0.0;
    }
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_std(std::span<double const> values)
{
    if (values.size() < 2) {
        return 0.0;
    }
    double const m = mean(values);
    double ss = 0.0;
    for (double v : values) {
        ss += (v - m) * (v - m);
    }
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

namespace {

ModeSummary summarize(std::vector<RunReport const*> const& runs)
{
    ModeSummary s;
    std::vector<double> external;
    std::vector<double> internal;
    std::vector<double> diff;
    std::vector<double> age;
    std::vector<double> generations;
    std::vector<double> complexity;
    std::vector<double> evaluations;
    for (auto const* r : runs) {
        ++s.runs;
        if (r->excluded) {
            ++s.excluded;
            continue;
        }
        external.push_back(r->external_score);
        internal.push_back(r->internal_score);
        diff.push_back(r->difference());
        age.push_back(static_cast<double>(r->age));
        generations.push_back(static_cast<double>(r->generations_completed));
        complexity.push_back(static_cast<double>(r->complexity));
        evaluations.push_back(static_cast<double>(r->evaluations));
    }
    s.mean_external = mean(external);
    s.std_external = sample_std(external);
    s.mean_internal = mean(internal);
    s.mean_difference = mean(diff);
    s.mean_age = mean(age);
    s.mean_generations = mean(generations);
    s.mean_complexity = mean(complexity);
    s.mean_evaluations = mean(evaluations);
    return s;
}

} // namespace

SignificanceTest paired_test(std::string metric, std::span<double const> dynamic_values, std::span<double const> static_values,
    std::optional<bool> higher_is_better, double multiplier, double alpha)
{
    SignificanceTest test;
    test.metric = std::move(metric);
    test.pairs = dynamic_values.size();
    test.direction = "tie";
    test.flag = "none";
    std::vector<double> diffs;
    for (std::size_t i = 0; i < dynamic_values.size(); ++i) {
        diffs.push_back(dynamic_values[i] - static_values[i]);
    }
    try {
        auto const w = wilcoxon_signed_rank(diffs);
        test.statistic = w.statistic;
        test.w_plus = w.w_plus;
        test.w_minus = w.w_minus;
        test.p_value = w.p_value;
        test.corrected_p = std::min(1.0, multiplier * w.p_value);
        test.significant = *test.corrected_p < alpha;
        if (w.w_plus != w.w_minus) {
            test.direction = w.w_plus > w.w_minus ? "dynamic_higher" : "dynamic_lower";
        }
        if (test.significant && higher_is_better && test.direction != "tie") {
            bool const dynamic_better = (test.direction == "dynamic_higher") == *higher_is_better;
            test.flag = dynamic_better ? "green" : "red";
        }
    } catch (InsufficientPairs const& e) {
        test.note = e.what();
    }
    return test;
}

ComparisonDocument build_report(std::vector<RunReport> const& reports, double bonferroni_multiplier, double alpha)
{
    ComparisonDocument doc;
    doc.alpha = alpha;
    doc.bonferroni_multiplier = bonferroni_multiplier;
    doc.runs = reports;

    std::vector<std::string> names;
    std::map<std::string, std::pair<std::vector<RunReport const*>, std::vector<RunReport const*>>> grouped;
    for (auto const& r : reports) {
        if (!grouped.contains(r.dataset_name)) {
            names.push_back(r.dataset_name);
        }
        auto& slot = grouped[r.dataset_name];
        (r.mode == FitnessMode::dynamic ? slot.first : slot.second).push_back(&r);
        if (r.excluded) {
            doc.warnings.push_back(r.dataset_name + " " + std::string(to_string(r.mode)) + " replicate (" + std::to_string(r.replicate.repeat) + ","
                + std::to_string(r.replicate.half) + ") excluded: " + r.note);
        }
    }

    std::vector<double> dyn_score, sta_score, dyn_diff, sta_diff, dyn_age, sta_age, dyn_gen, sta_gen, dyn_cx, sta_cx;
    for (auto const& name : names) {
        auto const& [dyn_runs, sta_runs] = grouped[name];
        DatasetComparison row;
        row.dataset = name;
        row.dynamic = summarize(dyn_runs);
        row.fixed = summarize(sta_runs);
        row.complete = row.dynamic.runs > row.dynamic.excluded && row.fixed.runs > row.fixed.excluded;
        if (!row.complete) {
            row.outcome = "incomplete";
            doc.warnings.push_back(name + " lacks included runs for both modes; left out of the comparison");
            doc.datasets.push_back(std::move(row));
            continue;
        }
        row.score_delta = row.dynamic.mean_external - row.fixed.mean_external;
        if (row.dynamic.mean_external > row.fixed.mean_external) {
            row.outcome = "win";
            ++doc.wins;
        } else if (row.dynamic.mean_external < row.fixed.mean_external) {
            row.outcome = "loss";
            ++doc.losses;
        } else {
            row.outcome = "draw";
            ++doc.draws;
        }
        row.dominance = dominance_classify({ row.dynamic.mean_external, row.dynamic.mean_complexity }, { row.fixed.mean_external, row.fixed.mean_complexity });
        switch (row.dominance) {
        case Dominance::a_dominates:
            ++doc.dynamic_dominates;
            break;
        case Dominance::b_dominates:
            ++doc.static_dominates;
            break;
        default:
            ++doc.no_dominance;
        }
        dyn_score.push_back(row.dynamic.mean_external);
        sta_score.push_back(row.fixed.mean_external);
        dyn_diff.push_back(row.dynamic.mean_difference);
        sta_diff.push_back(row.fixed.mean_difference);
        dyn_age.push_back(row.dynamic.mean_age);
        sta_age.push_back(row.fixed.mean_age);
        dyn_gen.push_back(row.dynamic.mean_generations);
        sta_gen.push_back(row.fixed.mean_generations);
        dyn_cx.push_back(row.dynamic.mean_complexity);
        sta_cx.push_back(row.fixed.mean_complexity);
        doc.datasets.push_back(std::move(row));
    }
    if (dyn_score.empty()) {
        throw std::invalid_argument("no dataset has complete paired results for both modes");
    }

    doc.tests.push_back(paired_test("external_score", dyn_score, sta_score, true, bonferroni_multiplier, alpha));
    doc.tests.push_back(paired_test("difference", dyn_diff, sta_diff, false, bonferroni_multiplier, alpha));
    doc.tests.push_back(paired_test("age", dyn_age, sta_age, std::nullopt, bonferroni_multiplier, alpha));
    doc.tests.push_back(paired_test("generations", dyn_gen, sta_gen, std::nullopt, bonferroni_multiplier, alpha));
    doc.tests.push_back(paired_test("complexity", dyn_cx, sta_cx, false, bonferroni_multiplier, alpha));
    return doc;
}

std::vector<SeedScore> seed_sensitivity(PipelineTree const& a, PipelineTree const& b, Dataset const& train, std::size_t k, std::size_t seeds, std::uint64_t first_seed)
{
    std::vector<SeedScore> rows;
    for (std::size_t s = 0; s < seeds; ++s) {
        auto const seed = first_seed + s;
        rows.push_back({ seed, kfold_score(a, train, k, seed).score, kfold_score(b, train, k, seed).score });
    }
    return rows;
}

} // namespace evoml
