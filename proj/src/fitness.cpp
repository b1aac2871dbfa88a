#include "evoml/fitness.hpp"

#include <numeric>

namespace evoml {

double weighted_f1(std::span<ClassIndex const> y_true, std::span<ClassIndex const> y_pred, std::size_t num_classes)
{
    if (y_true.size() != y_pred.size()) {
        throw std::invalid_argument("weighted_f1: label vectors differ in length");
    }
    if (y_true.empty()) {
        throw std::invalid_argument("weighted_f1: empty label vectors");
    }
    std::vector<std::size_t> tp(num_classes, 0);
    std::vector<std::size_t> predicted(num_classes, 0);
    std::vector<std::size_t> support(num_classes, 0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] >= num_classes || y_pred[i] >= num_classes) {
            throw std::invalid_argument("weighted_f1: label outside class set");
        }
        ++support[y_true[i]];
        ++predicted[y_pred[i]];
        if (y_true[i] == y_pred[i]) {
            ++tp[y_true[i]];
        }
    }
    double weighted = 0.0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        if (tp[c] == 0) {
            continue; // zero precision or recall, or undefined: f1 := 0
        }
        double const precision = static_cast<double>(tp[c]) / static_cast<double>(predicted[c]);
        double const recall = static_cast<double>(tp[c]) / static_cast<double>(support[c]);
        double const f1 = 2.0 * precision * recall / (precision + recall);
        weighted += static_cast<double>(support[c]) * f1;
    }
    return 100.0 * weighted / static_cast<double>(y_true.size());
}

KFoldResult kfold_score(PipelineTree const& t, Dataset const& train, std::size_t k, std::uint64_t fold_seed)
{
    auto const plan = stratified_kfold(train, k, fold_seed);
    double total = 0.0;
    try {
        for (std::size_t fold = 0; fold < k; ++fold) {
            auto const view = fold_views(train, plan, fold);
            auto const predicted = execute(t, view.internal_train, view.internal_test, derive_seed(fold_seed, { fold }));
            total += weighted_f1(view.internal_test.labels(), predicted, train.num_classes());
        }
    } catch (ComponentError const& e) {
        return { 0.0, true, e.what() };
    } catch (PipelineError const& e) {
        return { 0.0, true, e.what() };
    }
    return { total / static_cast<double>(k), false, {} };
}

void ScoreLedger::record(long generation, double score, bool failed)
{
    if (!entries_.empty() && generation != entries_.back().generation + 1) {
        throw LedgerError("ledger must be contiguous: expected generation " + std::to_string(entries_.back().generation + 1) + ", got " + std::to_string(generation));
    }
    entries_.push_back({ generation, score });
    failed_ = failed_ || failed;
}

double ScoreLedger::mean() const
{
    if (entries_.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (auto const& e : entries_) {
        sum += e.score;
    }
    return sum / static_cast<double>(entries_.size());
}

Fitness Individual::fitness(std::size_t max_depth) const
{
    if (ledger.failed()) {
        return failure_fitness(max_depth);
    }
    return { ledger.mean(), tree.complexity() };
}

Individual record_generation(Individual ind, double score, long generation, bool failed)
{
    if (ind.ledger.empty() && generation != ind.birth_generation) {
        throw LedgerError("first ledger entry must be at the birth generation " + std::to_string(ind.birth_generation));
    }
    ind.ledger.record(generation, score, failed);
    return ind;
}

Fitness static_fitness(PipelineTree const& t, Dataset const& train, std::size_t k, std::size_t max_depth, std::uint64_t fold_seed)
{
    auto const result = kfold_score(t, train, k, fold_seed);
    if (result.failed) {
        return failure_fitness(max_depth);
    }
    return { result.score, t.complexity() };
}

} // namespace evoml
