#pragma once

#include "evoml/data.hpp"
#include "evoml/pipeline.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evoml {

class LedgerError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Support-weighted mean of per-class F1 over `num_classes` classes, scaled to
/// [0, 100]. A class whose precision or recall is undefined scores 0.
double weighted_f1(std::span<ClassIndex const> y_true, std::span<ClassIndex const> y_pred, std::size_t num_classes);

struct KFoldResult {
    double score { 0.0 }; // unweighted mean of the per-fold weighted F1 values
    bool failed { false };
    std::string error;
};

/// Stratified k-fold estimate of `t` on `train` using folds drawn from `fold_seed`.
/// A component error on any fold marks the whole evaluation failed.
KFoldResult kfold_score(PipelineTree const& t, Dataset const& train, std::size_t k, std::uint64_t fold_seed);

struct LedgerEntry {
    long generation;
    double score;

    bool operator==(LedgerEntry const&) const = default;
};

/// Per-generation k-fold scores of one individual. Generations must be consecutive.
class ScoreLedger {
public:
    void record(long generation, double score, bool failed = false);

    [[nodiscard]] std::vector<LedgerEntry> const& entries() const { return entries_; }
    [[nodiscard]] bool failed() const { return failed_; }
    [[nodiscard]] bool empty() const { return entries_.empty(); }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }
    [[nodiscard]] double mean() const;

private:
    std::vector<LedgerEntry> entries_;
    bool failed_ { false };
};

struct Fitness {
    double objective1 { 0.0 };    // maximized
    std::size_t objective2 { 1 }; // minimized

    bool operator==(Fitness const&) const = default;
};

inline Fitness failure_fitness(std::size_t max_depth) { return { 0.0, max_depth + 1 }; }

struct Individual {
    std::uint64_t id { 0 };
    PipelineTree tree;
    long birth_generation { 0 };
    ScoreLedger ledger;

    /// objective1 is the lifetime mean of the ledger; failures map to the sentinel.
    [[nodiscard]] Fitness fitness(std::size_t max_depth) const;
    [[nodiscard]] long age(long current_generation) const { return current_generation - birth_generation; }
};

/// Appends one generation's score. The first entry must be at the birth generation.
Individual record_generation(Individual ind, double score, long generation, bool failed = false);

/// Single k-fold fitness with a fixed fold seed.
Fitness static_fitness(PipelineTree const& t, Dataset const& train, std::size_t k, std::size_t max_depth = kDefaultMaxDepth, std::uint64_t fold_seed = 0);

} // namespace evoml
