#pragma once

#include "evoml/data.hpp"
#include "evoml/evolution.hpp"
#include "evoml/pipeline.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace evoml {

inline constexpr double kDefaultAlpha = 0.05;
inline constexpr double kDefaultBonferroni = 3.0;
inline constexpr long kMinGenerations = 2; // runs with fewer completed generations are excluded
inline constexpr std::size_t kExactWilcoxonLimit = 25;

struct Replicate {
    int repeat { 1 }; // 1..5
    int half { 1 };   // 1..2

    bool operator==(Replicate const&) const = default;
};

struct RunReport {
    std::string dataset_name;
    FitnessMode mode { FitnessMode::dynamic };
    Replicate replicate;
    std::string final_pipeline;
    double internal_score { 0.0 }; // lifetime / k-fold mean of the final pick on the training half
    double external_score { 0.0 }; // weighted F1 on the held-out half
    long age { 0 };
    long birth_generation { 0 };
    long termination_generation { 0 };
    long generations_completed { 0 };
    std::size_t complexity { 0 };
    std::int64_t evaluations { 0 };
    double wall_seconds { 0.0 };
    std::uint64_t master_seed { 0 };
    std::uint64_t split_seed { 0 };
    bool excluded { false };
    bool insufficient_budget { false };
    std::string note;

    [[nodiscard]] double difference() const;
};

/// Seed shared by both fitness modes for the outer split of one repeat.
std::uint64_t replicate_split_seed(std::uint64_t master_seed, int repeat);
std::uint64_t replicate_master_seed(std::uint64_t master_seed, Replicate r);

/// Evolves on `train`, refits the final pick on all of `train` and scores it on `test`.
/// An exhausted budget yields an excluded report instead of an exception.
RunReport run_single(Dataset const& train, Dataset const& test, EvolutionConfig const& cfg, Replicate replicate = {},
    GenerationCallback const& on_generation = {});

using ReplicateCallback = std::function<void(Replicate const&, GenerationLog const&)>;

/// Five repeats of a stratified two-fold outer split, training on each half in turn.
/// Both fitness modes see identical splits and replicate seeds for a given master seed.
std::vector<RunReport> run_5x2(Dataset const& dataset, EvolutionConfig cfg, FitnessMode mode, ReplicateCallback const& on_generation = {});

double difference(double internal_score, double external_score);

class InsufficientPairs : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct WilcoxonResult {
    std::size_t n { 0 };          // nonzero pairs
    std::vector<double> ranks;    // mid-ranks of |d| for the nonzero pairs, input order
    double w_plus { 0.0 };
    double w_minus { 0.0 };
    double statistic { 0.0 };     // min(W+, W-)
    double p_value { 1.0 };       // two-sided
    bool exact { true };
};

/// Zero differences are dropped; at least five nonzero pairs are required.
WilcoxonResult wilcoxon_signed_rank(std::span<double const> paired_diffs);

enum class Dominance { a_dominates, b_dominates, none };

std::string_view to_string(Dominance d);

struct ObjectivePair {
    double performance; // maximized
    double complexity;  // minimized
};

Dominance dominance_classify(ObjectivePair const& a, ObjectivePair const& b);

struct ModeSummary {
    std::size_t runs { 0 };
    std::size_t excluded { 0 };
    double mean_external { 0.0 };
    double std_external { 0.0 };
    double mean_internal { 0.0 };
    double mean_difference { 0.0 };
    double mean_age { 0.0 };
    double mean_generations { 0.0 };
    double mean_complexity { 0.0 };
    double mean_evaluations { 0.0 };
};

struct DatasetComparison {
    std::string dataset;
    bool complete { false };
    ModeSummary dynamic;
    ModeSummary fixed;          // static mode
    double score_delta { 0.0 }; // dynamic minus static mean external score
    std::string outcome;        // win / loss / draw, from the dynamic mode's point of view
    Dominance dominance { Dominance::none }; // a = dynamic, b = static
};

struct SignificanceTest {
    std::string metric;
    std::size_t pairs { 0 };
    std::optional<double> statistic;
    std::optional<double> w_plus;
    std::optional<double> w_minus;
    std::optional<double> p_value;
    std::optional<double> corrected_p;
    bool significant { false };
    std::string direction; // dynamic_higher, dynamic_lower or tie (by signed rank sums)
    std::string flag;      // green: dynamic significantly better, red: significantly worse, none otherwise
    std::string note;
};

struct ComparisonDocument {
    int format_version { 1 };
    double alpha { kDefaultAlpha };
    double bonferroni_multiplier { kDefaultBonferroni };
    std::vector<DatasetComparison> datasets;
    int wins { 0 };
    int losses { 0 };
    int draws { 0 };
    int dynamic_dominates { 0 };
    int static_dominates { 0 };
    int no_dominance { 0 };
    std::vector<SignificanceTest> tests;
    std::vector<std::string> warnings;
    std::vector<RunReport> runs;
};

/// Aggregates paired reports of both modes into the comparison document.
ComparisonDocument build_report(std::vector<RunReport> const& reports, double bonferroni_multiplier = kDefaultBonferroni, double alpha = kDefaultAlpha);

/// Wilcoxon test over per-dataset values of both modes. `higher_is_better` decides the
/// green/red flag; metrics without a preferred direction are never flagged.
SignificanceTest paired_test(std::string metric, std::span<double const> dynamic_values, std::span<double const> static_values,
    std::optional<bool> higher_is_better, double multiplier = kDefaultBonferroni, double alpha = kDefaultAlpha);

struct SeedScore {
    std::uint64_t seed;
    double score_a;
    double score_b;
};

/// k-fold scores of two pipelines under `seeds` consecutive fold seeds.
std::vector<SeedScore> seed_sensitivity(PipelineTree const& a, PipelineTree const& b, Dataset const& train, std::size_t k,
    std::size_t seeds = 30, std::uint64_t first_seed = 0);

double mean(std::span<double const> values);
double sample_std(std::span<double const> values);

} // namespace evoml
