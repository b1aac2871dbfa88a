#pragma once

#include "evoml/components.hpp"
#include "evoml/data.hpp"
#include "evoml/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace evoml {

inline constexpr std::size_t kDefaultMaxDepth = 6;

class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An estimator-rooted pipeline: `chain` transformers run first to last, then
/// the classifier at `root`. Complexity counts every component.
class PipelineTree {
public:
    PipelineTree(ComponentSpec root, std::vector<ComponentSpec> chain = {});

    [[nodiscard]] ComponentSpec const& root() const { return root_; }
    [[nodiscard]] std::vector<ComponentSpec> const& chain() const { return chain_; }
    [[nodiscard]] std::size_t complexity() const { return 1 + chain_.size(); }

    /// `root(...) <- t_last(...) <- ... <- t_first(...)`: each component is fed by
    /// the one to its right, so the rightmost transformer sees the raw features.
    [[nodiscard]] std::string to_string() const;
    static PipelineTree parse(std::string_view text);

    bool operator==(PipelineTree const&) const = default;

private:
    ComponentSpec root_;
    std::vector<ComponentSpec> chain_;
};

/// Draws a component of the given registry entry with uniformly drawn hyperparameters.
ComponentSpec random_component(ComponentInfo const& info, Rng& rng);

PipelineTree random_pipeline(std::uint64_t rng_seed, std::size_t max_depth = kDefaultMaxDepth);

enum class MutationKind { hyperparameter, swap, insertion, deletion };

/// Edits applicable to `t` under `max_depth`, in declaration order.
std::vector<MutationKind> applicable_mutations(PipelineTree const& t, std::size_t max_depth = kDefaultMaxDepth);

/// Applies exactly one edit drawn uniformly from the applicable ones.
PipelineTree mutate(PipelineTree const& t, std::uint64_t rng_seed, std::size_t max_depth = kDefaultMaxDepth);

/// Root from either parent; chain = prefix of one parent spliced onto the suffix of the
/// other at a shared cut point, truncated to fit max_depth.
PipelineTree crossover(PipelineTree const& a, PipelineTree const& b, std::uint64_t rng_seed, std::size_t max_depth = kDefaultMaxDepth);

/// Fits the chain and root on `train`, then predicts the rows of `test`.
std::vector<ClassIndex> execute(PipelineTree const& t, Dataset const& train, Dataset const& test, std::uint64_t component_seed);

} // namespace evoml
