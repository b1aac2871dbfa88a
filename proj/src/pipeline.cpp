#include "evoml/pipeline.hpp"

#include <algorithm>

namespace evoml {

PipelineTree::PipelineTree(ComponentSpec root, std::vector<ComponentSpec> chain)
    : root_(std::move(root)), chain_(std::move(chain))
{
    if (root_.kind() != ComponentKind::classifier) {
        throw PipelineError("pipeline root must be a classifier, got '" + root_.name() + "'");
    }
    for (auto const& c : chain_) {
        if (c.kind() != ComponentKind::transformer) {
            throw PipelineError("pipeline chain may only hold transformers, got '" + c.name() + "'");
        }
    }
}

std::string PipelineTree::to_string() const
{
    std::string out = root_.to_string();
    for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) {
        out += " <- " + it->to_string();
    }
    return out;
}

PipelineTree PipelineTree::parse(std::string_view text)
{
    std::vector<ComponentSpec> parts;
    constexpr std::string_view arrow = "<-";
    while (true) {
        auto const pos = text.find(arrow);
        parts.push_back(ComponentSpec::parse(text.substr(0, pos)));
        if (pos == std::string_view::npos) {
            break;
        }
        text.remove_prefix(pos + arrow.size());
    }
    auto root = parts.front();
    std::vector<ComponentSpec> chain(parts.rbegin(), parts.rend() - 1);
    return { std::move(root), std::move(chain) };
}

ComponentSpec random_component(ComponentInfo const& info, Rng& rng)
{
    ComponentSpec::Params params;
    for (auto const& g : info.grid) {
        params.emplace_back(g.name, g.values[rng.index(g.values.size())]);
    }
    return ComponentSpec::make(info.name, params);
}

namespace {

ComponentSpec random_of_kind(ComponentKind kind, Rng& rng)
{
    auto const options = registry_of_kind(kind);
    return random_component(*options[rng.index(options.size())], rng);
}

void check_depth(std::size_t max_depth)
{
    if (max_depth < 1) {
        throw PipelineError("max_depth must be at least 1");
    }
}

} // namespace

PipelineTree random_pipeline(std::uint64_t rng_seed, std::size_t max_depth)
{
    check_depth(max_depth);
    Rng rng(rng_seed);
    auto root = random_of_kind(ComponentKind::classifier, rng);
    auto const length = rng.index(max_depth);
    std::vector<ComponentSpec> chain;
    for (std::size_t i = 0; i < length; ++i) {
        chain.push_back(random_of_kind(ComponentKind::transformer, rng));
    }
    return { std::move(root), std::move(chain) };
}

namespace {

// (node, hyperparameter) pairs whose grid offers an alternative value; node 0 is the root
std::vector<std::pair<std::size_t, std::size_t>> tunable_slots(PipelineTree const& t)
{
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    auto add = [&](std::size_t node, ComponentSpec const& spec) {
        auto const& grid = registry_lookup(spec.name()).grid;
        for (std::size_t p = 0; p < grid.size(); ++p) {
            if (grid[p].values.size() >= 2) {
                slots.emplace_back(node, p);
            }
        }
    };
    add(0, t.root());
    for (std::size_t i = 0; i < t.chain().size(); ++i) {
        add(i + 1, t.chain()[i]);
    }
    return slots;
}

ComponentSpec with_param(ComponentSpec const& spec, std::size_t index, ParamValue value)
{
    auto params = spec.params();
    params[index].second = std::move(value);
    return ComponentSpec::make(spec.name(), params);
}

ComponentSpec swapped(ComponentSpec const& current, Rng& rng)
{
    auto options = registry_of_kind(current.kind());
    std::erase_if(options, [&](auto const* info) { return info->name == current.name(); });
    return random_component(*options[rng.index(options.size())], rng);
}

} // namespace

std::vector<MutationKind> applicable_mutations(PipelineTree const& t, std::size_t max_depth)
{
    std::vector<MutationKind> edits;
    if (!tunable_slots(t).empty()) {
        edits.push_back(MutationKind::hyperparameter);
    }
    edits.push_back(MutationKind::swap);
    if (t.complexity() < max_depth) {
        edits.push_back(MutationKind::insertion);
    }
    if (!t.chain().empty()) {
        edits.push_back(MutationKind::deletion);
    }
    return edits;
}

PipelineTree mutate(PipelineTree const& t, std::uint64_t rng_seed, std::size_t max_depth)
{
    check_depth(max_depth);
    Rng rng(rng_seed);
    auto const edits = applicable_mutations(t, max_depth);
    auto root = t.root();
    auto chain = t.chain();

    switch (edits[rng.index(edits.size())]) {
    case MutationKind::hyperparameter: {
        auto const slots = tunable_slots(t);
        auto const [node, p] = slots[rng.index(slots.size())];
        auto& spec = node == 0 ? root : chain[node - 1];
        auto const& values = registry_lookup(spec.name()).grid[p].values;
        auto const& current = spec.params()[p].second;
        std::vector<ParamValue> alternatives;
        std::copy_if(values.begin(), values.end(), std::back_inserter(alternatives), [&](auto const& v) { return v != current; });
        spec = with_param(spec, p, alternatives[rng.index(alternatives.size())]);
        break;
    }
    case MutationKind::swap: {
        auto const node = rng.index(t.complexity());
        auto& spec = node == 0 ? root : chain[node - 1];
        spec = swapped(spec, rng);
        break;
    }
    case MutationKind::insertion: {
        auto const pos = rng.index(chain.size() + 1);
        chain.insert(chain.begin() + static_cast<std::ptrdiff_t>(pos), random_of_kind(ComponentKind::transformer, rng));
        break;
    }
    case MutationKind::deletion:
        chain.erase(chain.begin() + static_cast<std::ptrdiff_t>(rng.index(chain.size())));
        break;
    }
    return { std::move(root), std::move(chain) };
}

PipelineTree crossover(PipelineTree const& a, PipelineTree const& b, std::uint64_t rng_seed, std::size_t max_depth)
{
    check_depth(max_depth);
    Rng rng(rng_seed);
    auto const& root_parent = rng.chance(0.5) ? a : b;
    bool const a_first = rng.chance(0.5);
    auto const& head = a_first ? a.chain() : b.chain();
    auto const& tail = a_first ? b.chain() : a.chain();
    auto const cut = rng.index(std::min(head.size(), tail.size()) + 1);

    std::vector<ComponentSpec> chain(head.begin(), head.begin() + static_cast<std::ptrdiff_t>(cut));
    chain.insert(chain.end(), tail.begin() + static_cast<std::ptrdiff_t>(cut), tail.end());
    if (chain.size() > max_depth - 1) {
        chain.erase(chain.begin() + static_cast<std::ptrdiff_t>(max_depth - 1), chain.end());
    }
    return { root_parent.root(), std::move(chain) };
}

std::vector<ClassIndex> execute(PipelineTree const& t, Dataset const& train, Dataset const& test, std::uint64_t component_seed)
{
    if (train.cols() != test.cols()) {
        throw PipelineError("train and test feature counts differ");
    }
    if (train.rows() == 0) {
        throw PipelineError("empty training set");
    }
    Matrix train_x = train.features();
    Matrix test_x = test.features();
    for (std::size_t i = 0; i < t.chain().size(); ++i) {
        auto const fitted = fit(t.chain()[i], train.with_features(train_x), derive_seed(component_seed, { i + 1 }));
        train_x = fitted.transform(train_x);
        test_x = fitted.transform(test_x);
    }
    auto const model = fit(t.root(), train.with_features(std::move(train_x)), derive_seed(component_seed, { 0 }));
    return model.predict(test_x);
}

} // namespace evoml
