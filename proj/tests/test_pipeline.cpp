#include "support/synthetic.hpp"

#include "evoml/pipeline.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

using namespace evoml;
using namespace evoml::testing;

namespace {

void check_valid(PipelineTree const& t, std::size_t max_depth = kDefaultMaxDepth)
{
    CHECK(t.root().kind() == ComponentKind::classifier);
    CHECK(t.complexity() >= 1);
    CHECK(t.complexity() <= max_depth);
    CHECK(t.complexity() == 1 + t.chain().size());
    for (auto const& c : t.chain()) {
        CHECK(c.kind() == ComponentKind::transformer);
    }
}

PipelineTree tree(char const* root, std::vector<char const*> chain = {})
{
    std::vector<ComponentSpec> specs;
    for (auto const* c : chain) {
        specs.push_back(ComponentSpec::make(c));
    }
    return PipelineTree(ComponentSpec::make(root), specs);
}

// structural edit distance is not needed: classify the single edit directly
enum class Edit { hyperparameter, swap, insertion, deletion, other };

Edit classify(PipelineTree const& before, PipelineTree const& after)
{
    auto const& a = before.chain();
    auto const& b = after.chain();
    if (b.size() == a.size() + 1) {
        for (std::size_t i = 0; i <= a.size(); ++i) {
            auto c = b;
            c.erase(c.begin() + static_cast<std::ptrdiff_t>(i));
            if (c == a && after.root() == before.root()) {
                return Edit::insertion;
            }
        }
        return Edit::other;
    }
    if (b.size() + 1 == a.size()) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            auto c = a;
            c.erase(c.begin() + static_cast<std::ptrdiff_t>(i));
            if (c == b && after.root() == before.root()) {
                return Edit::deletion;
            }
        }
        return Edit::other;
    }
    if (a.size() != b.size()) {
        return Edit::other;
    }
    std::vector<std::pair<ComponentSpec, ComponentSpec>> changed;
    if (!(before.root() == after.root())) {
        changed.emplace_back(before.root(), after.root());
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] == b[i])) {
            changed.emplace_back(a[i], b[i]);
        }
    }
    if (changed.size() != 1) {
        return Edit::other;
    }
    auto const& [x, y] = changed.front();
    if (x.kind() != y.kind()) {
        return Edit::other;
    }
    return x.name() == y.name() ? Edit::hyperparameter : Edit::swap;
}

} // namespace

TEST_CASE("pipeline text round-trips and lists the chain right to left")
{
    auto t = PipelineTree(ComponentSpec::make("decision_tree", { { "max_depth", 4L } }),
        { ComponentSpec::make("standard_scaler"), ComponentSpec::make("pca", { { "n_components", 5L } }) });
    CHECK(t.to_string() == "decision_tree(max_depth=4,min_leaf=1) <- pca(n_components=5) <- standard_scaler()");
    CHECK(PipelineTree::parse(t.to_string()) == t);
    CHECK(t.complexity() == 3);
    CHECK_THROWS_AS(PipelineTree(ComponentSpec::make("pca")), PipelineError);
    CHECK_THROWS_AS(PipelineTree(ComponentSpec::make("majority_class"), { ComponentSpec::make("majority_class") }), PipelineError);
    CHECK_THROWS(PipelineTree::parse("pca() <- majority_class()"));
}

TEST_CASE("random pipelines are valid, deterministic and varied")
{
    std::set<std::string> roots;
    std::set<std::size_t> lengths;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        auto t = random_pipeline(seed);
        check_valid(t);
        roots.insert(t.root().name());
        lengths.insert(t.chain().size());
        if (seed < 50) {
            CHECK(random_pipeline(seed) == t);
        }
    }
    CHECK(roots.size() >= 2);
    CHECK(lengths == std::set<std::size_t> { 0, 1, 2, 3, 4, 5 });
}

TEST_CASE("mutating a bare hyperparameterless classifier inserts or swaps the root")
{
    auto t = tree("gaussian_naive_bayes");
    auto kinds = applicable_mutations(t);
    CHECK(kinds == std::vector<MutationKind> { MutationKind::swap, MutationKind::insertion });
    std::set<Edit> seen;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto child = mutate(t, seed);
        check_valid(child);
        CHECK(child.complexity() <= 2);
        auto const e = classify(t, child);
        CHECK((e == Edit::insertion || e == Edit::swap));
        seen.insert(e);
    }
    CHECK(seen.size() == 2);
}

TEST_CASE("a full-size tree cannot grow")
{
    auto t = tree("decision_tree", { "standard_scaler", "pca", "min_max_scaler", "select_k_best", "variance_threshold" });
    REQUIRE(t.complexity() == 6);
    auto kinds = applicable_mutations(t);
    CHECK(std::find(kinds.begin(), kinds.end(), MutationKind::insertion) == kinds.end());
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto child = mutate(t, seed);
        check_valid(child);
        auto const e = classify(t, child);
        CHECK((e == Edit::hyperparameter || e == Edit::swap || e == Edit::deletion));
    }
}

TEST_CASE("every mutation is exactly one applicable edit and is deterministic")
{
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        auto t = random_pipeline(seed * 31 + 7);
        auto child = mutate(t, seed);
        check_valid(child);
        CHECK(!(child == t));
        CHECK(classify(t, child) != Edit::other);
        CHECK(mutate(t, seed) == child);
    }
}

TEST_CASE("crossover of identical parents returns the parent")
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto a = random_pipeline(seed);
        CHECK(crossover(a, a, seed) == a);
    }
}

TEST_CASE("crossover of bare roots keeps an empty chain")
{
    auto a = tree("gaussian_naive_bayes");
    auto b = tree("majority_class");
    std::set<std::string> roots;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto c = crossover(a, b, seed);
        CHECK(c.chain().empty());
        roots.insert(c.root().name());
    }
    CHECK(roots == std::set<std::string> { "gaussian_naive_bayes", "majority_class" });
}

TEST_CASE("crossover is deterministic, splices parents and respects max depth")
{
    auto a = tree("decision_tree", { "standard_scaler", "pca", "min_max_scaler" });
    auto b = tree("majority_class", { "select_k_best", "variance_threshold", "pca", "standard_scaler" });
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        auto c = crossover(a, b, seed);
        check_valid(c);
        CHECK(c.chain().size() <= 5);
        CHECK(crossover(a, b, seed) == c);
        CHECK((c.root() == a.root() || c.root() == b.root()));
        auto small = crossover(a, b, seed, 3);
        check_valid(small, 3);
    }
}

TEST_CASE("execute: majority class predicts the modal label")
{
    auto train = indexed_dataset(repeat_labels({ { "A", 6 }, { "B", 4 } }));
    auto preds = execute(tree("majority_class"), train, train, 0);
    CHECK(preds == std::vector<ClassIndex>(10, 0));
}

TEST_CASE("execute: scaled 1-nn recovers labels of training rows")
{
    auto d = make_synthetic({ .rows = 60, .classes = 3, .label_noise = 0.2, .seed = 4 });
    std::vector<std::size_t> rows { 0, 5, 17, 33, 59 };
    auto test = d.subset(rows);
    auto preds = execute(tree("k_nearest_neighbors", { "standard_scaler" }), d, test, 1);
    CHECK(preds == test.labels());
}

TEST_CASE("execute: variance threshold 0 ignores a constant column")
{
    auto base = make_synthetic({ .rows = 80, .informative = 2, .noise_cols = 1, .label_noise = 0.1, .seed = 6 });
    Matrix with_const(base.rows(), base.cols() + 1);
    for (std::size_t r = 0; r < base.rows(); ++r) {
        for (std::size_t c = 0; c < base.cols(); ++c) {
            with_const(r, c) = base.features()(r, c);
        }
        with_const(r, base.cols()) = 4.2;
    }
    auto padded = base.with_features(with_const);
    std::vector<std::size_t> train_rows(60);
    std::iota(train_rows.begin(), train_rows.end(), 0);
    std::vector<std::size_t> test_rows(20);
    std::iota(test_rows.begin(), test_rows.end(), 60);
    auto const plain = execute(tree("decision_tree"), base.subset(train_rows), base.subset(test_rows), 0);
    auto const filtered = execute(PipelineTree(ComponentSpec::make("decision_tree"), { ComponentSpec::make("variance_threshold", { { "threshold", 0.0 } }) }),
        padded.subset(train_rows), padded.subset(test_rows), 0);
    CHECK(plain == filtered);
}

TEST_CASE("execute is invariant to the order of test rows")
{
    auto d = make_synthetic({ .rows = 100, .classes = 3, .label_noise = 0.15, .seed = 10 });
    std::vector<std::size_t> train_rows(70);
    std::iota(train_rows.begin(), train_rows.end(), 0);
    std::vector<std::size_t> test_rows(30);
    std::iota(test_rows.begin(), test_rows.end(), 70);
    auto reversed = test_rows;
    std::reverse(reversed.begin(), reversed.end());
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto t = random_pipeline(seed);
        auto forward = execute(t, d.subset(train_rows), d.subset(test_rows), seed);
        auto backward = execute(t, d.subset(train_rows), d.subset(reversed), seed);
        std::reverse(backward.begin(), backward.end());
        CHECK(forward == backward);
    }
}
