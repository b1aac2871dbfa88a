#include "support/oracles.hpp"
#include "support/synthetic.hpp"

#include "evoml/fitness.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace evoml;
using namespace evoml::testing;

namespace {

PipelineTree bare(char const* root, ComponentSpec::Params params = {})
{
    return PipelineTree(ComponentSpec::make(root, params));
}

} // namespace

TEST_CASE("weighted F1 hand example")
{
    // A=0, B=1: A has p=1, r=2/3; B has p=1/2, r=1
    std::vector<ClassIndex> t { 0, 0, 0, 1 };
    std::vector<ClassIndex> p { 0, 0, 1, 1 };
    CHECK(weighted_f1(t, p, 2) == doctest::Approx(230.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(weighted_f1(t, p, 2) - 76.667) < 5e-4);
}

TEST_CASE("weighted F1 edge cases")
{
    std::vector<ClassIndex> t { 0, 0 };
    std::vector<ClassIndex> p { 1, 1 };
    CHECK(weighted_f1(t, p, 2) == 0.0);
    CHECK(weighted_f1(t, t, 2) == 100.0);
    std::vector<ClassIndex> three { 2, 0, 1, 1, 2 };
    CHECK(weighted_f1(three, three, 3) == 100.0);
    std::vector<ClassIndex> empty;
    CHECK_THROWS(weighted_f1(empty, empty, 2));
    std::vector<ClassIndex> shorter { 0 };
    CHECK_THROWS(weighted_f1(t, shorter, 2));
}

TEST_CASE("weighted F1 matches the confusion-matrix oracle and is relabeling invariant")
{
    Rng rng(2024);
    for (int trial = 0; trial < 400; ++trial) {
        auto const classes = 2 + rng.index(4);
        auto const n = 1 + rng.index(200);
        std::vector<ClassIndex> t(n);
        std::vector<ClassIndex> p(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = static_cast<ClassIndex>(rng.index(classes));
            p[i] = rng.chance(0.5) ? t[i] : static_cast<ClassIndex>(rng.index(classes));
        }
        auto const score = weighted_f1(t, p, classes);
        CHECK(std::abs(score - oracle_weighted_f1(t, p, classes)) <= 1e-9);
        CHECK(score >= 0.0);
        CHECK(score <= 100.0);
        CHECK((score == 100.0) == (t == p));

        std::vector<ClassIndex> perm(classes);
        for (std::size_t c = 0; c < classes; ++c) {
            perm[c] = static_cast<ClassIndex>((c + 1) % classes);
        }
        auto tt = t;
        auto pp = p;
        for (auto& v : tt) {
            v = perm[v];
        }
        for (auto& v : pp) {
            v = perm[v];
        }
        CHECK(std::abs(weighted_f1(tt, pp, classes) - score) <= 1e-9);
    }
}

TEST_CASE("k-fold score of a majority classifier on 60/40 data is 45")
{
    auto d = indexed_dataset(repeat_labels({ { "A", 15 }, { "B", 10 } }));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto r = kfold_score(bare("majority_class"), d, 5, seed);
        CHECK(!r.failed);
        CHECK(r.score == doctest::Approx(45.0).epsilon(1e-12));
    }
}

TEST_CASE("1-nn scores 100 when every point has duplicates in the training folds")
{
    // three locations per class, ten copies each: a fold holds six rows of a class,
    // so at least four copies of every test point remain in its training folds
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (int loc = 0; loc < 6; ++loc) {
        for (int copy = 0; copy < 10; ++copy) {
            rows.push_back({ static_cast<double>(loc), static_cast<double>(loc * loc) });
            labels.push_back(loc % 2 ? "odd" : "even");
        }
    }
    auto d = make_dataset(rows, labels);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CHECK(kfold_score(bare("k_nearest_neighbors", { { "k_neighbors", 1L } }), d, 5, seed).score == 100.0);
    }
}

TEST_CASE("k-fold score is deterministic")
{
    auto d = make_synthetic({ .rows = 120, .classes = 3, .label_noise = 0.2, .seed = 5 });
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto t = random_pipeline(seed);
        auto a = kfold_score(t, d, 5, seed);
        auto b = kfold_score(t, d, 5, seed);
        CHECK(a.score == b.score);
        CHECK(a.failed == b.failed);
    }
}

TEST_CASE("a component error on any fold fails the evaluation")
{
    // column sums overflow, so standardized output is non-finite
    double const big = std::numeric_limits<double>::max();
    std::vector<std::vector<double>> rows;
    std::vector<std::string> labels;
    for (int i = 0; i < 20; ++i) {
        rows.push_back({ (i % 2 ? 1 : -1) * big, big });
        labels.push_back(i % 2 ? "a" : "b");
    }
    auto d = make_dataset(rows, labels);
    auto t = PipelineTree(ComponentSpec::make("gaussian_naive_bayes"), { ComponentSpec::make("standard_scaler") });
    auto r = kfold_score(t, d, 5, 0);
    CHECK(r.failed);
    CHECK(!r.error.empty());
    CHECK(static_fitness(t, d, 5, 6) == failure_fitness(6));
    CHECK(failure_fitness(6) == Fitness { 0.0, 7 });
}

TEST_CASE("ledger mean and contiguity")
{
    Individual ind { 1, bare("majority_class"), 4, {} };
    CHECK_THROWS_AS(record_generation(ind, 50.0, 5), LedgerError);
    ind = record_generation(ind, 70.0, 4);
    CHECK(ind.fitness(6).objective1 == 70.0);
    CHECK(ind.fitness(6).objective2 == 1);
    auto twice = record_generation(ind, 80.0, 5);
    twice = record_generation(twice, 90.0, 6);
    CHECK(twice.fitness(6).objective1 == 80.0);
    CHECK(twice.ledger.size() == 3);
    CHECK_THROWS_AS(record_generation(ind, 90.0, 6), LedgerError);
    CHECK_THROWS_AS(record_generation(ind, 90.0, 4), LedgerError);

    Individual other { 2, bare("majority_class"), 0, {} };
    other = record_generation(other, 80.0, 0);
    other = record_generation(other, 90.0, 1);
    CHECK(other.fitness(6).objective1 == 85.0);

    auto failed = record_generation(other, 0.0, 2, true);
    CHECK(failed.ledger.failed());
    CHECK(failed.fitness(6) == failure_fitness(6));
}

TEST_CASE("static fitness is a fixed function of the tree")
{
    auto d = make_synthetic({ .rows = 100, .label_noise = 0.1, .seed = 14 });
    auto t = PipelineTree(ComponentSpec::make("decision_tree", { { "max_depth", 4L } }), { ComponentSpec::make("min_max_scaler") });
    auto a = static_fitness(t, d, 5);
    auto same_structure = PipelineTree::parse(t.to_string());
    CHECK(static_fitness(same_structure, d, 5) == a);
    CHECK(a.objective1 == kfold_score(t, d, 5, 0).score);
    CHECK(a.objective2 == 2);
}
