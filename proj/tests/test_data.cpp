#include "support/synthetic.hpp"

#include "evoml/data.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

using namespace evoml;
using namespace evoml::testing;

namespace {

std::map<std::string, std::size_t> label_histogram(Dataset const& d)
{
    std::map<std::string, std::size_t> h;
    for (auto y : d.labels()) {
        ++h[d.class_set()[y]];
    }
    return h;
}

std::vector<std::vector<std::size_t>> per_fold_class_counts(Dataset const& d, FoldPlan const& plan)
{
    std::vector<std::vector<std::size_t>> counts(d.num_classes(), std::vector<std::size_t>(plan.k, 0));
    for (std::size_t r = 0; r < d.rows(); ++r) {
        ++counts[d.labels()[r]][plan.fold_assignment[r]];
    }
    return counts;
}

std::size_t spread(std::vector<std::size_t> const& v)
{
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

} // namespace

TEST_CASE("load_csv counts classes in first-appearance order")
{
    TempDir dir("csv");
    auto p = dir.write("four.csv", "x,y,label\n1,2,A\n3,4,A\n5,6,B\n7,8,B\n");
    auto d = load_csv(p);
    CHECK(d.rows() == 4);
    CHECK(d.cols() == 2);
    CHECK(d.class_set() == std::vector<std::string> { "A", "B" });
    CHECK(d.class_counts() == std::vector<std::size_t> { 2, 2 });
    CHECK(d.features()(2, 1) == 6.0);
}

TEST_CASE("load_csv selects the label column by name or index and keeps row order")
{
    TempDir dir("csv");
    auto p = dir.write("named.csv", "species,a,\"b, quoted\"\nz,1,2\ny,3,4\nz,5,6\n");
    auto by_name = load_csv(p, std::string("species"));
    auto by_index = load_csv(p, 0L);
    CHECK(by_name.class_set() == std::vector<std::string> { "z", "y" });
    CHECK(by_name.features() == by_index.features());
    CHECK(by_name.labels() == std::vector<ClassIndex> { 0, 1, 0 });
    CHECK(by_name.features()(1, 0) == 3.0);
    CHECK_THROWS_AS(load_csv(p, std::string("nope")), DataError);
}

TEST_CASE("load_csv errors name the offending cell")
{
    TempDir dir("csv");
    auto p = dir.write("bad.csv", "x,y,label\n1,2,A\n3,oops,B\n");
    try {
        (void)load_csv(p);
        FAIL("expected an error");
    } catch (DataError const& e) {
        std::string const msg = e.what();
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("'y'") != std::string::npos);
    }
    auto missing = dir.write("missing.csv", "x,label\n,A\n2,B\n");
    CHECK_THROWS_AS(load_csv(missing), DataError);
    auto inf = dir.write("inf.csv", "x,label\ninf,A\n2,B\n");
    CHECK_THROWS_AS(load_csv(inf), DataError);
}

TEST_CASE("load_csv rejects single-class, missing and empty files")
{
    TempDir dir("csv");
    auto single = dir.write("single.csv", "x,label\n1,A\n2,A\n");
    CHECK_THROWS_WITH_AS(load_csv(single), doctest::Contains("single class"), DataError);
    CHECK_THROWS_AS(load_csv(dir.path() / "absent.csv"), DataError);
    auto empty = dir.write("empty.csv", "");
    CHECK_THROWS_WITH_AS(load_csv(empty), doctest::Contains("empty"), DataError);
}

TEST_CASE("train_test_split halves 6 A / 4 B into 3 A and 2 B for any seed")
{
    auto d = indexed_dataset(repeat_labels({ { "A", 6 }, { "B", 4 } }));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto s = train_test_split(d, 0.5, seed);
        auto h = label_histogram(s.test);
        CHECK(h["A"] == 3);
        CHECK(h["B"] == 2);
        CHECK(s.train.rows() == 5);
    }
}

TEST_CASE("train_test_split is deterministic and partitions the source")
{
    auto d = make_synthetic({ .rows = 57, .classes = 3, .seed = 4 });
    auto a = train_test_split(d, 0.4, 99);
    auto b = train_test_split(d, 0.4, 99);
    CHECK(a.test_rows == b.test_rows);
    CHECK(a.train_rows == b.train_rows);
    std::vector<std::size_t> all = a.train_rows;
    all.insert(all.end(), a.test_rows.begin(), a.test_rows.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(all[i] == i);
    }
    CHECK(a.train.rows() + a.test.rows() == d.rows());
    for (std::size_t c = 0; c < d.num_classes(); ++c) {
        CHECK(a.train.class_counts()[c] > 0);
        CHECK(a.test.class_counts()[c] > 0);
    }
}

TEST_CASE("train_test_split size stays within per-class rounding")
{
    for (std::size_t classes = 2; classes <= 5; ++classes) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto d = make_synthetic({ .rows = 100, .classes = classes, .label_noise = 0.3, .seed = seed });
            auto s = train_test_split(d, 0.3, seed);
            auto const n = static_cast<long>(s.test.rows());
            CHECK(std::abs(n - 30) <= static_cast<long>(classes - 1));
        }
    }
}

TEST_CASE("train_test_split refuses a class with a single instance")
{
    auto d = indexed_dataset(repeat_labels({ { "A", 5 }, { "B", 1 } }));
    CHECK_THROWS_AS(train_test_split(d, 0.5, 0), DataError);
    CHECK_THROWS_AS(train_test_split(indexed_dataset(repeat_labels({ { "A", 3 }, { "B", 3 } })), 1.0, 0), DataError);
}

TEST_CASE("stratified_kfold: 10 rows, 6 A / 4 B, k=5")
{
    auto d = indexed_dataset(repeat_labels({ { "A", 6 }, { "B", 4 } }));
    auto plan = stratified_kfold(d, 5, 0);
    CHECK(plan.fold_sizes() == std::vector<std::size_t> { 2, 2, 2, 2, 2 });
    auto counts = per_fold_class_counts(d, plan);
    for (std::size_t f = 0; f < 5; ++f) {
        CHECK(counts[0][f] >= 1);
        CHECK(counts[0][f] <= 2);
        CHECK(counts[1][f] <= 1);
    }
    CHECK(stratified_kfold(d, 5, 0).fold_assignment == plan.fold_assignment);
}

TEST_CASE("stratified_kfold rejects too few rows or k < 2")
{
    auto d = indexed_dataset(repeat_labels({ { "A", 2 }, { "B", 2 } }));
    CHECK_THROWS_AS(stratified_kfold(d, 5, 0), DataError);
    CHECK_THROWS_AS(stratified_kfold(d, 1, 0), DataError);
}

TEST_CASE("stratified_kfold invariants hold over random datasets")
{
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        Rng rng(seed);
        auto const classes = 2 + rng.index(4);
        auto const rows = 10 + rng.index(120);
        auto const k = 2 + rng.index(9);
        auto d = make_synthetic({ .rows = rows, .classes = classes, .label_noise = 0.25, .seed = seed });
        auto plan = stratified_kfold(d, k, seed * 7);
        auto sizes = plan.fold_sizes();
        CHECK(sizes.size() == k);
        CHECK(spread(sizes) <= 1);
        CHECK(*std::min_element(sizes.begin(), sizes.end()) > 0);
        for (auto const& per_class : per_fold_class_counts(d, plan)) {
            CHECK(spread(per_class) <= 1);
        }
    }
}

TEST_CASE("different seeds give different fold assignments")
{
    auto d = make_synthetic({ .rows = 20, .seed = 3 });
    std::set<std::vector<std::size_t>> seen;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        seen.insert(stratified_kfold(d, 5, seed).fold_assignment);
    }
    CHECK(seen.size() >= 2);
}

TEST_CASE("fold_views partition the data exactly once")
{
    auto d = indexed_dataset(repeat_labels({ { "A", 6 }, { "B", 4 } }));
    auto plan = stratified_kfold(d, 5, 11);
    auto v0 = fold_views(d, plan, 0);
    CHECK(v0.internal_test.rows() == 2);
    CHECK(v0.internal_train.rows() == 8);
    std::multiset<double> seen;
    for (std::size_t i = 0; i < 5; ++i) {
        auto v = fold_views(d, plan, i);
        CHECK(v.internal_test.rows() + v.internal_train.rows() == 10);
        for (std::size_t r = 0; r < v.internal_test.rows(); ++r) {
            seen.insert(v.internal_test.features()(r, 0));
        }
    }
    CHECK(seen.size() == 10);
    CHECK(std::set<double>(seen.begin(), seen.end()).size() == 10);
    CHECK_THROWS_AS(fold_views(d, plan, 5), DataError);
}
