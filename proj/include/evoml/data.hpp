#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace evoml {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using ClassIndex = std::uint32_t;

/// Dense row-major matrix of feature values.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

    [[nodiscard]] std::span<double const> row(std::size_t r) const { return { values_.data() + r * cols_, cols_ }; }
    [[nodiscard]] std::span<double> row(std::size_t r) { return { values_.data() + r * cols_, cols_ }; }
    [[nodiscard]] std::span<double const> values() const { return values_; }

    [[nodiscard]] Matrix select_rows(std::span<std::size_t const> indices) const;
    [[nodiscard]] Matrix select_cols(std::span<std::size_t const> indices) const;

    bool operator==(Matrix const&) const = default;

private:
    std::size_t rows_ { 0 };
    std::size_t cols_ { 0 };
    std::vector<double> values_;
};

/// Labeled tabular classification data. Labels are indices into class_set.
/// Subsets keep the parent's class_set, so per-class counts may be zero there.
class Dataset {
public:
    Dataset(std::string name, Matrix features, std::vector<ClassIndex> labels, std::vector<std::string> class_set);

    /// Builds class_set from the labels in first-appearance order.
    static Dataset from_labels(std::string name, Matrix features, std::vector<std::string> const& labels);

    [[nodiscard]] std::string const& name() const { return name_; }
    [[nodiscard]] Matrix const& features() const { return features_; }
    [[nodiscard]] std::vector<ClassIndex> const& labels() const { return labels_; }
    [[nodiscard]] std::vector<std::string> const& class_set() const { return class_set_; }
    [[nodiscard]] std::vector<std::size_t> const& class_counts() const { return class_counts_; }

    [[nodiscard]] std::size_t rows() const { return features_.rows(); }
    [[nodiscard]] std::size_t cols() const { return features_.cols(); }
    [[nodiscard]] std::size_t num_classes() const { return class_set_.size(); }

    [[nodiscard]] Dataset subset(std::span<std::size_t const> indices) const;
    [[nodiscard]] Dataset with_features(Matrix features) const;

private:
    std::string name_;
    Matrix features_;
    std::vector<ClassIndex> labels_;
    std::vector<std::string> class_set_;
    std::vector<std::size_t> class_counts_;
};

struct SplitPair {
    Dataset train;
    Dataset test;
    std::uint64_t split_seed;
    double test_fraction;
    std::vector<std::size_t> train_rows; // row indices into the source
    std::vector<std::size_t> test_rows;
};

struct FoldPlan {
    std::size_t k;
    std::uint64_t seed;
    std::vector<std::size_t> fold_assignment;

    [[nodiscard]] std::vector<std::size_t> fold_sizes() const;
};

struct FoldView {
    Dataset internal_train;
    Dataset internal_test;
};

/// Label column selector: a header name or a zero-based index. Negative
/// indices count from the end (-1 = last column, the default).
using LabelColumn = std::variant<std::string, long>;

Dataset load_csv(std::filesystem::path const& path, LabelColumn const& label_column = -1L);

SplitPair train_test_split(Dataset const& d, double test_fraction, std::uint64_t seed);

FoldPlan stratified_kfold(Dataset const& d, std::size_t k, std::uint64_t seed);

FoldView fold_views(Dataset const& d, FoldPlan const& plan, std::size_t fold);

} // namespace evoml
