#include "evoml/data.hpp"

#include "evoml/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace evoml {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values))
{
    if (values_.size() != rows_ * cols_) {
        throw DataError("Matrix: value count does not match shape");
    }
}

Matrix Matrix::select_rows(std::span<std::size_t const> indices) const
{
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix Matrix::select_cols(std::span<std::size_t const> indices) const
{
    Matrix out(rows_, indices.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t j = 0; j < indices.size(); ++j) {
            out(r, j) = (*this)(r, indices[j]);
        }
    }
    return out;
}

Dataset::Dataset(std::string name, Matrix features, std::vector<ClassIndex> labels, std::vector<std::string> class_set)
    : name_(std::move(name))
    , features_(std::move(features))
    , labels_(std::move(labels))
    , class_set_(std::move(class_set))
    , class_counts_(class_set_.size(), 0)
{
    if (features_.rows() != labels_.size()) {
        throw DataError("dataset: feature rows and label count differ");
    }
    if (features_.cols() == 0) {
        throw DataError("dataset: no feature columns");
    }
    if (class_set_.size() < 2) {
        throw DataError("dataset: fewer than 2 distinct classes");
    }
    for (auto label : labels_) {
        if (label >= class_set_.size()) {
            throw DataError("dataset: label outside class set");
        }
        ++class_counts_[label];
    }
}

Dataset Dataset::from_labels(std::string name, Matrix features, std::vector<std::string> const& labels)
{
    std::vector<std::string> class_set;
    std::unordered_map<std::string, ClassIndex> lookup;
    std::vector<ClassIndex> indices;
    indices.reserve(labels.size());
    for (auto const& label : labels) {
        auto [it, inserted] = lookup.try_emplace(label, static_cast<ClassIndex>(class_set.size()));
        if (inserted) {
            class_set.push_back(label);
        }
        indices.push_back(it->second);
    }
    return { std::move(name), std::move(features), std::move(indices), std::move(class_set) };
}

Dataset Dataset::subset(std::span<std::size_t const> indices) const
{
    std::vector<ClassIndex> labels;
    labels.reserve(indices.size());
    for (auto i : indices) {
        labels.push_back(labels_.at(i));
    }
    return { name_, features_.select_rows(indices), std::move(labels), class_set_ };
}

Dataset Dataset::with_features(Matrix features) const
{
    return { name_, std::move(features), labels_, class_set_ };
}

std::vector<std::size_t> FoldPlan::fold_sizes() const
{
    std::vector<std::size_t> sizes(k, 0);
    for (auto f : fold_assignment) {
        ++sizes.at(f);
    }
    return sizes;
}

namespace {

// RFC-4180 records: quoted fields may hold commas, doubled quotes and newlines.
std::vector<std::vector<std::string>> parse_csv_records(std::string const& text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_record = [&]() {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
        bool blank = record.size() == 1 && record.front().empty();
        if (!blank) {
            records.push_back(std::move(record));
        }
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char const ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(ch);
            }
            continue;
        }
        switch (ch) {
        case '"':
            if (!field_started || field.empty()) {
                in_quotes = true;
                field_started = true;
            } else {
                field.push_back(ch);
            }
            break;
        case ',':
            record.push_back(std::move(field));
            field.clear();
            field_started = false;
            break;
        case '\r':
            break;
        case '\n':
            end_record();
            break;
        default:
            field.push_back(ch);
            field_started = true;
        }
    }
    if (in_quotes) {
        throw DataError("csv: unterminated quoted field");
    }
    if (field_started || !field.empty() || !record.empty()) {
        end_record();
    }
    return records;
}

std::string trim(std::string const& s)
{
    auto const first = s.find_first_not_of(" \t");
    if (first == std::string::npos) {
        return {};
    }
    auto const last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

} // namespace

Dataset load_csv(std::filesystem::path const& path, LabelColumn const& label_column)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open data file: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto records = parse_csv_records(buffer.str());
    if (records.empty()) {
        throw DataError("empty data file: " + path.string());
    }

    auto const& header = records.front();
    std::size_t const width = header.size();
    if (width < 2) {
        throw DataError("data file needs at least one feature column and a label column: " + path.string());
    }

    std::size_t label_index = 0;
    if (auto const* name = std::get_if<std::string>(&label_column)) {
        auto it = std::find_if(header.begin(), header.end(), [&](auto const& h) { return trim(h) == *name; });
        if (it == header.end()) {
            throw DataError("label column '" + *name + "' not found in " + path.string());
        }
        label_index = static_cast<std::size_t>(it - header.begin());
    } else {
        long idx = std::get<long>(label_column);
        long const w = static_cast<long>(width);
        if (idx < 0) {
            idx += w;
        }
        if (idx < 0 || idx >= w) {
            throw DataError("label column index out of range in " + path.string());
        }
        label_index = static_cast<std::size_t>(idx);
    }

    std::size_t const rows = records.size() - 1;
    if (rows == 0) {
        throw DataError("data file has a header but no rows: " + path.string());
    }

    Matrix features(rows, width - 1);
    std::vector<std::string> labels;
    labels.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        auto const& rec = records[r + 1];
        if (rec.size() != width) {
            throw DataError("row " + std::to_string(r + 1) + " has " + std::to_string(rec.size()) + " fields, expected " + std::to_string(width));
        }
        std::size_t out_col = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (c == label_index) {
                labels.push_back(rec[c]);
                continue;
            }
            auto const cell = trim(rec[c]);
            double value = 0.0;
            auto const* first = cell.data();
            auto const* last = cell.data() + cell.size();
            auto [ptr, ec] = std::from_chars(first, last, value);
            if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
                throw DataError("unparseable value '" + rec[c] + "' at row " + std::to_string(r + 1) + ", column '" + trim(header[c]) + "'");
            }
            features(r, out_col++) = value;
        }
    }

    bool const single_class = std::all_of(labels.begin(), labels.end(), [&](auto const& l) { return l == labels.front(); });
    if (single_class) {
        throw DataError("data file has a single class ('" + labels.front() + "'): " + path.string());
    }
    return Dataset::from_labels(path.stem().string(), std::move(features), labels);
}

namespace {

std::vector<std::vector<std::size_t>> rows_by_class(Dataset const& d)
{
    std::vector<std::vector<std::size_t>> groups(d.num_classes());
    for (std::size_t i = 0; i < d.rows(); ++i) {
        groups[d.labels()[i]].push_back(i);
    }
    return groups;
}

} // namespace

SplitPair train_test_split(Dataset const& d, double test_fraction, std::uint64_t seed)
{
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw DataError("test_fraction must lie in (0, 1)");
    }
    auto groups = rows_by_class(d);
    for (std::size_t c = 0; c < groups.size(); ++c) {
        if (groups[c].size() == 1) {
            throw DataError("class '" + d.class_set()[c] + "' has a single instance; cannot stratify");
        }
    }

    // largest-remainder apportionment of round(fraction * n) across classes
    auto const total = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(d.rows())));
    std::vector<std::size_t> quota(groups.size(), 0);
    std::vector<double> remainder(groups.size(), -1.0);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        if (groups[c].empty()) {
            continue;
        }
        double const exact = test_fraction * static_cast<double>(groups[c].size());
        quota[c] = static_cast<std::size_t>(std::floor(exact));
        remainder[c] = exact - std::floor(exact);
        assigned += quota[c];
    }
    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < total && i < order.size(); ++i) {
        if (remainder[order[i]] >= 0.0) {
            ++quota[order[i]];
            ++assigned;
        }
    }

    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        auto& group = groups[c];
        if (group.empty()) {
            continue;
        }
        auto const n_test = std::clamp<std::size_t>(quota[c], 1, group.size() - 1);
        Rng rng(derive_seed(seed, { 0x5117ULL, c }));
        rng.shuffle(std::span(group));
        test_rows.insert(test_rows.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(n_test));
        train_rows.insert(train_rows.end(), group.begin() + static_cast<std::ptrdiff_t>(n_test), group.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());

    return SplitPair { d.subset(train_rows), d.subset(test_rows), seed, test_fraction, std::move(train_rows), std::move(test_rows) };
}

FoldPlan stratified_kfold(Dataset const& d, std::size_t k, std::uint64_t seed)
{
    if (k < 2) {
        throw DataError("k-fold needs k >= 2");
    }
    if (d.rows() < k) {
        throw DataError("k-fold: " + std::to_string(d.rows()) + " rows cannot fill " + std::to_string(k) + " folds");
    }
    auto groups = rows_by_class(d);
    FoldPlan plan { k, seed, std::vector<std::size_t>(d.rows(), 0) };
    // dealing continues across classes so both overall and per-class fold sizes differ by at most one
    std::size_t next = 0;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        auto& group = groups[c];
        Rng rng(derive_seed(seed, { 0xf01dULL, c }));
        rng.shuffle(std::span(group));
        for (auto row : group) {
            plan.fold_assignment[row] = next;
            next = (next + 1) % k;
        }
    }
    return plan;
}

FoldView fold_views(Dataset const& d, FoldPlan const& plan, std::size_t fold)
{
    if (fold >= plan.k) {
        throw DataError("fold index " + std::to_string(fold) + " out of range for k=" + std::to_string(plan.k));
    }
    if (plan.fold_assignment.size() != d.rows()) {
        throw DataError("fold plan does not match dataset size");
    }
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        (plan.fold_assignment[i] == fold ? test_rows : train_rows).push_back(i);
    }
    if (train_rows.empty() || test_rows.empty()) {
        throw DataError("fold " + std::to_string(fold) + " produced an empty partition");
    }
    return { d.subset(train_rows), d.subset(test_rows) };
}

} // namespace evoml
