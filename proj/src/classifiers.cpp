#include "models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace evoml::detail {

namespace {

std::vector<std::size_t> count_labels(std::span<ClassIndex const> labels, std::size_t classes)
{
    std::vector<std::size_t> counts(classes, 0);
    for (auto l : labels) {
        ++counts[l];
    }
    return counts;
}

ClassIndex modal_class(std::vector<std::size_t> const& counts)
{
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best]) {
            best = c;
        }
    }
    return static_cast<ClassIndex>(best);
}

// ---------------------------------------------------------------------------
// CART with Gini impurity. Ties prefer the lowest feature index, then the
// lowest threshold.

class DecisionTree final : public Model {
public:
    struct Node {
        long feature { -1 };
        double threshold { 0.0 };
        std::size_t left { 0 };
        std::size_t right { 0 };
        ClassIndex label { 0 };
    };

    DecisionTree(Dataset const& train, std::size_t max_depth, std::size_t min_leaf)
        : max_depth_(max_depth), min_leaf_(std::max<std::size_t>(min_leaf, 1)), classes_(train.num_classes())
    {
        std::vector<std::size_t> rows(train.rows());
        std::iota(rows.begin(), rows.end(), 0);
        build(train, rows, 0);
    }

    std::vector<ClassIndex> predict(Matrix const& x) const override
    {
        std::vector<ClassIndex> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            std::size_t n = 0;
            while (nodes_[n].feature >= 0) {
                auto const& node = nodes_[n];
                n = x(r, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left : node.right;
            }
            out[r] = nodes_[n].label;
        }
        return out;
    }

    std::string summary() const override
    {
        std::ostringstream os;
        for (auto const& n : nodes_) {
            os << n.feature << ':' << format_real(n.threshold) << ':' << n.left << ':' << n.right << ':' << n.label << ';';
        }
        return os.str();
    }

private:
    static double gini(std::vector<std::size_t> const& counts, std::size_t total)
    {
        if (total == 0) {
            return 0.0;
        }
        double sum = 0.0;
        for (auto c : counts) {
            double const p = static_cast<double>(c) / static_cast<double>(total);
            sum += p * p;
        }
        return 1.0 - sum;
    }

    std::size_t build(Dataset const& train, std::vector<std::size_t> const& rows, std::size_t depth)
    {
        auto const& x = train.features();
        auto const& y = train.labels();

        std::vector<std::size_t> counts(classes_, 0);
        for (auto r : rows) {
            ++counts[y[r]];
        }
        std::size_t const index = nodes_.size();
        nodes_.push_back(Node { -1, 0.0, 0, 0, modal_class(counts) });

        std::size_t const n = rows.size();
        bool const pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
        if (pure || depth >= max_depth_ || n < 2 * min_leaf_) {
            return index;
        }

        double const parent = gini(counts, n);
        double best_gain = 1e-12;
        long best_feature = -1;
        double best_threshold = 0.0;

        std::vector<std::size_t> order(rows);
        std::vector<std::size_t> left(classes_);
        std::vector<std::size_t> right(classes_);
        for (std::size_t f = 0; f < x.cols(); ++f) {
            std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x(a, f) < x(b, f); });
            std::fill(left.begin(), left.end(), 0);
            right = counts;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                auto const lab = y[order[i]];
                ++left[lab];
                --right[lab];
                double const lo = x(order[i], f);
                double const hi = x(order[i + 1], f);
                std::size_t const n_left = i + 1;
                if (lo == hi || n_left < min_leaf_ || n - n_left < min_leaf_) {
                    continue;
                }
                double const weighted = (static_cast<double>(n_left) * gini(left, n_left)
                                            + static_cast<double>(n - n_left) * gini(right, n - n_left))
                    / static_cast<double>(n);
                double const gain = parent - weighted;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<long>(f);
                    double mid = lo + (hi - lo) / 2.0;
                    best_threshold = mid < hi ? mid : lo;
                }
            }
        }
        if (best_feature < 0) {
            return index;
        }

        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        for (auto r : rows) {
            (x(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? left_rows : right_rows).push_back(r);
        }
        auto const l = build(train, left_rows, depth + 1);
        auto const rr = build(train, right_rows, depth + 1);
        nodes_[index].feature = best_feature;
        nodes_[index].threshold = best_threshold;
        nodes_[index].left = l;
        nodes_[index].right = rr;
        return index;
    }

    std::size_t max_depth_;
    std::size_t min_leaf_;
    std::size_t classes_;
    std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------

class NearestNeighbors final : public Model {
public:
    NearestNeighbors(Dataset const& train, std::size_t k, bool distance_weighted)
        : x_(train.features())
        , y_(train.labels())
        , classes_(train.num_classes())
        , k_(std::clamp<std::size_t>(k, 1, train.rows()))
        , distance_weighted_(distance_weighted)
    {
    }

    std::vector<ClassIndex> predict(Matrix const& q) const override
    {
        std::vector<ClassIndex> out(q.rows());
        std::vector<std::pair<double, std::size_t>> dist(x_.rows());
        std::vector<double> votes(classes_);
        for (std::size_t r = 0; r < q.rows(); ++r) {
            auto const query = q.row(r);
            for (std::size_t i = 0; i < x_.rows(); ++i) {
                auto const ref = x_.row(i);
                double d = 0.0;
                for (std::size_t c = 0; c < ref.size(); ++c) {
                    double const diff = query[c] - ref[c];
                    d += diff * diff;
                }
                dist[i] = { d, i };
            }
            std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());

            std::fill(votes.begin(), votes.end(), 0.0);
            bool const exact = distance_weighted_ && dist.front().first == 0.0;
            for (std::size_t j = 0; j < k_; ++j) {
                auto const [d2, i] = dist[j];
                double w = 1.0;
                if (exact) {
                    w = d2 == 0.0 ? 1.0 : 0.0;
                } else if (distance_weighted_) {
                    w = 1.0 / std::sqrt(d2);
                }
                votes[y_[i]] += w;
            }
            out[r] = argmax_class(votes);
        }
        return out;
    }

    std::string summary() const override
    {
        std::ostringstream os;
        os << "k=" << k_ << ";w=" << distance_weighted_ << ";n=" << x_.rows();
        for (double v : x_.values()) {
            os << ';' << format_real(v);
        }
        for (auto l : y_) {
            os << ';' << l;
        }
        return os.str();
    }

private:
    Matrix x_;
    std::vector<ClassIndex> y_;
    std::size_t classes_;
    std::size_t k_;
    bool distance_weighted_;
};

// ---------------------------------------------------------------------------

class GaussianNaiveBayes final : public Model {
public:
    explicit GaussianNaiveBayes(Dataset const& train)
        : classes_(train.num_classes()), cols_(train.cols())
    {
        auto const& x = train.features();
        auto const& y = train.labels();
        auto const counts = count_labels(y, classes_);
        auto const n = static_cast<double>(train.rows());

        // variance smoothing relative to the widest feature
        double max_var = 0.0;
        for (std::size_t c = 0; c < cols_; ++c) {
            double mean = 0.0;
            for (std::size_t r = 0; r < x.rows(); ++r) {
                mean += x(r, c);
            }
            mean /= n;
            double var = 0.0;
            for (std::size_t r = 0; r < x.rows(); ++r) {
                var += (x(r, c) - mean) * (x(r, c) - mean);
            }
            max_var = std::max(max_var, var / n);
        }
        double const epsilon = 1e-9 * (max_var > 0.0 ? max_var : 1.0);

        mean_.assign(classes_ * cols_, 0.0);
        var_.assign(classes_ * cols_, 0.0);
        log_prior_.assign(classes_, -std::numeric_limits<double>::infinity());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                mean_[y[r] * cols_ + c] += x(r, c);
            }
        }
        for (std::size_t k = 0; k < classes_; ++k) {
            if (counts[k] == 0) {
                continue;
            }
            log_prior_[k] = std::log(static_cast<double>(counts[k]) / n);
            for (std::size_t c = 0; c < cols_; ++c) {
                mean_[k * cols_ + c] /= static_cast<double>(counts[k]);
            }
        }
        for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                double const d = x(r, c) - mean_[y[r] * cols_ + c];
                var_[y[r] * cols_ + c] += d * d;
            }
        }
        for (std::size_t k = 0; k < classes_; ++k) {
            for (std::size_t c = 0; c < cols_; ++c) {
                auto& v = var_[k * cols_ + c];
                v = (counts[k] > 0 ? v / static_cast<double>(counts[k]) : 0.0) + epsilon;
            }
        }
    }

    std::vector<ClassIndex> predict(Matrix const& x) const override
    {
        constexpr double kLog2Pi = 1.8378770664093453;
        std::vector<ClassIndex> out(x.rows());
        std::vector<double> score(classes_);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t k = 0; k < classes_; ++k) {
                if (std::isinf(log_prior_[k])) {
                    score[k] = -std::numeric_limits<double>::infinity();
                    continue;
                }
                double s = log_prior_[k];
                for (std::size_t c = 0; c < cols_; ++c) {
                    double const v = var_[k * cols_ + c];
                    double const d = x(r, c) - mean_[k * cols_ + c];
                    s -= 0.5 * (kLog2Pi + std::log(v) + d * d / v);
                }
                score[k] = s;
            }
            out[r] = argmax_class(score);
        }
        return out;
    }

    std::string summary() const override
    {
        std::ostringstream os;
        for (double v : log_prior_) {
            os << format_real(v) << ';';
        }
        for (double v : mean_) {
            os << format_real(v) << ';';
        }
        for (double v : var_) {
            os << format_real(v) << ';';
        }
        return os.str();
    }

private:
    std::size_t classes_;
    std::size_t cols_;
    std::vector<double> mean_;
    std::vector<double> var_;
    std::vector<double> log_prior_;
};

// ---------------------------------------------------------------------------
// Multinomial logistic regression on internally standardized inputs, fitted by
// full-batch gradient descent with a fixed iteration cap.

class LogisticRegression final : public Model {
public:
    LogisticRegression(Dataset const& train, double l2, std::size_t iterations)
        : classes_(train.num_classes()), cols_(train.cols())
    {
        auto const& x = train.features();
        auto const& y = train.labels();
        auto const n = x.rows();
        auto const counts = count_labels(y, classes_);
        for (std::size_t k = 0; k < classes_; ++k) {
            if (counts[k] > 0) {
                present_.push_back(static_cast<ClassIndex>(k));
            }
        }

        center_.assign(cols_, 0.0);
        scale_.assign(cols_, 1.0);
        for (std::size_t c = 0; c < cols_; ++c) {
            double mean = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                mean += x(r, c);
            }
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                var += (x(r, c) - mean) * (x(r, c) - mean);
            }
            double const sd = std::sqrt(var / static_cast<double>(n));
            center_[c] = mean;
            scale_[c] = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;
        }

        std::size_t const m = present_.size();
        std::size_t const width = cols_ + 1;
        weights_.assign(m * width, 0.0);
        if (m < 2) {
            return;
        }

        Matrix z(n, width, 1.0);
        double sq_norm = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                z(r, c) = (x(r, c) - center_[c]) / scale_[c];
            }
            for (double v : z.row(r)) {
                sq_norm += v * v;
            }
        }
        auto const nd = static_cast<double>(n);
        double const step = 1.0 / (0.5 * sq_norm / nd + l2 / nd);

        std::vector<std::size_t> target(n);
        for (std::size_t r = 0; r < n; ++r) {
            target[r] = static_cast<std::size_t>(std::find(present_.begin(), present_.end(), y[r]) - present_.begin());
        }

        std::vector<double> grad(m * width);
        std::vector<double> prob(m);
        for (std::size_t it = 0; it < iterations; ++it) {
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t r = 0; r < n; ++r) {
                softmax(z.row(r), prob);
                prob[target[r]] -= 1.0;
                for (std::size_t k = 0; k < m; ++k) {
                    for (std::size_t c = 0; c < width; ++c) {
                        grad[k * width + c] += prob[k] * z(r, c);
                    }
                }
            }
            for (std::size_t k = 0; k < m; ++k) {
                for (std::size_t c = 0; c < width; ++c) {
                    double g = grad[k * width + c] / nd;
                    if (c < cols_) {
                        g += l2 / nd * weights_[k * width + c];
                    }
                    weights_[k * width + c] -= step * g;
                }
            }
        }
    }

    std::vector<ClassIndex> predict(Matrix const& x) const override
    {
        std::vector<ClassIndex> out(x.rows());
        std::vector<double> z(cols_ + 1, 1.0);
        std::vector<double> prob(present_.size());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                z[c] = (x(r, c) - center_[c]) / scale_[c];
            }
            softmax(z, prob);
            out[r] = present_[argmax_class(prob)];
        }
        return out;
    }

    std::string summary() const override
    {
        std::ostringstream os;
        for (auto c : present_) {
            os << c << ',';
        }
        for (double v : center_) {
            os << format_real(v) << ';';
        }
        for (double v : scale_) {
            os << format_real(v) << ';';
        }
        for (double v : weights_) {
            os << format_real(v) << ';';
        }
        return os.str();
    }

private:
    void softmax(std::span<double const> z, std::vector<double>& prob) const
    {
        std::size_t const width = cols_ + 1;
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < prob.size(); ++k) {
            double s = 0.0;
            for (std::size_t c = 0; c < width; ++c) {
                s += weights_[k * width + c] * z[c];
            }
            prob[k] = s;
            peak = std::max(peak, s);
        }
        double total = 0.0;
        for (auto& p : prob) {
            p = std::exp(p - peak);
            total += p;
        }
        for (auto& p : prob) {
            p /= total;
        }
    }

    std::size_t classes_;
    std::size_t cols_;
    std::vector<ClassIndex> present_;
    std::vector<double> center_;
    std::vector<double> scale_;
    std::vector<double> weights_;
};

// ---------------------------------------------------------------------------

class MajorityClass final : public Model {
public:
    explicit MajorityClass(Dataset const& train)
        : label_(modal_class(count_labels(train.labels(), train.num_classes())))
    {
    }

    std::vector<ClassIndex> predict(Matrix const& x) const override { return std::vector<ClassIndex>(x.rows(), label_); }

    std::string summary() const override { return std::to_string(label_); }

private:
    ClassIndex label_;
};

} // namespace

ModelPtr fit_decision_tree(Dataset const& train, std::size_t max_depth, std::size_t min_leaf)
{
    return std::make_shared<DecisionTree>(train, max_depth, min_leaf);
}

ModelPtr fit_knn(Dataset const& train, std::size_t neighbors, bool distance_weighted)
{
    return std::make_shared<NearestNeighbors>(train, neighbors, distance_weighted);
}

ModelPtr fit_gaussian_nb(Dataset const& train)
{
    return std::make_shared<GaussianNaiveBayes>(train);
}

ModelPtr fit_logistic_regression(Dataset const& train, double l2, std::size_t max_iterations)
{
    return std::make_shared<LogisticRegression>(train, l2, max_iterations);
}

ModelPtr fit_majority_class(Dataset const& train)
{
    return std::make_shared<MajorityClass>(train);
}

} // namespace evoml::detail
