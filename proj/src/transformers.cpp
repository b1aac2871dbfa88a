#include "models.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace evoml::detail {

namespace {

struct ColumnStats {
    double mean { 0.0 };
    double variance { 0.0 };
    double min { 0.0 };
    double max { 0.0 };
};

std::vector<ColumnStats> column_stats(Matrix const& x)
{
    std::vector<ColumnStats> stats(x.cols());
    auto const n = static_cast<double>(x.rows());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        auto& s = stats[c];
        s.min = std::numeric_limits<double>::infinity();
        s.max = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < x.rows(); ++r) {
            s.mean += x(r, c);
            s.min = std::min(s.min, x(r, c));
            s.max = std::max(s.max, x(r, c));
        }
        s.mean /= n;
        if (s.min == s.max) {
            // constant columns get an exact zero, independent of rounding in the mean
            s.mean = s.min;
            continue;
        }
        for (std::size_t r = 0; r < x.rows(); ++r) {
            double const d = x(r, c) - s.mean;
            s.variance += d * d;
        }
        s.variance /= n;
    }
    return stats;
}

std::string join(std::vector<double> const& values)
{
    std::ostringstream os;
    for (double v : values) {
        os << format_real(v) << ';';
    }
    return os.str();
}

/// y = (x - offset) / divisor, per column.
class AffineScaler final : public Model {
public:
    AffineScaler(std::vector<double> offset, std::vector<double> divisor)
        : offset_(std::move(offset)), divisor_(std::move(divisor)) {}

    Matrix transform(Matrix const& x) const override
    {
        Matrix out(x.rows(), x.cols());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t c = 0; c < x.cols(); ++c) {
                out(r, c) = (x(r, c) - offset_[c]) / divisor_[c];
            }
        }
        return out;
    }

    std::string summary() const override { return join(offset_) + '|' + join(divisor_); }

private:
    std::vector<double> offset_;
    std::vector<double> divisor_;
};

class ColumnSelector final : public Model {
public:
    explicit ColumnSelector(std::vector<std::size_t> keep) : keep_(std::move(keep)) {}

    Matrix transform(Matrix const& x) const override { return x.select_cols(keep_); }

    std::string summary() const override
    {
        std::ostringstream os;
        for (auto c : keep_) {
            os << c << ';';
        }
        return os.str();
    }

private:
    std::vector<std::size_t> keep_;
};

class Projection final : public Model {
public:
    Projection(std::vector<double> mean, Eigen::MatrixXd basis) : mean_(std::move(mean)), basis_(std::move(basis)) {}

    Matrix transform(Matrix const& x) const override
    {
        auto const k = static_cast<std::size_t>(basis_.cols());
        Matrix out(x.rows(), k);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t j = 0; j < k; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < x.cols(); ++c) {
                    s += (x(r, c) - mean_[c]) * basis_(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j));
                }
                out(r, j) = s;
            }
        }
        return out;
    }

    std::string summary() const override
    {
        std::vector<double> flat(basis_.data(), basis_.data() + basis_.size());
        return join(mean_) + '|' + join(flat);
    }

private:
    std::vector<double> mean_;
    Eigen::MatrixXd basis_;
};

} // namespace

ModelPtr fit_standard_scaler(Matrix const& x)
{
    auto const stats = column_stats(x);
    std::vector<double> offset;
    std::vector<double> divisor;
    for (auto const& s : stats) {
        offset.push_back(s.mean);
        double const sd = std::sqrt(s.variance);
        divisor.push_back(sd > 0.0 ? sd : 1.0);
    }
    return std::make_shared<AffineScaler>(std::move(offset), std::move(divisor));
}

ModelPtr fit_min_max_scaler(Matrix const& x)
{
    auto const stats = column_stats(x);
    std::vector<double> offset;
    std::vector<double> divisor;
    for (auto const& s : stats) {
        offset.push_back(s.min);
        double const range = s.max - s.min;
        divisor.push_back(range > 0.0 ? range : 1.0);
    }
    return std::make_shared<AffineScaler>(std::move(offset), std::move(divisor));
}

ModelPtr fit_variance_threshold(Matrix const& x, double threshold)
{
    auto const stats = column_stats(x);
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < stats.size(); ++c) {
        if (stats[c].variance > threshold) {
            keep.push_back(c);
        }
    }
    if (keep.empty()) {
        // never emit an empty feature set: fall back to the widest column
        std::size_t best = 0;
        for (std::size_t c = 1; c < stats.size(); ++c) {
            if (stats[c].variance > stats[best].variance) {
                best = c;
            }
        }
        keep.push_back(best);
    }
    return std::make_shared<ColumnSelector>(std::move(keep));
}

ModelPtr fit_pca(Matrix const& x, std::size_t components)
{
    auto const n = static_cast<Eigen::Index>(x.rows());
    auto const d = static_cast<Eigen::Index>(x.cols());
    auto const k = static_cast<Eigen::Index>(std::clamp<std::size_t>(components, 1, x.cols()));

    auto const stats = column_stats(x);
    std::vector<double> mean;
    for (auto const& s : stats) {
        mean.push_back(s.mean);
    }
    Eigen::MatrixXd centered(n, d);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            centered(r, c) = x(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) - mean[static_cast<std::size_t>(c)];
        }
    }
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(std::max<Eigen::Index>(n, 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw ComponentError("pca: eigen decomposition failed");
    }

    // eigenvalues come back ascending; take the top k, sign-fixed so the largest |entry| is positive
    Eigen::MatrixXd basis(d, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::VectorXd v = solver.eigenvectors().col(d - 1 - j);
        Eigen::Index peak = 0;
        v.cwiseAbs().maxCoeff(&peak);
        if (v(peak) < 0) {
            v = -v;
        }
        basis.col(j) = v;
    }
    return std::make_shared<Projection>(std::move(mean), std::move(basis));
}

ModelPtr fit_select_k_best(Dataset const& train, std::size_t k)
{
    auto const& x = train.features();
    auto const& y = train.labels();
    auto const classes = train.num_classes();
    auto const n = x.rows();

    std::vector<std::size_t> counts(classes, 0);
    for (auto l : y) {
        ++counts[l];
    }
    auto const groups = static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));

    // one-way ANOVA F statistic per column
    std::vector<double> score(x.cols(), 0.0);
    std::vector<double> class_sum(classes);
    for (std::size_t c = 0; c < x.cols() && groups >= 2; ++c) {
        std::fill(class_sum.begin(), class_sum.end(), 0.0);
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            class_sum[y[r]] += x(r, c);
            total += x(r, c);
        }
        double const grand = total / static_cast<double>(n);
        double between = 0.0;
        for (std::size_t g = 0; g < classes; ++g) {
            if (counts[g] > 0) {
                double const m = class_sum[g] / static_cast<double>(counts[g]);
                between += static_cast<double>(counts[g]) * (m - grand) * (m - grand);
            }
        }
        double within = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double const m = class_sum[y[r]] / static_cast<double>(counts[y[r]]);
            within += (x(r, c) - m) * (x(r, c) - m);
        }
        if (within > 0.0 && n > groups) {
            score[c] = (between / static_cast<double>(groups - 1)) / (within / static_cast<double>(n - groups));
        } else {
            score[c] = between > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        }
    }

    std::vector<std::size_t> order(x.cols());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return score[a] > score[b]; });
    order.resize(std::clamp<std::size_t>(k, 1, x.cols()));
    std::sort(order.begin(), order.end());
    return std::make_shared<ColumnSelector>(std::move(order));
}

} // namespace evoml::detail
