#pragma once

// Learner and transformer implementations behind the component registry.

#include "evoml/components.hpp"

#include <memory>

namespace evoml::detail {

using ModelPtr = std::shared_ptr<Model const>;

ModelPtr fit_decision_tree(Dataset const& train, std::size_t max_depth, std::size_t min_leaf);
ModelPtr fit_knn(Dataset const& train, std::size_t neighbors, bool distance_weighted);
ModelPtr fit_gaussian_nb(Dataset const& train);
ModelPtr fit_logistic_regression(Dataset const& train, double l2, std::size_t max_iterations);
ModelPtr fit_majority_class(Dataset const& train);

ModelPtr fit_standard_scaler(Matrix const& x);
ModelPtr fit_min_max_scaler(Matrix const& x);
ModelPtr fit_variance_threshold(Matrix const& x, double threshold);
ModelPtr fit_pca(Matrix const& x, std::size_t components);
ModelPtr fit_select_k_best(Dataset const& train, std::size_t k);

// Shared helpers.
ClassIndex argmax_class(std::span<double const> scores);
std::string format_real(double value);

} // namespace evoml::detail
