#include "evoml/components.hpp"

#include "models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace evoml {

std::string_view to_string(ComponentKind kind)
{
    return kind == ComponentKind::classifier ? "classifier" : "transformer";
}

std::string format_param(ParamValue const& value)
{
    if (auto const* i = std::get_if<long>(&value)) {
        return std::to_string(*i);
    }
    if (auto const* d = std::get_if<double>(&value)) {
        return detail::format_real(*d);
    }
    return std::get<std::string>(value);
}

namespace {

std::vector<ComponentInfo> build_registry()
{
    using K = ComponentKind;
    return {
        { "decision_tree", K::classifier, { { "max_depth", { 2L, 4L, 8L, 16L } }, { "min_leaf", { 1L, 5L, 20L } } } },
        { "k_nearest_neighbors", K::classifier, { { "k_neighbors", { 1L, 3L, 5L, 7L } }, { "weights", { std::string("uniform"), std::string("distance") } } } },
        { "gaussian_naive_bayes", K::classifier, {} },
        { "logistic_regression", K::classifier, { { "l2", { 0.01, 0.1, 1.0, 10.0 } } } },
        { "majority_class", K::classifier, {} },
        { "standard_scaler", K::transformer, {} },
        { "min_max_scaler", K::transformer, {} },
        { "variance_threshold", K::transformer, { { "threshold", { 0.0, 0.05, 0.1 } } } },
        { "pca", K::transformer, { { "n_components", { 2L, 5L, 10L } } } },
        { "select_k_best", K::transformer, { { "k", { 2L, 5L, 10L } } } },
    };
}

constexpr std::size_t kLogisticIterations = 200;

} // namespace

std::span<ComponentInfo const> registry_list()
{
    static std::vector<ComponentInfo> const registry = build_registry();
    return registry;
}

ComponentInfo const& registry_lookup(std::string_view name)
{
    auto reg = registry_list();
    auto it = std::find_if(reg.begin(), reg.end(), [&](auto const& c) { return c.name == name; });
    if (it == reg.end()) {
        throw ComponentError("unknown component '" + std::string(name) + "'");
    }
    return *it;
}

std::vector<ComponentInfo const*> registry_of_kind(ComponentKind kind)
{
    std::vector<ComponentInfo const*> out;
    for (auto const& c : registry_list()) {
        if (c.kind == kind) {
            out.push_back(&c);
        }
    }
    return out;
}

ComponentSpec ComponentSpec::make(std::string_view name, Params const& params)
{
    auto const& info = registry_lookup(name);
    for (auto const& [key, value] : params) {
        auto it = std::find_if(info.grid.begin(), info.grid.end(), [&](auto const& g) { return g.name == key; });
        if (it == info.grid.end()) {
            throw ComponentError("component '" + info.name + "' has no hyperparameter '" + key + "'");
        }
        if (std::find(it->values.begin(), it->values.end(), value) == it->values.end()) {
            throw ComponentError("value " + format_param(value) + " is not in the grid of " + info.name + "." + key);
        }
    }
    ComponentSpec spec;
    spec.kind_ = info.kind;
    spec.name_ = info.name;
    for (auto const& g : info.grid) {
        auto it = std::find_if(params.begin(), params.end(), [&](auto const& p) { return p.first == g.name; });
        spec.params_.emplace_back(g.name, it == params.end() ? g.values.front() : it->second);
    }
    return spec;
}

ComponentSpec ComponentSpec::parse(std::string_view text)
{
    auto strip = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
            s.remove_prefix(1);
        }
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
            s.remove_suffix(1);
        }
        return s;
    };
    text = strip(text);
    auto const open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') {
        throw ComponentError("malformed component text '" + std::string(text) + "'");
    }
    auto const name = strip(text.substr(0, open));
    auto const& info = registry_lookup(name);
    auto body = text.substr(open + 1, text.size() - open - 2);

    Params params;
    while (!strip(body).empty()) {
        auto const comma = body.find(',');
        auto item = strip(body.substr(0, comma));
        body = comma == std::string_view::npos ? std::string_view {} : body.substr(comma + 1);
        auto const eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw ComponentError("malformed hyperparameter '" + std::string(item) + "'");
        }
        auto key = std::string(strip(item.substr(0, eq)));
        auto val = strip(item.substr(eq + 1));
        auto g = std::find_if(info.grid.begin(), info.grid.end(), [&](auto const& p) { return p.name == key; });
        if (g == info.grid.end()) {
            throw ComponentError("component '" + info.name + "' has no hyperparameter '" + key + "'");
        }
        auto v = std::find_if(g->values.begin(), g->values.end(), [&](auto const& p) { return format_param(p) == val; });
        if (v == g->values.end()) {
            throw ComponentError("value " + std::string(val) + " is not in the grid of " + info.name + "." + key);
        }
        params.emplace_back(std::move(key), *v);
    }
    return make(name, params);
}

ParamValue const& ComponentSpec::param(std::string_view key) const
{
    for (auto const& [k, v] : params_) {
        if (k == key) {
            return v;
        }
    }
    throw ComponentError("component '" + name_ + "' has no hyperparameter '" + std::string(key) + "'");
}

long ComponentSpec::int_param(std::string_view key) const { return std::get<long>(param(key)); }
double ComponentSpec::real_param(std::string_view key) const { return std::get<double>(param(key)); }
std::string const& ComponentSpec::text_param(std::string_view key) const { return std::get<std::string>(param(key)); }

std::string ComponentSpec::to_string() const
{
    std::string out = name_ + "(";
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += params_[i].first + "=" + format_param(params_[i].second);
    }
    return out + ")";
}

namespace detail {

std::vector<ClassIndex> Model::predict(Matrix const& /*features*/) const
{
    throw ComponentError("component is not a classifier");
}

Matrix Model::transform(Matrix const& /*features*/) const
{
    throw ComponentError("component is not a transformer");
}

ClassIndex argmax_class(std::span<double const> scores)
{
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c] > scores[best]) {
            best = c;
        }
    }
    return static_cast<ClassIndex>(best);
}

std::string format_real(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(std::begin(buf), std::end(buf), value);
    return { std::begin(buf), ptr };
}

} // namespace detail

void FittedComponent::check_arity(Matrix const& features) const
{
    if (features.cols() != input_arity_) {
        throw ComponentError(spec_.name() + ": expected " + std::to_string(input_arity_) + " features, got " + std::to_string(features.cols()));
    }
}

std::vector<ClassIndex> FittedComponent::predict(Matrix const& features) const
{
    if (spec_.kind() != ComponentKind::classifier) {
        throw ComponentError(spec_.name() + " is not a classifier");
    }
    check_arity(features);
    return model_->predict(features);
}

Matrix FittedComponent::transform(Matrix const& features) const
{
    if (spec_.kind() != ComponentKind::transformer) {
        throw ComponentError(spec_.name() + " is not a transformer");
    }
    check_arity(features);
    auto out = model_->transform(features);
    if (!std::all_of(out.values().begin(), out.values().end(), [](double v) { return std::isfinite(v); })) {
        throw ComponentError(spec_.name() + ": non-finite output");
    }
    return out;
}

FittedComponent fit(ComponentSpec const& spec, Dataset const& train, std::uint64_t /*component_seed*/)
{
    // every registered learner is deterministic, so the component seed is currently unused
    if (train.rows() == 0) {
        throw ComponentError(spec.name() + ": empty training set");
    }
    auto const& x = train.features();
    if (!std::all_of(x.values().begin(), x.values().end(), [](double v) { return std::isfinite(v); })) {
        throw ComponentError(spec.name() + ": non-finite training input");
    }
    auto const& name = spec.name();
    auto const as_size = [&](std::string_view key) { return static_cast<std::size_t>(spec.int_param(key)); };

    detail::ModelPtr model;
    if (name == "decision_tree") {
        model = detail::fit_decision_tree(train, as_size("max_depth"), as_size("min_leaf"));
    } else if (name == "k_nearest_neighbors") {
        model = detail::fit_knn(train, as_size("k_neighbors"), spec.text_param("weights") == "distance");
    } else if (name == "gaussian_naive_bayes") {
        model = detail::fit_gaussian_nb(train);
    } else if (name == "logistic_regression") {
        model = detail::fit_logistic_regression(train, spec.real_param("l2"), kLogisticIterations);
    } else if (name == "majority_class") {
        model = detail::fit_majority_class(train);
    } else if (name == "standard_scaler") {
        model = detail::fit_standard_scaler(x);
    } else if (name == "min_max_scaler") {
        model = detail::fit_min_max_scaler(x);
    } else if (name == "variance_threshold") {
        model = detail::fit_variance_threshold(x, spec.real_param("threshold"));
    } else if (name == "pca") {
        model = detail::fit_pca(x, as_size("n_components"));
    } else if (name == "select_k_best") {
        model = detail::fit_select_k_best(train, as_size("k"));
    } else {
        throw ComponentError("no implementation for component '" + name + "'");
    }
    return { spec, x.cols(), std::move(model) };
}

} // namespace evoml
