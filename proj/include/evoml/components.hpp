#pragma once

#include "evoml/data.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace evoml {

/// Raised by fit/predict/transform; the fitness layer turns it into a failed evaluation.
class ComponentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ComponentKind { classifier, transformer };

std::string_view to_string(ComponentKind kind);

using ParamValue = std::variant<long, double, std::string>;

std::string format_param(ParamValue const& value);

struct ParamGrid {
    std::string name;
    std::vector<ParamValue> values;
};

struct ComponentInfo {
    std::string name;
    ComponentKind kind;
    std::vector<ParamGrid> grid;
};

/// The native component registry. Ordering is fixed: classifiers first, then
/// transformers, each in declaration order. Names and grids are public vocabulary.
std::span<ComponentInfo const> registry_list();

ComponentInfo const& registry_lookup(std::string_view name);

std::vector<ComponentInfo const*> registry_of_kind(ComponentKind kind);

/// A registered component plus one value per declared hyperparameter, stored in grid order.
class ComponentSpec {
public:
    using Params = std::vector<std::pair<std::string, ParamValue>>;

    /// Validates name and every value against the registry grid. Missing
    /// hyperparameters take the first grid value.
    static ComponentSpec make(std::string_view name, Params const& params = {});

    /// Parses `name(p=v,...)`.
    static ComponentSpec parse(std::string_view text);

    [[nodiscard]] ComponentKind kind() const { return kind_; }
    [[nodiscard]] std::string const& name() const { return name_; }
    [[nodiscard]] Params const& params() const { return params_; }

    [[nodiscard]] ParamValue const& param(std::string_view key) const;
    [[nodiscard]] long int_param(std::string_view key) const;
    [[nodiscard]] double real_param(std::string_view key) const;
    [[nodiscard]] std::string const& text_param(std::string_view key) const;

    [[nodiscard]] std::string to_string() const;

    bool operator==(ComponentSpec const&) const = default;

private:
    ComponentSpec() = default;

    ComponentKind kind_ { ComponentKind::classifier };
    std::string name_;
    Params params_;
};

namespace detail {

class Model {
public:
    virtual ~Model() = default;
    virtual std::vector<ClassIndex> predict(Matrix const& features) const;
    virtual Matrix transform(Matrix const& features) const;
    virtual std::string summary() const = 0;
};

} // namespace detail

class FittedComponent {
public:
    FittedComponent(ComponentSpec spec, std::size_t input_arity, std::shared_ptr<detail::Model const> model)
        : spec_(std::move(spec)), input_arity_(input_arity), model_(std::move(model)) {}

    [[nodiscard]] ComponentSpec const& spec() const { return spec_; }
    [[nodiscard]] std::size_t input_arity() const { return input_arity_; }

    /// Text rendering of the learned state at full precision; equal for equal fits.
    [[nodiscard]] std::string state_summary() const { return model_->summary(); }

    [[nodiscard]] std::vector<ClassIndex> predict(Matrix const& features) const;
    [[nodiscard]] Matrix transform(Matrix const& features) const;

private:
    void check_arity(Matrix const& features) const;

    ComponentSpec spec_;
    std::size_t input_arity_;
    std::shared_ptr<detail::Model const> model_;
};

FittedComponent fit(ComponentSpec const& spec, Dataset const& train, std::uint64_t component_seed);

inline std::vector<ClassIndex> predict(FittedComponent const& m, Matrix const& features) { return m.predict(features); }
inline Matrix transform(FittedComponent const& m, Matrix const& features) { return m.transform(features); }

} // namespace evoml
