#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "itcs/encoding.hpp"
#include "itcs/errors.hpp"
#include "itcs/util.hpp"

namespace itcs::encoding {

/// Raw key=value problem parameters as given on the command line or in
/// a config file; each factory interprets the ones it understands.
using ParamMap = std::map<std::string, std::string>;

namespace detail {

/// Parses the CLI list syntax: ['rate','time'], [0.5,0.5] or a bare
/// scalar. Items may be single- or double-quoted.
inline std::vector<std::string> parse_value_list(const std::string& raw_in) {
    std::string raw{trim(raw_in)};
    std::vector<std::string> items;
    if (raw.size() >= 2 && raw.front() == '[' && raw.back() == ']') {
        const std::string body = raw.substr(1, raw.size() - 2);
        if (trim(body).empty()) return items;
        for (auto& piece : split(body, ',')) {
            std::string item{trim(piece)};
            if (item.size() >= 2 &&
                ((item.front() == '\'' && item.back() == '\'') ||
                 (item.front() == '"' && item.back() == '"')))
                item = item.substr(1, item.size() - 2);
            items.push_back(item);
        }
        return items;
    }
    items.push_back(raw);
    return items;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw UsageError("problem parameter '" + key + "' expects true or false, got '" + value + "'");
}

inline double parse_real(const std::string& key, const std::string& value) {
    auto v = parse_double(value);
    if (!v) throw UsageError("problem parameter '" + key + "' expects a number, got '" + value + "'");
    return *v;
}

}  // namespace detail

/// A registered optimization problem: converts the input data into an
/// Ising model, evaluates candidate solutions, and describes itself to
/// classical solvers. New formulations implement this interface and
/// register a factory under a name.
class Problem {
public:
    virtual ~Problem() = default;

    virtual const std::string& name() const = 0;
    virtual const TestSuite& suite() const = 0;

    /// Fitness of an Ising spin configuration (the quantity the Ising
    /// energy reproduces).
    virtual double fitness(const SpinConfig& s) const = 0;

    /// Expansion into linear/quadratic coefficients plus offset.
    virtual IsingModel to_ising() const = 0;

    virtual ClassicalInfo classical_info() const = 0;

    /// Objective evaluated by classical solvers over a selection mask.
    virtual double classical_fitness(const std::vector<bool>& mask) const = 0;
};

/// The built-in weighted-attribute family (ratio, deviation, budget).
class WeightedAttributeProblem final : public Problem {
public:
    WeightedAttributeProblem(std::string name, ProblemSpec spec, TestSuite suite)
        : name_(std::move(name)), spec_(std::move(spec)), suite_(std::move(suite)) {
        for (const auto& role : spec_.roles)
            if (!role.unit_column && !suite_.has_attribute(role.name))
                throw DataError("attribute '" + role.name + "' not present in the dataset; "
                                "available: " + join(suite_.attribute_names(), ", "));
    }

    const std::string& name() const override { return name_; }
    const TestSuite& suite() const override { return suite_; }
    const ProblemSpec& spec() const { return spec_; }

    double fitness(const SpinConfig& s) const override {
        return encoding::fitness(spec_, suite_, s);
    }
    IsingModel to_ising() const override { return encoding::to_ising(spec_, suite_); }
    ClassicalInfo classical_info() const override {
        return encoding::classical_info(spec_, suite_);
    }
    double classical_fitness(const std::vector<bool>& mask) const override {
        return encoding::classical_fitness(spec_, suite_, mask);
    }

private:
    std::string name_;
    ProblemSpec spec_;
    TestSuite suite_;
};

using ProblemFactory =
    std::function<std::unique_ptr<Problem>(const TestSuite&, const ParamMap&)>;

namespace detail {

/// Builds the weighted-attribute ProblemSpec from CLI-style parameters.
inline ProblemSpec spec_from_params(Strategy strategy, const ParamMap& params,
                                    const TestSuite& suite) {
    std::vector<AttributeRole> roles;
    bool minimization = false;
    std::optional<double> minimization_weight;
    std::optional<double> budget;
    double alpha = 1.0;
    std::vector<double> weights;

    for (const auto& [key, value] : params) {
        if (key == "effectiveness" || key == "cost") {
            const auto kind = key == "effectiveness" ? RoleKind::Effectiveness : RoleKind::Cost;
            for (const auto& name : parse_value_list(value))
                roles.push_back(AttributeRole{name, kind, 1.0, false});
        } else if (key == "minimization") {
            minimization = parse_bool(key, value);
        } else if (key == "minimization_weight") {
            minimization_weight = parse_real(key, value);
        } else if (key == "budget") {
            budget = parse_real(key, value);
        } else if (key == "alpha") {
            alpha = parse_real(key, value);
        } else if (key == "weights") {
            for (const auto& w : parse_value_list(value)) weights.push_back(parse_real(key, w));
        } else {
            throw UsageError("unknown problem parameter '" + key + "'; expected one of: "
                             "effectiveness, cost, weights, minimization, minimization_weight, "
                             "budget, alpha");
        }
    }

    // Roles keep the command-line order: effectiveness attributes first,
    // then costs (std::map iterates "cost" before "effectiveness", so
    // rebuild in the declared convention).
    std::vector<AttributeRole> ordered;
    for (const auto& r : roles)
        if (r.kind == RoleKind::Effectiveness) ordered.push_back(r);
    for (const auto& r : roles)
        if (r.kind == RoleKind::Cost) ordered.push_back(r);

    if (ordered.empty())
        throw UsageError("at least one effectiveness or cost attribute is required");
    if (!weights.empty()) {
        if (weights.size() != ordered.size())
            throw UsageError("weights lists " + std::to_string(weights.size()) +
                             " values for " + std::to_string(ordered.size()) + " attributes");
        for (std::size_t i = 0; i < ordered.size(); ++i) ordered[i].weight = weights[i];
    }

    if (strategy != Strategy::WaoRBudget && budget)
        throw UsageError("'budget' applies only to WAOr-budget");
    if (strategy == Strategy::WaoRBudget && !budget)
        throw UsageError("WAOr-budget requires the 'budget' parameter (percentage of the suite)");

    (void)suite;
    return make_problem_spec(strategy, std::move(ordered), minimization, minimization_weight,
                             budget, alpha);
}

}  // namespace detail

/// Name -> factory table. Built-ins are installed on first access; the
/// registry is meant to be fully populated before solving starts and
/// only read afterwards.
class ProblemRegistry {
public:
    static ProblemRegistry& instance() {
        static ProblemRegistry registry;
        return registry;
    }

    void add(const std::string& name, ProblemFactory factory) {
        if (factories_.count(name))
            throw UsageError("problem '" + name + "' is already registered");
        factories_.emplace(name, std::move(factory));
    }

    bool contains(const std::string& name) const { return factories_.count(name) > 0; }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [name, _] : factories_) out.push_back(name);
        return out;
    }

    std::unique_ptr<Problem> make(const std::string& name, const TestSuite& suite,
                                  const ParamMap& params) const {
        auto it = factories_.find(name);
        if (it == factories_.end())
            throw UsageError("unknown problem '" + name + "'; registered problems: " +
                             join(names(), ", "));
        return it->second(suite, params);
    }

private:
    ProblemRegistry() {
        auto builtin = [](std::string name, Strategy strategy) {
            return [name, strategy](const TestSuite& suite,
                                    const ParamMap& params) -> std::unique_ptr<Problem> {
                return std::make_unique<WeightedAttributeProblem>(
                    name, detail::spec_from_params(strategy, params, suite), suite);
            };
        };
        factories_.emplace("WAOr", builtin("WAOr", Strategy::WaoR));
        factories_.emplace("WAOd", builtin("WAOd", Strategy::WaoD));
        factories_.emplace("WAOr-budget", builtin("WAOr-budget", Strategy::WaoRBudget));
    }

    std::map<std::string, ProblemFactory> factories_;
};

inline void register_problem(const std::string& name, ProblemFactory factory) {
    ProblemRegistry::instance().add(name, std::move(factory));
}

inline std::unique_ptr<Problem> make_problem(const std::string& name, const TestSuite& suite,
                                             const ParamMap& params) {
    return ProblemRegistry::instance().make(name, suite, params);
}

}  // namespace itcs::encoding
