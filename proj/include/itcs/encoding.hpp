#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "itcs/core.hpp"
#include "itcs/errors.hpp"

namespace itcs::encoding {

enum class Strategy { WaoR, WaoD, WaoRBudget };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::WaoR: return "WAOr";
        case Strategy::WaoD: return "WAOd";
        case Strategy::WaoRBudget: return "WAOr-budget";
    }
    return "?";
}

enum class RoleKind { Effectiveness, Cost };

/// One weighted attribute: an effectiveness measure (higher is better)
/// or a cost (lower is better). The sign lambda used by the ratio
/// fitness follows from the kind: +1 for effectiveness, -1 for cost.
struct AttributeRole {
    std::string name;
    RoleKind kind = RoleKind::Effectiveness;
    double weight = 1.0;
    bool unit_column = false;  // synthetic minimization term: c_i = 1 for every test

    double lambda() const { return kind == RoleKind::Effectiveness ? +1.0 : -1.0; }
};

/// Fully resolved problem description. Construct through
/// make_problem_spec, which appends the optional minimization term and
/// normalizes all weights to sum to 1.
struct ProblemSpec {
    Strategy strategy = Strategy::WaoR;
    std::vector<AttributeRole> roles;  // includes the synthetic minimization role, if any
    bool minimization = false;
    std::optional<double> budget_percent;  // set iff strategy == WaoRBudget
    double alpha = 1.0;                    // budget penalty coefficient
};

inline ProblemSpec make_problem_spec(Strategy strategy, std::vector<AttributeRole> roles,
                                     bool minimization = false,
                                     std::optional<double> minimization_weight = std::nullopt,
                                     std::optional<double> budget_percent = std::nullopt,
                                     double alpha = 1.0) {
    if (roles.empty()) throw DataError("problem spec needs at least one attribute role");
    for (const auto& r : roles) {
        if (!std::isfinite(r.weight) || r.weight < 0.0)
            throw DataError("weight of attribute '" + r.name + "' must be finite and >= 0");
        if (r.unit_column) throw DataError("the minimization term is added internally");
        for (const auto& other : roles)
            if (&other != &r && other.name == r.name)
                throw DataError("attribute '" + r.name + "' listed twice");
    }
    if (budget_percent.has_value() != (strategy == Strategy::WaoRBudget))
        throw DataError("budget is required for WAOr-budget and invalid for other strategies");
    if (budget_percent && (!(*budget_percent > 0.0) || *budget_percent > 100.0))
        throw DataError("budget must lie in (0, 100]");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DataError("alpha must be > 0");

    ProblemSpec spec;
    spec.strategy = strategy;
    spec.minimization = minimization;
    spec.budget_percent = budget_percent;
    spec.alpha = alpha;
    spec.roles = std::move(roles);

    if (minimization) {
        // Minimization enters as one more cost term with c_i = 1; its
        // default weight is the mean of the user weights so it neither
        // dominates nor vanishes after normalization.
        double mean = 0.0;
        for (const auto& r : spec.roles) mean += r.weight;
        mean /= static_cast<double>(spec.roles.size());
        double w = minimization_weight.value_or(mean);
        if (!std::isfinite(w) || w < 0.0)
            throw DataError("minimization weight must be finite and >= 0");
        spec.roles.push_back(AttributeRole{"minimization", RoleKind::Cost, w, true});
    } else if (minimization_weight) {
        throw DataError("minimization weight given but minimization is disabled");
    }

    double total = 0.0;
    for (const auto& r : spec.roles) total += r.weight;
    if (!(total > 0.0)) throw DataError("at least one attribute weight must be positive");
    for (auto& r : spec.roles) r.weight /= total;
    return spec;
}

/// Target number of selected tests for a budget percentage: round half
/// away from zero, clamped to [0, n].
inline std::size_t budget_target(double budget_percent, std::size_t n) {
    const double raw = budget_percent / 100.0 * static_cast<double>(n);
    double b = std::round(raw);
    if (b < 0.0) b = 0.0;
    if (b > static_cast<double>(n)) b = static_cast<double>(n);
    return static_cast<std::size_t>(b);
}

/// What a classical solver needs to know about a problem: the bit
/// count, the optimization direction, and a feasibility predicate over
/// selections.
struct ClassicalInfo {
    std::size_t num_bits = 0;
    bool minimize = true;
    std::function<bool(const Selection&)> constraint;  // true = feasible

    bool feasible(const Selection& sel) const { return !constraint || constraint(sel); }
};

namespace detail {

/// Attribute values of one role in suite order; the synthetic
/// minimization role reads as all ones.
inline std::vector<double> role_column(const AttributeRole& role, const TestSuite& suite) {
    if (role.unit_column) return std::vector<double>(suite.size(), 1.0);
    return suite.column(role.name);
}

inline double column_sum(const AttributeRole& role, const std::vector<double>& column) {
    const double sum = std::accumulate(column.begin(), column.end(), 0.0);
    if (!(sum > 0.0))
        throw DataError("attribute '" + role.name + "' has zero total sum; the ratio and "
                        "deviation fitness terms divide by it");
    return sum;
}

/// Accumulates weighted squares of affine spin expressions,
///   weight * (a + sum_i g_i s_i)^2,
/// into constant + linear + pairwise coefficients. Squares expand with
/// s_i^2 = 1, so the self terms fold into the constant.
class QuadraticExpansion {
public:
    explicit QuadraticExpansion(std::size_t n)
        : n_(n), constant_(0.0), linear_(n, 0.0),
          pair_(n, std::vector<double>(n, 0.0)) {}

    void add_weighted_square(double weight, double a, const std::vector<double>& g) {
        double self = 0.0;
        for (std::size_t i = 0; i < n_; ++i) self += g[i] * g[i];
        constant_ += weight * (a * a + self);
        for (std::size_t i = 0; i < n_; ++i) linear_[i] += weight * 2.0 * a * g[i];
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = i + 1; k < n_; ++k) {
                const double q = weight * 2.0 * g[i] * g[k];
                pair_[i][k] += q;
                pair_[k][i] += q;
            }
    }

    /// fv(s) = constant + sum l_i s_i + sum_{i<k} p_ik s_i s_k maps
    /// onto the energy form via h_i = -l_i, J_ik = -p_ik.
    IsingModel to_ising() const {
        std::vector<double> h(n_);
        std::vector<std::vector<double>> j(n_, std::vector<double>(n_, 0.0));
        for (std::size_t i = 0; i < n_; ++i) h[i] = -linear_[i];
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = 0; k < n_; ++k)
                if (i != k) j[i][k] = -pair_[i][k];
        return IsingModel(std::move(h), std::move(j), constant_);
    }

private:
    std::size_t n_;
    double constant_;
    std::vector<double> linear_;
    std::vector<std::vector<double>> pair_;
};

}  // namespace detail

/// Ratio-based fitness: fv = sum_k w_k * f_k^2 with
/// f_k = 1/2 (1 + lambda_k * sum_i c_i s_i / sum_i c_i).
/// f_k lies in [0, 1] for nonnegative attributes, so fv is in [0, 1].
inline double fitness_waor(const ProblemSpec& spec, const TestSuite& suite, const SpinConfig& s) {
    if (s.size() != suite.size()) throw DataError("fitness_waor: spin/suite size mismatch");
    double fv = 0.0;
    for (const auto& role : spec.roles) {
        const auto column = detail::role_column(role, suite);
        const double sum = detail::column_sum(role, column);
        double dot = 0.0;
        for (std::size_t i = 0; i < column.size(); ++i) dot += column[i] * s[i];
        const double f = 0.5 * (1.0 + role.lambda() * dot / sum);
        fv += role.weight * f * f;
    }
    return fv;
}

/// Deviation-based fitness: per attribute the squared gap between the
/// selected mass and its theoretical limit (all of it for effectiveness
/// attributes, none for costs). Attribute columns are divided by their
/// sum first so limits are 1 and 0 and the terms are commensurate; the
/// squared deviations are combined linearly, keeping fv quadratic in s.
inline double fitness_waod(const ProblemSpec& spec, const TestSuite& suite, const SpinConfig& s) {
    if (s.size() != suite.size()) throw DataError("fitness_waod: spin/suite size mismatch");
    double fv = 0.0;
    for (const auto& role : spec.roles) {
        const auto column = detail::role_column(role, suite);
        const double sum = detail::column_sum(role, column);
        const double limit = role.kind == RoleKind::Effectiveness ? 1.0 : 0.0;
        double selected_mass = 0.0;
        for (std::size_t i = 0; i < column.size(); ++i)
            selected_mass += column[i] / sum * (1.0 - s[i]) / 2.0;
        const double dev = selected_mass - limit;
        fv += role.weight * dev * dev;
    }
    return fv;
}

/// Budget-constrained ratio fitness: H = fv + alpha * (count - B)^2.
inline double fitness_waor_budget(const ProblemSpec& spec, const TestSuite& suite,
                                  const SpinConfig& s) {
    if (!spec.budget_percent) throw DataError("fitness_waor_budget: spec has no budget");
    const std::size_t b = budget_target(*spec.budget_percent, suite.size());
    const double gap = static_cast<double>(s.count_selected()) - static_cast<double>(b);
    return fitness_waor(spec, suite, s) + spec.alpha * gap * gap;
}

/// Strategy dispatch used by solvers and tests.
inline double fitness(const ProblemSpec& spec, const TestSuite& suite, const SpinConfig& s) {
    switch (spec.strategy) {
        case Strategy::WaoR: return fitness_waor(spec, suite, s);
        case Strategy::WaoD: return fitness_waod(spec, suite, s);
        case Strategy::WaoRBudget: return fitness_waor_budget(spec, suite, s);
    }
    throw DataError("unknown strategy");
}

/// Symbolic expansion of the selected strategy into an Ising model such
/// that total_energy(model, s) == fitness(spec, suite, s) for every s.
inline IsingModel to_ising(const ProblemSpec& spec, const TestSuite& suite) {
    const std::size_t n = suite.size();
    detail::QuadraticExpansion expansion(n);

    const bool ratio = spec.strategy == Strategy::WaoR || spec.strategy == Strategy::WaoRBudget;
    for (const auto& role : spec.roles) {
        const auto column = detail::role_column(role, suite);
        const double sum = detail::column_sum(role, column);
        if (ratio) {
            // f_k = 1/2 + lambda/(2 sum) * sum_i c_i s_i, contributes w_k f_k^2.
            std::vector<double> g(n);
            for (std::size_t i = 0; i < n; ++i) g[i] = role.lambda() / (2.0 * sum) * column[i];
            expansion.add_weighted_square(role.weight, 0.5, g);
        } else {
            // f_k = (d_k - 1/2 sum_i chat_i s_i)^2 with chat = c/sum and
            // d_k = 1/2 - limit; contributes w_k f_k.
            const double limit = role.kind == RoleKind::Effectiveness ? 1.0 : 0.0;
            const double d = 0.5 - limit;
            std::vector<double> g(n);
            for (std::size_t i = 0; i < n; ++i) g[i] = -column[i] / sum / 2.0;
            expansion.add_weighted_square(role.weight, d, g);
        }
    }

    if (spec.strategy == Strategy::WaoRBudget) {
        // alpha * (sum_i (1 - s_i)/2 - B)^2, affine in s with slope -1/2.
        const std::size_t b = budget_target(*spec.budget_percent, n);
        const double d = static_cast<double>(n) / 2.0 - static_cast<double>(b);
        std::vector<double> g(n, -0.5);
        expansion.add_weighted_square(spec.alpha, d, g);
    }

    return expansion.to_ising();
}

/// Classical-solver view of a problem. Budget specs expose the budget
/// as a `count <= B` feasibility predicate; the objective handed to
/// classical solvers is the unpenalized ratio fitness.
inline ClassicalInfo classical_info(const ProblemSpec& spec, const TestSuite& suite) {
    ClassicalInfo info;
    info.num_bits = suite.size();
    info.minimize = true;
    if (spec.strategy == Strategy::WaoRBudget) {
        const std::size_t b = budget_target(*spec.budget_percent, suite.size());
        info.constraint = [b](const Selection& sel) { return sel.count() <= b; };
    } else {
        info.constraint = [](const Selection&) { return true; };
    }
    return info;
}

/// Objective evaluated by classical solvers on a selection mask; for
/// the budget strategy this is the unpenalized ratio fitness, the
/// budget itself being enforced through the constraint.
inline double classical_fitness(const ProblemSpec& spec, const TestSuite& suite,
                                const std::vector<bool>& mask) {
    const SpinConfig s = mask_to_spins(mask);
    if (spec.strategy == Strategy::WaoRBudget) return fitness_waor(spec, suite, s);
    return fitness(spec, suite, s);
}

}  // namespace itcs::encoding
