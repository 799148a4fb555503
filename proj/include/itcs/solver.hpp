#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "itcs/cim.hpp"
#include "itcs/classical.hpp"
#include "itcs/core.hpp"
#include "itcs/encoding.hpp"
#include "itcs/errors.hpp"
#include "itcs/util.hpp"

namespace itcs::solvers {

/// Which input a solver consumes: the Ising model, or the classical
/// (objective, constraint) pair.
enum class Family { Ising, Classical };

struct IsingOutput {
    SolverResult result;
    std::vector<cim::CimTrace> traces;  // empty for solvers without trajectories
};

class IsingSolver {
public:
    virtual ~IsingSolver() = default;
    virtual IsingOutput solve(const IsingModel& model, std::uint64_t seed) const = 0;
};

class ClassicalSolver {
public:
    virtual ~ClassicalSolver() = default;
    virtual SolverResult solve(const classical::Objective& objective,
                               const encoding::ClassicalInfo& info,
                               std::uint64_t seed) const = 0;
};

/// Raw key=value solver parameters from the CLI/config.
using SolverParams = std::map<std::string, std::string>;

namespace detail {

template <typename T>
T require_number(const std::string& solver, const std::string& key, const std::string& value);

template <>
inline double require_number<double>(const std::string& solver, const std::string& key,
                                     const std::string& value) {
    auto v = parse_double(value);
    if (!v || !std::isfinite(*v))
        throw UsageError("solver parameter " + solver + "." + key +
                         " expects a finite number, got '" + value + "'");
    return *v;
}

template <>
inline std::size_t require_number<std::size_t>(const std::string& solver, const std::string& key,
                                               const std::string& value) {
    auto v = parse_int(value);
    if (!v || *v < 0)
        throw UsageError("solver parameter " + solver + "." + key +
                         " expects a nonnegative integer, got '" + value + "'");
    return static_cast<std::size_t>(*v);
}

inline void reject_unknown(const std::string& solver, const SolverParams& params,
                           const std::vector<std::string>& known) {
    for (const auto& [key, _] : params) {
        bool ok = false;
        for (const auto& k : known)
            if (k == key) ok = true;
        if (!ok)
            throw UsageError("unknown solver parameter '" + key + "' for " + solver +
                             "; accepted: " + join(known, ", "));
    }
}

class CimAdapter final : public IsingSolver {
public:
    explicit CimAdapter(const SolverParams& params) {
        reject_unknown("CIM", params,
                       {"g2", "j", "beta", "noise_scale", "steps", "dt", "batches",
                        "pump_end_factor", "coupling_strength", "initial_mu"});
        for (const auto& [key, value] : params) {
            if (key == "g2") params_.g2 = require_number<double>("CIM", key, value);
            else if (key == "j") params_.j = require_number<double>("CIM", key, value);
            else if (key == "beta") params_.beta = require_number<double>("CIM", key, value);
            else if (key == "noise_scale")
                params_.noise_scale = require_number<double>("CIM", key, value);
            else if (key == "steps") params_.steps = require_number<std::size_t>("CIM", key, value);
            else if (key == "dt") params_.dt = require_number<double>("CIM", key, value);
            else if (key == "batches")
                params_.batches = require_number<std::size_t>("CIM", key, value);
            else if (key == "pump_end_factor")
                params_.pump_end_factor = require_number<double>("CIM", key, value);
            else if (key == "coupling_strength")
                params_.coupling_strength = require_number<double>("CIM", key, value);
            else if (key == "initial_mu")
                params_.initial_mu = require_number<double>("CIM", key, value);
        }
        params_.validate();
    }

    IsingOutput solve(const IsingModel& model, std::uint64_t seed) const override {
        auto out = cim::cim_solve(model, params_, seed);
        return IsingOutput{std::move(out.result), std::move(out.traces)};
    }

private:
    cim::CimParams params_;
};

class BruteForceAdapter final : public IsingSolver {
public:
    explicit BruteForceAdapter(const SolverParams& params) {
        reject_unknown("BruteForce", params, {"limit"});
        if (auto it = params.find("limit"); it != params.end())
            limit_ = require_number<std::size_t>("BruteForce", "limit", it->second);
    }

    IsingOutput solve(const IsingModel& model, std::uint64_t seed) const override {
        IsingOutput out;
        out.result = classical::brute_force(model, limit_);
        out.result.seed = seed;  // enumeration ignores it; kept for reporting symmetry
        return out;
    }

private:
    std::size_t limit_ = 25;
};

class SaAdapter final : public ClassicalSolver {
public:
    explicit SaAdapter(const SolverParams& params) {
        reject_unknown("SA", params, {"t0", "cooling", "iterations"});
        for (const auto& [key, value] : params) {
            if (key == "t0") params_.t0 = require_number<double>("SA", key, value);
            else if (key == "cooling") params_.cooling = require_number<double>("SA", key, value);
            else if (key == "iterations")
                params_.iterations = require_number<std::size_t>("SA", key, value);
        }
        params_.validate();
    }

    SolverResult solve(const classical::Objective& objective,
                       const encoding::ClassicalInfo& info, std::uint64_t seed) const override {
        return classical::simulated_annealing(objective, info, params_, seed);
    }

private:
    classical::SaParams params_;
};

class GaAdapter final : public ClassicalSolver {
public:
    explicit GaAdapter(const SolverParams& params) {
        reject_unknown("GA", params,
                       {"population", "generations", "crossover_rate", "mutation_rate",
                        "tournament_size", "elitism_count"});
        for (const auto& [key, value] : params) {
            if (key == "population")
                params_.population = require_number<std::size_t>("GA", key, value);
            else if (key == "generations")
                params_.generations = require_number<std::size_t>("GA", key, value);
            else if (key == "crossover_rate")
                params_.crossover_rate = require_number<double>("GA", key, value);
            else if (key == "mutation_rate")
                params_.mutation_rate = require_number<double>("GA", key, value);
            else if (key == "tournament_size")
                params_.tournament_size = require_number<std::size_t>("GA", key, value);
            else if (key == "elitism_count")
                params_.elitism_count = require_number<std::size_t>("GA", key, value);
        }
        params_.validate();
    }

    SolverResult solve(const classical::Objective& objective,
                       const encoding::ClassicalInfo& info, std::uint64_t seed) const override {
        return classical::genetic_algorithm(objective, info, params_, seed);
    }

private:
    classical::GaParams params_;
};

}  // namespace detail

struct SolverEntry {
    Family family;
    std::function<std::unique_ptr<IsingSolver>(const SolverParams&)> make_ising;
    std::function<std::unique_ptr<ClassicalSolver>(const SolverParams&)> make_classical;
};

/// Name -> solver table; built-ins are CIM, BruteForce, SA and GA. Each
/// entry declares its family so the pipeline can route either the Ising
/// model or the (objective, constraint) pair.
class SolverRegistry {
public:
    static SolverRegistry& instance() {
        static SolverRegistry registry;
        return registry;
    }

    void add(const std::string& name, SolverEntry entry) {
        if (entries_.count(name)) throw UsageError("solver '" + name + "' is already registered");
        entries_.emplace(name, std::move(entry));
    }

    bool contains(const std::string& name) const { return entries_.count(name) > 0; }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& [name, _] : entries_) out.push_back(name);
        return out;
    }

    const SolverEntry& get(const std::string& name) const {
        auto it = entries_.find(name);
        if (it == entries_.end())
            throw UsageError("unknown solver '" + name + "'; registered solvers: " +
                             join(names(), ", "));
        return it->second;
    }

private:
    SolverRegistry() {
        entries_.emplace("CIM", SolverEntry{Family::Ising,
                                            [](const SolverParams& p) {
                                                return std::make_unique<detail::CimAdapter>(p);
                                            },
                                            nullptr});
        entries_.emplace("BruteForce",
                         SolverEntry{Family::Ising,
                                     [](const SolverParams& p) {
                                         return std::make_unique<detail::BruteForceAdapter>(p);
                                     },
                                     nullptr});
        entries_.emplace("SA", SolverEntry{Family::Classical, nullptr,
                                           [](const SolverParams& p) {
                                               return std::make_unique<detail::SaAdapter>(p);
                                           }});
        entries_.emplace("GA", SolverEntry{Family::Classical, nullptr,
                                           [](const SolverParams& p) {
                                               return std::make_unique<detail::GaAdapter>(p);
                                           }});
    }

    std::map<std::string, SolverEntry> entries_;
};

inline void register_solver(const std::string& name, SolverEntry entry) {
    SolverRegistry::instance().add(name, std::move(entry));
}

}  // namespace itcs::solvers
