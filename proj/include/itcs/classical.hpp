#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "itcs/core.hpp"
#include "itcs/encoding.hpp"
#include "itcs/errors.hpp"
#include "itcs/random.hpp"
#include "itcs/util.hpp"

namespace itcs::classical {

/// Objective evaluated over a selection mask; solvers minimize it.
using Objective = std::function<double(const std::vector<bool>&)>;

struct SaParams {
    double t0 = 1.0;        // initial temperature
    double cooling = 0.995; // geometric factor per iteration
    std::size_t iterations = 20000;

    void validate() const {
        if (!(t0 > 0.0)) throw DataError("SA t0 must be > 0");
        if (!(cooling > 0.0 && cooling < 1.0)) throw DataError("SA cooling must lie in (0,1)");
        if (iterations == 0) throw DataError("SA iterations must be >= 1");
    }
};

struct GaParams {
    std::size_t population = 100;  // must be even
    std::size_t generations = 200;
    double crossover_rate = 0.9;
    std::optional<double> mutation_rate;  // default 1/num_bits
    std::size_t tournament_size = 3;
    std::size_t elitism_count = 2;
    std::optional<std::vector<std::vector<bool>>> initial_population;  // test hook

    void validate() const {
        if (population == 0 || population % 2 != 0)
            throw DataError("GA population must be a positive even number");
        if (generations == 0) throw DataError("GA generations must be >= 1");
        if (crossover_rate < 0.0 || crossover_rate > 1.0)
            throw DataError("GA crossover_rate must lie in [0,1]");
        if (mutation_rate && (*mutation_rate < 0.0 || *mutation_rate > 1.0))
            throw DataError("GA mutation_rate must lie in [0,1]");
        if (tournament_size == 0 || tournament_size > population)
            throw DataError("GA tournament_size must lie in [1, population]");
        if (elitism_count >= population) throw DataError("GA elitism_count must be < population");
    }
};

namespace detail {

/// Make a mask feasible by deselecting uniformly random selected tests
/// until the constraint holds. For the budget constraint this runs at
/// most n times; an infeasible empty selection cannot be repaired.
inline void repair(std::vector<bool>& mask, const encoding::ClassicalInfo& info, Rng& rng) {
    auto feasible = [&] {
        Selection sel;
        sel.mask = mask;
        return info.feasible(sel);
    };
    if (feasible()) return;
    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) selected.push_back(i);
    while (!selected.empty()) {
        const std::size_t pick = rng.below(selected.size());
        mask[selected[pick]] = false;
        selected[pick] = selected.back();
        selected.pop_back();
        if (feasible()) return;
    }
    throw SolverError("constraint cannot be satisfied by deselecting tests");
}

inline double checked_eval(const Objective& objective, const std::vector<bool>& mask) {
    const double value = objective(mask);
    if (!std::isfinite(value))
        throw SolverError("objective returned a non-finite value");
    return value;
}

}  // namespace detail

/// Exhaustive enumeration of all 2^n spin configurations. Consecutive
/// configurations differ by one spin (Gray order), so the energy is
/// updated in O(n) per configuration; candidate minima are re-evaluated
/// from scratch before they are accepted, keeping the reported energy
/// exact. Ties resolve to the lexicographically smallest spin vector
/// with -1 ordered before +1.
inline SolverResult brute_force(const IsingModel& model, std::size_t limit = 25) {
    const std::size_t n = model.size();
    if (n == 0) throw DataError("brute_force: empty model");
    if (n > limit)
        throw DataError("brute_force: problem has " + std::to_string(n) +
                        " spins, above the enumeration limit of " + std::to_string(limit));

    // -1 sorts before +1, so mapping bit 0 -> -1 makes the all-selected
    // vector the starting point.
    std::vector<int> spins(n, -1);
    std::vector<double> field(n, 0.0);  // field[i] = sum_j J_ij s_j
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) field[i] += model.j()[i][k] * spins[k];

    auto exact_energy = [&](const std::vector<int>& s) {
        return ising_energy(model, SpinConfig(s));
    };

    double energy = exact_energy(spins);
    double best_energy = energy;
    std::vector<int> best = spins;

    auto lex_less = [](const std::vector<int>& a, const std::vector<int>& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    };

    const std::uint64_t count = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < count; ++k) {
        const std::size_t flip = static_cast<std::size_t>(std::countr_zero(k));
        // Delta for flipping one spin: 2 h_i s_i + 2 s_i * field_i.
        energy += 2.0 * model.h()[flip] * spins[flip] + 2.0 * spins[flip] * field[flip];
        const int old = spins[flip];
        spins[flip] = -old;
        for (std::size_t i = 0; i < n; ++i) field[i] += model.j()[i][flip] * (spins[flip] - old);

        // Guard against drift accumulated by the incremental updates.
        const double slack = 1e-7 * (1.0 + std::abs(best_energy));
        if (energy <= best_energy + slack) {
            const double exact = exact_energy(spins);
            if (exact < best_energy || (exact == best_energy && lex_less(spins, best))) {
                best_energy = exact;
                best = spins;
            }
            energy = exact;
        }
    }

    SolverResult result;
    result.solver = "BruteForce";
    result.spins = SpinConfig(best);
    result.energy = best_energy;
    result.total_energy = best_energy + model.offset();
    result.fitness = result.total_energy;
    result.params["limit"] = std::to_string(limit);
    return result;
}

/// Single-bit-flip simulated annealing over selection masks with a
/// geometric cooling schedule. Infeasible neighbours are repaired
/// before evaluation, so every reported state is feasible.
inline SolverResult simulated_annealing(const Objective& objective,
                                        const encoding::ClassicalInfo& info,
                                        const SaParams& params, std::uint64_t seed) {
    params.validate();
    const std::size_t n = info.num_bits;
    if (n == 0) throw DataError("simulated_annealing: num_bits must be >= 1");
    Rng rng(seed);

    std::vector<bool> mask(n);
    for (std::size_t i = 0; i < n; ++i) mask[i] = rng.bernoulli(0.5);
    detail::repair(mask, info, rng);
    double fv = detail::checked_eval(objective, mask);

    std::vector<bool> best_mask = mask;
    double best_fv = fv;
    std::vector<double> history;
    history.reserve(params.iterations);

    double temperature = params.t0;
    for (std::size_t it = 0; it < params.iterations; ++it) {
        std::vector<bool> candidate = mask;
        const std::size_t flip = static_cast<std::size_t>(rng.below(n));
        candidate[flip] = !candidate[flip];
        detail::repair(candidate, info, rng);
        const double cfv = detail::checked_eval(objective, candidate);
        const double delta = cfv - fv;
        if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temperature)) {
            mask = std::move(candidate);
            fv = cfv;
        }
        if (fv < best_fv) {
            best_fv = fv;
            best_mask = mask;
        }
        history.push_back(best_fv);
        temperature *= params.cooling;
    }

    SolverResult result;
    result.solver = "SA";
    result.spins = mask_to_spins(best_mask);
    result.fitness = best_fv;
    result.seed = seed;
    result.best_fitness_history = std::move(history);
    result.params["t0"] = format_double(params.t0);
    result.params["cooling"] = format_double(params.cooling);
    result.params["iterations"] = std::to_string(params.iterations);
    return result;
}

/// Generational genetic algorithm over binary selection masks:
/// tournament selection, uniform crossover, per-bit mutation, repair of
/// infeasible offspring, and elitism.
inline SolverResult genetic_algorithm(const Objective& objective,
                                      const encoding::ClassicalInfo& info, const GaParams& params,
                                      std::uint64_t seed) {
    params.validate();
    const std::size_t n = info.num_bits;
    if (n == 0) throw DataError("genetic_algorithm: num_bits must be >= 1");
    Rng rng(seed);
    const double mutation = params.mutation_rate.value_or(1.0 / static_cast<double>(n));

    std::vector<std::vector<bool>> population;
    if (params.initial_population) {
        population = *params.initial_population;
        if (population.size() != params.population)
            throw DataError("initial population size does not match 'population'");
        for (auto& mask : population) {
            if (mask.size() != n) throw DataError("initial population chromosome length mismatch");
            detail::repair(mask, info, rng);
        }
    } else {
        population.resize(params.population, std::vector<bool>(n));
        for (auto& mask : population) {
            for (std::size_t i = 0; i < n; ++i) mask[i] = rng.bernoulli(0.5);
            detail::repair(mask, info, rng);
        }
    }

    std::vector<double> scores(population.size());
    for (std::size_t i = 0; i < population.size(); ++i)
        scores[i] = detail::checked_eval(objective, population[i]);

    auto best_index = [&] {
        std::size_t best = 0;
        for (std::size_t i = 1; i < scores.size(); ++i)
            if (scores[i] < scores[best]) best = i;
        return best;
    };

    std::size_t bi = best_index();
    std::vector<bool> best_mask = population[bi];
    double best_fv = scores[bi];
    std::vector<double> history;
    history.reserve(params.generations);

    auto tournament = [&]() -> std::size_t {
        std::size_t winner = static_cast<std::size_t>(rng.below(population.size()));
        for (std::size_t t = 1; t < params.tournament_size; ++t) {
            const std::size_t challenger = static_cast<std::size_t>(rng.below(population.size()));
            if (scores[challenger] < scores[winner]) winner = challenger;
        }
        return winner;
    };

    for (std::size_t gen = 0; gen < params.generations; ++gen) {
        std::vector<std::vector<bool>> next;
        next.reserve(params.population);

        // Elites carry over unchanged.
        std::vector<std::size_t> order(population.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
        for (std::size_t e = 0; e < params.elitism_count; ++e) next.push_back(population[order[e]]);

        while (next.size() < params.population) {
            std::vector<bool> child_a = population[tournament()];
            std::vector<bool> child_b = population[tournament()];
            if (rng.bernoulli(params.crossover_rate)) {
                for (std::size_t i = 0; i < n; ++i)
                    if (rng.bernoulli(0.5)) {
                        const bool tmp = child_a[i];
                        child_a[i] = child_b[i];
                        child_b[i] = tmp;
                    }
            }
            for (auto* child : {&child_a, &child_b}) {
                for (std::size_t i = 0; i < n; ++i)
                    if (rng.bernoulli(mutation)) (*child)[i] = !(*child)[i];
                detail::repair(*child, info, rng);
            }
            next.push_back(std::move(child_a));
            if (next.size() < params.population) next.push_back(std::move(child_b));
        }

        population = std::move(next);
        for (std::size_t i = 0; i < population.size(); ++i)
            scores[i] = detail::checked_eval(objective, population[i]);
        bi = best_index();
        if (scores[bi] < best_fv) {
            best_fv = scores[bi];
            best_mask = population[bi];
        }
        history.push_back(best_fv);
    }

    SolverResult result;
    result.solver = "GA";
    result.spins = mask_to_spins(best_mask);
    result.fitness = best_fv;
    result.seed = seed;
    result.best_fitness_history = std::move(history);
    result.params["population"] = std::to_string(params.population);
    result.params["generations"] = std::to_string(params.generations);
    result.params["crossover_rate"] = format_double(params.crossover_rate);
    result.params["mutation_rate"] = format_double(mutation);
    result.params["tournament_size"] = std::to_string(params.tournament_size);
    result.params["elitism_count"] = std::to_string(params.elitism_count);
    return result;
}

}  // namespace itcs::classical
