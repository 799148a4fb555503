#include <catch2/catch.hpp>

#include "itcs/classical.hpp"
#include "itcs/encoding.hpp"
#include "itcs/solver.hpp"
#include "support/oracles.hpp"

using namespace itcs;
using namespace itcs::classical;
using itcs::encoding::ClassicalInfo;

namespace {

TestSuite toy_suite() {
    return TestSuite({{"0", {{"rate", 2.0}, {"time", 1.0}}},
                      {"1", {{"rate", 1.0}, {"time", 1.0}}},
                      {"2", {{"rate", 1.0}, {"time", 2.0}}}},
                     {"rate", "time"});
}

encoding::ProblemSpec toy_spec() {
    return encoding::make_problem_spec(encoding::Strategy::WaoR,
                                       {{"rate", encoding::RoleKind::Effectiveness, 0.5, false},
                                        {"time", encoding::RoleKind::Cost, 0.5, false}});
}

ClassicalInfo unconstrained(std::size_t n) {
    ClassicalInfo info;
    info.num_bits = n;
    info.constraint = [](const Selection&) { return true; };
    return info;
}

ClassicalInfo capped(std::size_t n, std::size_t b) {
    ClassicalInfo info;
    info.num_bits = n;
    info.constraint = [b](const Selection& sel) { return sel.count() <= b; };
    return info;
}

IsingModel random_model(Rng& rng, std::size_t n) {
    std::vector<double> h(n);
    std::vector<std::vector<double>> j(n, std::vector<double>(n, 0.0));
    for (auto& v : h) v = rng.uniform(-2.0, 2.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) j[a][b] = j[b][a] = rng.uniform(-2.0, 2.0);
    return IsingModel(std::move(h), std::move(j), 0.0);
}

}  // namespace

TEST_CASE("brute force ties resolve to the smallest spin vector", "[classical]") {
    const auto result = brute_force(IsingModel::zero(3));
    CHECK(result.spins == SpinConfig({-1, -1, -1}));
    CHECK(result.total_energy == 0.0);
}

TEST_CASE("brute force aligns a single spin with its field", "[classical]") {
    const IsingModel model({1.0}, {{0.0}}, 0.0);
    const auto result = brute_force(model);
    CHECK(result.spins == SpinConfig({+1}));
    CHECK(result.energy == -1.0);
}

TEST_CASE("brute force solves the toy ratio instance", "[classical]") {
    const auto suite = toy_suite();
    const auto model = encoding::to_ising(toy_spec(), suite);
    const auto result = brute_force(model);
    CHECK(result.fitness == 0.15625);
    // {0} and {0,1} tie; (-1,-1,+1) is lexicographically smaller than
    // (-1,+1,+1) with -1 ordered before +1, so {0,1} wins.
    CHECK(result.spins == SpinConfig({-1, -1, +1}));
    CHECK(spins_to_selection(suite, result.spins).selected_ids ==
          std::vector<std::string>{"0", "1"});
}

TEST_CASE("brute force enforces the enumeration limit", "[classical]") {
    CHECK_THROWS_WITH(brute_force(IsingModel::zero(6), 5),
                      Catch::Contains("6") && Catch::Contains("5"));
}

TEST_CASE("brute force matches exhaustive oracle minima", "[classical]") {
    Rng rng(31);
    for (int round = 0; round < 15; ++round) {
        const std::size_t n = 2 + rng.below(9);
        const auto model = random_model(rng, n);
        const auto ex = oracle::exhaustive_extremes(n, [&](const std::vector<int>& s) {
            return oracle::energy_double_loop(model.h(), model.j(), s);
        });
        const auto result = brute_force(model);
        CHECK(result.energy == Approx(ex.min_value).margin(1e-9));
    }
}

TEST_CASE("annealing returns a feasible state for a constant objective", "[classical]") {
    const Objective constant = [](const std::vector<bool>&) { return 3.5; };
    SaParams params;
    params.iterations = 100;
    const auto result = simulated_annealing(constant, unconstrained(4), params, 1);
    CHECK(result.fitness == 3.5);
    CHECK(result.spins.size() == 4);
}

TEST_CASE("annealing selects the single favorable test", "[classical]") {
    const Objective favor_selected = [](const std::vector<bool>& mask) {
        return mask[0] ? 0.0 : 1.0;
    };
    SaParams params;
    params.iterations = 50;
    const auto result = simulated_annealing(favor_selected, unconstrained(1), params, 7);
    CHECK(result.spins == SpinConfig({-1}));
    CHECK(result.fitness == 0.0);
}

TEST_CASE("annealing finds the toy optimum from every seed", "[classical]") {
    const auto suite = toy_suite();
    const auto spec = toy_spec();
    const Objective objective = [&](const std::vector<bool>& mask) {
        return encoding::classical_fitness(spec, suite, mask);
    };
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto result = simulated_annealing(objective, unconstrained(3), SaParams{}, seed);
        CHECK(result.fitness == 0.15625);
    }
}

TEST_CASE("annealing best-seen trace never increases", "[classical]") {
    const auto suite = toy_suite();
    const auto spec = toy_spec();
    const Objective objective = [&](const std::vector<bool>& mask) {
        return encoding::classical_fitness(spec, suite, mask);
    };
    SaParams params;
    params.iterations = 500;
    const auto result = simulated_annealing(objective, unconstrained(3), params, 3);
    REQUIRE(result.best_fitness_history.size() == 500);
    for (std::size_t i = 1; i < result.best_fitness_history.size(); ++i)
        CHECK(result.best_fitness_history[i] <= result.best_fitness_history[i - 1]);
}

TEST_CASE("annealing aborts on a non-finite objective", "[classical]") {
    const Objective bad = [](const std::vector<bool>&) {
        return std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS_AS(simulated_annealing(bad, unconstrained(3), SaParams{}, 0), SolverError);
}

TEST_CASE("annealing respects the budget constraint", "[classical]") {
    const Objective count_less = [](const std::vector<bool>& mask) {
        // Rewards selecting everything, so only the constraint holds it back.
        double v = 10.0;
        for (bool b : mask) v -= b ? 1.0 : 0.0;
        return v;
    };
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto result = simulated_annealing(count_less, capped(8, 3), SaParams{}, seed);
        CHECK(result.spins.count_selected() <= 3);
        CHECK(result.spins.count_selected() == 3);  // optimum saturates the budget
    }
}

TEST_CASE("annealing is deterministic per seed", "[classical]") {
    const auto suite = toy_suite();
    const auto spec = toy_spec();
    const Objective objective = [&](const std::vector<bool>& mask) {
        return encoding::classical_fitness(spec, suite, mask);
    };
    const auto a = simulated_annealing(objective, unconstrained(3), SaParams{}, 99);
    const auto b = simulated_annealing(objective, unconstrained(3), SaParams{}, 99);
    CHECK(a.spins == b.spins);
    CHECK(a.best_fitness_history == b.best_fitness_history);
}

TEST_CASE("genetic search keeps a uniform population fixed", "[classical]") {
    const std::vector<bool> chromosome{true, false, true, false};
    GaParams params;
    params.population = 4;
    params.generations = 5;
    params.crossover_rate = 0.0;
    params.mutation_rate = 0.0;
    params.elitism_count = 2;
    params.tournament_size = 2;
    params.initial_population =
        std::vector<std::vector<bool>>(params.population, chromosome);
    const Objective objective = [](const std::vector<bool>& mask) {
        double v = 0.0;
        for (std::size_t i = 0; i < mask.size(); ++i) v += mask[i] ? double(i) : 0.0;
        return v;
    };
    const auto result = genetic_algorithm(objective, unconstrained(4), params, 5);
    CHECK(result.spins == mask_to_spins(chromosome));
}

TEST_CASE("genetic search selects the single favorable test", "[classical]") {
    const Objective favor_selected = [](const std::vector<bool>& mask) {
        return mask[0] ? 0.0 : 1.0;
    };
    GaParams params;
    params.population = 10;
    params.generations = 5;
    params.tournament_size = 2;
    const auto result = genetic_algorithm(favor_selected, unconstrained(1), params, 2);
    CHECK(result.spins == SpinConfig({-1}));
}

TEST_CASE("genetic search finds the toy optimum from every seed", "[classical]") {
    const auto suite = toy_suite();
    const auto spec = toy_spec();
    const Objective objective = [&](const std::vector<bool>& mask) {
        return encoding::classical_fitness(spec, suite, mask);
    };
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto result = genetic_algorithm(objective, unconstrained(3), GaParams{}, seed);
        if (result.fitness == 0.15625) ++hits;
    }
    CHECK(hits >= 19);
}

TEST_CASE("genetic best-seen trace never increases and stays feasible", "[classical]") {
    const auto suite = toy_suite();
    const auto spec = encoding::make_problem_spec(
        encoding::Strategy::WaoRBudget,
        {{"rate", encoding::RoleKind::Effectiveness, 0.5, false},
         {"time", encoding::RoleKind::Cost, 0.5, false}},
        false, std::nullopt, 33.4);
    const Objective objective = [&](const std::vector<bool>& mask) {
        return encoding::classical_fitness(spec, suite, mask);
    };
    const auto info = encoding::classical_info(spec, suite);
    GaParams params;
    params.population = 20;
    params.generations = 30;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto result = genetic_algorithm(objective, info, params, seed);
        CHECK(result.spins.count_selected() <= 1);
        for (std::size_t i = 1; i < result.best_fitness_history.size(); ++i)
            CHECK(result.best_fitness_history[i] <= result.best_fitness_history[i - 1]);
    }
}

TEST_CASE("genetic search is deterministic per seed", "[classical]") {
    const auto suite = toy_suite();
    const auto spec = toy_spec();
    const Objective objective = [&](const std::vector<bool>& mask) {
        return encoding::classical_fitness(spec, suite, mask);
    };
    GaParams params;
    params.population = 12;
    params.generations = 10;
    const auto a = genetic_algorithm(objective, unconstrained(3), params, 123);
    const auto b = genetic_algorithm(objective, unconstrained(3), params, 123);
    CHECK(a.spins == b.spins);
    CHECK(a.best_fitness_history == b.best_fitness_history);
}

TEST_CASE("repair deselects until the constraint holds", "[classical]") {
    Rng rng(4);
    const auto info = capped(10, 2);
    std::vector<bool> mask(10, true);
    detail::repair(mask, info, rng);
    std::size_t count = 0;
    for (bool b : mask) count += b ? 1 : 0;
    CHECK(count <= 2);

    // Already-feasible masks are untouched.
    std::vector<bool> ok{true, false, true, false, false, false, false, false, false, false};
    const auto before = ok;
    detail::repair(ok, info, rng);
    CHECK(ok == before);

    // A constraint that rejects even the empty selection cannot be repaired.
    ClassicalInfo impossible;
    impossible.num_bits = 3;
    impossible.constraint = [](const Selection&) { return false; };
    std::vector<bool> some{true, false, true};
    CHECK_THROWS_AS(detail::repair(some, impossible, rng), SolverError);
}

TEST_CASE("parameter invariants are validated", "[classical]") {
    SaParams sa;
    sa.cooling = 1.0;
    CHECK_THROWS_AS(sa.validate(), DataError);
    GaParams ga;
    ga.population = 7;
    CHECK_THROWS_AS(ga.validate(), DataError);
    ga = GaParams{};
    ga.tournament_size = 500;
    CHECK_THROWS_AS(ga.validate(), DataError);
}

TEST_CASE("solver registry routes by family", "[classical]") {
    auto& registry = solvers::SolverRegistry::instance();
    CHECK(registry.get("CIM").family == solvers::Family::Ising);
    CHECK(registry.get("BruteForce").family == solvers::Family::Ising);
    CHECK(registry.get("SA").family == solvers::Family::Classical);
    CHECK(registry.get("GA").family == solvers::Family::Classical);
    CHECK_THROWS_WITH(registry.get("QAOA"),
                      Catch::Contains("CIM") && Catch::Contains("BruteForce") &&
                          Catch::Contains("SA") && Catch::Contains("GA"));
}

TEST_CASE("user solvers register and resolve like built-ins", "[classical]") {
    // An always-empty-selection "solver" is enough to exercise the
    // registry surface end to end.
    class EmptySelection final : public solvers::ClassicalSolver {
    public:
        SolverResult solve(const Objective& objective, const ClassicalInfo& info,
                           std::uint64_t seed) const override {
            SolverResult result;
            result.solver = "EmptySelection";
            const std::vector<bool> mask(info.num_bits, false);
            result.spins = mask_to_spins(mask);
            result.fitness = objective(mask);
            result.seed = seed;
            return result;
        }
    };
    solvers::register_solver(
        "EmptySelection",
        solvers::SolverEntry{solvers::Family::Classical, nullptr, [](const solvers::SolverParams&) {
                                 return std::make_unique<EmptySelection>();
                             }});
    auto& registry = solvers::SolverRegistry::instance();
    CHECK(registry.get("EmptySelection").family == solvers::Family::Classical);
    const auto solver = registry.get("EmptySelection").make_classical({});
    const auto result = solver->solve([](const std::vector<bool>&) { return 4.2; },
                                      unconstrained(3), 0);
    CHECK(result.spins == SpinConfig({+1, +1, +1}));
    CHECK(result.fitness == 4.2);
    CHECK_THROWS_AS(solvers::register_solver("EmptySelection", {}), UsageError);  // duplicate
}

TEST_CASE("solver adapters validate their parameters", "[classical]") {
    auto& registry = solvers::SolverRegistry::instance();
    CHECK_THROWS_AS(registry.get("SA").make_classical({{"temperature", "2"}}), UsageError);
    CHECK_THROWS_AS(registry.get("GA").make_classical({{"population", "-3"}}), UsageError);
    CHECK_THROWS_AS(registry.get("CIM").make_ising({{"steps", "abc"}}), UsageError);
    CHECK_NOTHROW(registry.get("SA").make_classical({{"iterations", "100"}}));
}
