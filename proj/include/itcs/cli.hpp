#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "itcs/analysis.hpp"
#include "itcs/bench.hpp"
#include "itcs/core.hpp"
#include "itcs/errors.hpp"
#include "itcs/problem.hpp"
#include "itcs/solver.hpp"
#include "itcs/util.hpp"
#include "itcs/yaml.hpp"

namespace itcs::cli {

/// Fully merged run configuration (YAML file first, CLI flags on top).
struct RunConfig {
    std::string problem;
    std::string library;
    std::string dataset;  // explicit CSV path; alternative to library
    encoding::ParamMap problem_params;
    std::vector<std::string> solvers;
    std::map<std::string, solvers::SolverParams> solver_params;
    std::string save_path = "./results";
    std::vector<analysis::CurveKind> convergence_curves;
    std::uint64_t seed = 0;
    std::size_t runs = 1;
    std::vector<std::string> data_dirs;
};

inline const char* usage_text() {
    return "usage: isingtcs test --problem <name> (--library <name> | --dataset <file.csv>)\n"
           "                    [--problem-param <key=value>...] [--solver <name>]...\n"
           "                    [--solver-param <solver>.<key>=<value>...]\n"
           "                    [--save-path <dir>] [--convergence-curve <kind>...]\n"
           "                    [--config <file.yaml>] [--seed <n>] [--runs <n>]\n"
           "                    [--data-dir <dir>]...\n"
           "\n"
           "problems: WAOr, WAOd, WAOr-budget        solvers: CIM, BruteForce, SA, GA\n"
           "curve kinds: spins_amplitude, fitness_value\n";
}

namespace detail {

inline std::string yaml_scalar(const yaml::Node& node, const std::string& key) {
    if (node.kind != yaml::Node::Kind::Scalar)
        throw DataError("config key '" + key + "' must be a scalar");
    return node.scalar;
}

inline std::vector<std::string> yaml_string_list(const yaml::Node& node, const std::string& key) {
    std::vector<std::string> out;
    if (node.kind == yaml::Node::Kind::Scalar) {
        out.push_back(node.scalar);
        return out;
    }
    if (node.kind != yaml::Node::Kind::List)
        throw DataError("config key '" + key + "' must be a list");
    for (const auto& item : node.list) {
        if (item.kind != yaml::Node::Kind::Scalar)
            throw DataError("config key '" + key + "' must be a list of scalars");
        out.push_back(item.scalar);
    }
    return out;
}

/// Re-serializes a YAML value into the CLI parameter surface syntax so
/// both sources flow through one parser.
inline std::string yaml_param_value(const yaml::Node& node, const std::string& key) {
    if (node.kind == yaml::Node::Kind::Scalar) return node.scalar;
    if (node.kind == yaml::Node::Kind::List) {
        std::vector<std::string> items;
        for (const auto& item : node.list) {
            if (item.kind != yaml::Node::Kind::Scalar)
                throw DataError("config key '" + key + "' must not nest collections");
            items.push_back(item.scalar);
        }
        return "[" + join(items, ",") + "]";
    }
    throw DataError("config key '" + key + "' must be a scalar or list");
}

inline std::uint64_t parse_seed(const std::string& value, const std::string& what) {
    auto v = parse_int(value);
    if (!v || *v < 0) throw UsageError(what + " expects a nonnegative integer, got '" + value + "'");
    return static_cast<std::uint64_t>(*v);
}

inline void apply_yaml_config(RunConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read config '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto root = yaml::parse(buffer.str());
    if (root.kind != yaml::Node::Kind::Map)
        throw DataError("config '" + path.string() + "' must be a mapping at the top level");

    for (const auto& [key, value] : root.map) {
        if (key == "problem") config.problem = yaml_scalar(value, key);
        else if (key == "library") config.library = yaml_scalar(value, key);
        else if (key == "dataset") config.dataset = yaml_scalar(value, key);
        else if (key == "save_path") config.save_path = yaml_scalar(value, key);
        else if (key == "seed") config.seed = parse_seed(yaml_scalar(value, key), "config seed");
        else if (key == "runs") {
            auto v = parse_int(yaml_scalar(value, key));
            if (!v || *v < 1) throw DataError("config runs must be a positive integer");
            config.runs = static_cast<std::size_t>(*v);
        } else if (key == "solvers") {
            config.solvers = yaml_string_list(value, key);
        } else if (key == "convergence_curves") {
            config.convergence_curves.clear();
            for (const auto& name : yaml_string_list(value, key)) {
                auto kind = analysis::parse_curve_kind(name);
                if (!kind)
                    throw DataError("config convergence_curves: unknown kind '" + name + "'");
                config.convergence_curves.push_back(*kind);
            }
        } else if (key == "data_dirs") {
            config.data_dirs = yaml_string_list(value, key);
        } else if (key == "problem_params") {
            if (value.kind != yaml::Node::Kind::Map)
                throw DataError("config problem_params must be a mapping");
            for (const auto& [pk, pv] : value.map)
                config.problem_params[pk] = yaml_param_value(pv, pk);
        } else if (key == "solver_params") {
            if (value.kind != yaml::Node::Kind::Map)
                throw DataError("config solver_params must be a mapping of mappings");
            for (const auto& [solver, params] : value.map) {
                if (params.kind != yaml::Node::Kind::Map)
                    throw DataError("config solver_params." + solver + " must be a mapping");
                for (const auto& [pk, pv] : params.map)
                    config.solver_params[solver][pk] = yaml_scalar(pv, pk);
            }
        } else {
            throw DataError("config '" + path.string() + "': unknown key '" + key + "'");
        }
    }
}

}  // namespace detail

/// Parses the `test` subcommand. Flags given on the command line
/// override values from --config; repeatable flags replace the
/// config-provided list wholesale, key=value flags merge per key.
inline RunConfig parse_args(const std::vector<std::string>& args) {
    if (args.empty()) throw UsageError("missing subcommand; expected 'test'");
    if (args[0] != "test") throw UsageError("unknown subcommand '" + args[0] + "'; expected 'test'");

    RunConfig config;

    // The config file applies first so that explicit flags win.
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config expects a file path");
            detail::apply_yaml_config(config, args[i + 1]);
        }
    }

    bool solvers_from_cli = false;
    bool curves_from_cli = false;
    bool data_dirs_from_cli = false;

    std::size_t i = 1;
    auto take_value = [&](const std::string& flag) -> std::string {
        if (i + 1 >= args.size() || args[i + 1].rfind("--", 0) == 0)
            throw UsageError(flag + " expects a value");
        return args[++i];
    };
    auto take_values = [&](const std::string& flag) {
        std::vector<std::string> values;
        while (i + 1 < args.size() && args[i + 1].rfind("--", 0) != 0) values.push_back(args[++i]);
        if (values.empty()) throw UsageError(flag + " expects at least one value");
        return values;
    };

    for (; i < args.size(); ++i) {
        const std::string& flag = args[i];
        if (flag == "--problem") {
            config.problem = take_value(flag);
        } else if (flag == "--library") {
            config.library = take_value(flag);
        } else if (flag == "--dataset") {
            config.dataset = take_value(flag);
        } else if (flag == "--save-path") {
            config.save_path = take_value(flag);
        } else if (flag == "--seed") {
            config.seed = detail::parse_seed(take_value(flag), "--seed");
        } else if (flag == "--runs") {
            auto v = parse_int(take_value(flag));
            if (!v || *v < 1) throw UsageError("--runs expects a positive integer");
            config.runs = static_cast<std::size_t>(*v);
        } else if (flag == "--config") {
            ++i;  // applied in the first pass
        } else if (flag == "--data-dir") {
            if (!data_dirs_from_cli) config.data_dirs.clear();
            data_dirs_from_cli = true;
            config.data_dirs.push_back(take_value(flag));
        } else if (flag == "--solver") {
            if (!solvers_from_cli) config.solvers.clear();
            solvers_from_cli = true;
            config.solvers.push_back(take_value(flag));
        } else if (flag == "--problem-param") {
            for (const auto& token : take_values(flag)) {
                const auto eq = token.find('=');
                if (eq == std::string::npos || eq == 0)
                    throw UsageError("--problem-param expects key=value, got '" + token + "'");
                config.problem_params[token.substr(0, eq)] = token.substr(eq + 1);
            }
        } else if (flag == "--solver-param") {
            for (const auto& token : take_values(flag)) {
                const auto dot = token.find('.');
                const auto eq = token.find('=', dot == std::string::npos ? 0 : dot);
                if (dot == std::string::npos || eq == std::string::npos || dot == 0 ||
                    eq <= dot + 1)
                    throw UsageError("--solver-param expects <solver>.<key>=<value>, got '" +
                                     token + "'");
                config.solver_params[token.substr(0, dot)][token.substr(dot + 1, eq - dot - 1)] =
                    token.substr(eq + 1);
            }
        } else if (flag == "--convergence-curve") {
            if (!curves_from_cli) config.convergence_curves.clear();
            curves_from_cli = true;
            for (const auto& name : take_values(flag)) {
                auto kind = analysis::parse_curve_kind(name);
                if (!kind)
                    throw UsageError("unknown convergence curve kind '" + name +
                                     "'; expected spins_amplitude or fitness_value");
                config.convergence_curves.push_back(*kind);
            }
        } else {
            throw UsageError("unknown flag '" + flag + "'");
        }
    }

    if (config.problem.empty()) throw UsageError("--problem is required");
    if (!encoding::ProblemRegistry::instance().contains(config.problem))
        throw UsageError("unknown problem '" + config.problem + "'; registered problems: " +
                         join(encoding::ProblemRegistry::instance().names(), ", "));
    if (config.solvers.empty()) throw UsageError("at least one --solver is required");
    for (const auto& solver : config.solvers)
        (void)solvers::SolverRegistry::instance().get(solver);
    for (const auto& [solver, _] : config.solver_params)
        (void)solvers::SolverRegistry::instance().get(solver);
    if (config.library.empty() && config.dataset.empty())
        throw UsageError("either --library or --dataset is required");
    if (!config.library.empty() && !config.dataset.empty())
        throw UsageError("--library and --dataset are mutually exclusive");
    if (config.runs == 0) throw UsageError("--runs must be at least 1");
    return config;
}

namespace detail {

/// Removes everything this run managed to create, then lets the error
/// propagate; individual files are already written atomically.
class OutputTracker {
public:
    void created(const std::filesystem::path& path) { paths_.push_back(path); }
    void created_dir(const std::filesystem::path& path) { dirs_.push_back(path); }

    void rollback() noexcept {
        std::error_code ec;
        for (const auto& path : paths_) std::filesystem::remove(path, ec);
        for (auto it = dirs_.rbegin(); it != dirs_.rend(); ++it) {
            if (std::filesystem::is_empty(*it, ec) && !ec) std::filesystem::remove(*it, ec);
        }
    }

private:
    std::vector<std::filesystem::path> paths_;
    std::vector<std::filesystem::path> dirs_;
};

inline nlohmann::ordered_json record_json(const analysis::RunRecord& record) {
    nlohmann::ordered_json j;
    j["solver"] = record.solver;
    j["problem"] = record.problem;
    j["dataset"] = record.dataset;
    j["seed"] = record.seed;
    j["selected_ids"] = record.selection.selected_ids;
    j["spins"] = record.spins.values();
    j["fitness"] = record.fitness;
    j["energy"] = record.total_energy;
    j["runtime_ms"] = record.runtime_ms;
    j["params"] = record.params;
    return j;
}

}  // namespace detail

/// Loads the dataset, encodes the problem, runs every solver for every
/// seed, decodes the results, and writes results.json, the requested
/// convergence curves and the comparison report under save_path.
/// Returns the run records (also useful to embedders).
inline std::vector<analysis::RunRecord> run(const RunConfig& config) {
    // Load.
    std::string dataset_name;
    std::filesystem::path dataset_path;
    if (!config.library.empty()) {
        std::vector<std::filesystem::path> dirs(config.data_dirs.begin(), config.data_dirs.end());
        const auto descriptor = bench::resolve_library(config.library, dirs);
        dataset_name = descriptor.name;
        dataset_path = descriptor.path;
    } else {
        dataset_path = config.dataset;
        dataset_name = dataset_path.stem().string();
    }
    const auto suite = bench::load_csv(dataset_path);

    // Encode.
    const auto problem =
        encoding::make_problem(config.problem, suite, config.problem_params);
    const auto model = problem->to_ising();
    const auto info = problem->classical_info();
    const classical::Objective objective = [&](const std::vector<bool>& mask) {
        return problem->classical_fitness(mask);
    };

    // Solve.
    std::vector<analysis::RunRecord> records;
    for (const auto& solver_name : config.solvers) {
        const auto& entry = solvers::SolverRegistry::instance().get(solver_name);
        solvers::SolverParams params;
        if (auto it = config.solver_params.find(solver_name); it != config.solver_params.end())
            params = it->second;

        for (std::size_t r = 0; r < config.runs; ++r) {
            const std::uint64_t seed = config.seed + r;
            analysis::RunRecord record;
            record.solver = solver_name;
            record.problem = config.problem;
            record.dataset = dataset_name;
            record.seed = seed;

            const auto start = std::chrono::steady_clock::now();
            if (entry.family == solvers::Family::Ising) {
                auto solver = entry.make_ising(params);
                auto output = solver->solve(model, seed);
                record.fitness = output.result.fitness;
                record.total_energy = output.result.total_energy;
                record.spins = output.result.spins;
                record.params = output.result.params;
                record.traces = std::move(output.traces);
            } else {
                auto solver = entry.make_classical(params);
                auto result = solver->solve(objective, info, seed);
                record.fitness = result.fitness;
                record.spins = result.spins;
                record.params = result.params;
                record.total_energy = total_energy(model, record.spins);
            }
            const auto stop = std::chrono::steady_clock::now();
            record.runtime_ms =
                std::chrono::duration<double, std::milli>(stop - start).count();
            record.selection = spins_to_selection(suite, record.spins);
            records.push_back(std::move(record));
        }
    }

    // Persist. Every file write is atomic; on any failure whatever was
    // created so far is removed again.
    const std::filesystem::path save_path = config.save_path;
    detail::OutputTracker tracker;
    try {
        std::error_code ec;
        std::filesystem::create_directories(save_path, ec);
        if (ec || !std::filesystem::is_directory(save_path))
            throw DataError("cannot create save path '" + save_path.string() + "'");

        nlohmann::ordered_json results = nlohmann::ordered_json::array();
        for (const auto& record : records) results.push_back(detail::record_json(record));
        const auto results_path = save_path / "results.json";
        write_file_atomic(results_path, results.dump(2) + "\n");
        tracker.created(results_path);

        for (const auto& record : records) {
            if (record.traces.empty() || config.convergence_curves.empty()) continue;
            const auto curve_dir = save_path / "convergence" /
                                   (record.solver + "_seed" + std::to_string(record.seed));
            tracker.created_dir(save_path / "convergence");
            tracker.created_dir(curve_dir);
            for (const auto kind : config.convergence_curves)
                for (const auto& path : analysis::export_convergence(record.traces, kind, curve_dir))
                    tracker.created(path);
        }

        for (const auto& path : analysis::compare_report(records, {}, save_path))
            tracker.created(path);
    } catch (...) {
        tracker.rollback();
        throw;
    }
    return records;
}

/// Full entry point: maps errors onto the documented exit codes
/// (1 usage, 2 data, 3 solver/numeric).
inline int main_entry(int argc, const char* const* argv) {
    try {
        const std::vector<std::string> args(argv + 1, argv + argc);
        const auto config = parse_args(args);
        run(config);
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n\n" << usage_text();
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace itcs::cli
