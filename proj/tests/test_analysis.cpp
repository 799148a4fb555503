#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <json.hpp>

#include "itcs/analysis.hpp"
#include "itcs/cim.hpp"
#include "itcs/random.hpp"

using namespace itcs;
using namespace itcs::analysis;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("itcs_analysis_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

cim::CimTrace make_trace(std::size_t batch, std::size_t steps, std::size_t n, Rng& rng) {
    cim::CimTrace trace;
    trace.batch = batch;
    double best = 1e9;
    for (std::size_t s = 0; s <= steps; ++s) {
        std::vector<double> mu(n), sigma(n, 0.5);
        for (auto& v : mu) v = rng.uniform(-2.0, 2.0);
        trace.mu.push_back(mu);
        trace.sigma.push_back(sigma);
        const double raw = rng.uniform(0.0, 1.0);
        best = std::min(best, raw);
        trace.fitness_raw.push_back(raw);
        trace.fitness_best.push_back(best);
    }
    return trace;
}

RunRecord make_record(const std::string& solver, std::uint64_t seed, double fitness) {
    RunRecord record;
    record.solver = solver;
    record.problem = "WAOr";
    record.dataset = "paintcontrol";
    record.seed = seed;
    record.fitness = fitness;
    record.total_energy = fitness;
    record.spins = SpinConfig({-1, +1});
    record.selection = {{"0"}, {true, false}};
    record.runtime_ms = 1.0;
    return record;
}

}  // namespace

TEST_CASE("box statistics on a singleton collapse to the value", "[analysis]") {
    const auto stats = box_stats({5.0});
    CHECK(stats.min == 5.0);
    CHECK(stats.q1 == 5.0);
    CHECK(stats.median == 5.0);
    CHECK(stats.q3 == 5.0);
    CHECK(stats.max == 5.0);
    CHECK(stats.count == 1);
}

TEST_CASE("box statistics interpolate between closest ranks", "[analysis]") {
    const auto stats = box_stats({1.0, 2.0, 3.0, 4.0});
    CHECK(stats.min == 1.0);
    CHECK(stats.q1 == 1.75);
    CHECK(stats.median == 2.5);
    CHECK(stats.q3 == 3.25);
    CHECK(stats.max == 4.0);
}

TEST_CASE("box statistics sort their input", "[analysis]") {
    const auto stats = box_stats({3.0, 1.0, 2.0});
    CHECK(stats.median == 2.0);
    const auto permuted = box_stats({2.0, 3.0, 1.0});
    CHECK(stats.min == permuted.min);
    CHECK(stats.q1 == permuted.q1);
    CHECK(stats.median == permuted.median);
    CHECK(stats.q3 == permuted.q3);
    CHECK(stats.max == permuted.max);
}

TEST_CASE("appending a maximal sample never lowers a quartile", "[analysis]") {
    Rng rng(3);
    for (int round = 0; round < 20; ++round) {
        std::vector<double> samples;
        const std::size_t count = 1 + rng.below(12);
        for (std::size_t i = 0; i < count; ++i) samples.push_back(rng.uniform(-5.0, 5.0));
        const auto before = box_stats(samples);
        samples.push_back(before.max + rng.uniform(0.0, 2.0));
        const auto after = box_stats(samples);
        CHECK(after.q1 >= before.q1 - 1e-12);
        CHECK(after.median >= before.median - 1e-12);
        CHECK(after.q3 >= before.q3 - 1e-12);
        CHECK(after.max >= before.max);
    }
}

TEST_CASE("box statistics reject an empty sample", "[analysis]") {
    CHECK_THROWS_AS(box_stats({}), DataError);
}

TEST_CASE("amplitude export writes one csv and svg per batch", "[analysis]") {
    TempDir dir;
    Rng rng(1);
    const std::vector<cim::CimTrace> traces{make_trace(0, 3, 2, rng)};
    const auto files = export_convergence(traces, CurveKind::SpinsAmplitude, dir.path());
    REQUIRE(files.size() == 2);
    CHECK(fs::exists(dir.path() / "convergence_spins_amplitude_batch0.csv"));
    CHECK(fs::exists(dir.path() / "convergence_spins_amplitude_batch0.svg"));

    const auto csv = slurp(files[0]);
    const auto lines = split(csv, '\n');
    CHECK(lines[0] == "step,spin_0,spin_1");
    CHECK(lines.size() >= 5);  // header + 4 data rows

    const auto svg = slurp(files[1]);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
}

TEST_CASE("exported amplitudes reload to the exact trace values", "[analysis]") {
    TempDir dir;
    Rng rng(2);
    const std::vector<cim::CimTrace> traces{make_trace(0, 5, 3, rng)};
    const auto files = export_convergence(traces, CurveKind::SpinsAmplitude, dir.path());
    const auto lines = split(slurp(files[0]), '\n');
    for (std::size_t row = 0; row < traces[0].mu.size(); ++row) {
        const auto cells = split(lines[row + 1], ',');
        REQUIRE(cells.size() == 4);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(*parse_double(cells[i + 1]) == traces[0].mu[row][i]);
    }
}

TEST_CASE("fitness export is monotone in the best column", "[analysis]") {
    TempDir dir;
    Rng rng(4);
    const std::vector<cim::CimTrace> traces{make_trace(0, 20, 2, rng), make_trace(1, 20, 2, rng)};
    const auto files = export_convergence(traces, CurveKind::FitnessValue, dir.path());
    REQUIRE(files.size() == 4);
    const auto lines = split(slurp(dir.path() / "convergence_fitness_value_batch1.csv"), '\n');
    CHECK(lines[0] == "step,fitness,fitness_raw");
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t row = 1; row < lines.size(); ++row) {
        if (trim(lines[row]).empty()) continue;
        const auto cells = split(lines[row], ',');
        const double best = *parse_double(cells[1]);
        CHECK(best <= previous);
        previous = best;
    }
}

TEST_CASE("exporting no traces is a warning no-op", "[analysis]") {
    TempDir dir;
    const auto files = export_convergence({}, CurveKind::FitnessValue, dir.path());
    CHECK(files.empty());
    CHECK(fs::is_empty(dir.path()));
}

TEST_CASE("comparison report groups records per method", "[analysis]") {
    TempDir dir;
    std::vector<RunRecord> records;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        records.push_back(make_record("CIM", seed, 0.2 + 0.01 * double(seed)));
        records.push_back(make_record("GA", seed, 0.3 + 0.01 * double(seed)));
    }
    const auto files = compare_report(records, {}, dir.path());
    REQUIRE(files.size() == 2);

    const auto doc = nlohmann::json::parse(slurp(dir.path() / "comparison.json"));
    CHECK(doc["dataset"] == "paintcontrol");
    REQUIRE(doc["methods"].size() == 2);
    CHECK(doc["methods"][0]["method"] == "CIM");
    CHECK(doc["methods"][0]["stats"]["count"] == 10);
    CHECK(doc["methods"][0]["external"] == false);
    CHECK(doc["warnings"].empty());

    const auto svg = slurp(dir.path() / "comparison.svg");
    CHECK(svg.find("CIM") != std::string::npos);
    CHECK(svg.find("GA") != std::string::npos);
}

TEST_CASE("comparison medians match independent recomputation", "[analysis]") {
    TempDir dir;
    Rng rng(9);
    std::vector<RunRecord> records;
    std::vector<double> fitnesses;
    for (std::uint64_t seed = 0; seed < 7; ++seed) {
        const double fv = rng.uniform(0.0, 1.0);
        fitnesses.push_back(fv);
        records.push_back(make_record("SA", seed, fv));
    }
    compare_report(records, {}, dir.path());
    const auto doc = nlohmann::json::parse(slurp(dir.path() / "comparison.json"));

    std::sort(fitnesses.begin(), fitnesses.end());
    const double pos = 0.5 * double(fitnesses.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double expected =
        fitnesses[lo] + (pos - double(lo)) * (fitnesses[std::min(lo + 1, fitnesses.size() - 1)] -
                                              fitnesses[lo]);
    CHECK(doc["methods"][0]["stats"]["median"].get<double>() == Approx(expected).epsilon(1e-12));
}

TEST_CASE("matching references appear as external methods", "[analysis]") {
    TempDir dir;
    std::vector<RunRecord> records{make_record("CIM", 0, 0.2), make_record("GA", 0, 0.3)};
    std::vector<bench::ReferenceResult> refs{
        {"paintcontrol", "QAOA", {0.25, 0.26}, "placeholder reference"},
        {"iofrol", "QA", {0.5}, "other dataset"}};
    compare_report(records, refs, dir.path());
    const auto doc = nlohmann::json::parse(slurp(dir.path() / "comparison.json"));
    REQUIRE(doc["methods"].size() == 3);
    CHECK(doc["methods"][2]["method"] == "QAOA");
    CHECK(doc["methods"][2]["external"] == true);
    CHECK(doc["methods"][2]["source"] == "placeholder reference");
    REQUIRE(doc["warnings"].size() == 1);
    const std::string warning = doc["warnings"][0];
    CHECK(warning.find("iofrol") != std::string::npos);

    const auto svg = slurp(dir.path() / "comparison.svg");
    CHECK(svg.find("(external)") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
}

TEST_CASE("comparison requires at least one record", "[analysis]") {
    TempDir dir;
    CHECK_THROWS_AS(compare_report({}, {}, dir.path()), DataError);
}
