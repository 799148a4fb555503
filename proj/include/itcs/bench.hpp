#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "itcs/core.hpp"
#include "itcs/errors.hpp"
#include "itcs/util.hpp"

namespace itcs::bench {

/// A dataset located on disk, named after its file stem.
struct DatasetDescriptor {
    std::string name;
    std::filesystem::path path;
    std::vector<std::string> attribute_names;
};

/// Fitness samples published elsewhere for a dataset/method pair,
/// loaded for side-by-side comparison with local runs.
struct ReferenceResult {
    std::string dataset;
    std::string method;
    std::vector<double> fitness_samples;
    std::string source;
};

namespace detail {

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read '" + path.string() + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace detail

/// Loads a test-suite CSV: the first header cell is the unnamed id
/// column, the remaining header cells are attribute names; every row is
/// an id followed by one finite nonnegative real per attribute.
/// Rejections name the offending row and column.
inline TestSuite load_csv(const std::filesystem::path& path) {
    const auto lines = detail::read_lines(path);
    if (lines.empty() || (lines.size() == 1 && trim(lines[0]).empty()))
        throw DataError("'" + path.string() + "' is empty");

    const auto header = split(lines[0], ',');
    if (header.empty() || !trim(header[0]).empty())
        throw DataError("'" + path.string() + "': malformed header; the first column must be "
                        "the unnamed id column");
    if (header.size() < 2)
        throw DataError("'" + path.string() + "': header declares no attribute columns");
    std::vector<std::string> attribute_names(header.begin() + 1, header.end());
    for (const auto& name : attribute_names)
        if (trim(name).empty())
            throw DataError("'" + path.string() + "': empty attribute name in header");

    std::vector<TestCase> cases;
    for (std::size_t row = 1; row < lines.size(); ++row) {
        if (trim(lines[row]).empty() && row == lines.size() - 1) continue;  // trailing newline
        const auto cells = split(lines[row], ',');
        if (cells.size() != header.size())
            throw DataError("'" + path.string() + "', row " + std::to_string(row) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        TestCase tc;
        tc.id = cells[0];
        for (std::size_t col = 1; col < cells.size(); ++col) {
            const auto value = parse_double(trim(cells[col]));
            if (!value)
                throw DataError("'" + path.string() + "', row " + std::to_string(row) +
                                ", column '" + attribute_names[col - 1] + "': '" + cells[col] +
                                "' is not a number");
            if (!std::isfinite(*value))
                throw DataError("'" + path.string() + "', row " + std::to_string(row) +
                                ", column '" + attribute_names[col - 1] + "': value is not finite");
            if (*value < 0.0)
                throw DataError("'" + path.string() + "', row " + std::to_string(row) +
                                ", column '" + attribute_names[col - 1] +
                                "': negative attribute values are not allowed");
            tc.attributes[attribute_names[col - 1]] = *value;
        }
        for (const auto& existing : cases)
            if (existing.id == tc.id)
                throw DataError("'" + path.string() + "', row " + std::to_string(row) +
                                ": duplicate test case id '" + tc.id + "'");
        cases.push_back(std::move(tc));
    }
    if (cases.empty())
        throw DataError("'" + path.string() + "' contains a header but no test cases");
    return TestSuite(std::move(cases), std::move(attribute_names));
}

/// Writes a suite back out in the loadable format. Values use the
/// shortest decimal form that parses back to the same double, so a
/// save/load cycle reproduces the suite exactly.
inline void save_csv(const TestSuite& suite, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << ',' << join(suite.attribute_names(), ",") << '\n';
    for (const auto& tc : suite.cases()) {
        out << tc.id;
        for (const auto& name : suite.attribute_names())
            out << ',' << format_double(tc.attributes.at(name));
        out << '\n';
    }
    if (!out) throw DataError("failed while writing '" + path.string() + "'");
}

/// Loads reference results: a JSON array of objects with keys
/// `dataset`, `method`, `fitness_samples` and `source`. Schema errors
/// carry a JSON-pointer-style location.
inline std::vector<ReferenceResult> load_reference_results(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read '" + path.string() + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("'" + path.string() + "': " + e.what());
    }
    if (!doc.is_array()) throw DataError("'" + path.string() + "': / must be an array");

    std::vector<ReferenceResult> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto loc = "/" + std::to_string(i);
        const auto& entry = doc[i];
        if (!entry.is_object()) throw DataError("'" + path.string() + "': " + loc + " must be an object");
        ReferenceResult ref;
        auto require = [&](const char* key) -> const nlohmann::json& {
            if (!entry.contains(key))
                throw DataError("'" + path.string() + "': " + loc + "/" + key + " is missing");
            return entry.at(key);
        };
        const auto& dataset = require("dataset");
        const auto& method = require("method");
        const auto& samples = require("fitness_samples");
        const auto& source = require("source");
        if (!dataset.is_string())
            throw DataError("'" + path.string() + "': " + loc + "/dataset must be a string");
        if (!method.is_string())
            throw DataError("'" + path.string() + "': " + loc + "/method must be a string");
        if (!source.is_string())
            throw DataError("'" + path.string() + "': " + loc + "/source must be a string");
        if (!samples.is_array() || samples.empty())
            throw DataError("'" + path.string() + "': " + loc +
                            "/fitness_samples must be a non-empty array of numbers");
        ref.dataset = dataset.get<std::string>();
        ref.method = method.get<std::string>();
        ref.source = source.get<std::string>();
        for (std::size_t k = 0; k < samples.size(); ++k) {
            if (!samples[k].is_number())
                throw DataError("'" + path.string() + "': " + loc + "/fitness_samples/" +
                                std::to_string(k) + " must be a number");
            const double v = samples[k].get<double>();
            if (!std::isfinite(v))
                throw DataError("'" + path.string() + "': " + loc + "/fitness_samples/" +
                                std::to_string(k) + " is not finite");
            ref.fitness_samples.push_back(v);
        }
        out.push_back(std::move(ref));
    }
    return out;
}

/// Finds `<dir>/<name>.csv` in the given directories (first match
/// wins), falling back to ./datasets when no directory is supplied.
inline DatasetDescriptor resolve_library(const std::string& name,
                                         std::vector<std::filesystem::path> search_dirs) {
    search_dirs.emplace_back("datasets");  // default location, searched last
    std::vector<std::string> tried;
    for (const auto& dir : search_dirs) {
        const auto candidate = dir / (name + ".csv");
        tried.push_back(candidate.string());
        if (std::filesystem::exists(candidate)) {
            DatasetDescriptor desc;
            desc.name = name;
            desc.path = candidate;
            const auto lines = detail::read_lines(candidate);
            if (!lines.empty()) {
                const auto header = split(lines[0], ',');
                desc.attribute_names.assign(header.begin() + (header.empty() ? 0 : 1),
                                            header.end());
            }
            return desc;
        }
    }
    throw DataError("library '" + name + "' not found; searched: " + join(tried, ", "));
}

}  // namespace itcs::bench
