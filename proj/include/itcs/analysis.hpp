#pragma once

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "itcs/bench.hpp"
#include "itcs/cim.hpp"
#include "itcs/core.hpp"
#include "itcs/errors.hpp"
#include "itcs/util.hpp"

namespace itcs::analysis {

/// Everything worth keeping from one solver run.
struct RunRecord {
    std::string solver;
    std::string problem;
    std::string dataset;
    std::uint64_t seed = 0;
    double fitness = 0.0;
    double total_energy = 0.0;
    Selection selection;
    SpinConfig spins;
    double runtime_ms = 0.0;
    std::map<std::string, std::string> params;
    std::vector<cim::CimTrace> traces;  // present for trajectory solvers
};

/// Five-number summary with quartiles by inclusive linear
/// interpolation between closest ranks.
struct BoxStats {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
    std::size_t count = 0;
};

inline BoxStats box_stats(std::vector<double> samples) {
    if (samples.empty()) throw DataError("box_stats: empty sample");
    std::sort(samples.begin(), samples.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(samples.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        if (lo + 1 >= samples.size()) return samples.back();
        return samples[lo] + frac * (samples[lo + 1] - samples[lo]);
    };
    BoxStats stats;
    stats.min = samples.front();
    stats.q1 = quantile(0.25);
    stats.median = quantile(0.5);
    stats.q3 = quantile(0.75);
    stats.max = samples.back();
    stats.count = samples.size();
    return stats;
}

enum class CurveKind { SpinsAmplitude, FitnessValue };

inline const char* curve_kind_name(CurveKind kind) {
    return kind == CurveKind::SpinsAmplitude ? "spins_amplitude" : "fitness_value";
}

inline std::optional<CurveKind> parse_curve_kind(const std::string& name) {
    if (name == "spins_amplitude") return CurveKind::SpinsAmplitude;
    if (name == "fitness_value") return CurveKind::FitnessValue;
    return std::nullopt;
}

namespace detail {

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors{
        "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
        "#937860", "#da8bc3", "#8c8c8c", "#ccb974", "#64b5cd"};
    return colors;
}

/// Minimal line plot: one polyline per series over a shared x of
/// 0..rows-1, with boxed axes and end-of-range tick labels.
inline std::string line_plot_svg(const std::vector<std::vector<double>>& series,
                                 const std::vector<std::string>& labels,
                                 const std::string& x_title, const std::string& y_title) {
    const double width = 720, height = 420;
    const double left = 70, right = 24, top = 24, bottom = 52;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double y_min = 0.0, y_max = 1.0;
    bool first = true;
    std::size_t rows = 0;
    for (const auto& s : series) {
        rows = std::max(rows, s.size());
        for (double v : s) {
            if (first) {
                y_min = y_max = v;
                first = false;
            }
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    }
    if (y_max == y_min) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    auto x_of = [&](std::size_t i) {
        return left + (rows <= 1 ? 0.0
                                 : plot_w * static_cast<double>(i) /
                                       static_cast<double>(rows - 1));
    };
    auto y_of = [&](double v) { return top + plot_h * (1.0 - (v - y_min) / (y_max - y_min)); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (int tick = 0; tick <= 4; ++tick) {
        const double frac = tick / 4.0;
        const double x = left + frac * plot_w;
        const std::size_t step = rows <= 1 ? 0 : static_cast<std::size_t>(frac * (rows - 1));
        svg << "<line x1=\"" << x << "\" y1=\"" << top + plot_h << "\" x2=\"" << x << "\" y2=\""
            << top + plot_h + 5 << "\" stroke=\"#333\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << top + plot_h + 20
            << "\" font-size=\"11\" text-anchor=\"middle\">" << step << "</text>\n";
        const double v = y_min + frac * (y_max - y_min);
        const double y = y_of(v);
        svg << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\""
            << y << "\" stroke=\"#333\"/>\n";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(v) << "</text>\n";
    }
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 14
        << "\" font-size=\"12\" text-anchor=\"middle\">" << x_title << "</text>\n";
    svg << "<text x=\"18\" y=\"" << top + plot_h / 2
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << top + plot_h / 2 << ")\">" << y_title << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& color = palette()[s % palette().size()];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < series[s].size(); ++i)
            svg << x_of(i) << ',' << y_of(series[s][i]) << ' ';
        svg << "\"/>\n";
        if (s < labels.size() && series.size() <= 12) {
            svg << "<text x=\"" << left + plot_w - 6 << "\" y=\"" << top + 14 + 13 * s
                << "\" font-size=\"10\" text-anchor=\"end\" fill=\"" << color << "\">"
                << labels[s] << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

struct BoxEntry {
    std::string label;
    BoxStats stats;
    bool external = false;
};

/// Grouped box plot; externally sourced entries are drawn dashed.
inline std::string box_plot_svg(const std::vector<BoxEntry>& entries, const std::string& y_title) {
    const double width = std::max<std::size_t>(360, 120 * entries.size() + 120);
    const double height = 420;
    const double left = 70, right = 24, top = 24, bottom = 64;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double y_min = entries.front().stats.min, y_max = entries.front().stats.max;
    for (const auto& e : entries) {
        y_min = std::min(y_min, e.stats.min);
        y_max = std::max(y_max, e.stats.max);
    }
    if (y_max == y_min) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    const double pad = 0.08 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
    auto y_of = [&](double v) { return top + plot_h * (1.0 - (v - y_min) / (y_max - y_min)); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double frac = tick / 4.0;
        const double v = y_min + frac * (y_max - y_min);
        const double y = y_of(v);
        svg << "<line x1=\"" << left - 5 << "\" y1=\"" << y << "\" x2=\"" << left << "\" y2=\""
            << y << "\" stroke=\"#333\"/>\n";
        svg << "<text x=\"" << left - 8 << "\" y=\"" << y + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(v) << "</text>\n";
    }
    svg << "<text x=\"18\" y=\"" << top + plot_h / 2
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << top + plot_h / 2 << ")\">" << y_title << "</text>\n";

    const double slot = plot_w / static_cast<double>(entries.size());
    const double box_w = std::min(48.0, slot * 0.5);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        const double cx = left + slot * (static_cast<double>(i) + 0.5);
        const auto& color = palette()[i % palette().size()];
        const char* dash = e.external ? " stroke-dasharray=\"5,3\"" : "";
        svg << "<line x1=\"" << cx << "\" y1=\"" << y_of(e.stats.min) << "\" x2=\"" << cx
            << "\" y2=\"" << y_of(e.stats.q1) << "\" stroke=\"" << color << "\"" << dash << "/>\n";
        svg << "<line x1=\"" << cx << "\" y1=\"" << y_of(e.stats.q3) << "\" x2=\"" << cx
            << "\" y2=\"" << y_of(e.stats.max) << "\" stroke=\"" << color << "\"" << dash << "/>\n";
        for (double whisker : {e.stats.min, e.stats.max})
            svg << "<line x1=\"" << cx - box_w / 4 << "\" y1=\"" << y_of(whisker) << "\" x2=\""
                << cx + box_w / 4 << "\" y2=\"" << y_of(whisker) << "\" stroke=\"" << color << "\""
                << dash << "/>\n";
        svg << "<rect x=\"" << cx - box_w / 2 << "\" y=\"" << y_of(e.stats.q3) << "\" width=\""
            << box_w << "\" height=\"" << y_of(e.stats.q1) - y_of(e.stats.q3)
            << "\" fill=\"" << color << "\" fill-opacity=\"0.25\" stroke=\"" << color << "\""
            << dash << "/>\n";
        svg << "<line x1=\"" << cx - box_w / 2 << "\" y1=\"" << y_of(e.stats.median) << "\" x2=\""
            << cx + box_w / 2 << "\" y2=\"" << y_of(e.stats.median) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"" << dash << "/>\n";
        svg << "<text x=\"" << cx << "\" y=\"" << top + plot_h + 20
            << "\" font-size=\"11\" text-anchor=\"middle\">" << e.label << "</text>\n";
        if (e.external)
            svg << "<text x=\"" << cx << "\" y=\"" << top + plot_h + 34
                << "\" font-size=\"9\" text-anchor=\"middle\" fill=\"#666\">(external)</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace detail

/// Writes per-batch convergence CSVs plus matching SVG line plots under
/// out_dir. Amplitude files carry one spin_<i> column per oscillator;
/// fitness files carry the best-so-far and raw readout energies.
/// Returns the created file paths; empty traces are a warning no-op.
inline std::vector<std::filesystem::path> export_convergence(
    const std::vector<cim::CimTrace>& traces, CurveKind kind,
    const std::filesystem::path& out_dir) {
    if (traces.empty()) {
        std::cerr << "warning: no traces to export\n";
        return {};
    }
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;

    for (const auto& trace : traces) {
        const std::string stem =
            "convergence_" + std::string(curve_kind_name(kind)) + "_batch" +
            std::to_string(trace.batch);
        const auto csv_path = out_dir / (stem + ".csv");
        const auto svg_path = out_dir / (stem + ".svg");

        std::ostringstream csv;
        std::vector<std::vector<double>> series;
        std::vector<std::string> labels;
        if (kind == CurveKind::SpinsAmplitude) {
            const std::size_t n = trace.mu.empty() ? 0 : trace.mu.front().size();
            csv << "step";
            for (std::size_t i = 0; i < n; ++i) csv << ",spin_" << i;
            csv << '\n';
            series.assign(n, {});
            for (std::size_t step = 0; step < trace.mu.size(); ++step) {
                csv << step;
                for (std::size_t i = 0; i < n; ++i) {
                    csv << ',' << format_double(trace.mu[step][i]);
                    series[i].push_back(trace.mu[step][i]);
                }
                csv << '\n';
            }
            for (std::size_t i = 0; i < n; ++i) labels.push_back("spin_" + std::to_string(i));
        } else {
            csv << "step,fitness,fitness_raw\n";
            for (std::size_t step = 0; step < trace.fitness_best.size(); ++step)
                csv << step << ',' << format_double(trace.fitness_best[step]) << ','
                    << format_double(trace.fitness_raw[step]) << '\n';
            series = {trace.fitness_best, trace.fitness_raw};
            labels = {"fitness", "fitness_raw"};
        }
        write_file_atomic(csv_path, csv.str());
        const std::string y_title =
            kind == CurveKind::SpinsAmplitude ? "spin amplitude" : "fitness";
        write_file_atomic(svg_path, detail::line_plot_svg(series, labels, "step", y_title));
        written.push_back(csv_path);
        written.push_back(svg_path);
    }
    return written;
}

/// Aggregates run records per solver, appends any reference results for
/// the same dataset, and writes comparison.json plus a grouped box
/// plot. References for other datasets are skipped with a warning entry
/// in the JSON.
inline std::vector<std::filesystem::path> compare_report(
    const std::vector<RunRecord>& records, const std::vector<bench::ReferenceResult>& references,
    const std::filesystem::path& out_dir) {
    if (records.empty()) throw DataError("compare_report: no run records");
    std::filesystem::create_directories(out_dir);

    const std::string dataset = records.front().dataset;
    std::vector<std::string> method_order;
    std::map<std::string, std::vector<double>> samples;
    for (const auto& record : records) {
        if (!samples.count(record.solver)) method_order.push_back(record.solver);
        samples[record.solver].push_back(record.fitness);
    }

    nlohmann::ordered_json doc;
    doc["dataset"] = dataset;
    doc["methods"] = nlohmann::ordered_json::array();
    doc["warnings"] = nlohmann::ordered_json::array();
    std::vector<detail::BoxEntry> entries;

    auto stats_json = [](const BoxStats& s) {
        nlohmann::ordered_json j;
        j["min"] = s.min;
        j["q1"] = s.q1;
        j["median"] = s.median;
        j["q3"] = s.q3;
        j["max"] = s.max;
        j["count"] = s.count;
        return j;
    };

    for (const auto& method : method_order) {
        const auto stats = box_stats(samples[method]);
        nlohmann::ordered_json entry;
        entry["method"] = method;
        entry["external"] = false;
        entry["stats"] = stats_json(stats);
        doc["methods"].push_back(std::move(entry));
        entries.push_back({method, stats, false});
    }
    for (const auto& ref : references) {
        if (ref.dataset != dataset) {
            doc["warnings"].push_back("reference '" + ref.method + "' targets dataset '" +
                                      ref.dataset + "', not '" + dataset + "'; skipped");
            continue;
        }
        const auto stats = box_stats(ref.fitness_samples);
        nlohmann::ordered_json entry;
        entry["method"] = ref.method;
        entry["external"] = true;
        entry["source"] = ref.source;
        entry["stats"] = stats_json(stats);
        doc["methods"].push_back(std::move(entry));
        entries.push_back({ref.method, stats, true});
    }

    const auto json_path = out_dir / "comparison.json";
    const auto svg_path = out_dir / "comparison.svg";
    write_file_atomic(json_path, doc.dump(2) + "\n");
    write_file_atomic(svg_path, detail::box_plot_svg(entries, "fitness"));
    return {json_path, svg_path};
}

}  // namespace itcs::analysis
