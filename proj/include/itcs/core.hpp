#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "itcs/errors.hpp"
#include "itcs/util.hpp"

namespace itcs {

/// One test case: an id plus named numeric attributes (execution time,
/// failure rate, ...). Attribute values must be finite and nonnegative;
/// ratio-based fitness divides by attribute sums, so negative values are
/// rejected at construction.
struct TestCase {
    std::string id;
    std::map<std::string, double> attributes;
};

/// An ordered test suite whose cases all carry the same attribute set.
class TestSuite {
public:
    TestSuite(std::vector<TestCase> cases, std::vector<std::string> attribute_names)
        : cases_(std::move(cases)), attribute_names_(std::move(attribute_names)) {
        if (cases_.empty()) throw DataError("test suite must contain at least one test case");
        std::map<std::string, bool> seen_ids;
        for (const auto& tc : cases_) {
            if (!seen_ids.emplace(tc.id, true).second)
                throw DataError("duplicate test case id '" + tc.id + "'");
            if (tc.attributes.size() != attribute_names_.size())
                throw DataError("test case '" + tc.id + "' does not match the suite attribute set");
            for (const auto& name : attribute_names_) {
                auto it = tc.attributes.find(name);
                if (it == tc.attributes.end())
                    throw DataError("test case '" + tc.id + "' is missing attribute '" + name + "'");
                if (!std::isfinite(it->second))
                    throw DataError("attribute '" + name + "' of test case '" + tc.id +
                                    "' is not finite");
                if (it->second < 0.0)
                    throw DataError("attribute '" + name + "' of test case '" + tc.id +
                                    "' is negative; attribute values must be >= 0");
            }
        }
    }

    std::size_t size() const { return cases_.size(); }
    const std::vector<TestCase>& cases() const { return cases_; }
    const std::vector<std::string>& attribute_names() const { return attribute_names_; }

    bool has_attribute(const std::string& name) const {
        for (const auto& a : attribute_names_)
            if (a == name) return true;
        return false;
    }

    /// Values of one attribute in suite order.
    std::vector<double> column(const std::string& name) const {
        if (!has_attribute(name))
            throw DataError("unknown attribute '" + name + "'; suite has: " +
                            join(attribute_names_, ", "));
        std::vector<double> out;
        out.reserve(cases_.size());
        for (const auto& tc : cases_) out.push_back(tc.attributes.at(name));
        return out;
    }

private:
    std::vector<TestCase> cases_;
    std::vector<std::string> attribute_names_;
};

/// Vector of spins over {-1, +1}. Spin -1 means "selected".
class SpinConfig {
public:
    SpinConfig() = default;
    explicit SpinConfig(std::vector<int> spins) : spins_(std::move(spins)) {
        for (int s : spins_)
            if (s != -1 && s != 1)
                throw DataError("spin values must be -1 or +1, got " + std::to_string(s));
    }

    std::size_t size() const { return spins_.size(); }
    int operator[](std::size_t i) const { return spins_[i]; }
    const std::vector<int>& values() const { return spins_; }

    std::size_t count_selected() const {
        std::size_t c = 0;
        for (int s : spins_)
            if (s == -1) ++c;
        return c;
    }

    friend bool operator==(const SpinConfig& a, const SpinConfig& b) {
        return a.spins_ == b.spins_;
    }

private:
    std::vector<int> spins_;
};

/// Ising model: E(s) = -sum_i h_i s_i - 1/2 sum_{i,j} J_ij s_i s_j.
/// J is dense symmetric with a zero diagonal. `offset` is the constant
/// produced when a fitness polynomial is expanded into this form, so
/// that energy + offset reproduces the source fitness exactly.
class IsingModel {
public:
    IsingModel(std::vector<double> h, std::vector<std::vector<double>> j, double offset)
        : h_(std::move(h)), j_(std::move(j)), offset_(offset) {
        const std::size_t n = h_.size();
        if (j_.size() != n) throw DataError("J must be n x n with n = |h|");
        for (std::size_t i = 0; i < n; ++i) {
            if (j_[i].size() != n) throw DataError("J must be square");
            if (j_[i][i] != 0.0) throw DataError("J diagonal must be zero");
            if (!std::isfinite(h_[i])) throw DataError("h contains a non-finite entry");
            for (std::size_t k = 0; k < n; ++k) {
                if (!std::isfinite(j_[i][k])) throw DataError("J contains a non-finite entry");
                if (j_[i][k] != j_[k][i]) throw DataError("J must be symmetric");
            }
        }
        if (!std::isfinite(offset_)) throw DataError("offset must be finite");
    }

    static IsingModel zero(std::size_t n) {
        return IsingModel(std::vector<double>(n, 0.0),
                          std::vector<std::vector<double>>(n, std::vector<double>(n, 0.0)), 0.0);
    }

    std::size_t size() const { return h_.size(); }
    const std::vector<double>& h() const { return h_; }
    const std::vector<std::vector<double>>& j() const { return j_; }
    double offset() const { return offset_; }

private:
    std::vector<double> h_;
    std::vector<std::vector<double>> j_;
    double offset_;
};

/// Decoded form of a spin configuration: the chosen test case ids plus
/// the boolean mask over the suite, in suite order.
struct Selection {
    std::vector<std::string> selected_ids;
    std::vector<bool> mask;

    std::size_t count() const {
        std::size_t c = 0;
        for (bool b : mask)
            if (b) ++c;
        return c;
    }

    friend bool operator==(const Selection& a, const Selection& b) {
        return a.selected_ids == b.selected_ids && a.mask == b.mask;
    }
};

/// Energy of a spin configuration, without the offset term.
inline double ising_energy(const IsingModel& model, const SpinConfig& s) {
    const std::size_t n = model.size();
    if (s.size() != n)
        throw DataError("spin vector length " + std::to_string(s.size()) +
                        " does not match model dimension " + std::to_string(n));
    double linear = 0.0;
    for (std::size_t i = 0; i < n; ++i) linear += model.h()[i] * s[i];
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = model.j()[i];
        for (std::size_t k = i + 1; k < n; ++k) quad += row[k] * s[i] * s[k];
    }
    // The half double-sum over ordered pairs equals the plain sum over i<k.
    return -linear - quad;
}

/// Energy including the expansion constant; equals the encoded fitness.
inline double total_energy(const IsingModel& model, const SpinConfig& s) {
    return ising_energy(model, s) + model.offset();
}

/// Energy change from flipping spin i: 2 h_i s_i + 2 s_i sum_j J_ij s_j.
inline double spin_flip_delta(const IsingModel& model, const SpinConfig& s, std::size_t i) {
    const std::size_t n = model.size();
    if (s.size() != n || i >= n) throw DataError("spin_flip_delta: index/dimension mismatch");
    double field = 0.0;
    for (std::size_t k = 0; k < n; ++k) field += model.j()[i][k] * s[k];
    return 2.0 * model.h()[i] * s[i] + 2.0 * s[i] * field;
}

/// Decode spins: s_i == -1 means test i is selected.
inline Selection spins_to_selection(const TestSuite& suite, const SpinConfig& s) {
    if (s.size() != suite.size())
        throw DataError("spin vector length " + std::to_string(s.size()) +
                        " does not match suite size " + std::to_string(suite.size()));
    Selection sel;
    sel.mask.resize(suite.size());
    for (std::size_t i = 0; i < suite.size(); ++i) {
        sel.mask[i] = (s[i] == -1);
        if (sel.mask[i]) sel.selected_ids.push_back(suite.cases()[i].id);
    }
    return sel;
}

/// Inverse of spins_to_selection over the mask.
inline SpinConfig selection_to_spins(const Selection& sel) {
    std::vector<int> spins(sel.mask.size());
    for (std::size_t i = 0; i < sel.mask.size(); ++i) spins[i] = sel.mask[i] ? -1 : +1;
    return SpinConfig(std::move(spins));
}

inline SpinConfig mask_to_spins(const std::vector<bool>& mask) {
    std::vector<int> spins(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) spins[i] = mask[i] ? -1 : +1;
    return SpinConfig(std::move(spins));
}

/// Outcome of one solver run. Ising-family solvers fill the energy
/// fields themselves; for classical solvers the pipeline evaluates the
/// problem's Ising model at the returned spins. `selection` is attached
/// when the result is decoded against a suite.
struct SolverResult {
    std::string solver;
    SpinConfig spins;
    double energy = std::numeric_limits<double>::quiet_NaN();
    double total_energy = std::numeric_limits<double>::quiet_NaN();
    double fitness = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    double runtime_ms = 0.0;
    std::map<std::string, std::string> params;
    std::vector<double> best_fitness_history;  // per iteration/generation, non-increasing
    std::optional<Selection> selection;
};

}  // namespace itcs
