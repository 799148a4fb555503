#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "itcs/core.hpp"
#include "itcs/errors.hpp"
#include "itcs/random.hpp"
#include "itcs/util.hpp"

namespace itcs::cim {

/// Simulation parameters of the measurement-feedback machine. The
/// physics constants keep their conventional symbols.
struct CimParams {
    double g2 = 1e-3;          // oscillator saturation
    double j = 2.0;            // feedback coupling vs coupling-induced dissipation
    double beta = 10.0;        // amplitude homogeneity correction strength
    double noise_scale = 1.0;  // multiplier on the stochastic term
    std::size_t steps = 1000;  // total evolution steps
    double dt = 2e-3;          // integration step size
    std::size_t batches = 10;  // independent trajectories per solve
    double pump_end_factor = 1.5;   // pump reaches pump_end_factor * (1+j) at the final step
    double coupling_strength = 1.0;
    double initial_mu = 0.0;   // test hook: homogeneous starting amplitude

    void validate() const {
        if (!(g2 > 0.0)) throw DataError("CIM g2 must be > 0");
        if (!(j > 0.0)) throw DataError("CIM j must be > 0");
        if (beta < 0.0) throw DataError("CIM beta must be >= 0");
        if (noise_scale < 0.0) throw DataError("CIM noise_scale must be >= 0");
        if (steps == 0) throw DataError("CIM steps must be >= 1");
        if (!(dt > 0.0)) throw DataError("CIM dt must be > 0");
        if (batches == 0) throw DataError("CIM batches must be >= 1");
        if (!(pump_end_factor > 1.0)) throw DataError("CIM pump_end_factor must be > 1");
        if (!(coupling_strength > 0.0)) throw DataError("CIM coupling_strength must be > 0");
    }
};

/// State of the oscillator network: mean amplitudes, amplitude
/// variances and the homogeneity-control gains. Variances and gains
/// stay positive along any healthy trajectory; a non-finite entry
/// aborts the run.
struct OscillatorState {
    std::vector<double> mu;
    std::vector<double> sigma;
    std::vector<double> err;
};

/// Per-batch record of one trajectory: mean amplitudes at every step
/// plus the energy of the sign readout, raw and best-so-far. The
/// variance series is kept as a stability diagnostic.
struct CimTrace {
    std::size_t batch = 0;
    std::vector<std::vector<double>> mu;     // (steps + 1) x n
    std::vector<std::vector<double>> sigma;  // (steps + 1) x n
    std::vector<double> fitness_raw;         // readout total energy per snapshot
    std::vector<double> fitness_best;        // running minimum, non-increasing
};

struct CimResult {
    SolverResult result;
    std::vector<CimTrace> traces;
};

/// Rescale (h, J) so the strongest row of |h_i| + sum_j |J_ij| is 1,
/// keeping the feedback magnitude O(1) regardless of problem scale. A
/// positive rescaling never moves the energy argmin. The offset is
/// carried through unchanged.
inline IsingModel normalize_coupling(const IsingModel& model) {
    const std::size_t n = model.size();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = std::abs(model.h()[i]);
        for (std::size_t k = 0; k < n; ++k) row += std::abs(model.j()[i][k]);
        scale = std::max(scale, row);
    }
    if (scale == 0.0) return model;
    std::vector<double> h(n);
    std::vector<std::vector<double>> j(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        h[i] = model.h()[i] / scale;
        for (std::size_t k = 0; k < n; ++k) j[i][k] = model.j()[i][k] / scale;
    }
    return IsingModel(std::move(h), std::move(j), model.offset());
}

namespace detail {

inline SpinConfig sign_readout(const std::vector<double>& mu) {
    std::vector<int> spins(mu.size());
    // mu == 0 reads as +1: not selected.
    for (std::size_t i = 0; i < mu.size(); ++i) spins[i] = mu[i] < 0.0 ? -1 : +1;
    return SpinConfig(std::move(spins));
}

}  // namespace detail

/// Simulates `batches` independent trajectories of n coupled optical
/// parametric oscillators under a Gaussian mean-plus-variance model
/// with measurement feedback, and returns the best sign readout seen at
/// any step of any batch (lowest total energy; ties go to the earliest
/// step, then the lowest batch index).
///
/// Per oscillator the state is (mu, sigma, e): mean amplitude,
/// amplitude variance, and the homogeneity-control gain that scales the
/// injected feedback until mu^2 reaches the target amplitude A(t). The
/// pump p(t) ramps linearly from 0 to pump_end_factor * (1 + j), so the
/// oscillation threshold p = 1 + j is crossed during the run and the
/// network settles into a low-energy sign pattern as amplitudes grow.
inline CimResult cim_solve(const IsingModel& model, const CimParams& params,
                           std::uint64_t seed) {
    params.validate();
    const std::size_t n = model.size();
    if (n == 0) throw DataError("cim_solve: empty model");

    const IsingModel normalized = normalize_coupling(model);
    const double pump_end = params.pump_end_factor * (1.0 + params.j);
    const double sqrt_dt = std::sqrt(params.dt);
    const double sqrt_j = std::sqrt(params.j);
    const double measure_scale = params.noise_scale / std::sqrt(4.0 * params.j);

    CimResult out;
    out.traces.reserve(params.batches);

    double best_energy = 0.0;
    std::size_t best_step = 0, best_batch = 0;
    SpinConfig best_spins;
    bool have_best = false;
    auto offer = [&](double energy, std::size_t step, std::size_t batch, const SpinConfig& s) {
        const bool better =
            !have_best || energy < best_energy ||
            (energy == best_energy &&
             (step < best_step || (step == best_step && batch < best_batch)));
        if (better) {
            best_energy = energy;
            best_step = step;
            best_batch = batch;
            best_spins = s;
            have_best = true;
        }
    };

    for (std::size_t batch = 0; batch < params.batches; ++batch) {
        Rng rng(seed + batch);
        OscillatorState state;
        state.mu.assign(n, params.initial_mu);
        state.sigma.assign(n, 0.5);  // vacuum variance
        state.err.assign(n, 1.0);
        auto& mu = state.mu;
        auto& sigma = state.sigma;
        auto& err = state.err;
        std::vector<double> noise(n), mu_next(n), sigma_next(n), err_next(n);

        CimTrace trace;
        trace.batch = batch;
        trace.mu.reserve(params.steps + 1);

        double batch_best = std::numeric_limits<double>::infinity();
        auto snapshot = [&](std::size_t step) {
            trace.mu.push_back(mu);
            trace.sigma.push_back(sigma);
            const SpinConfig readout = detail::sign_readout(mu);
            const double energy = total_energy(model, readout);
            trace.fitness_raw.push_back(energy);
            batch_best = std::min(batch_best, energy);
            trace.fitness_best.push_back(batch_best);
            offer(energy, step, batch, readout);
        };
        snapshot(0);

        for (std::size_t step = 0; step < params.steps; ++step) {
            const double pump =
                params.steps == 1
                    ? pump_end
                    : pump_end * static_cast<double>(step) / static_cast<double>(params.steps - 1);
            const double gain = pump - 1.0 - params.j;
            double target = std::max(gain, 0.0) / params.g2;
            if (target > 0.0) target = std::max(target, 1.0);
            const double field_scale = std::sqrt(target);

            for (std::size_t i = 0; i < n; ++i) noise[i] = rng.normal();

            for (std::size_t i = 0; i < n; ++i) {
                // Feedback uses the measured amplitudes, which carry the
                // same noise draw as the back-action below.
                double injected = normalized.h()[i] * field_scale;
                const auto& row = normalized.j()[i];
                for (std::size_t k = 0; k < n; ++k)
                    injected += row[k] * (mu[k] + measure_scale * noise[k]);
                injected *= err[i];

                const double drift =
                    gain * mu[i] - params.g2 * mu[i] * mu[i] * mu[i] +
                    params.coupling_strength * injected;
                mu_next[i] = mu[i] + params.dt * drift +
                             sqrt_dt * sqrt_j * (2.0 * sigma[i] - 1.0) * params.noise_scale *
                                 noise[i];

                const double mu2 = mu[i] * mu[i];
                const double sdev = sigma[i] - 0.5;
                sigma_next[i] = sigma[i] + params.dt * (2.0 * gain * sigma[i] -
                                                        6.0 * params.g2 * mu2 * sigma[i] -
                                                        2.0 * params.j * sdev * sdev + 1.0 +
                                                        params.j + 2.0 * params.g2 * mu2);

                // Homogeneity control. The amplitude error is measured
                // relative to the target and the update uses the exact
                // exponential of the per-step rate: the raw Euler form
                // with the absolute error mu^2 - A is stiff at the
                // default dt once A reaches (p - 1 - j)/g2 and diverges.
                const double rel_err = (mu2 - target) / std::max(target, 1.0);
                double e = err[i] * std::exp(-params.beta * rel_err * params.dt);
                if (e < 1e-6) e = 1e-6;
                if (e > 1e6) e = 1e6;
                err_next[i] = e;
            }

            mu.swap(mu_next);
            sigma.swap(sigma_next);
            err.swap(err_next);

            for (std::size_t i = 0; i < n; ++i)
                if (!std::isfinite(mu[i]) || !std::isfinite(sigma[i]) || !std::isfinite(err[i]))
                    throw SolverError("CIM: non-finite oscillator state at step " +
                                      std::to_string(step + 1) + ", oscillator " +
                                      std::to_string(i));

            snapshot(step + 1);
        }

        out.traces.push_back(std::move(trace));
    }

    SolverResult& result = out.result;
    result.solver = "CIM";
    result.spins = best_spins;
    result.total_energy = best_energy;
    result.energy = best_energy - model.offset();
    result.fitness = best_energy;
    result.seed = seed;
    result.params["g2"] = format_double(params.g2);
    result.params["j"] = format_double(params.j);
    result.params["beta"] = format_double(params.beta);
    result.params["noise_scale"] = format_double(params.noise_scale);
    result.params["steps"] = std::to_string(params.steps);
    result.params["dt"] = format_double(params.dt);
    result.params["batches"] = std::to_string(params.batches);
    result.params["pump_end_factor"] = format_double(params.pump_end_factor);
    result.params["coupling_strength"] = format_double(params.coupling_strength);
    return out;
}

}  // namespace itcs::cim
