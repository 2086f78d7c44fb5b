#pragma once

// Replicated SRSWOR simulation of estimator MSE, bias and Monte Carlo error.
//
// Replicate r draws its sample from CounterRng(seed, r), and every reduction
// runs over replicates in index order, so results are bit-identical for any
// number of worker threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "error.hpp"
#include "estimators.hpp"
#include "exact.hpp"
#include "mse.hpp"
#include "numeric.hpp"
#include "population.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "spec_text.hpp"

namespace varest {

struct SimulationConfig {
    std::size_t replicates = 10'000;
    std::size_t n = 2;
    std::uint64_t seed = 0;
    std::vector<EstimatorSpec> specs;
    bool allow_partial = false;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct SimulationResult {
    EstimatorSpec spec;
    double empirical_mse = 0.0;
    double empirical_bias = 0.0;
    double mc_stderr = 0.0;  // standard error of empirical_mse
    std::size_t rejected_samples = 0;
    std::size_t replicates_used = 0;
};

inline std::vector<SimulationResult> run(const BivariatePopulation& pop, const PopulationParams& params,
                                         const SimulationConfig& cfg) {
    if (cfg.replicates < 1) throw Error(ErrorKind::InvalidDesign, "replicates must be >= 1");
    check_design(cfg.n, pop.size());
    for (const auto& s : cfg.specs) validate(s);

    const std::size_t R = cfg.replicates;
    const std::size_t S = cfg.specs.size();
    const double nan = std::nan("");
    std::vector<double> estimates(S * R, nan);  // [spec][replicate]

    constexpr std::size_t kChunk = 256;
    const std::size_t chunks = (R + kChunk - 1) / kChunk;
    const unsigned workers = detail::worker_count(cfg.threads, chunks);
    std::vector<std::vector<std::optional<std::pair<std::size_t, Error>>>> worker_failures(
        workers, std::vector<std::optional<std::pair<std::size_t, Error>>>(S));

    auto work = [&](unsigned w) {
        SrsworSampler sampler(pop.size());
        std::vector<std::size_t> idx;
        auto& failures = worker_failures[w];
        for (std::size_t c = w; c < chunks; c += workers) {
            const std::size_t end = std::min(R, (c + 1) * kChunk);
            for (std::size_t r = c * kChunk; r < end; ++r) {
                CounterRng rng(cfg.seed, r);
                sampler.draw(cfg.n, rng, idx);
                const auto stats = sample_stats(pop, idx, &params);
                for (std::size_t s = 0; s < S; ++s) {
                    try {
                        estimates[s * R + r] = evaluate(cfg.specs[s], stats, params);
                    } catch (const Error& e) {
                        if (e.kind() != ErrorKind::DegenerateSample && e.kind() != ErrorKind::NumericalDomain) throw;
                        if (!failures[s] || r < failures[s]->first) failures[s].emplace(r, e);
                    }
                }
            }
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                try {
                    work(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    if (!cfg.allow_partial) {
        for (std::size_t s = 0; s < S; ++s) {
            std::optional<std::pair<std::size_t, Error>> earliest;
            for (const auto& wf : worker_failures)
                if (wf[s] && (!earliest || wf[s]->first < earliest->first)) earliest = wf[s];
            if (earliest)
                throw Error(earliest->second.kind(), to_string(cfg.specs[s]) + ": " + earliest->second.what() +
                                                         " (replicate " + std::to_string(earliest->first) + ")");
        }
    }

    std::vector<SimulationResult> results;
    results.reserve(S);
    std::vector<double> sq, est;
    for (std::size_t s = 0; s < S; ++s) {
        sq.clear();
        est.clear();
        for (std::size_t r = 0; r < R; ++r) {
            const double v = estimates[s * R + r];
            if (std::isnan(v)) continue;
            est.push_back(v);
            sq.push_back((v - params.Sy2) * (v - params.Sy2));
        }
        SimulationResult res{cfg.specs[s]};
        res.replicates_used = sq.size();
        res.rejected_samples = R - sq.size();
        if (!sq.empty()) {
            const double used = static_cast<double>(sq.size());
            res.empirical_mse = pairwise_sum(sq) / used;
            res.empirical_bias = pairwise_sum(est) / used - params.Sy2;
            if (sq.size() > 1) {
                for (double& v : sq) v = (v - res.empirical_mse) * (v - res.empirical_mse);
                res.mc_stderr = std::sqrt(pairwise_sum(sq) / (used - 1.0) / used);
            }
        } else {
            res.empirical_mse = res.empirical_bias = res.mc_stderr = nan;
        }
        results.push_back(std::move(res));
    }
    return results;
}

struct TheoryCheck {
    SimulationResult simulation;
    double theoretical = 0.0;
    double ratio = 0.0;  // empirical / theoretical
    bool small_sample = false;
};

/// True when the design is outside the regime where first-order MSE is trustworthy.
inline bool approximation_warning(const PopulationParams& p, std::size_t n, double theta) {
    return theta * std::max(p.beta2y_star, p.beta2x_star) > 0.5 || n < 10;
}

inline std::vector<TheoryCheck> validate_theory(const BivariatePopulation& pop, const PopulationParams& params,
                                                const SimulationConfig& cfg,
                                                MseFormulaVariant variant = MseFormulaVariant::AsPrinted) {
    const double th = theta(cfg.n, pop.size());
    const bool warn = approximation_warning(params, cfg.n, th);
    std::vector<TheoryCheck> out;
    for (auto& sim : run(pop, params, cfg)) {
        TheoryCheck c{std::move(sim)};
        c.theoretical = theoretical_mse(c.simulation.spec, params, th, variant);
        c.ratio = c.simulation.empirical_mse / c.theoretical;
        c.small_sample = warn;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace varest
