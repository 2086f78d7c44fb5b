#pragma once

// Exact design-based MSE by enumerating every SRSWOR sample.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "error.hpp"
#include "estimators.hpp"
#include "numeric.hpp"
#include "population.hpp"
#include "sampling.hpp"

namespace varest {

struct ExactOptions {
    std::uint64_t cap = kDefaultEnumerationCap;
    bool allow_partial = false;  // skip samples the estimator rejects instead of failing
    unsigned threads = 0;        // 0 = hardware concurrency
};

struct ExactResult {
    double mse = 0.0;            // mean of (estimate - S_y^2)^2 over evaluated samples
    double mean_estimate = 0.0;  // mean of the estimates over evaluated samples
    std::uint64_t samples = 0;   // C(N, n)
    std::uint64_t rejected = 0;  // samples the estimator could not evaluate
};

namespace detail {

inline unsigned worker_count(unsigned requested, std::uint64_t work_items) {
    unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::uint64_t>(t, std::max<std::uint64_t>(1, work_items)));
}

}  // namespace detail

/// The enumeration is cut into fixed-size rank blocks; each block is summed in
/// rank order and the block sums are combined pairwise, so the result does not
/// depend on the number of workers.
inline ExactResult exact_mse(const BivariatePopulation& pop, std::size_t n, const EstimatorSpec& spec,
                             const ExactOptions& options = {}) {
    check_design(n, pop.size());
    validate(spec);
    const std::uint64_t total = binomial(pop.size(), n);
    if (total > options.cap)
        throw Error(ErrorKind::TooManyCombinations, "C(" + std::to_string(pop.size()) + ", " + std::to_string(n) +
                                                        ") = " + std::to_string(total) + " exceeds cap " +
                                                        std::to_string(options.cap));
    const PopulationParams params = derive_params(pop);

    constexpr std::uint64_t kBlock = 4096;
    const std::uint64_t blocks = (total + kBlock - 1) / kBlock;
    std::vector<double> sq_sums(blocks, 0.0), est_sums(blocks, 0.0);
    std::vector<std::uint64_t> rejected(blocks, 0);
    // First failing rank per block, for deterministic error reporting.
    std::vector<std::optional<std::pair<std::uint64_t, Error>>> failures(blocks);

    auto run_block = [&](std::uint64_t b) {
        const std::uint64_t begin = b * kBlock;
        const std::uint64_t end = std::min(total, begin + kBlock);
        CombinationCursor cursor(pop.size(), n);
        cursor.seek(begin);
        double sq = 0.0, est = 0.0;
        for (std::uint64_t r = begin; r < end; ++r) {
            const auto stats = sample_stats(pop, cursor.indices(), &params);
            try {
                const double value = evaluate(spec, stats, params);
                const double err = value - params.Sy2;
                sq += err * err;
                est += value;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::DegenerateSample && e.kind() != ErrorKind::NumericalDomain) throw;
                if (!options.allow_partial) {
                    failures[b].emplace(r, e);
                    return;
                }
                ++rejected[b];
            }
            cursor.advance();
        }
        sq_sums[b] = sq;
        est_sums[b] = est;
    };

    const unsigned workers = detail::worker_count(options.threads, blocks);
    if (workers == 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::uint64_t b = w; b < blocks; b += workers) run_block(b);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    for (const auto& f : failures)
        if (f) throw Error(f->second.kind(), std::string(f->second.what()) + " (sample rank " + std::to_string(f->first) + ")");

    ExactResult result;
    result.samples = total;
    for (auto r : rejected) result.rejected += r;
    const std::uint64_t used = total - result.rejected;
    if (used == 0) throw Error(ErrorKind::DegenerateSample, "estimator rejected every sample");
    result.mse = pairwise_sum(sq_sums) / static_cast<double>(used);
    result.mean_estimate = pairwise_sum(est_sums) / static_cast<double>(used);
    return result;
}

}  // namespace varest
