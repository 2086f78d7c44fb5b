#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"
#include "population.hpp"
#include "rng.hpp"

namespace varest {

struct Sample {
    std::vector<std::size_t> indices;  // strictly increasing
    std::vector<double> y_values;
    std::vector<double> x_values;

    std::size_t n() const noexcept { return indices.size(); }
};

struct SampleStats {
    std::size_t n = 0;
    double ybar = 0.0;
    double xbar = 0.0;
    double sy2 = 0.0;
    double sx2 = 0.0;
    std::optional<double> e0;  // sy2 / Sy2 - 1
    std::optional<double> e1;  // sx2 / Sx2 - 1
};

inline Sample make_sample(const BivariatePopulation& pop, std::vector<std::size_t> indices) {
    Sample s;
    s.indices = std::move(indices);
    std::sort(s.indices.begin(), s.indices.end());
    s.y_values.reserve(s.indices.size());
    s.x_values.reserve(s.indices.size());
    for (std::size_t i : s.indices) {
        s.y_values.push_back(pop.y()[i]);
        s.x_values.push_back(pop.x()[i]);
    }
    return s;
}

/// Partial Fisher-Yates over [0, N). Keeps a permutation buffer that is
/// restored after each draw, so one sampler serves many replicates.
class SrsworSampler {
public:
    explicit SrsworSampler(std::size_t N) : perm_(N) {
        for (std::size_t i = 0; i < N; ++i) perm_[i] = i;
    }

    /// Writes n sorted distinct indices into `out`.
    void draw(std::size_t n, CounterRng& rng, std::vector<std::size_t>& out) {
        const std::size_t N = perm_.size();
        swaps_.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.next_below(N - i));
            std::swap(perm_[i], perm_[j]);
            swaps_.push_back(j);
        }
        out.assign(perm_.begin(), perm_.begin() + static_cast<std::ptrdiff_t>(n));
        for (std::size_t i = n; i-- > 0;) std::swap(perm_[i], perm_[swaps_[i]]);
        std::sort(out.begin(), out.end());
    }

private:
    std::vector<std::size_t> perm_;
    std::vector<std::size_t> swaps_;
};

inline void check_design(std::size_t n, std::size_t N) {
    if (n < 2 || n > N)
        throw Error(ErrorKind::InvalidDesign,
                    "sample size n = " + std::to_string(n) + " must satisfy 2 <= n <= N = " + std::to_string(N));
}

/// SRSWOR draw; identical (pop, n, seed) always yields the same sample.
inline Sample draw_srswor(const BivariatePopulation& pop, std::size_t n, std::uint64_t seed) {
    check_design(n, pop.size());
    CounterRng rng(seed);
    SrsworSampler sampler(pop.size());
    std::vector<std::size_t> idx;
    sampler.draw(n, rng, idx);
    return make_sample(pop, std::move(idx));
}

namespace detail {

template <class YAt, class XAt>
SampleStats compute_stats(std::size_t n, YAt y_at, XAt x_at, const PopulationParams* params) {
    SampleStats s;
    s.n = n;
    const double nd = static_cast<double>(n);
    double sy = 0.0, sx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sy += y_at(i);
        sx += x_at(i);
    }
    s.ybar = sy / nd;
    s.xbar = sx / nd;
    double qy = 0.0, qx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dy = y_at(i) - s.ybar;
        const double dx = x_at(i) - s.xbar;
        qy += dy * dy;
        qx += dx * dx;
    }
    s.sy2 = qy / (nd - 1.0);
    s.sx2 = qx / (nd - 1.0);
    if (params) {
        s.e0 = s.sy2 / params->Sy2 - 1.0;
        s.e1 = s.sx2 / params->Sx2 - 1.0;
    }
    return s;
}

}  // namespace detail

/// Sample moments (divisor n-1) of the units at `indices`, two-pass. e0/e1
/// are filled only when population params are supplied.
inline SampleStats sample_stats(const BivariatePopulation& pop, std::span<const std::size_t> indices,
                                const PopulationParams* params = nullptr) {
    return detail::compute_stats(
        indices.size(), [&](std::size_t i) { return pop.y()[indices[i]]; },
        [&](std::size_t i) { return pop.x()[indices[i]]; }, params);
}

inline SampleStats sample_stats(const Sample& sample, const std::optional<PopulationParams>& params = std::nullopt) {
    return detail::compute_stats(
        sample.n(), [&](std::size_t i) { return sample.y_values[i]; },
        [&](std::size_t i) { return sample.x_values[i]; }, params ? &*params : nullptr);
}

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Enumeration cap, overridable through VAREST_ENUM_CAP.
inline std::uint64_t enumeration_cap_from_env() {
    if (const char* env = std::getenv("VAREST_ENUM_CAP")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
    }
    return kDefaultEnumerationCap;
}

/// Lexicographic cursor over the n-subsets of [0, N).
class CombinationCursor {
public:
    CombinationCursor(std::size_t N, std::size_t n) : N_(N), idx_(n) {
        for (std::size_t i = 0; i < n; ++i) idx_[i] = i;
    }

    /// Positions the cursor at the combination with the given lexicographic rank.
    void seek(std::uint64_t rank) {
        const std::size_t n = idx_.size();
        std::size_t next = 0;
        for (std::size_t j = 0; j < n; ++j) {
            for (;;) {
                const std::uint64_t block = binomial(N_ - 1 - next, n - 1 - j);
                if (rank < block) break;
                rank -= block;
                ++next;
            }
            idx_[j] = next++;
        }
    }

    const std::vector<std::size_t>& indices() const noexcept { return idx_; }

    /// Advances to the next combination; false once the last one has been passed.
    bool advance() {
        const std::size_t n = idx_.size();
        std::size_t i = n;
        while (i > 0 && idx_[i - 1] == N_ - n + (i - 1)) --i;
        if (i == 0) return false;
        ++idx_[i - 1];
        for (std::size_t j = i; j < n; ++j) idx_[j] = idx_[j - 1] + 1;
        return true;
    }

private:
    std::size_t N_;
    std::vector<std::size_t> idx_;
};

/// Streams every n-subset exactly once in lexicographic index order.
class SampleEnumerator {
public:
    SampleEnumerator(const BivariatePopulation& pop, std::size_t n, std::uint64_t cap = kDefaultEnumerationCap)
        : pop_(&pop), cursor_((check_design(n, pop.size()), pop.size()), n), total_(binomial(pop.size(), n)) {
        if (total_ > cap)
            throw Error(ErrorKind::TooManyCombinations,
                        "C(" + std::to_string(pop.size()) + ", " + std::to_string(n) + ") = " +
                            std::to_string(total_) + " exceeds cap " + std::to_string(cap));
    }

    std::uint64_t count() const noexcept { return total_; }

    std::optional<Sample> next() {
        if (done_) return std::nullopt;
        Sample s = make_sample(*pop_, cursor_.indices());
        done_ = !cursor_.advance();
        return s;
    }

private:
    const BivariatePopulation* pop_;
    CombinationCursor cursor_;
    std::uint64_t total_;
    bool done_ = false;
};

}  // namespace varest
