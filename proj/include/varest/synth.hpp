#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "population.hpp"
#include "rng.hpp"

namespace varest {

struct SynthOptions {
    std::size_t N = 10'000;
    double rho = 0.8;      // correlation of the underlying normals
    unsigned dof = 10;     // multivariate-t degrees of freedom (kurtosis 3 + 6/(dof-4))
    double y_mean = 50.0;
    double y_scale = 10.0;
    double x_mean = 100.0;
    double x_scale = 20.0;
    std::uint64_t seed = 20'130'101;
};

/// Correlated heavy-tailed population: (y, x) = location + scale * t_dof with
/// a shared chi-square mixing variable per unit.
inline BivariatePopulation make_synthetic_population(const SynthOptions& o = {}) {
    std::vector<double> y(o.N), x(o.N);
    const double tail = std::sqrt(1.0 - o.rho * o.rho);
    for (std::size_t i = 0; i < o.N; ++i) {
        CounterRng rng(o.seed, i);
        const double z1 = rng.next_normal();
        const double z2 = o.rho * z1 + tail * rng.next_normal();
        double chi2 = 0.0;
        for (unsigned k = 0; k < o.dof; ++k) {
            const double g = rng.next_normal();
            chi2 += g * g;
        }
        const double mix = std::sqrt(chi2 / o.dof);
        y[i] = o.y_mean + o.y_scale * z1 / mix;
        x[i] = o.x_mean + o.x_scale * z2 / mix;
    }
    return BivariatePopulation(std::move(y), std::move(x));
}

}  // namespace varest
