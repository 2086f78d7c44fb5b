#pragma once

// Point estimators of the finite-population variance S_y^2 from one sample,
// given known population parameters of the auxiliary variable.

#include <cmath>
#include <string>
#include <type_traits>
#include <variant>

#include "error.hpp"
#include "numeric.hpp"
#include "population.hpp"
#include "sampling.hpp"

namespace varest {

struct Usual {
    bool operator==(const Usual&) const = default;
};

struct IsakiRatio {
    bool operator==(const IsakiRatio&) const = default;
};

struct Regression {
    double b = 0.0;
    bool operator==(const Regression&) const = default;
};

/// One of the four shifted ratio estimators; the index is checked on construction.
class KadilarCingi {
public:
    explicit KadilarCingi(int i) : i_(i) {
        if (i < 1 || i > 4)
            throw Error(ErrorKind::InvalidSpec, "Kadilar-Cingi index must be 1..4, got " + std::to_string(i));
    }
    int index() const noexcept { return i_; }
    bool operator==(const KadilarCingi&) const = default;

private:
    int i_;
};

/// alpha1 * s_y^2 + (1 - alpha1) * tau * s_y^2 * S_x^2 / s_x^2.
struct KCCombined {
    double alpha1 = 1.0;
    double tau = 1.0;
    double alpha2() const noexcept { return 1.0 - alpha1; }
    bool operator==(const KCCombined&) const = default;
};

/// [d1 s_y^2 + d2 (S_x^2 - s_x^2)] [2 - (s_x^2 / S_x^2)^alpha].
struct GuptaShabbirPR {
    double alpha = 0.0;
    double d1 = 1.0;
    double d2 = 0.0;
    bool operator==(const GuptaShabbirPR&) const = default;
};

/// w1 s_y^2 {(c S_x^2 - d s_x^2) / ((c - d) S_x^2)}^m + w2 s_y^2 {2 - (s_x^2 / S_x^2)^w}.
struct ProposedT {
    double m = 0.0;
    double w = 1.0;
    double c = 2.0;
    double d = 1.0;
    double w1 = 1.0;
    double w2 = 0.0;

    /// Shift constant d / (c - d); the first bracket equals 1 - A e1.
    double A() const noexcept { return d / (c - d); }
    bool operator==(const ProposedT&) const = default;
};

using EstimatorSpec = std::variant<Usual, IsakiRatio, Regression, KadilarCingi, KCCombined, GuptaShabbirPR, ProposedT>;

inline void validate(const EstimatorSpec& spec) {
    if (const auto* t = std::get_if<ProposedT>(&spec)) {
        if (t->c == t->d) throw Error(ErrorKind::InvalidSpec, "proposed T requires c != d");
        if (!std::isfinite(t->A())) throw Error(ErrorKind::InvalidSpec, "proposed T shift d/(c-d) is not finite");
    }
}

namespace detail {

inline double domain_pow(double base, double exponent, const char* what) {
    if (base < 0.0 && !is_integer(exponent))
        throw Error(ErrorKind::NumericalDomain, std::string(what) + ": negative base with fractional exponent");
    if (base == 0.0 && exponent < 0.0)
        throw Error(ErrorKind::DegenerateSample, std::string(what) + ": zero base with negative exponent");
    return std::pow(base, exponent);
}

inline void require_positive_sx2(const SampleStats& stats, const char* what) {
    if (!(stats.sx2 > 0.0))
        throw Error(ErrorKind::DegenerateSample, std::string(what) + ": sample variance of x is zero");
}

}  // namespace detail

inline double usual(const SampleStats& stats) { return stats.sy2; }

inline double isaki_ratio(const SampleStats& stats, const PopulationParams& params) {
    detail::require_positive_sx2(stats, "ratio estimator");
    return stats.sy2 * params.Sx2 / stats.sx2;
}

inline double regression(const SampleStats& stats, const PopulationParams& params, double b) {
    return stats.sy2 + b * (params.Sx2 - stats.sx2);
}

inline double kadilar_cingi(const SampleStats& stats, const PopulationParams& params, int i) {
    // Each variant is s_y^2 (a S_x^2 + k) / (a s_x^2 + k).
    double a = 1.0, k = 0.0;
    switch (i) {
        case 1: k = params.Cx; break;
        case 2: k = params.beta2x; break;
        case 3: a = params.beta2x; k = params.Cx; break;
        case 4: a = params.Cx; k = params.beta2x; break;
        default: throw Error(ErrorKind::InvalidSpec, "Kadilar-Cingi index must be 1..4");
    }
    const double denom = a * stats.sx2 + k;
    if (denom == 0.0) throw Error(ErrorKind::DegenerateSample, "Kadilar-Cingi denominator is zero");
    return stats.sy2 * (a * params.Sx2 + k) / denom;
}

inline double kc_combined(const SampleStats& stats, const PopulationParams& params, double alpha1, double tau) {
    detail::require_positive_sx2(stats, "combined Kadilar-Cingi estimator");
    return alpha1 * stats.sy2 + (1.0 - alpha1) * tau * stats.sy2 * params.Sx2 / stats.sx2;
}

inline double gupta_shabbir(const SampleStats& stats, const PopulationParams& params, double alpha, double d1,
                            double d2) {
    if (stats.sx2 == 0.0 && !is_integer(alpha))
        throw Error(ErrorKind::DegenerateSample, "Gupta-Shabbir: fractional alpha with zero sample variance of x");
    const double shrink = 2.0 - detail::domain_pow(stats.sx2 / params.Sx2, alpha, "Gupta-Shabbir");
    return (d1 * stats.sy2 + d2 * (params.Sx2 - stats.sx2)) * shrink;
}

inline double proposed_t(const SampleStats& stats, const PopulationParams& params, const ProposedT& t) {
    if (t.c == t.d) throw Error(ErrorKind::InvalidSpec, "proposed T requires c != d");
    const double base = (t.c * params.Sx2 - t.d * stats.sx2) / ((t.c - t.d) * params.Sx2);
    const double first = t.w1 == 0.0 ? 0.0 : t.w1 * stats.sy2 * detail::domain_pow(base, t.m, "proposed T");
    const double second = t.w2 == 0.0
                              ? 0.0
                              : t.w2 * stats.sy2 * (2.0 - detail::domain_pow(stats.sx2 / params.Sx2, t.w, "proposed T"));
    return first + second;
}

inline double evaluate(const EstimatorSpec& spec, const SampleStats& stats, const PopulationParams& params) {
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Usual>) return usual(stats);
            else if constexpr (std::is_same_v<S, IsakiRatio>) return isaki_ratio(stats, params);
            else if constexpr (std::is_same_v<S, Regression>) return regression(stats, params, s.b);
            else if constexpr (std::is_same_v<S, KadilarCingi>) return kadilar_cingi(stats, params, s.index());
            else if constexpr (std::is_same_v<S, KCCombined>) return kc_combined(stats, params, s.alpha1, s.tau);
            else if constexpr (std::is_same_v<S, GuptaShabbirPR>) return gupta_shabbir(stats, params, s.alpha, s.d1, s.d2);
            else return proposed_t(stats, params, s);
        },
        spec);
}

}  // namespace varest
