#pragma once

// First-order (Taylor) mean square errors of the variance estimators, their
// family-specific constants and the closed-form optimal weights.
//
// All formulas take the design factor theta = 1/n - 1/N explicitly. With
// e0 = s_y^2/S_y^2 - 1 and e1 = s_x^2/S_x^2 - 1 the approximation uses
//   E(e0^2) = theta b*_2y,  E(e1^2) = theta b*_2x,  E(e0 e1) = theta l*_22
// and drops every term of order theta^2 and beyond.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "error.hpp"
#include "estimators.hpp"
#include "numeric.hpp"
#include "population.hpp"
#include "spec_text.hpp"

namespace varest {

/// Which coefficient set the proposed-T MSE uses. AsPrinted uses the
/// commonly typeset B1..B5 literally; Rederived follows the binomial expansion
/// (1 - A e1)^m = 1 - m A e1 + m(m-1)/2 A^2 e1^2 carried through to the
/// second-order moments. The two agree whenever m is 0 or 1.
enum class MseFormulaVariant { AsPrinted, Rederived };

inline constexpr std::string_view to_string(MseFormulaVariant v) noexcept {
    return v == MseFormulaVariant::AsPrinted ? "printed" : "rederived";
}

inline MseFormulaVariant parse_variant(std::string_view text) {
    if (text == "printed" || text == "as-printed") return MseFormulaVariant::AsPrinted;
    if (text == "rederived") return MseFormulaVariant::Rederived;
    throw Error(ErrorKind::InvalidSpec, "unknown formula variant '" + std::string(text) + "'");
}

struct Weights {
    std::string first_name;
    double first = 0.0;
    std::string second_name;
    std::optional<double> second;
};

struct MseReport {
    std::string estimator;  // canonical text of the resolved spec (or of the request on error)
    std::string label;
    std::optional<EstimatorSpec> spec;
    double mse = std::nan("");
    MseFormulaVariant variant = MseFormulaVariant::AsPrinted;
    std::optional<Weights> weights;
    double relative_efficiency = std::nan("");
    bool breakdown = false;  // non-positive or non-convex quadratic optimum; mse is reported raw
    std::optional<std::string> error;
};

// ---------------------------------------------------------------------------
// Closed forms for the existing estimators

inline void check_theta(double theta) {
    if (!(theta >= 0.0)) throw Error(ErrorKind::InvalidDesign, "theta must be >= 0");
}

inline double var_usual(const PopulationParams& p, double theta) {
    check_theta(theta);
    return theta * p.Sy4() * p.beta2y_star;
}

inline double mse_ratio(const PopulationParams& p, double theta) {
    check_theta(theta);
    return theta * p.Sy4() * (p.beta2y_star + p.beta2x_star - 2.0 * p.lambda22_star);
}

inline double regression_b_opt(const PopulationParams& p) {
    if (!(p.beta2x_star > 0.0))
        throw Error(ErrorKind::DegenerateAuxiliary, "beta*_2x = 0: auxiliary variance carries no information");
    return p.lambda22_star * p.Sy2 / (p.beta2x_star * p.Sx2);
}

/// MSE of s_y^2 + b (S_x^2 - s_x^2) for a fixed slope b.
inline double mse_regression_at(const PopulationParams& p, double theta, double b) {
    check_theta(theta);
    return theta * (p.Sy4() * p.beta2y_star + b * b * p.Sx4() * p.beta2x_star -
                    2.0 * b * p.Sy2 * p.Sx2 * p.lambda22_star);
}

/// Minimum over b: var_usual * (1 - rho*^2).
inline double mse_regression(const PopulationParams& p, double theta) {
    if (!(p.beta2x_star > 0.0))
        throw Error(ErrorKind::DegenerateAuxiliary, "beta*_2x = 0: auxiliary variance carries no information");
    const double r2 = p.lambda22_star * p.lambda22_star / (p.beta2y_star * p.beta2x_star);
    return var_usual(p, theta) * (1.0 - r2);
}

inline double p_constant(const PopulationParams& p, int i) {
    switch (i) {
        case 1: return p.Sx2 / (p.Sx2 + p.Cx);
        case 2: return p.Sx2 / (p.Sx2 + p.beta2x);
        case 3: return p.Sx2 * p.beta2x / (p.Sx2 * p.beta2x + p.Cx);
        case 4: return p.Sx2 * p.Cx / (p.Sx2 * p.Cx + p.beta2x);
        default: throw Error(ErrorKind::InvalidSpec, "Kadilar-Cingi index must be 1..4");
    }
}

/// theta S_y^4 (b*_2y + p^2 b*_2x - 2 p l*_22). `literal_unstarred` swaps in the
/// unstarred b_2x of the original typesetting (debug only: it does not
/// reproduce the reference table).
inline double mse_kc_at(const PopulationParams& params, double theta, double p, bool literal_unstarred = false) {
    check_theta(theta);
    const double bx = literal_unstarred ? params.beta2x : params.beta2x_star;
    return theta * params.Sy4() * (params.beta2y_star + p * p * bx - 2.0 * p * params.lambda22_star);
}

inline double mse_kc(const PopulationParams& params, double theta, int i, bool literal_unstarred = false) {
    return mse_kc_at(params, theta, p_constant(params, i), literal_unstarred);
}

/// tau = (1 + theta C_yx) / (1 + theta C_x^2).
inline double tau(const PopulationParams& p, double theta) {
    check_theta(theta);
    return (1.0 + theta * p.Cyx) / (1.0 + theta * p.Cx * p.Cx);
}

struct KcAlpha {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
};

inline KcAlpha kc_alpha_opt(const PopulationParams& p, double theta) {
    const double t = tau(p, theta);
    const double by = p.beta2y_star, bx = p.beta2x_star, l = p.lambda22_star;
    const double num = by * (t - 1.0) + bx * t + (1.0 - 2.0 * t) * l;
    const double den = by * ((1.0 - t) * (1.0 - t) / t) + 2.0 * l * (1.0 - t) + bx * t;
    if (den == 0.0 || !std::isfinite(den)) throw Error(ErrorKind::SingularOptimum, "combined KC weight denominator is zero");
    const double a1 = num / den;
    return {a1, 1.0 - a1};
}

/// theta S_y^4 [z^2 b*_2y + a2^2 tau^2 b*_2x - 2 tau z a2 l*_22], z = a1 + a2 tau.
inline double mse_kc_combined_at(const PopulationParams& p, double theta, double alpha1, double t) {
    check_theta(theta);
    const double a2 = 1.0 - alpha1;
    const double z = alpha1 + a2 * t;
    return theta * p.Sy4() *
           (z * z * p.beta2y_star + a2 * a2 * t * t * p.beta2x_star - 2.0 * t * z * a2 * p.lambda22_star);
}

// ---------------------------------------------------------------------------
// Two-weight quadratic models
//
// Both the Gupta-Shabbir class and the proposed T lead to
//   MSE / S_y^4 = 1 + a^2 P11 + b^2 P22 + 2 a b P12 - 2 a q1 - 2 b q2
// in (scaled) weights (a, b).

struct QuadraticOptimum {
    double a = 0.0;
    double b = 0.0;
    double min_factor = 0.0;  // MSE / S_y^4 at (a, b)
    bool breakdown = false;
};

inline double quadratic_factor(double P11, double P22, double P12, double q1, double q2, double a, double b) {
    return 1.0 + a * a * P11 + b * b * P22 + 2.0 * a * b * P12 - 2.0 * a * q1 - 2.0 * b * q2;
}

inline QuadraticOptimum solve_quadratic(double P11, double P22, double P12, double q1, double q2, const char* what) {
    const double det = P11 * P22 - P12 * P12;
    const double scale = std::abs(P11 * P22) + P12 * P12;
    if (!std::isfinite(det) || std::abs(det) <= 1e-12 * scale)
        throw Error(ErrorKind::SingularOptimum, std::string(what) + ": weight system is singular");
    QuadraticOptimum o;
    o.a = (P22 * q1 - P12 * q2) / det;
    o.b = (P11 * q2 - P12 * q1) / det;
    o.min_factor = 1.0 - (P22 * q1 * q1 - 2.0 * P12 * q1 * q2 + P11 * q2 * q2) / det;
    o.breakdown = !(o.min_factor > 0.0) || !(P11 > 0.0) || !(det > 0.0);
    return o;
}

struct GsCoefficients {
    double A1, A2, A3, A4, A5;
};

inline GsCoefficients gs_coefficients(const PopulationParams& p, double theta, double alpha) {
    check_theta(theta);
    const double by = p.beta2y_star, bx = p.beta2x_star, l = p.lambda22_star;
    return {
        1.0 + theta * (by + alpha * bx - 4.0 * alpha * l),
        theta * bx,
        theta * (2.0 * alpha * bx - l),
        1.0 - alpha * theta * (l + (alpha - 1.0) / 2.0 * bx),
        alpha * theta * bx,
    };
}

/// MSE at explicit (d1, d2).
inline double gs_mse(const PopulationParams& p, double theta, const GuptaShabbirPR& gs) {
    const auto A = gs_coefficients(p, theta, gs.alpha);
    const double g = gs.d2 * p.Sx2 / p.Sy2;
    return p.Sy4() * quadratic_factor(A.A1, A.A2, A.A3, A.A4, A.A5, gs.d1, g);
}

struct GsOptimum {
    double d1 = 0.0;
    double d2 = 0.0;
    double d2_scaled = 0.0;  ///< g = d2 S_x^2 / S_y^2
    double min_mse = 0.0;
    bool breakdown = false;
};

inline GsOptimum gs_optimal(const PopulationParams& p, double theta, double alpha) {
    const auto A = gs_coefficients(p, theta, alpha);
    const auto q = solve_quadratic(A.A1, A.A2, A.A3, A.A4, A.A5, "Gupta-Shabbir");
    return {q.a, q.b * p.Sy2 / p.Sx2, q.b, p.Sy4() * q.min_factor, q.breakdown};
}

struct TCoefficients {
    double B1, B2, B3, B4, B5;
};

inline TCoefficients t_coefficients(const PopulationParams& p, double theta, double m, double w, double A,
                                    MseFormulaVariant variant) {
    check_theta(theta);
    const double by = p.beta2y_star, bx = p.beta2x_star, l = p.lambda22_star;
    const double mm = m * (m - 1.0) / 2.0;
    const double ww = w * (w - 1.0) / 2.0;
    const double B2 = 1.0 + theta * (by + w * bx - 4.0 * w * l);
    const double B5 = 1.0 - theta * (ww * bx + w * l);
    if (variant == MseFormulaVariant::AsPrinted) {
        return {
            1.0 + theta * (by + m * A * A * bx - 4.0 * m * A * l),
            B2,
            1.0 + theta * (bx * (m * w * A - ww - mm) + by - 2.0 * w * l - 2.0 * m * A * l),
            1.0 - theta * (A * A * mm * bx + m * A * l),
            B5,
        };
    }
    return {
        1.0 + theta * (by + m * (2.0 * m - 1.0) * A * A * bx - 4.0 * m * A * l),
        B2,
        1.0 + theta * (by + bx * (m * w * A - ww + mm * A * A) - 2.0 * (w + m * A) * l),
        1.0 + theta * (mm * A * A * bx - m * A * l),
        B5,
    };
}

inline double t_mse_factor(const TCoefficients& B, double w1, double w2) {
    return quadratic_factor(B.B1, B.B2, B.B3, B.B4, B.B5, w1, w2);
}

/// MSE at the weights carried by the spec.
inline double t_mse(const PopulationParams& p, double theta, const ProposedT& t, MseFormulaVariant variant) {
    validate(EstimatorSpec{t});
    const auto B = t_coefficients(p, theta, t.m, t.w, t.A(), variant);
    return p.Sy4() * t_mse_factor(B, t.w1, t.w2);
}

inline std::string label(const SpecRequest& req) {
    return std::visit(
        [&](const auto& s) -> std::string {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Usual>) return "s_y^2 (usual)";
            else if constexpr (std::is_same_v<S, IsakiRatio>) return "S_R^2 (Isaki ratio)";
            else if constexpr (std::is_same_v<S, Regression>)
                return req.optimal ? "S_Reg^2 (regression, b_opt)" : "S_Reg^2 (regression, b=" + significant(s.b) + ")";
            else if constexpr (std::is_same_v<S, KadilarCingi>) return "S_KC" + std::to_string(s.index()) + "^2";
            else if constexpr (std::is_same_v<S, KCCombined>)
                return req.optimal ? "S_KC^2 (combined, optimal alpha)" : "S_KC^2 (combined, alpha1=" + significant(s.alpha1) + ")";
            else if constexpr (std::is_same_v<S, GuptaShabbirPR>)
                return "S_PR^2 (alpha=" + significant(s.alpha) + (req.optimal ? ", optimal d)" : ")");
            else
                return "T (m=" + significant(s.m) + ", w=" + significant(s.w) + ", c=" + significant(s.c) +
                       ", d=" + significant(s.d) + (req.optimal ? ", optimal w)" : ")");
        },
        req.spec);
}

inline MseReport make_report(EstimatorSpec spec, double mse, MseFormulaVariant variant, std::optional<Weights> weights,
                             bool breakdown, double reference_var) {
    MseReport r;
    r.estimator = to_string(spec);
    r.label = label(SpecRequest{spec, weights.has_value()});
    r.spec = std::move(spec);
    r.mse = mse;
    r.variant = variant;
    r.weights = std::move(weights);
    r.breakdown = breakdown;
    r.relative_efficiency = mse > 0.0 ? reference_var / mse : std::nan("");
    return r;
}

/// Unconstrained optimum over (w1, w2).
inline MseReport t_optimal(const PopulationParams& p, double theta, double m, double w, double c, double d,
                           MseFormulaVariant variant) {
    ProposedT t{m, w, c, d, 0.0, 0.0};
    validate(EstimatorSpec{t});
    const auto B = t_coefficients(p, theta, m, w, t.A(), variant);
    const auto q = solve_quadratic(B.B1, B.B2, B.B3, B.B4, B.B5, "proposed T");
    t.w1 = q.a;
    t.w2 = q.b;
    return make_report(t, p.Sy4() * q.min_factor, variant, Weights{"w1", q.a, "w2", q.b}, q.breakdown,
                       var_usual(p, theta));
}

/// Optimum restricted to w1 + w2 = 1 (a one-dimensional quadratic in w1).
inline MseReport t_optimal_constrained(const PopulationParams& p, double theta, double m, double w, double c, double d,
                                       MseFormulaVariant variant) {
    ProposedT t{m, w, c, d, 0.0, 0.0};
    validate(EstimatorSpec{t});
    const auto B = t_coefficients(p, theta, m, w, t.A(), variant);
    const double curvature = B.B1 + B.B2 - 2.0 * B.B3;
    const double scale = std::abs(B.B1) + std::abs(B.B2) + 2.0 * std::abs(B.B3);
    if (!std::isfinite(curvature) || std::abs(curvature) <= 1e-12 * scale)
        throw Error(ErrorKind::SingularOptimum, "proposed T (w1 + w2 = 1): flat objective");
    t.w1 = (B.B2 - B.B3 + B.B4 - B.B5) / curvature;
    t.w2 = 1.0 - t.w1;
    const double factor = t_mse_factor(B, t.w1, t.w2);
    return make_report(t, p.Sy4() * factor, variant, Weights{"w1", t.w1, "w2", t.w2},
                       !(factor > 0.0) || !(curvature > 0.0), var_usual(p, theta));
}

inline MseReport mse_kc_combined(const PopulationParams& p, double theta) {
    const auto a = kc_alpha_opt(p, theta);
    const double t = tau(p, theta);
    return make_report(KCCombined{a.alpha1, t}, mse_kc_combined_at(p, theta, a.alpha1, t), MseFormulaVariant::AsPrinted,
                       Weights{"alpha1", a.alpha1, "alpha2", a.alpha2}, false, var_usual(p, theta));
}

// ---------------------------------------------------------------------------
// Dispatch

/// First-order MSE of a fully specified estimator.
inline double theoretical_mse(const EstimatorSpec& spec, const PopulationParams& p, double theta,
                              MseFormulaVariant variant = MseFormulaVariant::AsPrinted) {
    return std::visit(
        [&](const auto& s) -> double {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, Usual>) return var_usual(p, theta);
            else if constexpr (std::is_same_v<S, IsakiRatio>) return mse_ratio(p, theta);
            else if constexpr (std::is_same_v<S, Regression>) return mse_regression_at(p, theta, s.b);
            else if constexpr (std::is_same_v<S, KadilarCingi>) return mse_kc(p, theta, s.index());
            else if constexpr (std::is_same_v<S, KCCombined>) return mse_kc_combined_at(p, theta, s.alpha1, s.tau);
            else if constexpr (std::is_same_v<S, GuptaShabbirPR>) return gs_mse(p, theta, s);
            else return t_mse(p, theta, s, variant);
        },
        spec);
}

/// Computes the MSE report of one request, filling optimal weights when asked.
inline MseReport evaluate_request(const SpecRequest& req, const PopulationParams& p, double theta,
                                  MseFormulaVariant variant) {
    const double v0 = var_usual(p, theta);
    MseReport r;
    if (!req.optimal) {
        EstimatorSpec spec = req.spec;
        if (req.tau_from_design) std::get<KCCombined>(spec).tau = tau(p, theta);
        r = make_report(spec, theoretical_mse(spec, p, theta, variant), variant, std::nullopt, false, v0);
    } else {
        r = std::visit(
            [&](const auto& s) -> MseReport {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, Regression>) {
                    const double b = regression_b_opt(p);
                    return make_report(Regression{b}, mse_regression(p, theta), variant, Weights{"b", b, "", {}}, false,
                                       v0);
                } else if constexpr (std::is_same_v<S, KCCombined>) {
                    auto rep = mse_kc_combined(p, theta);
                    rep.variant = variant;
                    return rep;
                } else if constexpr (std::is_same_v<S, GuptaShabbirPR>) {
                    const auto o = gs_optimal(p, theta, s.alpha);
                    return make_report(GuptaShabbirPR{s.alpha, o.d1, o.d2}, o.min_mse, variant,
                                       Weights{"d1", o.d1, "d2", o.d2}, o.breakdown, v0);
                } else if constexpr (std::is_same_v<S, ProposedT>) {
                    return t_optimal(p, theta, s.m, s.w, s.c, s.d, variant);
                } else {
                    throw Error(ErrorKind::InvalidSpec, "no optimal weights for this estimator");
                }
            },
            req.spec);
    }
    r.label = label(req);
    return r;
}

/// Resolves `opt` and design-dependent tau into a concrete estimator.
inline EstimatorSpec resolve(const SpecRequest& req, const PopulationParams& p, double theta,
                             MseFormulaVariant variant = MseFormulaVariant::AsPrinted) {
    if (!req.optimal && !req.tau_from_design) return req.spec;
    return *evaluate_request(req, p, theta, variant).spec;
}

/// One report per request, in order. A failing request yields an errored row
/// instead of aborting the table.
inline std::vector<MseReport> compare_table(const PopulationParams& p, double theta,
                                            const std::vector<SpecRequest>& requests, MseFormulaVariant variant) {
    std::vector<MseReport> rows;
    rows.reserve(requests.size());
    for (const auto& req : requests) {
        try {
            rows.push_back(evaluate_request(req, p, theta, variant));
        } catch (const Error& e) {
            MseReport r;
            r.estimator = to_string(req);
            r.label = label(req);
            r.variant = variant;
            r.error = e.what();
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

/// The comparison roster in reference-table order (proposed-T rows are added by the caller).
inline std::vector<SpecRequest> default_roster() {
    return parse_spec_list("usual;ratio;kc:1;kc:2;kc:3;kc:4;kcc:opt;reg:opt;gs:alpha=0,opt;gs:alpha=1,opt;gs:alpha=-1,opt");
}

}  // namespace varest
