#pragma once

// Grid search over the generator constants (m, w, c, d) of the proposed T,
// with the inner (w1, w2) minimization in closed form.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "estimators.hpp"
#include "mse.hpp"
#include "numeric.hpp"
#include "population.hpp"

namespace varest {

struct TuningGrid {
    std::vector<double> m;
    std::vector<double> w;
    std::vector<std::pair<double, double>> cd;
};

struct RefineOptions {
    std::size_t top_k = 5;
    unsigned passes = 2;
};

/// How the weights (w1, w2) of a tuning point were chosen.
enum class WeightMode { Optimal, SumToOne, Fixed };

inline constexpr std::string_view to_string(WeightMode m) noexcept {
    switch (m) {
        case WeightMode::Optimal: return "optimal";
        case WeightMode::SumToOne: return "w1+w2=1";
        case WeightMode::Fixed: return "fixed";
    }
    return "";
}

struct TuningPoint {
    ProposedT spec;  // includes the weights used
    MseReport report;
    WeightMode mode = WeightMode::Optimal;
};

inline TuningGrid default_grid(const PopulationParams& p) {
    return {
        {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0},
        {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0},
        {{2.0, 1.0}, {p.beta2x, p.Cx}, {p.Cx, p.beta2x}, {1.0, p.beta2x}, {1.0, p.Cx}},
    };
}

/// "a:b:step" (inclusive) or a comma-separated list of values.
inline std::vector<double> parse_range(std::string_view text) {
    auto fail = [&] { return Error(ErrorKind::InvalidSpec, "bad range '" + std::string(text) + "'"); };
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= text.size(); ++i) {
            if (i == text.size() || text[i] == ':') {
                auto v = detail::parse_double(text.substr(start, i - start));
                if (!v) throw fail();
                parts.push_back(*v);
                start = i + 1;
            }
        }
        if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) throw fail();
        const auto steps = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
        for (long k = 0; k <= steps; ++k) out.push_back(parts[0] + static_cast<double>(k) * parts[2]);
        return out;
    }
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',') {
            auto v = detail::parse_double(text.substr(start, i - start));
            if (!v) throw fail();
            out.push_back(*v);
            start = i + 1;
        }
    }
    return out;
}

/// "c,d;c,d;..." pairs.
inline std::vector<std::pair<double, double>> parse_cd_pairs(std::string_view text) {
    std::vector<std::pair<double, double>> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ';') {
            const auto item = text.substr(start, i - start);
            start = i + 1;
            if (detail::trim(item).empty()) continue;
            const auto values = parse_range(item);
            if (values.size() != 2) throw Error(ErrorKind::InvalidSpec, "bad c,d pair '" + std::string(item) + "'");
            out.emplace_back(values[0], values[1]);
        }
    }
    return out;
}

/// Grid file: {"m": [...], "w": [...], "cd": [[c, d], ...]}.
inline TuningGrid load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, "cannot open '" + path + "'");
    try {
        const auto doc = nlohmann::json::parse(in);
        TuningGrid g;
        g.m = doc.at("m").get<std::vector<double>>();
        g.w = doc.at("w").get<std::vector<double>>();
        for (const auto& pair : doc.at("cd")) g.cd.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
        return g;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidSpec, "grid file '" + path + "': " + e.what());
    }
}

namespace detail {

inline double min_gap(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    double gap = 0.0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const double g = v[i] - v[i - 1];
        if (gap == 0.0 || g < gap) gap = g;
    }
    return gap;
}

inline bool ranks_before(const TuningPoint& a, const TuningPoint& b) {
    const auto key = [](const TuningPoint& p) {
        return std::make_tuple(p.report.breakdown, p.report.mse, p.spec.m, p.spec.w, p.spec.c, p.spec.d, p.mode,
                               p.spec.w1, p.spec.w2);
    };
    return key(a) < key(b);
}

}  // namespace detail

/// Ranked grid points: valid optima by increasing MSE, then breakdown points.
/// Points whose weight system is singular have no optimum and are dropped.
inline std::vector<TuningPoint> minimize_t(const PopulationParams& p, double theta, const TuningGrid& grid,
                                           MseFormulaVariant variant, bool constrained = false,
                                           const RefineOptions& refine = {}) {
    std::vector<std::pair<double, double>> cd;
    for (const auto& pair : grid.cd)
        if (pair.first != pair.second) cd.push_back(pair);
    if (grid.m.empty() || grid.w.empty() || cd.empty())
        throw Error(ErrorKind::EmptyGrid, "no (m, w, c, d) point with c != d");

    std::vector<TuningPoint> points;
    std::set<std::tuple<double, double, double, double, bool>> seen;
    auto visit = [&](double m, double w, double c, double d, bool restricted) {
        if (!seen.emplace(m, w, c, d, restricted).second) return;
        try {
            auto report = restricted ? t_optimal_constrained(p, theta, m, w, c, d, variant)
                                     : t_optimal(p, theta, m, w, c, d, variant);
            auto spec = std::get<ProposedT>(*report.spec);
            report.label = label(SpecRequest{spec, true}) + (restricted ? " [w1+w2=1]" : "");
            points.push_back({spec, std::move(report), restricted ? WeightMode::SumToOne : WeightMode::Optimal});
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::SingularOptimum) throw;
        }
    };
    auto visit_both = [&](double m, double w, double c, double d) {
        visit(m, w, c, d, false);
        if (constrained) visit(m, w, c, d, true);
    };

    for (double m : grid.m)
        for (double w : grid.w)
            for (const auto& [c, d] : cd) visit_both(m, w, c, d);

    double hm = detail::min_gap(grid.m);
    double hw = detail::min_gap(grid.w);
    for (unsigned pass = 0; pass < refine.passes && (hm > 0.0 || hw > 0.0); ++pass) {
        hm /= 2.0;
        hw /= 2.0;
        std::sort(points.begin(), points.end(), detail::ranks_before);
        std::vector<TuningPoint> top;
        for (const auto& pt : points) {
            if (top.size() == refine.top_k || pt.report.breakdown) break;
            top.push_back(pt);
        }
        for (const auto& pt : top)
            for (int dm = -1; dm <= 1; ++dm)
                for (int dw = -1; dw <= 1; ++dw)
                    visit(pt.spec.m + dm * hm, pt.spec.w + dw * hw, pt.spec.c, pt.spec.d,
                          pt.mode == WeightMode::SumToOne);
    }

    std::sort(points.begin(), points.end(), detail::ranks_before);
    return points;
}

/// Grid points whose MSE lies within a relative `tolerance` of `target_mse`.
/// Candidates are the valid optima of minimize_t and, when `fixed_weights` is
/// set, the single-term members (w1, w2) = (1, 0) and (0, 1) at every grid point.
inline std::vector<TuningPoint> recover(const PopulationParams& p, double theta, double target_mse,
                                        const TuningGrid& grid, MseFormulaVariant variant, double tolerance,
                                        bool constrained = false, bool fixed_weights = true) {
    if (!(target_mse > 0.0)) throw Error(ErrorKind::InvalidSpec, "target MSE must be positive");
    const auto close = [&](double mse) { return std::abs(mse - target_mse) <= tolerance * target_mse; };
    std::vector<TuningPoint> matches;
    for (auto& pt : minimize_t(p, theta, grid, variant, constrained))
        if (!pt.report.breakdown && close(pt.report.mse)) matches.push_back(std::move(pt));
    if (fixed_weights) {
        const double v0 = var_usual(p, theta);
        for (double m : grid.m)
            for (double w : grid.w)
                for (const auto& [c, d] : grid.cd) {
                    if (c == d) continue;
                    for (const auto& [w1, w2] : {std::pair{1.0, 0.0}, std::pair{0.0, 1.0}}) {
                        const ProposedT t{m, w, c, d, w1, w2};
                        const double mse = t_mse(p, theta, t, variant);
                        if (!close(mse)) continue;
                        auto report = make_report(t, mse, variant, Weights{"w1", w1, "w2", w2}, !(mse > 0.0), v0);
                        report.label = label(SpecRequest{t, false});
                        matches.push_back({t, std::move(report), WeightMode::Fixed});
                    }
                }
    }
    std::sort(matches.begin(), matches.end(), detail::ranks_before);
    return matches;
}

}  // namespace varest
