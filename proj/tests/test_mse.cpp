#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace varest;
using namespace varest::test;

namespace {

constexpr double kTablePct = 1e-3;  // 0.1 % relative

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected varest::Error";
    return ErrorKind::InvariantViolation;
}

void expect_coefficients_near(const TCoefficients& a, const TCoefficients& b, double tol) {
    EXPECT_LE(std::abs(a.B1 - b.B1), tol * std::max(1.0, std::abs(b.B1)));
    EXPECT_LE(std::abs(a.B2 - b.B2), tol * std::max(1.0, std::abs(b.B2)));
    EXPECT_LE(std::abs(a.B3 - b.B3), tol * std::max(1.0, std::abs(b.B3)));
    EXPECT_LE(std::abs(a.B4 - b.B4), tol * std::max(1.0, std::abs(b.B4)));
    EXPECT_LE(std::abs(a.B5 - b.B5), tol * std::max(1.0, std::abs(b.B5)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Closed forms on the apple-production parameters

TEST(VarUsual, Examples) {
    EXPECT_LE(rel(var_usual(apple(), apple_theta()), 11627.2), kTablePct);
    EXPECT_EQ(var_usual(apple(), 0.0), 0.0);
    EXPECT_NEAR(var_usual(derive_params(tiny()), 1.0 / 6.0), 1.0 / 12.0, 1e-16);
    EXPECT_EQ(kind_of([] { var_usual(apple(), -0.1); }), ErrorKind::InvalidDesign);
}

TEST(MseRatio, Examples) {
    EXPECT_LE(rel(mse_ratio(apple(), apple_theta()), 3927.166), kTablePct);
    EXPECT_NEAR(mse_ratio(derive_params(tiny()), 1.0 / 6.0), 0.0, 1e-16);
    EXPECT_EQ(mse_ratio(apple(), 0.0), 0.0);
}

TEST(MseRegression, Examples) {
    const auto p = apple();
    const double v = mse_regression(p, apple_theta());
    EXPECT_LE(rel(v, 3486.4), 5e-3);
    EXPECT_GT(rel(v, 3927.178), 0.1);
    EXPECT_NEAR(mse_regression(derive_params(tiny()), 1.0 / 6.0), 0.0, 1e-16);
    auto q = p;
    q.lambda22_star = 0.0;
    EXPECT_DOUBLE_EQ(mse_regression(q, apple_theta()), var_usual(q, apple_theta()));
}

TEST(MseRegression, BOptAttainsClosedFormMinimum) {
    const auto p = apple();
    const double th = apple_theta();
    const double b = regression_b_opt(p);
    EXPECT_LE(rel(mse_regression_at(p, th, b), mse_regression(p, th)), 1e-10);
    EXPECT_GT(mse_regression_at(p, th, 1.01 * b), mse_regression(p, th));
    EXPECT_GT(mse_regression_at(p, th, 0.99 * b), mse_regression(p, th));
}

TEST(RegressionBOpt, Examples) {
    EXPECT_NEAR(regression_b_opt(derive_params(tiny())), 0.25, 1e-16);
    EXPECT_LE(rel(regression_b_opt(apple()), 13.398 * 136.188 / (16.516 * 5.30338e8)), 1e-4);
    auto q = apple();
    q.lambda22_star = 0.0;
    EXPECT_EQ(regression_b_opt(q), 0.0);
    q.beta2x_star = 0.0;
    EXPECT_EQ(kind_of([&] { regression_b_opt(q); }), ErrorKind::DegenerateAuxiliary);
}

TEST(PConstant, Examples) {
    const auto p = apple();
    EXPECT_LE(rel(1.0 - p_constant(p, 1), 3.117e-9), 1e-3);
    EXPECT_LE(rel(1.0 - p_constant(p, 2), 3.303e-8), 1e-3);
    auto q = p;
    q.Cx = 0.0;
    EXPECT_EQ(p_constant(q, 1), 1.0);
    for (int i = 1; i <= 4; ++i) {
        EXPECT_GT(p_constant(p, i), 0.0);
        EXPECT_LE(p_constant(p, i), 1.0);
    }
}

TEST(MseKc, Examples) {
    const auto p = apple();
    const double th = apple_theta();
    for (int i = 1; i <= 4; ++i) EXPECT_LE(rel(mse_kc(p, th, i), 3927.178), kTablePct) << i;
    EXPECT_NEAR(mse_kc(p, th, 1, true), 4676.0, 5.0);  // literal unstarred reading, refuted by the table
    EXPECT_DOUBLE_EQ(mse_kc_at(p, th, 1.0), mse_ratio(p, th));
    EXPECT_EQ(mse_kc(p, 0.0, 3), 0.0);
}

TEST(Tau, Examples) {
    const auto p = apple();
    EXPECT_NEAR(tau(p, apple_theta()), 0.997658, 2e-6);
    EXPECT_EQ(tau(p, 0.0), 1.0);
    auto q = p;
    q.Cyx = q.Cx * q.Cx;
    EXPECT_DOUBLE_EQ(tau(q, 0.37), 1.0);
}

TEST(KcAlphaOpt, Examples) {
    const auto p = apple();
    const auto a = kc_alpha_opt(p, apple_theta());
    EXPECT_NEAR(a.alpha1, 0.18777, 5e-5);
    EXPECT_NEAR(a.alpha2, 0.81223, 5e-5);
    EXPECT_DOUBLE_EQ(a.alpha1 + a.alpha2, 1.0);
    auto q = p;
    q.Cyx = q.Cx * q.Cx;  // tau = 1
    const auto b = kc_alpha_opt(q, apple_theta());
    EXPECT_NEAR(b.alpha1, (q.beta2x_star - q.lambda22_star) / q.beta2x_star, 1e-14);
}

TEST(KcAlphaOpt, MinimizesCombinedMseInAlpha) {
    // With tau fixed, the reported alpha1 is the argmin of the combined MSE.
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = random_params(seed);
        const double th = theta(10, p.N);
        const double t = tau(p, th);
        const double a1 = kc_alpha_opt(p, th).alpha1;
        const double h = 1e-4 * std::max(1.0, std::abs(a1));
        const double f0 = mse_kc_combined_at(p, th, a1, t);
        const double slope = (mse_kc_combined_at(p, th, a1 + h, t) - mse_kc_combined_at(p, th, a1 - h, t)) / (2 * h);
        EXPECT_LE(std::abs(slope), 1e-6 * f0 / std::max(1.0, std::abs(a1))) << seed;
        EXPECT_LE(f0, mse_kc_combined_at(p, th, a1 + 0.05, t));
        EXPECT_LE(f0, mse_kc_combined_at(p, th, a1 - 0.05, t));
    }
}

TEST(MseKcCombined, Examples) {
    const auto p = apple();
    const auto r = mse_kc_combined(p, apple_theta());
    EXPECT_LE(rel(r.mse, 3473.024), kTablePct);
    ASSERT_TRUE(r.weights.has_value());
    EXPECT_EQ(r.weights->first_name, "alpha1");
    EXPECT_DOUBLE_EQ(mse_kc_combined_at(p, apple_theta(), 1.0, 1.0), var_usual(p, apple_theta()));
    EXPECT_EQ(mse_kc_combined(p, 0.0).mse, 0.0);
}

// ---------------------------------------------------------------------------
// Gupta-Shabbir class

TEST(GsCoefficients, AppleAlphaZero) {
    const auto A = gs_coefficients(apple(), apple_theta(), 0.0);
    EXPECT_NEAR(A.A1, 1.6269, 5e-5);
    EXPECT_NEAR(A.A2, 0.66699, 5e-6);
    EXPECT_NEAR(A.A3, -0.54107, 5e-6);
    EXPECT_EQ(A.A4, 1.0);
    EXPECT_EQ(A.A5, 0.0);
    const auto Z = gs_coefficients(apple(), 0.0, 0.7);
    EXPECT_EQ(Z.A1, 1.0);
    EXPECT_EQ(Z.A4, 1.0);
    EXPECT_EQ(Z.A2, 0.0);
    EXPECT_EQ(Z.A3, 0.0);
    EXPECT_EQ(Z.A5, 0.0);
}

TEST(GsCoefficients, MatchSecondOrderExpansion) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto p = random_params(seed);
        const double th = theta(5 + seed, p.N);
        for (double alpha : {-2.0, -1.0, -0.3, 0.0, 0.5, 1.0, 2.5}) {
            const auto a = gs_coefficients(p, th, alpha);
            const auto b = expanded_gs_coefficients(p, th, alpha);
            EXPECT_NEAR(a.A1, b.A1, 1e-12);
            EXPECT_NEAR(a.A2, b.A2, 1e-12);
            EXPECT_NEAR(a.A3, b.A3, 1e-12);
            EXPECT_NEAR(a.A4, b.A4, 1e-12);
            EXPECT_NEAR(a.A5, b.A5, 1e-12);
        }
    }
}

TEST(GsOptimal, AppleRows) {
    const auto p = apple();
    const double th = apple_theta();
    const auto g0 = gs_optimal(p, th, 0.0);
    EXPECT_LE(rel(g0.min_mse, 2934.649), kTablePct);
    EXPECT_FALSE(g0.breakdown);
    const auto g1 = gs_optimal(p, th, 1.0);
    EXPECT_LE(rel(g1.min_mse, 8721.148), kTablePct);
    const auto gm = gs_optimal(p, th, -1.0);
    EXPECT_LE(rel(gm.min_mse, 14832.09), kTablePct);
    // The alpha = +-1 stationary points are saddles of an indefinite quadratic.
    EXPECT_TRUE(g1.breakdown);
    EXPECT_TRUE(gm.breakdown);
}

TEST(GsOptimal, AlphaZeroEqualsTwoWeightRegressionOptimum) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = random_params(seed);
        const double th = theta(8, p.N);
        const double v = th * p.beta2y_star * (1.0 - p.rho_star * p.rho_star);
        EXPECT_LE(rel(gs_optimal(p, th, 0.0).min_mse, p.Sy4() * v / (1.0 + v)), 1e-10) << seed;
    }
}

TEST(GsOptimal, NotWorseThanUnitWeights) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = random_params(seed);
        const double th = theta(12, p.N);
        for (double alpha : {0.0, 0.5, 1.0}) {
            const auto g = gs_optimal(p, th, alpha);
            if (g.breakdown) continue;
            EXPECT_LE(g.min_mse, gs_mse(p, th, {alpha, 1.0, 0.0}) * (1 + 1e-12));
            EXPECT_LE(g.min_mse, var_usual(p, th) * (1 + 1e-12));
        }
    }
}

TEST(GsOptimal, WeightsReproduceMinimum) {
    const auto p = apple();
    const auto g = gs_optimal(p, apple_theta(), 0.0);
    EXPECT_LE(rel(gs_mse(p, apple_theta(), {0.0, g.d1, g.d2}), g.min_mse), 1e-9);
    EXPECT_LE(rel(g.d2_scaled, g.d2 * p.Sx2 / p.Sy2), 1e-14);
}

// ---------------------------------------------------------------------------
// Proposed T

TEST(TCoefficients, AppleAsPrinted) {
    const auto B = t_coefficients(apple(), apple_theta(), -1.0, 1.0, 1.0, MseFormulaVariant::AsPrinted);
    EXPECT_NEAR(B.B1, 3.1242, 5e-5);
    EXPECT_NEAR(B.B2, 0.12959, 5e-6);
    EXPECT_NEAR(B.B3, 0.29290, 2e-5);
    EXPECT_NEAR(B.B4, 0.87408, 5e-6);
    EXPECT_NEAR(B.B5, 0.45893, 5e-6);
}

TEST(TCoefficients, RederivedMatchesSecondOrderExpansion) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto p = random_params(seed);
        const double th = theta(6 + seed % 20, p.N);
        for (double m : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0})
            for (double w : {-1.0, 0.0, 0.5, 1.0, 2.0})
                for (double A : {0.25, 1.0, -3.0})
                    expect_coefficients_near(t_coefficients(p, th, m, w, A, MseFormulaVariant::Rederived),
                                             expanded_t_coefficients(p, th, m, w, A), 1e-12);
    }
}

TEST(TCoefficients, AsPrintedDepartsFromExpansionOnlyThroughCurvatureTerms) {
    const auto p = apple();
    const double th = apple_theta();
    const auto printed = t_coefficients(p, th, -1.0, 1.0, 1.0, MseFormulaVariant::AsPrinted);
    const auto expanded = expanded_t_coefficients(p, th, -1.0, 1.0, 1.0);
    EXPECT_GT(std::abs(printed.B1 - expanded.B1), 0.1);
    EXPECT_GT(std::abs(printed.B4 - expanded.B4), 0.1);
    EXPECT_NEAR(printed.B2, expanded.B2, 1e-12);
    EXPECT_NEAR(printed.B5, expanded.B5, 1e-12);
}

TEST(TCoefficients, VariantsAgreeWhenCurvatureVanishes) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = random_params(seed);
        const double th = theta(9, p.N);
        for (double m : {0.0, 1.0})
            for (double w : {-1.5, 0.5, 2.0})
                for (double A : {0.2, 1.0, 4.0}) {
                    const auto a = t_coefficients(p, th, m, w, A, MseFormulaVariant::AsPrinted);
                    const auto b = t_coefficients(p, th, m, w, A, MseFormulaVariant::Rederived);
                    // B3's printed m(m-1)/2 term lacks A^2 but vanishes with m(m-1).
                    expect_coefficients_near(a, b, 1e-14);
                }
    }
}

TEST(TMse, FixedWeightReductions) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = random_params(seed);
        const double th = theta(7, p.N);
        for (auto variant : {MseFormulaVariant::AsPrinted, MseFormulaVariant::Rederived}) {
            // m = 0 with w1 = 1, w2 = 0 is the usual estimator.
            EXPECT_LE(rel(t_mse(p, th, {0.0, 1.7, 3.0, 1.0, 1.0, 0.0}, variant), var_usual(p, th)), 1e-10);
            // m A = 1: m = 1, A = 1 (c = 2, d = 1) and m = 2, A = 1/2 (c = 3, d = 1).
            EXPECT_LE(rel(t_mse(p, th, {1.0, 0.3, 2.0, 1.0, 1.0, 0.0}, variant), mse_ratio(p, th)), 1e-10);
            EXPECT_LE(rel(t_mse(p, th, {2.0, 0.3, 3.0, 1.0, 1.0, 0.0}, variant), mse_ratio(p, th)), 1e-10);
        }
    }
}

TEST(TMse, FixedWeightMseIsVariantIndependent) {
    // With w1 = 1, w2 = 0 the variants differ only in B4 - 1 (the bias), not in MSE.
    const auto p = apple();
    const double th = apple_theta();
    for (double m : {-2.0, -1.0, 0.5, 2.0, 3.0}) {
        const ProposedT t{m, 1.0, 5.0, 1.0, 1.0, 0.0};
        const double a = t_mse(p, th, t, MseFormulaVariant::AsPrinted);
        const double b = t_mse(p, th, t, MseFormulaVariant::Rederived);
        const double A = t.A();
        EXPECT_LE(rel(a, b), 1e-12) << m;
        EXPECT_LE(rel(b, th * p.Sy4() *
                             (p.beta2y_star + m * m * A * A * p.beta2x_star - 2.0 * m * A * p.lambda22_star)),
                  1e-10);
    }
}

TEST(TOptimal, AppleBreakdownExample) {
    const auto r = t_optimal(apple(), apple_theta(), -1.0, 1.0, 2.0, 1.0, MseFormulaVariant::AsPrinted);
    ASSERT_TRUE(r.weights.has_value());
    EXPECT_NEAR(r.weights->first, -0.06628, 2e-4);
    EXPECT_NEAR(*r.weights->second, 3.69122, 1e-3);
    EXPECT_LT(r.mse, 0.0);
    EXPECT_LE(rel(r.mse, -11798.0), 1e-3);
    EXPECT_TRUE(r.breakdown);
    EXPECT_EQ(r.variant, MseFormulaVariant::AsPrinted);
}

TEST(TOptimal, CensusIsSingular) {
    EXPECT_EQ(kind_of([] { t_optimal(apple(), 0.0, -1.0, 1.0, 2.0, 1.0, MseFormulaVariant::Rederived); }),
              ErrorKind::SingularOptimum);
    EXPECT_EQ(kind_of([] { t_optimal(apple(), 0.1, -1.0, 1.0, 2.0, 2.0, MseFormulaVariant::Rederived); }),
              ErrorKind::InvalidSpec);
}

TEST(TOptimal, SingleTermOptimumWhenSecondWeightFixedAtZero) {
    const auto p = apple();
    const double th = apple_theta();
    const auto B = t_coefficients(p, th, 0.0, 1.0, 1.0, MseFormulaVariant::AsPrinted);
    const double w1 = B.B4 / B.B1;
    const double at = p.Sy4() * t_mse_factor(B, w1, 0.0);
    EXPECT_LE(rel(at, p.Sy4() * (1.0 - B.B4 * B.B4 / B.B1)), 1e-12);
    EXPECT_LT(at, p.Sy4() * t_mse_factor(B, w1 * 1.001, 0.0));
    EXPECT_LT(at, p.Sy4() * t_mse_factor(B, w1 * 0.999, 0.0));
}

TEST(TOptimal, MinimumBeatsEveryGridPointWhenValid) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto p = random_params(seed);
        const double th = theta(15, p.N);
        for (auto variant : {MseFormulaVariant::AsPrinted, MseFormulaVariant::Rederived}) {
            MseReport r;
            try {
                r = t_optimal(p, th, -0.5, 1.0, 3.0, 1.0, variant);
            } catch (const Error&) {
                continue;
            }
            if (r.breakdown) continue;
            for (double w1 = -2.0; w1 <= 2.0; w1 += 0.25)
                for (double w2 = -2.0; w2 <= 2.0; w2 += 0.25)
                    EXPECT_LE(r.mse, t_mse(p, th, {-0.5, 1.0, 3.0, 1.0, w1, w2}, variant) * (1 + 1e-12) + 1e-12);
        }
    }
}

TEST(TOptimal, StationaryAtReportedWeights) {
    int accepted = 0;
    for (std::uint64_t seed = 1; accepted < 100 && seed < 1000; ++seed) {
        const auto p = random_params(seed);
        CounterRng rng(seed, 0x57a7);
        const double th = theta(5 + rng.next_below(20), p.N);
        const double m = -2.0 + 4.0 * rng.next_double();
        const double w = -2.0 + 4.0 * rng.next_double();
        const double c = 1.5 + 4.0 * rng.next_double();
        const auto variant = seed % 2 ? MseFormulaVariant::AsPrinted : MseFormulaVariant::Rederived;
        MseReport r;
        try {
            r = t_optimal(p, th, m, w, c, 1.0, variant);
        } catch (const Error&) {
            continue;
        }
        const double w1 = r.weights->first, w2 = *r.weights->second;
        if (std::abs(w1) > 1e3 || std::abs(w2) > 1e3) continue;
        ++accepted;
        const auto B = t_coefficients(p, th, m, w, 1.0 / (c - 1.0), variant);
        const auto f = [&](double a, double b) { return p.Sy4() * t_mse_factor(B, a, b); };
        const double h = 1e-5;
        const double g1 = (f(w1 + h, w2) - f(w1 - h, w2)) / (2 * h);
        const double g2 = (f(w1, w2 + h) - f(w1, w2 - h)) / (2 * h);
        const double s1 = 2 * p.Sy4() * (std::abs(w1 * B.B1) + std::abs(w2 * B.B3) + std::abs(B.B4));
        const double s2 = 2 * p.Sy4() * (std::abs(w2 * B.B2) + std::abs(w1 * B.B3) + std::abs(B.B5));
        EXPECT_LE(std::abs(g1), 1e-8 * s1) << seed;
        EXPECT_LE(std::abs(g2), 1e-8 * s2) << seed;
    }
    EXPECT_EQ(accepted, 100);
}

TEST(GsOptimal, StationaryAtReportedWeights) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto p = random_params(seed);
        CounterRng rng(seed, 0x65);
        const double th = theta(5 + rng.next_below(20), p.N);
        const double alpha = -2.0 + 4.0 * rng.next_double();
        const auto A = gs_coefficients(p, th, alpha);
        const auto o = gs_optimal(p, th, alpha);
        const auto f = [&](double d1, double g) {
            return p.Sy4() * quadratic_factor(A.A1, A.A2, A.A3, A.A4, A.A5, d1, g);
        };
        const double h = 1e-5;
        const double g1 = (f(o.d1 + h, o.d2_scaled) - f(o.d1 - h, o.d2_scaled)) / (2 * h);
        const double g2 = (f(o.d1, o.d2_scaled + h) - f(o.d1, o.d2_scaled - h)) / (2 * h);
        const double s1 = 2 * p.Sy4() * (std::abs(o.d1 * A.A1) + std::abs(o.d2_scaled * A.A3) + std::abs(A.A4));
        const double s2 = 2 * p.Sy4() * (std::abs(o.d2_scaled * A.A2) + std::abs(o.d1 * A.A3) + std::abs(A.A5));
        EXPECT_LE(std::abs(g1), 1e-8 * s1) << seed;
        EXPECT_LE(std::abs(g2), 1e-8 * s2) << seed;
    }
}

TEST(Mse, ReductionLattice) {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const auto p = random_params(seed);
        const double th = theta(10, p.N);
        const double v = var_usual(p, th);
        EXPECT_LE(rel(mse_kc_at(p, th, 1.0), mse_ratio(p, th)), 1e-10);
        EXPECT_LE(mse_regression(p, th), v * (1 + 1e-10));
        EXPECT_LE(mse_regression(p, th), mse_ratio(p, th) * (1 + 1e-10));
        const auto g = gs_optimal(p, th, 0.0);
        EXPECT_LE(g.min_mse, gs_mse(p, th, {0.0, 1.0, 0.0}) * (1 + 1e-10));
        EXPECT_LE(rel(gs_mse(p, th, {0.0, 1.0, 0.0}), v), 1e-10);
    }
}

TEST(Mse, HomogeneityUnderScalingOfY) {
    const auto pop = random_population(80, 44);
    auto y = pop.y();
    const double k = 7.0;
    for (double& v : y) v *= k;
    const auto p = derive_params(pop);
    const auto q = derive_params(BivariatePopulation(y, pop.x()));
    const double th = theta(12, p.N), k4 = k * k * k * k;
    EXPECT_LE(rel(var_usual(q, th), k4 * var_usual(p, th)), 1e-11);
    EXPECT_LE(rel(mse_ratio(q, th), k4 * mse_ratio(p, th)), 1e-11);
    EXPECT_LE(rel(mse_regression(q, th), k4 * mse_regression(p, th)), 1e-11);
    EXPECT_LE(rel(mse_kc(q, th, 2), k4 * mse_kc(p, th, 2)), 1e-11);
    EXPECT_LE(rel(mse_kc_combined(q, th).mse, k4 * mse_kc_combined(p, th).mse), 1e-11);
    const auto gp = gs_optimal(p, th, 0.5), gq = gs_optimal(q, th, 0.5);
    EXPECT_LE(rel(gq.min_mse, k4 * gp.min_mse), 1e-11);
    EXPECT_LE(rel(gq.d1, gp.d1), 1e-11);
    for (auto variant : {MseFormulaVariant::AsPrinted, MseFormulaVariant::Rederived}) {
        const auto tp = t_optimal(p, th, -1.0, 0.5, 3.0, 1.0, variant);
        const auto tq = t_optimal(q, th, -1.0, 0.5, 3.0, 1.0, variant);
        EXPECT_LE(rel(tq.mse, k4 * tp.mse), 1e-11);
        EXPECT_LE(rel(tq.weights->first, tp.weights->first), 1e-11);
        EXPECT_LE(rel(*tq.weights->second, *tp.weights->second), 1e-11);
    }
}

// ---------------------------------------------------------------------------
// Tables

TEST(CompareTable, AppleRosterMatchesReference) {
    const auto rows = compare_table(apple(), apple_theta(), default_roster(), MseFormulaVariant::AsPrinted);
    const std::vector<double> expected{11627.2,  3927.166, 3927.178, 3927.178, 3927.178, 3927.178,
                                       3473.024, 3486.4,   2934.649, 8721.148, 14832.09};
    ASSERT_EQ(rows.size(), expected.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_FALSE(rows[i].error.has_value());
        EXPECT_LE(rel(rows[i].mse, expected[i]), i == 7 ? 5e-3 : kTablePct) << rows[i].label;
        EXPECT_LE(rel(rows[i].relative_efficiency, rows[0].mse / rows[i].mse), 1e-14);
    }
}

TEST(CompareTable, EmptyAndErroredRows) {
    EXPECT_TRUE(compare_table(apple(), apple_theta(), {}, MseFormulaVariant::AsPrinted).empty());
    std::vector<SpecRequest> reqs{parse_spec("usual"), SpecRequest{ProposedT{1.0, 1.0, 2.0, 2.0, 1.0, 0.0}},
                                  parse_spec("ratio")};
    const auto rows = compare_table(apple(), apple_theta(), reqs, MseFormulaVariant::AsPrinted);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_FALSE(rows[0].error.has_value());
    ASSERT_TRUE(rows[1].error.has_value());
    EXPECT_NE(rows[1].error->find("InvalidSpec"), std::string::npos);
    EXPECT_LE(rel(rows[2].mse, 3927.166), kTablePct);
}

TEST(CompareTable, ResolveFillsOptimalWeights) {
    const auto p = apple();
    const double th = apple_theta();
    const auto spec = resolve(parse_spec("reg:opt"), p, th);
    EXPECT_DOUBLE_EQ(std::get<Regression>(spec).b, regression_b_opt(p));
    const auto kcc = std::get<KCCombined>(resolve(parse_spec("kcc:alpha1=0.3"), p, th));
    EXPECT_DOUBLE_EQ(kcc.tau, tau(p, th));
    EXPECT_EQ(kcc.alpha1, 0.3);
}

TEST(MseFormulaVariant, TextForms) {
    EXPECT_EQ(parse_variant("printed"), MseFormulaVariant::AsPrinted);
    EXPECT_EQ(parse_variant("rederived"), MseFormulaVariant::Rederived);
    EXPECT_EQ(to_string(MseFormulaVariant::Rederived), "rederived");
    EXPECT_THROW(parse_variant("other"), Error);
}
