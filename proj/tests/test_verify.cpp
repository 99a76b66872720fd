#include <gtest/gtest.h>

#include <cmath>

#include "perslab/verify.hpp"

using namespace perslab;

namespace {

ExponentEstimate est(double theta, double se) {
    ExponentEstimate e;
    e.theta_hat = theta;
    e.std_err = se;
    e.ci_half_width = 1.96 * se;
    return e;
}

const std::vector<double> lambdas = {0.0, 0.3, 1.0, 3.0, 10.0};

} // namespace

TEST(SpectralSymmetry, Examples) {
    auto r = check_spectral_symmetry(make_params(2.0, 0.3), lambdas, 1e-10);
    EXPECT_TRUE(r.passed) << r.details;
    auto fixed = check_spectral_symmetry(make_params(1.0, 0.5), lambdas, 1e-10);
    EXPECT_EQ(fixed.measured[0], 0.0);
    EXPECT_TRUE(check_spectral_symmetry(make_params(0.8, 0.7), lambdas, 1e-10).passed);
    EXPECT_THROW(check_spectral_symmetry(make_params(0.8, 0.7), lambdas, 0.0), DomainError);
}

TEST(Eq4Bounds, Arithmetic) {
    auto b = eq4_bounds(0.5);
    EXPECT_DOUBLE_EQ(b.lower, 0.25);
    EXPECT_DOUBLE_EQ(b.upper, 0.25);
    b = eq4_bounds(0.3);
    EXPECT_DOUBLE_EQ(b.lower, 0.15);
    EXPECT_NEAR(b.upper, std::sqrt(0.91 / 12.0), 1e-15);
    EXPECT_GT(0.21, b.lower);
    EXPECT_LT(0.21, b.upper);
    b = eq4_bounds(0.7);
    EXPECT_NEAR(b.lower, 0.15, 1e-15);
    EXPECT_DOUBLE_EQ(b.upper, 0.25);
}

TEST(Eq4Bounds, IntervalIntersection) {
    EXPECT_TRUE(check_bounds_eq4(0.5, est(0.25, 0.0)).passed);
    EXPECT_TRUE(check_bounds_eq4(0.3, est(0.21, 0.01)).passed);
    EXPECT_TRUE(check_bounds_eq4(0.3, est(0.29, 0.01)).passed);
    EXPECT_FALSE(check_bounds_eq4(0.3, est(0.40, 0.01)).passed);
    EXPECT_FALSE(check_bounds_eq4(0.7, est(0.10, 0.01)).passed);
    EXPECT_EQ(check_bounds_eq4(0.7, est(0.2, 0.01)).kind, CheckKind::Statistical);
}

TEST(MonotoneAlpha, Examples) {
    auto p1 = make_params(1.0, 0.5), p2 = make_params(2.0, 0.5);
    EXPECT_TRUE(check_monotone_alpha({{p1, est(0.5, 0.01)}, {p2, est(0.25, 0.01)}}).passed);
    EXPECT_TRUE(check_monotone_alpha({{p1, est(0.5, 0.01)}, {p1, est(0.5, 0.01)}}).passed);
    EXPECT_TRUE(check_monotone_alpha({{p1, est(0.25, 0.01)}, {p2, est(0.26, 0.01)}}).passed);
    EXPECT_FALSE(check_monotone_alpha({{p1, est(0.25, 0.01)}, {p2, est(0.30, 0.01)}}).passed);
    EXPECT_FALSE(check_monotone_alpha({{p1, est(0.5, 0.01)}}).passed);
    EXPECT_FALSE(check_monotone_alpha({{p2, est(0.5, 0.01)}, {p1, est(0.4, 0.01)}}).passed);
    EXPECT_FALSE(check_monotone_alpha({{p1, est(0.5, 0.01)}, {make_params(2.0, 0.3), est(0.4, 0.01)}}).passed);
}

TEST(HOrdering, Examples) {
    EXPECT_TRUE(check_h_ordering(2.0, 0.3, est(0.21, 0.01), est(0.20, 0.01)).passed);
    EXPECT_TRUE(check_h_ordering(2.0, 0.3, est(0.21, 0.01), est(0.22, 0.01)).passed);
    EXPECT_FALSE(check_h_ordering(2.0, 0.3, est(0.15, 0.01), est(0.22, 0.01)).passed);
    EXPECT_TRUE(check_h_ordering(2.0, 0.3, est(0.21, 0.01), est(0.20, 0.01), est(0.212, 0.01)).passed);
    EXPECT_FALSE(check_h_ordering(2.0, 0.3, est(0.21, 0.01), est(0.20, 0.01), est(0.30, 0.01)).passed);
    auto same = est(0.25, 0.01);
    auto r = check_h_ordering(2.0, 0.5, same, same);
    EXPECT_TRUE(r.passed);
    EXPECT_EQ(r.measured[0], 0.0);
}

TEST(Slepian, ClosedFormMatchesOracle) {
    // mpmath derivatives, tests/oracles/verify_oracles.py
    EXPECT_NEAR(slepian_expression_closed(0.3, 1.0), 0.39914882403937378781, 1e-14);
    EXPECT_NEAR(slepian_expression_closed(0.1, 5.0), 0.34642711218051408228, 1e-14);
    EXPECT_NEAR(slepian_expression_closed(0.45, 0.05), 0.0012493244809331117594, 1e-15);
    EXPECT_NEAR(slepian_expression_fd(0.3, 1.0), 0.39914882403937378781, 1e-9);
}

TEST(Slepian, GridConditionHolds) {
    auto r = check_slepian_family_condition({0.1, 0.45}, 0.05);
    EXPECT_TRUE(r.passed) << r.details;
    EXPECT_GT(r.measured[0], 0.0);
    EXPECT_LE(r.measured[1], 1e-6);
    EXPECT_FALSE(check_slepian_family_condition({0.3, 0.6}, 0.05).passed);
    EXPECT_FALSE(check_slepian_family_condition({0.1, 0.45}, 0.0).passed);
}

TEST(Slepian, Asymptotics) {
    auto r = check_slepian_asymptotics({0.1, 0.45}, 0.05);
    EXPECT_TRUE(r.passed) << r.details;
}

TEST(CovDomination, Examples) {
    std::vector<double> ts;
    for (int i = 0; i <= 200; ++i)
        ts.push_back(0.1 * i);
    EXPECT_TRUE(check_cov_domination(0.25, ts).passed);
    auto eq = check_cov_domination(0.5, ts);
    EXPECT_TRUE(eq.passed);
    EXPECT_LE(std::fabs(eq.measured[0]), 1e-15);
    auto strict = check_cov_domination(0.1, {5.0});
    EXPECT_TRUE(strict.passed);
    EXPECT_LT(strict.measured[0], -0.1);
    EXPECT_FALSE(check_cov_domination(0.6, ts).passed);
}

TEST(LimitAlphaInf, TargetsAndCovarianceTrend) {
    EXPECT_DOUBLE_EQ(limit_exponent_target(0.5), 0.1875);
    EXPECT_DOUBLE_EQ(limit_exponent_target(0.3), 0.1125);
    auto r = check_limit_alpha_inf(0.5, {8.0, 16.0});
    EXPECT_TRUE(r.passed) << r.details;
    EXPECT_GT(r.measured[0], r.measured[1]);
    EXPECT_EQ(r.kind, CheckKind::Analytic);
}

TEST(LimitAlphaInf, EstimateTrend) {
    std::vector<ExponentEstimate> e = {est(0.23, 0.01), est(0.19, 0.01)};
    auto r = check_limit_alpha_inf(0.5, {8.0, 16.0}, e, est(0.186, 0.01));
    EXPECT_TRUE(r.passed) << r.details;
    EXPECT_EQ(r.kind, CheckKind::Statistical);
    std::vector<ExponentEstimate> bad = {est(0.19, 0.005), est(0.25, 0.005)};
    EXPECT_FALSE(check_limit_alpha_inf(0.5, {8.0, 16.0}, bad).passed);
    EXPECT_FALSE(check_limit_alpha_inf(0.5, {16.0, 8.0}).passed);
}

TEST(AnalyticSuite, SymmetryAndNormalization) {
    auto reports = analytic_spectrum_suite({{2.0, 0.3}, {0.8, 0.7}}, lambdas);
    ASSERT_EQ(reports.size(), 4u);
    for (const auto& r : reports)
        EXPECT_TRUE(r.passed) << r.name << " " << r.details;
}
