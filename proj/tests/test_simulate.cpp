#include <gtest/gtest.h>

#include <numbers>

#include "perslab/simulate.hpp"

using namespace perslab;

namespace {

struct Moment {
    double value;
    double se;
};

// Sample covariance E[x_i x_j] (zero-mean processes) with its standard error.
Moment cross_moment(const PathEnsemble& e, std::size_t i, std::size_t j) {
    double s = 0, s2 = 0;
    for (std::size_t p = 0; p < e.n_paths; ++p) {
        double v = e.path(p)[i] * e.path(p)[j];
        s += v;
        s2 += v * v;
    }
    double n = static_cast<double>(e.n_paths);
    double m = s / n;
    return {m, std::sqrt((s2 / n - m * m) / n)};
}

// Integrated Brownian motion covariance, s <= t.
double ibm_cov(double s, double t) {
    if (s > t)
        std::swap(s, t);
    return s * s * t / 2 - s * s * s / 6;
}

} // namespace

TEST(Grid, Factories) {
    auto g = TimeGrid::exponential_to(20.0);
    EXPECT_EQ(g.kind, GridKind::Exponential);
    EXPECT_NEAR(g.points[0], std::exp(-3.0), 1e-15);
    EXPECT_LE(g.points.back(), 20.0 * (1 + 1e-12));
    EXPECT_GT(g.points.back() * std::exp(0.05), 20.0);
    EXPECT_THROW(TimeGrid::uniform(0.0, 4), DomainError);
    EXPECT_THROW(TimeGrid::uniform(0.1, 4, -1.0), DomainError);
}

TEST(Fbm, BrownianIncrementsUncorrelated) {
    auto g = TimeGrid::uniform(0.25, 8, 0.25);
    auto e = sample_fbm(0.5, g, 10000, 1);
    double s = 0, s2 = 0;
    for (std::size_t p = 0; p < e.n_paths; ++p) {
        auto x = e.path(p);
        double v = (x[1] - x[0]) * (x[5] - x[3]);
        s += v;
        s2 += v * v;
    }
    double n = static_cast<double>(e.n_paths);
    double m = s / n, se = std::sqrt((s2 / n - m * m) / n);
    EXPECT_LT(std::fabs(m), 3 * se);
}

TEST(Fbm, UnitVarianceAtOne) {
    auto g = TimeGrid::uniform(0.125, 8, 0.125);
    auto e = sample_fbm(0.7, g, 10000, 2);
    auto m = cross_moment(e, 7, 7);
    EXPECT_NEAR(e.grid.points[7], 1.0, 1e-15);
    EXPECT_LT(std::fabs(m.value - 1.0), 3 * m.se);
}

TEST(Fbm, CholeskyCovarianceMatchesClosedForm) {
    auto g = TimeGrid::uniform(0.4, 8, 0.2);
    auto e = sample_fbm(0.3, g, 100000, 3);
    double worst = 0;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            auto m = cross_moment(e, i, j);
            double want = fbm_covariance(0.3, g.points[i], g.points[j]);
            worst = std::fmax(worst, std::fabs(m.value - want) / m.se);
        }
    EXPECT_LT(worst, 4.0);
}

TEST(Fbm, CirculantRouteForLongGrids) {
    auto g = TimeGrid::uniform(1.0 / 4096, 4097);
    auto src = make_fbm_source(0.25, g);
    EXPECT_EQ(src->paths_per_draw(), 2u);
    auto e = collect(*src, 10000, 4);
    for (auto [i, j] : {std::pair<std::size_t, std::size_t>{4096, 4096}, {4096, 2048}, {1024, 3072}, {100, 4000}}) {
        auto m = cross_moment(e, i, j);
        double want = fbm_covariance(0.25, g.points[i], g.points[j]);
        EXPECT_LT(std::fabs(m.value - want), 4 * m.se) << i << "," << j;
    }
    for (std::size_t p = 0; p < 4; ++p)
        EXPECT_EQ(e.path(p)[0], 0.0);
}

TEST(Fbm, CirculantEigenvaluesNonNegative) {
    for (double h : {0.05, 0.3, 0.5, 0.8, 0.95}) {
        FbmCirculantSource src(h, TimeGrid::uniform(0.01, 3001));
        SUCCEED();
    }
}

TEST(Fbm, IndependentOfWorkerCount) {
    auto g = TimeGrid::uniform(1.0 / 1024, 4097);
    auto a = sample_fbm(0.4, g, 1000, 99, 1);
    auto b = sample_fbm(0.4, g, 1000, 99, 3);
    EXPECT_EQ(a.data, b.data);
    auto gc = TimeGrid::exponential_to(10.0);
    auto c = sample_fbm(0.4, gc, 600, 5, 1);
    auto d = sample_fbm(0.4, gc, 600, 5, 4);
    EXPECT_EQ(c.data, d.data);
}

TEST(Rl, AlphaOneIsIdentity) {
    auto g = TimeGrid::uniform(1.0 / 64, 65);
    auto e = sample_fbm(0.6, g, 50, 7);
    auto r = rl_integrate(e, 1.0, 0.6);
    EXPECT_EQ(r.data, e.data);
    EXPECT_THROW(rl_integrate(e, 0.3, 0.6), DomainError);
}

TEST(Rl, IntegratedBrownianVariance) {
    auto g = TimeGrid::uniform(1.0 / 512, 513);
    auto base = std::make_shared<FbmCirculantSource>(0.5, g);
    RlSource src(base, 2.0);
    auto e = collect(src, 100000, 8);
    auto m = cross_moment(e, 512, 512);
    EXPECT_NEAR(m.value, 1.0 / 3.0, 0.02 / 3.0);
}

TEST(Rl, ExactCellWeightsAgainstDirectSum) {
    auto g = TimeGrid::uniform(0.01, 200);
    auto e = sample_fbm(0.7, g, 3, 21);
    double alpha = 0.65;
    auto r = rl_integrate(e, alpha, 0.7);
    for (std::size_t p = 0; p < 3; ++p) {
        auto x = e.path(p);
        for (std::size_t n : {1ul, 17ul, 199ul}) {
            double s = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                double w = (std::pow((n - j + 1) * 0.01, alpha) - std::pow((n - j) * 0.01, alpha)) / std::tgamma(alpha + 1);
                s += w / 0.01 * (x[j] - x[j - 1]);
            }
            EXPECT_NEAR(r.path(p)[n], s, 1e-12 * (1 + std::fabs(s)));
        }
    }
}

TEST(Rl, SelfSimilarVarianceScaling) {
    auto g = TimeGrid::uniform(1.0 / 512, 1025);
    auto base = std::make_shared<FbmCirculantSource>(0.6, g);
    RlSource src(base, 1.5);
    auto e = collect(src, 40000, 9);
    double k = 0.5 + 0.6;
    double v1 = cross_moment(e, 512, 512).value;
    EXPECT_NEAR(cross_moment(e, 256, 256).value / v1, std::pow(0.5, 2 * k), 0.03 * std::pow(0.5, 2 * k));
    EXPECT_NEAR(cross_moment(e, 1024, 1024).value / v1, std::pow(2.0, 2 * k), 0.03 * std::pow(2.0, 2 * k));
}

TEST(Rl, FbmIdentityQuick) {
    // sqrt(Gamma(2H+1)/Gamma(2(1-H)+1)) I_{2H,1-H} is FBM with index H.
    double h = 0.4;
    auto g = TimeGrid::uniform(1.0 / 1024, 1025);
    auto base = std::make_shared<FbmCirculantSource>(1 - h, g);
    RlSource src(base, 2 * h);
    auto e = collect(src, 20000, 10);
    double c2 = std::tgamma(2 * h + 1) / std::tgamma(2 * (1 - h) + 1);
    for (auto [i, j] : {std::pair<std::size_t, std::size_t>{1024, 1024}, {512, 1024}, {256, 768}}) {
        auto m = cross_moment(e, i, j);
        EXPECT_LT(std::fabs(c2 * m.value - fbm_covariance(h, g.points[i], g.points[j])), 4 * c2 * m.se);
    }
}

TEST(Stationary, OuLagOneAutocorrelation) {
    auto t = cov_table_from_function(0.05, 200, "ou", 0.5, [](double x) { return std::exp(-x / 2); });
    auto e = sample_stationary(t, 10.0, 20000, 11);
    auto m = cross_moment(e, 100, 101);
    EXPECT_LT(std::fabs(m.value - std::exp(-0.025)), 3 * m.se);
}

TEST(Stationary, MatchesTableAcrossLags) {
    auto t = cov_from_spectrum(make_params(2.0, 0.3), 0.05, 400);
    auto e = sample_stationary(t, 20.0, 40000, 12);
    auto v = cross_moment(e, 50, 50);
    EXPECT_LT(std::fabs(v.value - 1.0), 3 * v.se);
    double worst = 0;
    for (std::size_t lag = 0; lag < 16; ++lag) {
        auto m = cross_moment(e, 200, 200 + lag * 7);
        worst = std::fmax(worst, std::fabs(m.value - t.values[lag * 7]) / m.se);
    }
    EXPECT_LT(worst, 4.0);
}

TEST(Stationary, Determinism) {
    auto t = cov_from_spectrum(make_params(1.5, 0.5), 0.05, 400);
    auto a = sample_stationary(t, 20.0, 300, 13, 1);
    auto b = sample_stationary(t, 20.0, 300, 13, 4);
    EXPECT_EQ(a.data, b.data);
    auto c = sample_stationary(t, 20.0, 300, 14, 1);
    double s = 0;
    for (std::size_t p = 0; p < 300; ++p)
        s += a.path(p)[10] * c.path(p)[10];
    EXPECT_LT(std::fabs(s / 300), 4.0 / std::sqrt(300.0));
}

TEST(Stationary, Preconditions) {
    auto t = cov_from_spectrum(make_params(1.5, 0.5), 0.05, 100);
    EXPECT_THROW(sample_stationary(t, 10.0, 10, 1), DomainError);
    EXPECT_THROW(sample_stationary(t, 1.025, 10, 1), DomainError);
}

TEST(Stationary, NegativeEigenvaluePolicy) {
    // A triangular covariance truncated abruptly is not positive definite after reflection.
    auto t = cov_table_from_function(0.1, 100, "box", NAN, [](double x) { return x < 1.05 ? 1.0 : 0.0; });
    StationaryOptions refuse{1e-7, NegativeEigenPolicy::Refuse};
    EXPECT_THROW(StationarySource(t, 10.0, refuse), EmbeddingError);
    StationarySource clipped(t, 10.0);
    EXPECT_LT(clipped.embedding().min_eigen_ratio(), -1e-7);
    EXPECT_GT(clipped.embedding().clipped_mass(), 0.0);
}

TEST(Lamperti, BrownianGivesOu) {
    auto g = TimeGrid::exponential_to(std::exp(3.0));
    auto e = lamperti_normalize(sample_fbm(0.5, g, 20000, 15), 0.5, 1.0);
    EXPECT_EQ(e.grid.kind, GridKind::Uniform);
    EXPECT_NEAR(e.grid.origin, -3.0, 1e-15);
    for (std::size_t lag : {0ul, 10ul, 40ul}) {
        auto m = cross_moment(e, 40, 40 + lag);
        EXPECT_LT(std::fabs(m.value - std::exp(-0.05 * lag / 2)), 3 * m.se) << lag;
    }
    EXPECT_THROW(lamperti_normalize(sample_fbm(0.5, TimeGrid::uniform(0.1, 5, 0.1), 10, 1), 0.5, 1.0), DomainError);
}

TEST(Lamperti, IntegratedBrownianUnitVarianceAndStationarity) {
    auto g = TimeGrid::exponential_to(std::exp(3.0));
    CholeskySource src(g, ibm_cov, "ibm");
    auto e = lamperti_normalize(collect(src, 20000, 16), 1.5, std::sqrt(1.0 / 3.0));
    for (std::size_t j = 0; j < e.n_points(); j += 12) {
        auto m = cross_moment(e, j, j);
        EXPECT_LT(std::fabs(m.value - 1.0), 3 * m.se) << j;
    }
    auto early = cross_moment(e, 5, 15);
    auto late = cross_moment(e, 100, 110);
    EXPECT_LT(std::fabs(early.value - late.value), 3 * std::hypot(early.se, late.se));
}
