#include <gtest/gtest.h>

#include <numbers>

#include "perslab/covariance.hpp"

using namespace perslab;

TEST(LimitCovariance, Examples) {
    EXPECT_NEAR(cov_limit_alpha_inf(0.5, 2.0), 1.0 / std::cosh(1.0), 1e-15);
    EXPECT_NEAR(cov_limit_alpha_inf(0.5, 2.0), 0.648054273663885, 1e-14);
    EXPECT_NEAR(cov_limit_alpha_inf(0.3, 2.0), 0.700593570709864, 1e-14);
    for (double h : {0.1, 0.4, 0.9})
        EXPECT_EQ(cov_limit_alpha_inf(h, 0.0), 1.0);
    EXPECT_NEAR(cov_limit_alpha_inf(0.3, 3.0), cov_limit_alpha_inf(0.7, 3.0), 1e-15);
    EXPECT_EQ(cov_limit_alpha_inf(0.3, -1.5), cov_limit_alpha_inf(0.3, 1.5));
    EXPECT_GT(cov_limit_alpha_inf(0.2, 3000.0), 0.0);
}

TEST(LimitCovariance, CosineTransformOfLimitSpectrum) {
    for (double h : {0.5, 0.3, 0.1}) {
        for (double t = 0.0; t <= 10.0; t += 0.5) {
            auto q = integrate([&](double l) { return std::cos(t * l) * limit_spectrum_alpha_inf(h, l); },
                               std::vector<double>{0, 0.25, 1, 4, 16, 60}, 1e-13, 1e-13, 20000);
            EXPECT_NEAR(2 * q.value, cov_limit_alpha_inf(h, t), 1e-6) << h << " " << t;
        }
    }
}

TEST(LimitCovariance, Domination) {
    for (double h : {0.05, 0.1, 0.25, 0.4, 0.5})
        for (double t = 0.0; t <= 20.0; t += 0.1)
            EXPECT_LE(cov_limit_alpha_inf(h, t), cov_limit_alpha_inf(0.5, 2 * h * t) * (1 + 1e-14));
    EXPECT_LT(cov_limit_alpha_inf(0.1, 5.0), cov_limit_alpha_inf(0.5, 1.0));
}

TEST(FbmDual, Examples) {
    EXPECT_NEAR(cov_fbm_dual(0.5, 1.0), std::exp(-0.5), 1e-15);
    EXPECT_EQ(cov_fbm_dual(0.3, 0.0), 1.0);
    double want = std::cosh(0.375) - 0.5 * std::pow(2 * std::sinh(0.25), 1.5);
    EXPECT_NEAR(cov_fbm_dual(0.75, 0.5), want, 1e-15);
}

TEST(FbmDual, MatchesLampertiOfFbmCovariance) {
    // Eq. (2) at (e^s, e^u) divided by e^{sH} e^{uH}.
    for (double h : {0.2, 0.5, 0.75})
        for (double s : {0.1, 0.5, 2.0, 7.0}) {
            double x = std::exp(s), y = 1.0;
            double b = 0.5 * (std::pow(x, 2 * h) + std::pow(y, 2 * h) - std::pow(x - y, 2 * h));
            EXPECT_NEAR(cov_fbm_dual(h, s), b / std::pow(x * y, h), 1e-12);
        }
}

TEST(HalfClosed, Limits) {
    for (double t : {0.5, 2.0, 8.0}) {
        EXPECT_NEAR(cov_half_closed(0.5 - 1e-9, t), std::exp(-t / 2), 1e-8);
        double k = 0.2;
        double qinf = (1 - 2 * k) / (1 + 2 * k);
        EXPECT_NEAR(q_kappa(k, 60.0), qinf, 1e-12);
    }
    EXPECT_THROW(cov_half_closed(0.5, 1.0), DomainError);
    EXPECT_THROW(cov_half_closed(0.0, 1.0), DomainError);
}

TEST(HalfClosed, Bounded) {
    for (double k = 0.02; k < 0.5; k += 0.04)
        for (double t = 0.01; t < 30; t *= 1.5)
            EXPECT_LE(q_kappa(k, t), 1.0);
}

TEST(HalfClosed, FrozenSpectralValues) {
    struct Case { double k, t, v; };
    const Case cases[] = {
        {0.1, 0.01, 0.688831884502}, {0.1, 1, 0.225705424296393}, {0.1, 5, 0.0274079245486764},
        {0.25, 0.01, 0.940097030125}, {0.25, 1, 0.430215123763836}, {0.25, 5, 0.0547761691000579},
        {0.4, 0.01, 0.987055042515}, {0.4, 1, 0.551413263705896}, {0.4, 5, 0.0729903848857476},
    };
    for (auto c : cases)
        EXPECT_NEAR(cov_half_closed(c.k, c.t), c.v, 1e-9) << c.k << " " << c.t;
}

TEST(SpectralTable, OrnsteinUhlenbeck) {
    auto t = cov_from_spectrum(make_params(1.0, 0.5), 0.05, 400);
    ASSERT_EQ(t.values.size(), 401u);
    for (std::size_t i = 0; i < t.values.size(); ++i)
        EXPECT_NEAR(t.values[i], std::exp(-0.5 * 0.05 * i), 1e-8);
}

TEST(SpectralTable, AgreesWithHalfClosedForm) {
    for (double k : {0.1, 0.2, 0.3, 0.4}) {
        auto t = cov_from_spectrum(make_params(k + 0.5, 0.5), 0.01, 1000);
        EXPECT_NEAR(t.values[0], 1.0, 1e-9);
        for (std::size_t i = 1; i <= 1000; ++i)
            EXPECT_NEAR(t.values[i], cov_half_closed(k, 0.01 * i), 1e-6) << k << " " << i;
    }
}

TEST(SpectralTable, UnitVarianceMonotoneNonNegative) {
    for (auto p : {make_params(2.0, 0.3), make_params(0.8, 0.7), make_params(1.0, 0.1), make_params(16.0, 0.5),
                   make_params(0.55, 0.5), make_params(3.0, 0.9)}) {
        auto t = cov_from_spectrum(p, 0.05, 4000);
        EXPECT_NEAR(t.values[0], 1.0, 1e-9);
        for (std::size_t i = 1; i < t.values.size(); ++i) {
            EXPECT_LE(t.values[i], t.values[i - 1] + 1e-9);
            EXPECT_GE(t.values[i], -1e-9);
        }
    }
}

TEST(SpectralTable, SymmetryTransport) {
    auto a = cov_from_spectrum(make_params(2.0, 0.3), 0.05, 400);
    auto b = cov_from_spectrum(make_params(1.6, 0.7), 0.05, 400);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        EXPECT_NEAR(a.values[i], b.values[i], 1e-8);
}

TEST(SpectralTable, IndependentOfWorkers) {
    auto a = cov_from_spectrum(make_params(1.3, 0.4), 0.05, 1000, 1);
    auto b = cov_from_spectrum(make_params(1.3, 0.4), 0.05, 1000, 3);
    EXPECT_EQ(a.values, b.values);
}

TEST(SpectralTable, RejectsBadGrid) {
    EXPECT_THROW(cov_from_spectrum(make_params(2.0, 0.3), 0.0, 10), DomainError);
    EXPECT_THROW(cov_from_spectrum(make_params(2.0, 0.3), 0.1, 1), DomainError);
}

TEST(DoubleIntegral, MatchesSpectralRoute) {
    // Frozen spectral-route values computed independently.
    EXPECT_NEAR(cov_double_integral(make_params(0.8, 0.7), 1.0), 0.65667571246, 1e-3);
    EXPECT_NEAR(cov_double_integral(make_params(2.0, 0.6), 0.5, DoubleIntegralRoute::IntegratedFbm),
                0.93813546878, 1e-3);
    auto s1 = cov_from_spectrum(make_params(0.8, 0.7), 0.25, 40);
    auto s2 = cov_from_spectrum(make_params(2.0, 0.6), 0.25, 40);
    for (int i : {1, 2, 4, 8, 20}) {
        double t = 0.25 * i;
        EXPECT_NEAR(cov_double_integral(make_params(0.8, 0.7), t), s1.values[i], 1e-3) << t;
        EXPECT_NEAR(cov_double_integral(make_params(2.0, 0.6), t, DoubleIntegralRoute::IntegratedFbm),
                    s2.values[i], 1e-3) << t;
        EXPECT_NEAR(cov_double_integral(make_params(2.0, 0.6), t, DoubleIntegralRoute::FractionalNoise),
                    s2.values[i], 1e-3) << t;
    }
}

TEST(DoubleIntegral, OtherRoutes) {
    EXPECT_EQ(cov_double_integral(make_params(0.8, 0.7), 0.0), 1.0);
    // Brownian kernel at alpha = 1: the dual of Brownian motion.
    EXPECT_NEAR(cov_double_integral(make_params(1.0, 0.5), 1.3), std::exp(-0.65), 1e-6);
    // H < 1/2 with alpha <= 1 goes through the symmetric point.
    auto s = cov_from_spectrum(make_params(0.9, 0.3), 0.5, 4);
    EXPECT_NEAR(cov_double_integral(make_params(0.9, 0.3), 1.0), s.values[2], 1e-3);
    EXPECT_THROW(cov_double_integral(make_params(0.9, 0.3), 1.0, DoubleIntegralRoute::FractionalNoise), DomainError);
    EXPECT_THROW(cov_double_integral(make_params(0.9, 0.3), 1.0, DoubleIntegralRoute::IntegratedFbm), DomainError);
}

TEST(SmallLag, Exponents) {
    auto ou = cov_from_spectrum(make_params(1.0, 0.5), 1e-3, 100);
    EXPECT_NEAR(small_lag_exponent(ou).exponent_hat, 1.0, 0.05);
    auto r = cov_from_spectrum(make_params(0.7, 0.6), 1e-3, 100);
    auto fit = small_lag_exponent(r);
    EXPECT_NEAR(fit.exponent_hat, 0.6, 0.05);
    EXPECT_GT(fit.prefactor_hat, 0.0);
    auto smooth = cov_from_spectrum(make_params(2.0, 0.3), 1e-3, 100);
    EXPECT_THROW(small_lag_exponent(smooth), FitError);
    auto coarse = cov_from_spectrum(make_params(0.7, 0.6), 0.05, 100);
    EXPECT_THROW(small_lag_exponent(coarse), FitError);
}
