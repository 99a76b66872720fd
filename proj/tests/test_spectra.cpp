#include <gtest/gtest.h>

#include <numbers>

#include "perslab/spectra.hpp"

using namespace perslab;

namespace {

std::vector<ProcessParams> omega_grid_5x5() {
    std::vector<ProcessParams> out;
    for (double h : {0.1, 0.3, 0.5, 0.7, 0.9})
        for (double extra : {0.15, 0.5, 1.0, 2.0, 4.0})
            out.push_back(make_params(1.0 - h + extra, h));
    return out;
}

} // namespace

TEST(Spectrum, BrownianDualIsOrnsteinUhlenbeck) {
    auto p = make_params(1.0, 0.5);
    EXPECT_NEAR(spectral_density(p, 0.0), 2.0 / std::numbers::pi, 1e-14);
    for (double l : {0.1, 0.5, 1.0, 3.0, 20.0, 300.0}) {
        double want = 1.0 / (2.0 * std::numbers::pi) / (l * l + 0.25);
        EXPECT_NEAR(spectral_density(p, l), want, 1e-12 * want) << l;
    }
}

TEST(Spectrum, FrozenValues) {
    struct Case { double a, h, l, v; };
    const Case cases[] = {
        {2.0, 0.3, 0.0, 1.054776550848717309},  {2.0, 0.3, 1.3, 0.054712071085362351411},
        {0.8, 0.7, 1.0, 0.11039439203034328402}, {0.6, 0.9, 3.0, 0.0070252908948909399099},
        {8.0, 0.5, 0.5, 0.39769305113913808391},
    };
    for (auto c : cases)
        EXPECT_NEAR(spectral_density(make_params(c.a, c.h), c.l), c.v, 1e-12 * c.v);
}

TEST(Spectrum, EvenAndSymmetric) {
    auto p = make_params(2.0, 0.3);
    EXPECT_EQ(spectral_density(p, 1.3), spectral_density(p, -1.3));
    auto q = make_params(1.6, 0.7);
    for (double l : {0.0, 0.5, 2.0})
        EXPECT_NEAR(spectral_density(p, l), spectral_density(q, l), 1e-12 * spectral_density(p, l));
}

TEST(Spectrum, SymmetryOnGrid) {
    for (auto p : omega_grid_5x5()) {
        auto q = symmetry_image(p);
        for (double l = 0.0; l <= 20.0; l += 0.25) {
            double a = spectral_density(p, l), b = spectral_density(q, l);
            EXPECT_LE(std::fabs(a - b), 1e-10 * a);
        }
    }
}

TEST(Spectrum, NonIncreasingOnGrid) {
    for (auto p : omega_grid_5x5()) {
        double prev = spectral_density(p, 0.0);
        for (int i = 1; i < 1000; ++i) {
            double l = 20.0 * i / 999.0;
            double v = spectral_density(p, l);
            EXPECT_LE(v, prev * (1 + 1e-13)) << p.alpha() << "," << p.hurst() << " at " << l;
            prev = v;
        }
    }
}

TEST(Spectrum, TailExponent) {
    for (auto p : {make_params(1.0, 0.5), make_params(2.0, 0.3), make_params(0.6, 0.9), make_params(1.5, 0.8)}) {
        double slope = (std::log(spectral_density(p, 500.0)) - std::log(spectral_density(p, 50.0)))
                       / (std::log(500.0) - std::log(50.0));
        EXPECT_NEAR(slope, -(2 * p.kappa() + 1), 0.02);
        auto t = spectral_tail(p);
        double l = 400.0;
        double lead = t.c * std::pow(l, -t.exponent) * (1 - t.d / (l * l));
        EXPECT_NEAR(spectral_density(p, l) / lead, 1.0, 1e-8);
    }
}

TEST(Spectrum, SmallCRescaledLimit) {
    // f(l C) C -> (1/pi)/(1 + l^2) as C(H) -> 0.
    for (double a : {1.2, 2.0})
        for (double l : {0.5, 1.0}) {
            double want = 1.0 / std::numbers::pi / (1 + l * l);
            double prev = INFINITY;
            for (double h : {0.1, 0.05, 0.02, 0.01, 0.001}) {
                double c = c_of_h(h);
                double dev = std::fabs(spectral_density(make_params(a, h), l * c) * c - want);
                EXPECT_LT(dev, prev) << a << " " << l << " " << h;
                prev = dev;
            }
            EXPECT_LT(prev, 2e-3);
        }
}

TEST(Normalization, ConstantExamples) {
    for (double h : {0.2, 0.5, 0.9})
        EXPECT_NEAR(normalization_constant(make_params(1.0, h)), 1.0, 1e-14);
    EXPECT_NEAR(normalization_constant(make_params(2.0, 0.5)), 3.0, 1e-14);
    EXPECT_NEAR(normalization_constant(make_params(1.5, 0.75)), 1.6666666666666666667, 1e-14);
}

TEST(Normalization, SpectrumIntegratesToOne) {
    auto r = verify_normalization(make_params(1.0, 0.5), 1e-8);
    EXPECT_TRUE(r.passed) << r.details;
    EXPECT_LT(r.measured[0], 1e-8);
    for (auto p : {make_params(2.0, 0.3), make_params(0.6, 0.9), make_params(16.0, 0.5), make_params(0.55, 0.5)}) {
        auto q = verify_normalization(p, 1e-6);
        EXPECT_TRUE(q.passed) << q.details;
    }
    EXPECT_THROW(verify_normalization(make_params(2.0, 0.3), 0.0), DomainError);
}

TEST(Components, RecombineToSpectrum) {
    for (auto p : {make_params(0.8, 0.7), make_params(2.0, 0.3), make_params(1.0, 0.5)})
        for (double l : {0.0, 1.0, 5.0, 80.0}) {
            double f = spectral_density(p, l);
            EXPECT_NEAR(combine(spectrum_components(p, l)), f, 1e-12 * f);
        }
}

TEST(Components, Examples) {
    auto c = spectrum_components(make_params(1.0, 0.5), 0.0);
    EXPECT_NEAR(c.a_factor, 1.0, 1e-15);
    // kappa = 0 is outside Omega; the d factor at kappa -> 0 is |Gamma(1/2)/Gamma(1)|^2 = pi.
    auto near0 = spectrum_components(make_params(0.5 + 1e-12, 0.5), 0.0);
    EXPECT_NEAR(near0.d_factor, std::numbers::pi, 1e-9);
}

TEST(Components, Brackets) {
    for (double h : {0.1, 0.3, 0.5, 0.8})
        for (double k : {0.05, 0.3, 0.4616, 0.7, 1.0}) {
            auto p = make_params(k + 1 - h, h);
            double s = std::sin(std::numbers::pi * h);
            for (double l = 0; l < 30; l += 0.37) {
                auto c = spectrum_components(p, l);
                EXPECT_GE(c.a_factor, 1.0 - 1e-14);
                EXPECT_LE(c.a_factor, 1.0 / (s * s) * (1 + 1e-14));
                EXPECT_GT(c.d_factor, 0.0);
                EXPECT_LE(c.d_factor, d_factor_bound * (1 + 1e-14));
                EXPECT_GT(c.c_h, 0.0);
            }
        }
}

TEST(Components, PrintedBoundOfFourIsSlightlyExceeded) {
    // Gamma has its minimum 0.8856 on (1, 2), so pi / Gamma(1 + kappa)^2 at l = 0 peaks above 4.
    auto c = spectrum_components(make_params(0.96163214496836, 0.5), 0.0);
    EXPECT_GT(c.d_factor, 4.0);
    EXPECT_NEAR(c.d_factor, d_factor_bound, 1e-12);
}

TEST(LimitSpectrum, HalfIsSech) {
    for (double l : {0.0, 0.3, 1.0, 4.0})
        EXPECT_NEAR(limit_spectrum_alpha_inf(0.5, l), 1.0 / std::cosh(std::numbers::pi * l), 1e-15);
    EXPECT_EQ(limit_spectrum_alpha_inf(0.3, 1.0), limit_spectrum_alpha_inf(1.0 - 0.3, 1.0));
}

TEST(LimitSpectrum, PointwiseApproach) {
    double prev = INFINITY;
    for (double a : {4.0, 8.0, 16.0}) {
        double d = std::fabs(spectral_density(make_params(a, 0.5), 1.0) - limit_spectrum_alpha_inf(0.5, 1.0));
        EXPECT_LT(d, prev);
        prev = d;
    }
}

TEST(LimitSpectrum, UnitMass) {
    for (double h : {0.5, 0.3, 0.1}) {
        auto q = integrate([&](double l) { return limit_spectrum_alpha_inf(h, l); },
                           std::vector<double>{0, 0.5, 2, 8, 40}, 1e-13);
        EXPECT_NEAR(2 * q.value, 1.0, 1e-10);
    }
}
