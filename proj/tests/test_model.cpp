#include <gtest/gtest.h>

#include <random>

#include "perslab/model.hpp"

using namespace perslab;

TEST(Model, KappaFromDefinition) {
    EXPECT_DOUBLE_EQ(make_params(1.0, 0.5).kappa(), 0.5);
    EXPECT_DOUBLE_EQ(make_params(2.0, 0.3).kappa(), 1.3);
}

TEST(Model, RejectsPointsOutsideOmega) {
    EXPECT_THROW(make_params(0.4, 0.5), DomainError);
    EXPECT_THROW(make_params(0.5, 0.5), DomainError);
    EXPECT_THROW(make_params(2.0, 0.0), DomainError);
    EXPECT_THROW(make_params(2.0, 1.0), DomainError);
    EXPECT_THROW(make_params(-1.0, 0.5), DomainError);
    EXPECT_THROW(make_params(NAN, 0.5), DomainError);
    EXPECT_THROW(make_params(2.0, INFINITY), DomainError);
}

TEST(Model, SymmetryImageExamples) {
    auto q = symmetry_image(make_params(2.0, 0.3));
    EXPECT_NEAR(q.alpha(), 1.6, 1e-15);
    EXPECT_NEAR(q.hurst(), 0.7, 1e-15);
    auto r = symmetry_image(make_params(1.6, 0.7));
    EXPECT_NEAR(r.alpha(), 2.0, 1e-15);
    EXPECT_NEAR(r.hurst(), 0.3, 1e-15);
    auto s = symmetry_image(make_params(1.0, 0.5));
    EXPECT_EQ(s.alpha(), 1.0);
    EXPECT_EQ(s.hurst(), 0.5);
}

TEST(Model, SymmetryIsAnInvolutionPreservingKappa) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> uh(0.01, 0.99), ua(0.0, 6.0);
    int checked = 0;
    while (checked < 100) {
        double h = uh(gen);
        double a = 1.0 - h + 0.01 + ua(gen);
        auto p = make_params(a, h);
        auto q = symmetry_image(p);
        auto back = symmetry_image(q);
        EXPECT_NEAR(back.alpha(), p.alpha(), 4 * std::numeric_limits<double>::epsilon() * std::fmax(1.0, p.alpha()));
        EXPECT_NEAR(back.hurst(), p.hurst(), 2 * std::numeric_limits<double>::epsilon());
        EXPECT_NEAR(q.kappa(), p.kappa(), 8 * std::numeric_limits<double>::epsilon() * (1 + p.kappa()));
        ++checked;
    }
}

TEST(Model, COfH) {
    EXPECT_DOUBLE_EQ(c_of_h(0.3), 0.3);
    EXPECT_DOUBLE_EQ(c_of_h(0.7), 1.0 - 0.7);
    EXPECT_DOUBLE_EQ(c_of_h(0.5), 0.5);
    EXPECT_THROW(c_of_h(0.0), DomainError);
    EXPECT_THROW(c_of_h(1.2), DomainError);
}

TEST(Model, Families) {
    EXPECT_THROW(make_laplace_dual(1.0), DomainError);
    ProcessFamily f = FractionalIntegratedNoise{make_params(1.0, 0.3)};
    EXPECT_DOUBLE_EQ(path_roughness(f), 0.3);
    EXPECT_TRUE(std::isinf(path_roughness(FractionalIntegratedNoise{make_params(2.0, 0.5)})));
    EXPECT_EQ(path_roughness(OrnsteinUhlenbeck{}), 0.5);
    EXPECT_EQ(family_tag(OrnsteinUhlenbeck{}), "ou");
}
