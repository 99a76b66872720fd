#pragma once

#include <cmath>
#include <numbers>
#include <sstream>

#include "perslab/check_report.hpp"
#include "perslab/model.hpp"
#include "perslab/quadrature.hpp"
#include "perslab/specfun.hpp"

namespace perslab {

namespace detail {

// ln[cosh x / (sinh^2 x + s2)] for x >= 0, written so e^{2x} cancels.
inline double log_cosh_over_sinh2_plus(double x, double s2) {
    double e = std::exp(-2.0 * x);
    double em = -std::expm1(-2.0 * x);
    return -x + std::log1p(e) - std::log(2.0) - std::log(0.25 * em * em + s2 * e);
}

inline double log_spectral_prefactor(const ProcessParams& p) {
    double h = p.hurst();
    double k = p.kappa();
    return std::log(std::sin(std::numbers::pi * h)) + std::lgamma(k + h) + std::lgamma(k + 1.0 - h)
           + std::log(k);
}

} // namespace detail

// Spectral density of the stationary dual, unit total mass on the real line.
inline double spectral_density(const ProcessParams& p, double lambda) {
    double s = std::sin(std::numbers::pi * p.hurst());
    double x = std::numbers::pi * std::fabs(lambda);
    double lf = detail::log_spectral_prefactor(p) + detail::log_cosh_over_sinh2_plus(x, s * s)
                - log_gamma_modsq_line(p.kappa(), lambda);
    return std::exp(lf);
}

// Leading tail constant and 1/lambda^2 correction: f ~ C lambda^{-2k-1}(1 - d/lambda^2).
struct SpectralTail {
    double c;
    double d;
    double exponent; // 2 kappa + 1
};

inline SpectralTail spectral_tail(const ProcessParams& p) {
    double a = p.kappa() + 1.0;
    return {std::exp(detail::log_spectral_prefactor(p)) / std::numbers::pi,
            a * (2.0 * a - 1.0) * (a - 1.0) / 6.0, 2.0 * p.kappa() + 1.0};
}

inline double normalization_constant(const ProcessParams& p) {
    double a = p.alpha(), h = p.hurst();
    return std::tgamma(a + 2.0 * h - 1.0) * std::tgamma(a) * (2.0 * a + 2.0 * h - 2.0) / std::tgamma(2.0 * h + 1.0);
}

struct SpectrumComponents {
    double c_h;
    double a_factor;
    double d_factor;
    double kappa_scale;
};

// Upper bound of d_factor over kappa <= 1: pi / min Gamma(x)^2 on [1, 2].
inline constexpr double d_factor_bound = 4.005636390590680;

inline SpectrumComponents spectrum_components(const ProcessParams& p, double lambda) {
    double h = p.hurst();
    double s = std::sin(std::numbers::pi * h);
    double x = std::numbers::pi * std::fabs(lambda);
    double e = std::exp(-2.0 * x);
    double em = -std::expm1(-2.0 * x);
    double a_factor = 0.25 * (1.0 + e) * (1.0 + e) / (0.25 * em * em + s * s * e);
    double log_cosh = x + std::log1p(e) - std::log(2.0);
    double d_factor = std::numbers::pi * std::exp(-log_cosh - log_gamma_modsq_line(p.kappa(), lambda));
    double c_h = s * std::exp(std::lgamma(p.kappa() + h) + std::lgamma(p.kappa() + 1.0 - h)) / std::numbers::pi;
    return {c_h, a_factor, d_factor, p.kappa()};
}

inline double combine(const SpectrumComponents& c) {
    return c.c_h * c.a_factor * c.d_factor * c.kappa_scale;
}

// alpha -> infinity limit of the spectrum, depends on H only through C(H).
inline double limit_spectrum_alpha_inf(double hurst, double lambda) {
    double c = c_of_h(hurst);
    double s = std::sin(std::numbers::pi * c);
    double x = std::numbers::pi * std::fabs(lambda);
    return s * std::exp(detail::log_cosh_over_sinh2_plus(x, s * s));
}

// Independent check of unit mass: adaptive Gauss-Kronrod on [0, L] plus the
// two-term analytic tail past L.
inline CheckReport verify_normalization(const ProcessParams& p, double tol) {
    if (!(tol > 0.0))
        throw DomainError("verify_normalization: tol must be positive");
    auto tail = spectral_tail(p);
    double k = p.kappa();
    auto f = [&](double l) { return spectral_density(p, l); };

    double L = std::fmax(50.0, 4.0 * (k + 1.0));
    double remainder = 0.0;
    for (;;) {
        double lead = tail.c * std::pow(L, -tail.exponent) * (1.0 - tail.d / (L * L));
        remainder = std::fabs(f(L) - lead) * L / (2.0 * k + 4.0);
        if (2.0 * remainder < tol / 10.0 || L > 1e6)
            break;
        L *= 2.0;
    }
    double analytic_tail = tail.c * (std::pow(L, -2.0 * k) / (2.0 * k)
                                     - tail.d * std::pow(L, -2.0 * k - 2.0) / (2.0 * k + 2.0));

    std::vector<double> breaks{0.0};
    for (double b = 0.5; b < L; b *= 2.0)
        breaks.push_back(b);
    breaks.push_back(L);
    auto q = integrate(f, breaks, tol / 40.0, 1e-14, 20000);
    double total = 2.0 * (q.value + analytic_tail);
    double err_est = 2.0 * (q.error + remainder);
    if (err_est > tol) {
        std::ostringstream os;
        os << "verify_normalization: error estimate " << err_est << " exceeds tol " << tol;
        throw QuadratureError(os.str());
    }
    double dev = std::fabs(total - 1.0);
    std::ostringstream os;
    os.precision(12);
    os << "alpha=" << p.alpha() << " hurst=" << p.hurst() << " integral=" << total << " cutoff=" << L
       << " error_estimate=" << err_est;
    CheckReport r;
    r.name = "spectrum_normalization";
    r.passed = dev <= tol;
    r.measured = {dev};
    r.threshold = tol;
    r.details = os.str();
    return r;
}

} // namespace perslab
