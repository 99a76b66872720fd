#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "perslab/errors.hpp"

namespace perslab {

using ComplexValue = std::complex<double>;

namespace detail {

inline bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x);
}

// 1/Gamma(x) for real x, zero at the poles.
inline double rgamma(double x) {
    if (is_nonpositive_integer(x))
        return 0.0;
    return 1.0 / std::tgamma(x);
}

} // namespace detail

// Principal branch of ln Gamma. Stirling series after shifting Re z up to 15;
// the downward recurrence continues the branch into Re z < 15, including the
// left half plane, without a reflection step.
inline ComplexValue log_gamma(ComplexValue z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("log_gamma: non-finite argument");
    if (z.imag() == 0.0 && detail::is_nonpositive_integer(z.real()))
        throw PoleError("log_gamma: pole at non-positive integer");

    ComplexValue shift_sum{0.0, 0.0};
    while (z.real() < 15.0) {
        shift_sum += std::log(z);
        z += 1.0;
    }
    static constexpr double coef[] = {
        1.0 / 12.0,          -1.0 / 360.0,  1.0 / 1260.0, -1.0 / 1680.0,
        1.0 / 1188.0,        -691.0 / 360360.0, 1.0 / 156.0,  -3617.0 / 122400.0,
    };
    ComplexValue inv = 1.0 / z;
    ComplexValue inv2 = inv * inv;
    ComplexValue series{0.0, 0.0};
    for (int k = 7; k >= 0; --k)
        series = series * inv2 + coef[k];
    series *= inv;
    ComplexValue lg = (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * std::numbers::pi) + series;
    return lg - shift_sum;
}

// |Gamma(i*lambda + kappa + 1)|^2. Evaluated at |lambda| so it is exactly even.
inline double gamma_modsq_line(double kappa, double lambda) {
    if (!(kappa > -1.0))
        throw DomainError("gamma_modsq_line: kappa must exceed -1");
    ComplexValue lg = log_gamma({kappa + 1.0, std::fabs(lambda)});
    return std::exp(2.0 * lg.real());
}

// Same quantity on the log scale; avoids underflow for large lambda.
inline double log_gamma_modsq_line(double kappa, double lambda) {
    if (!(kappa > -1.0))
        throw DomainError("log_gamma_modsq_line: kappa must exceed -1");
    return 2.0 * log_gamma({kappa + 1.0, std::fabs(lambda)}).real();
}

inline double beta(double a, double b) {
    if (a > 0.0 && b > 0.0)
        return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    if (detail::is_nonpositive_integer(a) || detail::is_nonpositive_integer(b))
        throw PoleError("beta: pole");
    return std::tgamma(a) * std::tgamma(b) * detail::rgamma(a + b);
}

namespace detail {

inline double hyp2f1_series(double a, double b, double c, double x) {
    constexpr int cap = 10000;
    double term = 1.0;
    double sum = 1.0;
    int small_run = 0;
    for (int n = 0; n < cap; ++n) {
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        sum += term;
        if (term == 0.0)
            return sum;
        if (std::fabs(term) <= 1e-17 * std::fabs(sum)) {
            if (++small_run == 2)
                return sum;
        } else {
            small_run = 0;
        }
    }
    throw ConvergenceError("hyp2f1: series did not converge within 10000 terms");
}

} // namespace detail

// Gauss hypergeometric function for real parameters and 0 <= x <= 1
// (|x| < 1 is accepted for the series). Past x = 0.5 the argument is moved to
// 1 - x with the standard connection formula.
inline double hyp2f1(double a, double b, double c, double x) {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(x))
        throw DomainError("hyp2f1: non-finite input");
    if (detail::is_nonpositive_integer(c))
        throw DomainError("hyp2f1: c is a non-positive integer");
    if (x > 1.0 || x <= -1.0)
        throw DomainError("hyp2f1: x outside the supported range");
    double s = c - a - b;
    if (x == 1.0) {
        if (!(s > 0.0))
            throw DomainError("hyp2f1: divergent at x = 1 (c - a - b <= 0)");
        return std::tgamma(c) * std::tgamma(s) * detail::rgamma(c - a) * detail::rgamma(c - b);
    }
    if (x == 0.0 || a == 0.0 || b == 0.0)
        return 1.0;
    if (x <= 0.5)
        return detail::hyp2f1_series(a, b, c, x);

    // A polynomial (a or b a non-positive integer) terminates; no need to move.
    if (detail::is_nonpositive_integer(a) || detail::is_nonpositive_integer(b))
        return detail::hyp2f1_series(a, b, c, x);
    if (std::fabs(s - std::round(s)) < 1e-12)
        return detail::hyp2f1_series(a, b, c, x);

    double y = 1.0 - x;
    double g1 = std::tgamma(c) * std::tgamma(s) * detail::rgamma(c - a) * detail::rgamma(c - b);
    double g2 = std::tgamma(c) * std::tgamma(-s) * detail::rgamma(a) * detail::rgamma(b);
    double t1 = g1 == 0.0 ? 0.0 : g1 * detail::hyp2f1_series(a, b, 1.0 - s, y);
    double t2 = g2 == 0.0 ? 0.0 : g2 * std::pow(y, s) * detail::hyp2f1_series(c - a, c - b, 1.0 + s, y);
    return t1 + t2;
}

} // namespace perslab
