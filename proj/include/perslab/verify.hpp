#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "perslab/check_report.hpp"
#include "perslab/covariance.hpp"
#include "perslab/model.hpp"
#include "perslab/persistence.hpp"
#include "perslab/spectra.hpp"

namespace perslab {

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Combined 1-sigma of two estimates.
inline double sigma2(const ExponentEstimate& a, const ExponentEstimate& b) {
    return std::hypot(a.std_err, b.std_err);
}

} // namespace detail

inline CheckReport check_spectral_symmetry(const ProcessParams& p, const std::vector<double>& lambda_grid,
                                           double tol) {
    if (!(tol > 0.0))
        throw DomainError("check_spectral_symmetry: tol must be positive");
    auto q = symmetry_image(p);
    double worst = 0.0;
    for (double l : lambda_grid) {
        double a = spectral_density(p, l), b = spectral_density(q, l);
        worst = std::fmax(worst, std::fabs(a - b) / std::fmax(std::fabs(a), std::fabs(b)));
    }
    CheckReport r;
    r.name = "spectral_symmetry";
    r.measured = {worst};
    r.threshold = tol;
    r.passed = worst <= tol;
    r.details = family_tag(FractionalIntegratedNoise{p}) + " vs " + family_tag(FractionalIntegratedNoise{q});
    return r;
}

struct Eq4Bounds {
    double lower, upper;
};

inline Eq4Bounds eq4_bounds(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw DomainError("eq4_bounds: hurst must lie in (0, 1)");
    double hb = 1.0 - hurst;
    double lower = 0.5 * std::fmin(hurst, hb);
    double upper = hurst < 0.5 ? std::fmin(hurst, std::sqrt((1.0 - hurst * hurst) / 12.0)) : std::fmin(hb, 0.25);
    return {lower, upper};
}

inline CheckReport check_bounds_eq4(double hurst, const ExponentEstimate& est) {
    auto b = eq4_bounds(hurst);
    double lo = est.theta_hat - est.ci_half_width, hi = est.theta_hat + est.ci_half_width;
    CheckReport r;
    r.name = "alpha2_bounds";
    r.kind = CheckKind::Statistical;
    r.measured = {est.theta_hat, est.ci_half_width, b.lower, b.upper};
    r.threshold = est.ci_half_width;
    r.passed = hi >= b.lower - 1e-15 && lo <= b.upper + 1e-15;
    r.details = "H=" + detail::fmt(hurst) + " bounds [" + detail::fmt(b.lower) + ", " + detail::fmt(b.upper) +
                "], estimate " + detail::fmt(est.theta_hat) + " +- " + detail::fmt(est.ci_half_width);
    return r;
}

inline CheckReport check_monotone_alpha(const std::vector<std::pair<ProcessParams, ExponentEstimate>>& est) {
    CheckReport r;
    r.name = "monotone_alpha";
    r.kind = CheckKind::Statistical;
    r.threshold = 2.0;
    if (est.size() < 2) {
        r.details = "need at least two points";
        return r;
    }
    bool ok = true;
    std::ostringstream os;
    for (std::size_t i = 1; i < est.size(); ++i) {
        const auto& [p0, e0] = est[i - 1];
        const auto& [p1, e1] = est[i];
        if (p1.hurst() != p0.hurst() || !(p1.alpha() >= p0.alpha())) {
            r.details = "points must share H and have non-decreasing alpha";
            return r;
        }
        double s = detail::sigma2(e0, e1);
        double rise = e1.theta_hat - e0.theta_hat;
        // rise in units of the combined sigma; > 2 is a violation
        double z = s > 0.0 ? rise / s : (rise > 0.0 ? INFINITY : 0.0);
        r.measured.push_back(z);
        ok = ok && z <= 2.0;
        os << "alpha " << p0.alpha() << "->" << p1.alpha() << ": " << detail::fmt(e0.theta_hat) << " -> "
           << detail::fmt(e1.theta_hat) << " (z=" << detail::fmt(z) << "); ";
    }
    r.passed = ok;
    r.details = os.str();
    return r;
}

// image: estimate at the symmetric point (alpha + 2h - 1, 1 - h), if available.
inline CheckReport check_h_ordering(double alpha, double h, const ExponentEstimate& at_h,
                                    const ExponentEstimate& at_hbar,
                                    const std::optional<ExponentEstimate>& image = std::nullopt) {
    CheckReport r;
    r.name = "h_ordering";
    r.kind = CheckKind::Statistical;
    r.threshold = 2.0;
    if (!(h > 0.0 && h <= 0.5)) {
        r.details = "need 0 < h <= 1/2";
        return r;
    }
    double s = detail::sigma2(at_h, at_hbar);
    double gap = at_hbar.theta_hat - at_h.theta_hat;
    double z = s > 0.0 ? gap / s : (gap > 0.0 ? INFINITY : 0.0);
    r.measured.push_back(z);
    bool ok = z <= 2.0;
    std::ostringstream os;
    os << "alpha=" << alpha << " theta(" << h << ")=" << detail::fmt(at_h.theta_hat) << " theta(" << 1 - h
       << ")=" << detail::fmt(at_hbar.theta_hat);
    if (image) {
        double si = detail::sigma2(at_h, *image);
        double zi = si > 0.0 ? std::fabs(image->theta_hat - at_h.theta_hat) / si : 0.0;
        r.measured.push_back(zi);
        ok = ok && zi <= 2.0;
        os << "; image (" << alpha + 2 * h - 1 << ", " << 1 - h << ") " << detail::fmt(image->theta_hat)
           << " z=" << detail::fmt(zi);
    }
    r.passed = ok;
    r.details = os.str();
    return r;
}

// The comparison expression for the Laplace-dual family with a(H) = 1/H.
inline double slepian_expression_closed(double hurst, double t) {
    double hb = 1.0 - 2.0 * hurst, tau = 0.5 * t;
    return tau * std::sinh(hb * tau) / (hurst * std::cosh(tau)) * (std::tanh(tau) / std::tanh(hb * tau) - 1.0);
}

inline double slepian_expression_fd(double hurst, double t, double step = 1e-5) {
    auto B = [](double h, double s) { return cov_limit_alpha_inf(h, s); };
    double dh = (B(hurst + step, t) - B(hurst - step, t)) / (2.0 * step);
    double dt = (B(hurst, t + step) - B(hurst, t - step)) / (2.0 * step);
    return dh - dt * t / hurst;
}

inline CheckReport check_slepian_family_condition(std::pair<double, double> h_range, double eps,
                                                  std::size_t n_t = 200, std::size_t n_h = 36) {
    auto [lo, hi] = h_range;
    CheckReport r;
    r.name = "slepian_family_condition";
    r.threshold = 1e-6;
    if (!(lo > 0.0 && lo < hi && hi < 0.5) || !(eps > 0.0 && eps < 1.0) || n_t < 2 || n_h < 2) {
        r.details = "need 0 < lo < hi < 1/2, 0 < eps < 1 and at least 2 grid points per axis";
        return r;
    }
    double min_val = INFINITY, max_dev = 0.0, arg_t = 0, arg_h = 0;
    double lt0 = std::log(eps), lt1 = -std::log(eps);
    for (std::size_t j = 0; j < n_h; ++j) {
        double h = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n_h - 1);
        for (std::size_t i = 0; i < n_t; ++i) {
            double t = std::exp(lt0 + (lt1 - lt0) * static_cast<double>(i) / static_cast<double>(n_t - 1));
            double cf = slepian_expression_closed(h, t);
            double fd = slepian_expression_fd(h, t);
            max_dev = std::fmax(max_dev, std::fabs(cf - fd));
            if (cf < min_val) {
                min_val = cf;
                arg_t = t;
                arg_h = h;
            }
        }
    }
    r.measured = {min_val, max_dev};
    r.passed = min_val > 0.0 && max_dev <= r.threshold;
    r.details = "min " + detail::fmt(min_val) + " at (t=" + detail::fmt(arg_t) + ", H=" + detail::fmt(arg_h) +
                "), closed form vs differences " + detail::fmt(max_dev);
    return r;
}

// Near-zero and tail behaviour of the Laplace-dual covariance, on grids
// extending past the slepian_family_condition box:
// 1 - B ~ H(1-H) t^2 / 2 as t -> 0 and B e^{(H ^ 1-H) t} -> 1 as t -> inf.
inline CheckReport check_slepian_asymptotics(std::pair<double, double> h_range, double eps, double tol = 1e-3) {
    auto [lo, hi] = h_range;
    CheckReport r;
    r.name = "slepian_asymptotics";
    r.threshold = tol;
    double worst_small = 0.0, worst_large = 0.0;
    for (int j = 0; j <= 20; ++j) {
        double h = lo + (hi - lo) * j / 20.0;
        double c = std::fmin(h, 1.0 - h);
        for (double t = eps * 1e-3; t <= eps * 1e-1; t *= 2.0) {
            double ratio = -std::expm1(std::log(cov_limit_alpha_inf(h, t))) / (0.5 * h * (1.0 - h) * t * t);
            worst_small = std::fmax(worst_small, std::fabs(ratio - 1.0));
        }
        for (double t = 20.0 / eps; t <= 80.0 / eps; t *= 1.5) {
            double ratio = std::exp(std::log(cov_limit_alpha_inf(h, t)) + c * t);
            worst_large = std::fmax(worst_large, std::fabs(ratio - 1.0));
        }
    }
    r.measured = {worst_small, worst_large};
    r.passed = worst_small <= tol && worst_large <= tol;
    r.details = "relative deviation near 0: " + detail::fmt(worst_small) + ", in the tail: " + detail::fmt(worst_large);
    return r;
}

inline CheckReport check_cov_domination(double hurst, const std::vector<double>& t_grid) {
    CheckReport r;
    r.name = "cov_domination";
    r.threshold = 0.0;
    if (!(hurst > 0.0 && 2.0 * hurst <= 1.0)) {
        r.details = "need 0 < 2H <= 1";
        return r;
    }
    double worst = -INFINITY;
    for (double t : t_grid) {
        double lhs = cov_limit_alpha_inf(hurst, t);
        double rhs = cov_limit_alpha_inf(0.5, 2.0 * hurst * t);
        // relative excess; rounding allowance of a few ulps
        worst = std::fmax(worst, (lhs - rhs) / rhs);
    }
    r.measured = {worst};
    r.passed = worst <= 8.0 * std::numeric_limits<double>::epsilon();
    r.details = "max relative excess of B_H(t) over B_1/2(2Ht): " + detail::fmt(worst);
    return r;
}

inline double limit_exponent_target(double hurst) { return 0.375 * c_of_h(hurst); }

// sup_t |B_alpha,H(t) - B_inf,H(t)| on the lag grid.
inline double limit_cov_distance(double alpha, double hurst, double lag_step, std::size_t n_lags,
                                 unsigned workers = 1) {
    auto table = cov_from_spectrum(make_params(alpha, hurst), lag_step, n_lags, workers);
    double d = 0.0;
    for (std::size_t k = 0; k <= n_lags; ++k)
        d = std::fmax(d, std::fabs(table.values[k] - cov_limit_alpha_inf(hurst, lag_step * static_cast<double>(k))));
    return d;
}

// Covariance distances must strictly decrease in alpha. With estimates, the
// distance |theta_alpha - 3/8 (H ^ 1-H)| must not grow by more than 2 sigma,
// and the limit family estimate must sit within 2 sigma of the target.
inline CheckReport check_limit_alpha_inf(double hurst, const std::vector<double>& alphas,
                                         const std::vector<ExponentEstimate>& estimates = {},
                                         const std::optional<ExponentEstimate>& limit = std::nullopt,
                                         double lag_step = 0.05, std::size_t n_lags = 400, unsigned workers = 1) {
    CheckReport r;
    r.name = "limit_alpha_inf";
    r.kind = estimates.empty() && !limit ? CheckKind::Analytic : CheckKind::Statistical;
    r.threshold = 2.0;
    if (alphas.size() < 2 || !std::is_sorted(alphas.begin(), alphas.end()) ||
        (!estimates.empty() && estimates.size() != alphas.size())) {
        r.details = "need increasing alphas and one estimate per alpha";
        return r;
    }
    bool ok = true;
    std::ostringstream os;
    std::vector<double> dist;
    for (double a : alphas)
        dist.push_back(limit_cov_distance(a, hurst, lag_step, n_lags, workers));
    os << "covariance sup-distance:";
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        os << " " << alphas[i] << ":" << detail::fmt(dist[i]);
        if (i > 0)
            ok = ok && dist[i] < dist[i - 1];
        r.measured.push_back(dist[i]);
    }
    double target = limit_exponent_target(hurst);
    if (!estimates.empty()) {
        os << "; |theta - " << detail::fmt(target) << "|:";
        for (std::size_t i = 0; i < estimates.size(); ++i) {
            double d = std::fabs(estimates[i].theta_hat - target);
            os << " " << detail::fmt(d);
            if (i > 0)
                ok = ok && d <= std::fabs(estimates[i - 1].theta_hat - target) +
                                    2.0 * detail::sigma2(estimates[i], estimates[i - 1]);
            r.measured.push_back(d);
        }
    }
    if (limit) {
        double z = limit->std_err > 0 ? std::fabs(limit->theta_hat - target) / limit->std_err : 0.0;
        os << "; limit family " << detail::fmt(limit->theta_hat) << " (z=" << detail::fmt(z) << ")";
        ok = ok && z <= 2.0;
        r.measured.push_back(z);
    }
    r.passed = ok;
    r.details = os.str();
    return r;
}

// Symmetry and normalization over a parameter list.
inline std::vector<CheckReport> analytic_spectrum_suite(const std::vector<std::pair<double, double>>& points,
                                                        const std::vector<double>& lambda_grid,
                                                        double symmetry_tol = 1e-10, double norm_tol = 1e-6) {
    std::vector<CheckReport> out;
    for (auto [a, h] : points) {
        auto p = make_params(a, h);
        out.push_back(check_spectral_symmetry(p, lambda_grid, symmetry_tol));
        out.push_back(verify_normalization(p, norm_tol));
    }
    return out;
}

} // namespace perslab
