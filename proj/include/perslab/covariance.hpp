#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "perslab/model.hpp"
#include "perslab/parallel.hpp"
#include "perslab/quadrature.hpp"
#include "perslab/specfun.hpp"
#include "perslab/spectra.hpp"

namespace perslab {

// values[k] = B(k * lag_step), k = 0..n_lags.
struct CovarianceTable {
    double lag_step = 0.0;
    std::vector<double> values;
    std::string params_tag;
    double kappa = std::numeric_limits<double>::quiet_NaN();
    double max_error = 0.0;

    std::size_t n_lags() const { return values.empty() ? 0 : values.size() - 1; }
    double max_lag() const { return lag_step * static_cast<double>(n_lags()); }
};

struct SmallLagFit {
    double exponent_hat;
    double prefactor_hat;
    std::pair<double, double> fit_window;
    double residual;
    std::size_t n_points;
};

inline double cov_limit_alpha_inf(double hurst, double t) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw DomainError("cov_limit_alpha_inf: hurst must lie in (0, 1)");
    if (!std::isfinite(t))
        throw DomainError("cov_limit_alpha_inf: t must be finite");
    double tau = 0.5 * std::fabs(t);
    double hb = std::fabs(2.0 * hurst - 1.0);
    return std::exp((hb - 1.0) * tau) * (1.0 + std::exp(-2.0 * hb * tau)) / (1.0 + std::exp(-2.0 * tau));
}

// cosh(Ht) - (2 sinh(t/2))^{2H} / 2, rearranged to avoid cancellation at large t.
inline double cov_fbm_dual(double hurst, double t) {
    if (!(hurst > 0.0 && hurst < 1.0))
        throw DomainError("cov_fbm_dual: hurst must lie in (0, 1)");
    t = std::fabs(t);
    if (t == 0.0)
        return 1.0;
    double h = hurst;
    double gap = -std::expm1(2.0 * h * std::log1p(-std::exp(-t)));
    return 0.5 * std::exp(-h * t) + 0.5 * std::exp(h * t) * gap;
}

inline double q_kappa(double kappa, double t) {
    return (1.0 - 2.0 * kappa) / (1.0 + 2.0 * kappa)
           * hyp2f1(2.0 * kappa, 0.5 + kappa, 1.5 + kappa, std::exp(-t));
}

// Closed form at H = 1/2, alpha = kappa + 1/2, valid for 0 < kappa < 1/2.
inline double cov_half_closed(double kappa, double t) {
    if (!(kappa > 0.0 && kappa < 0.5))
        throw DomainError("cov_half_closed: kappa must lie in (0, 1/2)");
    if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError("cov_half_closed: t must be finite and non-negative");
    if (t == 0.0)
        return 1.0;
    double q = q_kappa(kappa, t);
    if (q > 1.0)
        throw ComputeError("cov_half_closed: q_kappa exceeded 1");
    double g = -std::expm1(-t);
    return std::exp(-0.5 * t) * (1.0 - std::pow(g, 2.0 * kappa) * q);
}

namespace detail {

// Integral over the real line of cos(t l) (s^2 + l^2)^{-nu-1/2}.
inline double matern_transform(double nu, double s, double t) {
    t = std::fabs(t);
    if (t == 0.0)
        return std::sqrt(std::numbers::pi) * std::exp(std::lgamma(nu) - std::lgamma(nu + 0.5)) * std::pow(s, -2.0 * nu);
    double x = s * t;
    if (x > 700.0)
        return 0.0;
    double kv = std::cyl_bessel_k(nu, x);
    if (kv == 0.0)
        return 0.0;
    return std::exp(std::log(2.0 * std::sqrt(std::numbers::pi)) - std::lgamma(nu + 0.5)
                    + nu * std::log(t / (2.0 * s)) + std::log(kv));
}

} // namespace detail

// Cosine transform of the spectrum. Two Matern-type terms carry the exact
// lambda^{-2k-1}(1 - d/lambda^2) tail in closed form; the residual decays like
// lambda^{-2k-5} and is integrated with one shared Gauss-Kronrod node set.
inline CovarianceTable cov_from_spectrum(const ProcessParams& p, double lag_step, std::size_t n_lags,
                                         unsigned workers = 1) {
    if (!(lag_step > 0.0) || !std::isfinite(lag_step))
        throw DomainError("cov_from_spectrum: lag_step must be positive");
    if (n_lags < 2)
        throw DomainError("cov_from_spectrum: n_lags must be at least 2");

    const double k = p.kappa();
    const double a = k + 1.0;
    const double s = a;
    const auto tail = spectral_tail(p);
    const double c1 = tail.c;
    const double c2 = tail.c * a * (2.0 * a - 1.0) * (2.0 * a + 1.0) / 6.0;
    auto model = [&](double l) {
        double q = s * s + l * l;
        return c1 * std::pow(q, -k - 0.5) + c2 * std::pow(q, -k - 1.5);
    };
    auto resid = [&](double l) { return spectral_density(p, l) - model(l); };

    double L = std::fmax(40.0, 8.0 * a);
    double tail_bound = 0.0;
    for (;;) {
        tail_bound = std::fabs(resid(L)) * L / (2.0 * k + 4.0);
        if (2.0 * tail_bound < 1e-9 || L >= 1e5)
            break;
        L *= 2.0;
    }

    const double t_max = lag_step * static_cast<double>(n_lags);
    const double w_max = std::fmin(1.0, 4.0 / t_max);
    std::vector<double> breaks{0.0};
    for (double b = 0.25; b < L; b *= 2.0)
        breaks.push_back(b);
    breaks.push_back(L);
    auto coarse = adapt_panels(resid, breaks, 1e-13);
    std::vector<std::pair<double, double>> panels;
    for (auto [lo, hi] : coarse) {
        auto m = static_cast<std::size_t>(std::ceil((hi - lo) / w_max));
        for (std::size_t j = 0; j < m; ++j)
            panels.emplace_back(lo + (hi - lo) * j / m, lo + (hi - lo) * (j + 1) / m);
    }
    const PanelRule rule = make_panel_rule(panels);
    const std::size_t n_nodes = rule.nodes.size();
    std::vector<double> rv(n_nodes), rot_c(n_nodes), rot_s(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        rv[i] = resid(rule.nodes[i]);
        rot_c[i] = std::cos(lag_step * rule.nodes[i]);
        rot_s[i] = std::sin(lag_step * rule.nodes[i]);
    }

    const std::size_t n_vals = n_lags + 1;
    constexpr std::size_t block = 128;
    const std::size_t n_blocks = (n_vals + block - 1) / block;
    std::vector<double> sums(n_vals, 0.0), errs(n_vals, 0.0);
    parallel_blocks(n_blocks, workers, [&](std::size_t b) {
        std::size_t k0 = b * block;
        std::size_t k1 = std::min(n_vals, k0 + block);
        std::size_t nk = k1 - k0;
        double cc[15], ss[15];
        for (std::size_t pa = 0; pa < panels.size(); ++pa) {
            std::size_t base = 15 * pa;
            for (int j = 0; j < 15; ++j) {
                double ph = static_cast<double>(k0) * lag_step * rule.nodes[base + j];
                cc[j] = std::cos(ph);
                ss[j] = std::sin(ph);
            }
            for (std::size_t q = 0; q < nk; ++q) {
                double kk = 0.0, gg = 0.0;
                for (int j = 0; j < 15; ++j) {
                    double v = rv[base + j] * cc[j];
                    kk += rule.w_kronrod[base + j] * v;
                    gg += rule.w_gauss[base + j] * v;
                    double nc = cc[j] * rot_c[base + j] - ss[j] * rot_s[base + j];
                    ss[j] = ss[j] * rot_c[base + j] + cc[j] * rot_s[base + j];
                    cc[j] = nc;
                }
                sums[k0 + q] += kk;
                errs[k0 + q] += std::fabs(kk - gg);
            }
        }
    });

    CovarianceTable t;
    t.lag_step = lag_step;
    t.values.resize(n_vals);
    t.kappa = k;
    std::ostringstream os;
    os.precision(17);
    os << "spectral(alpha=" << p.alpha() << ",hurst=" << p.hurst() << ")";
    t.params_tag = os.str();
    for (std::size_t i = 0; i < n_vals; ++i) {
        double lag = lag_step * static_cast<double>(i);
        t.values[i] = detail::matern_transform(k, s, lag) * c1 + detail::matern_transform(k + 1.0, s, lag) * c2
                      + 2.0 * sums[i];
        double e = 2.0 * (errs[i] + tail_bound);
        t.max_error = std::fmax(t.max_error, e);
    }
    if (t.max_error > 1e-6) {
        std::ostringstream es;
        es << "cov_from_spectrum: error estimate " << t.max_error << " exceeds 1e-6";
        throw QuadratureError(es.str());
    }
    return t;
}

inline CovarianceTable cov_table_from_function(double lag_step, std::size_t n_lags, std::string tag,
                                               double kappa, auto&& fn) {
    if (!(lag_step > 0.0) || n_lags < 2)
        throw DomainError("covariance table: lag_step must be positive and n_lags >= 2");
    CovarianceTable t;
    t.lag_step = lag_step;
    t.params_tag = std::move(tag);
    t.kappa = kappa;
    t.values.resize(n_lags + 1);
    for (std::size_t i = 0; i <= n_lags; ++i)
        t.values[i] = fn(lag_step * static_cast<double>(i));
    return t;
}

inline CovarianceTable family_covariance_table(const ProcessFamily& f, double lag_step, std::size_t n_lags,
                                               unsigned workers = 1) {
    if (auto* n = std::get_if<FractionalIntegratedNoise>(&f))
        return cov_from_spectrum(n->params, lag_step, n_lags, workers);
    if (auto* l = std::get_if<LaplaceFbmDual>(&f)) {
        double h = l->hurst;
        return cov_table_from_function(lag_step, n_lags, family_tag(f), INFINITY,
                                       [h](double t) { return cov_limit_alpha_inf(h, t); });
    }
    return cov_table_from_function(lag_step, n_lags, family_tag(f), 0.5, [](double t) { return std::exp(-t); });
}

enum class DoubleIntegralRoute { Auto, FractionalNoise, IntegratedFbm, Brownian };

namespace detail {

// Autocorrelation of phi_{a,h}(v) = (1 - e^{-v})^{a-1} e^{-hv}, without 1/Gamma(a).
class PhiCorrelation {
public:
    PhiCorrelation(double a, double h) : a_(a), h_(h), s_max_(40.0 / h + 10.0) {}

    double phi(double v) const { return std::pow(-std::expm1(-v), a_ - 1.0) * std::exp(-h_ * v); }

    double operator()(double w) const {
        w = std::fabs(w);
        auto g = [&](double s) { return phi(s) * phi(s + w); };
        double total = 0.0, err = 0.0;
        bool ok = true;
        double head = std::fmin(1.0, s_max_);
        if (a_ < 1.0) {
            // s = y^{1/a} makes phi(s) ds bounded near the origin.
            double ia = 1.0 / a_;
            auto gy = [&](double y) {
                if (y <= 0.0)
                    return 0.0;
                double s = std::pow(y, ia);
                return g(s) * ia * std::pow(y, ia - 1.0);
            };
            auto r = integrate(gy, 0.0, std::pow(head, a_), 1e-13, 1e-10);
            total += r.value;
            err += r.error;
            ok = ok && r.converged;
        } else {
            auto r = integrate(g, 0.0, head, 1e-13, 1e-10);
            total += r.value;
            err += r.error;
            ok = ok && r.converged;
        }
        auto r = integrate(g, std::vector<double>{head, 4.0, 16.0, s_max_}, 1e-13, 1e-10);
        total += r.value;
        err += r.error;
        ok = ok && r.converged;
        if (!ok)
            throw SingularityError("cov_double_integral: inner kernel integral failed tolerance");
        return total;
    }

private:
    double a_, h_, s_max_;
};

// Integral of g(w) |w - c|^{-gamma} over [c, c + len] (len may be negative),
// with the power substitution that removes the endpoint singularity.
template <class G>
QuadResult singular_piece(G&& g, double c, double len, double gamma, double tol) {
    double e = 1.0 / (1.0 - gamma);
    double scale = std::pow(std::fabs(len), 1.0 - gamma) * e;
    auto fv = [&](double v) {
        if (v <= 0.0)
            return 0.0;
        double w = c + len * std::pow(v, e);
        return g(w) * scale;
    };
    return integrate(fv, 0.0, 1.0, tol, 1e-9);
}

} // namespace detail

// Covariance of the dual from the double-integral kernel representations,
// normalized by its own value at t = 0.
inline double cov_double_integral(const ProcessParams& p, double t,
                                  DoubleIntegralRoute route = DoubleIntegralRoute::Auto) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError("cov_double_integral: t must be finite and non-negative");
    ProcessParams q = p;
    if (route == DoubleIntegralRoute::Auto) {
        if (p.hurst() > 0.5)
            route = DoubleIntegralRoute::FractionalNoise;
        else if (p.alpha() > 1.0)
            route = DoubleIntegralRoute::IntegratedFbm;
        else if (p.hurst() == 0.5)
            route = DoubleIntegralRoute::Brownian;
        else {
            q = symmetry_image(p);
            route = DoubleIntegralRoute::FractionalNoise;
        }
    }
    const double alpha = q.alpha(), h = q.hurst();
    if (route == DoubleIntegralRoute::FractionalNoise && !(h > 0.5))
        throw DomainError("cov_double_integral: fractional-noise kernel needs H > 1/2");
    if (route == DoubleIntegralRoute::IntegratedFbm && !(alpha > 1.0))
        throw DomainError("cov_double_integral: integrated-FBM kernel needs alpha > 1");
    if (route == DoubleIntegralRoute::Brownian && h != 0.5)
        throw DomainError("cov_double_integral: Brownian kernel needs H = 1/2");

    if (route == DoubleIntegralRoute::Brownian) {
        detail::PhiCorrelation g(alpha, 0.5);
        return g(t) / g(0.0);
    }

    const bool noise = route == DoubleIntegralRoute::FractionalNoise;
    detail::PhiCorrelation G(noise ? alpha : alpha - 1.0, noise ? h : h + 1.0);
    const double gamma = noise ? 2.0 * (1.0 - h) : 0.0;
    auto kernel = [&](double x) {
        if (noise)
            return std::pow(2.0 * std::sinh(0.5 * std::fabs(x)), -gamma);
        return cov_fbm_dual(h, x);
    };

    // B(t) is proportional to the integral over w >= 0 of G(w)[K(t - w) + K(t + w)].
    auto unnormalized = [&](double tt) {
        double w_end = tt + 60.0;
        double total = 0.0, err = 0.0;
        bool ok = true;
        auto add = [&](const QuadResult& r) {
            total += r.value;
            err += r.error;
            ok = ok && r.converged;
        };
        if (noise) {
            // K(x) = |x|^{-gamma} * ratio(x) with ratio smooth and ratio(0) = 1.
            auto ratio = [&](double x) {
                double ax = std::fabs(x);
                return ax == 0.0 ? 1.0 : std::pow(2.0 * std::sinh(0.5 * ax) / ax, -gamma);
            };
            auto near = [&](double w) { return G(w) * ratio(tt - w); };
            auto minus = [&](double w) { return G(w) * kernel(tt - w); };
            double mult = tt > 0.0 ? 1.0 : 2.0; // at t = 0 both kernel terms coincide
            double left = std::fmin(tt, 1.0);
            if (left > 0.0)
                add(detail::singular_piece(near, tt, -left, gamma, 1e-10));
            if (tt > left)
                add(integrate(minus, 0.0, tt - left, 1e-10, 1e-9));
            QuadResult r1 = detail::singular_piece(near, tt, 1.0, gamma, 1e-10);
            QuadResult r2 = integrate(minus, tt + 1.0, w_end, 1e-10, 1e-9);
            r1.value *= mult;
            r2.value *= mult;
            add(r1);
            add(r2);
            if (tt > 0.0)
                add(integrate([&](double w) { return G(w) * kernel(tt + w); },
                              std::vector<double>{0.0, 1.0, 4.0, w_end}, 1e-10, 1e-9));
        } else {
            auto both = [&](double w) { return G(w) * (kernel(tt - w) + kernel(tt + w)); };
            std::vector<double> br{0.0, w_end};
            if (tt > 0.0)
                br.push_back(tt);
            br.push_back(std::fmin(1.0, w_end));
            add(integrate(both, br, 1e-10, 1e-9));
        }
        if (!ok)
            throw QuadratureError("cov_double_integral: outer integral failed tolerance");
        return total;
    };
    return unnormalized(t) / unnormalized(0.0);
}

// Least-squares slope of ln(1 - B) against ln t on [t_lo, t_hi].
inline SmallLagFit small_lag_exponent(const CovarianceTable& table, double t_lo = 1e-3, double t_hi = 1e-1) {
    if (std::isfinite(table.kappa) && table.kappa >= 1.0)
        throw FitError("small_lag_exponent: the small-lag law needs kappa < 1");
    std::vector<double> xs, ys;
    for (std::size_t i = 1; i < table.values.size(); ++i) {
        double t = table.lag_step * static_cast<double>(i);
        if (t < t_lo * (1.0 - 1e-12) || t > t_hi * (1.0 + 1e-12))
            continue;
        double g = 1.0 - table.values[i];
        if (!(g > 0.0))
            continue;
        xs.push_back(std::log(t));
        ys.push_back(std::log(g));
    }
    if (xs.size() < 8)
        throw FitError("small_lag_exponent: fewer than 8 usable points in the fit window");
    double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    double slope = sxy / sxx;
    double icpt = my - slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double e = ys[i] - (icpt + slope * xs[i]);
        ss += e * e;
    }
    return {slope, std::exp(icpt), {t_lo, t_hi}, std::sqrt(ss / n), xs.size()};
}

} // namespace perslab
