#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "perslab/simulate.hpp"

namespace perslab {

enum class SurvivalMode { SelfSimilar, Stationary };

inline const char* to_string(SurvivalMode m) {
    return m == SurvivalMode::SelfSimilar ? "self_similar" : "stationary";
}

// Level 0 is the stationary convention, anything else the self-similar one.
inline SurvivalMode infer_mode(double level) {
    return level == 0.0 ? SurvivalMode::Stationary : SurvivalMode::SelfSimilar;
}

struct SurvivalCurve {
    std::vector<double> horizons; // regression abscissa: ln T (self-similar) or T (stationary)
    std::vector<double> times;    // T itself
    std::vector<double> surv;     // P-hat
    std::vector<double> log_surv; // -ln P-hat
    std::vector<double> std_err;  // Wilson (z = 1) half-width for P-hat
    std::vector<std::size_t> survivors;
    double level = 0.0;
    std::size_t n_paths = 0;
    SurvivalMode mode = SurvivalMode::Stationary;
    std::uint64_t seed = 0;
    std::string grid;
    std::string generator_tag;
};

struct ExponentEstimate {
    double theta_hat = 0.0;
    double ci_half_width = 0.0; // 95%
    std::pair<double, double> fit_window{0.0, 0.0};
    double r_squared = 0.0;
    SurvivalMode mode = SurvivalMode::Stationary;
    double std_err = 0.0;
    std::size_t n_points = 0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

inline double wilson_half_width(std::size_t k, std::size_t n) {
    double nn = static_cast<double>(n);
    double p = static_cast<double>(k) / nn;
    double z2 = 1.0;
    return std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / (1.0 + z2 / nn);
}

// First grid index at which each path reaches the level, on the subgrids of
// every listed stride (subgrid = indices 0, s, 2s, ...). n_points if never.
struct FirstPassage {
    TimeGrid grid;
    double level = 0.0;
    std::vector<std::size_t> strides;
    std::size_t n_paths = 0;
    std::vector<std::vector<std::uint32_t>> index; // [stride][path]
    std::uint64_t seed = 0;
    std::string generator_tag;
};

namespace detail {

inline void scan_path(const double* x, std::size_t n, double level, const std::vector<std::size_t>& strides,
                      FirstPassage& fp, std::size_t path) {
    for (std::size_t s = 0; s < strides.size(); ++s) {
        std::size_t st = strides[s];
        std::size_t hit = n;
        for (std::size_t i = 0; i < n; i += st)
            if (x[i] >= level) {
                hit = i;
                break;
            }
        fp.index[s][path] = static_cast<std::uint32_t>(hit);
    }
}

inline FirstPassage make_first_passage(const TimeGrid& g, double level, std::vector<std::size_t> strides,
                                       std::size_t n_paths, std::uint64_t seed, std::string tag) {
    if (strides.empty())
        strides = {1};
    for (auto s : strides)
        if (s == 0)
            throw DomainError("first passage: strides must be positive");
    if (g.size() >= std::numeric_limits<std::uint32_t>::max())
        throw DomainError("first passage: grid too long");
    FirstPassage fp;
    fp.grid = g;
    fp.level = level;
    fp.strides = std::move(strides);
    fp.n_paths = n_paths;
    fp.seed = seed;
    fp.generator_tag = std::move(tag);
    fp.index.assign(fp.strides.size(), std::vector<std::uint32_t>(n_paths));
    return fp;
}

} // namespace detail

inline FirstPassage first_passage(const PathEnsemble& e, double level, std::vector<std::size_t> strides = {1}) {
    auto fp = detail::make_first_passage(e.grid, level, std::move(strides), e.n_paths, e.seed, e.generator_tag);
    for (std::size_t p = 0; p < e.n_paths; ++p)
        detail::scan_path(e.path(p).data(), e.n_points(), level, fp.strides, fp, p);
    return fp;
}

// Streaming variant: paths are generated, scanned and dropped.
inline FirstPassage scan_first_passage(const PathSource& src, std::size_t n_paths, std::uint64_t seed,
                                       unsigned workers, double level, std::vector<std::size_t> strides = {1}) {
    auto fp = detail::make_first_passage(src.grid(), level, std::move(strides), n_paths, seed, src.tag());
    const std::size_t n = src.grid().size();
    stream_paths(src, n_paths, seed, workers, [&](std::size_t first, std::size_t count, const double* d) {
        for (std::size_t q = 0; q < count; ++q)
            detail::scan_path(d + q * n, n, level, fp.strides, fp, first + q);
    });
    return fp;
}

// Grid index of horizon T: the last grid point not beyond T.
inline std::size_t horizon_index(const TimeGrid& g, double T) {
    const double tol = 1e-9 * std::fmax(1.0, std::fabs(T));
    if (T < g.points.front() - tol || T > g.points.back() + tol)
        throw DomainError("survival: horizon outside the grid span");
    std::size_t lo = 0, hi = g.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        if (g.points[mid] <= T + tol)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

// Survivor counts at each horizon index; paths with path % groups == skip_group are left out.
inline std::vector<std::size_t> survivor_counts(const FirstPassage& fp, std::size_t stride_slot,
                                                const std::vector<std::size_t>& h_index,
                                                std::size_t groups = 1, std::size_t skip_group = SIZE_MAX) {
    const std::size_t n_pts = fp.grid.size();
    std::vector<std::size_t> hist(n_pts + 1, 0);
    const auto& idx = fp.index.at(stride_slot);
    for (std::size_t p = 0; p < fp.n_paths; ++p) {
        if (groups > 1 && p % groups == skip_group)
            continue;
        ++hist[idx[p]];
    }
    // survivors(h) = #{first hit > h}
    std::vector<std::size_t> above(n_pts + 1, 0);
    std::size_t acc = 0;
    for (std::size_t i = n_pts + 1; i-- > 0;) {
        above[i] = acc;
        acc += hist[i];
    }
    std::vector<std::size_t> out;
    out.reserve(h_index.size());
    for (auto h : h_index)
        out.push_back(above[h]);
    return out;
}

inline SurvivalCurve curve_from_counts(const std::vector<double>& times, const std::vector<std::size_t>& counts,
                                       std::size_t n_paths, double level, SurvivalMode mode) {
    SurvivalCurve c;
    c.level = level;
    c.n_paths = n_paths;
    c.mode = mode;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double p = static_cast<double>(counts[i]) / static_cast<double>(n_paths);
        c.times.push_back(times[i]);
        c.horizons.push_back(mode == SurvivalMode::SelfSimilar ? std::log(times[i]) : times[i]);
        c.surv.push_back(p);
        c.log_surv.push_back(p > 0.0 ? -std::log(p) : INFINITY);
        c.std_err.push_back(wilson_half_width(counts[i], n_paths));
        c.survivors.push_back(counts[i]);
    }
    return c;
}

inline void require_survivors(const SurvivalCurve& c) {
    for (std::size_t i = 0; i < c.survivors.size(); ++i)
        if (c.survivors[i] == 0) {
            double last = i == 0 ? std::numeric_limits<double>::quiet_NaN() : c.times[i - 1];
            std::ostringstream os;
            os << "survival: no surviving path at horizon " << c.times[i] << "; largest usable horizon " << last;
            throw DegenerateError(os.str(), last);
        }
}

inline SurvivalCurve survival_from_first_passage(const FirstPassage& fp, const std::vector<double>& horizons,
                                                 std::size_t stride_slot = 0,
                                                 std::optional<SurvivalMode> mode = std::nullopt) {
    std::vector<std::size_t> hi;
    for (double T : horizons)
        hi.push_back(horizon_index(fp.grid, T));
    for (std::size_t i = 1; i < horizons.size(); ++i)
        if (!(horizons[i] > horizons[i - 1]))
            throw DomainError("survival: horizons must be increasing");
    auto m = mode.value_or(infer_mode(fp.level));
    auto c = curve_from_counts(horizons, survivor_counts(fp, stride_slot, hi), fp.n_paths, fp.level, m);
    c.seed = fp.seed;
    c.grid = fp.grid.describe();
    c.generator_tag = fp.generator_tag;
    require_survivors(c);
    return c;
}

inline SurvivalCurve survival_probability(const PathEnsemble& e, double level, const std::vector<double>& horizons,
                                          std::optional<SurvivalMode> mode = std::nullopt) {
    if (e.n_paths < 100)
        throw DomainError("survival_probability: need at least 100 paths");
    return survival_from_first_passage(first_passage(e, level), horizons, 0, mode);
}

inline double brownian_survival_oracle(double T, double level) {
    if (!(T > 0.0) || !(level > 0.0))
        throw DomainError("brownian_survival_oracle: need T > 0 and level > 0");
    return std::erf(level / std::sqrt(2.0 * T));
}

// Slepian block bound for non-negatively correlated stationary processes:
// P(T) >= P(block)^{[T]+1}. With horizon 0 the asymptotic bound theta <= b is
// returned. With a finite horizon T (unit blocks) it is the bound
// ([T]+1) b / T on -ln P(T) / T.
inline double subadditive_upper_bound(double block_log_surv, double horizon = 0.0) {
    if (!(block_log_surv >= 0.0) || !(horizon >= 0.0))
        throw DomainError("subadditive_upper_bound: inputs must be non-negative");
    if (horizon == 0.0)
        return block_log_surv;
    return (std::floor(horizon) + 1.0) * block_log_surv / horizon;
}

struct FitOptions {
    std::size_t min_survivors = 20;
    std::optional<std::pair<double, double>> window; // abscissa range; default upper half of usable horizons
    double min_r_squared = 0.95;
    std::size_t min_points = 6;
};

namespace detail {

struct LineFit {
    double slope, se, intercept, r2;
};

// GLS slope of the nested-event curve. Increments of -ln P-hat over disjoint
// horizon intervals are conditionally independent with variance
// (e^{theta dx} - 1) / S_prev, so the GLS problem is diagonal in increments.
inline LineFit nested_gls(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& s_prev_all) {
    const std::size_t k = x.size();
    double theta = (y.back() - y.front()) / (x.back() - x.front());
    double se = 0.0;
    for (int it = 0; it < 4; ++it) {
        double num = 0.0, den = 0.0;
        double th = std::fmax(theta, 1e-8);
        for (std::size_t i = 1; i < k; ++i) {
            double dx = x[i] - x[i - 1];
            double var = std::expm1(th * dx) / s_prev_all[i];
            double w = 1.0 / var;
            num += w * dx * (y[i] - y[i - 1]);
            den += w * dx * dx;
        }
        theta = num / den;
        se = std::sqrt(1.0 / den);
    }
    double a = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        a += y[i] - theta * x[i];
    a /= static_cast<double>(k);
    double my = 0.0;
    for (double v : y)
        my += v;
    my /= static_cast<double>(k);
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double e = y[i] - (a + theta * x[i]);
        ss_res += e * e;
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return {theta, se, a, r2};
}

} // namespace detail

// Indices of curve points used by the fit under the options.
inline std::vector<std::size_t> fit_indices(const SurvivalCurve& c, const FitOptions& opt = {}) {
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < c.horizons.size(); ++i) {
        if (c.survivors[i] < opt.min_survivors)
            break;
        usable.push_back(i);
    }
    std::vector<std::size_t> out;
    if (opt.window) {
        for (auto i : usable)
            if (c.horizons[i] >= opt.window->first - 1e-12 && c.horizons[i] <= opt.window->second + 1e-12)
                out.push_back(i);
    } else {
        out.assign(usable.begin() + static_cast<std::ptrdiff_t>(usable.size() / 2), usable.end());
    }
    return out;
}

inline ExponentEstimate fit_exponent_on(const SurvivalCurve& c, const std::vector<std::size_t>& idx,
                                        const FitOptions& opt = {}) {
    if (idx.size() < opt.min_points) {
        std::ostringstream os;
        os << "fit_exponent: " << idx.size() << " usable horizons in the fit window, need " << opt.min_points;
        throw FitError(os.str());
    }
    std::vector<double> x, y, sp;
    for (auto i : idx) {
        x.push_back(c.horizons[i]);
        y.push_back(c.log_surv[i]);
        sp.push_back(static_cast<double>(c.survivors[i]));
    }
    // S_prev for increment i is the survivor count at the previous fit point.
    std::vector<double> s_prev(sp.size(), 0.0);
    for (std::size_t i = 1; i < sp.size(); ++i)
        s_prev[i] = sp[i - 1];
    auto fit = detail::nested_gls(x, y, s_prev);
    if (fit.r2 < opt.min_r_squared) {
        std::ostringstream os;
        os << "fit_exponent: r^2 = " << fit.r2 << " below " << opt.min_r_squared << " (pre-asymptotic data)";
        throw FitError(os.str());
    }
    ExponentEstimate e;
    e.theta_hat = fit.slope;
    e.std_err = fit.se;
    e.ci_half_width = 1.96 * fit.se;
    e.fit_window = {x.front(), x.back()};
    e.r_squared = fit.r2;
    e.mode = c.mode;
    e.n_points = x.size();
    e.n_paths = c.n_paths;
    e.seed = c.seed;
    return e;
}

inline ExponentEstimate fit_exponent(const SurvivalCurve& c, const FitOptions& opt = {}) {
    return fit_exponent_on(c, fit_indices(c, opt), opt);
}

// Richardson combination of survival on a grid and its stride-2 subgrid, at
// bias rate step^rate. Both curves must come from the same paths; since fine
// survival implies coarse survival the per-path combination has exact moments.
struct RefinedSurvival {
    std::vector<double> surv;
    std::vector<double> std_err;
};

inline RefinedSurvival refine_survival(const SurvivalCurve& fine, const SurvivalCurve& coarse, double rate) {
    if (fine.surv.size() != coarse.surv.size() || fine.n_paths != coarse.n_paths)
        throw DomainError("refine_survival: curves must share horizons and paths");
    if (!(rate > 0.0))
        throw DomainError("refine_survival: rate must be positive");
    double a = 1.0 / (std::pow(2.0, rate) - 1.0);
    RefinedSurvival r;
    double n = static_cast<double>(fine.n_paths);
    for (std::size_t i = 0; i < fine.surv.size(); ++i) {
        double pf = fine.surv[i], pc = coarse.surv[i];
        double mu = (1.0 + a) * pf - a * pc;
        double m2 = pf * (1.0 + a) * (1.0 - a) + a * a * pc;
        r.surv.push_back(mu);
        r.std_err.push_back(std::sqrt(std::fmax(m2 - mu * mu, 0.0) / n));
    }
    return r;
}

} // namespace perslab
