#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perslab/covariance.hpp"
#include "perslab/model.hpp"
#include "perslab/persistence.hpp"
#include "perslab/simulate.hpp"

namespace perslab {

struct EstimateOptions {
    double duration = 200.0;
    double lag_step = 0.05;
    std::size_t n_paths = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    double horizon_step = 0.5;
    std::size_t min_survivors = 20;
    bool refine = true; // Richardson step extrapolation against the stride-2 subgrid
    std::size_t jackknife_groups = 20;
    StationaryOptions stationary{};
};

struct EstimateResult {
    std::string family;
    ExponentEstimate estimate; // the reported value (refined when applicable)
    ExponentEstimate fine;     // raw fit at lag_step
    ExponentEstimate coarse;   // raw fit at 2 lag_step, same window
    SurvivalCurve fine_curve;
    SurvivalCurve coarse_curve;
    std::string method = "raw"; // raw | richardson | bridge
    double rate = INFINITY;      // grid-bias order used for refinement
    bool refined = false;
    double jackknife_se = 0.0;
    double min_eigen_ratio = 0.0;
    double clipped_mass = 0.0;
};

namespace detail {

inline double richardson(double fine, double coarse, double rate) {
    return fine + (fine - coarse) / (std::pow(2.0, rate) - 1.0);
}

inline double jackknife_se(const std::vector<double>& loo) {
    double g = static_cast<double>(loo.size());
    double mean = 0.0;
    for (double v : loo)
        mean += v;
    mean /= g;
    double ss = 0.0;
    for (double v : loo)
        ss += (v - mean) * (v - mean);
    return std::sqrt(ss * (g - 1.0) / g);
}

// Summed bridge survival weights per jackknife group: sums[g * n_h + j].
// Between grid points both below 0 an OU path with covariance e^{-c|t|}
// crosses 0 with probability exp(-x x' / sinh(c dt)) (time change to a
// Brownian bridge), so the weight is an unbiased estimate of continuous-time
// survival given the grid values.
inline std::vector<double> bridge_survival_sums(const PathSource& src, std::size_t n_paths, std::uint64_t seed,
                                                unsigned workers, const std::vector<std::size_t>& h_index,
                                                double c, std::size_t groups) {
    const TimeGrid& g = src.grid();
    const std::size_t n = g.size();
    const std::size_t n_h = h_index.size();
    const std::size_t block = 256;
    const std::size_t n_blocks = (n_paths + block - 1) / block;
    std::vector<std::vector<double>> partial(n_blocks);
    const double inv = 1.0 / std::sinh(c * g.step);
    stream_paths(
        src, n_paths, seed, workers,
        [&](std::size_t first, std::size_t count, const double* d) {
            auto& acc = partial[first / block];
            acc.assign(groups * n_h, 0.0);
            for (std::size_t q = 0; q < count; ++q) {
                const double* x = d + q * n;
                double* row = acc.data() + ((first + q) % groups) * n_h;
                double w = x[0] < 0.0 ? 1.0 : 0.0;
                std::size_t i = 0;
                for (std::size_t j = 0; j < n_h && w > 0.0; ++j) {
                    for (; i < h_index[j]; ++i) {
                        if (x[i + 1] >= 0.0) {
                            w = 0.0;
                            break;
                        }
                        w *= -std::expm1(-x[i] * x[i + 1] * inv);
                    }
                    row[j] += w;
                }
            }
        },
        block);
    std::vector<double> sums(groups * n_h, 0.0);
    for (const auto& acc : partial)
        for (std::size_t k = 0; k < sums.size(); ++k)
            sums[k] += acc[k];
    return sums;
}

// Mean-reversion rate c when the family's dual is exactly OU, e^{-c|t|}.
inline std::optional<double> ou_rate(const ProcessFamily& f) {
    if (std::holds_alternative<OrnsteinUhlenbeck>(f))
        return 1.0;
    if (auto* n = std::get_if<FractionalIntegratedNoise>(&f))
        if (n->params.alpha() == 1.0 && n->params.hurst() == 0.5)
            return 0.5;
    return std::nullopt;
}

} // namespace detail

inline std::vector<double> horizon_times(double duration, double step) {
    std::vector<double> h;
    auto n = static_cast<std::size_t>(std::floor(duration / step + 1e-9));
    for (std::size_t j = 1; j <= n; ++j)
        h.push_back(step * static_cast<double>(j));
    return h;
}

namespace detail {

inline SurvivalCurve curve_from_weights(const std::vector<double>& times, const std::vector<double>& s, double n) {
    SurvivalCurve c;
    c.level = 0.0;
    c.n_paths = static_cast<std::size_t>(n);
    c.mode = SurvivalMode::Stationary;
    for (std::size_t j = 0; j < times.size(); ++j) {
        double p = s[j] / n;
        c.times.push_back(times[j]);
        c.horizons.push_back(times[j]);
        c.surv.push_back(p);
        c.log_surv.push_back(p > 0.0 ? -std::log(p) : INFINITY);
        c.std_err.push_back(std::sqrt(std::fmax(p * (1.0 - p), 0.0) / n));
        // effective survivor count; only used for weights and floors
        c.survivors.push_back(static_cast<std::size_t>(std::floor(s[j])));
    }
    return c;
}

} // namespace detail

inline EstimateResult estimate_bridge(const ProcessFamily& family, const StationarySource& src, double c,
                                      const EstimateOptions& opt) {
    auto times = horizon_times(opt.duration, opt.horizon_step);
    std::vector<std::size_t> hi;
    for (double T : times)
        hi.push_back(horizon_index(src.grid(), T));
    const std::size_t G = std::max<std::size_t>(opt.jackknife_groups, 2);
    auto sums = detail::bridge_survival_sums(src, opt.n_paths, opt.seed, opt.workers, hi, c, G);
    const std::size_t n_h = times.size();
    std::vector<double> total(n_h, 0.0);
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t j = 0; j < n_h; ++j)
            total[j] += sums[g * n_h + j];

    EstimateResult r;
    r.family = family_tag(family);
    r.method = "bridge";
    r.rate = INFINITY;
    r.min_eigen_ratio = src.embedding().min_eigen_ratio();
    r.clipped_mass = src.embedding().clipped_mass();
    FitOptions fo;
    fo.min_survivors = opt.min_survivors;
    auto full = detail::curve_from_weights(times, total, static_cast<double>(opt.n_paths));
    full.seed = opt.seed;
    full.grid = src.grid().describe();
    full.generator_tag = src.tag();
    auto idx = fit_indices(full, fo);
    if (idx.empty())
        throw DegenerateError("estimate_exponent: no usable horizon", 0.0);
    r.fine_curve = full;
    r.fine_curve.horizons.resize(idx.back() + 1);
    r.fine_curve.times.resize(idx.back() + 1);
    r.fine_curve.surv.resize(idx.back() + 1);
    r.fine_curve.log_surv.resize(idx.back() + 1);
    r.fine_curve.std_err.resize(idx.back() + 1);
    r.fine_curve.survivors.resize(idx.back() + 1);
    r.fine = fit_exponent_on(full, idx, fo);
    r.estimate = r.fine;

    FitOptions relaxed = fo;
    relaxed.min_r_squared = 0.0;
    std::vector<double> loo(G);
    for (std::size_t g = 0; g < G; ++g) {
        std::vector<double> part(n_h);
        for (std::size_t j = 0; j < n_h; ++j)
            part[j] = total[j] - sums[g * n_h + j];
        double n_g = static_cast<double>(opt.n_paths - (opt.n_paths - g + G - 1) / G);
        loo[g] = fit_exponent_on(detail::curve_from_weights(times, part, n_g), idx, relaxed).theta_hat;
    }
    r.jackknife_se = detail::jackknife_se(loo);
    r.estimate.std_err = r.jackknife_se;
    r.estimate.ci_half_width = 1.96 * r.jackknife_se;
    return r;
}

// Stationary-dual estimate of the persistence exponent of a family: sample the
// dual at level 0, regress -ln P-hat on T.
inline EstimateResult estimate_exponent_from_table(const ProcessFamily& family, const CovarianceTable& table,
                                                   const EstimateOptions& opt) {
    if (opt.n_paths < 100)
        throw DomainError("estimate_exponent: n_paths must be at least 100");
    if (!(opt.horizon_step > 0.0))
        throw DomainError("estimate_exponent: horizon_step must be positive");
    double hs = opt.horizon_step / opt.lag_step;
    if (std::fabs(hs - std::round(hs)) > 1e-9 || std::llround(hs) % 2 != 0)
        throw DomainError("estimate_exponent: horizon_step must be an even multiple of lag_step");

    StationarySource src(table, opt.duration, opt.stationary);
    if (opt.refine) {
        if (auto c = detail::ou_rate(family))
            return estimate_bridge(family, src, *c, opt);
    }
    auto fp = scan_first_passage(src, opt.n_paths, opt.seed, opt.workers, 0.0, {1, 2});

    EstimateResult r;
    r.family = family_tag(family);
    r.min_eigen_ratio = src.embedding().min_eigen_ratio();
    r.clipped_mass = src.embedding().clipped_mass();

    auto times = horizon_times(opt.duration, opt.horizon_step);
    std::vector<std::size_t> hi;
    for (double T : times)
        hi.push_back(horizon_index(fp.grid, T));

    auto make_curve = [&](std::size_t slot, std::size_t groups, std::size_t skip, std::size_t n) {
        auto c = curve_from_counts(times, survivor_counts(fp, slot, hi, groups, skip), n, 0.0,
                                   SurvivalMode::Stationary);
        c.seed = fp.seed;
        c.grid = fp.grid.describe();
        c.generator_tag = fp.generator_tag;
        return c;
    };

    // Horizons with too few survivors on the fine grid are dropped, on both grids.
    FitOptions fo;
    fo.min_survivors = opt.min_survivors;
    auto full_fine = make_curve(0, 1, SIZE_MAX, opt.n_paths);
    auto full_coarse = make_curve(1, 1, SIZE_MAX, opt.n_paths);
    auto idx = fit_indices(full_fine, fo);
    std::size_t keep = idx.empty() ? 0 : idx.back() + 1;
    auto truncate = [keep](SurvivalCurve c) {
        c.horizons.resize(keep);
        c.times.resize(keep);
        c.surv.resize(keep);
        c.log_surv.resize(keep);
        c.std_err.resize(keep);
        c.survivors.resize(keep);
        return c;
    };
    r.fine_curve = truncate(full_fine);
    r.coarse_curve = truncate(full_coarse);
    if (keep == 0) {
        throw DegenerateError("estimate_exponent: fewer than " + std::to_string(opt.min_survivors) +
                                  " survivors at the first horizon",
                              0.0);
    }
    r.fine = fit_exponent_on(full_fine, idx, fo);
    r.coarse = fit_exponent_on(full_coarse, idx, fo);

    r.rate = path_roughness(family);
    r.refined = opt.refine && std::isfinite(r.rate);
    r.estimate = r.fine;
    if (!r.refined)
        return r;
    r.method = "richardson";

    r.estimate.theta_hat = detail::richardson(r.fine.theta_hat, r.coarse.theta_hat, r.rate);
    // Refinement amplifies noise; use a delete-one-group jackknife over path batches.
    std::size_t G = opt.jackknife_groups;
    if (G < 2)
        throw DomainError("estimate_exponent: need at least 2 jackknife groups");
    std::vector<double> loo(G);
    FitOptions relaxed = fo;
    relaxed.min_r_squared = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
        std::size_t n_g = opt.n_paths - (opt.n_paths - g + G - 1) / G;
        auto cf = make_curve(0, G, g, n_g);
        auto cc = make_curve(1, G, g, n_g);
        auto ef = fit_exponent_on(cf, idx, relaxed);
        auto ec = fit_exponent_on(cc, idx, relaxed);
        loo[g] = detail::richardson(ef.theta_hat, ec.theta_hat, r.rate);
    }
    r.jackknife_se = detail::jackknife_se(loo);
    r.estimate.std_err = r.jackknife_se;
    r.estimate.ci_half_width = 1.96 * r.jackknife_se;
    return r;
}

inline EstimateResult estimate_exponent(const ProcessFamily& family, const EstimateOptions& opt = {}) {
    double steps = opt.duration / opt.lag_step;
    auto n_steps = static_cast<std::size_t>(std::llround(steps));
    auto table = family_covariance_table(family, opt.lag_step, smooth_half_length(n_steps), opt.workers);
    return estimate_exponent_from_table(family, table, opt);
}

} // namespace perslab
