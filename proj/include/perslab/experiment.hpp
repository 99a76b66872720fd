#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "perslab/acceptance.hpp"
#include "perslab/cache.hpp"
#include "perslab/config.hpp"
#include "perslab/ensemble_io.hpp"
#include "perslab/estimate.hpp"
#include "perslab/verify.hpp"

namespace perslab {

struct NamedTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct NamedEstimate {
    json family; // as in the config
    EstimateResult result;
};

struct ResultBundle {
    json config;
    std::vector<CheckReport> checks;
    std::vector<NamedEstimate> estimates;
    std::vector<NamedTable> tables;
    std::vector<CriterionResult> criteria;
    std::vector<std::string> artifacts;
    json meta = json::object(); // wall clock, workers, cache; not part of the numeric record

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed)
                return false;
        for (const auto& c : criteria)
            if (!c.passed)
                return false;
        return true;
    }
};

namespace detail {

inline const std::vector<std::pair<double, double>>& default_identity_points() {
    static const std::vector<std::pair<double, double>> p = {{1.0, 0.5}, {2.0, 0.3}, {0.8, 0.7}, {1.5, 0.5},
                                                            {2.5, 0.5}, {3.0, 0.2}, {0.6, 0.9}, {1.2, 0.4},
                                                            {4.0, 0.6}, {0.5, 0.8}};
    return p;
}

inline std::string point_name(const ProcessFamily& f, std::size_t i) {
    return "point" + std::to_string(i) + "_" + family_tag(f);
}

inline double family_spectrum(const ProcessFamily& f, double l) {
    if (auto* n = std::get_if<FractionalIntegratedNoise>(&f))
        return spectral_density(n->params, l);
    if (auto* d = std::get_if<LaplaceFbmDual>(&f))
        return limit_spectrum_alpha_inf(d->hurst, l);
    return 1.0 / (std::numbers::pi * (1.0 + l * l));
}

// Closed-form covariance when one is known for the family.
inline std::optional<double> closed_covariance(const ProcessFamily& f, double t) {
    if (auto* n = std::get_if<FractionalIntegratedNoise>(&f)) {
        const auto& p = n->params;
        if (p.alpha() == 1.0)
            return cov_fbm_dual(p.hurst(), t);
        if (p.hurst() == 0.5 && p.kappa() < 0.5)
            return cov_half_closed(p.kappa(), t);
        return std::nullopt;
    }
    if (auto* d = std::get_if<LaplaceFbmDual>(&f))
        return cov_limit_alpha_inf(d->hurst, t);
    return std::exp(-t);
}

inline EstimateOptions estimate_options(const ExperimentConfig& c, unsigned workers) {
    EstimateOptions o;
    o.n_paths = c.budget.n_paths;
    o.duration = c.budget.duration;
    o.lag_step = c.budget.lag_step;
    o.horizon_step = c.budget.horizon_step;
    o.refine = c.budget.refine;
    o.seed = c.seed;
    o.workers = workers;
    return o;
}

inline void run_spectrum(const ExperimentConfig& c, ResultBundle& b) {
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const auto& f = c.points[i];
        NamedTable t{"spectrum_" + point_name(f, i), {"lambda", "density"}, {}};
        for (std::size_t k = 0; k < c.spectrum.n_lambda; ++k) {
            double l = c.spectrum.lambda_max * static_cast<double>(k) / static_cast<double>(c.spectrum.n_lambda - 1);
            t.rows.push_back({l, family_spectrum(f, l)});
        }
        b.tables.push_back(std::move(t));
        if (auto* n = std::get_if<FractionalIntegratedNoise>(&f)) {
            std::vector<double> grid;
            for (std::size_t k = 0; k < 5; ++k)
                grid.push_back(c.spectrum.lambda_max * static_cast<double>(k) / 4.0);
            b.checks.push_back(check_spectral_symmetry(n->params, grid, c.tolerances.symmetry));
            b.checks.push_back(verify_normalization(n->params, c.tolerances.normalization));
        }
    }
}

inline void run_covariance(const ExperimentConfig& c, const Cache& cache, unsigned workers, ResultBundle& b) {
    const auto& cs = c.covariance;
    auto has = [&](const char* r) { return std::find(cs.routes.begin(), cs.routes.end(), r) != cs.routes.end(); };
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        const auto& f = c.points[i];
        auto* fin = std::get_if<FractionalIntegratedNoise>(&f);
        bool spectral = has("spectral");
        bool closed = has("closed") && closed_covariance(f, 1.0).has_value();
        bool dbl = has("double_integral") && fin;
        CovarianceTable table;
        if (spectral)
            table = cache.table(f, cs.lag_step, cs.n_lags, workers);
        NamedTable t{"covariance_" + point_name(f, i), {"t", "spectral", "closed", "double_integral"}, {}};
        double d_closed = 0, d_double = 0;
        for (std::size_t k = 0; k <= cs.n_lags; ++k) {
            double x = cs.lag_step * static_cast<double>(k);
            double s = spectral ? table.values[k] : NAN;
            double cl = closed ? *closed_covariance(f, x) : NAN;
            double di = NAN;
            if (dbl && k % cs.double_integral_stride == 0)
                di = cov_double_integral(fin->params, x);
            if (spectral && closed)
                d_closed = std::fmax(d_closed, std::fabs(s - cl));
            if (spectral && std::isfinite(di))
                d_double = std::fmax(d_double, std::fabs(s - di));
            t.rows.push_back({x, s, cl, di});
        }
        b.tables.push_back(std::move(t));
        auto tag = family_tag(f);
        if (spectral && closed)
            b.checks.push_back(gate("closed_vs_spectral", d_closed, c.tolerances.closed_form, tag));
        if (spectral && dbl)
            b.checks.push_back(gate("double_integral_vs_spectral", d_double, c.tolerances.double_integral, tag));
    }
}

inline void run_simulate(const ExperimentConfig& c, unsigned workers, ResultBundle& b) {
    const auto& s = c.simulate;
    auto grid = TimeGrid::uniform(s.step, s.n_points);
    std::unique_ptr<PathSource> src;
    std::optional<CovarianceTable> table;
    std::function<double(double)> var;
    if (s.process == "fbm") {
        src = make_fbm_source(s.hurst, grid);
        var = [h = s.hurst](double t) { return std::pow(t, 2 * h); };
    } else if (s.process == "rl") {
        std::shared_ptr<const PathSource> base = make_fbm_source(s.hurst, grid);
        src = std::make_unique<RlSource>(base, s.alpha);
        // E I^2(t) = C t^{2 kappa}; the constant is not needed for the record
    } else {
        auto f = ProcessFamily{FractionalIntegratedNoise{make_params(s.alpha, s.hurst)}};
        std::size_t n_steps = s.n_points - 1;
        table = family_covariance_table(f, s.step, smooth_half_length(n_steps), workers);
        src = std::make_unique<StationarySource>(*table, s.step * static_cast<double>(n_steps));
        var = [](double) { return 1.0; };
    }
    auto e = collect(*src, s.n_paths, c.seed, workers);
    std::filesystem::create_directories(c.output_dir);
    auto path = (std::filesystem::path(c.output_dir) / (s.format == "csv" ? "ensemble.csv" : "ensemble.plens")).string();
    if (s.format == "csv")
        write_ensemble_csv(path, e);
    else
        write_ensemble(path, e);
    b.artifacts.push_back(path);

    NamedTable t{"simulate_moments", {"t", "sample_var", "model_var", "se"}, {}};
    std::size_t stride = std::max<std::size_t>(1, (s.n_points - 1) / 64);
    double worst = 0;
    for (std::size_t i = 0; i < s.n_points; i += stride) {
        double m2 = 0, m4 = 0;
        for (std::size_t p = 0; p < e.n_paths; ++p) {
            double v = e.path(p)[i] * e.path(p)[i];
            m2 += v;
            m4 += v * v;
        }
        double n = static_cast<double>(e.n_paths);
        m2 /= n;
        double se = std::sqrt(std::fmax(m4 / n - m2 * m2, 0.0) / n);
        double model = var ? var(grid.points[i]) : NAN;
        if (var && se > 0)
            worst = std::fmax(worst, std::fabs(m2 - model) / se);
        t.rows.push_back({grid.points[i], m2, model, se});
    }
    b.tables.push_back(std::move(t));
    if (var && e.n_paths >= 100)
        b.checks.push_back(gate("sample_variance", worst, 4.5, e.generator_tag + ", max |z| on the grid",
                                CheckKind::Statistical));
}

inline void run_estimate(const ExperimentConfig& c, const Cache& cache, unsigned workers, ResultBundle& b) {
    auto opt = estimate_options(c, workers);
    for (const auto& f : c.points) {
        auto r = cache.estimate(f, opt);
        if (auto* n = std::get_if<FractionalIntegratedNoise>(&f); n && n->params.alpha() == 2.0)
            b.checks.push_back(check_bounds_eq4(n->params.hurst(), r.estimate));
        b.estimates.push_back({family_to_json(f), std::move(r)});
    }
}

inline void run_verify(const ExperimentConfig& c, const Cache& cache, unsigned workers, ResultBundle& b) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& f : c.points)
        if (auto* n = std::get_if<FractionalIntegratedNoise>(&f))
            pts.emplace_back(n->params.alpha(), n->params.hurst());
    if (pts.empty())
        pts = default_identity_points();
    for (auto& r : analytic_spectrum_suite(pts, {0.0, 0.5, 1.0, 2.0, 5.0}, c.tolerances.symmetry,
                                           c.tolerances.normalization))
        b.checks.push_back(std::move(r));
    b.checks.push_back(check_slepian_family_condition({0.1, 0.45}, 0.05));
    b.checks.push_back(check_slepian_asymptotics({0.1, 0.45}, 0.05));
    std::vector<double> ts;
    for (int i = 0; i <= 400; ++i)
        ts.push_back(0.05 * i);
    for (double h : {0.1, 0.25, 0.4, 0.5})
        b.checks.push_back(check_cov_domination(h, ts));
    b.checks.push_back(check_limit_alpha_inf(0.5, {4.0, 8.0, 16.0}, {}, std::nullopt, 0.05, 400, workers));
    if (!c.verify.statistical)
        return;

    auto opt = estimate_options(c, workers);
    auto est = [&](const ProcessFamily& f) {
        auto r = cache.estimate(f, opt);
        b.estimates.push_back({family_to_json(f), r});
        return r.estimate;
    };
    auto fin = [](double a, double h) { return ProcessFamily{FractionalIntegratedNoise{make_params(a, h)}}; };
    auto e23 = est(fin(2.0, 0.3)), e25 = est(fin(2.0, 0.5)), e27 = est(fin(2.0, 0.7));
    b.checks.push_back(check_bounds_eq4(0.3, e23));
    b.checks.push_back(check_bounds_eq4(0.5, e25));
    b.checks.push_back(check_bounds_eq4(0.7, e27));
    b.checks.push_back(check_h_ordering(2.0, 0.3, e23, e27, est(fin(1.6, 0.7))));
    std::vector<std::pair<ProcessParams, ExponentEstimate>> mono;
    for (double a : {1.0, 1.5, 2.0, 2.5})
        mono.emplace_back(make_params(a, 0.5), a == 2.0 ? e25 : est(fin(a, 0.5)));
    b.checks.push_back(check_monotone_alpha(mono));
    b.checks.push_back(check_limit_alpha_inf(0.5, {4.0, 8.0}, {est(fin(4.0, 0.5)), est(fin(8.0, 0.5))},
                                             est(make_laplace_dual(0.5)), 0.05, 400, workers));
}

inline void run_reproduce(const ExperimentConfig& c, const Cache& cache, unsigned workers, ResultBundle& b,
                          std::ostream* log) {
    AcceptanceOptions o;
    o.seed = c.seed;
    o.workers = workers;
    o.criteria = c.reproduce.criteria;
    o.cache = cache.enabled() ? &cache : nullptr;
    o.log = log;
    auto run = run_acceptance(o);
    for (const auto& cr : run.criteria)
        for (const auto& r : cr.reports)
            b.checks.push_back(r);
    for (const auto& [tag, r] : run.estimates)
        b.estimates.push_back({json{{"family_tag", tag}}, r});
    b.criteria = std::move(run.criteria);
}

inline std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

} // namespace detail

inline ResultBundle run_experiment(const ExperimentConfig& c, const Cache& cache, std::ostream* log = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    unsigned workers = c.workers == 0 ? default_workers() : c.workers;
    ResultBundle b;
    b.config = config_to_json(c);
    b.config.erase("workers"); // results do not depend on it
    b.meta["started"] = detail::utc_now();
    if (c.experiment == "spectrum")
        detail::run_spectrum(c, b);
    else if (c.experiment == "covariance")
        detail::run_covariance(c, cache, workers, b);
    else if (c.experiment == "simulate")
        detail::run_simulate(c, workers, b);
    else if (c.experiment == "estimate")
        detail::run_estimate(c, cache, workers, b);
    else if (c.experiment == "verify")
        detail::run_verify(c, cache, workers, b);
    else
        detail::run_reproduce(c, cache, workers, b, log);
    b.meta["finished"] = detail::utc_now();
    b.meta["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    b.meta["workers"] = workers;
    b.meta["cache_dir"] = cache.enabled() ? cache.dir().string() : "";
    json secs = json::object();
    for (const auto& cr : b.criteria)
        secs[std::to_string(cr.id)] = cr.seconds;
    if (!b.criteria.empty())
        b.meta["criterion_seconds"] = secs;
    return b;
}

} // namespace perslab
