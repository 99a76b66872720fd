#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "perslab/cache.hpp"
#include "perslab/covariance.hpp"
#include "perslab/estimate.hpp"
#include "perslab/persistence.hpp"
#include "perslab/serialize.hpp"
#include "perslab/simulate.hpp"
#include "perslab/verify.hpp"

namespace perslab {

struct AcceptanceOptions {
    std::uint64_t seed = 20240601;
    unsigned workers = 1;
    std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const Cache* cache = nullptr; // estimates and tables; nullptr computes everything
    std::ostream* log = nullptr;
    std::size_t n_paths = 100000;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string summary;
    std::vector<CheckReport> reports;
    json numbers = json::object(); // numeric outputs, compared across runs
    double seconds = 0.0;
};

struct AcceptanceRun {
    std::vector<CriterionResult> criteria;
    std::map<std::string, EstimateResult> estimates;
    bool all_passed() const {
        for (const auto& c : criteria)
            if (!c.passed)
                return false;
        return true;
    }
};

// Everything except wall-clock data.
inline json numeric_outputs(const AcceptanceRun& run) {
    json j = json::object();
    json cs = json::array();
    for (const auto& c : run.criteria) {
        json reports = json::array();
        for (const auto& r : c.reports)
            reports.push_back(to_json(r));
        cs.push_back({{"id", c.id}, {"passed", c.passed}, {"numbers", c.numbers}, {"reports", reports}});
    }
    j["criteria"] = cs;
    json es = json::object();
    for (const auto& [k, v] : run.estimates)
        es[k] = to_json(v);
    j["estimates"] = es;
    return j;
}

namespace detail {

inline CheckReport gate(std::string name, double measured, double threshold, std::string details,
                        CheckKind kind = CheckKind::Analytic) {
    CheckReport r;
    r.name = std::move(name);
    r.measured = {measured};
    r.threshold = threshold;
    r.passed = measured <= threshold;
    r.details = std::move(details);
    r.kind = kind;
    return r;
}

class Acceptance {
public:
    explicit Acceptance(const AcceptanceOptions& o) : opt_(o) {}

    CriterionResult run(int id) {
        auto t0 = std::chrono::steady_clock::now();
        CriterionResult c;
        c.id = id;
        switch (id) {
        case 1: analytic_identities(c); break;
        case 2: covariance_routes(c); break;
        case 3: fbm_identity(c); break;
        case 4: brownian_oracle(c); break;
        case 5: known_exponents(c); break;
        case 6: hypothesis_comparison(c); break;
        case 7: monotone_alpha(c); break;
        case 8: limit_trend(c); break;
        case 9: slepian_condition(c); break;
        default: throw DomainError("acceptance: unknown criterion " + std::to_string(id));
        }
        c.passed = !c.reports.empty();
        for (const auto& r : c.reports)
            c.passed = c.passed && r.passed;
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return c;
    }

    const std::map<std::string, EstimateResult>& estimates() const { return est_; }

private:
    void say(const std::string& s) const {
        if (opt_.log)
            *opt_.log << s << std::endl;
    }

    // Sub-seed per purpose so criteria do not share random streams.
    std::uint64_t seed_for(const std::string& what) const { return stream_seed(opt_.seed, fnv1a(what)); }

    const EstimateResult& estimate(const ProcessFamily& f) {
        auto tag = family_tag(f);
        auto it = est_.find(tag);
        if (it != est_.end())
            return it->second;
        EstimateOptions o;
        o.n_paths = opt_.n_paths;
        o.seed = seed_for("estimate|" + tag);
        o.workers = opt_.workers;
        say("  estimating " + tag);
        auto r = opt_.cache ? opt_.cache->estimate(f, o) : estimate_exponent(f, o);
        return est_.emplace(tag, std::move(r)).first->second;
    }

    static json est_numbers(const EstimateResult& r) {
        return {{"theta_hat", r.estimate.theta_hat}, {"ci", r.estimate.ci_half_width}, {"method", r.method},
                {"raw", r.fine.theta_hat}};
    }

    void analytic_identities(CriterionResult& c) {
        c.title = "analytic identities: spectral symmetry and unit mass";
        auto t0 = std::chrono::steady_clock::now();
        std::vector<std::pair<double, double>> pts = {{1.0, 0.5}, {2.0, 0.3}, {0.8, 0.7}, {1.5, 0.5}, {2.5, 0.5},
                                                      {3.0, 0.2}, {0.6, 0.9}, {1.2, 0.4}, {4.0, 0.6}, {0.5, 0.8}};
        auto reports = analytic_spectrum_suite(pts, {0.0, 0.5, 1.0, 2.0, 5.0}, 1e-10, 1e-6);
        double sym = 0, norm = 0;
        for (const auto& r : reports)
            (r.name == "spectral_symmetry" ? sym : norm) = std::fmax(r.name == "spectral_symmetry" ? sym : norm,
                                                                     r.measured[0]);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        c.reports = reports;
        c.reports.push_back(gate("runtime_under_a_minute", secs < 60.0 ? 0.0 : 1.0, 0.0,
                                 secs < 60.0 ? "under 60 s" : "over 60 s"));
        c.numbers = {{"max_symmetry_dev", sym}, {"max_normalization_dev", norm}};
        std::ostringstream os;
        os << "symmetry max rel dev " << sym << ", |integral - 1| max " << norm << ", " << secs << " s";
        c.summary = os.str();
    }

    void covariance_routes(CriterionResult& c) {
        c.title = "covariance routes agree";
        std::ostringstream os;
        // closed form at H = 1/2 against spectral quadrature on [0.01, 10]
        double worst_closed = 0;
        for (double k : {0.1, 0.2, 0.4}) {
            auto t = cov_from_spectrum(make_params(k + 0.5, 0.5), 0.01, 1000, opt_.workers);
            double d = 0;
            for (std::size_t i = 1; i <= 1000; ++i)
                d = std::fmax(d, std::fabs(t.values[i] - cov_half_closed(k, 0.01 * static_cast<double>(i))));
            c.reports.push_back(gate("closed_vs_spectral", d, 1e-6, "kappa=" + fmt(k)));
            worst_closed = std::fmax(worst_closed, d);
        }
        // double integrals against spectral quadrature
        double worst_double = 0;
        const std::vector<double> ts = {0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0};
        struct Case {
            double a, h;
            DoubleIntegralRoute route;
            const char* name;
        };
        for (auto cs : {Case{0.8, 0.7, DoubleIntegralRoute::FractionalNoise, "fractional_noise"},
                        Case{2.0, 0.6, DoubleIntegralRoute::FractionalNoise, "fractional_noise"},
                        Case{2.0, 0.6, DoubleIntegralRoute::IntegratedFbm, "integrated_fbm"}}) {
            auto p = make_params(cs.a, cs.h);
            auto t = cov_from_spectrum(p, 0.05, 100, opt_.workers);
            double d = 0;
            for (double x : ts)
                d = std::fmax(d, std::fabs(cov_double_integral(p, x, cs.route) -
                                           t.values[static_cast<std::size_t>(std::llround(x / 0.05))]));
            c.reports.push_back(gate("double_integral_vs_spectral", d, 1e-3,
                                     family_tag(FractionalIntegratedNoise{p}) + " route " + cs.name));
            worst_double = std::fmax(worst_double, d);
        }
        // limit covariance against the cosine transform of the limit spectrum
        double worst_limit = 0;
        for (double h : {0.1, 0.3, 0.5, 0.7}) {
            double d = 0;
            for (double x = 0.0; x <= 10.0 + 1e-12; x += 0.25) {
                auto q = integrate([&](double l) { return std::cos(x * l) * limit_spectrum_alpha_inf(h, l); },
                                   std::vector<double>{0, 0.25, 1, 4, 16, 60}, 1e-13, 1e-13, 20000);
                d = std::fmax(d, std::fabs(2.0 * q.value - cov_limit_alpha_inf(h, x)));
            }
            c.reports.push_back(gate("limit_cov_vs_cosine_transform", d, 1e-6, "H=" + fmt(h)));
            worst_limit = std::fmax(worst_limit, d);
        }
        c.numbers = {{"closed", worst_closed}, {"double_integral", worst_double}, {"limit", worst_limit}};
        os << "closed form " << worst_closed << ", double integrals " << worst_double << ", limit " << worst_limit;
        c.summary = os.str();
    }

    void fbm_identity(CriterionResult& c) {
        c.title = "scaled RL integral of FBM is FBM";
        const std::size_t n = 4096;
        auto g = TimeGrid::uniform(1.0 / static_cast<double>(n), n + 1);
        const std::vector<std::pair<std::size_t, std::size_t>> pairs = {
            {n, n}, {n / 2, n}, {n / 4, 3 * n / 4}, {n / 2, n / 2}, {n / 8, n / 4}, {3 * n / 4, n}};
        std::ostringstream os;
        double worst = 0;
        for (double h : {0.25, 0.4}) {
            std::shared_ptr<const PathSource> base = make_fbm_source(1.0 - h, g);
            RlSource src(base, 2.0 * h);
            const std::size_t block = 256;
            std::size_t n_blocks = (opt_.n_paths + block - 1) / block;
            std::vector<std::vector<double>> part(n_blocks, std::vector<double>(2 * pairs.size(), 0.0));
            stream_paths(
                src, opt_.n_paths, seed_for("fbm_identity|" + fmt(h)), opt_.workers,
                [&](std::size_t first, std::size_t count, const double* d) {
                    auto& acc = part[first / block];
                    for (std::size_t q = 0; q < count; ++q) {
                        const double* x = d + q * g.size();
                        for (std::size_t k = 0; k < pairs.size(); ++k) {
                            double v = x[pairs[k].first] * x[pairs[k].second];
                            acc[2 * k] += v;
                            acc[2 * k + 1] += v * v;
                        }
                    }
                },
                block);
            double c2 = std::tgamma(2 * h + 1) / std::tgamma(2 * (1 - h) + 1);
            double N = static_cast<double>(opt_.n_paths);
            double worst_h = 0;
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                double s = 0, s2 = 0;
                for (const auto& acc : part) {
                    s += acc[2 * k];
                    s2 += acc[2 * k + 1];
                }
                double m = s / N, se = std::sqrt((s2 / N - m * m) / N);
                double want = fbm_covariance(h, g.points[pairs[k].first], g.points[pairs[k].second]);
                double z = std::fabs(c2 * m - want) / (c2 * se);
                worst_h = std::fmax(worst_h, z);
                c.numbers["H=" + fmt(h)].push_back({{"s", g.points[pairs[k].first]},
                                                    {"t", g.points[pairs[k].second]},
                                                    {"mc", c2 * m},
                                                    {"exact", want},
                                                    {"z", z}});
            }
            c.reports.push_back(gate("fbm_identity", worst_h, 4.0, "H=" + fmt(h) + ", max |z| over 6 points",
                                     CheckKind::Statistical));
            worst = std::fmax(worst, worst_h);
        }
        os << "max |z| " << worst << " (gate 4)";
        c.summary = os.str();
    }

    void brownian_oracle(CriterionResult& c) {
        c.title = "Brownian survival against the reflection oracle";
        const double dt = 1.0 / 512.0;
        auto g = TimeGrid::uniform(dt, 16 * 512 + 1);
        auto src = make_fbm_source(0.5, g);
        auto fp = scan_first_passage(*src, opt_.n_paths, seed_for("brownian_oracle"), opt_.workers, 1.0, {1, 2, 4});
        std::vector<double> T = {1.0, 4.0, 16.0};
        auto f = survival_from_first_passage(fp, T, 0);
        auto co = survival_from_first_passage(fp, T, 1);
        auto cc = survival_from_first_passage(fp, T, 2);
        auto ref = refine_survival(f, co, 0.5);
        std::ostringstream os;
        double worst = 0;
        bool monotone = true;
        for (std::size_t i = 0; i < T.size(); ++i) {
            double o = brownian_survival_oracle(T[i], 1.0);
            double z = std::fabs(ref.surv[i] - o) / ref.std_err[i];
            worst = std::fmax(worst, z);
            bool mono = cc.surv[i] - o >= co.surv[i] - o && co.surv[i] - o >= f.surv[i] - o && f.surv[i] >= o;
            monotone = monotone && mono;
            c.numbers["T=" + fmt(T[i])] = {{"oracle", o},      {"step_1_128", cc.surv[i]}, {"step_1_256", co.surv[i]},
                                           {"step_1_512", f.surv[i]}, {"refined", ref.surv[i]},
                                           {"refined_se", ref.std_err[i]}, {"z", z}};
            c.reports.push_back(gate("brownian_oracle", z, 3.0, "T=" + fmt(T[i]) + " refined survival, |z|",
                                     CheckKind::Statistical));
            os << "T=" << T[i] << ": " << fmt(cc.surv[i]) << " > " << fmt(co.surv[i]) << " > " << fmt(f.surv[i])
               << " -> " << fmt(ref.surv[i]) << " vs " << fmt(o) << " (z=" << fmt(z) << "); ";
        }
        c.reports.push_back(gate("refinement_monotone", monotone ? 0.0 : 1.0, 0.0,
                                 "survival decreases toward the oracle as the step halves"));
        c.summary = os.str();
    }

    void known_exponents(CriterionResult& c) {
        c.title = "known exponents";
        std::ostringstream os;
        auto one = [&](const ProcessFamily& f, double target, double tol) {
            const auto& r = estimate(f);
            double d = std::fabs(r.estimate.theta_hat - target);
            c.reports.push_back(gate("known_exponent", d, tol,
                                     family_tag(f) + ": " + fmt(r.estimate.theta_hat) + " +- " +
                                         fmt(r.estimate.ci_half_width) + " (" + r.method + ") vs " + fmt(target),
                                     CheckKind::Statistical));
            c.numbers[family_tag(f)] = est_numbers(r);
            os << family_tag(f) << " " << fmt(r.estimate.theta_hat) << " vs " << fmt(target) << "; ";
        };
        for (double h : {0.3, 0.5, 0.7})
            one(FractionalIntegratedNoise{make_params(1.0, h)}, 1.0 - h, 0.05);
        one(FractionalIntegratedNoise{make_params(2.0, 0.5)}, 0.25, 0.05);
        one(make_laplace_dual(0.5), 0.1875, 0.03);
        c.summary = os.str();
    }

    void hypothesis_comparison(CriterionResult& c) {
        c.title = "alpha = 2 against the bounds and H(1-H)";
        std::ostringstream os;
        for (double h : {0.3, 0.7}) {
            ProcessFamily f = FractionalIntegratedNoise{make_params(2.0, h)};
            const auto& r = estimate(f);
            c.reports.push_back(check_bounds_eq4(h, r.estimate));
            double d = std::fabs(r.estimate.theta_hat - h * (1 - h));
            c.reports.push_back(gate("hypothesis_h_one_minus_h", d, 0.05,
                                     "H=" + fmt(h) + ": " + fmt(r.estimate.theta_hat) + " vs " + fmt(h * (1 - h)),
                                     CheckKind::Statistical));
            c.numbers[family_tag(f)] = est_numbers(r);
            os << "H=" << h << " " << fmt(r.estimate.theta_hat) << " vs " << fmt(h * (1 - h)) << "; ";
        }
        c.summary = os.str();
    }

    void monotone_alpha(CriterionResult& c) {
        c.title = "exponent decreases in alpha";
        std::vector<std::pair<ProcessParams, ExponentEstimate>> pts;
        for (double a : {1.0, 1.5, 2.0, 2.5}) {
            auto p = make_params(a, 0.5);
            const auto& r = estimate(FractionalIntegratedNoise{p});
            pts.emplace_back(p, r.estimate);
            c.numbers[family_tag(FractionalIntegratedNoise{p})] = est_numbers(r);
        }
        auto rep = check_monotone_alpha(pts);
        c.summary = rep.details;
        c.reports.push_back(rep);
    }

    void limit_trend(CriterionResult& c) {
        c.title = "alpha -> infinity limit";
        auto rep = check_limit_alpha_inf(0.5, {4.0, 8.0, 16.0}, {}, std::nullopt, 0.05, 400, opt_.workers);
        c.reports.push_back(rep);
        ProcessFamily f = FractionalIntegratedNoise{make_params(8.0, 0.5)};
        const auto& r = estimate(f);
        double d = std::fabs(r.estimate.theta_hat - 0.1875);
        c.reports.push_back(gate("alpha8_near_limit", d, 0.05,
                                 "theta(8, 1/2) = " + fmt(r.estimate.theta_hat) + " vs 3/16", CheckKind::Statistical));
        c.numbers = {{"cov_distance", rep.measured}, {family_tag(f), est_numbers(r)}};
        c.summary = rep.details + "; theta(8,1/2) " + fmt(r.estimate.theta_hat);
    }

    void slepian_condition(CriterionResult& c) {
        c.title = "comparison condition for the limit family";
        auto rep = check_slepian_family_condition({0.1, 0.45}, 0.05);
        auto asym = check_slepian_asymptotics({0.1, 0.45}, 0.05);
        c.numbers = {{"min", rep.measured[0]}, {"fd_dev", rep.measured[1]}, {"asymptotics", asym.measured}};
        c.summary = rep.details + "; " + asym.details;
        c.reports.push_back(rep);
        c.reports.push_back(asym);
    }

    AcceptanceOptions opt_;
    std::map<std::string, EstimateResult> est_;
};

} // namespace detail

inline AcceptanceRun run_acceptance(const AcceptanceOptions& opt) {
    detail::Acceptance a(opt);
    AcceptanceRun run;
    for (int id : opt.criteria) {
        if (opt.log)
            *opt.log << "criterion " << id << " ..." << std::endl;
        run.criteria.push_back(a.run(id));
    }
    run.estimates = a.estimates();
    return run;
}

} // namespace perslab
