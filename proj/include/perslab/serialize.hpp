#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "perslab/check_report.hpp"
#include "perslab/covariance.hpp"
#include "perslab/estimate.hpp"
#include "perslab/persistence.hpp"

namespace perslab {

using json = nlohmann::json;

namespace detail {

// JSON has no inf/nan; they are written as strings.
inline json num(double v) {
    if (std::isfinite(v))
        return v;
    if (std::isnan(v))
        return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline double from_num(const json& j) {
    if (j.is_number())
        return j.get<double>();
    auto s = j.get<std::string>();
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf")
        return INFINITY;
    if (s == "-inf")
        return -INFINITY;
    throw IoError("bad number in JSON: " + s);
}

inline json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v)
        a.push_back(num(x));
    return a;
}

inline std::vector<double> from_nums(const json& j) {
    std::vector<double> v;
    for (const auto& x : j)
        v.push_back(from_num(x));
    return v;
}

inline SurvivalMode mode_from(const std::string& s) {
    if (s == "self_similar")
        return SurvivalMode::SelfSimilar;
    if (s == "stationary")
        return SurvivalMode::Stationary;
    throw IoError("bad survival mode: " + s);
}

} // namespace detail

inline json to_json(const CheckReport& r) {
    return {{"name", r.name},          {"passed", r.passed}, {"measured", detail::nums(r.measured)},
            {"threshold", detail::num(r.threshold)}, {"details", r.details}, {"kind", to_string(r.kind)}};
}

inline json to_json(const ExponentEstimate& e) {
    return {{"theta_hat", detail::num(e.theta_hat)},
            {"ci_half_width", detail::num(e.ci_half_width)},
            {"std_err", detail::num(e.std_err)},
            {"fit_window", {detail::num(e.fit_window.first), detail::num(e.fit_window.second)}},
            {"r_squared", detail::num(e.r_squared)},
            {"mode", to_string(e.mode)},
            {"n_points", e.n_points},
            {"n_paths", e.n_paths},
            {"seed", e.seed}};
}

inline ExponentEstimate estimate_from_json(const json& j) {
    ExponentEstimate e;
    e.theta_hat = detail::from_num(j.at("theta_hat"));
    e.ci_half_width = detail::from_num(j.at("ci_half_width"));
    e.std_err = detail::from_num(j.at("std_err"));
    e.fit_window = {detail::from_num(j.at("fit_window")[0]), detail::from_num(j.at("fit_window")[1])};
    e.r_squared = detail::from_num(j.at("r_squared"));
    e.mode = detail::mode_from(j.at("mode"));
    e.n_points = j.at("n_points");
    e.n_paths = j.at("n_paths");
    e.seed = j.at("seed");
    return e;
}

inline json to_json(const SurvivalCurve& c) {
    return {{"horizons", detail::nums(c.horizons)},
            {"times", detail::nums(c.times)},
            {"surv", detail::nums(c.surv)},
            {"log_surv", detail::nums(c.log_surv)},
            {"std_err", detail::nums(c.std_err)},
            {"survivors", c.survivors},
            {"level", c.level},
            {"n_paths", c.n_paths},
            {"mode", to_string(c.mode)},
            {"seed", c.seed},
            {"grid", c.grid},
            {"generator", c.generator_tag}};
}

inline SurvivalCurve curve_from_json(const json& j) {
    SurvivalCurve c;
    c.horizons = detail::from_nums(j.at("horizons"));
    c.times = detail::from_nums(j.at("times"));
    c.surv = detail::from_nums(j.at("surv"));
    c.log_surv = detail::from_nums(j.at("log_surv"));
    c.std_err = detail::from_nums(j.at("std_err"));
    c.survivors = j.at("survivors").get<std::vector<std::size_t>>();
    c.level = j.at("level");
    c.n_paths = j.at("n_paths");
    c.mode = detail::mode_from(j.at("mode"));
    c.seed = j.at("seed");
    c.grid = j.at("grid");
    c.generator_tag = j.at("generator");
    return c;
}

inline json to_json(const EstimateResult& r) {
    return {{"family", r.family},
            {"method", r.method},
            {"estimate", to_json(r.estimate)},
            {"fine", to_json(r.fine)},
            {"coarse", to_json(r.coarse)},
            {"fine_curve", to_json(r.fine_curve)},
            {"coarse_curve", to_json(r.coarse_curve)},
            {"rate", detail::num(r.rate)},
            {"refined", r.refined},
            {"jackknife_se", detail::num(r.jackknife_se)},
            {"min_eigen_ratio", detail::num(r.min_eigen_ratio)},
            {"clipped_mass", detail::num(r.clipped_mass)}};
}

inline EstimateResult estimate_result_from_json(const json& j) {
    EstimateResult r;
    r.family = j.at("family");
    r.method = j.at("method");
    r.estimate = estimate_from_json(j.at("estimate"));
    r.fine = estimate_from_json(j.at("fine"));
    r.coarse = estimate_from_json(j.at("coarse"));
    r.fine_curve = curve_from_json(j.at("fine_curve"));
    r.coarse_curve = curve_from_json(j.at("coarse_curve"));
    r.rate = detail::from_num(j.at("rate"));
    r.refined = j.at("refined");
    r.jackknife_se = detail::from_num(j.at("jackknife_se"));
    r.min_eigen_ratio = detail::from_num(j.at("min_eigen_ratio"));
    r.clipped_mass = detail::from_num(j.at("clipped_mass"));
    return r;
}

} // namespace perslab
