#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "perslab/errors.hpp"
#include "perslab/model.hpp"
#include "perslab/serialize.hpp"

namespace perslab {

inline constexpr int config_schema_version = 1;

struct Budget {
    std::size_t n_paths = 100000;
    double duration = 200.0;
    double lag_step = 0.05;
    double horizon_step = 0.5;
    bool refine = true;
};

struct SpectrumSpec {
    double lambda_max = 10.0;
    std::size_t n_lambda = 201;
};

struct CovarianceSpec {
    double lag_step = 0.05;
    std::size_t n_lags = 200;
    std::vector<std::string> routes{"spectral", "closed", "double_integral"};
    std::size_t double_integral_stride = 10; // evaluate the slow route on every k-th lag
};

struct SimulateSpec {
    std::string process = "fbm"; // fbm | rl | stationary
    double hurst = 0.5;
    double alpha = 1.0;          // rl only
    std::size_t n_points = 1025;
    double step = 1.0 / 1024.0;
    std::size_t n_paths = 1000;
    std::string format = "binary"; // binary | csv
};

struct Tolerances {
    double symmetry = 1e-10;
    double normalization = 1e-6;
    double closed_form = 1e-6;
    double double_integral = 1e-3;
};

struct VerifySpec {
    bool statistical = false; // include MC-based checks (estimates are cached)
};

struct ReproduceSpec {
    std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8, 9};
};

struct ExperimentConfig {
    int schema_version = config_schema_version;
    std::string experiment;
    std::uint64_t seed = 1;
    unsigned workers = 0; // 0: logical cores
    std::string output_dir = "perslab_out";
    std::set<std::string> formats{"csv", "json", "svg"};
    std::vector<ProcessFamily> points;
    Budget budget;
    SpectrumSpec spectrum;
    CovarianceSpec covariance;
    SimulateSpec simulate;
    Tolerances tolerances;
    VerifySpec verify;
    ReproduceSpec reproduce;
};

inline const std::set<std::string>& experiment_kinds() {
    static const std::set<std::string> k{"spectrum", "covariance", "simulate", "estimate", "verify", "reproduce"};
    return k;
}

namespace detail {

inline void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object())
        throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : keys)
            ok = ok || it.key() == k;
        if (!ok)
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

inline double get_real(const json& j, const std::string& key, const std::string& where, double dflt) {
    if (!j.contains(key))
        return dflt;
    if (!j[key].is_number())
        throw ConfigError(where + "." + key + ": expected a number");
    return j[key].get<double>();
}

inline double get_positive(const json& j, const std::string& key, const std::string& where, double dflt) {
    double v = get_real(j, key, where, dflt);
    if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError(where + "." + key + ": must be positive");
    return v;
}

inline std::size_t get_count(const json& j, const std::string& key, const std::string& where, std::size_t dflt,
                             std::size_t min = 1) {
    if (!j.contains(key))
        return dflt;
    const auto& v = j[key];
    if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min))
        throw ConfigError(where + "." + key + ": expected an integer >= " + std::to_string(min));
    return v.get<std::size_t>();
}

inline std::string get_choice(const json& j, const std::string& key, const std::string& where,
                              const std::string& dflt, std::initializer_list<const char*> choices) {
    if (!j.contains(key))
        return dflt;
    if (!j[key].is_string())
        throw ConfigError(where + "." + key + ": expected a string");
    auto s = j[key].get<std::string>();
    for (const char* c : choices)
        if (s == c)
            return s;
    throw ConfigError(where + "." + key + ": unsupported value '" + s + "'");
}

inline ProcessFamily parse_family(const json& j, const std::string& where) {
    allow_keys(j, where, {"family", "alpha", "hurst"});
    auto fam = get_choice(j, "family", where, "fin", {"fin", "laplace_dual", "ou"});
    try {
        if (fam == "ou") {
            if (j.contains("alpha") || j.contains("hurst"))
                throw ConfigError(where + ": the ou family takes no parameters");
            return OrnsteinUhlenbeck{};
        }
        if (!j.contains("hurst"))
            throw ConfigError(where + ": missing 'hurst'");
        double h = get_real(j, "hurst", where, 0.0);
        if (fam == "laplace_dual") {
            if (j.contains("alpha"))
                throw ConfigError(where + ": laplace_dual takes no 'alpha'");
            return make_laplace_dual(h);
        }
        if (!j.contains("alpha"))
            throw ConfigError(where + ": missing 'alpha'");
        return FractionalIntegratedNoise{make_params(get_real(j, "alpha", where, 0.0), h)};
    } catch (const DomainError& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

} // namespace detail

inline ExperimentConfig parse_config(const json& j) {
    using namespace detail;
    allow_keys(j, "config",
               {"schema_version", "experiment", "seed", "workers", "output_dir", "formats", "points", "grid", "budget",
                "spectrum", "covariance", "simulate", "tolerances", "verify", "reproduce"});
    ExperimentConfig c;
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer())
        throw ConfigError("config.schema_version: required integer");
    c.schema_version = j["schema_version"].get<int>();
    if (c.schema_version != config_schema_version)
        throw ConfigError("config.schema_version: unsupported version " + std::to_string(c.schema_version));
    if (!j.contains("experiment") || !j["experiment"].is_string())
        throw ConfigError("config.experiment: required string");
    c.experiment = j["experiment"].get<std::string>();
    if (!experiment_kinds().count(c.experiment))
        throw ConfigError("config.experiment: unknown kind '" + c.experiment + "'");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || (!j["seed"].is_number_unsigned() && j["seed"].get<std::int64_t>() < 0))
            throw ConfigError("config.seed: expected a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    c.workers = static_cast<unsigned>(get_count(j, "workers", "config", 0, 0));
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string() || j["output_dir"].get<std::string>().empty())
            throw ConfigError("config.output_dir: expected a non-empty string");
        c.output_dir = j["output_dir"];
    }
    if (j.contains("formats")) {
        if (!j["formats"].is_array())
            throw ConfigError("config.formats: expected an array");
        c.formats.clear();
        for (const auto& f : j["formats"]) {
            if (!f.is_string() || (f != "csv" && f != "json" && f != "svg"))
                throw ConfigError("config.formats: entries must be csv, json or svg");
            c.formats.insert(f.get<std::string>());
        }
    }
    if (j.contains("points")) {
        if (!j["points"].is_array())
            throw ConfigError("config.points: expected an array");
        for (std::size_t i = 0; i < j["points"].size(); ++i)
            c.points.push_back(parse_family(j["points"][i], "config.points[" + std::to_string(i) + "]"));
    }
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        allow_keys(g, "config.grid", {"alpha", "hurst"});
        if (!g.contains("alpha") || !g.contains("hurst") || !g["alpha"].is_array() || !g["hurst"].is_array())
            throw ConfigError("config.grid: needs 'alpha' and 'hurst' arrays");
        for (const auto& a : g["alpha"])
            for (const auto& h : g["hurst"]) {
                if (!a.is_number() || !h.is_number())
                    throw ConfigError("config.grid: entries must be numbers");
                json p = {{"alpha", a}, {"hurst", h}};
                c.points.push_back(parse_family(p, "config.grid"));
            }
    }
    if (j.contains("budget")) {
        const auto& b = j["budget"];
        allow_keys(b, "config.budget", {"n_paths", "duration", "lag_step", "horizon_step", "refine"});
        c.budget.n_paths = get_count(b, "n_paths", "config.budget", c.budget.n_paths, 100);
        c.budget.duration = get_positive(b, "duration", "config.budget", c.budget.duration);
        c.budget.lag_step = get_positive(b, "lag_step", "config.budget", c.budget.lag_step);
        c.budget.horizon_step = get_positive(b, "horizon_step", "config.budget", c.budget.horizon_step);
        if (b.contains("refine")) {
            if (!b["refine"].is_boolean())
                throw ConfigError("config.budget.refine: expected a boolean");
            c.budget.refine = b["refine"];
        }
    }
    if (j.contains("spectrum")) {
        const auto& s = j["spectrum"];
        allow_keys(s, "config.spectrum", {"lambda_max", "n_lambda"});
        c.spectrum.lambda_max = get_positive(s, "lambda_max", "config.spectrum", c.spectrum.lambda_max);
        c.spectrum.n_lambda = get_count(s, "n_lambda", "config.spectrum", c.spectrum.n_lambda, 2);
    }
    if (j.contains("covariance")) {
        const auto& s = j["covariance"];
        allow_keys(s, "config.covariance", {"lag_step", "n_lags", "routes", "double_integral_stride"});
        c.covariance.lag_step = get_positive(s, "lag_step", "config.covariance", c.covariance.lag_step);
        c.covariance.n_lags = get_count(s, "n_lags", "config.covariance", c.covariance.n_lags, 1);
        c.covariance.double_integral_stride =
            get_count(s, "double_integral_stride", "config.covariance", c.covariance.double_integral_stride, 1);
        if (s.contains("routes")) {
            if (!s["routes"].is_array())
                throw ConfigError("config.covariance.routes: expected an array");
            c.covariance.routes.clear();
            for (const auto& r : s["routes"]) {
                if (!r.is_string() || (r != "spectral" && r != "closed" && r != "double_integral"))
                    throw ConfigError("config.covariance.routes: entries must be spectral, closed or double_integral");
                c.covariance.routes.push_back(r);
            }
        }
    }
    if (j.contains("simulate")) {
        const auto& s = j["simulate"];
        allow_keys(s, "config.simulate", {"process", "hurst", "alpha", "n_points", "step", "n_paths", "format"});
        c.simulate.process = get_choice(s, "process", "config.simulate", c.simulate.process, {"fbm", "rl", "stationary"});
        c.simulate.hurst = get_real(s, "hurst", "config.simulate", c.simulate.hurst);
        c.simulate.alpha = get_real(s, "alpha", "config.simulate", c.simulate.alpha);
        c.simulate.n_points = get_count(s, "n_points", "config.simulate", c.simulate.n_points, 2);
        c.simulate.step = get_positive(s, "step", "config.simulate", c.simulate.step);
        c.simulate.n_paths = get_count(s, "n_paths", "config.simulate", c.simulate.n_paths, 1);
        c.simulate.format = get_choice(s, "format", "config.simulate", c.simulate.format, {"binary", "csv"});
        if (!(c.simulate.hurst > 0.0 && c.simulate.hurst < 1.0))
            throw ConfigError("config.simulate.hurst: must lie in (0, 1)");
        if (c.simulate.process != "fbm" && !(c.simulate.alpha + c.simulate.hurst > 1.0))
            throw ConfigError("config.simulate: need alpha + hurst > 1");
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        allow_keys(t, "config.tolerances", {"symmetry", "normalization", "closed_form", "double_integral"});
        c.tolerances.symmetry = get_positive(t, "symmetry", "config.tolerances", c.tolerances.symmetry);
        c.tolerances.normalization = get_positive(t, "normalization", "config.tolerances", c.tolerances.normalization);
        c.tolerances.closed_form = get_positive(t, "closed_form", "config.tolerances", c.tolerances.closed_form);
        c.tolerances.double_integral =
            get_positive(t, "double_integral", "config.tolerances", c.tolerances.double_integral);
    }
    if (j.contains("verify")) {
        const auto& v = j["verify"];
        allow_keys(v, "config.verify", {"statistical"});
        if (v.contains("statistical")) {
            if (!v["statistical"].is_boolean())
                throw ConfigError("config.verify.statistical: expected a boolean");
            c.verify.statistical = v["statistical"];
        }
    }
    if (j.contains("reproduce")) {
        const auto& r = j["reproduce"];
        allow_keys(r, "config.reproduce", {"criteria"});
        if (r.contains("criteria")) {
            if (!r["criteria"].is_array())
                throw ConfigError("config.reproduce.criteria: expected an array");
            c.reproduce.criteria.clear();
            for (const auto& k : r["criteria"]) {
                if (!k.is_number_integer() || k.get<int>() < 1 || k.get<int>() > 9)
                    throw ConfigError("config.reproduce.criteria: entries must be integers 1..9");
                c.reproduce.criteria.push_back(k);
            }
        }
    }
    bool needs_points = c.experiment == "spectrum" || c.experiment == "covariance" || c.experiment == "estimate";
    if (needs_points && c.points.empty())
        throw ConfigError("config: experiment '" + c.experiment + "' needs 'points' or 'grid'");
    if (c.experiment == "estimate") {
        double r = c.budget.duration / c.budget.lag_step;
        if (std::fabs(r - std::round(r)) > 1e-9 * r)
            throw ConfigError("config.budget: duration must be a multiple of lag_step");
        double hs = c.budget.horizon_step / c.budget.lag_step;
        if (std::fabs(hs - std::round(hs)) > 1e-9 || std::llround(hs) % 2 != 0)
            throw ConfigError("config.budget: horizon_step must be an even multiple of lag_step");
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw IoError("cannot open config: " + path);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

inline json family_to_json(const ProcessFamily& f) {
    if (auto* n = std::get_if<FractionalIntegratedNoise>(&f))
        return {{"family", "fin"}, {"alpha", n->params.alpha()}, {"hurst", n->params.hurst()}};
    if (auto* l = std::get_if<LaplaceFbmDual>(&f))
        return {{"family", "laplace_dual"}, {"hurst", l->hurst}};
    return {{"family", "ou"}};
}

// Normalized snapshot: parsing it again yields the same config.
inline json config_to_json(const ExperimentConfig& c) {
    json pts = json::array();
    for (const auto& f : c.points)
        pts.push_back(family_to_json(f));
    return {{"schema_version", c.schema_version},
            {"experiment", c.experiment},
            {"seed", c.seed},
            {"workers", c.workers},
            {"output_dir", c.output_dir},
            {"formats", c.formats},
            {"points", pts},
            {"budget",
             {{"n_paths", c.budget.n_paths},
              {"duration", c.budget.duration},
              {"lag_step", c.budget.lag_step},
              {"horizon_step", c.budget.horizon_step},
              {"refine", c.budget.refine}}},
            {"spectrum", {{"lambda_max", c.spectrum.lambda_max}, {"n_lambda", c.spectrum.n_lambda}}},
            {"covariance",
             {{"lag_step", c.covariance.lag_step},
              {"n_lags", c.covariance.n_lags},
              {"routes", c.covariance.routes},
              {"double_integral_stride", c.covariance.double_integral_stride}}},
            {"simulate",
             {{"process", c.simulate.process},
              {"hurst", c.simulate.hurst},
              {"alpha", c.simulate.alpha},
              {"n_points", c.simulate.n_points},
              {"step", c.simulate.step},
              {"n_paths", c.simulate.n_paths},
              {"format", c.simulate.format}}},
            {"tolerances",
             {{"symmetry", c.tolerances.symmetry},
              {"normalization", c.tolerances.normalization},
              {"closed_form", c.tolerances.closed_form},
              {"double_integral", c.tolerances.double_integral}}},
            {"verify", {{"statistical", c.verify.statistical}}},
            {"reproduce", {{"criteria", c.reproduce.criteria}}}};
}

} // namespace perslab
