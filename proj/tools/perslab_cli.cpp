#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "perslab/cache.hpp"
#include "perslab/config.hpp"
#include "perslab/experiment.hpp"
#include "perslab/report.hpp"

using namespace perslab;

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::string out;
    std::string formats;
    std::string criteria;
    bool no_cache = false;
    bool quiet = false;
};

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

ExperimentConfig build_config(const std::string& sub, const Flags& f) {
    json j;
    if (!f.config.empty()) {
        std::ifstream is(f.config);
        if (!is)
            throw IoError("cannot open config: " + f.config);
        try {
            j = json::parse(is);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }
        if (!j.is_object())
            throw ConfigError("config: expected an object");
        if (j.contains("experiment") && j["experiment"] != sub)
            throw ConfigError("config.experiment is '" + j["experiment"].dump() + "' but the subcommand is " + sub);
    } else {
        j = {{"schema_version", config_schema_version}};
    }
    j["experiment"] = sub;
    if (f.seed)
        j["seed"] = *f.seed;
    if (f.workers)
        j["workers"] = *f.workers;
    if (!f.out.empty())
        j["output_dir"] = f.out;
    if (!f.formats.empty())
        j["formats"] = split(f.formats);
    if (!f.criteria.empty()) {
        json ks = json::array();
        for (const auto& k : split(f.criteria)) {
            try {
                ks.push_back(std::stoi(k));
            } catch (const std::exception&) {
                throw ConfigError("--criteria: not an integer: " + k);
            }
        }
        j["reproduce"]["criteria"] = ks;
    }
    return parse_config(j);
}

void print_checks(const ResultBundle& b) {
    if (!b.criteria.empty()) {
        for (const auto& c : b.criteria)
            std::printf("criterion %-2d %s  %s\n             %s\n", c.id, c.passed ? "PASS" : "FAIL", c.title.c_str(),
                        c.summary.c_str());
        return;
    }
    for (const auto& c : b.checks) {
        std::string m;
        for (std::size_t i = 0; i < c.measured.size() && i < 4; ++i) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%s%.4g", i ? " " : "", c.measured[i]);
            m += buf;
        }
        std::printf("%-4s %-28s %-11s measured %-30s threshold %.3g\n", c.passed ? "ok" : "FAIL", c.name.c_str(),
                    to_string(c.kind), m.c_str(), c.threshold);
    }
    for (const auto& e : b.estimates)
        std::printf("theta %-44s %.4f +- %.4f (%s)\n", e.result.family.c_str(), e.result.estimate.theta_hat,
                    e.result.estimate.ci_half_width, e.result.method.c_str());
}

int run(const std::string& sub, const Flags& f) {
    auto cfg = build_config(sub, f);
    Cache cache;
    if (!f.no_cache)
        cache = Cache::from_env(std::filesystem::path(cfg.output_dir) / "cache");
    auto bundle = run_experiment(cfg, cache, f.quiet ? nullptr : &std::cerr);
    auto files = emit_report(bundle, cfg.formats, cfg.output_dir);
    if (!f.quiet) {
        print_checks(bundle);
        for (const auto& p : files)
            std::printf("wrote %s\n", p.c_str());
    }
    return bundle.all_passed() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Persistence-exponent laboratory for fractionally integrated fractional noise"};
    app.require_subcommand(1);
    Flags flags;
    std::string chosen;
    for (const char* name : {"spectrum", "covariance", "simulate", "estimate", "verify", "reproduce"}) {
        auto* s = app.add_subcommand(name);
        s->add_option("--config", flags.config, "JSON config file (schema_version 1)");
        s->add_option("--seed", flags.seed, "master seed");
        s->add_option("--workers", flags.workers, "worker threads (default: logical cores)");
        s->add_option("--out", flags.out, "output directory");
        s->add_option("--format", flags.formats, "comma-separated subset of csv,json,svg");
        s->add_flag("--no-cache", flags.no_cache, "ignore and do not write the cache");
        s->add_flag("--quiet", flags.quiet, "no console output");
        if (std::string(name) == "reproduce")
            s->add_option("--criteria", flags.criteria, "comma-separated criteria to run (default all)");
        s->callback([&chosen, name] { chosen = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        return run(chosen, flags);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ComputeError& e) {
        std::cerr << "compute error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
