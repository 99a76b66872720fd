#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "perslab/covariance.hpp"
#include "perslab/ensemble_io.hpp"
#include "perslab/estimate.hpp"
#include "perslab/serialize.hpp"

namespace perslab {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Content-addressed store for covariance tables and estimates. Keys hash the
// generating parameters (with a format version), so a stale entry can only
// be hit by a hash collision.
class Cache {
public:
    Cache() = default; // disabled
    explicit Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    // PERSLAB_CACHE_DIR wins over the given default.
    static Cache from_env(const std::filesystem::path& fallback) {
        if (const char* e = std::getenv("PERSLAB_CACHE_DIR"); e && *e)
            return Cache(e);
        return Cache(fallback);
    }

    bool enabled() const { return !dir_.empty(); }
    const std::filesystem::path& dir() const { return dir_; }

    static std::string table_key(const ProcessFamily& f, double lag_step, std::size_t n_lags) {
        std::ostringstream os;
        os.precision(17);
        os << "cov1|" << family_tag(f) << "|" << lag_step << "|" << n_lags;
        return hex64(fnv1a(os.str()));
    }

    static std::string estimate_key(const ProcessFamily& f, const EstimateOptions& o) {
        std::ostringstream os;
        os.precision(17);
        os << "est1|" << family_tag(f) << "|" << o.duration << "|" << o.lag_step << "|" << o.n_paths << "|" << o.seed
           << "|" << o.horizon_step << "|" << o.min_survivors << "|" << o.refine << "|" << o.jackknife_groups << "|"
           << o.stationary.negative_tolerance << "|" << static_cast<int>(o.stationary.policy);
        return hex64(fnv1a(os.str()));
    }

    CovarianceTable table(const ProcessFamily& f, double lag_step, std::size_t n_lags, unsigned workers) const {
        if (!enabled())
            return family_covariance_table(f, lag_step, n_lags, workers);
        auto path = dir_ / ("cov-" + table_key(f, lag_step, n_lags) + ".bin");
        if (std::filesystem::exists(path)) {
            auto t = read_cov_table(path.string());
            if (t.params_tag == family_tag(f) && t.values.size() == n_lags + 1 && t.lag_step == lag_step)
                return t;
        }
        auto t = family_covariance_table(f, lag_step, n_lags, workers);
        store([&](const std::string& tmp) { write_cov_table(tmp, t); }, path);
        return t;
    }

    EstimateResult estimate(const ProcessFamily& f, const EstimateOptions& o) const {
        auto run = [&] {
            double steps = o.duration / o.lag_step;
            auto n_steps = static_cast<std::size_t>(std::llround(steps));
            auto t = table(f, o.lag_step, smooth_half_length(n_steps), o.workers);
            return estimate_exponent_from_table(f, t, o);
        };
        if (!enabled())
            return run();
        auto path = dir_ / ("est-" + estimate_key(f, o) + ".json");
        if (std::filesystem::exists(path)) {
            std::ifstream is(path);
            try {
                auto j = json::parse(is);
                if (j.at("family") == family_tag(f))
                    return estimate_result_from_json(j);
            } catch (const std::exception&) {
                // unreadable entry: recompute and overwrite
            }
        }
        auto r = run();
        store(
            [&](const std::string& tmp) {
                std::ofstream os(tmp);
                os << to_json(r).dump();
                if (!os)
                    throw IoError("cache write failed: " + tmp);
            },
            path);
        return r;
    }

private:
    template <class Writer>
    void store(Writer&& w, const std::filesystem::path& path) const {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec)
            throw IoError("cannot create cache directory " + dir_.string() + ": " + ec.message());
        auto tmp = path.string() + ".tmp";
        w(tmp);
        std::filesystem::rename(tmp, path, ec);
        if (ec)
            throw IoError("cannot move cache entry into place: " + ec.message());
    }

    std::filesystem::path dir_;
};

} // namespace perslab
