#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "perslab/covariance.hpp"
#include "perslab/errors.hpp"
#include "perslab/simulate.hpp"

namespace perslab {

// Binary layout (little-endian, as written by the host):
//   char[8] magic "PLENS001" | u32 version | u64 seed | u64 n_paths | u64 n_points
//   u32 grid kind (0 uniform, 1 exponential) | f64 step | f64 origin
//   u32 tag length | tag bytes | f64 points[n_points] | f64 data[n_paths * n_points]
inline constexpr char ensemble_magic[8] = {'P', 'L', 'E', 'N', 'S', '0', '0', '1'};
inline constexpr std::uint32_t ensemble_version = 1;

namespace detail {

template <class T>
void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is, const std::string& path) {
    T v;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T)))
        throw IoError("truncated file: " + path);
    return v;
}

inline std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream os(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!os)
        throw IoError("cannot open for writing: " + path);
    return os;
}

inline void finish(std::ofstream& os, const std::string& path) {
    os.flush();
    if (!os)
        throw IoError("write failed: " + path);
}

} // namespace detail

inline void write_ensemble(const std::string& path, const PathEnsemble& e) {
    auto os = detail::open_out(path, true);
    os.write(ensemble_magic, 8);
    detail::put(os, ensemble_version);
    detail::put(os, e.seed);
    detail::put<std::uint64_t>(os, e.n_paths);
    detail::put<std::uint64_t>(os, e.n_points());
    detail::put<std::uint32_t>(os, e.grid.kind == GridKind::Uniform ? 0 : 1);
    detail::put(os, e.grid.step);
    detail::put(os, e.grid.origin);
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(e.generator_tag.size()));
    os.write(e.generator_tag.data(), static_cast<std::streamsize>(e.generator_tag.size()));
    os.write(reinterpret_cast<const char*>(e.grid.points.data()),
             static_cast<std::streamsize>(e.grid.points.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(e.data.data()), static_cast<std::streamsize>(e.data.size() * sizeof(double)));
    detail::finish(os, path);
}

inline PathEnsemble read_ensemble(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open: " + path);
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, ensemble_magic, 8) != 0)
        throw IoError("not an ensemble file: " + path);
    if (detail::get<std::uint32_t>(is, path) != ensemble_version)
        throw IoError("unsupported ensemble version: " + path);
    PathEnsemble e;
    e.seed = detail::get<std::uint64_t>(is, path);
    e.n_paths = detail::get<std::uint64_t>(is, path);
    auto n_points = detail::get<std::uint64_t>(is, path);
    auto kind = detail::get<std::uint32_t>(is, path);
    if (kind > 1)
        throw IoError("bad grid kind in " + path);
    e.grid.kind = kind == 0 ? GridKind::Uniform : GridKind::Exponential;
    e.grid.step = detail::get<double>(is, path);
    e.grid.origin = detail::get<double>(is, path);
    auto tag_len = detail::get<std::uint32_t>(is, path);
    if (tag_len > (1u << 20) || n_points > (1ull << 32) || e.n_paths > (1ull << 40))
        throw IoError("implausible header in " + path);
    e.generator_tag.resize(tag_len);
    if (!is.read(e.generator_tag.data(), tag_len))
        throw IoError("truncated file: " + path);
    e.grid.points.resize(n_points);
    if (!is.read(reinterpret_cast<char*>(e.grid.points.data()), static_cast<std::streamsize>(n_points * sizeof(double))))
        throw IoError("truncated file: " + path);
    e.data.resize(e.n_paths * n_points);
    if (!is.read(reinterpret_cast<char*>(e.data.data()), static_cast<std::streamsize>(e.data.size() * sizeof(double))))
        throw IoError("truncated file: " + path);
    return e;
}

// One row per grid point: t, then one column per path.
inline void write_ensemble_csv(const std::string& path, const PathEnsemble& e) {
    auto os = detail::open_out(path, false);
    os << "# seed=" << e.seed << " n_paths=" << e.n_paths << " grid=" << e.grid.describe()
       << " generator=" << e.generator_tag << "\n";
    os << "t";
    for (std::size_t p = 0; p < e.n_paths; ++p)
        os << ",path" << p;
    os << "\n";
    char buf[32];
    for (std::size_t i = 0; i < e.n_points(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", e.grid.points[i]);
        os << buf;
        for (std::size_t p = 0; p < e.n_paths; ++p) {
            std::snprintf(buf, sizeof buf, "%.17g", e.path(p)[i]);
            os << ',' << buf;
        }
        os << "\n";
    }
    detail::finish(os, path);
}

// Covariance tables for the cache: "PLCOV001", lag_step, kappa, max_error, tag, values.
inline void write_cov_table(const std::string& path, const CovarianceTable& t) {
    auto os = detail::open_out(path, true);
    os.write("PLCOV001", 8);
    detail::put(os, t.lag_step);
    detail::put(os, t.kappa);
    detail::put(os, t.max_error);
    detail::put<std::uint64_t>(os, t.values.size());
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(t.params_tag.size()));
    os.write(t.params_tag.data(), static_cast<std::streamsize>(t.params_tag.size()));
    os.write(reinterpret_cast<const char*>(t.values.data()), static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    detail::finish(os, path);
}

inline CovarianceTable read_cov_table(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open: " + path);
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, "PLCOV001", 8) != 0)
        throw IoError("not a covariance table: " + path);
    CovarianceTable t;
    t.lag_step = detail::get<double>(is, path);
    t.kappa = detail::get<double>(is, path);
    t.max_error = detail::get<double>(is, path);
    auto n = detail::get<std::uint64_t>(is, path);
    auto tag_len = detail::get<std::uint32_t>(is, path);
    if (n > (1ull << 32) || tag_len > (1u << 20))
        throw IoError("implausible header in " + path);
    t.params_tag.resize(tag_len);
    if (!is.read(t.params_tag.data(), tag_len))
        throw IoError("truncated file: " + path);
    t.values.resize(n);
    if (!is.read(reinterpret_cast<char*>(t.values.data()), static_cast<std::streamsize>(n * sizeof(double))))
        throw IoError("truncated file: " + path);
    return t;
}

} // namespace perslab
