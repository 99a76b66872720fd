#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "perslab/experiment.hpp"
#include "perslab/svg.hpp"
#include "perslab/verify.hpp"

namespace perslab {

// The numeric record: everything but the wall-clock metadata.
inline json bundle_to_json(const ResultBundle& b) {
    json j;
    j["config"] = b.config;
    j["checks"] = json::array();
    for (const auto& c : b.checks)
        j["checks"].push_back(to_json(c));
    j["estimates"] = json::array();
    for (const auto& e : b.estimates)
        j["estimates"].push_back({{"family", e.family}, {"result", to_json(e.result)}});
    j["tables"] = json::array();
    for (const auto& t : b.tables) {
        json rows = json::array();
        for (const auto& r : t.rows)
            rows.push_back(detail::nums(r));
        j["tables"].push_back({{"name", t.name}, {"columns", t.columns}, {"rows", rows}});
    }
    j["criteria"] = json::array();
    for (const auto& c : b.criteria)
        j["criteria"].push_back({{"id", c.id}, {"title", c.title}, {"passed", c.passed}, {"summary", c.summary},
                                 {"numbers", c.numbers}});
    j["artifacts"] = b.artifacts;
    j["all_passed"] = b.all_passed();
    return j;
}

namespace detail {

inline std::string csv_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_text(const std::string& s) {
    std::string o = "\"";
    for (char ch : s)
        o += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return o + "\"";
}

inline void write_text(const std::filesystem::path& p, const std::string& s, std::vector<std::string>& out) {
    std::ofstream os(p, std::ios::trunc);
    if (!os)
        throw IoError("cannot open for writing: " + p.string());
    os << s;
    os.flush();
    if (!os)
        throw IoError("write failed: " + p.string());
    out.push_back(p.string());
}

inline std::string checks_csv(const ResultBundle& b) {
    std::string s = "name,kind,passed,threshold,measured,details\n";
    for (const auto& c : b.checks) {
        std::string m;
        for (std::size_t i = 0; i < c.measured.size(); ++i)
            m += (i ? ";" : "") + csv_num(c.measured[i]);
        s += csv_text(c.name) + "," + to_string(c.kind) + "," + (c.passed ? "true" : "false") + "," +
             csv_num(c.threshold) + "," + csv_text(m) + "," + csv_text(c.details) + "\n";
    }
    return s;
}

inline std::string estimates_csv(const ResultBundle& b) {
    std::string s = "family,method,theta_hat,ci_half_width,std_err,raw_theta,r_squared,fit_lo,fit_hi,n_points,"
                    "n_paths,seed,grid\n";
    for (const auto& e : b.estimates) {
        const auto& r = e.result;
        s += csv_text(r.family) + "," + r.method + "," + csv_num(r.estimate.theta_hat) + "," +
             csv_num(r.estimate.ci_half_width) + "," + csv_num(r.estimate.std_err) + "," + csv_num(r.fine.theta_hat) +
             "," + csv_num(r.estimate.r_squared) + "," + csv_num(r.estimate.fit_window.first) + "," +
             csv_num(r.estimate.fit_window.second) + "," + std::to_string(r.estimate.n_points) + "," +
             std::to_string(r.estimate.n_paths) + "," + std::to_string(r.estimate.seed) + "," +
             csv_text(r.fine_curve.grid) + "\n";
    }
    return s;
}

inline std::string curves_csv(const ResultBundle& b) {
    std::string s = "family,grid_role,horizon,time,surv,log_surv,std_err,survivors,level,n_paths,seed,grid\n";
    for (const auto& e : b.estimates) {
        auto emit = [&](const SurvivalCurve& c, const char* role) {
            for (std::size_t i = 0; i < c.horizons.size(); ++i)
                s += csv_text(e.result.family) + "," + role + "," + csv_num(c.horizons[i]) + "," + csv_num(c.times[i]) +
                     "," + csv_num(c.surv[i]) + "," + csv_num(c.log_surv[i]) + "," + csv_num(c.std_err[i]) + "," +
                     std::to_string(c.survivors[i]) + "," + csv_num(c.level) + "," + std::to_string(c.n_paths) + "," +
                     std::to_string(c.seed) + "," + csv_text(c.grid) + "\n";
        };
        emit(e.result.fine_curve, "fine");
        emit(e.result.coarse_curve, "coarse");
    }
    return s;
}

inline std::string table_csv(const NamedTable& t) {
    std::string s;
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        s += (i ? "," : "") + t.columns[i];
    s += "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i)
            s += (i ? "," : "") + csv_num(r[i]);
        s += "\n";
    }
    return s;
}

inline const char* palette(std::size_t i) {
    static const char* c[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    return c[i % 7];
}

// theta-hat at alpha = 2 against H, with the H(1-H) curve and the bounds band.
inline std::string theta_vs_h_svg(const ResultBundle& b) {
    svg::Plot p;
    p.title = "alpha = 2: estimated exponent vs H";
    p.xlabel = "H";
    p.ylabel = "theta";
    svg::Band band{"bounds", {}, {}, {}, "#bbbbbb"};
    svg::Series hyp{"H(1-H)", {}, {}, {}, "#d62728", false, true};
    for (int i = 1; i < 100; ++i) {
        double h = i / 100.0;
        auto bb = eq4_bounds(h);
        band.x.push_back(h);
        band.lo.push_back(bb.lower);
        band.hi.push_back(bb.upper);
        hyp.x.push_back(h);
        hyp.y.push_back(h * (1 - h));
    }
    svg::Series pts{"estimate (95% CI)", {}, {}, {}, "#1f77b4", true, false};
    for (const auto& e : b.estimates) {
        const auto& f = e.result.family;
        double a, h;
        if (std::sscanf(f.c_str(), "fin(alpha=%lf,hurst=%lf)", &a, &h) == 2 && a == 2.0) {
            pts.x.push_back(h);
            pts.y.push_back(e.result.estimate.theta_hat);
            pts.err.push_back(e.result.estimate.ci_half_width);
        }
    }
    p.bands.push_back(band);
    p.series.push_back(hyp);
    p.series.push_back(pts);
    return svg::render(p);
}

inline std::string tables_svg(const ResultBundle& b, const std::string& prefix, const std::string& title,
                              const std::string& xlabel, const std::string& ylabel) {
    svg::Plot p;
    p.title = title;
    p.xlabel = xlabel;
    p.ylabel = ylabel;
    std::size_t k = 0;
    for (const auto& t : b.tables) {
        if (t.name.rfind(prefix, 0) != 0)
            continue;
        std::string label = t.name.substr(prefix.size());
        for (std::size_t col = 1; col < t.columns.size(); ++col) {
            svg::Series s;
            s.label = label + " " + t.columns[col];
            s.color = palette(k);
            s.dashed = col > 1;
            s.points = t.columns[col] == "double_integral";
            for (const auto& r : t.rows)
                if (std::isfinite(r[col])) {
                    s.x.push_back(r[0]);
                    s.y.push_back(r[col]);
                }
            if (!s.x.empty())
                p.series.push_back(std::move(s));
        }
        ++k;
    }
    return svg::render(p);
}

inline std::string survival_svg(const ResultBundle& b) {
    svg::Plot p;
    p.title = "survival curves";
    p.xlabel = "T";
    p.ylabel = "-ln P";
    for (std::size_t i = 0; i < b.estimates.size(); ++i) {
        const auto& c = b.estimates[i].result.fine_curve;
        svg::Series s{b.estimates[i].result.family, c.horizons, c.log_surv, {}, palette(i), false, false};
        p.series.push_back(std::move(s));
    }
    return svg::render(p);
}

} // namespace detail

inline std::vector<std::string> emit_report(const ResultBundle& b, const std::set<std::string>& formats,
                                            const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    fs::path d(out_dir);
    std::vector<std::string> out;
    if (formats.count("json")) {
        detail::write_text(d / "bundle.json", bundle_to_json(b).dump(1) + "\n", out);
        detail::write_text(d / "meta.json", b.meta.dump(1) + "\n", out);
    }
    if (formats.count("csv")) {
        detail::write_text(d / "checks.csv", detail::checks_csv(b), out);
        detail::write_text(d / "estimates.csv", detail::estimates_csv(b), out);
        detail::write_text(d / "curves.csv", detail::curves_csv(b), out);
        for (const auto& t : b.tables)
            detail::write_text(d / (t.name + ".csv"), detail::table_csv(t), out);
    }
    if (formats.count("svg")) {
        detail::write_text(d / "theta_vs_h.svg", detail::theta_vs_h_svg(b), out);
        bool spec = false, cov = false;
        for (const auto& t : b.tables) {
            spec = spec || t.name.rfind("spectrum_", 0) == 0;
            cov = cov || t.name.rfind("covariance_", 0) == 0;
        }
        if (spec)
            detail::write_text(d / "spectrum.svg",
                               detail::tables_svg(b, "spectrum_", "spectral densities", "lambda", "f"), out);
        if (cov)
            detail::write_text(d / "covariance_routes.svg",
                               detail::tables_svg(b, "covariance_", "covariance by route", "t", "B(t)"), out);
        if (!b.estimates.empty())
            detail::write_text(d / "survival.svg", detail::survival_svg(b), out);
    }
    return out;
}

} // namespace perslab
