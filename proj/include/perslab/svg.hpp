#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace perslab::svg {

struct Series {
    std::string label;
    std::vector<double> x, y;
    std::vector<double> err; // optional symmetric error bars
    std::string color = "#1f77b4";
    bool points = false;     // markers instead of a polyline
    bool dashed = false;
};

struct Band {
    std::string label;
    std::vector<double> x, lo, hi;
    std::string color = "#cccccc";
};

struct Plot {
    std::string title, xlabel, ylabel;
    std::vector<Series> series;
    std::vector<Band> bands;
    bool log_x = false, log_y = false;
    int width = 640, height = 420;
};

namespace detail {

inline std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

inline std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<')
            o += "&lt;";
        else if (c == '>')
            o += "&gt;";
        else if (c == '&')
            o += "&amp;";
        else
            o += c;
    }
    return o;
}

inline std::vector<double> ticks(double lo, double hi) {
    double span = hi - lo;
    if (!(span > 0))
        return {lo};
    double raw = span / 5.0;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
        t.push_back(std::fabs(v) < 1e-12 * step ? 0.0 : v);
    return t;
}

} // namespace detail

inline std::string render(const Plot& p) {
    const double ml = 70, mr = 160, mt = 40, mb = 55;
    const double W = p.width, Hh = p.height, pw = W - ml - mr, ph = Hh - mt - mb;
    auto tx = [&](double v) { return p.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return p.log_y ? std::log10(v) : v; };
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto grow = [&](double x, double y) {
        if (!std::isfinite(tx(x)) || !std::isfinite(ty(y)))
            return;
        x0 = std::min(x0, tx(x));
        x1 = std::max(x1, tx(x));
        y0 = std::min(y0, ty(y));
        y1 = std::max(y1, ty(y));
    };
    for (const auto& s : p.series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double e = i < s.err.size() ? s.err[i] : 0.0;
            grow(s.x[i], s.y[i] - e);
            grow(s.x[i], s.y[i] + e);
        }
    for (const auto& b : p.bands)
        for (std::size_t i = 0; i < b.x.size(); ++i) {
            grow(b.x[i], b.lo[i]);
            grow(b.x[i], b.hi[i]);
        }
    if (!std::isfinite(x0)) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    if (x1 - x0 < 1e-12) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (y1 - y0 < 1e-12) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto X = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * pw; };
    auto Y = [&](double v) { return mt + (1.0 - (ty(v) - y0) / (y1 - y0)) * ph; };
    using detail::num;
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hh
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << detail::esc(p.title)
      << "</text>\n";
    for (const auto& b : p.bands) {
        if (b.x.empty())
            continue;
        o << "<polygon fill=\"" << b.color << "\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < b.x.size(); ++i)
            o << num(X(b.x[i])) << "," << num(Y(b.hi[i])) << " ";
        for (std::size_t i = b.x.size(); i-- > 0;)
            o << num(X(b.x[i])) << "," << num(Y(b.lo[i])) << " ";
        o << "\"/>\n";
    }
    o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : detail::ticks(x0, x1)) {
        double xv = ml + (t - x0) / (x1 - x0) * pw;
        o << "<line x1=\"" << num(xv) << "\" y1=\"" << mt + ph << "\" x2=\"" << num(xv) << "\" y2=\"" << mt + ph + 5
          << "\" stroke=\"black\"/><text x=\"" << num(xv) << "\" y=\"" << mt + ph + 18 << "\" text-anchor=\"middle\">"
          << num(p.log_x ? std::pow(10.0, t) : t) << "</text>\n";
    }
    for (double t : detail::ticks(y0, y1)) {
        double yv = mt + (1.0 - (t - y0) / (y1 - y0)) * ph;
        o << "<line x1=\"" << ml - 5 << "\" y1=\"" << num(yv) << "\" x2=\"" << ml << "\" y2=\"" << num(yv)
          << "\" stroke=\"black\"/><text x=\"" << ml - 8 << "\" y=\"" << num(yv + 4) << "\" text-anchor=\"end\">"
          << num(p.log_y ? std::pow(10.0, t) : t) << "</text>\n";
    }
    o << "<text x=\"" << ml + pw / 2 << "\" y=\"" << Hh - 12 << "\" text-anchor=\"middle\">" << detail::esc(p.xlabel)
      << "</text>\n";
    o << "<text transform=\"translate(16," << mt + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << detail::esc(p.ylabel) << "</text>\n";
    for (const auto& s : p.series) {
        if (s.points) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (i < s.err.size() && s.err[i] > 0)
                    o << "<line x1=\"" << num(X(s.x[i])) << "\" y1=\"" << num(Y(s.y[i] - s.err[i])) << "\" x2=\""
                      << num(X(s.x[i])) << "\" y2=\"" << num(Y(s.y[i] + s.err[i])) << "\" stroke=\"" << s.color
                      << "\"/>\n";
                o << "<circle cx=\"" << num(X(s.x[i])) << "\" cy=\"" << num(Y(s.y[i])) << "\" r=\"3.5\" fill=\""
                  << s.color << "\"/>\n";
            }
        } else if (!s.x.empty()) {
            o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\""
              << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                if (std::isfinite(tx(s.x[i])) && std::isfinite(ty(s.y[i])))
                    o << num(X(s.x[i])) << "," << num(Y(s.y[i])) << " ";
            o << "\"/>\n";
        }
    }
    double ly = mt + 10;
    auto legend = [&](const std::string& label, const std::string& color) {
        o << "<rect x=\"" << ml + pw + 12 << "\" y=\"" << ly - 9 << "\" width=\"14\" height=\"10\" fill=\"" << color
          << "\"/><text x=\"" << ml + pw + 32 << "\" y=\"" << ly << "\">" << detail::esc(label) << "</text>\n";
        ly += 18;
    };
    for (const auto& b : p.bands)
        if (!b.label.empty())
            legend(b.label, b.color);
    for (const auto& s : p.series)
        if (!s.label.empty())
            legend(s.label, s.color);
    o << "</svg>\n";
    return o.str();
}

} // namespace perslab::svg
