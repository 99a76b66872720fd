#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <utility>
#include <vector>

#include "perslab/errors.hpp"

namespace perslab {

namespace gk15 {

inline constexpr std::array<double, 8> xk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes xk[1], xk[3], xk[5], xk[7].
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

} // namespace gk15

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
};

// One Gauss-Kronrod (7,15) panel; error is |K15 - G7|.
template <class F>
QuadResult gk15_panel(F&& f, double a, double b) {
    double c = 0.5 * (a + b);
    double h = 0.5 * (b - a);
    double fc = f(c);
    double k = fc * gk15::wk[7];
    double g = fc * gk15::wg[3];
    for (int j = 0; j < 7; ++j) {
        double dx = h * gk15::xk[j];
        double s = f(c - dx) + f(c + dx);
        k += gk15::wk[j] * s;
        if (j % 2 == 1)
            g += gk15::wg[j / 2] * s;
    }
    return {k * h, std::fabs((k - g) * h), true};
}

// Globally adaptive bisection on [a, b]. Breakpoints let callers isolate
// endpoint-type singularities at known interior points.
template <class F>
QuadResult integrate(F&& f, std::vector<double> breaks, double abs_tol, double rel_tol = 1e-12,
                     int max_panels = 4000) {
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    std::sort(breaks.begin(), breaks.end());
    std::priority_queue<Panel> heap;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i]))
            continue;
        auto r = gk15_panel(f, breaks[i], breaks[i + 1]);
        heap.push({breaks[i], breaks[i + 1], r.value, r.error});
        total += r.value;
        err += r.error;
    }
    int panels = static_cast<int>(heap.size());
    while (!heap.empty() && err > std::max(abs_tol, rel_tol * std::fabs(total)) && panels < max_panels) {
        Panel p = heap.top();
        heap.pop();
        double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) {
            // Interval exhausted at machine resolution; keep its error.
            heap.push({p.a, p.b, p.value, 0.0});
            continue;
        }
        auto l = gk15_panel(f, p.a, m);
        auto r = gk15_panel(f, m, p.b);
        total += l.value + r.value - p.value;
        err += l.error + r.error - p.error;
        heap.push({p.a, m, l.value, l.error});
        heap.push({m, p.b, r.value, r.error});
        ++panels;
    }
    // Re-sum to shed drift from the running updates.
    total = 0.0;
    err = 0.0;
    std::vector<Panel> all;
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (auto& p : all) {
        total += p.value;
        err += p.error;
    }
    return {total, err, err <= std::max(abs_tol, rel_tol * std::fabs(total))};
}

template <class F>
QuadResult integrate(F&& f, double a, double b, double abs_tol, double rel_tol = 1e-12,
                     int max_panels = 4000) {
    return integrate(std::forward<F>(f), std::vector<double>{a, b}, abs_tol, rel_tol, max_panels);
}

// Panel partition produced by adaptive refinement of f, for reuse with other
// integrands that share f's difficult regions.
template <class F>
std::vector<std::pair<double, double>> adapt_panels(F&& f, std::vector<double> breaks, double abs_tol,
                                                    int max_panels = 20000) {
    struct Panel {
        double a, b, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    std::sort(breaks.begin(), breaks.end());
    std::priority_queue<Panel> heap;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i]))
            continue;
        auto r = gk15_panel(f, breaks[i], breaks[i + 1]);
        heap.push({breaks[i], breaks[i + 1], r.error});
        err += r.error;
    }
    int panels = static_cast<int>(heap.size());
    while (!heap.empty() && err > abs_tol && panels < max_panels) {
        Panel p = heap.top();
        heap.pop();
        double m = 0.5 * (p.a + p.b);
        auto l = gk15_panel(f, p.a, m);
        auto r = gk15_panel(f, m, p.b);
        err += l.error + r.error - p.error;
        heap.push({p.a, m, l.error});
        heap.push({m, p.b, r.error});
        ++panels;
    }
    std::vector<std::pair<double, double>> out;
    while (!heap.empty()) {
        out.emplace_back(heap.top().a, heap.top().b);
        heap.pop();
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Fixed panel rule with Kronrod and embedded Gauss weights at shared nodes.
// Used where one node set is reused for many integrands (cosine transforms).
struct PanelRule {
    std::vector<double> nodes;
    std::vector<double> w_kronrod;
    std::vector<double> w_gauss; // zero at Kronrod-only nodes
};

inline PanelRule make_panel_rule(const std::vector<std::pair<double, double>>& panels) {
    PanelRule r;
    r.nodes.reserve(15 * panels.size());
    for (auto [lo, hi] : panels) {
        double c = 0.5 * (lo + hi);
        double h = 0.5 * (hi - lo);
        for (int j = 0; j < 15; ++j) {
            int idx = j < 8 ? j : 14 - j;
            double x = gk15::xk[idx] * (j < 7 ? -1.0 : 1.0);
            r.nodes.push_back(c + h * x);
            r.w_kronrod.push_back(h * gk15::wk[idx]);
            r.w_gauss.push_back(idx % 2 == 1 ? h * gk15::wg[idx / 2] : 0.0);
        }
    }
    return r;
}

} // namespace perslab
