#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "rsmanet/errors.hpp"

namespace rsmanet {

enum class QuadTransform { None, RationalMap };

/// Tolerances and budget for adaptive integration.
///
/// Half-line integrals are mapped onto [0, 1) by x = lo + map_scale * u / (1 - u).
struct QuadratureSpec {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_subdivisions = 2000;
    QuadTransform transform = QuadTransform::RationalMap;
    double map_scale = 1.0;
};

inline QuadratureSpec validate(const QuadratureSpec& q) {
    if (!(q.rel_tol >= 1e-13) || !(q.abs_tol > 0.0)) throw DomainError("quadrature tolerances must be positive, rel_tol >= 1e-13");
    if (q.max_subdivisions < 1) throw DomainError("quadrature needs at least one subdivision");
    if (!(q.map_scale > 0.0)) throw DomainError("quadrature map_scale must be positive");
    return q;
}

struct Interval {
    double lo;
    double hi;
};

struct HalfLine {
    double lo = 0.0;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
};

namespace detail {

struct Panel {
    double lo, hi, value, error;
    std::size_t id;
};

struct PanelOrder {
    bool operator()(const Panel& a, const Panel& b) const {
        if (a.error != b.error) return a.error < b.error;
        return a.id > b.id;
    }
};

// 15-point Kronrod rule with the embedded 7-point Gauss rule.
template <class F>
Panel gk15(F& f, double lo, double hi, std::size_t id) {
    static constexpr std::array<double, 8> xgk = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.0};
    static constexpr std::array<double, 8> wgk = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr std::array<double, 4> wg = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double resk = fc * wgk[7];
    double resg = fc * wg[3];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        resk += wgk[j] * (f1[j] + f2[j]);
        resabs += wgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += wg[j / 2] * (f1[j] + f2[j]);
    }
    const double mean = 0.5 * resk;
    double resasc = wgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    resk *= half;
    resasc *= std::abs(half);
    resabs *= std::abs(half);
    double err = std::abs((resk - resg * half));
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = 2.220446049250313e-16;
    if (resabs > 1e-290 / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);
    return {lo, hi, resk, err, id};
}

template <class G>
QuadResult adaptive(G& g, double lo, double hi, int initial_panels, const QuadratureSpec& spec) {
    std::priority_queue<Panel, std::vector<Panel>, PanelOrder> queue;
    std::vector<Panel> settled;
    std::size_t next_id = 0;
    int evals = 0;
    double value = 0.0, error = 0.0;
    const double width = (hi - lo) / initial_panels;
    for (int i = 0; i < initial_panels; ++i) {
        const double a = lo + i * width;
        const double b = (i + 1 == initial_panels) ? hi : lo + (i + 1) * width;
        const Panel p = gk15(g, a, b, next_id++);
        value += p.value;
        error += p.error;
        queue.push(p);
        evals += 15;
    }

    // Final sums are taken in left-to-right order so they do not depend on heap layout.
    auto totals = [&] {
        std::vector<Panel> all = settled;
        auto copy = queue;
        while (!copy.empty()) {
            all.push_back(copy.top());
            copy.pop();
        }
        std::sort(all.begin(), all.end(), [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
        double v = 0.0, e = 0.0;
        for (const auto& p : all) {
            v += p.value;
            e += p.error;
        }
        return std::pair{v, e};
    };

    int subdivisions = 0;
    while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value))) {
        if (queue.empty()) break;
        if (subdivisions >= spec.max_subdivisions) {
            const auto [v, e] = totals();
            throw NoConvergence("adaptive quadrature exhausted " + std::to_string(spec.max_subdivisions) +
                                    " subdivisions",
                                v, e);
        }
        Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi) ||
            std::abs(worst.hi - worst.lo) <= 1e-14 * std::max(std::abs(worst.lo), std::abs(worst.hi))) {
            // Cannot be refined any further in double precision.
            settled.push_back(worst);
            continue;
        }
        Panel left = gk15(g, worst.lo, mid, next_id++);
        Panel right = gk15(g, mid, worst.hi, next_id++);
        evals += 30;
        ++subdivisions;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }
    const auto [v, e] = totals();
    if (e > std::max(spec.abs_tol, spec.rel_tol * std::abs(v)) && !settled.empty())
        throw NoConvergence("adaptive quadrature hit the precision floor", v, e);
    return {v, e, evals};
}

template <class F>
double checked(F& f, double x) {
    const double y = f(x);
    if (!std::isfinite(y)) throw DomainError("integrand is not finite at x = " + std::to_string(x));
    return y;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration over a finite interval.
template <class F>
QuadResult integrate(F&& f, Interval domain, const QuadratureSpec& spec = {}) {
    if (!(domain.lo <= domain.hi)) throw DomainError("integration interval must satisfy lo <= hi");
    if (domain.lo == domain.hi) return {};
    auto g = [&](double x) { return detail::checked(f, x); };
    return detail::adaptive(g, domain.lo, domain.hi, 1, spec);
}

/// Adaptive integration over [lo, inf); f must decay to zero.
template <class F>
QuadResult integrate(F&& f, HalfLine domain, const QuadratureSpec& spec = {}) {
    if (spec.transform != QuadTransform::RationalMap)
        throw DomainError("half-line integration requires the rational map transform");
    const double lo = domain.lo;
    const double c = spec.map_scale;
    auto g = [&](double u) {
        const double om = 1.0 - u;
        const double x = lo + c * u / om;
        if (!std::isfinite(x)) return 0.0;
        return detail::checked(f, x) * c / (om * om);
    };
    return detail::adaptive(g, 0.0, 1.0, 4, spec);
}

struct MaxResult {
    double x;
    double value;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
template <class F>
MaxResult golden_section_max(F&& f, double lo, double hi, double tol) {
    if (!(lo < hi)) throw DomainError("golden_section_max requires lo < hi");
    if (!(tol > 0.0)) throw DomainError("golden_section_max requires tol > 0");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > 2.0 * tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

}  // namespace rsmanet
