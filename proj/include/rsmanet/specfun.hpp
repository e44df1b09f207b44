#pragma once

// Special functions used by the rate kernels. Everything here is written
// out explicitly (no libm tgamma/erfc/hypergeometric) so the precision of
// each branch can be audited and tested on its own.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rsmanet/errors.hpp"

namespace rsmanet {

/// Truncation policy for infinite series.
struct SeriesControl {
    double rel_tol = 1e-12;
    int max_terms = 10000;
};

inline SeriesControl validate(const SeriesControl& s) {
    if (!(s.rel_tol > 0.0 && s.rel_tol <= 1e-6)) throw DomainError("series rel_tol must lie in (0, 1e-6]");
    if (s.max_terms < 100) throw DomainError("series max_terms must be at least 100");
    return s;
}

namespace detail {

// Taylor series of ln Gamma(1 + z) for |z| <= 0.25:
//   -gamma*z + sum_{k>=2} (-1)^k zeta(k) z^k / k
inline double ln_gamma_1p_series(double z) {
    constexpr double euler_gamma = 0.57721566490153286061;
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    static const std::array<double, 40> zeta = [] {
        std::array<double, 40> zt{};
        zt[2] = pi2 / 6.0;
        zt[3] = 1.2020569031595942854;
        zt[4] = pi2 * pi2 / 90.0;
        zt[5] = 1.0369277551433699263;
        zt[6] = pi2 * pi2 * pi2 / 945.0;
        zt[7] = 1.0083492773819228268;
        zt[8] = pi2 * pi2 * pi2 * pi2 / 9450.0;
        zt[9] = 1.0020083928260822144;
        zt[10] = pi2 * pi2 * pi2 * pi2 * pi2 / 93555.0;
        for (int k = 11; k < 40; ++k) {
            double s = 0.0;
            for (int n = 60; n >= 2; --n) s += std::pow(static_cast<double>(n), -k);
            zt[k] = 1.0 + s;
        }
        return zt;
    }();
    double sum = 0.0;
    double zk = z * z;
    for (int k = 2; k < 40; ++k) {
        const double term = ((k % 2 == 0) ? 1.0 : -1.0) * zeta[k] * zk / k;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        zk *= z;
    }
    return -euler_gamma * z + sum;
}

// Lanczos approximation (g = 7, n = 9), valid for x >= 0.5.
inline double ln_gamma_lanczos(double x) {
    static constexpr std::array<double, 9> c = {
        0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
        771.32342877765313,      -176.61502916214059,   12.507343278686905,
        -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
    const double z = x - 1.0;
    double a = c[0];
    for (int i = 1; i < 9; ++i) a += c[i] / (z + i);
    const double t = z + 7.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

}  // namespace detail

/// ln Gamma(x) for x > 0.
inline double ln_gamma(double x) {
    if (!(x > 0.0) || std::isnan(x)) throw DomainError("ln_gamma requires x > 0");
    if (std::isinf(x)) return x;
    if (x == 1.0 || x == 2.0) return 0.0;
    // Near the zeros at 1 and 2 the Lanczos form loses relative accuracy.
    if (std::abs(x - 1.0) <= 0.25) return detail::ln_gamma_1p_series(x - 1.0);
    if (std::abs(x - 2.0) <= 0.25) return std::log1p(x - 2.0) + detail::ln_gamma_1p_series(x - 2.0);
    if (x < 0.5) return ln_gamma(x + 1.0) - std::log(x);
    return detail::ln_gamma_lanczos(x);
}

/// log|Gamma(x)| and sign of Gamma(x) for any x that is not a pole.
struct SignedLogGamma {
    double log_abs;
    int sign;
};

inline SignedLogGamma signed_ln_gamma(double x) {
    if (x > 0.0) return {ln_gamma(x), 1};
    if (x == std::floor(x)) throw DomainError("Gamma has a pole at non-positive integer " + std::to_string(x));
    // Reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    const double s = std::sin(std::numbers::pi * x);
    return {std::log(std::numbers::pi) - std::log(std::abs(s)) - ln_gamma(1.0 - x), s > 0.0 ? 1 : -1};
}

/// exp(x^2) * erfc(x), stable for large positive x.
inline double erfcx(double x);

/// Complementary error function.
inline double erfc(double x) {
    if (std::isnan(x)) return x;
    if (x < 0.0) return 2.0 - erfc(-x);
    if (x < 2.5) {
        // erf(x) = 2/sqrt(pi) e^{-x^2} sum 2^n x^{2n+1} / (2n+1)!!, all terms positive
        double term = x;
        double sum = x;
        const double x2 = x * x;
        for (int n = 1; n < 500; ++n) {
            term *= 2.0 * x2 / (2.0 * n + 1.0);
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return 1.0 - 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x2) * sum;
    }
    if (x > 27.3) return 0.0;
    // x^2 split into its rounded value and the exact residual
    const double x2 = x * x;
    const double x2_err = std::fma(x, x, -x2);
    return std::exp(-x2) * (1.0 - x2_err) * erfcx(x);
}

inline double erfcx(double x) {
    if (std::isnan(x)) return x;
    if (x < 2.5) {
        if (x < -26.0) return std::numeric_limits<double>::infinity();
        return std::exp(x * x) * erfc(x);
    }
    // Continued fraction erfc(x) = e^{-x^2}/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    // evaluated by the modified Lentz method.
    constexpr double tiny = 1e-300;
    double f = x;
    double cc = f;
    double dd = 0.0;
    for (int n = 1; n < 5000; ++n) {
        const double an = 0.5 * n;
        dd = x + an * dd;
        if (dd == 0.0) dd = tiny;
        cc = x + an / cc;
        if (cc == 0.0) cc = tiny;
        dd = 1.0 / dd;
        const double step = cc * dd;
        f *= step;
        if (std::abs(step - 1.0) < 1e-16) break;
    }
    return 1.0 / (std::sqrt(std::numbers::pi) * f);
}

namespace detail {

// Direct hypergeometric series; stops once the geometric tail bound drops
// below rel_tol of the partial sum.
inline double hyp2f1_series(double a, double b, double c, double x, const SeriesControl& ctrl) {
    double term = 1.0;
    double sum = 1.0;
    for (int n = 0; n < ctrl.max_terms; ++n) {
        const double ratio = (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x;
        term *= ratio;
        sum += term;
        if (term == 0.0) return sum;
        const double r = std::abs(ratio);
        const double tail = r < 1.0 ? std::abs(term) * r / (1.0 - r) : std::abs(term) * 1e3;
        if (n > 2 && tail <= ctrl.rel_tol * std::abs(sum)) return sum;
    }
    throw NoConvergence("2F1 series exceeded " + std::to_string(ctrl.max_terms) + " terms", sum);
}

inline bool is_nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

}  // namespace detail

/// 2F1(a, b; c; 1 - w) for 0 < w <= 1, taking the complement w directly.
///
/// Uses the 1 - x linear transformation, so convergence is fast for small w
/// even when 1 - w is not representable. Falls back to the direct series when
/// c - a - b is an integer (degenerate case) or the series is a polynomial.
inline double gauss_2f1_complement(double a, double b, double c, double w, const SeriesControl& ctrl = {}) {
    if (std::isnan(w) || w <= 0.0 || w > 1.0) throw DomainError("gauss_2f1_complement requires 0 < w <= 1");
    if (detail::is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c must not be a non-positive integer");
    const double s = c - a - b;
    const bool polynomial = detail::is_nonpositive_integer(a) || detail::is_nonpositive_integer(b);
    if (polynomial || s == std::round(s)) return detail::hyp2f1_series(a, b, c, 1.0 - w, ctrl);

    const auto gc = signed_ln_gamma(c);
    double first = 0.0;
    if (!detail::is_nonpositive_integer(c - a) && !detail::is_nonpositive_integer(c - b)) {
        const auto gs = signed_ln_gamma(s);
        const auto gca = signed_ln_gamma(c - a);
        const auto gcb = signed_ln_gamma(c - b);
        const double coef = gc.sign * gs.sign * gca.sign * gcb.sign *
                            std::exp(gc.log_abs + gs.log_abs - gca.log_abs - gcb.log_abs);
        first = coef * detail::hyp2f1_series(a, b, 1.0 - s, w, ctrl);
    }
    const auto gms = signed_ln_gamma(-s);
    const auto ga = signed_ln_gamma(a);
    const auto gb = signed_ln_gamma(b);
    const double log_coef2 = gc.log_abs + gms.log_abs - ga.log_abs - gb.log_abs + s * std::log(w);
    const double coef2 = gc.sign * gms.sign * ga.sign * gb.sign * std::exp(log_coef2);
    const double second = coef2 * detail::hyp2f1_series(c - a, c - b, s + 1.0, w, ctrl);
    return first + second;
}

/// Gauss hypergeometric 2F1(a, b; c; x) for 0 <= x < 1.
///
/// Direct series for x <= 0.5, the 1 - x transformation above that.
inline double gauss_2f1(double a, double b, double c, double x, const SeriesControl& ctrl = {}) {
    if (std::isnan(x) || x < 0.0 || x >= 1.0) throw DomainError("gauss_2f1 requires 0 <= x < 1");
    if (detail::is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c must not be a non-positive integer");
    if (x == 0.0) return 1.0;
    if (x <= 0.5) return detail::hyp2f1_series(a, b, c, x, ctrl);
    return gauss_2f1_complement(a, b, c, 1.0 - x, ctrl);
}

/// Laplace transform E[exp(-s psi)] of psi ~ Gamma(shape, 1): (1 + s)^(-shape).
inline double gamma_mgf(double s, double shape) { return std::exp(-shape * std::log1p(s)); }

/// E[psi^(j+1) exp(-s psi)] for psi ~ Gamma(shape, 1).
inline double gamma_weighted_moment(double s, double shape, int j) {
    const double k = shape + j + 1.0;
    return std::exp(ln_gamma(k) - ln_gamma(shape) - k * std::log1p(s));
}

/// Regularized lower incomplete gamma P(a, x), i.e. the Gamma(a, 1) CDF.
inline double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw DomainError("gamma_p requires a > 0");
    if (x <= 0.0) return 0.0;
    const double log_prefactor = -x + a * std::log(x) - ln_gamma(a);
    if (x < a + 1.0) {
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int n = 0; n < 10000; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        return sum * std::exp(log_prefactor);
    }
    // Continued fraction for Q(a, x).
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double cc = 1.0 / tiny;
    double dd = 1.0 / b;
    double h = dd;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        dd = an * dd + b;
        if (std::abs(dd) < tiny) dd = tiny;
        cc = b + an / cc;
        if (std::abs(cc) < tiny) cc = tiny;
        dd = 1.0 / dd;
        const double step = dd * cc;
        h *= step;
        if (std::abs(step - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(log_prefactor) * h;
}

}  // namespace rsmanet
