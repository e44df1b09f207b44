#pragma once

// Interference functionals of the typical-cell model.
//
// With interfering BSs forming a PPP of density lambda_b outside a ball of
// radius r around the user, and Gamma(N, 1) interferer gains, the Laplace
// transform of the aggregate interference is
//
//   E[exp(-s I)] = exp(pi lambda_b r^2 (1 - H(s r^-alpha)))
//
// with H = L + M_I. Everything in the rate integrals reduces to H and the
// distance-averaged kernels F1 (near user) and F2 (far user).

#include <cmath>
#include <numbers>

#include "rsmanet/core_model.hpp"
#include "rsmanet/quadrature.hpp"
#include "rsmanet/specfun.hpp"

namespace rsmanet {

/// Everything the kernels need: model parameters, fading shapes, and the
/// numerical policies for series and integrals.
struct KernelContext {
    NetworkParams params;
    FadingProfile fading;
    SeriesControl series;
    QuadratureSpec quad;

    /// Validated context with the default fading profile for these parameters.
    static KernelContext make(const NetworkParams& p) {
        const NetworkParams v = validate(p);
        return {v, FadingProfile::standard(v), {}, {}};
    }
    static KernelContext make(const NetworkParams& p, const FadingProfile& f) {
        return {validate(p), validate(f), {}, {}};
    }

    KernelContext with_beta(double beta) const {
        KernelContext c = *this;
        c.params.beta = beta;
        return c;
    }
};

/// Power series Gamma(1-delta) sum_j t^(j+1) E[psi^(j+1) e^(-t psi)] / Gamma(2-delta+j).
inline double l_ic_series(double t, const KernelContext& ctx) {
    if (t < 0.0) throw DomainError("l_ic requires t >= 0");
    if (t == 0.0) return 0.0;
    const double delta = ctx.params.delta();
    const double shape = ctx.fading.interference_shape;
    const double lg_1md = ln_gamma(1.0 - delta);
    const double log_t = std::log(t);
    const double log_1pt = std::log1p(t);
    const double lg_shape = ln_gamma(shape);
    double sum = 0.0;
    for (int j = 0; j < ctx.series.max_terms; ++j) {
        // t^(j+1) E[psi^(j+1) e^(-t psi)] / Gamma(2-delta+j), combined in log space:
        // the two factors separately overflow and underflow for large t.
        const double k = shape + j + 1.0;
        const double term = std::exp(lg_1md + (j + 1) * log_t + ln_gamma(k) - lg_shape - k * log_1pt -
                                     ln_gamma(2.0 - delta + j));
        sum += term;
        // Successive term ratio; once below one the tail is bounded geometrically.
        const double r = t / (1.0 + t) * (shape + j + 2.0) / (2.0 - delta + j + 1.0);
        if (r < 1.0 && term * r / (1.0 - r) <= ctx.series.rel_tol * sum) return sum;
    }
    throw NoConvergence("l_ic series exceeded " + std::to_string(ctx.series.max_terms) + " terms", sum);
}

/// Closed form via 2F1 for Gamma(N, 1) interferer gains:
///   N t / ((1-delta) (1+t)^(N+1)) * 2F1(N+1, 1; 2-delta; t/(1+t)).
/// For N = 1 this is t / ((1-delta)(1+t)^2) * 2F1(2, 1; 2-delta; t/(1+t)).
inline double l_ic_closed(double t, const KernelContext& ctx) {
    if (t < 0.0) throw DomainError("l_ic requires t >= 0");
    if (t == 0.0) return 0.0;
    const double delta = ctx.params.delta();
    const double n = ctx.fading.interference_shape;
    const double c = 2.0 - delta;
    // Pass the complement 1/(1+t) directly so large t keeps full precision.
    const double f = t <= 1.0 ? gauss_2f1(n + 1.0, 1.0, c, t / (1.0 + t), ctx.series)
                              : gauss_2f1_complement(n + 1.0, 1.0, c, 1.0 / (1.0 + t), ctx.series);
    const double prefactor = n * t / ((1.0 - delta) * (1.0 + t)) * std::exp(-n * std::log1p(t));
    return prefactor * f;
}

/// L_Ic(t). Closed form for exponential interferer gains; otherwise the
/// series, switching to the closed form where the series would run past its
/// term budget.
inline double l_ic(double t, const KernelContext& ctx) {
    if (t < 0.0) throw DomainError("l_ic requires t >= 0");
    if (t == 0.0) return 0.0;
    if (ctx.fading.interference_shape == 1.0) return l_ic_closed(t, ctx);
    const double expected_terms = std::log(1.0 / ctx.series.rel_tol) * (1.0 + t) + 4.0 * ctx.fading.interference_shape;
    if (expected_terms > 0.5 * ctx.series.max_terms) return l_ic_closed(t, ctx);
    return l_ic_series(t, ctx);
}

/// H_Ic(t) = L_Ic(t) + M_I(t); equals 1 at t = 0 and grows like t^delta.
inline double h_ic(double t, const KernelContext& ctx) {
    return l_ic(t, ctx) + gamma_mgf(t, ctx.fading.interference_shape);
}

/// D = int_0^inf r^(alpha-1) exp(-r^alpha y - pi lambda_b r^2 H(t)) dr.
///
/// y and t = eta*y are separate arguments. The radius is rescaled so both
/// exponent coefficients are O(1) before integrating.
inline double script_d(double y, double t, const KernelContext& ctx) {
    if (!(y > 0.0)) throw DomainError("script_d requires y > 0");
    const double alpha = ctx.params.alpha;
    const double a = std::numbers::pi * ctx.params.lambda_b * h_ic(t, ctx);
    const double scale = 1.0 / std::max(std::sqrt(a), std::pow(y, 1.0 / alpha));
    const double ys = y * std::pow(scale, alpha);
    const double as = a * scale * scale;
    auto integrand = [&](double s) {
        if (s == 0.0) return 0.0;
        return std::exp((alpha - 1.0) * std::log(s) - ys * std::pow(s, alpha) - as * s * s);
    };
    return std::pow(scale, alpha) * integrate(integrand, HalfLine{0.0}, ctx.quad).value;
}

struct KernelPair {
    double f1;
    double f2;
    double h;
};

/// F1, F2 from the general-alpha definitions (D by quadrature).
inline KernelPair kernel_pair_general(double y, const KernelContext& ctx) {
    if (!(y > 0.0)) throw DomainError("kernel_f requires y > 0");
    if (ctx.params.interference_limited()) throw DomainError("kernel_f needs finite SNR; use kernel_f_limit");
    const double t = ctx.params.snr() * y;
    const double h = h_ic(t, ctx);
    const double one_minus = 1.0 - ctx.params.alpha * y * script_d(y, t, ctx);
    return {2.0 / (1.0 + h) * one_minus, (2.0 / h - 2.0 / (1.0 + h)) * one_minus, h};
}

/// alpha = 4 closed forms in terms of O(y) = sqrt(pi/y) exp(x^2) erfc(x),
/// x = pi lambda_b H / (2 sqrt(y)); evaluated with the scaled erfc.
inline KernelPair kernel_pair_alpha4(double y, const KernelContext& ctx) {
    if (!(y > 0.0)) throw DomainError("kernel_f requires y > 0");
    if (ctx.params.interference_limited()) throw DomainError("kernel_f needs finite SNR; use kernel_f_limit");
    if (ctx.params.alpha != 4.0) throw DomainError("alpha = 4 closed form requested for alpha != 4");
    const double t = ctx.params.snr() * y;
    const double h = h_ic(t, ctx);
    const double a = std::numbers::pi * ctx.params.lambda_b;
    const double o = std::sqrt(std::numbers::pi / y) * erfcx(a * h / (2.0 * std::sqrt(y)));
    return {a * h * o / (1.0 + h), a * o / (1.0 + h), h};
}

/// F1 and F2 at y; alpha = 4 dispatches to the erfc closed form.
inline KernelPair kernel_pair(double y, const KernelContext& ctx) {
    return ctx.params.alpha == 4.0 ? kernel_pair_alpha4(y, ctx) : kernel_pair_general(y, ctx);
}

inline double kernel_f(int which, double y, const KernelContext& ctx) {
    if (which != 1 && which != 2) throw DomainError("kernel index must be 1 or 2");
    const KernelPair k = kernel_pair(y, ctx);
    return which == 1 ? k.f1 : k.f2;
}

/// Interference-limited limits in t = eta*y: F1 = 2/(1+H), F2 = 2/(H(1+H)).
inline KernelPair kernel_pair_limit(double t, const KernelContext& ctx) {
    if (!(t >= 0.0)) throw DomainError("kernel_f_limit requires t >= 0");
    const double h = h_ic(t, ctx);
    return {2.0 / (1.0 + h), 2.0 / (h * (1.0 + h)), h};
}

inline double kernel_f_limit(int which, double t, const KernelContext& ctx) {
    if (which != 1 && which != 2) throw DomainError("kernel index must be 1 or 2");
    const KernelPair k = kernel_pair_limit(t, ctx);
    return which == 1 ? k.f1 : k.f2;
}

/// Kernels as a function of the normalized variable t = eta*y, whichever
/// regime the context is in.
inline KernelPair kernels_at(double t, const KernelContext& ctx) {
    if (ctx.params.interference_limited()) return kernel_pair_limit(t, ctx);
    return kernel_pair(t / ctx.params.snr(), ctx);
}

/// Conditional Laplace transform of the aggregate interference (normalized by
/// the noise power) at a user whose serving BS is at distance r:
///   exp(pi lambda_b r^2 (1 - H(eta z r^-alpha))).
inline double m_ic_conditional(double z, double r, const KernelContext& ctx) {
    if (!(z >= 0.0)) throw DomainError("m_ic_conditional requires z >= 0");
    if (!(r > 0.0)) throw DomainError("m_ic_conditional requires r > 0");
    if (z == 0.0) return 1.0;
    if (ctx.params.interference_limited()) throw DomainError("m_ic_conditional needs finite SNR");
    const double t = ctx.params.snr() * z * std::pow(r, -ctx.params.alpha);
    return std::exp(std::numbers::pi * ctx.params.lambda_b * r * r * (1.0 - h_ic(t, ctx)));
}

}  // namespace rsmanet
