#pragma once

// Average rates of the typical cluster.
//
// Every rate is a one-dimensional integral over the normalized variable
// t = eta*y (t = y when interference-limited) of the form
//
//   int_0^inf g(t) F_k(t) dt / t,
//
// where g collects the signal-side MGF factors and F_k the distance-averaged
// interference kernel of user k (1 = near, 2 = far).

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rsmanet/core_model.hpp"
#include "rsmanet/kernels.hpp"
#include "rsmanet/quadrature.hpp"
#include "rsmanet/specfun.hpp"

namespace rsmanet {

// ---------------------------------------------------------------------------
// Serving distances of the two users in the typical cluster.

inline void check_distance_args(int k, double lambda_b) {
    if (k != 1 && k != 2) throw DomainError("user index must be 1 or 2");
    if (!(lambda_b > 0.0)) throw DomainError("BS density must be positive");
}

/// Density of the serving distance of user k (k = 1 near, k = 2 far).
inline double serving_distance_pdf(int k, double r, double lambda_b) {
    check_distance_args(k, lambda_b);
    if (!(r > 0.0)) return 0.0;
    const double a = std::numbers::pi * lambda_b * r * r;
    const double base = 4.0 * std::numbers::pi * lambda_b * r;
    if (k == 1) return base * std::exp(-2.0 * a);
    // e^-a - e^-2a = e^-a (1 - e^-a), written to keep precision near r = 0.
    return base * std::exp(-a) * -std::expm1(-a);
}

inline double serving_distance_cdf(int k, double r, double lambda_b) {
    check_distance_args(k, lambda_b);
    if (!(r > 0.0)) return 0.0;
    const double a = std::numbers::pi * lambda_b * r * r;
    if (k == 1) return -std::expm1(-2.0 * a);
    const double p = -std::expm1(-a);
    return p * p;
}

/// Inverse CDF; maps u in [0, 1) to a serving distance.
inline double serving_distance_quantile(int k, double u, double lambda_b) {
    check_distance_args(k, lambda_b);
    if (!(u >= 0.0 && u < 1.0)) throw DomainError("quantile requires u in [0, 1)");
    if (k == 1) return std::sqrt(-std::log1p(-u) / (2.0 * std::numbers::pi * lambda_b));
    return std::sqrt(-std::log1p(-std::sqrt(u)) / (std::numbers::pi * lambda_b));
}

/// Callable density handle for one user.
struct DistancePdf {
    int k;
    double lambda_b;

    DistancePdf(int user, double density) : k(user), lambda_b(density) { check_distance_args(k, lambda_b); }
    double operator()(double r) const { return serving_distance_pdf(k, r, lambda_b); }
};

// ---------------------------------------------------------------------------
// Signal-side factors.

namespace detail {

// 1 - (1 + s)^-shape without cancellation for small s.
inline double one_minus_mgf(double s, double shape) { return -std::expm1(-shape * std::log1p(s)); }

// (1 - M0(t(1-beta))) M0(t beta): common stream against the private residual.
inline double common_factor(double t, double beta, double zeta) {
    return one_minus_mgf(t * (1.0 - beta), zeta) * gamma_mgf(t * beta, zeta);
}

// (1 - M0(s)) M0(s), s = t beta / K: private stream against the other private stream.
inline double private_factor(double t, double beta, int k_users, double zeta) {
    const double s = t * beta / k_users;
    return one_minus_mgf(s, zeta) * gamma_mgf(s, zeta);
}

// (1 - M0(t beta)) M0(t(1-beta)): NOMA near-user stream against the far user's message.
inline double noma_near_factor(double t, double beta, double zeta) {
    return one_minus_mgf(t * beta, zeta) * gamma_mgf(t * (1.0 - beta), zeta);
}

template <class Weight>
double rate_integral(const KernelContext& ctx, Weight&& weight) {
    auto integrand = [&](double t) {
        if (t <= 0.0) return 0.0;
        return weight(t) / t;
    };
    return integrate(integrand, HalfLine{0.0}, ctx.quad).value;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Rates.

struct CommonRate {
    double rate;  ///< min of the two decodability rates
    double near;  ///< R_{1,c}
    double far;   ///< R_{2,c}
};

/// Common-stream rates of both users and the decodable common rate min(R_1c, R_2c).
inline CommonRate common_rate(const KernelContext& ctx) {
    const double beta = ctx.params.beta;
    if (beta >= 1.0) return {0.0, 0.0, 0.0};
    const double zeta = ctx.fading.signal_shape;
    const double near = detail::rate_integral(ctx, [&](double t) {
        const double g = detail::common_factor(t, beta, zeta);
        return g == 0.0 ? 0.0 : g * kernels_at(t, ctx).f1;
    });
    const double far = detail::rate_integral(ctx, [&](double t) {
        const double g = detail::common_factor(t, beta, zeta);
        return g == 0.0 ? 0.0 : g * kernels_at(t, ctx).f2;
    });
    return {std::min(near, far), near, far};
}

struct PrivateRates {
    double near;
    double far;
    double sum() const noexcept { return near + far; }
};

inline PrivateRates private_rates(const KernelContext& ctx) {
    const double beta = ctx.params.beta;
    const double zeta = ctx.fading.signal_shape;
    const int k_users = ctx.params.users_per_group;
    const double near = detail::rate_integral(ctx, [&](double t) {
        const double g = detail::private_factor(t, beta, k_users, zeta);
        return g == 0.0 ? 0.0 : g * kernels_at(t, ctx).f1;
    });
    const double far = detail::rate_integral(ctx, [&](double t) {
        const double g = detail::private_factor(t, beta, k_users, zeta);
        return g == 0.0 ? 0.0 : g * kernels_at(t, ctx).f2;
    });
    return {near, far};
}

/// Rates of one access scheme at the context's beta.
///
/// SDMA ignores beta (all power on private streams). NOMA puts the far
/// user's whole message on the common stream; beta is the near user's share.
inline RateBreakdown sum_rate(const KernelContext& ctx, Scheme scheme) {
    switch (scheme) {
        case Scheme::Rsma: {
            const CommonRate c = common_rate(ctx);
            const PrivateRates p = private_rates(ctx);
            return RateBreakdown::make(scheme, c.rate, p.near, p.far);
        }
        case Scheme::Sdma: {
            const PrivateRates p = private_rates(ctx.with_beta(1.0));
            return RateBreakdown::make(scheme, 0.0, p.near, p.far);
        }
        case Scheme::Noma: {
            const double beta = ctx.params.beta;
            if (!(beta > 0.0 && beta < 1.0)) throw DomainError("NOMA requires beta strictly inside (0, 1)");
            const double zeta = ctx.fading.signal_shape;
            const CommonRate c = common_rate(ctx);
            const double near = detail::rate_integral(ctx, [&](double t) {
                const double g = detail::noma_near_factor(t, beta, zeta);
                return g == 0.0 ? 0.0 : g * kernels_at(t, ctx).f1;
            });
            return RateBreakdown::make(scheme, c.rate, near, 0.0);
        }
    }
    throw DomainError("unknown scheme");
}

/// R_RSMA - R_baseline from a single gap integral (interference-limited only).
inline double rate_gap(const KernelContext& ctx, Scheme baseline) {
    if (!ctx.params.interference_limited()) throw DomainError("rate gaps are defined for the interference-limited regime");
    const double beta = ctx.params.beta;
    const double zeta = ctx.fading.signal_shape;
    const int k_users = ctx.params.users_per_group;
    switch (baseline) {
        case Scheme::Sdma:
            return detail::rate_integral(ctx, [&](double t) {
                const double h = h_ic(t, ctx);
                const double common = beta < 1.0 ? detail::common_factor(t, beta, zeta) : 0.0;
                const double dp = detail::private_factor(t, beta, k_users, zeta) -
                                  detail::private_factor(t, 1.0, k_users, zeta);
                return 2.0 * common / (h * (1.0 + h)) + 2.0 * dp / h;
            });
        case Scheme::Noma:
            if (!(beta > 0.0 && beta < 1.0)) throw DomainError("NOMA requires beta strictly inside (0, 1)");
            return detail::rate_integral(ctx, [&](double t) {
                const double h = h_ic(t, ctx);
                return 2.0 * detail::private_factor(t, beta, k_users, zeta) / h -
                       2.0 * detail::noma_near_factor(t, beta, zeta) / (1.0 + h);
            });
        case Scheme::Rsma: break;
    }
    throw DomainError("rate gap baseline must be SDMA or NOMA");
}

// ---------------------------------------------------------------------------
// Derivatives in beta.

struct BetaDerivative {
    double common;   ///< d/dbeta of the common-stream signal factor
    double private_; ///< d/dbeta of the private-stream signal factor
};

/// Exact beta-derivatives of the signal factors at normalized t = eta*y.
///
/// The common term is negative everywhere. The private term is positive
/// wherever (1 + t beta / K)^zeta < 2, i.e. where M0 > 1/2.
inline BetaDerivative beta_derivative_terms(const KernelContext& ctx, double t) {
    if (!(t > 0.0)) throw DomainError("beta_derivative_terms requires t > 0");
    const double beta = ctx.params.beta;
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta_derivative_terms requires beta in (0, 1)");
    const double z = ctx.fading.signal_shape;
    const double k = ctx.params.users_per_group;
    const double lc = std::log1p(t * (1.0 - beta));
    const double lp = std::log1p(t * beta);
    const double fc = -z * t * std::exp(-(z + 1.0) * lc - z * lp) -
                      z * t * detail::one_minus_mgf(t * (1.0 - beta), z) * std::exp(-(z + 1.0) * lp);
    const double s = t * beta / k;
    const double ls = std::log1p(s);
    // 2 - (1+s)^z computed as 2 - exp(z ls); sign flips at (1+s)^z = 2.
    const double fp = z * t / k * std::exp(-(2.0 * z + 1.0) * ls) * (2.0 - std::exp(z * ls));
    return {fc, fp};
}

/// dR_c/dbeta (R_c = R_2c) and d(sum of private rates)/dbeta by direct integration.
inline BetaDerivative rate_beta_derivatives(const KernelContext& ctx) {
    const double dc = detail::rate_integral(ctx, [&](double t) {
        return beta_derivative_terms(ctx, t).common * kernels_at(t, ctx).f2;
    });
    const double dp = detail::rate_integral(ctx, [&](double t) {
        const KernelPair k = kernels_at(t, ctx);
        return beta_derivative_terms(ctx, t).private_ * (k.f1 + k.f2);
    });
    return {dc, dp};
}

// ---------------------------------------------------------------------------
// Power-splitting optimization.

struct BetaOptimum {
    double beta;
    double rate;
    double grid_beta;  ///< best point of the 0.01-step cross-check grid
    double grid_rate;
};

/// Maximizes the scheme's sum-rate over beta in [0.01, 0.99].
///
/// Golden-section search to 1e-4, cross-checked on a 0.01 grid. If the grid
/// finds a better point (non-unimodal curve) the search is repeated around it.
inline BetaOptimum optimal_beta(const KernelContext& ctx, Scheme scheme) {
    if (scheme == Scheme::Sdma) {
        const double r = sum_rate(ctx, scheme).sum_rate;
        return {1.0, r, 1.0, r};
    }
    auto rate = [&](double b) { return sum_rate(ctx.with_beta(b), scheme).sum_rate; };
    double grid_beta = 0.01, grid_rate = rate(0.01);
    for (int i = 2; i <= 99; ++i) {
        const double b = 0.01 * i;
        const double r = rate(b);
        if (r > grid_rate) {
            grid_rate = r;
            grid_beta = b;
        }
    }
    constexpr double tol = 1e-4;
    MaxResult best = golden_section_max(rate, 0.01, 0.99, tol);
    if (best.value < grid_rate) {
        best = golden_section_max(rate, std::max(0.01, grid_beta - 0.01), std::min(0.99, grid_beta + 0.01), tol);
        if (best.value < grid_rate) best = {grid_beta, grid_rate};
    }
    return {best.x, best.value, grid_beta, grid_rate};
}

}  // namespace rsmanet
