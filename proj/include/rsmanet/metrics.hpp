#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rsmanet/core_model.hpp"
#include "rsmanet/kernels.hpp"
#include "rsmanet/rates.hpp"

namespace rsmanet {

/// Area spectral efficiency lambda_b * R, in nats/s/Hz/m^2.
inline double ase(const KernelContext& ctx, Scheme scheme) {
    return ctx.params.lambda_b * sum_rate(ctx, scheme).sum_rate;
}

/// Power drawn by one BS with a (possibly fractional) antenna count:
/// P/theta + M P_cir + K^3 P_pre + P_0.
inline double bs_power(const NetworkParams& p, const EnergyModel& e, double antennas) {
    const double k = p.users_per_group;
    return p.power / e.pa_efficiency + antennas * e.circuit_per_antenna + k * k * k * e.precoding_coeff +
           e.static_power;
}

/// Energy consumption per unit area, W/m^2.
inline double energy_density(const KernelContext& ctx, const EnergyModel& model) {
    return ctx.params.lambda_b * bs_power(ctx.params, validate(model), ctx.params.antennas);
}

/// Energy efficiency ASE / energy density, in nats/s/Hz/J.
inline double energy_efficiency(const KernelContext& ctx, const EnergyModel& model, Scheme scheme) {
    return sum_rate(ctx, scheme).sum_rate / bs_power(ctx.params, validate(model), ctx.params.antennas);
}

/// Same context with M antennas and the fading shape its rule implies.
inline KernelContext with_antennas(const KernelContext& ctx, int antennas) {
    KernelContext c = ctx;
    c.params.antennas = antennas;
    c.fading.signal_shape = ctx.fading.signal_shape_for(antennas, ctx.params);
    validate(c.params);
    validate(c.fading);
    return c;
}

/// Sum-rate with the signal shape extended to real M. Only the EE derivative uses this.
inline double rate_continuous_m(const KernelContext& ctx, Scheme scheme, double antennas) {
    KernelContext c = ctx;
    c.fading.signal_shape = ctx.fading.signal_shape_for(antennas, ctx.params);
    if (!(c.fading.signal_shape > 0.0)) throw DomainError("signal shape must stay positive");
    return sum_rate(c, scheme).sum_rate;
}

struct EePoint {
    int antennas;
    double rate;
    double ee;
};

inline std::vector<EePoint> ee_curve(const KernelContext& ctx, const EnergyModel& model, Scheme scheme, int m_lo,
                                     int m_hi) {
    if (m_lo > m_hi) throw DomainError("EE curve needs m_lo <= m_hi");
    std::vector<EePoint> out;
    for (int m = m_lo; m <= m_hi; ++m) {
        const KernelContext c = with_antennas(ctx, m);
        const double r = sum_rate(c, scheme).sum_rate;
        out.push_back({m, r, r / bs_power(c.params, model, m)});
    }
    return out;
}

struct EeSolution {
    int m_star = 0;        ///< better of the two integers around m_tilde
    int m_star_ceil = 0;   ///< max(K, ceil(m_tilde))
    double m_tilde = 0.0;  ///< root of Omega_EE
    double ee_at_star = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int iterations = 0;
    bool boundary = false;  ///< Omega_EE <= 0 already at the lower bracket
};

/// Omega_EE(M) = R'(M) (P/theta + M P_cir + K^3 P_pre + P_0) - R(M) P_cir,
/// with R' by central difference of step 1e-3.
inline double omega_ee(const KernelContext& ctx, const EnergyModel& model, Scheme scheme, double antennas) {
    constexpr double h = 1e-3;
    const double r = rate_continuous_m(ctx, scheme, antennas);
    const double dr =
        (rate_continuous_m(ctx, scheme, antennas + h) - rate_continuous_m(ctx, scheme, antennas - h)) / (2.0 * h);
    return dr * bs_power(ctx.params, model, antennas) - r * model.circuit_per_antenna;
}

/// Energy-efficient antenna count: bisection for the root of Omega_EE on
/// [K-1, m_max] to width 1e-3, then the better of the neighbouring integers.
inline EeSolution optimize_antennas(const KernelContext& ctx, const EnergyModel& model, Scheme scheme, int m_max) {
    validate(model);
    const int k = ctx.params.users_per_group;
    if (m_max < k + 1) throw DomainError("m_max must be at least K + 1");
    double lo = k - 1.0;
    // Keep the signal shape positive across the difference stencil.
    while (ctx.fading.signal_shape_for(lo - 1e-3, ctx.params) <= 0.0 && lo < k) lo += 1.0;
    double hi = m_max;

    EeSolution sol;
    sol.bracket_lo = lo;
    sol.bracket_hi = hi;
    auto ee_int = [&](int m) {
        const KernelContext c = with_antennas(ctx, m);
        return sum_rate(c, scheme).sum_rate / bs_power(c.params, model, m);
    };

    const double f_lo = omega_ee(ctx, model, scheme, lo);
    if (f_lo <= 0.0) {
        sol.boundary = true;
        sol.m_tilde = lo;
        sol.m_star = sol.m_star_ceil = k;
        sol.ee_at_star = ee_int(k);
        return sol;
    }
    if (omega_ee(ctx, model, scheme, hi) > 0.0)
        throw BracketError("Omega_EE has no sign change on [" + std::to_string(lo) + ", " + std::to_string(m_max) +
                           "]; increase m_max");
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        if (omega_ee(ctx, model, scheme, mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        ++sol.iterations;
    }
    sol.m_tilde = 0.5 * (lo + hi);
    const int down = std::max(k, static_cast<int>(std::floor(sol.m_tilde)));
    const int up = std::max(k, static_cast<int>(std::ceil(sol.m_tilde)));
    sol.m_star_ceil = up;
    const double ee_down = ee_int(down);
    const double ee_up = up == down ? ee_down : ee_int(up);
    if (ee_up > ee_down) {
        sol.m_star = up;
        sol.ee_at_star = ee_up;
    } else {
        sol.m_star = down;
        sol.ee_at_star = ee_down;
    }
    return sol;
}

}  // namespace rsmanet
