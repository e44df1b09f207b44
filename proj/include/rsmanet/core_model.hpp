#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>

#include "rsmanet/errors.hpp"

namespace rsmanet {

enum class Scheme { Rsma, Noma, Sdma };

inline std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::Rsma: return "rsma";
        case Scheme::Noma: return "noma";
        case Scheme::Sdma: return "sdma";
    }
    return "?";
}

inline Scheme scheme_from_string(std::string_view s) {
    if (s == "rsma") return Scheme::Rsma;
    if (s == "noma") return Scheme::Noma;
    if (s == "sdma") return Scheme::Sdma;
    throw DomainError("unknown scheme '" + std::string(s) + "'");
}

/// Scalar parameters of the downlink model.
///
/// Densities are per m^2, powers in Watts. A zero noise power selects the
/// interference-limited regime, in which rates no longer depend on density
/// or transmit power.
struct NetworkParams {
    double lambda_b = 1.0 / (std::numbers::pi * 150.0 * 150.0);
    double alpha = 4.0;
    double power = 5.0;
    double noise = 0.0;
    int antennas = 4;
    int groups = 1;
    int users_per_group = 2;
    double beta = 0.5;

    bool interference_limited() const noexcept { return noise == 0.0; }
    /// P / sigma^2; +inf when interference-limited.
    double snr() const noexcept {
        return interference_limited() ? std::numeric_limits<double>::infinity() : power / noise;
    }
    double delta() const noexcept { return 2.0 / alpha; }
    /// M - N + 1.
    int zeta() const noexcept { return antennas - groups + 1; }
};

/// Checks the model domain and returns the accepted parameter set.
inline NetworkParams validate(const NetworkParams& p) {
    auto fail = [](const std::string& msg) { throw DomainError("invalid network parameters: " + msg); };
    if (!std::isfinite(p.alpha) || p.alpha <= 2.0) fail("pathloss exponent must exceed 2");
    if (!std::isfinite(p.lambda_b) || p.lambda_b <= 0.0) fail("BS density must be positive");
    if (!std::isfinite(p.power) || p.power <= 0.0) fail("transmit power must be positive");
    if (!std::isfinite(p.noise) || p.noise < 0.0) fail("noise power must be non-negative");
    if (p.groups < 1) fail("group count must be positive");
    if (p.antennas < 1) fail("antenna count must be positive");
    if (p.antennas < p.groups) fail("antennas must be at least the number of groups");
    if (p.users_per_group != 2) fail("exactly two users per group are supported");
    if (!(p.beta > 0.0 && p.beta <= 1.0)) fail("power splitting ratio must lie in (0, 1]");
    return p;
}

enum class FadingRule { Standard, PhysicalZf, Custom };

/// Gamma shapes of the equivalent signal and interference gains (scale 1).
struct FadingProfile {
    double signal_shape = 4.0;
    double interference_shape = 1.0;
    FadingRule rule = FadingRule::Standard;

    /// Signal shape M - N + 1, interference shape N.
    static FadingProfile standard(const NetworkParams& p) {
        return {static_cast<double>(p.antennas - p.groups + 1), static_cast<double>(p.groups),
                FadingRule::Standard};
    }
    /// Classical zero-forcing gain M - K + 1; interference shape N.
    static FadingProfile physical_zf(const NetworkParams& p) {
        return {static_cast<double>(p.antennas - p.users_per_group + 1),
                static_cast<double>(p.groups), FadingRule::PhysicalZf};
    }

    /// Signal shape the rule assigns to a (possibly fractional) antenna count.
    double signal_shape_for(double antennas, const NetworkParams& p) const {
        switch (rule) {
            case FadingRule::Standard: return antennas - p.groups + 1.0;
            case FadingRule::PhysicalZf: return antennas - p.users_per_group + 1.0;
            case FadingRule::Custom: return signal_shape;
        }
        return signal_shape;
    }
};

inline FadingProfile validate(const FadingProfile& f) {
    if (!(f.signal_shape >= 1.0) || !(f.interference_shape >= 1.0) || !std::isfinite(f.signal_shape) ||
        !std::isfinite(f.interference_shape))
        throw DomainError("fading shapes must be finite and at least 1");
    return f;
}

/// Per-BS power consumption constants.
struct EnergyModel {
    double pa_efficiency = 0.08;
    double circuit_per_antenna = 6.8;
    double precoding_coeff = 1.74;
    double static_power = 1.5;
};

inline EnergyModel validate(const EnergyModel& e) {
    if (!(e.pa_efficiency > 0.0 && e.pa_efficiency <= 1.0))
        throw DomainError("power amplifier efficiency must lie in (0, 1]");
    if (!(e.circuit_per_antenna > 0.0) || !(e.precoding_coeff > 0.0) || !(e.static_power > 0.0))
        throw DomainError("energy constants must be strictly positive");
    return e;
}

/// Rates in nats/s/Hz for one access scheme.
struct RateBreakdown {
    Scheme scheme = Scheme::Rsma;
    double common_rate = 0.0;
    std::array<double, 2> private_rates{0.0, 0.0};
    double sum_rate = 0.0;

    static RateBreakdown make(Scheme s, double common, double p1, double p2) {
        return {s, common, {p1, p2}, common + p1 + p2};
    }
    double private_sum() const noexcept { return private_rates[0] + private_rates[1]; }
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
};

inline constexpr double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

}  // namespace rsmanet
