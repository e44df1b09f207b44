#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rsmanet/core_model.hpp"
#include "rsmanet/errors.hpp"

namespace rsmanet {

/// Sample mean with standard error sd / sqrt(n), summed in input order.
inline McEstimate estimate(std::span<const double> xs, std::uint64_t seed = 0) {
    if (xs.empty()) throw DomainError("estimate needs at least one sample");
    const auto n = static_cast<std::int64_t>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return {mean, se, n, seed};
}

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
    if (samples.empty()) throw DomainError("KS statistic needs samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

/// Asymptotic Kolmogorov p-value with the Stephens small-sample correction.
inline double ks_p_value(double d, std::int64_t n) {
    if (n < 1) throw DomainError("KS p-value needs n >= 1");
    const double rn = std::sqrt(static_cast<double>(n));
    const double lam = (rn + 0.12 + 0.11 / rn) * d;
    if (lam < 1e-3) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = sign * std::exp(-2.0 * j * j * lam * lam);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
    double statistic;
    double p_value;
};

template <class Cdf>
KsResult ks_test(std::vector<double> samples, Cdf&& cdf) {
    const auto n = static_cast<std::int64_t>(samples.size());
    const double d = ks_statistic(std::move(samples), cdf);
    return {d, ks_p_value(d, n)};
}

}  // namespace rsmanet
