#pragma once

// Monte Carlo oracle for the typical cluster.
//
// Two modes:
//   GainSampled  equivalent gains drawn from the Gamma laws the analysis
//                assumes, each user seeing an independent PPP outside its own
//                serving ball. Matches the analytic model exactly, up to the
//                window truncation.
//   PhysicalZf   explicit M-antenna Rayleigh channels, ZF private beams and a
//                matched common beam at every BS, one shared PPP realization.
//                Only reported, never gated.
//
// Trial i draws from its own engine seeded by (seed, i), and results are
// reduced in trial order, so estimates do not depend on the thread count.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "rsmanet/core_model.hpp"
#include "rsmanet/kernels.hpp"
#include "rsmanet/rates.hpp"
#include "rsmanet/specfun.hpp"
#include "rsmanet/stats.hpp"

namespace rsmanet {

using Rng = std::mt19937_64;
using CVec = std::vector<std::complex<double>>;

/// Engine for one trial; independent of how trials are scheduled.
inline Rng trial_engine(std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return Rng(seq);
}

enum class McMode { GainSampled, PhysicalZf };
enum class WindowMode { CenterEval, Torus };

inline std::string_view to_string(McMode m) { return m == McMode::GainSampled ? "gain" : "physical"; }

/// Square simulation region [-half_side, half_side]^2 around the typical BS.
/// GainSampled uses a disc of radius half_side around each user instead.
struct SimWindow {
    double half_side = 10000.0;
    WindowMode mode = WindowMode::CenterEval;
};

inline SimWindow validate(const SimWindow& w) {
    if (!(w.half_side > 0.0) || !std::isfinite(w.half_side)) throw DomainError("window half_side must be positive");
    return w;
}

struct Point {
    double x;
    double y;
};

/// Homogeneous PPP on the window square.
inline std::vector<Point> sample_ppp(double lambda, const SimWindow& window, Rng& rng) {
    if (!(lambda > 0.0)) throw DomainError("PPP density must be positive");
    const double h = validate(window).half_side;
    const double mean = lambda * 4.0 * h * h;
    std::poisson_distribution<long long> count(mean);
    std::uniform_real_distribution<double> u(-h, h);
    const long long n = count(rng);
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        const double x = u(rng);
        pts.push_back({x, u(rng)});
    }
    return pts;
}

// ---------------------------------------------------------------------------
// Precoders.

/// Circularly symmetric CN(0, 1) vector of length m.
inline CVec complex_gaussian(int m, Rng& rng) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    CVec v(static_cast<std::size_t>(m));
    for (auto& z : v) {
        const double re = n(rng);
        z = {re, n(rng)};
    }
    return v;
}

/// h^H w.
inline std::complex<double> inner(const CVec& h, const CVec& w) {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) s += std::conj(h[i]) * w[i];
    return s;
}

/// |h^H w|^2.
inline double beam_gain(const CVec& h, const CVec& w) { return std::norm(inner(h, w)); }

inline double vec_norm(const CVec& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

/// Unit-norm zero-forcing beams for two users: columns of H (H^H H)^-1.
inline std::array<CVec, 2> zf_precoder(std::span<const CVec> h) {
    if (h.size() != 2) throw DomainError("zero-forcing is implemented for two users");
    if (h[0].size() != h[1].size() || h[0].size() < 2) throw DomainError("ZF needs at least two antennas per user");
    const double a = std::norm(vec_norm(h[0]));
    const double c = std::norm(vec_norm(h[1]));
    const std::complex<double> b = inner(h[0], h[1]);
    // Eigenvalues of the Hermitian Gram matrix [[a, b], [conj b, c]].
    const double mid = 0.5 * (a + c);
    const double rad = std::sqrt(0.25 * (a - c) * (a - c) + std::norm(b));
    const double lmin = mid - rad;
    if (!(lmin > 0.0) || (mid + rad) / lmin > 1e12) throw SingularChannel("channel Gram matrix is numerically singular");
    const double det = a * c - std::norm(b);
    // (H^H H)^-1 = [[c, -b], [-conj b, a]] / det
    std::array<CVec, 2> w{CVec(h[0].size()), CVec(h[0].size())};
    for (std::size_t i = 0; i < h[0].size(); ++i) {
        w[0][i] = (h[0][i] * c - h[1][i] * std::conj(b)) / det;
        w[1][i] = (h[1][i] * a - h[0][i] * b) / det;
    }
    for (auto& col : w) {
        const double n = vec_norm(col);
        for (auto& z : col) z /= n;
    }
    return w;
}

/// Unit-norm matched common beam, proportional to the equally weighted sum of user channels.
inline CVec common_precoder(std::span<const CVec> h) {
    if (h.empty()) throw DomainError("common precoder needs at least one channel");
    CVec w(h[0].size());
    for (const auto& hk : h) {
        if (hk.size() != w.size()) throw DomainError("channel dimensions differ");
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += hk[i];
    }
    const double n = vec_norm(w);
    if (!(n > 0.0)) throw SingularChannel("user channels cancel in the common beam");
    for (auto& z : w) z /= n;
    return w;
}

// ---------------------------------------------------------------------------
// Trials.

struct McSettings {
    McMode mode = McMode::GainSampled;
    SimWindow window;
    std::int64_t trials = 1000;
    std::uint64_t seed = 1;
    int threads = 0;  ///< 0 selects the hardware concurrency
    /// Largest tolerated fraction of the expected interference power lost beyond the window.
    double max_truncation = 1e-3;
};

inline McSettings validate(const McSettings& s) {
    validate(s.window);
    if (s.trials < 1) throw DomainError("Monte Carlo needs at least one trial");
    if (s.threads < 0) throw DomainError("thread count must not be negative");
    if (!(s.max_truncation > 0.0 && s.max_truncation < 1.0)) throw DomainError("max_truncation must lie in (0, 1)");
    return s;
}

/// One realization. Index 0 is the near user, 1 the far user.
struct TrialRecord {
    std::int64_t trial = 0;
    double d1 = 0.0, d2 = 0.0;
    std::array<double, 2> interference{};  ///< aggregate inter-cell interference over P
    std::array<int, 2> interferers{};      ///< interfering BS count per user
    std::array<double, 2> gain_common{};   ///< equivalent common-beam gain
    std::array<double, 2> gain_private{};  ///< equivalent own private-beam gain
    std::array<double, 2> sinr_c{}, sinr_p{};
    std::array<double, 2> r_c_user{};
    double r_c = 0.0;  ///< per-trial min of the two common rates
    double r_p1 = 0.0, r_p2 = 0.0;
    int resampled = 0;         ///< ZF channel redraws after a singular Gram matrix
    double zf_leakage = 0.0;   ///< max |h_k^H w_j|, j != k, in the serving cell (physical mode)
};

struct McResult {
    McMode mode = McMode::GainSampled;
    McEstimate common_near, common_far;
    /// Common rate min(E[r_1c], E[r_2c]), estimated on the user with the smaller mean.
    McEstimate common;
    /// E[min(r_1c, r_2c)] per trial; a lower bound, reported for diagnostics.
    McEstimate common_trial_min;
    McEstimate private_near, private_far;
    /// Per trial: common rate of the limiting user plus both private rates.
    McEstimate sum;
    int common_user = 2;
    double truncated_fraction = 0.0;
    std::int64_t resampled = 0;
    std::vector<TrialRecord> records;
};

/// Expected fraction of interference power lost beyond distance half_side,
/// E[d2^(alpha-2)] / half_side^(alpha-2), averaged over the far user's distance.
inline double truncated_interference_fraction(const NetworkParams& p, double half_side) {
    const double q = p.alpha - 2.0;
    const double lg = ln_gamma(1.0 + q / 2.0);
    const double a = std::numbers::pi * p.lambda_b;
    // d2 is the larger of two nearest-BS distances: E[d2^q] = 2 E[r^q] - E[d1^q].
    const double er = std::exp(lg - 0.5 * q * std::log(a));
    const double ed1 = std::exp(lg - 0.5 * q * std::log(2.0 * a));
    return (2.0 * er - ed1) / std::pow(half_side, q);
}

namespace detail {

inline double path_gain(double dist_sq, double alpha) {
    return alpha == 4.0 ? 1.0 / (dist_sq * dist_sq) : std::pow(dist_sq, -0.5 * alpha);
}

// Nearest-BS distances of two users: the min and max of two Rayleigh draws.
inline std::array<double, 2> serving_pair(double lambda_b, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto nearest = [&] { return std::sqrt(-std::log1p(-u(rng)) / (std::numbers::pi * lambda_b)); };
    const double a = nearest();
    const double b = nearest();
    return {std::min(a, b), std::max(a, b)};
}

inline void finish_rates(TrialRecord& rec) {
    for (int k = 0; k < 2; ++k) rec.r_c_user[k] = std::log1p(rec.sinr_c[k]);
    rec.r_c = std::min(rec.r_c_user[0], rec.r_c_user[1]);
    rec.r_p1 = std::log1p(rec.sinr_p[0]);
    rec.r_p2 = std::log1p(rec.sinr_p[1]);
}

inline TrialRecord gain_sampled_trial(const KernelContext& ctx, const McSettings& s, std::int64_t trial) {
    const NetworkParams& p = ctx.params;
    Rng rng = trial_engine(s.seed, static_cast<std::uint64_t>(trial));
    std::gamma_distribution<double> signal(ctx.fading.signal_shape, 1.0);
    std::gamma_distribution<double> interf(ctx.fading.interference_shape, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double outer_sq = s.window.half_side * s.window.half_side;
    const double noise = p.interference_limited() ? 0.0 : 1.0 / p.snr();
    const double beta = p.beta;
    const double k_users = p.users_per_group;

    TrialRecord rec;
    rec.trial = trial;
    const auto d = serving_pair(p.lambda_b, rng);
    rec.d1 = d[0];
    rec.d2 = d[1];
    for (int k = 0; k < 2; ++k) {
        const double inner_sq = d[k] * d[k];
        double agg = 0.0;
        int count = 0;
        if (outer_sq > inner_sq) {
            std::poisson_distribution<long long> n(p.lambda_b * std::numbers::pi * (outer_sq - inner_sq));
            const long long m = n(rng);
            for (long long i = 0; i < m; ++i) {
                // Squared radius is uniform on the annulus.
                const double r_sq = inner_sq + u(rng) * (outer_sq - inner_sq);
                agg += path_gain(r_sq, p.alpha) * interf(rng);
            }
            count = static_cast<int>(m);
        }
        rec.interference[k] = agg;
        rec.interferers[k] = count;
        const double sig = path_gain(inner_sq, p.alpha);
        const double floor = agg + noise;
        const double psi_c = signal(rng);
        const double psi_res = signal(rng);
        const double psi_own = signal(rng);
        const double psi_other = signal(rng);
        rec.gain_common[k] = psi_c;
        rec.gain_private[k] = psi_own;
        rec.sinr_c[k] = (1.0 - beta) * psi_c * sig / (beta * psi_res * sig + floor);
        rec.sinr_p[k] = beta / k_users * psi_own * sig / (beta / k_users * psi_other * sig + floor);
    }
    finish_rates(rec);
    return rec;
}

inline double torus_delta(double a, double period) {
    double d = std::fmod(a, period);
    if (d > 0.5 * period) d -= period;
    if (d < -0.5 * period) d += period;
    return d;
}

// ZF beams for one BS with fresh user channels; redraws while the Gram matrix is singular.
struct BsBeams {
    CVec common;
    std::array<CVec, 2> zf;
};

inline BsBeams draw_beams(int antennas, Rng& rng, std::array<CVec, 2>& h, int& resampled) {
    for (int attempt = 0;; ++attempt) {
        h = {complex_gaussian(antennas, rng), complex_gaussian(antennas, rng)};
        try {
            BsBeams b;
            b.zf = zf_precoder(h);
            b.common = common_precoder(h);
            return b;
        } catch (const SingularChannel&) {
            ++resampled;
            if (attempt > 1000) throw;
        }
    }
}

inline TrialRecord physical_trial(const KernelContext& ctx, const McSettings& s, std::int64_t trial) {
    const NetworkParams& p = ctx.params;
    Rng rng = trial_engine(s.seed, static_cast<std::uint64_t>(trial));
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double noise = p.interference_limited() ? 0.0 : 1.0 / p.snr();
    const double beta = p.beta;
    const double k_users = p.users_per_group;
    const double h = s.window.half_side;
    const double period = 2.0 * h;

    TrialRecord rec;
    rec.trial = trial;
    const auto d = serving_pair(p.lambda_b, rng);
    rec.d1 = d[0];
    rec.d2 = d[1];
    std::array<Point, 2> user;
    for (int k = 0; k < 2; ++k) {
        const double phi = angle(rng);
        user[k] = {d[k] * std::cos(phi), d[k] * std::sin(phi)};
    }

    std::array<CVec, 2> hown;
    const BsBeams own = draw_beams(p.antennas, rng, hown, rec.resampled);

    const auto bss = sample_ppp(p.lambda_b, s.window, rng);
    std::array<double, 2> agg{0.0, 0.0};
    std::array<int, 2> count{0, 0};
    std::array<double, 2> dist_sq{};
    std::array<CVec, 2> hdummy;
    for (const Point& b : bss) {
        for (int k = 0; k < 2; ++k) {
            double dx = b.x - user[k].x, dy = b.y - user[k].y;
            if (s.window.mode == WindowMode::Torus) {
                dx = torus_delta(dx, period);
                dy = torus_delta(dy, period);
            }
            dist_sq[k] = dx * dx + dy * dy;
        }
        // A BS inside either serving ball contradicts the nearest-BS association.
        if (dist_sq[0] < d[0] * d[0] || dist_sq[1] < d[1] * d[1]) continue;
        const BsBeams beams = draw_beams(p.antennas, rng, hdummy, rec.resampled);
        for (int k = 0; k < 2; ++k) {
            const CVec g = complex_gaussian(p.antennas, rng);
            const double power = (1.0 - beta) * beam_gain(g, beams.common) +
                                 beta / k_users * (beam_gain(g, beams.zf[0]) + beam_gain(g, beams.zf[1]));
            agg[k] += path_gain(dist_sq[k], p.alpha) * power;
            ++count[k];
        }
    }

    for (int k = 0; k < 2; ++k) {
        rec.interference[k] = agg[k];
        rec.interferers[k] = count[k];
        const double sig = path_gain(d[k] * d[k], p.alpha);
        const double floor = agg[k] + noise;
        const double gc = beam_gain(hown[k], own.common);
        const double gown = beam_gain(hown[k], own.zf[k]);
        const double gother = beam_gain(hown[k], own.zf[1 - k]);
        rec.zf_leakage = std::max(rec.zf_leakage, std::sqrt(gother));
        rec.gain_common[k] = gc;
        rec.gain_private[k] = gown;
        rec.sinr_c[k] = (1.0 - beta) * gc * sig / (beta / k_users * (gown + gother) * sig + floor);
        rec.sinr_p[k] = beta / k_users * gown * sig / (beta / k_users * gother * sig + floor);
    }
    finish_rates(rec);
    return rec;
}

}  // namespace detail

/// Runs the trials and reduces them in trial order.
inline McResult run_trials(const KernelContext& ctx, const McSettings& settings) {
    const McSettings s = validate(settings);
    validate(ctx.params);
    validate(ctx.fading);
    McResult out;
    out.mode = s.mode;
    out.truncated_fraction = truncated_interference_fraction(ctx.params, s.window.half_side);
    if (out.truncated_fraction > s.max_truncation) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "window half-side %.6g m drops %.3g of the expected interference (limit %.3g)",
                      s.window.half_side, out.truncated_fraction, s.max_truncation);
        throw InsufficientWindow(buf, out.truncated_fraction);
    }

    const auto m = s.trials;
    out.records.resize(static_cast<std::size_t>(m));
    const int requested = s.threads > 0 ? s.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int nthreads = static_cast<int>(std::min<std::int64_t>(requested, m));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nthreads));
    auto work = [&](int tid) {
        try {
            for (std::int64_t i = tid; i < m; i += nthreads) {
                out.records[static_cast<std::size_t>(i)] = s.mode == McMode::GainSampled
                                                               ? detail::gain_sampled_trial(ctx, s, i)
                                                               : detail::physical_trial(ctx, s, i);
            }
        } catch (...) {
            errors[static_cast<std::size_t>(tid)] = std::current_exception();
        }
    };
    if (nthreads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<double> c1, c2, cmin, p1, p2;
    for (const auto& r : out.records) {
        c1.push_back(r.r_c_user[0]);
        c2.push_back(r.r_c_user[1]);
        cmin.push_back(r.r_c);
        p1.push_back(r.r_p1);
        p2.push_back(r.r_p2);
        out.resampled += r.resampled;
    }
    out.common_near = estimate(c1, s.seed);
    out.common_far = estimate(c2, s.seed);
    out.common_trial_min = estimate(cmin, s.seed);
    out.private_near = estimate(p1, s.seed);
    out.private_far = estimate(p2, s.seed);
    out.common_user = out.common_near.mean < out.common_far.mean ? 1 : 2;
    out.common = out.common_user == 1 ? out.common_near : out.common_far;
    const auto& sel = out.common_user == 1 ? c1 : c2;
    std::vector<double> sum(sel.size());
    for (std::size_t i = 0; i < sel.size(); ++i) sum[i] = sel[i] + p1[i] + p2[i];
    out.sum = estimate(sum, s.seed);
    return out;
}

/// Per-trial CSV dump.
inline void write_trials_csv(std::ostream& os, std::span<const TrialRecord> records) {
    os << "trial,d1,d2,sinr_c1,sinr_c2,sinr_p1,sinr_p2,r_c,r_p1,r_p2\n";
    char buf[512];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%lld,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      static_cast<long long>(r.trial), r.d1, r.d2, r.sinr_c[0], r.sinr_c[1], r.sinr_p[0],
                      r.sinr_p[1], r.r_c, r.r_p1, r.r_p2);
        os << buf;
    }
}

/// Aggregate interference over P at a user whose serving BS is at distance
/// r, from a PPP on the annulus [r, outer]. Used to check the conditional
/// Laplace transform empirically.
inline double sample_interference(const KernelContext& ctx, double r, double outer, Rng& rng) {
    if (!(r > 0.0 && outer > r)) throw DomainError("sample_interference needs 0 < r < outer");
    const NetworkParams& p = ctx.params;
    std::gamma_distribution<double> interf(ctx.fading.interference_shape, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::poisson_distribution<long long> n(p.lambda_b * std::numbers::pi * (outer * outer - r * r));
    const long long m = n(rng);
    double agg = 0.0;
    for (long long i = 0; i < m; ++i) {
        const double r_sq = r * r + u(rng) * (outer * outer - r * r);
        agg += detail::path_gain(r_sq, p.alpha) * interf(rng);
    }
    return agg;
}

// ---------------------------------------------------------------------------
// Equivalent-gain distribution report.

struct GainKsRow {
    std::string gain;       ///< which |h^H w|^2
    std::string candidate;  ///< label of the Gamma law tested
    double shape;
    double statistic;
    double p_value;
};

/// KS statistics of simulated beam gains against the candidate Gamma laws
/// Gamma(M-N+1), Gamma(M-K+1) and Gamma(N). Report only; nothing is asserted.
inline std::vector<GainKsRow> gain_distribution_check(int antennas, int users, int groups, std::int64_t draws,
                                                      std::uint64_t seed) {
    if (draws < 10000) throw DomainError("gain distribution check needs at least 1e4 draws");
    if (users != 2) throw DomainError("gain distribution check supports two users");
    if (antennas < users) throw DomainError("need at least as many antennas as users");
    std::vector<double> zf, common, indep;
    zf.reserve(static_cast<std::size_t>(draws));
    common.reserve(static_cast<std::size_t>(draws));
    indep.reserve(static_cast<std::size_t>(draws));
    int resampled = 0;
    for (std::int64_t i = 0; i < draws; ++i) {
        Rng rng = trial_engine(seed, static_cast<std::uint64_t>(i));
        std::array<CVec, 2> h;
        const detail::BsBeams b = detail::draw_beams(antennas, rng, h, resampled);
        zf.push_back(beam_gain(h[0], b.zf[0]));
        common.push_back(beam_gain(h[0], b.common));
        const CVec g = complex_gaussian(antennas, rng);
        indep.push_back(beam_gain(g, b.zf[0]));
    }
    const std::array<std::pair<std::string, double>, 3> candidates{{
        {"gamma(M-N+1)", static_cast<double>(antennas - groups + 1)},
        {"gamma(M-K+1)", static_cast<double>(antennas - users + 1)},
        {"gamma(N)", static_cast<double>(groups)},
    }};
    std::vector<GainKsRow> rows;
    auto add = [&](const std::string& name, const std::vector<double>& xs) {
        for (const auto& [label, shape] : candidates) {
            const KsResult ks = ks_test(xs, [shape](double x) { return gamma_p(shape, x); });
            rows.push_back({name, label, shape, ks.statistic, ks.p_value});
        }
    };
    add("zf_private", zf);
    add("common", common);
    add("independent_beam", indep);
    return rows;
}

}  // namespace rsmanet
