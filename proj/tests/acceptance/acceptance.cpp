// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any of them fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "rsmanet/rsmanet.hpp"

using namespace rsmanet;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
    std::printf("%s  %-3s %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

KernelContext base_ctx(int antennas, double beta) {
    NetworkParams p;
    p.antennas = antennas;
    p.beta = beta;
    return KernelContext::make(p);
}

// 1. Analytic sum-rate vs gain-sampled Monte Carlo, 1e4 trials per point.
void oracle_cross_validation() {
    const auto t0 = Clock::now();
    bool ok = true;
    double worst_z = 0.0, worst_rel = 0.0;
    std::string points;
    for (int m : {2, 4}) {
        for (double beta : {0.2, 0.5, 0.8}) {
            const auto ctx = base_ctx(m, beta);
            McSettings s;
            s.trials = 10000;
            s.seed = 20240601;
            s.threads = 0;
            const McResult r = run_trials(ctx, s);
            const double analytic = sum_rate(ctx, Scheme::Rsma).sum_rate;
            const double z = (r.sum.mean - analytic) / r.sum.std_error;
            const double rr = rel(analytic, r.sum.mean);
            ok = ok && std::abs(z) <= 3.0 && rr <= 0.05;
            worst_z = std::max(worst_z, std::abs(z));
            worst_rel = std::max(worst_rel, rr);
            points += fmt(" M=%d,b=%.1f:z=%+.2f", m, beta, z);
        }
    }
    const double t = seconds_since(t0);
    ok = ok && t <= 120.0;
    report("1", ok, fmt("MC vs analytic sum-rate: max |z| %.2f (<= 3), max rel %.2f%% (<= 5%%), %.1f s (<= 120 s);",
                        worst_z, 100.0 * worst_rel, t) +
                        points);
}

// 2. Common rate decreasing and private sum increasing in beta.
void monotonicity() {
    const auto t0 = Clock::now();
    bool ok = true;
    double min_step = HUGE_VAL;
    for (int m : {2, 4}) {
        const auto base = base_ctx(m, 0.5);
        double prev_c = 0.0, prev_p = 0.0;
        for (int i = 1; i <= 19; ++i) {
            const auto ctx = base.with_beta(0.05 * i);
            const double c = common_rate(ctx).rate;
            const double p = private_rates(ctx).sum();
            if (i > 1) {
                ok = ok && (prev_c - c) > 1e-10 && (p - prev_p) > 1e-10;
                min_step = std::min({min_step, prev_c - c, p - prev_p});
            }
            prev_c = c;
            prev_p = p;
        }
    }
    report("2", ok, fmt("R_c strictly decreasing, private sum strictly increasing on beta = 0.05:0.05:0.95, M in {2,4};"
                        " smallest step %.3g (> 1e-10), %.2f s",
                        min_step, seconds_since(t0)));
}

// 3. Interference-limited invariance to density and power.
void invariance() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (int m : {2, 4}) {
        for (Scheme s : {Scheme::Rsma, Scheme::Noma, Scheme::Sdma}) {
            NetworkParams p;
            p.antennas = m;
            const double ref = sum_rate(KernelContext::make(p), s).sum_rate;
            NetworkParams dense = p;
            dense.lambda_b *= 4.0;
            NetworkParams loud = p;
            loud.power *= 10.0;
            worst = std::max(worst, rel(sum_rate(KernelContext::make(dense), s).sum_rate, ref));
            worst = std::max(worst, rel(sum_rate(KernelContext::make(loud), s).sum_rate, ref));
        }
    }
    report("3", worst <= 1e-6,
           fmt("sum-rate change under lambda_b x4 and P x10: max rel %.3g (<= 1e-6), %.2f s", worst, seconds_since(t0)));
}

// 4. Series vs hypergeometric form of L, and general-alpha vs erfc kernels at alpha = 4.
void closed_forms() {
    const auto t0 = Clock::now();
    auto ctx = base_ctx(4, 0.5);
    ctx.series.rel_tol = 1e-14;
    double worst_l = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double t = std::pow(10.0, -2.0 + 0.1 * i);
        worst_l = std::max(worst_l, rel(l_ic_series(t, ctx), l_ic_closed(t, ctx)));
    }
    double worst_f = 0.0;
    for (double eta : {5.0, 5e9}) {
        NetworkParams p;
        p.noise = p.power / eta;
        const auto c = KernelContext::make(p);
        for (int i = 0; i <= 24; ++i) {
            const double y = std::pow(10.0, -3.0 + 0.25 * i) / eta;
            const auto g = kernel_pair_general(y, c);
            const auto e = kernel_pair_alpha4(y, c);
            worst_f = std::max({worst_f, rel(e.f1, g.f1), rel(e.f2, g.f2)});
        }
    }
    report("4", worst_l <= 1e-8 && worst_f <= 1e-6,
           fmt("series vs 2F1 form of L over t in logspace(-2,2): max rel %.3g (<= 1e-8); "
               "quadrature vs erfc kernels: max rel %.3g (<= 1e-6), %.2f s",
               worst_l, worst_f, seconds_since(t0)));
}

// 5. Scheme ordering, split into its four stated conditions.
void scheme_ordering() {
    const auto t0 = Clock::now();
    double min_gap = HUGE_VAL, min_gap_beta = 0.0;
    int min_gap_m = 0;
    double worst_gap_err = 0.0;
    std::string first_negative;
    for (int m : {2, 4}) {
        for (int i = 10; i <= 90; i += 5) {
            const double beta = 0.01 * i;
            const auto ctx = base_ctx(m, beta);
            const double g = rate_gap(ctx, Scheme::Noma);
            if (g < min_gap) {
                min_gap = g;
                min_gap_beta = beta;
                min_gap_m = m;
            }
            if (g <= 0.0 && first_negative.find(fmt("M=%d", m)) == std::string::npos)
                first_negative += fmt(" M=%d from beta=%.2f;", m, beta);
            const double rsma = sum_rate(ctx, Scheme::Rsma).sum_rate;
            worst_gap_err = std::max(worst_gap_err, std::abs(g - (rsma - sum_rate(ctx, Scheme::Noma).sum_rate)));
            worst_gap_err = std::max(worst_gap_err, std::abs(rate_gap(ctx, Scheme::Sdma) -
                                                             (rsma - sum_rate(ctx, Scheme::Sdma).sum_rate)));
        }
    }
    report("5a", min_gap > 0.0,
           fmt("RSMA - NOMA > 0 on beta in [0.1, 0.9], M in {2,4}: min gap %.5f at M=%d, beta=%.2f;%s", min_gap,
               min_gap_m, min_gap_beta, first_negative.empty() ? " never negative" : first_negative.c_str()));

    bool embed_ok = true;
    std::string embed;
    std::vector<double> beta_star;
    for (int m : {2, 4}) {
        const auto ctx = base_ctx(m, 0.5);
        const BetaOptimum best = optimal_beta(ctx, Scheme::Rsma);
        const double at_one = sum_rate(ctx.with_beta(1.0), Scheme::Rsma).sum_rate;
        const double sdma = sum_rate(ctx, Scheme::Sdma).sum_rate;
        embed_ok = embed_ok && at_one == sdma && best.rate >= sdma;
        embed += fmt(" M=%d: R(beta*)=%.6f, R(1)=%.6f, SDMA=%.6f;", m, best.rate, at_one, sdma);
        beta_star.push_back(best.beta);
    }
    report("5b", embed_ok, "RSMA at beta* >= SDMA and RSMA(beta=1) == SDMA exactly:" + embed);
    report("5c", worst_gap_err <= 1e-8,
           fmt("gap integrals vs direct rate differences: max abs err %.3g (<= 1e-8)", worst_gap_err));
    const bool bracket_ok = beta_star[0] >= 0.15 && beta_star[0] <= 0.3 && beta_star[1] >= 0.05 && beta_star[1] <= 0.15;
    report("5d", bracket_ok,
           fmt("optimal beta: M=2 %.4f (want [0.15, 0.30]), M=4 %.4f (want [0.05, 0.15]), %.2f s", beta_star[0],
               beta_star[1], seconds_since(t0)));
}

// 6. Serving distances and ZF gains against their laws, 1e5 draws each.
void distributions() {
    const auto t0 = Clock::now();
    const double lambda = NetworkParams{}.lambda_b;
    constexpr std::int64_t draws = 100000;
    std::vector<double> d1, d2;
    d1.reserve(draws);
    d2.reserve(draws);
    for (std::int64_t i = 0; i < draws; ++i) {
        Rng rng = trial_engine(606, static_cast<std::uint64_t>(i));
        const auto d = detail::serving_pair(lambda, rng);
        d1.push_back(d[0]);
        d2.push_back(d[1]);
    }
    const auto k1 = ks_test(d1, [&](double r) { return serving_distance_cdf(1, r, lambda); });
    const auto k2 = ks_test(d2, [&](double r) { return serving_distance_cdf(2, r, lambda); });
    const auto rows = gain_distribution_check(4, 2, 1, draws, 607);
    double zf_p = 0.0;
    std::string others;
    for (const auto& r : rows) {
        if (r.gain == "zf_private" && r.candidate == "gamma(M-K+1)")
            zf_p = r.p_value;
        else
            others += fmt(" %s~%s p=%.3g;", r.gain.c_str(), r.candidate.c_str(), r.p_value);
    }
    const bool ok = k1.p_value > 0.01 && k2.p_value > 0.01 && zf_p > 0.01;
    report("6", ok,
           fmt("KS p-values (> 0.01), 1e5 draws: near distance %.3f, far distance %.3f, ZF gain vs Gamma(M-K+1) %.3f, "
               "%.1f s; reported only, M=4:",
               k1.p_value, k2.p_value, zf_p, seconds_since(t0)) +
               others);
}

// 7. Energy-efficient antenna count at the default energy constants.
void ee_optimizer() {
    const auto t0 = Clock::now();
    const auto ctx = base_ctx(4, 0.5);
    const EnergyModel e;
    bool ok = true;
    std::string detail_text;
    for (Scheme s : {Scheme::Rsma, Scheme::Noma, Scheme::Sdma}) {
        const auto curve = ee_curve(ctx, e, s, 2, 40);
        const auto peak = std::max_element(curve.begin(), curve.end(), [](auto& a, auto& b) { return a.ee < b.ee; });
        bool unimodal = true;
        for (auto it = curve.begin() + 1; it != curve.end(); ++it) {
            const bool rising = it <= peak;
            unimodal = unimodal && (rising ? it->ee > (it - 1)->ee : it->ee < (it - 1)->ee);
        }
        const EeSolution sol = optimize_antennas(ctx, e, s, 64);
        bool decreasing = true;
        double prev = omega_ee(ctx, e, s, sol.bracket_lo);
        for (double m = sol.bracket_lo + 0.25; m <= sol.bracket_hi; m += 0.25) {
            const double w = omega_ee(ctx, e, s, m);
            decreasing = decreasing && w < prev;
            prev = w;
        }
        ok = ok && unimodal && decreasing && sol.m_star == peak->antennas;
        detail_text += fmt(" %s: M*=%d (m~=%.3f), exhaustive %d, unimodal %s, Omega decreasing %s;",
                           std::string(to_string(s)).c_str(), sol.m_star, sol.m_tilde, peak->antennas,
                           unimodal ? "yes" : "no", decreasing ? "yes" : "no");
    }
    const double t = seconds_since(t0);
    report("7", ok && t <= 30.0, fmt("EE optimizer, %.2f s (<= 30 s);", t) + detail_text);
}

// 8. Monte Carlo report is a pure function of the configuration.
void determinism() {
    const auto t0 = Clock::now();
    RunConfig c;
    c.mc.trials = 2000;
    c.mc.seed = 8;
    c.seed_given = true;
    auto run = [&](int threads) {
        RunConfig k = c;
        k.mc.threads = threads;
        std::ostringstream os;
        cmd_mc(k, os);
        return os.str();
    };
    const std::string a = run(1), b = run(1), d = run(8);
    report("8", a == b && a == d && !a.empty(),
           fmt("cmd_mc report bytes: run1 %zu, run2 %s, threads=8 %s, %.1f s", a.size(),
               a == b ? "identical" : "DIFFERENT", a == d ? "identical" : "DIFFERENT", seconds_since(t0)));
}

}  // namespace

int main() {
    std::printf("acceptance: %s\n", "rsmanet");
    try {
        oracle_cross_validation();
        monotonicity();
        invariance();
        closed_forms();
        scheme_ordering();
        distributions();
        ee_optimizer();
        determinism();
    } catch (const std::exception& e) {
        std::printf("FAIL  --  aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d check(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
