#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "rsmanet/montecarlo.hpp"
#include "rsmanet/rates.hpp"

using namespace rsmanet;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLambda = 1.0 / (kPi * 150.0 * 150.0);

KernelContext ctx_for(int antennas, double beta) {
    NetworkParams p;
    p.antennas = antennas;
    p.beta = beta;
    return KernelContext::make(p);
}

McSettings settings(std::int64_t trials, std::uint64_t seed, int threads = 1) {
    McSettings s;
    s.trials = trials;
    s.seed = seed;
    s.threads = threads;
    return s;
}

}  // namespace

TEST(Stats, EstimateAndKs) {
    const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
    const auto e = estimate(xs, 9);
    EXPECT_DOUBLE_EQ(e.mean, 2.5);
    EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(5.0 / 3.0 / 4.0));
    EXPECT_EQ(e.trials, 4);
    EXPECT_EQ(e.seed, 9u);
    EXPECT_THROW(estimate(std::vector<double>{}), DomainError);

    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> uni(5000);
    for (auto& x : uni) x = u(rng);
    EXPECT_GT(ks_test(uni, [](double x) { return x; }).p_value, 1e-3);
    EXPECT_LT(ks_test(uni, [](double x) { return x * x; }).p_value, 1e-6);
    EXPECT_NEAR(ks_p_value(1.36 / std::sqrt(1e6), 1000000), 0.05, 0.002);
}

TEST(TrialEngine, DeterministicAndDistinct) {
    Rng a = trial_engine(42, 7), b = trial_engine(42, 7), c = trial_engine(42, 8), d = trial_engine(43, 7);
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
    EXPECT_NE(x, d());
    // High seed bits matter too.
    EXPECT_NE(trial_engine(1, 0)(), trial_engine(1 + (1ull << 32), 0)());
}

TEST(Ppp, CountIsPoisson) {
    const SimWindow w{500.0, WindowMode::CenterEval};
    const double mean = kLambda * 4.0 * 500.0 * 500.0;
    EXPECT_NEAR(mean, 14.147, 1e-3);
    const int reps = 4000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < reps; ++i) {
        Rng rng = trial_engine(5, static_cast<std::uint64_t>(i));
        const auto pts = sample_ppp(kLambda, w, rng);
        for (const auto& p : pts) {
            ASSERT_LE(std::abs(p.x), 500.0);
            ASSERT_LE(std::abs(p.y), 500.0);
        }
        s += static_cast<double>(pts.size());
        s2 += static_cast<double>(pts.size() * pts.size());
    }
    const double m = s / reps;
    const double var = s2 / reps - m * m;
    EXPECT_NEAR(m, mean, 4.0 * std::sqrt(mean / reps));
    EXPECT_NEAR(var / m, 1.0, 0.1);

    Rng rng(1);
    EXPECT_TRUE(sample_ppp(1e-15, w, rng).empty());
    EXPECT_THROW(sample_ppp(0.0, w, rng), DomainError);
}

TEST(Precoder, ZeroForcingProperties) {
    for (int m : {2, 4, 8}) {
        Rng rng(100 + m);
        for (int i = 0; i < 50; ++i) {
            const std::array<CVec, 2> h{complex_gaussian(m, rng), complex_gaussian(m, rng)};
            const auto w = zf_precoder(h);
            for (int k = 0; k < 2; ++k) {
                EXPECT_NEAR(vec_norm(w[k]), 1.0, 1e-12);
                EXPECT_LT(std::abs(inner(h[k], w[1 - k])), 1e-10 * vec_norm(h[k]));
                EXPECT_GT(beam_gain(h[k], w[k]), 0.0);
            }
        }
    }
    Rng rng(9);
    const CVec g = complex_gaussian(4, rng);
    const std::array<CVec, 2> same{g, g};
    EXPECT_THROW(zf_precoder(same), SingularChannel);
    const std::array<CVec, 1> one{g};
    EXPECT_THROW(zf_precoder(one), DomainError);
}

TEST(Precoder, ZeroForcingGainIsGammaMMinusKPlusOne) {
    const int m = 4;
    std::vector<double> gains;
    for (int i = 0; i < 20000; ++i) {
        Rng rng = trial_engine(77, static_cast<std::uint64_t>(i));
        const std::array<CVec, 2> h{complex_gaussian(m, rng), complex_gaussian(m, rng)};
        gains.push_back(beam_gain(h[0], zf_precoder(h)[0]));
    }
    EXPECT_GT(ks_test(gains, [](double x) { return gamma_p(3.0, x); }).p_value, 1e-3);
}

TEST(Precoder, CommonBeam) {
    Rng rng(4);
    const CVec h = complex_gaussian(4, rng);
    const std::array<CVec, 1> single{h};
    const CVec w = common_precoder(single);
    EXPECT_NEAR(vec_norm(w), 1.0, 1e-12);
    EXPECT_NEAR(beam_gain(h, w), vec_norm(h) * vec_norm(h), 1e-12);
    CVec neg = h;
    for (auto& z : neg) z = -z;
    const std::array<CVec, 2> cancel{h, neg};
    EXPECT_THROW(common_precoder(cancel), SingularChannel);
    EXPECT_THROW(common_precoder(std::span<const CVec>{}), DomainError);
}

TEST(GainCheck, ReportsAllCandidates) {
    const auto rows = gain_distribution_check(4, 2, 1, 10000, 5);
    ASSERT_EQ(rows.size(), 9u);
    auto find = [&](const std::string& gain, const std::string& cand) {
        for (const auto& r : rows)
            if (r.gain == gain && r.candidate == cand) return r;
        throw std::runtime_error("missing row");
    };
    EXPECT_GT(find("zf_private", "gamma(M-K+1)").p_value, 1e-3);
    EXPECT_LT(find("zf_private", "gamma(M-N+1)").p_value, 1e-6);
    EXPECT_GT(find("independent_beam", "gamma(N)").p_value, 1e-3);
    EXPECT_THROW(gain_distribution_check(4, 2, 1, 100, 5), DomainError);
}

TEST(Window, TruncationRule) {
    const NetworkParams p;
    // alpha = 4: E[d2^2] / h^2 with E[d2^2] = 2/(pi lambda) - 1/(2 pi lambda).
    EXPECT_NEAR(truncated_interference_fraction(p, 1000.0), 1.5 * 150.0 * 150.0 / 1e6, 1e-12);
    auto ctx = ctx_for(4, 0.5);
    auto s = settings(10, 1);
    s.window.half_side = 1000.0;
    try {
        run_trials(ctx, s);
        FAIL() << "expected InsufficientWindow";
    } catch (const InsufficientWindow& e) {
        EXPECT_NEAR(e.truncated_fraction(), 0.03375, 1e-9);
    }
    s.window.half_side = 10000.0;
    EXPECT_NO_THROW(run_trials(ctx, s));
}

TEST(Trials, NoCommonStreamAtFullPrivateShare) {
    const auto r = run_trials(ctx_for(4, 1.0), settings(50, 3));
    for (const auto& rec : r.records) {
        EXPECT_EQ(rec.r_c, 0.0);
        EXPECT_EQ(rec.sinr_c[0], 0.0);
    }
    EXPECT_EQ(r.common.mean, 0.0);
}

TEST(Trials, GainSampledAgreesWithAnalytic) {
    const auto ctx = ctx_for(4, 0.5);
    const auto r = run_trials(ctx, settings(1000, 42, 0));
    const auto c = common_rate(ctx);
    const auto p = private_rates(ctx);
    const double analytic_sum = c.rate + p.sum();
    EXPECT_NEAR(r.common_near.mean, c.near, 3.0 * r.common_near.std_error);
    EXPECT_NEAR(r.common_far.mean, c.far, 3.0 * r.common_far.std_error);
    EXPECT_NEAR(r.common.mean, c.rate, 3.0 * r.common.std_error);
    EXPECT_NEAR(r.private_near.mean, p.near, 3.0 * r.private_near.std_error);
    EXPECT_NEAR(r.private_far.mean, p.far, 3.0 * r.private_far.std_error);
    EXPECT_NEAR(r.sum.mean, analytic_sum, 3.0 * r.sum.std_error);
    EXPECT_EQ(r.common_user, 2);
    EXPECT_LE(r.common_trial_min.mean, r.common.mean);
}

TEST(Trials, DistancesFollowServingLaw) {
    const auto r = run_trials(ctx_for(4, 0.5), settings(3000, 8, 0));
    std::vector<double> d1, d2;
    for (const auto& rec : r.records) {
        d1.push_back(rec.d1);
        d2.push_back(rec.d2);
        EXPECT_LE(rec.d1, rec.d2);
    }
    EXPECT_GT(ks_test(d1, [](double x) { return serving_distance_cdf(1, x, kLambda); }).p_value, 1e-3);
    EXPECT_GT(ks_test(d2, [](double x) { return serving_distance_cdf(2, x, kLambda); }).p_value, 1e-3);
}

TEST(Trials, IndependentOfThreadCount) {
    const auto ctx = ctx_for(4, 0.5);
    const auto a = run_trials(ctx, settings(200, 11, 1));
    const auto b = run_trials(ctx, settings(200, 11, 7));
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].r_c, b.records[i].r_c);
        EXPECT_EQ(a.records[i].r_p1, b.records[i].r_p1);
        EXPECT_EQ(a.records[i].interference[1], b.records[i].interference[1]);
    }
    EXPECT_EQ(a.sum.mean, b.sum.mean);
    EXPECT_EQ(a.sum.std_error, b.sum.std_error);
}

TEST(Trials, StandardErrorShrinksWithTrials) {
    const auto ctx = ctx_for(4, 0.5);
    const auto a = run_trials(ctx, settings(1000, 21, 0));
    const auto b = run_trials(ctx, settings(2000, 22, 0));
    EXPECT_NEAR(a.sum.std_error / b.sum.std_error, std::sqrt(2.0), 0.15 * std::sqrt(2.0));
}

TEST(Trials, CsvDump) {
    const auto r = run_trials(ctx_for(4, 0.5), settings(3, 1));
    std::ostringstream os;
    write_trials_csv(os, r.records);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "trial,d1,d2,sinr_c1,sinr_c2,sinr_p1,sinr_p2,r_c,r_p1,r_p2");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 3);
}

TEST(Trials, PhysicalModeBeamsAreOrthogonal) {
    auto s = settings(20, 5, 0);
    s.mode = McMode::PhysicalZf;
    const auto r = run_trials(ctx_for(4, 0.5), s);
    for (const auto& rec : r.records) {
        EXPECT_LE(rec.zf_leakage, 1e-10);
        EXPECT_GT(rec.interferers[0], 0);
        EXPECT_TRUE(std::isfinite(rec.r_c));
    }
    EXPECT_EQ(r.mode, McMode::PhysicalZf);
}

TEST(Trials, SettingsValidation) {
    auto s = settings(0, 1);
    EXPECT_THROW(run_trials(ctx_for(4, 0.5), s), DomainError);
    s = settings(10, 1, -1);
    EXPECT_THROW(validate(s), DomainError);
    s = settings(10, 1);
    s.max_truncation = 0.0;
    EXPECT_THROW(validate(s), DomainError);
}

TEST(Interference, EmpiricalLaplaceTransform) {
    NetworkParams p;
    p.lambda_b = 1e-3;
    p.noise = 1.0;
    const auto ctx = KernelContext::make(p);
    const double r = 20.0, outer = 1500.0;
    const double z = std::pow(r, 4.0) / p.snr();
    const int n = 4000;
    std::vector<double> v;
    for (int i = 0; i < n; ++i) {
        Rng rng = trial_engine(99, static_cast<std::uint64_t>(i));
        v.push_back(std::exp(-z * p.snr() * sample_interference(ctx, r, outer, rng)));
    }
    const auto e = estimate(v);
    EXPECT_NEAR(e.mean, m_ic_conditional(z, r, ctx), 3.0 * e.std_error + 3e-4);
}
