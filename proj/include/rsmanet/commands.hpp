#pragma once

// Subcommand bodies. Each writes its main artifact to `out`; sidecar files
// named in the config are written directly. Outputs depend only on the
// config, so reruns are byte-identical.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rsmanet/config.hpp"
#include "rsmanet/metrics.hpp"
#include "rsmanet/montecarlo.hpp"
#include "rsmanet/rates.hpp"

namespace rsmanet {

/// 12 significant digits, the serialization used by every CSV.
inline std::string fmt12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace detail {

inline nlohmann::ordered_json num12(double x) {
    if (!std::isfinite(x)) return nullptr;
    return std::stod(fmt12(x));
}

inline double unit_scale(const RunConfig& c) { return c.output.bits ? 1.0 / std::numbers::ln2 : 1.0; }
inline const char* unit_name(const RunConfig& c) { return c.output.bits ? "bits/s/Hz" : "nats/s/Hz"; }

inline bool has(const RunConfig& c, Scheme s) {
    return std::find(c.schemes.begin(), c.schemes.end(), s) != c.schemes.end();
}

inline void require_noma_beta(const RunConfig& c, double beta) {
    if (has(c, Scheme::Noma) && !(beta > 0.0 && beta < 1.0))
        throw ConfigError("NOMA needs beta strictly inside (0, 1); got " + fmt12(beta));
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << text;
}

inline nlohmann::ordered_json params_json(const NetworkParams& p, const FadingProfile& f) {
    return {{"lambda_b", num12(p.lambda_b)}, {"alpha", num12(p.alpha)},   {"power", num12(p.power)},
            {"noise", num12(p.noise)},       {"antennas", p.antennas},    {"groups", p.groups},
            {"users_per_group", p.users_per_group}, {"beta", num12(p.beta)},
            {"signal_shape", num12(f.signal_shape)}, {"interference_shape", num12(f.interference_shape)}};
}

}  // namespace detail

/// Rate table, one row per scheme.
inline void cmd_rate(const RunConfig& cfg, std::ostream& out) {
    const RunConfig c = validate(cfg);
    detail::require_noma_beta(c, c.network.beta);
    const KernelContext ctx = make_context(c);
    const double u = detail::unit_scale(c);
    out << "# schema: rsmanet.rate/1\n# units: " << detail::unit_name(c) << "\n";
    out << "scheme,beta,common,private_1,private_2,sum\n";
    for (Scheme s : c.schemes) {
        const RateBreakdown r = sum_rate(ctx, s);
        const double beta = s == Scheme::Sdma ? 1.0 : c.network.beta;
        out << to_string(s) << ',' << fmt12(beta) << ',' << fmt12(u * r.common_rate) << ','
            << fmt12(u * r.private_rates[0]) << ',' << fmt12(u * r.private_rates[1]) << ',' << fmt12(u * r.sum_rate)
            << '\n';
    }
}

/// One CSV row per grid value of the sweep axis.
inline void cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    const RunConfig c = validate(cfg);
    if (!c.sweep) throw ConfigError("sweep section is required for the sweep command");
    const SweepSpec& sw = *c.sweep;
    const double u = detail::unit_scale(c);
    const bool rsma = detail::has(c, Scheme::Rsma);

    out << "# schema: rsmanet.sweep/1\n# units: " << detail::unit_name(c) << "\n";
    out << to_string(sw.axis);
    for (Scheme s : c.schemes) {
        const auto n = std::string(to_string(s));
        out << ',' << n << "_common," << n << "_private," << n << "_sum," << n << "_ase";
        if (s == Scheme::Rsma && sw.optimize_beta) out << ",rsma_beta";
    }
    if (rsma)
        for (Scheme s : c.schemes)
            if (s != Scheme::Rsma) out << ",gap_rsma_" << to_string(s);
    out << '\n';

    for (double v : sw.values) {
        RunConfig point = c;
        switch (sw.axis) {
            case SweepAxis::Beta: point.network.beta = v; break;
            case SweepAxis::Antennas: point.network.antennas = static_cast<int>(v); break;
            case SweepAxis::Density: point.network.lambda_b = v; break;
        }
        detail::require_noma_beta(point, point.network.beta);
        const KernelContext ctx = make_context(validate(point));
        out << fmt12(v);
        double rsma_sum = 0.0;
        std::vector<std::pair<Scheme, double>> others;
        for (Scheme s : c.schemes) {
            double beta_used = ctx.params.beta;
            RateBreakdown r;
            if (s == Scheme::Rsma && sw.optimize_beta) {
                beta_used = optimal_beta(ctx, s).beta;
                r = sum_rate(ctx.with_beta(beta_used), s);
            } else {
                r = sum_rate(ctx, s);
            }
            out << ',' << fmt12(u * r.common_rate) << ',' << fmt12(u * r.private_sum()) << ','
                << fmt12(u * r.sum_rate) << ',' << fmt12(u * ctx.params.lambda_b * r.sum_rate);
            if (s == Scheme::Rsma && sw.optimize_beta) out << ',' << fmt12(beta_used);
            if (s == Scheme::Rsma)
                rsma_sum = r.sum_rate;
            else
                others.emplace_back(s, r.sum_rate);
        }
        if (rsma)
            for (const auto& [s, r] : others) out << ',' << fmt12(u * (rsma_sum - r));
        out << '\n';
    }
}

/// Monte Carlo validation report. Timing is left out so the JSON is a pure
/// function of the config; `runtime_seconds` receives it instead.
inline int cmd_mc(const RunConfig& cfg, std::ostream& out, double* runtime_seconds = nullptr) {
    const RunConfig c = validate(cfg);
    if (!c.seed_given) throw ConfigError("Monte Carlo needs an explicit seed (mc.seed or --seed)");
    const KernelContext ctx = make_context(c);
    const double u = detail::unit_scale(c);

    const CommonRate ac = common_rate(ctx);
    const PrivateRates ap = private_rates(ctx);
    const double a_sum = ac.rate + ap.sum();

    const auto t0 = std::chrono::steady_clock::now();
    const McResult r = run_trials(ctx, c.mc);
    if (runtime_seconds) *runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!c.output.trials.empty()) {
        std::ofstream f(c.output.trials, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + c.output.trials + "'");
        write_trials_csv(f, r.records);
    }

    const bool gated = c.mc.mode == McMode::GainSampled;
    bool pass = true;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    auto add = [&](const char* name, double analytic, const McEstimate& e) {
        const double diff = e.mean - analytic;
        double z;
        if (e.std_error > 0.0)
            z = diff / e.std_error;
        else
            z = std::abs(diff) <= 1e-12 ? 0.0 : std::copysign(HUGE_VAL, diff);
        if (!(std::abs(z) <= 3.0)) pass = false;
        rows.push_back({{"name", name},
                        {"analytic", detail::num12(u * analytic)},
                        {"mc_mean", detail::num12(u * e.mean)},
                        {"std_error", detail::num12(u * e.std_error)},
                        {"z", detail::num12(z)}});
    };
    add("common_near", ac.near, r.common_near);
    add("common_far", ac.far, r.common_far);
    add("common", ac.rate, r.common);
    add("private_near", ap.near, r.private_near);
    add("private_far", ap.far, r.private_far);
    add("sum", a_sum, r.sum);

    nlohmann::ordered_json report = {
        {"schema", "rsmanet.mc/1"},
        {"mode", std::string(to_string(c.mc.mode))},
        {"units", detail::unit_name(c)},
        {"trials", r.sum.trials},
        {"seed", c.mc.seed},
        {"params", detail::params_json(ctx.params, ctx.fading)},
        {"window",
         {{"half_side", detail::num12(c.mc.window.half_side)},
          {"geometry", c.mc.window.mode == WindowMode::Torus ? "torus" : "center"},
          {"truncated_fraction", detail::num12(r.truncated_fraction)}}},
        {"quantities", rows},
        {"common_user", r.common_user},
        {"common_trial_min", {{"mc_mean", detail::num12(u * r.common_trial_min.mean)},
                              {"std_error", detail::num12(u * r.common_trial_min.std_error)}}},
        {"resampled_channels", r.resampled},
    };
    if (gated) report["verdict"] = pass ? "PASS" : "FAIL";
    out << report.dump(2) << '\n';
    return gated && !pass ? 1 : 0;
}

/// ASE, energy density and EE per scheme.
inline void cmd_ase(const RunConfig& cfg, std::ostream& out) {
    const RunConfig c = validate(cfg);
    detail::require_noma_beta(c, c.network.beta);
    const KernelContext ctx = make_context(c);
    const double u = detail::unit_scale(c);
    out << "# schema: rsmanet.ase/1\n# units: " << detail::unit_name(c) << "\n";
    out << "scheme,sum_rate,ase,energy_density,energy_efficiency\n";
    for (Scheme s : c.schemes) {
        const double r = sum_rate(ctx, s).sum_rate;
        const double e = energy_density(ctx, c.energy);
        out << to_string(s) << ',' << fmt12(u * r) << ',' << fmt12(u * ctx.params.lambda_b * r) << ','
            << fmt12(e) << ',' << fmt12(u * ctx.params.lambda_b * r / e) << '\n';
    }
}

/// Antenna-count optimization per scheme, with the brute-force EE curve.
inline void cmd_ee(const RunConfig& cfg, std::ostream& out) {
    const RunConfig c = validate(cfg);
    detail::require_noma_beta(c, c.network.beta);
    const KernelContext ctx = make_context(c);
    const double u = detail::unit_scale(c);
    const int k = c.network.users_per_group;

    std::vector<EeSolution> sols;
    for (Scheme s : c.schemes) sols.push_back(optimize_antennas(ctx, c.energy, s, c.ee_m_max));
    int m_hi = c.ee_curve_max;
    for (const auto& s : sols) m_hi = std::max(m_hi, s.m_star + 1);

    std::vector<std::vector<EePoint>> curves;
    for (Scheme s : c.schemes) curves.push_back(ee_curve(ctx, c.energy, s, k, m_hi));

    nlohmann::ordered_json solutions = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < sols.size(); ++i) {
        const auto& s = sols[i];
        const auto best = std::max_element(curves[i].begin(), curves[i].end(),
                                           [](const EePoint& a, const EePoint& b) { return a.ee < b.ee; });
        solutions.push_back({{"scheme", std::string(to_string(c.schemes[i]))},
                             {"m_tilde", detail::num12(s.m_tilde)},
                             {"m_star", s.m_star},
                             {"m_star_ceil", s.m_star_ceil},
                             {"ee_at_star", detail::num12(u * s.ee_at_star)},
                             {"bracket", {detail::num12(s.bracket_lo), detail::num12(s.bracket_hi)}},
                             {"iterations", s.iterations},
                             {"boundary", s.boundary},
                             {"brute_force_m", best->antennas},
                             {"agrees", best->antennas == s.m_star}});
    }

    std::string csv = "# schema: rsmanet.ee_curve/1\n# units: " + std::string(detail::unit_name(c)) + " per W\n";
    csv += "antennas";
    for (Scheme s : c.schemes) csv += "," + std::string(to_string(s)) + "_rate," + std::string(to_string(s)) + "_ee";
    csv += "\n";
    for (std::size_t row = 0; row < curves.front().size(); ++row) {
        csv += std::to_string(curves.front()[row].antennas);
        for (const auto& cv : curves) csv += "," + fmt12(u * cv[row].rate) + "," + fmt12(u * cv[row].ee);
        csv += "\n";
    }
    std::string curve_path = c.output.curve;
    if (curve_path.empty() && !c.output.path.empty()) curve_path = c.output.path + ".curve.csv";
    if (!curve_path.empty()) detail::write_file(curve_path, csv);

    nlohmann::ordered_json report = {{"schema", "rsmanet.ee/1"},
                             {"units", std::string(detail::unit_name(c)) + " per W"},
                             {"params", detail::params_json(ctx.params, ctx.fading)},
                             {"solutions", solutions}};
    if (!curve_path.empty()) report["curve_csv"] = curve_path;
    out << report.dump(2) << '\n';
}

}  // namespace rsmanet
