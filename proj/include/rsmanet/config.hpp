#pragma once

// Run configuration: JSON in, validated RunConfig out. Unknown keys are
// rejected at every level so typos do not silently fall back to defaults.

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "rsmanet/core_model.hpp"
#include "rsmanet/kernels.hpp"
#include "rsmanet/montecarlo.hpp"

namespace rsmanet {

enum class SweepAxis { Beta, Antennas, Density };

inline std::string_view to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::Beta: return "beta";
        case SweepAxis::Antennas: return "antennas";
        case SweepAxis::Density: return "density";
    }
    return "?";
}

struct SweepSpec {
    SweepAxis axis = SweepAxis::Beta;
    std::vector<double> values;
    bool optimize_beta = false;  ///< evaluate RSMA at its own optimal beta at each point
};

struct OutputSpec {
    std::string path;    ///< main output; stdout when empty
    std::string curve;   ///< EE curve CSV sidecar
    std::string trials;  ///< per-trial Monte Carlo CSV dump
    bool bits = false;
};

enum class FadingPreset { Standard, PhysicalZf, Custom };

struct RunConfig {
    NetworkParams network;
    FadingPreset fading_preset = FadingPreset::Standard;
    double signal_shape = 0.0;        ///< custom preset only
    double interference_shape = 0.0;  ///< custom preset only
    EnergyModel energy;
    McSettings mc;
    bool seed_given = false;
    std::optional<SweepSpec> sweep;
    std::vector<Scheme> schemes{Scheme::Rsma, Scheme::Noma, Scheme::Sdma};
    OutputSpec output;
    QuadratureSpec quad;
    SeriesControl series;
    int ee_m_max = 64;
    int ee_curve_max = 40;
};

namespace detail {

using nlohmann::json;

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("bad value for '" + std::string(key) + "' in " + where);
    }
}

inline std::vector<double> read_grid(const json& j, const std::string& where) {
    std::vector<double> v;
    if (j.contains("values")) {
        if (j.contains("start") || j.contains("stop") || j.contains("step"))
            throw ConfigError(where + ": give either values or start/stop/step");
        read(j, "values", v, where);
    } else {
        double start = 0, stop = 0, step = 0;
        if (!j.contains("start") || !j.contains("stop") || !j.contains("step"))
            throw ConfigError(where + ": grid needs values or start/stop/step");
        read(j, "start", start, where);
        read(j, "stop", stop, where);
        read(j, "step", step, where);
        if (!(step > 0.0) || !(stop >= start)) throw ConfigError(where + ": need step > 0 and stop >= start");
        const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= n; ++i) v.push_back(start + static_cast<double>(i) * step);
    }
    if (v.empty()) throw ConfigError(where + ": empty grid");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1])) throw ConfigError(where + ": grid must be strictly increasing");
    return v;
}

}  // namespace detail

/// Builds a RunConfig from parsed JSON; throws ConfigError on any problem.
inline RunConfig parse_config(const nlohmann::json& j) {
    using detail::check_keys;
    using detail::read;
    RunConfig c;
    check_keys(j, "config", {"network", "fading", "energy", "mc", "sweep", "schemes", "output", "tolerances", "ee"});

    if (j.contains("network")) {
        const auto& n = j.at("network");
        check_keys(n, "network",
                   {"lambda_b", "alpha", "power", "noise", "antennas", "groups", "users_per_group", "beta"});
        read(n, "lambda_b", c.network.lambda_b, "network");
        read(n, "alpha", c.network.alpha, "network");
        read(n, "power", c.network.power, "network");
        read(n, "noise", c.network.noise, "network");
        read(n, "antennas", c.network.antennas, "network");
        read(n, "groups", c.network.groups, "network");
        read(n, "users_per_group", c.network.users_per_group, "network");
        read(n, "beta", c.network.beta, "network");
    }
    if (j.contains("fading")) {
        const auto& f = j.at("fading");
        check_keys(f, "fading", {"preset", "signal_shape", "interference_shape"});
        const bool shapes = f.contains("signal_shape") || f.contains("interference_shape");
        if (f.contains("preset")) {
            if (shapes) throw ConfigError("fading: give either a preset or explicit shapes");
            std::string p;
            read(f, "preset", p, "fading");
            if (p == "default")
                c.fading_preset = FadingPreset::Standard;
            else if (p == "physical-zf")
                c.fading_preset = FadingPreset::PhysicalZf;
            else
                throw ConfigError("fading: unknown preset '" + p + "'");
        } else if (shapes) {
            if (!f.contains("signal_shape") || !f.contains("interference_shape"))
                throw ConfigError("fading: custom profile needs both shapes");
            c.fading_preset = FadingPreset::Custom;
            read(f, "signal_shape", c.signal_shape, "fading");
            read(f, "interference_shape", c.interference_shape, "fading");
        }
    }
    if (j.contains("energy")) {
        const auto& e = j.at("energy");
        check_keys(e, "energy", {"pa_efficiency", "circuit_per_antenna", "precoding_coeff", "static"});
        read(e, "pa_efficiency", c.energy.pa_efficiency, "energy");
        read(e, "circuit_per_antenna", c.energy.circuit_per_antenna, "energy");
        read(e, "precoding_coeff", c.energy.precoding_coeff, "energy");
        read(e, "static", c.energy.static_power, "energy");
    }
    if (j.contains("mc")) {
        const auto& m = j.at("mc");
        check_keys(m, "mc", {"mode", "trials", "seed", "threads", "half_side", "window", "max_truncation"});
        if (m.contains("mode")) {
            std::string mode;
            read(m, "mode", mode, "mc");
            if (mode == "gain")
                c.mc.mode = McMode::GainSampled;
            else if (mode == "physical")
                c.mc.mode = McMode::PhysicalZf;
            else
                throw ConfigError("mc: mode must be gain or physical");
        }
        read(m, "trials", c.mc.trials, "mc");
        if (m.contains("seed")) {
            read(m, "seed", c.mc.seed, "mc");
            c.seed_given = true;
        }
        read(m, "threads", c.mc.threads, "mc");
        read(m, "half_side", c.mc.window.half_side, "mc");
        read(m, "max_truncation", c.mc.max_truncation, "mc");
        if (m.contains("window")) {
            std::string w;
            read(m, "window", w, "mc");
            if (w == "center")
                c.mc.window.mode = WindowMode::CenterEval;
            else if (w == "torus")
                c.mc.window.mode = WindowMode::Torus;
            else
                throw ConfigError("mc: window must be center or torus");
        }
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        check_keys(s, "sweep", {"axis", "values", "start", "stop", "step", "optimize_beta"});
        SweepSpec sw;
        std::string axis;
        if (!s.contains("axis")) throw ConfigError("sweep: axis is required");
        read(s, "axis", axis, "sweep");
        if (axis == "beta")
            sw.axis = SweepAxis::Beta;
        else if (axis == "antennas")
            sw.axis = SweepAxis::Antennas;
        else if (axis == "density")
            sw.axis = SweepAxis::Density;
        else
            throw ConfigError("sweep: axis must be beta, antennas or density");
        sw.values = detail::read_grid(s, "sweep");
        read(s, "optimize_beta", sw.optimize_beta, "sweep");
        if (sw.axis == SweepAxis::Antennas)
            for (double v : sw.values)
                if (v != std::floor(v)) throw ConfigError("sweep: antenna counts must be integers");
        c.sweep = sw;
    }
    if (j.contains("schemes")) {
        std::vector<std::string> names;
        read(j, "schemes", names, "config");
        c.schemes.clear();
        for (const auto& n : names) {
            try {
                c.schemes.push_back(scheme_from_string(n));
            } catch (const DomainError& e) {
                throw ConfigError(e.what());
            }
        }
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        check_keys(o, "output", {"path", "curve", "trials", "bits"});
        read(o, "path", c.output.path, "output");
        read(o, "curve", c.output.curve, "output");
        read(o, "trials", c.output.trials, "output");
        read(o, "bits", c.output.bits, "output");
    }
    if (j.contains("tolerances")) {
        const auto& t = j.at("tolerances");
        check_keys(t, "tolerances",
                   {"quad_rel_tol", "quad_abs_tol", "max_subdivisions", "series_rel_tol", "series_max_terms"});
        read(t, "quad_rel_tol", c.quad.rel_tol, "tolerances");
        read(t, "quad_abs_tol", c.quad.abs_tol, "tolerances");
        read(t, "max_subdivisions", c.quad.max_subdivisions, "tolerances");
        read(t, "series_rel_tol", c.series.rel_tol, "tolerances");
        read(t, "series_max_terms", c.series.max_terms, "tolerances");
    }
    if (j.contains("ee")) {
        const auto& e = j.at("ee");
        check_keys(e, "ee", {"m_max", "curve_max"});
        read(e, "m_max", c.ee_m_max, "ee");
        read(e, "curve_max", c.ee_curve_max, "ee");
    }
    return c;
}

/// Fading profile implied by the preset for a given parameter set.
inline FadingProfile fading_for(const RunConfig& c, const NetworkParams& p) {
    switch (c.fading_preset) {
        case FadingPreset::Standard: return FadingProfile::standard(p);
        case FadingPreset::PhysicalZf: return FadingProfile::physical_zf(p);
        case FadingPreset::Custom: return {c.signal_shape, c.interference_shape, FadingRule::Custom};
    }
    return FadingProfile::standard(p);
}

/// Checks every cross-field rule; model-domain violations become ConfigError.
inline RunConfig validate(const RunConfig& c) {
    try {
        validate(c.network);
        validate(fading_for(c, c.network));
        validate(c.energy);
        validate(c.mc);
        validate(c.quad);
        validate(c.series);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (c.schemes.empty()) throw ConfigError("scheme list must not be empty");
    if (c.ee_m_max < c.network.users_per_group + 1) throw ConfigError("ee.m_max must be at least K + 1");
    if (c.ee_curve_max < c.network.users_per_group) throw ConfigError("ee.curve_max must be at least K");
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

inline KernelContext make_context(const RunConfig& c) {
    KernelContext ctx{validate(c.network), validate(fading_for(c, c.network)), validate(c.series), validate(c.quad)};
    return ctx;
}

}  // namespace rsmanet
