// rsmanet command-line front end.
//
// Exit codes: 0 ok, 1 Monte Carlo verdict FAIL, 2 configuration error,
// 3 numerical failure, 4 simulation error, 5 optimization bracket error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rsmanet/rsmanet.hpp"

namespace {

enum Exit { kOk = 0, kVerdictFail = 1, kConfig = 2, kNumeric = 3, kSimulation = 4, kOptimization = 5 };

struct Overrides {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    bool bits = false;
    std::vector<std::string> schemes;
    std::string mode;
    int threads = -1;
    std::int64_t trials = 0;
};

rsmanet::RunConfig resolve(const Overrides& o, CLI::App& app) {
    std::string path = o.config;
    if (path.empty())
        if (const char* env = std::getenv("RSMANET_CONFIG")) path = env;
    rsmanet::RunConfig c = path.empty() ? rsmanet::RunConfig{} : rsmanet::load_config(path);
    if (app.count("--seed")) {
        c.mc.seed = o.seed;
        c.seed_given = true;
    }
    if (!o.out.empty()) c.output.path = o.out;
    if (o.bits) c.output.bits = true;
    if (!o.schemes.empty()) {
        c.schemes.clear();
        for (const auto& s : o.schemes) c.schemes.push_back(rsmanet::scheme_from_string(s));
    }
    if (!o.mode.empty()) c.mc.mode = o.mode == "physical" ? rsmanet::McMode::PhysicalZf : rsmanet::McMode::GainSampled;
    if (o.threads >= 0) c.mc.threads = o.threads;
    if (o.trials > 0) c.mc.trials = o.trials;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rate, area spectral efficiency and energy efficiency of RSMA/NOMA/SDMA downlinks in PPP networks"};
    app.require_subcommand(1);
    Overrides o;
    app.add_option("--config", o.config, "JSON run configuration (default: $RSMANET_CONFIG)");
    app.add_option("--seed", o.seed, "Monte Carlo seed");
    app.add_option("--out", o.out, "write the main output here instead of stdout");
    app.add_flag("--bits", o.bits, "report rates in bits instead of nats");
    app.add_option("--scheme", o.schemes, "rsma, noma or sdma; repeatable")
        ->check(CLI::IsMember({"rsma", "noma", "sdma"}));
    app.add_option("--mode", o.mode, "Monte Carlo mode")->check(CLI::IsMember({"gain", "physical"}));
    app.add_option("--threads", o.threads, "Monte Carlo worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--trials", o.trials, "Monte Carlo trial count")->check(CLI::PositiveNumber);

    auto* rate = app.add_subcommand("rate", "common, private and sum rates per scheme");
    auto* sweep = app.add_subcommand("sweep", "rates along the configured sweep axis");
    auto* mc = app.add_subcommand("mc", "Monte Carlo cross-check of the analytic rates");
    auto* ase = app.add_subcommand("ase", "area spectral efficiency and energy efficiency per scheme");
    auto* ee = app.add_subcommand("ee", "energy-efficient antenna count");
    for (auto* sub : {rate, sweep, mc, ase, ee}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        const rsmanet::RunConfig cfg = resolve(o, app);
        std::ostringstream buf;
        int status = kOk;
        if (rate->parsed()) {
            rsmanet::cmd_rate(cfg, buf);
        } else if (sweep->parsed()) {
            rsmanet::cmd_sweep(cfg, buf);
        } else if (mc->parsed()) {
            double seconds = 0.0;
            status = rsmanet::cmd_mc(cfg, buf, &seconds) == 0 ? kOk : kVerdictFail;
            std::fprintf(stderr, "mc: %lld trials in %.2f s\n", static_cast<long long>(cfg.mc.trials), seconds);
        } else if (ase->parsed()) {
            rsmanet::cmd_ase(cfg, buf);
        } else if (ee->parsed()) {
            rsmanet::cmd_ee(cfg, buf);
        }
        if (cfg.output.path.empty()) {
            std::cout << buf.str();
        } else {
            std::ofstream f(cfg.output.path, std::ios::binary);
            if (!f) throw rsmanet::ConfigError("cannot write '" + cfg.output.path + "'");
            f << buf.str();
        }
        return status;
    } catch (const rsmanet::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const rsmanet::InsufficientWindow& e) {
        std::fprintf(stderr, "simulation error: %s\n", e.what());
        return kSimulation;
    } catch (const rsmanet::SingularChannel& e) {
        std::fprintf(stderr, "simulation error: %s\n", e.what());
        return kSimulation;
    } catch (const rsmanet::BracketError& e) {
        std::fprintf(stderr, "optimization error: %s\n", e.what());
        return kOptimization;
    } catch (const rsmanet::NoConvergence& e) {
        std::fprintf(stderr, "numerical error: %s (best value %.12g)\n", e.what(), e.best_value());
        return kNumeric;
    } catch (const rsmanet::DomainError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return kNumeric;
    }
}
