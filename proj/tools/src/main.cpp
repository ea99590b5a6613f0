// nmqrt - two-time correlators of open quantum systems
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "nmqrt/app/presets.hpp"
#include "nmqrt/app/runner.hpp"
#include "nmqrt/errors.hpp"

using namespace nmqrt;
using namespace nmqrt::app;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

struct Common {
    std::string config, preset, mode, out;
    long long seed = 0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "run configuration file");
    sub->add_option("--preset", c.preset, "named scenario (see: preset list)");
    sub->add_option("--mode", c.mode, "markov-qrt | nm-qrt | nm-full | all")
        ->check(CLI::IsMember({"markov-qrt", "nm-qrt", "nm-full", "all"}));
    sub->add_option("--out", c.out, "output directory");
    sub->add_option("--seed", c.seed, "reserved; the engine is deterministic");
}

RunConfig resolve(const Common& c) {
    if (!c.config.empty() && !c.preset.empty()) throw ConfigError("--config", "give either --config or --preset");
    RunConfig cfg = !c.config.empty() ? load_config(c.config) : find_preset(c.preset.empty() ? "fig1" : c.preset).config;
    if (!c.mode.empty()) cfg.run.modes = {c.mode};
    if (!c.out.empty()) cfg.output.dir = c.out;
    validate(cfg);
    return cfg;
}

void print_peak(const char* side, const std::optional<spectrum::Peak>& p) {
    if (p) std::printf("  %s peak omega=%.6f height=%.6e fwhm=%.6f\n", side, p->omega, p->height, p->fwhm);
    else std::printf("  %s peak: none\n", side);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nmqrt: non-Markovian two-time correlation functions"};
    app.require_subcommand(1);
    Common common;

    auto* correlate = app.add_subcommand("correlate", "write <prefix>_<mode>_<A>_<B>.csv for every mode and pair");
    add_common(correlate, common);
    auto* spec = app.add_subcommand("spectrum", "write <prefix>_spectrum_<mode>.csv (omega,S)");
    add_common(spec, common);
    auto* sweep = app.add_subcommand("sweep", "correlate once per [sweep] value, concurrently");
    add_common(sweep, common);
    auto* orc = app.add_subcommand("oracle-compare", "engine vs discretized-bath oracle, JSON report");
    add_common(orc, common);
    auto* preset = app.add_subcommand("preset", "inspect presets");
    preset->require_subcommand(1);
    auto* plist = preset->add_subcommand("list", "list preset names");
    std::string show_name;
    auto* pshow = preset->add_subcommand("show", "print a preset as a config file");
    pshow->add_option("name", show_name)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        if (plist->parsed()) {
            for (const auto& p : presets()) std::printf("%-20s %s\n", p.name.c_str(), p.description.c_str());
            return 0;
        }
        if (pshow->parsed()) {
            std::fputs(serialize_config(find_preset(show_name).config).c_str(), stdout);
            return 0;
        }
        const RunConfig cfg = resolve(common);
        if (correlate->parsed()) {
            for (const auto& o : run_correlate(cfg)) std::printf("%s\n", o.path.string().c_str());
        } else if (spec->parsed()) {
            for (const auto& o : run_spectrum(cfg)) {
                std::printf("%s\n", o.path.string().c_str());
                print_peak("negative", o.peak_negative);
                print_peak("positive", o.peak_positive);
            }
        } else if (sweep->parsed()) {
            for (const auto& run : run_sweep(cfg))
                for (const auto& o : run) std::printf("%s\n", o.path.string().c_str());
        } else if (orc->parsed()) {
            std::filesystem::path p;
            const auto rep = run_oracle_compare(cfg, &p);
            std::printf("%s\n", p.string().c_str());
            for (const auto& r : rep.runs)
                for (const auto& d : r.deviations)
                    std::printf("  gamma=%g %s:%s max=%.3e mean=%.3e horizon=%g\n", r.gamma, d.a.c_str(), d.b.c_str(),
                                d.max_abs, d.mean_abs, r.trusted_horizon);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const InvalidInput& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kConfigError;
    } catch (const NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumericalFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
