#include "nmqrt/app/presets.hpp"

namespace nmqrt::app {

namespace {

std::vector<Preset> make_presets() {
    std::vector<Preset> out;
    {
        Preset p{"fig1", "two-level atom, L = sigma_-, w_A=3, kT=1, cutoff 5, gamma 0.1, t2=1, all 9 correlators", {}};
        p.config.output.prefix = "fig1";
        out.push_back(p);
    }
    {
        Preset p{"fig1d", "fig1 with gamma = 0.35 and coherences a quarter of the pure state's", {}};
        p.config.bath.gamma = 0.35;
        p.config.state.preset = "fig1d";
        p.config.output.prefix = "fig1d";
        out.push_back(p);
    }
    {
        Preset p{"markov-recovery", "cutoff 100: the three modes should coincide for <sigma_+ sigma_->", {}};
        p.config.bath.cutoff = 100.0;
        p.config.run.t1_end = 6.0;
        p.config.run.pairs = {"sp:sm"};
        p.config.output.prefix = "markov";
        out.push_back(p);
    }
    {
        Preset p{"hermitian-sx", "L = sigma_x at kT=1 (single effective correlation function)", {}};
        p.config.model.coupling = "sigma_x";
        p.config.run.modes = {"nm-full"};
        p.config.output.prefix = "sx";
        out.push_back(p);
    }
    {
        Preset p{"pure-dephasing", "L = sigma_z at kT=0 against a 200-mode factorized oracle", {}};
        p.config.model.coupling = "sigma_z";
        p.config.bath.kT = 0.0;
        p.config.run.t2 = 1.0;
        p.config.run.t1_end = 4.0;
        p.config.run.modes = {"nm-full"};
        p.config.run.pairs = {"sp:sm"};
        p.config.oracle.enabled = true;
        p.config.oracle.modes = 200;
        p.config.oracle.fock_cutoff = 2;
        p.config.oracle.engine_bath = "continuum";
        p.config.output.prefix = "dephasing";
        out.push_back(p);
    }
    {
        Preset p{"oracle-sigma-minus", "L = sigma_-, 8 modes, n_c=4, kT=1, gamma 0.02 and 0.01 against the oracle", {}};
        p.config.bath.gamma = 0.02;
        p.config.run.t2 = 1.0;
        p.config.run.t1_end = 4.0;
        p.config.run.modes = {"nm-full"};
        p.config.run.pairs = {"sz:sz"};
        p.config.oracle.enabled = true;
        p.config.oracle.modes = 8;
        p.config.oracle.fock_cutoff = 4;
        p.config.oracle.gammas = {0.02, 0.01};
        p.config.output.prefix = "oracle";
        out.push_back(p);
    }
    return out;
}

} // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> p = make_presets();
    return p;
}

const Preset& find_preset(const std::string& name) {
    std::string known;
    for (const auto& p : presets()) {
        if (p.name == name) return p;
        known += (known.empty() ? "" : ", ") + p.name;
    }
    throw ConfigError("--preset", "unknown preset '" + name + "' (" + known + ")");
}

} // namespace nmqrt::app
