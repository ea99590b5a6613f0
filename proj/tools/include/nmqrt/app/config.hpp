// config.hpp - run configuration: INI-style sections, parse and canonical serialization
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nmqrt/bath.hpp"
#include "nmqrt/coefficients.hpp"
#include "nmqrt/model.hpp"
#include "nmqrt/spectrum.hpp"

namespace nmqrt::app {

// Field-level configuration problem; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct ModelSpec {
    std::string preset = "two_level";            // two_level | custom
    double omega_a = 3.0;
    std::string coupling = "sigma_minus";        // sigma_minus | sigma_z | sigma_x | custom
    std::optional<op::Operator> hamiltonian;     // custom only
    std::optional<op::Operator> coupling_matrix; // coupling = custom
    bool operator==(const ModelSpec&) const;
};

struct BathSpec {
    double gamma = 0.1;
    double cutoff = 5.0;
    int ohmicity = 1;
    double kT = 1.0;
    double quad_rel_tol = 1e-10;
    bool operator==(const BathSpec&) const = default;
};

struct StateSpec {
    std::string preset = "fig1";                 // fig1 | fig1d | excited | ground | mixed | vector | density
    std::optional<op::State> vector;
    std::optional<op::Operator> density;
    bool operator==(const StateSpec&) const;
};

struct RunSpec {
    double t2 = 1.0;
    double t1_end = 11.0;
    double step = 0.0;                           // 0 = default rule
    std::vector<std::string> modes{"markov-qrt", "nm-qrt", "nm-full"};
    std::vector<std::string> pairs{"all"};       // "all" or A:B with operator names
    bool operator==(const RunSpec&) const = default;
};

struct SpectrumSpec {
    std::string pair = "sp:sm";
    double t_max = 40.0;                         // record length in t1 - t2
    double omega_max = 8.0;
    int points = 1601;
    std::string taper = "rectangular";           // rectangular | cosine_tail
    std::string input = "real_part";             // complex | real_part
    bool operator==(const SpectrumSpec&) const = default;
};

struct OracleSpec {
    bool enabled = false;
    int modes = 8;
    int fock_cutoff = 4;
    double omega_max = 0.0;                      // 0 = 8 * cutoff
    std::string engine_mode = "nm-full";
    std::string engine_bath = "discrete";        // discrete | continuum
    std::vector<double> gammas;                  // scaling table; empty = bath.gamma only
    double tail_tol = 1e-6;
    bool raise_cutoffs = true;                   // lift per-mode n_c to the thermal requirement
    double sample_dt = 0.05;
    bool operator==(const OracleSpec&) const = default;
};

struct OutputSpec {
    std::string dir = ".";
    std::string prefix = "run";
    bool operator==(const OutputSpec&) const = default;
};

struct SweepSpec {
    std::string parameter;                       // e.g. bath.gamma; empty = no sweep
    std::vector<double> values;
    bool operator==(const SweepSpec&) const = default;
};

struct RunConfig {
    ModelSpec model;
    BathSpec bath;
    StateSpec state;
    RunSpec run;
    SpectrumSpec spectrum;
    OracleSpec oracle;
    OutputSpec output;
    SweepSpec sweep;
    std::map<std::string, op::Operator> operators;   // [operator.NAME] matrix = ...
    bool operator==(const RunConfig&) const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& c);

// matrix text: row-major list of (re,im) pairs, e.g. "(1,0) (0,0) (0,0) (-1,0)"; dimension from the count
op::Operator parse_matrix(const std::string& text, const std::string& field);
op::State parse_vector(const std::string& text, const std::string& field);
std::string format_matrix(const op::Operator& m);
std::string format_vector(const op::State& v);
std::string format_double(double x);

// resolved, validated module inputs
SystemModel build_model(const RunConfig& c);
bath::SpectralDensity build_spectral_density(const RunConfig& c);
DensityMatrix build_state(const RunConfig& c);
std::vector<coef::EvolutionMode> build_modes(const RunConfig& c);
// operator names: sp sm sz sx sy id plus [operator.NAME]
op::Operator resolve_operator(const RunConfig& c, const std::string& name);
std::vector<std::pair<std::string, std::string>> build_pairs(const RunConfig& c);
spectrum::Taper build_taper(const RunConfig& c);
spectrum::Input build_input(const RunConfig& c);
// sets one numeric field addressed as section.key
void set_parameter(RunConfig& c, const std::string& key, double value);
void validate(const RunConfig& c);

} // namespace nmqrt::app
