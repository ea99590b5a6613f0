// runner.hpp - subcommand implementations shared by the CLI and the tests
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nmqrt/app/config.hpp"
#include "nmqrt/spectrum.hpp"
#include "nmqrt/two_time.hpp"

namespace nmqrt::app {

// temp file in the target directory, then rename
void write_atomic(const std::filesystem::path& path, const std::string& content);

// "t1,re,im" rows with %.16e
std::string correlator_csv(const std::vector<double>& t1, const std::vector<cd>& values);
std::string spectrum_csv(const spectrum::SpectrumResult& s);

struct CorrelatorOutput {
    coef::EvolutionMode mode;
    std::string a, b;
    std::vector<double> t1;
    std::vector<cd> values;
    std::filesystem::path path;
};

// evaluate every requested mode and pair; does not touch the filesystem
std::vector<CorrelatorOutput> compute_correlators(const RunConfig& c);
std::vector<CorrelatorOutput> run_correlate(const RunConfig& c);

struct SpectrumOutput {
    coef::EvolutionMode mode;
    spectrum::SpectrumResult result;
    std::optional<spectrum::Peak> peak_negative, peak_positive;
    std::filesystem::path path;
};
std::vector<SpectrumOutput> compute_spectra(const RunConfig& c);
std::vector<SpectrumOutput> run_spectrum(const RunConfig& c);

// one correlate run per sweep value, concurrently; outputs land in <dir>/<prefix>_<key>_<i>_*
std::vector<std::vector<CorrelatorOutput>> run_sweep(const RunConfig& c);

struct OracleDeviation {
    std::string a, b;
    double max_abs = 0.0;
    double mean_abs = 0.0;
};

struct OracleRun {
    double gamma = 0.0;
    std::vector<int> fock_cutoffs;
    std::string method;
    double recurrence_time = 0.0;
    double trusted_horizon = 0.0;
    double discarded_weight = 0.0;
    std::vector<double> t1;
    std::vector<OracleDeviation> deviations;
};

struct OracleReport {
    std::string engine_mode;
    std::string engine_bath;
    double t2 = 0.0;
    double t1_end = 0.0;
    std::vector<OracleRun> runs;   // one per gamma, in config order
    std::string json() const;
};

OracleReport compute_oracle_compare(const RunConfig& c);
OracleReport run_oracle_compare(const RunConfig& c, std::filesystem::path* written = nullptr);

} // namespace nmqrt::app
