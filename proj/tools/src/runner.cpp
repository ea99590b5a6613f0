#include "nmqrt/app/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <unistd.h>

#include "json.hpp"

#include "nmqrt/errors.hpp"
#include "nmqrt/oracle.hpp"

namespace nmqrt::app {

namespace fs = std::filesystem;

void write_atomic(const fs::path& path, const std::string& content) {
    static std::atomic<unsigned> counter{0};
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::create_directories(dir);
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()) + "." +
                                std::to_string(counter++));
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
        f.flush();
        if (!f) {
            f.close();
            fs::remove(tmp);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

std::string correlator_csv(const std::vector<double>& t1, const std::vector<cd>& values) {
    std::string s = "t1,re,im\n";
    char buf[96];
    for (std::size_t i = 0; i < t1.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e\n", t1[i], values[i].real(), values[i].imag());
        s += buf;
    }
    return s;
}

std::string spectrum_csv(const spectrum::SpectrumResult& r) {
    std::string s = "omega,S\n";
    char buf[64];
    for (std::size_t i = 0; i < r.omega.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.16e,%.16e\n", r.omega[i], r.values[i]);
        s += buf;
    }
    return s;
}

namespace {

struct Setup {
    SystemModel model;
    bath::SpectralDensity sd;
    bath::Temperature T;
    DensityMatrix rho;
    std::vector<coef::EvolutionMode> modes;
};

Setup setup(const RunConfig& c) {
    validate(c);
    return {build_model(c), build_spectral_density(c), bath::Temperature{c.bath.kT}, build_state(c), build_modes(c)};
}

std::pair<std::string, std::string> split_pair(const std::string& p) {
    const auto colon = p.find(':');
    auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(' '));
        s.erase(s.find_last_not_of(' ') + 1);
        return s;
    };
    return {trim(p.substr(0, colon)), trim(p.substr(colon + 1))};
}

// run jobs concurrently, rethrowing the first failure in job order
template <class T>
std::vector<T> run_jobs(std::vector<std::function<T()>> jobs) {
    std::vector<std::future<T>> fut;
    fut.reserve(jobs.size());
    for (auto& j : jobs) fut.push_back(std::async(std::launch::async, j));
    std::vector<T> out;
    std::exception_ptr first;
    for (auto& f : fut) {
        try {
            out.push_back(f.get());
        } catch (...) {
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
    return out;
}

} // namespace

std::vector<CorrelatorOutput> compute_correlators(const RunConfig& c) {
    const Setup s = setup(c);
    const auto pairs = build_pairs(c);
    auto cf = std::make_shared<bath::ContinuumBath>(s.sd, s.T, c.bath.quad_rel_tol);
    twotime::EngineOptions opt;
    opt.step = c.run.step;
    opt.quad_rel_tol = c.bath.quad_rel_tol;
    const twotime::Engine eng(s.model, cf, std::max(c.run.t1_end, 1e-12), s.modes, opt);
    std::vector<std::function<std::vector<CorrelatorOutput>()>> jobs;
    for (auto m : s.modes) {
        jobs.emplace_back([&, m] {
            const auto run = eng.correlate(m, s.rho, c.run.t2, c.run.t1_end);
            std::vector<CorrelatorOutput> out;
            for (const auto& [a, b] : pairs) {
                CorrelatorOutput o{m, a, b, run.correlations.t1,
                                   run.correlations.correlator(resolve_operator(c, a), resolve_operator(c, b)), {}};
                o.path = fs::path(c.output.dir) / (c.output.prefix + "_" + coef::to_string(m) + "_" + a + "_" + b + ".csv");
                out.push_back(std::move(o));
            }
            return out;
        });
    }
    std::vector<CorrelatorOutput> all;
    for (auto& v : run_jobs(std::move(jobs)))
        for (auto& o : v) all.push_back(std::move(o));
    return all;
}

std::vector<CorrelatorOutput> run_correlate(const RunConfig& c) {
    auto out = compute_correlators(c);
    for (const auto& o : out) write_atomic(o.path, correlator_csv(o.t1, o.values));
    return out;
}

std::vector<SpectrumOutput> compute_spectra(const RunConfig& c) {
    const Setup s = setup(c);
    const auto [an, bn] = split_pair(c.spectrum.pair);
    const op::Operator A = resolve_operator(c, an), B = resolve_operator(c, bn);
    auto cf = std::make_shared<bath::ContinuumBath>(s.sd, s.T, c.bath.quad_rel_tol);
    twotime::EngineOptions opt;
    opt.step = c.run.step;
    opt.quad_rel_tol = c.bath.quad_rel_tol;
    const double t_end = c.run.t2 + c.spectrum.t_max;
    const twotime::Engine eng(s.model, cf, t_end, s.modes, opt);
    const auto grid = spectrum::symmetric_grid(c.spectrum.omega_max, static_cast<std::size_t>(c.spectrum.points));
    const auto taper = build_taper(c);
    const auto input = build_input(c);
    std::vector<std::function<SpectrumOutput()>> jobs;
    for (auto m : s.modes) {
        jobs.emplace_back([&, m] {
            const auto run = eng.correlate(m, s.rho, c.run.t2, t_end);
            std::vector<double> tau;
            for (double t : run.correlations.t1) tau.push_back(t - c.run.t2);
            tau.front() = 0.0;
            SpectrumOutput o{m, spectrum::fourier_spectrum(tau, run.correlations.correlator(A, B), grid, taper, input), {}, {}, {}};
            o.peak_negative = spectrum::find_peak(o.result, -c.spectrum.omega_max, 0.0);
            o.peak_positive = spectrum::find_peak(o.result, 0.0, c.spectrum.omega_max);
            o.path = fs::path(c.output.dir) / (c.output.prefix + "_spectrum_" + coef::to_string(m) + ".csv");
            return o;
        });
    }
    return run_jobs(std::move(jobs));
}

std::vector<SpectrumOutput> run_spectrum(const RunConfig& c) {
    auto out = compute_spectra(c);
    for (const auto& o : out) write_atomic(o.path, spectrum_csv(o.result));
    return out;
}

std::vector<std::vector<CorrelatorOutput>> run_sweep(const RunConfig& c) {
    validate(c);
    if (c.sweep.parameter.empty()) throw ConfigError("sweep.parameter", "sweep needs [sweep] parameter and values");
    std::string key = c.sweep.parameter;
    for (auto& ch : key)
        if (ch == '.') ch = '-';
    std::vector<std::function<std::vector<CorrelatorOutput>()>> jobs;
    for (std::size_t i = 0; i < c.sweep.values.size(); ++i) {
        RunConfig ci = c;
        ci.sweep = {};
        set_parameter(ci, c.sweep.parameter, c.sweep.values[i]);
        ci.output.prefix = c.output.prefix + "_" + key + "_" + std::to_string(i);
        validate(ci);
        jobs.emplace_back([ci] { return run_correlate(ci); });
    }
    auto out = run_jobs(std::move(jobs));
    std::string index = "index,value,prefix\n";
    for (std::size_t i = 0; i < c.sweep.values.size(); ++i)
        index += std::to_string(i) + "," + format_double(c.sweep.values[i]) + "," + c.output.prefix + "_" + key + "_" +
                 std::to_string(i) + "\n";
    write_atomic(fs::path(c.output.dir) / (c.output.prefix + "_sweep.csv"), index);
    return out;
}

OracleReport compute_oracle_compare(const RunConfig& c) {
    const Setup s = setup(c);
    if (!c.oracle.enabled) throw ConfigError("oracle.enabled", "oracle-compare needs [oracle] enabled = true");
    if (c.oracle.modes < 1) throw ConfigError("oracle.modes", "oracle-compare needs at least one mode");
    const auto pairs = build_pairs(c);
    const auto mode = coef::mode_from_string(c.oracle.engine_mode);
    OracleReport rep;
    rep.engine_mode = coef::to_string(mode);
    rep.engine_bath = c.oracle.engine_bath;
    rep.t2 = c.run.t2;
    rep.t1_end = c.run.t1_end;
    const std::vector<double> gammas = c.oracle.gammas.empty() ? std::vector<double>{c.bath.gamma} : c.oracle.gammas;
    const bool commuting = op::max_abs(op::commutator(s.model.hamiltonian, s.model.coupling)) < 1e-12 &&
                           op::is_normal(s.model.coupling);
    for (double g : gammas) {
        bath::SpectralDensity sd = s.sd;
        sd.gamma = g;
        const double wmax = c.oracle.omega_max > 0.0 ? c.oracle.omega_max : sd.omega_max();
        auto db = bath::discretize(sd, static_cast<std::size_t>(c.oracle.modes), wmax,
                                   bath::DiscretizationRule::midpoint, c.oracle.fock_cutoff);
        if (c.oracle.raise_cutoffs) {
            db = oracle::with_thermal_cutoffs(db, s.T, c.oracle.tail_tol);
            if (commuting) db = oracle::with_displacement_cutoffs(db, s.model.coupling, s.T, c.oracle.tail_tol);
        }
        oracle::OracleOptions oo;
        oo.tail_tol = c.oracle.tail_tol;
        const oracle::ExactCorrelator ex(s.model, db, s.T, s.rho, oo);

        std::shared_ptr<const bath::CorrelationFunction> cf;
        if (c.oracle.engine_bath == "discrete")
            cf = std::make_shared<bath::DiscreteCorrelation>(db, s.T);
        else
            cf = std::make_shared<bath::ContinuumBath>(sd, s.T, c.bath.quad_rel_tol);
        twotime::EngineOptions opt;
        opt.step = c.run.step;
        opt.quad_rel_tol = c.bath.quad_rel_tol;
        const twotime::Engine eng(s.model, cf, c.run.t1_end, {mode}, opt);
        const auto run = eng.correlate(mode, s.rho, c.run.t2, c.run.t1_end);

        OracleRun r;
        r.gamma = g;
        r.fock_cutoffs = db.fock_cutoffs;
        r.method = ex.method() == oracle::Method::factorized ? "factorized" : "subspace";
        r.recurrence_time = db.recurrence_time();
        r.discarded_weight = ex.discarded_weight();
        // the discrete-bath engine sees the same revivals as the oracle, so only the
        // continuum comparison is cut at the recurrence time
        r.trusted_horizon = c.oracle.engine_bath == "discrete" ? c.run.t1_end : std::min(c.run.t1_end, r.recurrence_time);
        if (r.trusted_horizon < c.run.t2)
            throw ConfigError("run.t2", "t2 lies beyond the oracle recurrence time " + format_double(r.recurrence_time));
        const auto& t1 = run.correlations.t1;
        const double h = t1.size() > 1 ? t1[1] - t1[0] : 1.0;
        const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(c.oracle.sample_dt / h)));
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < t1.size(); i += stride)
            if (t1[i] <= r.trusted_horizon + 1e-12) idx.push_back(i);
        for (std::size_t i : idx) r.t1.push_back(t1[i]);
        for (const auto& [an, bn] : pairs) {
            const op::Operator A = resolve_operator(c, an), B = resolve_operator(c, bn);
            const auto e = run.correlations.correlator(A, B);
            const auto o = ex.two_time(A, B, c.run.t2, r.t1);
            OracleDeviation d{an, bn, 0.0, 0.0};
            for (std::size_t k = 0; k < idx.size(); ++k) {
                const double dev = std::abs(e[idx[k]] - o[k]);
                d.max_abs = std::max(d.max_abs, dev);
                d.mean_abs += dev;
            }
            if (!idx.empty()) d.mean_abs /= static_cast<double>(idx.size());
            r.deviations.push_back(d);
        }
        rep.runs.push_back(std::move(r));
    }
    return rep;
}

std::string OracleReport::json() const {
    nlohmann::ordered_json j;
    j["engine_mode"] = engine_mode;
    j["engine_bath"] = engine_bath;
    j["t2"] = t2;
    j["t1_end"] = t1_end;
    if (!runs.empty()) {
        const auto& r0 = runs.front();
        j["gamma"] = r0.gamma;
        j["trusted_horizon"] = r0.trusted_horizon;
        j["recurrence_time"] = r0.recurrence_time;
        j["oracle_method"] = r0.method;
        j["fock_cutoffs"] = r0.fock_cutoffs;
        j["samples"] = r0.t1.size();
        nlohmann::ordered_json corr = nlohmann::ordered_json::object();
        for (const auto& d : r0.deviations)
            corr[d.a + ":" + d.b] = {{"max_abs_deviation", d.max_abs}, {"mean_abs_deviation", d.mean_abs}};
        j["correlators"] = corr;
    }
    nlohmann::ordered_json table = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        nlohmann::ordered_json row;
        row["gamma"] = r.gamma;
        row["fock_cutoffs"] = r.fock_cutoffs;
        row["discarded_weight"] = r.discarded_weight;
        row["trusted_horizon"] = r.trusted_horizon;
        nlohmann::ordered_json dev = nlohmann::ordered_json::object(), ratio = nlohmann::ordered_json::object();
        for (std::size_t k = 0; k < r.deviations.size(); ++k) {
            const auto& d = r.deviations[k];
            dev[d.a + ":" + d.b] = d.max_abs;
            if (i > 0 && d.max_abs > 0.0) ratio[d.a + ":" + d.b] = runs[i - 1].deviations[k].max_abs / d.max_abs;
        }
        row["max_abs_deviation"] = dev;
        if (i > 0) row["ratio_to_previous"] = ratio;
        table.push_back(row);
    }
    j["gamma_scaling"] = table;
    return j.dump(2) + "\n";
}

OracleReport run_oracle_compare(const RunConfig& c, fs::path* written) {
    auto rep = compute_oracle_compare(c);
    const fs::path p = fs::path(c.output.dir) / (c.output.prefix + "_oracle_compare.json");
    write_atomic(p, rep.json());
    if (written) *written = p;
    return rep;
}

} // namespace nmqrt::app
