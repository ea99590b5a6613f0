// nmqrt_acceptance N - runs acceptance criterion N (1..8), or all of them without an argument.
// One PASS/FAIL line per check; exit status 1 when any check fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nmqrt/app/presets.hpp"
#include "nmqrt/app/runner.hpp"
#include "nmqrt/oracle.hpp"
#include "nmqrt/spectrum.hpp"
#include "nmqrt/two_time.hpp"

using namespace nmqrt;
using coef::EvolutionMode;
using twotime::SpinPair;

namespace {

int failures = 0;

void report(bool ok, const std::string& id, const std::string& what, const std::string& detail) {
    std::printf("%s %s %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
    char b[128];
    std::snprintf(b, sizeof b, f, a);
    return b;
}
std::string fmt(const char* f, double a, double b2) {
    char b[160];
    std::snprintf(b, sizeof b, f, a, b2);
    return b;
}
std::string fmt(const char* f, double a, double b2, double c) {
    char b[200];
    std::snprintf(b, sizeof b, f, a, b2, c);
    return b;
}

double max_abs_diff(const std::vector<cd>& a, const std::vector<cd>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// the Fig. 1 scenario
constexpr double kOmegaA = 3.0;
constexpr double kT2 = 1.0;

std::shared_ptr<bath::ContinuumBath> continuum(double gamma, double cutoff, double kT) {
    bath::SpectralDensity sd;
    sd.gamma = gamma;
    sd.cutoff = cutoff;
    return std::make_shared<bath::ContinuumBath>(sd, bath::Temperature{kT});
}

DensityMatrix fig1_state() {
    op::State psi(2);
    psi << std::sqrt(3.0) / 2.0, 0.5;
    return DensityMatrix::pure(psi);
}

const std::vector<EvolutionMode> kAllModes{EvolutionMode::markov_qrt, EvolutionMode::non_markov_qrt,
                                           EvolutionMode::non_markov_full};

// 1: memory terms drop out of <s+ s+> and <s- s->
void criterion1() {
    const twotime::Engine eng(two_level(kOmegaA, CouplingPreset::sigma_minus), continuum(0.1, 5.0, 1.0), 11.0,
                              {EvolutionMode::non_markov_qrt, EvolutionMode::non_markov_full});
    const auto q = eng.correlate(EvolutionMode::non_markov_qrt, fig1_state(), kT2, 11.0);
    const auto f = eng.correlate(EvolutionMode::non_markov_full, fig1_state(), kT2, 11.0);
    for (auto p : {SpinPair::pp, SpinPair::mm}) {
        const auto [A, B] = twotime::spin_pair_operators(p);
        const double d = max_abs_diff(q.correlations.correlator(A, B), f.correlations.correlator(A, B));
        report(d < 1e-8, "c1", "case-1 qrt identity " + twotime::to_string(p),
               fmt("max|full - nm-qrt| = %.3e over t1 in [1,11] (< 1e-8)", d));
    }
}

// 2: no absorption channel at zero temperature
void criterion2() {
    const auto b = continuum(0.1, 5.0, 0.0);
    double beta = 0.0;
    for (int k = 0; k < 20; ++k) beta = std::max(beta, std::abs(b->beta(0.25 * k + 0.1 * (k % 3))));
    report(beta <= 1e-12, "c2", "beta(t) at kT=0", fmt("max|beta| = %.3e at 20 points (<= 1e-12)", beta));

    const twotime::Engine eng(two_level(kOmegaA, CouplingPreset::sigma_minus), b, 5.0,
                              {EvolutionMode::non_markov_full});
    const auto& ks = eng.kernels(EvolutionMode::non_markov_full);
    double g2 = 0.0, g4 = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double t = 0.24 * k + 0.01;
        g2 = std::max(g2, std::abs(ks.rate_beta(0, t)));
        const double t2 = 0.1 * k, t1 = t2 + 0.13 * k;
        g4 = std::max(g4, std::abs(coef::gamma4(*eng.table(), kOmegaA, t1, t2)));
    }
    report(g2 <= 1e-12, "c2", "Gamma2(t) at kT=0", fmt("max|Gamma2| = %.3e at 20 points (<= 1e-12)", g2));
    report(g4 <= 1e-12, "c2", "Gamma4(t1,t2) at kT=0", fmt("max|Gamma4| = %.3e at 20 points (<= 1e-12)", g4));
}

// 3: for Hermitian L only alpha + beta enters
void criterion3() {
    const auto thermal = continuum(0.1, 5.0, 1.0);
    const auto eff = std::make_shared<bath::ContinuumBath>(thermal->effective());
    const auto m = two_level(kOmegaA, CouplingPreset::sigma_x);
    const twotime::Engine a(m, thermal, 11.0, {EvolutionMode::non_markov_full});
    const twotime::Engine e(m, eff, 11.0, {EvolutionMode::non_markov_full});
    const auto ra = a.correlate(EvolutionMode::non_markov_full, fig1_state(), kT2, 11.0);
    const auto re = e.correlate(EvolutionMode::non_markov_full, fig1_state(), kT2, 11.0);
    double d = 0.0;
    for (auto p : twotime::all_spin_pairs) {
        const auto [A, B] = twotime::spin_pair_operators(p);
        d = std::max(d, max_abs_diff(ra.correlations.correlator(A, B), re.correlations.correlator(A, B)));
    }
    report(d < 1e-8, "c3", "sigma_x thermal vs alpha_eff zero-T form",
           fmt("max|diff| = %.3e over 9 correlators, t1 in [1,11] (< 1e-8)", d));
}

// 4: broad bath, the three modes should coincide
void criterion4() {
    const twotime::Engine eng(two_level(kOmegaA, CouplingPreset::sigma_minus), continuum(0.1, 100.0, 1.0), 6.0,
                              kAllModes);
    std::vector<std::vector<cd>> c;
    for (auto m : kAllModes)
        c.push_back(eng.correlate(m, fig1_state(), kT2, 6.0).correlations.correlator(op::sigma_plus(), op::sigma_minus()));
    double peak = 0.0;
    for (const auto& v : c)
        for (const auto& x : v) peak = std::max(peak, std::abs(x));
    const double mq = max_abs_diff(c[0], c[1]), qf = max_abs_diff(c[1], c[2]), mf = max_abs_diff(c[0], c[2]);
    const double rel = std::max({mq, qf, mf}) / peak;
    report(rel < 0.02, "c4", "markov recovery at cutoff 100",
           fmt("max pairwise |diff| / peak = %.4f (markov/nm-qrt %.4f, nm-qrt/nm-full %.4f; < 0.02)", rel, mq / peak,
               qf / peak));
}

// 5: TCL2 error against the oracle should scale with gamma^2
void criterion5() {
    const auto& cfg = app::find_preset("oracle-sigma-minus").config;
    const auto rep = app::compute_oracle_compare(cfg);
    const double d1 = rep.runs.at(0).deviations.at(0).max_abs, d2 = rep.runs.at(1).deviations.at(0).max_abs;
    std::string nc;
    for (int n : rep.runs[0].fock_cutoffs) nc += std::to_string(n) + " ";
    std::printf("     oracle %s, cutoffs %s, horizon %.2f\n", rep.runs[0].method.c_str(), nc.c_str(),
                rep.runs[0].trusted_horizon);
    const double ratio = d1 / d2;
    report(ratio >= 2.5 && ratio <= 6.0, "c5", "oracle scaling sz:sz gamma 0.02 -> 0.01",
           fmt("max dev %.4e -> %.4e, ratio %.3f (in [2.5, 6])", d1, d2, ratio));
}

struct DephasingRun {
    std::vector<double> t1;
    std::vector<cd> pm, mp;
};

DephasingRun dephasing_oracle(double kT, std::size_t modes, const std::vector<double>& t1) {
    bath::SpectralDensity sd;
    sd.gamma = 0.1;
    sd.cutoff = 5.0;
    const bath::Temperature T{kT};
    const auto m = two_level(kOmegaA, CouplingPreset::sigma_z);
    auto db = bath::discretize(sd, modes, sd.omega_max(), bath::DiscretizationRule::midpoint, 2);
    // Fock tails well below the engine's own error
    constexpr double tail = 1e-10;
    db = oracle::with_thermal_cutoffs(db, T, tail);
    db = oracle::with_displacement_cutoffs(db, m.coupling, T, tail);
    oracle::OracleOptions oo;
    oo.tail_tol = tail;
    const oracle::ExactCorrelator ex(m, db, T, fig1_state(), oo);
    return {t1, ex.two_time(op::sigma_plus(), op::sigma_minus(), kT2, t1),
            ex.two_time(op::sigma_minus(), op::sigma_plus(), kT2, t1)};
}

// 6: pure dephasing; the bound is a Richardson estimate of the oracle's mode
// discretization error (midpoint rule, O(1/N^2)) plus the engine's step error
void criterion6() {
    constexpr double t1_end = 4.0;
    for (double kT : {0.0, 1.0}) {
        const auto m = two_level(kOmegaA, CouplingPreset::sigma_z);
        const auto cf = continuum(0.1, 5.0, kT);
        std::vector<twotime::CorrelationSet> eng;
        for (double h : {0.01, 0.005}) {
            twotime::EngineOptions o;
            o.step = h;
            const twotime::Engine e(m, cf, t1_end, {EvolutionMode::non_markov_full}, o);
            eng.push_back(e.correlate(EvolutionMode::non_markov_full, fig1_state(), kT2, t1_end).correlations);
        }
        // samples every 0.05 on the coarse grid
        std::vector<double> t1;
        std::vector<cd> epm, emp, fine_pm, fine_mp;
        const auto cpm = eng[0].correlator(op::sigma_plus(), op::sigma_minus());
        const auto cmp = eng[0].correlator(op::sigma_minus(), op::sigma_plus());
        const auto fpm = eng[1].correlator(op::sigma_plus(), op::sigma_minus());
        const auto fmp = eng[1].correlator(op::sigma_minus(), op::sigma_plus());
        for (std::size_t i = 0; i < eng[0].t1.size(); i += 5) {
            t1.push_back(eng[0].t1[i]);
            epm.push_back(cpm[i]);
            emp.push_back(cmp[i]);
            fine_pm.push_back(fpm[2 * i]);
            fine_mp.push_back(fmp[2 * i]);
        }
        const auto o200 = dephasing_oracle(kT, 200, t1);
        const auto o400 = dephasing_oracle(kT, 400, t1);
        // error of the N=400 oracle: |O_200 - O_400| / 3
        const double disc = std::max(max_abs_diff(o200.pm, o400.pm), max_abs_diff(o200.mp, o400.mp)) / 3.0;
        const double step = 16.0 / 15.0 * std::max(max_abs_diff(epm, fine_pm), max_abs_diff(emp, fine_mp));
        const double bound = 2.0 * (disc + step);
        const double dev = std::max(max_abs_diff(epm, o400.pm), max_abs_diff(emp, o400.mp));
        std::vector<cd> xpm, xmp;
        for (std::size_t i = 0; i < t1.size(); ++i) {
            xpm.push_back((4.0 * o400.pm[i] - o200.pm[i]) / 3.0);
            xmp.push_back((4.0 * o400.mp[i] - o200.mp[i]) / 3.0);
        }
        const double xdev = std::max(max_abs_diff(epm, xpm), max_abs_diff(emp, xmp));
        report(dev <= bound, "c6", fmt("pure dephasing kT=%g coherence correlators", kT),
               fmt("max|engine - oracle(N=400)| = %.3e, bound %.3e", dev, bound) +
                   fmt(" (discretization %.3e, step %.3e; vs extrapolated oracle %.3e)", disc, step, xdev));
    }
}

// 7: Fig. 1 qualitative features
void criterion7() {
    constexpr double t_max = 40.0;
    const twotime::Engine eng(two_level(kOmegaA, CouplingPreset::sigma_minus), continuum(0.1, 5.0, 1.0), kT2 + t_max,
                              kAllModes);
    const auto grid = spectrum::symmetric_grid(8.0, 1601);
    const double resolution = 2.0 * std::numbers::pi / t_max;
    std::vector<spectrum::Peak> peaks;
    std::vector<std::vector<cd>> zz;
    std::vector<double> tau;
    for (auto m : kAllModes) {
        const auto run = eng.correlate(m, fig1_state(), kT2, kT2 + t_max);
        tau.clear();
        for (double t : run.correlations.t1) tau.push_back(t - kT2);
        tau.front() = 0.0;
        const auto s = spectrum::fourier_spectrum(tau, run.correlations.correlator(op::sigma_plus(), op::sigma_minus()),
                                                  grid, spectrum::Taper::rectangular, spectrum::Input::real_part);
        const auto neg = spectrum::find_peak(s, -8.0, 0.0), pos = spectrum::find_peak(s, 0.0, 8.0);
        const bool ok = neg && pos && std::abs(neg->omega + kOmegaA) <= resolution && std::abs(pos->omega - kOmegaA) <= resolution;
        report(ok, "c7a", "spectrum peaks " + coef::to_string(m),
               neg && pos ? fmt("peaks at %.3f and %.3f (within %.3f of -3 and +3)", neg->omega, pos->omega, resolution)
                          : std::string("peak not found"));
        peaks.push_back(pos ? *pos : spectrum::Peak{});
        zz.push_back(run.correlations.correlator(op::sigma_z(), op::sigma_z()));
    }
    const auto& mk = peaks[0];
    for (std::size_t k : {1u, 2u}) {
        const auto& p = peaks[k];
        const std::string name = coef::to_string(kAllModes[k]);
        report(p.height > mk.height, "c7b", name + " peak higher than markov",
               fmt("height %.4f vs %.4f", p.height, mk.height));
        report(p.fwhm < mk.fwhm, "c7b", name + " peak narrower than markov", fmt("fwhm %.4f vs %.4f", p.fwhm, mk.fwhm));
    }
    const double c0 = std::abs(zz[2].front());
    double late = 0.0, early = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double d = std::abs(zz[1][i].real() - zz[2][i].real()) / c0;
        if (tau[i] > 1.5 && tau[i] <= 10.0 + 1e-12) late = std::max(late, d);
        if (tau[i] < 1.0) early = std::max(early, d);
    }
    report(late < 0.01, "c7c", "Re<sz sz> nm-qrt vs nm-full for t > 1.5",
           fmt("max |diff| / |C(t2,t2)| = %.5f on (1.5, 10] (< 0.01)", late));
    report(early > 0.05, "c7c", "Re<sz sz> nm-qrt vs nm-full for t < 1",
           fmt("max |diff| / |C(t2,t2)| = %.5f on [0, 1) (> 0.05)", early));
}

double halving_order(const std::function<cd(double)>& f) {
    const cd a = f(0.1), b = f(0.05), c = f(0.025);
    return std::log2(std::abs(a - b) / std::abs(b - c));
}

// 8: structural identities
void criterion8() {
    const auto b = continuum(0.1, 5.0, 1.0);
    double tr = 0.0, herm = 0.0;
    for (auto c : {CouplingPreset::sigma_minus, CouplingPreset::sigma_x, CouplingPreset::sigma_z}) {
        const twotime::Engine e(two_level(kOmegaA, c), b, 11.0, {EvolutionMode::non_markov_full});
        const auto traj = e.single_time(EvolutionMode::non_markov_full, fig1_state(), 11.0);
        tr = std::max(tr, traj.stats.max_trace_error);
        herm = std::max(herm, traj.stats.max_hermiticity_error);
    }
    report(tr < 1e-12 && herm < 1e-12, "c8", "trace and hermiticity preservation",
           fmt("max trace error %.2e, max hermiticity error %.2e (< 1e-12)", tr, herm));

    const twotime::Engine eng(two_level(kOmegaA, CouplingPreset::sigma_minus), b, 11.0, kAllModes);
    const auto& table = *eng.table();
    const auto& ks = eng.kernels(EvolutionMode::non_markov_full);
    double bd = 0.0;
    for (double t2 : {0.0, 0.5, 1.0, 2.5, 7.3}) {
        bd = std::max(bd, std::abs(coef::gamma3(table, kOmegaA, t2, t2) - ks.rate_alpha(0, t2)));
        bd = std::max(bd, std::abs(coef::gamma4(table, kOmegaA, t2, t2) - ks.rate_beta(0, t2)));
    }
    report(bd < 1e-12, "c8", "Gamma3(t2,t2) = Gamma1(t2), Gamma4(t2,t2) = Gamma2(t2)", fmt("max |diff| = %.2e (< 1e-12)", bd));

    double path = 0.0, anchor = 0.0;
    for (auto m : kAllModes) {
        const auto g = eng.correlate(m, fig1_state(), kT2, 11.0);
        const auto s = eng.correlate_spin_boson(m, fig1_state(), kT2, 11.0);
        const auto& rho = g.single_time.states.back();
        for (auto p : twotime::all_spin_pairs) {
            const auto [A, B] = twotime::spin_pair_operators(p);
            const auto c = g.correlations.correlator(A, B);
            path = std::max(path, max_abs_diff(c, s.correlations[p]));
            anchor = std::max(anchor, std::abs(c.front() - (A * B * rho).trace()));
            anchor = std::max(anchor, std::abs(s.correlations[p].front() - (A * B * rho).trace()));
        }
    }
    report(path < 1e-8, "c8", "general path vs spin-boson path",
           fmt("max |diff| = %.2e over 9 correlators, 3 modes (< 1e-8)", path));
    report(anchor < 1e-12, "c8", "t1 = t2 anchors", fmt("max |C(t2,t2) - Tr[A B rho(t2)]| = %.2e (< 1e-12)", anchor));

    const auto m = two_level(kOmegaA, CouplingPreset::sigma_minus);
    auto engine_at = [&](double h) {
        twotime::EngineOptions o;
        o.step = h;
        return twotime::Engine(m, b, 3.0, {EvolutionMode::non_markov_full}, o);
    };
    const double single = halving_order([&](double h) {
        return engine_at(h).single_time(EvolutionMode::non_markov_full, fig1_state(), 2.0).states.back()(0, 1);
    });
    const double two = halving_order([&](double h) {
        const auto r = engine_at(h).correlate(EvolutionMode::non_markov_full, fig1_state(), kT2, 3.0);
        return r.correlations.correlator(op::sigma_z(), op::sigma_z()).back();
    });
    report(std::abs(single - 4.0) < 0.5 && std::abs(two - 4.0) < 0.5, "c8", "step-halving convergence order",
           fmt("single-time %.2f, two-time %.2f (4 +- 0.5)", single, two));
}

struct Criterion {
    const char* name;
    double budget;
    void (*run)();
};

const Criterion kCriteria[] = {
    {"case-1 qrt identity", 10, criterion1},       {"zero-temperature reduction", 5, criterion2},
    {"hermitian coupling / alpha_eff", 30, criterion3}, {"markov recovery", 60, criterion4},
    {"oracle second-order scaling", 600, criterion5}, {"pure-dephasing exactness", 600, criterion6},
    {"fig. 1 qualitative suite", 120, criterion7},  {"structural invariants", 120, criterion8},
};

void run_one(int i) {
    const auto& c = kCriteria[i - 1];
    std::printf("---- c%d %s\n", i, c.name);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        c.run();
    } catch (const std::exception& e) {
        report(false, "c" + std::to_string(i), "threw", e.what());
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(s < c.budget, "c" + std::to_string(i), "runtime", fmt("%.1f s (budget %.0f s)", s, c.budget));
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) {
        const int i = std::atoi(argv[1]);
        if (i < 1 || i > 8) {
            std::fprintf(stderr, "usage: %s [1..8]\n", argv[0]);
            return 2;
        }
        run_one(i);
    } else {
        for (int i = 1; i <= 8; ++i) run_one(i);
    }
    return failures == 0 ? 0 : 1;
}
