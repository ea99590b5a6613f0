#include <benchmark/benchmark.h>

#include "nmqrt/oracle.hpp"
#include "nmqrt/two_time.hpp"

using namespace nmqrt;
using coef::EvolutionMode;

namespace {

std::shared_ptr<bath::ContinuumBath> fig1_bath(double cutoff = 5.0) {
    bath::SpectralDensity sd;
    sd.cutoff = cutoff;
    return std::make_shared<bath::ContinuumBath>(sd, bath::Temperature{1.0});
}

DensityMatrix fig1_state() {
    op::State psi(2);
    psi << std::sqrt(3.0) / 2.0, 0.5;
    return DensityMatrix::pure(psi);
}

void BM_Tabulate(benchmark::State& st) {
    const auto b = fig1_bath(static_cast<double>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(bath::tabulate(*b, 11.0, 0.0025));
}
BENCHMARK(BM_Tabulate)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_CorrelateGeneral(benchmark::State& st) {
    const auto mode = static_cast<EvolutionMode>(st.range(0));
    const twotime::Engine eng(two_level(3.0, CouplingPreset::sigma_minus), fig1_bath(), 11.0, {mode});
    for (auto _ : st) benchmark::DoNotOptimize(eng.correlate(mode, fig1_state(), 1.0, 11.0));
}
BENCHMARK(BM_CorrelateGeneral)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_CorrelateSpinBoson(benchmark::State& st) {
    const twotime::Engine eng(two_level(3.0, CouplingPreset::sigma_minus), fig1_bath(), 11.0,
                              {EvolutionMode::non_markov_full});
    for (auto _ : st) benchmark::DoNotOptimize(eng.correlate_spin_boson(EvolutionMode::non_markov_full, fig1_state(), 1.0, 11.0));
}
BENCHMARK(BM_CorrelateSpinBoson)->Unit(benchmark::kMillisecond);

void BM_OracleSubspace(benchmark::State& st) {
    bath::SpectralDensity sd;
    sd.gamma = 0.02;
    auto db = bath::discretize(sd, static_cast<std::size_t>(st.range(0)), sd.omega_max(), bath::DiscretizationRule::midpoint, 4);
    db = oracle::with_thermal_cutoffs(db, bath::Temperature{1.0});
    const std::vector<double> t1{1.0, 2.0, 3.0, 4.0};
    for (auto _ : st) {
        const oracle::ExactCorrelator ex(two_level(3.0, CouplingPreset::sigma_minus), db, bath::Temperature{1.0}, fig1_state());
        benchmark::DoNotOptimize(ex.two_time(op::sigma_z(), op::sigma_z(), 1.0, t1));
    }
}
BENCHMARK(BM_OracleSubspace)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

} // namespace

// the packaged benchmark_main archive carries LTO bytecode from another compiler build
BENCHMARK_MAIN();
