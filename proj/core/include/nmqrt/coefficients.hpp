// coefficients.hpp - decay rates G(w,t), memory kernels K(w;t1,t2), Markovian limits
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nmqrt/bath.hpp"

namespace nmqrt::coef {

using bath::Channel;
using bath::CorrelationTable;

// Which tabulated function a kernel integrates.
enum class Source { alpha, beta };

// G(w,t) = int_0^t ds f(s) exp(i w s), cumulative Simpson over the table.
// Nodes sit at every second table node, so node spacing is 2*table.step().
class GammaTable {
public:
    GammaTable(std::shared_ptr<const CorrelationTable> table, Source src, double omega);

    double step() const { return step_; }
    std::size_t nodes() const { return values_.size(); }
    double t_max() const { return step_ * static_cast<double>(values_.size() - 1); }
    double omega() const { return omega_; }
    const cd& node(std::size_t m) const { return values_[m]; }
    cd operator()(double t) const;

private:
    std::shared_ptr<const CorrelationTable> table_;
    Source src_;
    double omega_;
    double step_;
    std::vector<cd> values_;
};

// Spin-boson naming: gamma1 = G_alpha(+w_A), gamma2 = G_beta(-w_A).
struct SpinBosonGammas {
    GammaTable gamma1;
    GammaTable gamma2;
};
SpinBosonGammas spin_boson_gammas(std::shared_ptr<const CorrelationTable> table, double omega_a);

// K(w; t1, t2) = int_0^t2 du f(t1 - t2 + u) exp(i w u)
//             = int_0^t2 dtau f(t1 - tau) exp(i w (t2 - tau))
cd generalized_gamma(const CorrelationTable& table, Source src, double omega, double t1, double t2);
inline cd gamma3(const CorrelationTable& t, double omega_a, double t1, double t2) {
    return generalized_gamma(t, Source::alpha, omega_a, t1, t2);
}
inline cd gamma4(const CorrelationTable& t, double omega_a, double t1, double t2) {
    return generalized_gamma(t, Source::beta, -omega_a, t1, t2);
}

// Kernels for fixed t2 with precomputed Simpson-phase weights; evaluation at
// t1 - t2 on the table grid is a dot product, off-grid falls back to interpolation.
class MemoryKernelEvaluator {
public:
    MemoryKernelEvaluator(std::shared_ptr<const CorrelationTable> table, std::vector<double> alpha_omegas,
                          std::vector<double> beta_omegas, double t2);

    double t2() const { return t2_; }
    std::size_t alpha_size() const { return a_w_.size(); }
    std::size_t beta_size() const { return b_w_.size(); }
    cd alpha_kernel(std::size_t k, double t1) const;
    cd beta_kernel(std::size_t k, double t1) const;

private:
    cd eval(const std::vector<cd>& weights, const std::vector<cd>& f, Source src, double omega, double t1) const;

    std::shared_ptr<const CorrelationTable> table_;
    std::vector<double> a_omegas_, b_omegas_;
    double t2_;
    bool on_grid_;
    std::size_t m2_ = 0;
    std::vector<std::vector<cd>> a_w_, b_w_;
};

// G_c(w, infinity) for a continuum channel, using Sokhotski-Plemelj with a
// subtracted principal value. Throws NumericalFailure when w = 0 and the
// channel's sine weight does not vanish at v = 0 (log-divergent shift).
cd markov_limit(const bath::ContinuumBath& bath, Channel c, double omega);

struct MarkovLimits {
    cd gamma1;
    cd gamma2;
};
MarkovLimits markovian_limits(const bath::ContinuumBath& bath, double omega_a);

struct PlateauReport {
    bool reached = false;
    double change = 0.0;       // |G(t_max) - G(0.9 t_max)|
    double tolerance = 0.0;
    std::vector<double> times; // trend samples
    std::vector<cd> values;
};
PlateauReport plateau_check(const GammaTable& g, double plateau_tol = 1e-8);

enum class EvolutionMode { markov_qrt, non_markov_qrt, non_markov_full };
std::string to_string(EvolutionMode m);
EvolutionMode mode_from_string(const std::string& s);

// Rates and memory kernels for every eigenoperator component L_k:
//   rate_alpha(k,t) = G_alpha(w_k, t), rate_beta(k,t) = G_beta(-w_k, t),
//   memory kernels K_alpha(w_k), K_beta(-w_k); mode decides what is frozen or dropped.
class KernelSet {
public:
    KernelSet(std::shared_ptr<const CorrelationTable> table, std::vector<double> omegas, EvolutionMode mode,
              std::vector<MarkovLimits> markov = {});

    EvolutionMode mode() const { return mode_; }
    std::size_t size() const { return omegas_.size(); }
    double omega(std::size_t k) const { return omegas_[k]; }
    const std::vector<double>& omegas() const { return omegas_; }
    const CorrelationTable& table() const { return *table_; }
    std::shared_ptr<const CorrelationTable> table_ptr() const { return table_; }
    double t_max() const;

    cd rate_alpha(std::size_t k, double t) const;
    cd rate_beta(std::size_t k, double t) const;
    // rates on the Gamma-node grid (spacing 2*table step); markov mode returns frozen values
    cd rate_alpha_node(std::size_t k, std::size_t m) const;
    cd rate_beta_node(std::size_t k, std::size_t m) const;
    double node_step() const { return 2.0 * table_->step(); }
    bool has_memory() const { return mode_ == EvolutionMode::non_markov_full; }
    MemoryKernelEvaluator memory(double t2) const;
    const std::vector<MarkovLimits>& markov() const { return markov_; }

private:
    std::shared_ptr<const CorrelationTable> table_;
    std::vector<double> omegas_;
    EvolutionMode mode_;
    std::vector<GammaTable> g_alpha_, g_beta_;
    std::vector<MarkovLimits> markov_;
};

// Builds rates for `omegas`; markov mode requires a ContinuumBath. When
// hermitian_coupling is set, zero-frequency Markov limits use alpha_eff
// (only alpha+beta enters the generator there).
KernelSet build_kernels(const bath::CorrelationFunction& cf, std::shared_ptr<const CorrelationTable> table,
                        std::vector<double> omegas, EvolutionMode mode, bool hermitian_coupling = false);

} // namespace nmqrt::coef
