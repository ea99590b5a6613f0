// two_time.hpp - two-time correlators <A(t1) B(t2)>, t1 >= t2, for all evolution modes
#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "nmqrt/tcl2.hpp"

namespace nmqrt::twotime {

using coef::EvolutionMode;
using op::Operator;

class OperatorBasis {
public:
    // E_{ab} = |a><b| in the eigenbasis of H, index a*d + b
    static OperatorBasis matrix_units(const Operator& H);
    static OperatorBasis from_elements(std::vector<Operator> elems);

    std::size_t size() const { return elems_.size(); }
    Eigen::Index dim() const { return d_; }
    const Operator& element(std::size_t i) const { return elems_[i]; }
    Eigen::VectorXcd coordinates(const Operator& X) const;
    Operator compose(const Eigen::VectorXcd& c) const;

private:
    Eigen::Index d_ = 0;
    std::vector<Operator> elems_;
    Eigen::MatrixXcd inv_;   // maps vec(X) to coordinates
};

Eigen::MatrixXcd initial_conditions(const Operator& rho_t2, const OperatorBasis& basis);

struct CorrelationSet {
    OperatorBasis basis;
    double t2 = 0.0;
    std::vector<double> t1;
    std::vector<Eigen::MatrixXcd> values;   // C_ij(t1) = <E_i(t1) E_j(t2)>
    EvolutionMode mode = EvolutionMode::non_markov_full;

    std::vector<cd> correlator(const Operator& A, const Operator& B) const;
};

// Full basis evolution; rho_t2 is the reduced state at t2 from the same mode's
// single-time propagation. t2 and t1_end - t2 must lie on the kernel grids.
CorrelationSet evolve_general(const tcl2::Generator& gen, const coef::KernelSet& kernels, const Operator& rho_t2,
                              double t2, double t1_end);

enum class SpinPair { pp, mm, mz, zm, pz, zp, zz, mp, pm };
inline constexpr std::array<SpinPair, 9> all_spin_pairs{SpinPair::pp, SpinPair::mm, SpinPair::mz,
                                                        SpinPair::zm, SpinPair::pz, SpinPair::zp,
                                                        SpinPair::zz, SpinPair::mp, SpinPair::pm};
std::string to_string(SpinPair p);       // e.g. "sp_sm" for <sigma_+ sigma_->
std::pair<Operator, Operator> spin_pair_operators(SpinPair p);

struct SpinBosonCorrelators {
    double t2 = 0.0;
    std::vector<double> t1;
    std::array<std::vector<cd>, 9> series;   // indexed by SpinPair
    EvolutionMode mode = EvolutionMode::non_markov_full;

    const std::vector<cd>& operator[](SpinPair p) const { return series[static_cast<std::size_t>(p)]; }
};

// Closed scalar systems for L = sigma_-, H = (w_A/2) sigma_z.
SpinBosonCorrelators evolve_spin_boson(const coef::KernelSet& kernels, double omega_a, const Operator& rho_t2,
                                       double t2, double t1_end);

struct QrtReport {
    bool condition_i = false;    // [L^dag, A] = 0 or [B, L_k] = 0 for all k
    bool condition_ii = false;   // [L, A] = 0 or [B, L_k^dag] = 0 for all k (trivially true at T = 0)
    bool markovian_bath = false;
    bool qrt_predicted = false;
    // A passes but an operator reachable from A under the QRT-form generator does not
    bool coupled_violation = false;
    std::size_t reachable_dim = 0;
    std::string summary() const;
};

QrtReport qrt_condition_report(const SystemModel& model, const op::EigenoperatorDecomposition& dec,
                               const Operator& A, const Operator& B, bool finite_temperature,
                               bool markovian_bath = false);

struct EngineOptions {
    double step = 0.0;          // 0 selects the default rule
    double quad_rel_tol = 1e-10;
    double degeneracy_tol = 1e-9;
};

struct CorrelationRun {
    tcl2::Trajectory single_time;   // 0 .. t2
    CorrelationSet correlations;
};

struct SpinBosonRun {
    tcl2::SpinBosonSeries single_time;
    SpinBosonCorrelators correlations;
};

// Shared setup for one model and bath: decomposition, step, tabulated bath and
// one kernel set per requested mode. Immutable after construction.
class Engine {
public:
    Engine(SystemModel model, std::shared_ptr<const bath::CorrelationFunction> cf, double t_max,
           std::vector<EvolutionMode> modes, EngineOptions opt = {});

    double step() const { return step_; }
    const tcl2::Generator& generator() const { return *gen_; }
    const SystemModel& model() const { return gen_->model(); }
    std::shared_ptr<const bath::CorrelationTable> table() const { return table_; }
    const coef::KernelSet& kernels(EvolutionMode m) const;
    bool has_mode(EvolutionMode m) const;

    tcl2::Trajectory single_time(EvolutionMode m, const DensityMatrix& rho0, double t_end) const;
    CorrelationRun correlate(EvolutionMode m, const DensityMatrix& rho0, double t2, double t1_end) const;
    // requires H = (w_A/2) sigma_z, L = sigma_-
    SpinBosonRun correlate_spin_boson(EvolutionMode m, const DensityMatrix& rho0, double t2, double t1_end) const;

private:
    std::unique_ptr<tcl2::Generator> gen_;
    std::shared_ptr<const bath::CorrelationFunction> cf_;
    std::shared_ptr<const bath::CorrelationTable> table_;
    double step_ = 0.0;
    std::vector<std::pair<EvolutionMode, std::unique_ptr<coef::KernelSet>>> kernels_;
};

} // namespace nmqrt::twotime
