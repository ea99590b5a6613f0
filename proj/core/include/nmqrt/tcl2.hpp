// tcl2.hpp - second-order time-convolutionless master equation, single-time dynamics
#pragma once

#include <vector>

#include "nmqrt/coefficients.hpp"
#include "nmqrt/model.hpp"

namespace nmqrt::tcl2 {

using coef::KernelSet;
using op::EigenoperatorDecomposition;
using op::Operator;

// h = min(0.01, 1 / (20 max(|w_k|, bath scale)))
double default_step(const std::vector<double>& bohr_frequencies, double bath_frequency_scale);

// Generator of the TCL2 master equation for one eigenoperator decomposition.
//   L[X] = -i[H,X] - (L^dag A X - A X L^dag + X A^dag L - L X A^dag
//                     + L B X - B X L + X B^dag L^dag - L^dag X B^dag)
// with A = sum_k G_alpha(w_k,t) L_k, B = sum_k G_beta(-w_k,t) L_k^dag.
class Generator {
public:
    Generator(const SystemModel& model, EigenoperatorDecomposition dec);

    const SystemModel& model() const { return model_; }
    const EigenoperatorDecomposition& decomposition() const { return dec_; }

    // apply with explicit rate values per component
    Operator apply(const std::vector<cd>& ga, const std::vector<cd>& gb, const Operator& X) const;
    // superoperator matrix acting on column-major vec(X)
    Eigen::MatrixXcd superoperator(const std::vector<cd>& ga, const std::vector<cd>& gb) const;

private:
    SystemModel model_;
    EigenoperatorDecomposition dec_;
    Operator Ldag_;
};

struct IntegratorStats {
    std::size_t steps = 0;
    double step = 0.0;
    double max_error_indicator = 0.0;  // h * max ||k2 - k3|| over steps
    double max_trace_error = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 1.0;
    bool negativity_beyond_tolerance = false;  // min eigenvalue below -1e-8
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Operator> states;
    IntegratorStats stats;

    const Operator& at_time(double t) const;
};

// RK4 with step 2*kernels.node_step(); t_end must be a multiple of the step.
Trajectory propagate_density(const Generator& gen, const KernelSet& kernels, const DensityMatrix& rho0,
                             double t_end);

std::vector<cd> single_time_expectation(const Operator& A, const Trajectory& traj);

struct SpinBosonSeries {
    std::vector<double> times;
    std::vector<cd> sigma_plus, sigma_minus, sigma_z;
};

// Scalar equations for L = sigma_-, H = (w_A/2) sigma_z; kernels must hold the single
// frequency w_A. Initial data are <sigma_+>, <sigma_->, <sigma_z> at t = 0.
SpinBosonSeries spin_boson_single_time(cd sp0, cd sm0, cd sz0, const KernelSet& kernels, double omega_a,
                                       double t_end);

} // namespace nmqrt::tcl2
