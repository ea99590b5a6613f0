// tcl2.cpp - TCL2 generator and RK4 propagation of the reduced state
#include "nmqrt/tcl2.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nmqrt/errors.hpp"

namespace nmqrt::tcl2 {

double default_step(const std::vector<double>& bohr_frequencies, double bath_frequency_scale) {
    double w = bath_frequency_scale;
    for (double x : bohr_frequencies) w = std::max(w, std::abs(x));
    if (!(w > 0.0)) return 0.01;
    return std::min(0.01, 1.0 / (20.0 * w));
}

Generator::Generator(const SystemModel& model, EigenoperatorDecomposition dec)
    : model_(model), dec_(std::move(dec)) {
    model_.validate();
    Ldag_ = model_.coupling.adjoint();
}

Operator Generator::apply(const std::vector<cd>& ga, const std::vector<cd>& gb, const Operator& X) const {
    const Eigen::Index d = model_.dim();
    const Operator& H = model_.hamiltonian;
    const Operator& L = model_.coupling;
    Operator A = Operator::Zero(d, d), B = Operator::Zero(d, d);
    for (std::size_t k = 0; k < dec_.size(); ++k) {
        A += ga[k] * dec_[k].component;
        B += gb[k] * dec_[k].component.adjoint();
    }
    const Operator Ad = A.adjoint(), Bd = B.adjoint();
    Operator out = -I * (H * X - X * H);
    out -= Ldag_ * A * X - A * X * Ldag_ + X * Ad * L - L * X * Ad;
    out -= L * B * X - B * X * L + X * Bd * Ldag_ - Ldag_ * X * Bd;
    return out;
}

Eigen::MatrixXcd Generator::superoperator(const std::vector<cd>& ga, const std::vector<cd>& gb) const {
    const Eigen::Index d = model_.dim();
    const Operator& H = model_.hamiltonian;
    const Operator& L = model_.coupling;
    const Operator Id = Operator::Identity(d, d);
    Operator A = Operator::Zero(d, d), B = Operator::Zero(d, d);
    for (std::size_t k = 0; k < dec_.size(); ++k) {
        A += ga[k] * dec_[k].component;
        B += gb[k] * dec_[k].component.adjoint();
    }
    const Operator Ad = A.adjoint(), Bd = B.adjoint();
    using op::kron;
    // vec(P X Q) = (Q^T kron P) vec(X)
    Eigen::MatrixXcd S = -I * (kron(Id, H) - kron(H.transpose(), Id));
    S -= kron(Id, Ldag_ * A) - kron(Ldag_.transpose(), A) + kron((Ad * L).transpose(), Id) -
         kron(Ad.transpose(), L);
    S -= kron(Id, L * B) - kron(L.transpose(), B) + kron((Bd * Ldag_).transpose(), Id) -
         kron(Bd.transpose(), Ldag_);
    return S;
}

const Operator& Trajectory::at_time(double t) const {
    if (times.empty()) throw InvalidInput("trajectory is empty");
    const double h = stats.step;
    const double r = std::round(t / h);
    if (r < 0 || std::abs(t - r * h) > 1e-9 * std::max(1.0, t) || static_cast<std::size_t>(r) >= states.size())
        throw InvalidInput("trajectory has no node at t=" + std::to_string(t));
    return states[static_cast<std::size_t>(r)];
}

namespace {

std::size_t steps_for(double t_end, double h) {
    if (t_end < 0.0) throw InvalidInput("propagation end time must be >= 0");
    const double r = std::round(t_end / h);
    if (std::abs(t_end - r * h) > 1e-9 * std::max(1.0, t_end))
        throw InvalidInput("end time " + std::to_string(t_end) + " is not a multiple of the step " + std::to_string(h));
    return static_cast<std::size_t>(r);
}

void check_range(const KernelSet& kernels, double t_end) {
    if (t_end > kernels.t_max() * (1.0 + 1e-12) + 1e-12)
        throw InvalidInput("propagation to t=" + std::to_string(t_end) + " exceeds tabulated bath range " +
                           std::to_string(kernels.t_max()));
}

} // namespace

Trajectory propagate_density(const Generator& gen, const KernelSet& kernels, const DensityMatrix& rho0,
                             double t_end) {
    if (rho0.dim() != gen.model().dim()) throw InvalidInput("initial state dimension mismatch");
    if (kernels.size() != gen.decomposition().size())
        throw InvalidInput("kernel set does not match the eigenoperator decomposition");
    check_range(kernels, t_end);
    const double h = 2.0 * kernels.node_step();
    const std::size_t n = steps_for(t_end, h);
    const std::size_t K = kernels.size();

    Trajectory tr;
    tr.stats.step = h;
    tr.times.reserve(n + 1);
    tr.states.reserve(n + 1);
    Operator rho = rho0.matrix();
    std::vector<cd> ga(K), gb(K);
    auto rates = [&](std::size_t m) {
        for (std::size_t k = 0; k < K; ++k) {
            ga[k] = kernels.rate_alpha_node(k, m);
            gb[k] = kernels.rate_beta_node(k, m);
        }
    };
    auto record = [&](double t, const Operator& r) {
        tr.times.push_back(t);
        tr.states.push_back(r);
        auto c = inspect_state(r);
        tr.stats.max_trace_error = std::max(tr.stats.max_trace_error, c.trace_error);
        tr.stats.max_hermiticity_error = std::max(tr.stats.max_hermiticity_error, c.hermiticity_error);
        tr.stats.min_eigenvalue = std::min(tr.stats.min_eigenvalue, c.min_eigenvalue);
        if (c.min_eigenvalue < -1e-8) tr.stats.negativity_beyond_tolerance = true;
    };
    record(0.0, rho);
    for (std::size_t s = 0; s < n; ++s) {
        rates(2 * s);
        const Operator k1 = gen.apply(ga, gb, rho);
        rates(2 * s + 1);
        const Operator k2 = gen.apply(ga, gb, rho + 0.5 * h * k1);
        const Operator k3 = gen.apply(ga, gb, rho + 0.5 * h * k2);
        rates(2 * s + 2);
        const Operator k4 = gen.apply(ga, gb, rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t = h * static_cast<double>(s + 1);
        if (!rho.allFinite())
            throw NumericalFailure("density propagation produced non-finite values at t=" + std::to_string(t));
        tr.stats.max_error_indicator = std::max(tr.stats.max_error_indicator, h * op::max_abs(k2 - k3));
        ++tr.stats.steps;
        record(t, rho);
    }
    return tr;
}

std::vector<cd> single_time_expectation(const Operator& A, const Trajectory& traj) {
    std::vector<cd> out;
    out.reserve(traj.states.size());
    for (const auto& r : traj.states) {
        if (r.rows() != A.rows() || A.rows() != A.cols())
            throw InvalidInput("single_time_expectation: dimension mismatch");
        out.push_back((A * r).trace());
    }
    return out;
}

SpinBosonSeries spin_boson_single_time(cd sp0, cd sm0, cd sz0, const KernelSet& kernels, double omega_a,
                                       double t_end) {
    if (kernels.size() != 1 || std::abs(kernels.omega(0) - omega_a) > 1e-9 * std::max(1.0, std::abs(omega_a)))
        throw InvalidInput("spin-boson path needs kernels for the single frequency omega_a");
    check_range(kernels, t_end);
    const double h = 2.0 * kernels.node_step();
    const std::size_t n = steps_for(t_end, h);
    using V = Eigen::Vector3cd;
    auto rhs = [&](const V& x, std::size_t m) {
        const cd g1 = kernels.rate_alpha_node(0, m), g2 = kernels.rate_beta_node(0, m);
        V d;
        d(0) = I * omega_a * x(0) - (std::conj(g1) + g2) * x(0);
        d(1) = -I * omega_a * x(1) - (g1 + std::conj(g2)) * x(1);
        d(2) = -2.0 * (g1 + g2).real() * x(2) - 2.0 * (g1 - g2).real();
        return d;
    };
    SpinBosonSeries out;
    V x(sp0, sm0, sz0);
    auto push = [&](double t) {
        out.times.push_back(t);
        out.sigma_plus.push_back(x(0));
        out.sigma_minus.push_back(x(1));
        out.sigma_z.push_back(x(2));
    };
    push(0.0);
    for (std::size_t s = 0; s < n; ++s) {
        const V k1 = rhs(x, 2 * s);
        const V k2 = rhs(x + 0.5 * h * k1, 2 * s + 1);
        const V k3 = rhs(x + 0.5 * h * k2, 2 * s + 1);
        const V k4 = rhs(x + h * k3, 2 * s + 2);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite()) throw NumericalFailure("spin-boson single-time integration diverged");
        push(h * static_cast<double>(s + 1));
    }
    return out;
}

} // namespace nmqrt::tcl2
