// model.cpp - system model construction and density-matrix validation
#include "nmqrt/model.hpp"

#include <cmath>

#include "nmqrt/errors.hpp"

namespace nmqrt {

std::string to_string(CouplingPreset c) {
    switch (c) {
    case CouplingPreset::sigma_minus: return "sigma_minus";
    case CouplingPreset::sigma_z: return "sigma_z";
    case CouplingPreset::sigma_x: return "sigma_x";
    }
    return "unknown";
}

CouplingPreset coupling_from_string(const std::string& s) {
    if (s == "sigma_minus") return CouplingPreset::sigma_minus;
    if (s == "sigma_z") return CouplingPreset::sigma_z;
    if (s == "sigma_x") return CouplingPreset::sigma_x;
    throw InvalidInput("unknown coupling preset '" + s + "'");
}

op::Operator coupling_matrix(CouplingPreset c) {
    switch (c) {
    case CouplingPreset::sigma_minus: return op::sigma_minus();
    case CouplingPreset::sigma_z: return op::sigma_z();
    case CouplingPreset::sigma_x: return op::sigma_x();
    }
    throw InvalidInput("coupling preset");
}

void SystemModel::validate() const {
    op::require_square(hamiltonian, "hamiltonian");
    op::require_square(coupling, "coupling");
    if (coupling.rows() != hamiltonian.rows())
        throw InvalidInput("coupling operator and Hamiltonian differ in dimension");
    if (!op::is_hermitian(hamiltonian, 1e-12)) throw InvalidInput("hamiltonian is not Hermitian");
}

SystemModel two_level(double omega_a, CouplingPreset coupling) {
    if (!std::isfinite(omega_a)) throw InvalidInput("omega_a must be finite");
    return {0.5 * omega_a * op::sigma_z(), coupling_matrix(coupling)};
}

StateChecks inspect_state(const op::Operator& rho) {
    StateChecks c{};
    c.trace_error = std::abs(rho.trace() - 1.0);
    c.hermiticity_error = op::max_abs(rho - rho.adjoint());
    Eigen::SelfAdjointEigenSolver<op::Operator> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    return c;
}

DensityMatrix::DensityMatrix(op::Operator rho, double tol) : rho_(std::move(rho)) {
    op::require_square(rho_, "density matrix");
    auto c = inspect_state(rho_);
    if (c.hermiticity_error > tol) throw InvalidInput("density matrix is not Hermitian");
    if (c.trace_error > tol) throw InvalidInput("density matrix trace differs from 1");
    if (c.min_eigenvalue < -1e-8) throw InvalidInput("density matrix has negative eigenvalues");
}

DensityMatrix DensityMatrix::pure(const op::State& psi) {
    if (psi.size() < 1) throw InvalidInput("pure state: empty vector");
    double n = psi.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("pure state: zero or non-finite norm");
    op::State v = psi / n;
    return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index d) {
    return DensityMatrix(op::identity(d) / static_cast<double>(d));
}

double DensityMatrix::min_eigenvalue() const { return inspect_state(rho_).min_eigenvalue; }

} // namespace nmqrt
