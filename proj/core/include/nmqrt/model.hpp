// model.hpp - system Hamiltonian, coupling operator and reduced states
#pragma once

#include <string>

#include "nmqrt/operator_algebra.hpp"

namespace nmqrt {

enum class CouplingPreset { sigma_minus, sigma_z, sigma_x };

std::string to_string(CouplingPreset c);
CouplingPreset coupling_from_string(const std::string& s);

struct SystemModel {
    op::Operator hamiltonian;
    op::Operator coupling;   // L, need not be Hermitian

    Eigen::Index dim() const { return hamiltonian.rows(); }
    void validate() const;   // throws InvalidInput
};

// H = (omega_a/2) sigma_z with the chosen coupling
SystemModel two_level(double omega_a, CouplingPreset coupling);
op::Operator coupling_matrix(CouplingPreset c);

class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(op::Operator rho, double tol = 1e-10);
    static DensityMatrix pure(const op::State& psi);
    static DensityMatrix maximally_mixed(Eigen::Index d);

    const op::Operator& matrix() const { return rho_; }
    Eigen::Index dim() const { return rho_.rows(); }
    double min_eigenvalue() const;

private:
    op::Operator rho_;
};

struct StateChecks {
    double trace_error;
    double hermiticity_error;
    double min_eigenvalue;
};
StateChecks inspect_state(const op::Operator& rho);

} // namespace nmqrt
