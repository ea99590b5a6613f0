// operator_algebra.hpp - dense operators on finite-dimensional Hilbert spaces
#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nmqrt {

using cd = std::complex<double>;
inline constexpr cd I{0.0, 1.0};

namespace op {

using Operator = Eigen::MatrixXcd;
using State = Eigen::VectorXcd;

// Two-level basis ordering: index 0 = |e>, index 1 = |g>, so sigma_z = diag(+1,-1).
Operator identity(Eigen::Index d);
Operator sigma_plus();
Operator sigma_minus();
Operator sigma_x();
Operator sigma_y();
Operator sigma_z();
Operator annihilation(Eigen::Index levels);
Operator creation(Eigen::Index levels);

void require_square(const Operator& a, const char* name);
bool is_hermitian(const Operator& a, double tol = 1e-12);
bool is_normal(const Operator& a, double tol = 1e-12);

Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);
Operator dagger(const Operator& a);

struct HermitianEigen {
    Eigen::VectorXd energies;   // ascending
    Eigen::MatrixXcd vectors;   // columns are eigenvectors
};
HermitianEigen diagonalize(const Operator& h, double herm_tol = 1e-12);

// exp(i H t) L exp(-i H t)
Operator interaction_picture(const Operator& L, const Operator& H, double t);

// exp(-i H t) for Hermitian H
Operator propagator(const Operator& H, double t);

struct EigenoperatorTerm {
    double frequency;       // [H, L_k] = -frequency * L_k
    Operator component;
};

class EigenoperatorDecomposition {
public:
    EigenoperatorDecomposition() = default;
    explicit EigenoperatorDecomposition(std::vector<EigenoperatorTerm> terms);

    const std::vector<EigenoperatorTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    const EigenoperatorTerm& operator[](std::size_t k) const { return terms_[k]; }

    Operator reassemble() const;
    // sum_k exp(-i w_k s) L_k; equals interaction_picture(L, H, s)
    Operator evaluate(double s) const;
    std::vector<double> frequencies() const;

private:
    std::vector<EigenoperatorTerm> terms_;
};

EigenoperatorDecomposition eigenoperator_decompose(const Operator& L, const Operator& H,
                                                   double degeneracy_tol = 1e-9);

Operator tensor_embed(const std::vector<Operator>& ops);
Operator kron(const Operator& a, const Operator& b);

double max_abs(const Operator& a);

} // namespace op
} // namespace nmqrt
