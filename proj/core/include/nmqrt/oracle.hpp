// oracle.hpp - exact dynamics of system plus discretized, Fock-truncated bosonic bath
#pragma once

#include <memory>
#include <vector>

#include "nmqrt/bath.hpp"
#include "nmqrt/model.hpp"

namespace nmqrt::oracle {

using op::Operator;

inline constexpr long long kDimensionBound = 10000;

// d * prod(n_c) with overflow guard (returns -1 past 2^62)
long long composite_dimension(Eigen::Index system_dim, const std::vector<int>& cutoffs);

// H = H_S + sum_l g_l (L^dag a_l + L a_l^dag) + sum_l w_l a_l^dag a_l, system factor first
Operator build_total_hamiltonian(const SystemModel& model, const bath::DiscretizedBath& db,
                                 long long bound = kDimensionBound);

// normalized Gibbs weights on levels 0..n_c-1
std::vector<double> truncated_gibbs(double omega, bath::Temperature T, int n_c);
// throws InvalidInput naming the mode and the n_c it needs
void check_thermal_truncation(const bath::DiscretizedBath& db, bath::Temperature T, double tail_tol = 1e-6);
// raise each mode's cutoff to the thermal requirement (never lowers)
bath::DiscretizedBath with_thermal_cutoffs(bath::DiscretizedBath db, bath::Temperature T, double tail_tol = 1e-6);
// for L commuting with H_S each mode is displaced by up to 2 g |l|/w (l an eigenvalue
// of L); add enough levels that the Poisson tail of that displacement is below tail_tol
bath::DiscretizedBath with_displacement_cutoffs(bath::DiscretizedBath db, const Operator& L, bath::Temperature T,
                                                double tail_tol = 1e-10);
// dense product state, bath factors in mode order
Operator thermal_bath_state(const bath::DiscretizedBath& db, bath::Temperature T, double tail_tol = 1e-6,
                            long long bound = kDimensionBound);

enum class Method { automatic, subspace, factorized };

struct OracleOptions {
    Method method = Method::automatic;
    double weight_floor = 1e-12;      // drop bath configurations lighter than this
    long long component_bound = kDimensionBound;
    double tail_tol = 1e-6;
};

// <A(t1) B(t2)> = Tr[U^dag(t1) A U(t1) U^dag(t2) B U(t2) rho_S (x) R_0].
// subspace: diagonalizes only the H-connected blocks reached from the initial
// configurations and from B applied to them. factorized: L commuting with H_S
// and normal, so every joint eigen-branch of the system drives independent
// displaced modes.
class ExactCorrelator {
public:
    ExactCorrelator(SystemModel model, bath::DiscretizedBath db, bath::Temperature T, DensityMatrix rho0,
                    OracleOptions opt = {});
    ~ExactCorrelator();
    ExactCorrelator(ExactCorrelator&&) noexcept;
    ExactCorrelator& operator=(ExactCorrelator&&) noexcept;

    std::vector<cd> two_time(const Operator& A, const Operator& B, double t2, const std::vector<double>& t1) const;
    cd two_time(const Operator& A, const Operator& B, double t1, double t2) const;
    std::vector<cd> single_time(const Operator& A, const std::vector<double>& times) const;

    Method method() const;
    double recurrence_time() const { return db_.recurrence_time(); }
    double discarded_weight() const;   // Gibbs weight not represented
    std::size_t largest_block() const; // subspace path only

private:
    struct Impl;
    SystemModel model_;
    bath::DiscretizedBath db_;
    bath::Temperature T_;
    DensityMatrix rho0_;
    OracleOptions opt_;
    std::unique_ptr<Impl> impl_;
};

cd exact_two_time(const SystemModel& model, const bath::DiscretizedBath& db, bath::Temperature T,
                  const DensityMatrix& rho0, const Operator& A, const Operator& B, double t1, double t2);

} // namespace nmqrt::oracle
