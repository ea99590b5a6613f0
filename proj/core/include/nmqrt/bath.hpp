// bath.hpp - spectral density, thermal occupation and bath correlation functions
#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "nmqrt/operator_algebra.hpp"
#include "nmqrt/quadrature.hpp"

namespace nmqrt::bath {

enum class SpectralKind { ohmic_gaussian_cutoff };

// J(w) = gamma * w * (w/cutoff)^(n-1) * exp(-w^2/cutoff^2)
struct SpectralDensity {
    SpectralKind kind = SpectralKind::ohmic_gaussian_cutoff;
    double gamma = 0.1;
    double cutoff = 5.0;
    int ohmicity = 1;

    void validate() const;
    double J(double w) const;
    // gamma (w/cutoff)^(n-1) exp(-w^2/cutoff^2), i.e. J(w)/w
    double J_over_w(double w) const;
    double omega_max() const { return 8.0 * cutoff; }
};

struct Temperature {
    double kT = 0.0;
    bool is_zero() const { return kT == 0.0; }
};

double nbar(double omega, Temperature T);

// Spectral weights of one correlation channel:
//   X(t) = int_0^W [p(v) cos(v t) + i q(v) sin(v t)] dv
enum class Channel { alpha, beta, alpha_eff, zero };

// Common interface for anything the TCL2 engine can be driven by.
class CorrelationFunction {
public:
    virtual ~CorrelationFunction() = default;
    virtual cd alpha(double t) const = 0;
    virtual cd beta(double t) const = 0;
    virtual bool beta_vanishes() const = 0;
    // characteristic bath frequency used for the default step
    virtual double frequency_scale() const = 0;
    // alpha/beta at t_k = k*step, k < n. Default evaluates nodewise.
    virtual void tabulate_into(double step, std::size_t n, std::vector<cd>& a, std::vector<cd>& b,
                               double rel_tol) const;
};

// Continuum bath built from J(w) and T. The "effective" pairing feeds
// alpha_eff = alpha + beta as alpha and sets beta to zero.
class ContinuumBath : public CorrelationFunction {
public:
    enum class Pairing { thermal, effective };

    ContinuumBath(SpectralDensity sd, Temperature T, double rel_tol = 1e-10,
                  Pairing pairing = Pairing::thermal);

    cd alpha(double t) const override;
    cd beta(double t) const override;
    cd alpha_eff(double t) const;
    // alpha and beta from one shared quadrature
    std::array<cd, 2> alpha_beta(double t) const;
    cd evaluate(Channel c, double t) const;

    bool beta_vanishes() const override { return pairing_ == Pairing::effective || T_.is_zero(); }
    double frequency_scale() const override { return sd_.cutoff; }
    void tabulate_into(double step, std::size_t n, std::vector<cd>& a, std::vector<cd>& b,
                       double rel_tol) const override;

    const SpectralDensity& spectral_density() const { return sd_; }
    Temperature temperature() const { return T_; }
    Pairing pairing() const { return pairing_; }
    double rel_tol() const { return rel_tol_; }
    ContinuumBath effective() const;

    Channel alpha_channel() const { return pairing_ == Pairing::thermal ? Channel::alpha : Channel::alpha_eff; }
    Channel beta_channel() const { return pairing_ == Pairing::thermal ? Channel::beta : Channel::zero; }
    double weight_p(Channel c, double v) const;
    double weight_q(Channel c, double v) const;
    // panel breakpoints on [0, 8 cutoff] fine enough for |t| <= t_abs
    std::vector<double> breakpoints(double t_abs, double refine = 1.0) const;

private:
    double J_nbar(double v) const;
    double J_coth(double v) const;

    SpectralDensity sd_;
    Temperature T_;
    double rel_tol_;
    Pairing pairing_;
};

// Table of alpha/beta on t_k = k h, k = 0..n-1. Nodes are exact evaluations.
class CorrelationTable {
public:
    CorrelationTable(double step, std::vector<cd> alpha, std::vector<cd> beta, double rel_tol,
                     bool beta_vanishes);

    double step() const { return step_; }
    std::size_t size() const { return alpha_.size(); }
    double t_max() const { return step_ * static_cast<double>(alpha_.size() - 1); }
    double rel_tol() const { return rel_tol_; }
    bool beta_vanishes() const { return beta_vanishes_; }

    const cd& alpha_node(std::size_t k) const { return alpha_[k]; }
    const cd& beta_node(std::size_t k) const { return beta_[k]; }
    const std::vector<cd>& alpha_values() const { return alpha_; }
    const std::vector<cd>& beta_values() const { return beta_; }

    // cubic Lagrange interpolation; negative t via conjugation symmetry
    cd alpha(double t) const;
    cd beta(double t) const;

private:
    cd interp(const std::vector<cd>& v, double t) const;

    double step_;
    std::vector<cd> alpha_;
    std::vector<cd> beta_;
    double rel_tol_;
    bool beta_vanishes_;
};

std::shared_ptr<const CorrelationTable> tabulate(const CorrelationFunction& cf, double t_max, double step,
                                                 double rel_tol = 1e-10);

struct BathMode {
    double omega;
    double g;
};

enum class DiscretizationRule { midpoint };

struct DiscretizedBath {
    std::vector<BathMode> modes;
    std::vector<int> fock_cutoffs;   // per mode, each >= 1
    double spacing = 0.0;            // mode spacing, 0 if irregular

    std::size_t size() const { return modes.size(); }
    // 2 pi / spacing, beyond which the discrete bath revives
    double recurrence_time() const;
    void validate() const;
};

// g^2 = J(w) dw at the midpoints of n_modes equal cells on [0, omega_max]
DiscretizedBath discretize(const SpectralDensity& sd, std::size_t n_modes, double omega_max,
                           DiscretizationRule rule = DiscretizationRule::midpoint, int fock_cutoff = 2);

// smallest n_c with Gibbs tail sum_{n >= n_c} p_n < tail_tol
int thermal_fock_cutoff(double omega, Temperature T, double tail_tol = 1e-6);
double gibbs_tail(double omega, Temperature T, int n_c);

// Correlation functions of a discretized bath. With truncated moments the
// occupations are those of the Fock-truncated Gibbs state the oracle uses.
class DiscreteCorrelation : public CorrelationFunction {
public:
    enum class Moments { exact, truncated };

    DiscreteCorrelation(DiscretizedBath db, Temperature T, Moments m = Moments::truncated,
                        double frequency_scale = 0.0);

    cd alpha(double t) const override;
    cd beta(double t) const override;
    bool beta_vanishes() const override;
    double frequency_scale() const override { return scale_; }

    const DiscretizedBath& modes() const { return db_; }
    // <a a^dag> and <a^dag a> per mode
    const std::vector<double>& emission_weight() const { return up_; }
    const std::vector<double>& absorption_weight() const { return down_; }

private:
    DiscretizedBath db_;
    Temperature T_;
    std::vector<double> up_, down_;
    double scale_;
};

} // namespace nmqrt::bath
