// bath.cpp - spectral density, thermal correlation functions, tabulation, discretization
#include "nmqrt/bath.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "nmqrt/errors.hpp"

namespace nmqrt::bath {

void SpectralDensity::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidInput("bath.gamma must be finite and >= 0");
    if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw InvalidInput("bath.cutoff must be finite and > 0");
    if (ohmicity < 1) throw InvalidInput("bath.ohmicity must be a positive integer");
}

double SpectralDensity::J_over_w(double w) const {
    const double x = w / cutoff;
    double p = 1.0;
    for (int k = 1; k < ohmicity; ++k) p *= x;
    return gamma * p * std::exp(-x * x);
}

double SpectralDensity::J(double w) const { return w <= 0.0 ? 0.0 : w * J_over_w(w); }

double nbar(double omega, Temperature T) {
    if (!(omega > 0.0)) throw InvalidInput("nbar: omega must be > 0");
    if (T.kT < 0.0) throw InvalidInput("nbar: negative temperature");
    if (T.is_zero()) return 0.0;
    return 1.0 / std::expm1(omega / T.kT);
}

void CorrelationFunction::tabulate_into(double step, std::size_t n, std::vector<cd>& a, std::vector<cd>& b,
                                        double) const {
    a.resize(n);
    b.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = step * static_cast<double>(k);
        a[k] = alpha(t);
        b[k] = beta_vanishes() ? cd{} : beta(t);
    }
}

ContinuumBath::ContinuumBath(SpectralDensity sd, Temperature T, double rel_tol, Pairing pairing)
    : sd_(sd), T_(T), rel_tol_(rel_tol), pairing_(pairing) {
    sd_.validate();
    if (!(T_.kT >= 0.0) || !std::isfinite(T_.kT)) throw InvalidInput("bath.kT must be finite and >= 0");
    if (!(rel_tol_ > 0.0)) throw InvalidInput("quadrature rel_tol must be > 0");
}

ContinuumBath ContinuumBath::effective() const { return ContinuumBath(sd_, T_, rel_tol_, Pairing::effective); }

double ContinuumBath::J_nbar(double v) const {
    if (T_.is_zero()) return 0.0;
    if (v < 1e-12 * sd_.cutoff) return sd_.J_over_w(v) * T_.kT;
    return sd_.J_over_w(v) * (v / std::expm1(v / T_.kT));
}

double ContinuumBath::J_coth(double v) const {
    if (T_.is_zero()) return sd_.J(v);
    if (v < 1e-12 * sd_.cutoff) return sd_.J_over_w(v) * 2.0 * T_.kT;
    return sd_.J_over_w(v) * (v / std::tanh(0.5 * v / T_.kT));
}

double ContinuumBath::weight_p(Channel c, double v) const {
    switch (c) {
    case Channel::alpha: return sd_.J(v) + J_nbar(v);
    case Channel::beta: return J_nbar(v);
    case Channel::alpha_eff: return J_coth(v);
    case Channel::zero: return 0.0;
    }
    return 0.0;
}

double ContinuumBath::weight_q(Channel c, double v) const {
    switch (c) {
    case Channel::alpha: return -(sd_.J(v) + J_nbar(v));
    case Channel::beta: return J_nbar(v);
    case Channel::alpha_eff: return -sd_.J(v);
    case Channel::zero: return 0.0;
    }
    return 0.0;
}

std::vector<double> ContinuumBath::breakpoints(double t_abs, double refine) const {
    const double W = sd_.omega_max();
    double w = 0.25 * sd_.cutoff;
    if (t_abs > 0.0) w = std::min(w, std::numbers::pi / t_abs);
    if (!T_.is_zero()) w = std::min(w, std::numbers::pi * T_.kT);
    w /= refine;
    const auto n = static_cast<std::size_t>(std::ceil(W / w - 1e-9));
    std::vector<double> bp(n + 1);
    for (std::size_t i = 0; i <= n; ++i) bp[i] = W * static_cast<double>(i) / static_cast<double>(n);
    return bp;
}

cd ContinuumBath::evaluate(Channel c, double t) const {
    if (c == Channel::zero) return {};
    if (c == Channel::beta && T_.is_zero()) return {};
    auto f = [&](double v) {
        return quad::Values<1>{cd(weight_p(c, v) * std::cos(v * t), weight_q(c, v) * std::sin(v * t))};
    };
    quad::Options o;
    o.rel_tol = rel_tol_;
    return quad::integrate<1>(f, breakpoints(std::abs(t)), o).value[0];
}

std::array<cd, 2> ContinuumBath::alpha_beta(double t) const {
    const Channel ca = alpha_channel(), cb = beta_channel();
    auto f = [&](double v) {
        const double c = std::cos(v * t), s = std::sin(v * t);
        return quad::Values<2>{cd(weight_p(ca, v) * c, weight_q(ca, v) * s),
                               cd(weight_p(cb, v) * c, weight_q(cb, v) * s)};
    };
    quad::Options o;
    o.rel_tol = rel_tol_;
    auto r = quad::integrate<2>(f, breakpoints(std::abs(t)), o);
    return {r.value[0], beta_vanishes() ? cd{} : r.value[1]};
}

cd ContinuumBath::alpha(double t) const { return evaluate(alpha_channel(), t); }
cd ContinuumBath::beta(double t) const { return beta_vanishes() ? cd{} : evaluate(beta_channel(), t); }
cd ContinuumBath::alpha_eff(double t) const { return evaluate(Channel::alpha_eff, t); }

namespace {

struct NodeWeights {
    std::vector<double> nu, pka, qka, pga, qga, pkb, qkb, pgb, qgb;
    double abs_a = 0.0, abs_b = 0.0;
};

NodeWeights sample_weights(const ContinuumBath& bath, const std::vector<double>& bp) {
    NodeWeights w;
    const Channel ca = bath.alpha_channel(), cb = bath.beta_channel();
    std::array<double, 21> wk{}, wg{};
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        auto nodes = quad::gk21_nodes(bp[i], bp[i + 1]);
        quad::gk21_weights(bp[i], bp[i + 1], wk, wg);
        for (std::size_t j = 0; j < 21; ++j) {
            const double v = nodes[j];
            const double pa = bath.weight_p(ca, v), qa = bath.weight_q(ca, v);
            const double pb = bath.weight_p(cb, v), qb = bath.weight_q(cb, v);
            w.nu.push_back(v);
            w.pka.push_back(wk[j] * pa);
            w.qka.push_back(wk[j] * qa);
            w.pga.push_back(wg[j] * pa);
            w.qga.push_back(wg[j] * qa);
            w.pkb.push_back(wk[j] * pb);
            w.qkb.push_back(wk[j] * qb);
            w.pgb.push_back(wg[j] * pb);
            w.qgb.push_back(wg[j] * qb);
            w.abs_a += wk[j] * (std::abs(pa) + std::abs(qa));
            w.abs_b += wk[j] * (std::abs(pb) + std::abs(qb));
        }
    }
    return w;
}

} // namespace

void ContinuumBath::tabulate_into(double step, std::size_t n, std::vector<cd>& a, std::vector<cd>& b,
                                  double rel_tol) const {
    a.assign(n, cd{});
    b.assign(n, cd{});
    if (n == 0) return;
    const double t_max = step * static_cast<double>(n - 1);
    constexpr std::size_t chunk = 1024;
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(hw, n_chunks));

    double worst = 0.0;
    for (double refine = 1.0; refine <= 16.0; refine *= 2.0) {
        const NodeWeights w = sample_weights(*this, breakpoints(t_max, refine));
        const std::size_t M = w.nu.size();
        const double tol_a = rel_tol * w.abs_a + 1e-300;
        const double tol_b = rel_tol * w.abs_b + 1e-300;
        std::vector<cd> rot(M);
        for (std::size_t j = 0; j < M; ++j) rot[j] = std::polar(1.0, w.nu[j] * step);

        std::atomic<std::size_t> next{0};
        std::vector<double> worst_per_thread(n_threads, 0.0);
        auto work = [&](unsigned tid) {
            std::vector<cd> z(M);
            double local = 0.0;
            for (std::size_t c = next++; c < n_chunks; c = next++) {
                const std::size_t k0 = c * chunk, k1 = std::min(n, k0 + chunk);
                for (std::size_t j = 0; j < M; ++j)
                    z[j] = std::polar(1.0, w.nu[j] * step * static_cast<double>(k0));
                for (std::size_t k = k0; k < k1; ++k) {
                    double akr = 0, aki = 0, agr = 0, agi = 0, bkr = 0, bki = 0, bgr = 0, bgi = 0;
                    for (std::size_t j = 0; j < M; ++j) {
                        const double cs = z[j].real(), sn = z[j].imag();
                        akr += w.pka[j] * cs;
                        aki += w.qka[j] * sn;
                        agr += w.pga[j] * cs;
                        agi += w.qga[j] * sn;
                        bkr += w.pkb[j] * cs;
                        bki += w.qkb[j] * sn;
                        bgr += w.pgb[j] * cs;
                        bgi += w.qgb[j] * sn;
                        z[j] *= rot[j];
                    }
                    a[k] = {akr, aki};
                    b[k] = {bkr, bki};
                    const double ea = std::abs(cd(akr - agr, aki - agi)) / tol_a;
                    const double eb = std::abs(cd(bkr - bgr, bki - bgi)) / tol_b;
                    local = std::max({local, ea, w.abs_b > 0.0 ? eb : 0.0});
                }
            }
            worst_per_thread[tid] = local;
        };
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(work, t);
        work(0);
        for (auto& th : pool) th.join();
        worst = *std::max_element(worst_per_thread.begin(), worst_per_thread.end());
        if (worst <= 1.0) {
            if (beta_vanishes()) std::fill(b.begin(), b.end(), cd{});
            return;
        }
    }
    throw NumericalFailure("bath tabulation: panel quadrature above tolerance (ratio " +
                               std::to_string(worst) + ")",
                           worst * rel_tol);
}

CorrelationTable::CorrelationTable(double step, std::vector<cd> alpha, std::vector<cd> beta, double rel_tol,
                                   bool beta_vanishes)
    : step_(step), alpha_(std::move(alpha)), beta_(std::move(beta)), rel_tol_(rel_tol),
      beta_vanishes_(beta_vanishes) {
    if (!(step_ > 0.0)) throw InvalidInput("correlation table: step must be > 0");
    if (alpha_.size() < 2 || alpha_.size() != beta_.size())
        throw InvalidInput("correlation table: need matching alpha/beta with >= 2 nodes");
}

cd CorrelationTable::interp(const std::vector<cd>& v, double t) const {
    if (t < 0.0) return std::conj(interp(v, -t));
    const double u = t / step_;
    const double n_last = static_cast<double>(v.size() - 1);
    if (u > n_last * (1.0 + 1e-12) + 1e-9)
        throw InvalidInput("correlation table: t=" + std::to_string(t) + " beyond t_max=" + std::to_string(t_max()));
    const double ur = std::round(u);
    if (std::abs(u - ur) < 1e-9) return v[static_cast<std::size_t>(std::min(ur, n_last))];
    auto k = static_cast<long>(std::floor(u));
    const long last = static_cast<long>(v.size()) - 1;
    // stencil k-1..k+2, shifted inward at the top end; conjugate mirror below zero
    long s0 = std::min(k - 1, last - 3);
    auto at = [&](long i) { return i < 0 ? std::conj(v[static_cast<std::size_t>(-i)]) : v[static_cast<std::size_t>(i)]; };
    cd out{};
    for (long i = 0; i < 4; ++i) {
        double l = 1.0;
        for (long j = 0; j < 4; ++j)
            if (j != i) l *= (u - static_cast<double>(s0 + j)) / static_cast<double>(i - j);
        out += l * at(s0 + i);
    }
    return out;
}

cd CorrelationTable::alpha(double t) const { return interp(alpha_, t); }
cd CorrelationTable::beta(double t) const { return beta_vanishes_ ? cd{} : interp(beta_, t); }

std::shared_ptr<const CorrelationTable> tabulate(const CorrelationFunction& cf, double t_max, double step,
                                                 double rel_tol) {
    if (!(t_max > 0.0) || !(step > 0.0)) throw InvalidInput("tabulate: t_max and step must be > 0");
    const auto n = static_cast<std::size_t>(std::ceil(t_max / step - 1e-9)) + 1;
    std::vector<cd> a, b;
    cf.tabulate_into(step, std::max<std::size_t>(n, 4), a, b, rel_tol);
    return std::make_shared<const CorrelationTable>(step, std::move(a), std::move(b), rel_tol, cf.beta_vanishes());
}

double DiscretizedBath::recurrence_time() const {
    return spacing > 0.0 ? 2.0 * std::numbers::pi / spacing : std::numeric_limits<double>::infinity();
}

void DiscretizedBath::validate() const {
    if (fock_cutoffs.size() != modes.size()) throw InvalidInput("discretized bath: cutoff list size mismatch");
    for (std::size_t l = 0; l < modes.size(); ++l) {
        if (!(modes[l].omega > 0.0)) throw InvalidInput("discretized bath: mode frequency must be > 0");
        if (!(modes[l].g >= 0.0)) throw InvalidInput("discretized bath: coupling must be >= 0");
        if (fock_cutoffs[l] < 1) throw InvalidInput("discretized bath: fock cutoff must be >= 1");
    }
}

DiscretizedBath discretize(const SpectralDensity& sd, std::size_t n_modes, double omega_max,
                           DiscretizationRule, int fock_cutoff) {
    sd.validate();
    if (n_modes < 1) throw InvalidInput("discretize: n_modes must be >= 1");
    if (!(omega_max > 0.0)) throw InvalidInput("discretize: omega_max must be > 0");
    if (fock_cutoff < 1) throw InvalidInput("discretize: fock_cutoff must be >= 1");
    DiscretizedBath db;
    const double dw = omega_max / static_cast<double>(n_modes);
    db.spacing = dw;
    for (std::size_t l = 0; l < n_modes; ++l) {
        const double w = (static_cast<double>(l) + 0.5) * dw;
        db.modes.push_back({w, std::sqrt(sd.J(w) * dw)});
    }
    db.fock_cutoffs.assign(n_modes, fock_cutoff);
    return db;
}

double gibbs_tail(double omega, Temperature T, int n_c) {
    if (T.is_zero()) return n_c >= 1 ? 0.0 : 1.0;
    return std::exp(-static_cast<double>(n_c) * omega / T.kT);
}

int thermal_fock_cutoff(double omega, Temperature T, double tail_tol) {
    if (!(omega > 0.0)) throw InvalidInput("thermal_fock_cutoff: omega must be > 0");
    if (T.is_zero()) return 1;
    const double x = omega / T.kT;
    return static_cast<int>(std::floor(-std::log(tail_tol) / x)) + 1;
}

DiscreteCorrelation::DiscreteCorrelation(DiscretizedBath db, Temperature T, Moments m, double frequency_scale)
    : db_(std::move(db)), T_(T) {
    db_.validate();
    scale_ = frequency_scale;
    for (std::size_t l = 0; l < db_.size(); ++l) {
        const double w = db_.modes[l].omega;
        double up = 1.0, down = 0.0;
        if (m == Moments::exact) {
            down = nbar(w, T_);
            up = down + 1.0;
        } else {
            const int nc = db_.fock_cutoffs[l];
            const double x = T_.is_zero() ? 0.0 : std::exp(-w / T_.kT);
            double z = 0.0, pn = 1.0;
            up = down = 0.0;
            for (int n = 0; n < nc; ++n) {
                z += pn;
                down += pn * n;
                if (n <= nc - 2) up += pn * (n + 1);
                pn *= x;
            }
            up /= z;
            down /= z;
        }
        up_.push_back(up);
        down_.push_back(down);
        if (frequency_scale <= 0.0) scale_ = std::max(scale_, w);
    }
}

bool DiscreteCorrelation::beta_vanishes() const {
    return std::all_of(down_.begin(), down_.end(), [](double d) { return d == 0.0; });
}

cd DiscreteCorrelation::alpha(double t) const {
    cd s{};
    for (std::size_t l = 0; l < db_.size(); ++l) {
        const double g = db_.modes[l].g;
        s += g * g * up_[l] * std::polar(1.0, -db_.modes[l].omega * t);
    }
    return s;
}

cd DiscreteCorrelation::beta(double t) const {
    cd s{};
    for (std::size_t l = 0; l < db_.size(); ++l) {
        const double g = db_.modes[l].g;
        s += g * g * down_[l] * std::polar(1.0, db_.modes[l].omega * t);
    }
    return s;
}

} // namespace nmqrt::bath
