// coefficients.cpp - cumulative rate tables, memory kernels and Markov limits
#include "nmqrt/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nmqrt/errors.hpp"

namespace nmqrt::coef {

namespace {

const std::vector<cd>& source_values(const CorrelationTable& t, Source s) {
    return s == Source::alpha ? t.alpha_values() : t.beta_values();
}

cd source_at(const CorrelationTable& t, Source s, double x) { return s == Source::alpha ? t.alpha(x) : t.beta(x); }

bool near_integer(double x, double& r) {
    r = std::round(x);
    return std::abs(x - r) < 1e-8 * std::max(1.0, std::abs(x));
}

} // namespace

GammaTable::GammaTable(std::shared_ptr<const CorrelationTable> table, Source src, double omega)
    : table_(std::move(table)), src_(src), omega_(omega) {
    if (!table_) throw InvalidInput("GammaTable: null correlation table");
    const double h = table_->step();
    step_ = 2.0 * h;
    const auto& f = source_values(*table_, src_);
    const std::size_t m_count = (f.size() - 1) / 2 + 1;
    values_.assign(m_count, cd{});
    if (src_ == Source::beta && table_->beta_vanishes()) return;
    auto y = [&](std::size_t k) { return f[k] * std::polar(1.0, omega_ * h * static_cast<double>(k)); };
    cd prev = y(0);
    for (std::size_t m = 1; m < m_count; ++m) {
        const cd mid = y(2 * m - 1), end = y(2 * m);
        values_[m] = values_[m - 1] + (h / 3.0) * (prev + 4.0 * mid + end);
        prev = end;
    }
}

cd GammaTable::operator()(double t) const {
    if (!(t >= 0.0)) throw InvalidInput("GammaTable: t must be >= 0");
    if (t > t_max() * (1.0 + 1e-12) + 1e-12)
        throw InvalidInput("GammaTable: t=" + std::to_string(t) + " outside tabulated range [0, " +
                           std::to_string(t_max()) + "]");
    double r;
    if (near_integer(t / step_, r)) return values_[std::min(static_cast<std::size_t>(r), values_.size() - 1)];
    if (src_ == Source::beta && table_->beta_vanishes()) return {};
    const auto m = static_cast<std::size_t>(std::floor(t / step_));
    const double t0 = step_ * static_cast<double>(m);
    const double tm = 0.5 * (t0 + t);
    auto y = [&](double s) { return source_at(*table_, src_, s) * std::polar(1.0, omega_ * s); };
    return values_[m] + ((t - t0) / 6.0) * (y(t0) + 4.0 * y(tm) + y(t));
}

SpinBosonGammas spin_boson_gammas(std::shared_ptr<const CorrelationTable> table, double omega_a) {
    return {GammaTable(table, Source::alpha, omega_a), GammaTable(table, Source::beta, -omega_a)};
}

cd generalized_gamma(const CorrelationTable& table, Source src, double omega, double t1, double t2) {
    if (!(t2 >= 0.0)) throw InvalidInput("memory kernel: t2 must be >= 0");
    if (t1 < t2 - 1e-12 * std::max(1.0, t2)) throw InvalidInput("memory kernel: requires t1 >= t2");
    if (t2 == 0.0) return {};
    if (src == Source::beta && table.beta_vanishes()) return {};
    if (t1 > table.t_max() * (1.0 + 1e-12) + 1e-12)
        throw InvalidInput("memory kernel: t1 beyond tabulated range");
    const double h = table.step();
    double m2r, sr;
    if (near_integer(t2 / h, m2r) && static_cast<long>(m2r) % 2 == 0 && near_integer((t1 - t2) / h, sr)) {
        const auto& f = source_values(table, src);
        const auto m2 = static_cast<std::size_t>(m2r), s = static_cast<std::size_t>(std::max(0.0, sr));
        cd acc{};
        for (std::size_t i = 0; i <= m2; ++i) {
            const double c = (i == 0 || i == m2) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            acc += c * f[s + i] * std::polar(1.0, omega * h * static_cast<double>(i));
        }
        return (h / 3.0) * acc;
    }
    const auto M = static_cast<std::size_t>(2 * std::ceil(t2 / (2.0 * h)));
    const double du = t2 / static_cast<double>(M);
    const double s = std::max(0.0, t1 - t2);
    cd acc{};
    for (std::size_t i = 0; i <= M; ++i) {
        const double u = du * static_cast<double>(i);
        const double c = (i == 0 || i == M) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += c * source_at(table, src, s + u) * std::polar(1.0, omega * u);
    }
    return (du / 3.0) * acc;
}

MemoryKernelEvaluator::MemoryKernelEvaluator(std::shared_ptr<const CorrelationTable> table,
                                             std::vector<double> alpha_omegas, std::vector<double> beta_omegas,
                                             double t2)
    : table_(std::move(table)), a_omegas_(std::move(alpha_omegas)), b_omegas_(std::move(beta_omegas)), t2_(t2) {
    if (!(t2_ >= 0.0)) throw InvalidInput("memory kernel: t2 must be >= 0");
    const double h = table_->step();
    double m2r;
    on_grid_ = near_integer(t2_ / h, m2r) && static_cast<long>(m2r) % 2 == 0;
    if (!on_grid_) return;
    m2_ = static_cast<std::size_t>(m2r);
    auto build = [&](const std::vector<double>& ws, std::vector<std::vector<cd>>& out) {
        for (double w : ws) {
            std::vector<cd> v(m2_ + 1);
            for (std::size_t i = 0; i <= m2_; ++i) {
                const double c = (i == 0 || i == m2_) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
                v[i] = (h / 3.0) * c * std::polar(1.0, w * h * static_cast<double>(i));
            }
            out.push_back(std::move(v));
        }
    };
    build(a_omegas_, a_w_);
    build(b_omegas_, b_w_);
}

cd MemoryKernelEvaluator::eval(const std::vector<cd>& weights, const std::vector<cd>& f, Source src, double omega,
                               double t1) const {
    if (t2_ == 0.0) return {};
    if (src == Source::beta && table_->beta_vanishes()) return {};
    double sr;
    if (on_grid_ && t1 >= t2_ && near_integer((t1 - t2_) / table_->step(), sr)) {
        const auto s = static_cast<std::size_t>(sr);
        if (s + m2_ >= f.size()) throw InvalidInput("memory kernel: t1 beyond tabulated range");
        cd acc{};
        for (std::size_t i = 0; i <= m2_; ++i) acc += weights[i] * f[s + i];
        return acc;
    }
    return generalized_gamma(*table_, src, omega, t1, t2_);
}

cd MemoryKernelEvaluator::alpha_kernel(std::size_t k, double t1) const {
    static const std::vector<cd> none;
    return eval(on_grid_ ? a_w_[k] : none, table_->alpha_values(), Source::alpha, a_omegas_[k], t1);
}

cd MemoryKernelEvaluator::beta_kernel(std::size_t k, double t1) const {
    static const std::vector<cd> none;
    return eval(on_grid_ ? b_w_[k] : none, table_->beta_values(), Source::beta, b_omegas_[k], t1);
}

namespace {

// P int_0^W g(v)/(c - v) dv for 0 < c < W, by subtraction of g(c)
template <class G>
double principal_value(G&& g, double c, double W, std::vector<double> bp, const quad::Options& o) {
    if (c >= W) {
        auto f = [&](double v) { return quad::Values<1>{cd(g(v) / (c - v), 0.0)}; };
        return quad::integrate<1>(f, bp, o).value[0].real();
    }
    const double gc = g(c);
    std::vector<double> pts;
    for (double x : bp)
        if (std::abs(x - c) > 1e-9 * W) pts.push_back(x);
    pts.push_back(c);
    std::sort(pts.begin(), pts.end());
    auto f = [&](double v) { return quad::Values<1>{cd((g(v) - gc) / (c - v), 0.0)}; };
    return quad::integrate<1>(f, pts, o).value[0].real() + gc * std::log(c / (W - c));
}

} // namespace

cd markov_limit(const bath::ContinuumBath& bath, Channel c, double omega) {
    if (c == Channel::zero) return {};
    if (c == Channel::beta && bath.temperature().is_zero()) return {};
    const double W = bath.spectral_density().omega_max();
    auto p = [&](double v) { return bath.weight_p(c, v); };
    auto q = [&](double v) { return bath.weight_q(c, v); };
    auto a = [&](double v) { return 0.5 * (p(v) - q(v)); };
    auto b = [&](double v) { return 0.5 * (p(v) + q(v)); };
    quad::Options o;
    o.rel_tol = std::max(bath.rel_tol(), 1e-12);
    const auto bp = bath.breakpoints(0.0);
    const double pi = std::numbers::pi;
    if (omega == 0.0) {
        if (q(0.0) != 0.0)
            throw NumericalFailure(
                "Markov limit diverges at zero Bohr frequency: sine weight is nonzero at v=0 "
                "(finite temperature with a non-Hermitian zero-frequency coupling)");
        auto f = [&](double v) { return quad::Values<1>{cd(q(v) / v, 0.0)}; };
        const double im = quad::integrate<1>(f, bp, o).value[0].real();
        return {0.5 * pi * p(0.0), im};
    }
    const double cabs = std::abs(omega);
    double re = 0.0, im = 0.0;
    if (omega > 0.0) {
        re = cabs < W ? pi * a(cabs) : 0.0;
        auto reg = [&](double v) { return quad::Values<1>{cd(b(v) / (omega + v), 0.0)}; };
        im = principal_value(a, cabs, W, bp, o) + quad::integrate<1>(reg, bp, o).value[0].real();
    } else {
        re = cabs < W ? pi * b(cabs) : 0.0;
        auto reg = [&](double v) { return quad::Values<1>{cd(-a(v) / (cabs + v), 0.0)}; };
        im = -principal_value(b, cabs, W, bp, o) + quad::integrate<1>(reg, bp, o).value[0].real();
    }
    return {re, im};
}

MarkovLimits markovian_limits(const bath::ContinuumBath& bath, double omega_a) {
    return {markov_limit(bath, bath.alpha_channel(), omega_a), markov_limit(bath, bath.beta_channel(), -omega_a)};
}

PlateauReport plateau_check(const GammaTable& g, double plateau_tol) {
    PlateauReport r;
    r.tolerance = plateau_tol;
    const double tm = g.t_max();
    r.change = std::abs(g(tm) - g(0.9 * tm));
    r.reached = r.change < plateau_tol;
    for (int i = 0; i <= 10; ++i) {
        const double t = tm * (0.5 + 0.05 * i);
        r.times.push_back(t);
        r.values.push_back(g(t));
    }
    return r;
}

std::string to_string(EvolutionMode m) {
    switch (m) {
    case EvolutionMode::markov_qrt: return "markov-qrt";
    case EvolutionMode::non_markov_qrt: return "nm-qrt";
    case EvolutionMode::non_markov_full: return "nm-full";
    }
    return "unknown";
}

EvolutionMode mode_from_string(const std::string& s) {
    if (s == "markov-qrt" || s == "markov_qrt") return EvolutionMode::markov_qrt;
    if (s == "nm-qrt" || s == "non_markov_qrt") return EvolutionMode::non_markov_qrt;
    if (s == "nm-full" || s == "non_markov_full") return EvolutionMode::non_markov_full;
    throw InvalidInput("unknown evolution mode '" + s + "' (expected markov-qrt, nm-qrt or nm-full)");
}

KernelSet::KernelSet(std::shared_ptr<const CorrelationTable> table, std::vector<double> omegas, EvolutionMode mode,
                     std::vector<MarkovLimits> markov)
    : table_(std::move(table)), omegas_(std::move(omegas)), mode_(mode), markov_(std::move(markov)) {
    if (!table_) throw InvalidInput("KernelSet: null correlation table");
    if (mode_ == EvolutionMode::markov_qrt && markov_.size() != omegas_.size())
        throw InvalidInput("KernelSet: markov mode needs one limit pair per frequency");
    for (double w : omegas_) {
        g_alpha_.emplace_back(table_, Source::alpha, w);
        g_beta_.emplace_back(table_, Source::beta, -w);
    }
}

double KernelSet::t_max() const { return table_->t_max(); }

cd KernelSet::rate_alpha(std::size_t k, double t) const {
    return mode_ == EvolutionMode::markov_qrt ? markov_[k].gamma1 : g_alpha_[k](t);
}

cd KernelSet::rate_beta(std::size_t k, double t) const {
    return mode_ == EvolutionMode::markov_qrt ? markov_[k].gamma2 : g_beta_[k](t);
}

cd KernelSet::rate_alpha_node(std::size_t k, std::size_t m) const {
    return mode_ == EvolutionMode::markov_qrt ? markov_[k].gamma1 : g_alpha_[k].node(m);
}

cd KernelSet::rate_beta_node(std::size_t k, std::size_t m) const {
    return mode_ == EvolutionMode::markov_qrt ? markov_[k].gamma2 : g_beta_[k].node(m);
}

MemoryKernelEvaluator KernelSet::memory(double t2) const {
    std::vector<double> neg(omegas_.size());
    for (std::size_t k = 0; k < omegas_.size(); ++k) neg[k] = -omegas_[k];
    return MemoryKernelEvaluator(table_, omegas_, neg, t2);
}

KernelSet build_kernels(const bath::CorrelationFunction& cf, std::shared_ptr<const CorrelationTable> table,
                        std::vector<double> omegas, EvolutionMode mode, bool hermitian_coupling) {
    std::vector<MarkovLimits> mk;
    if (mode == EvolutionMode::markov_qrt) {
        const auto* cb = dynamic_cast<const bath::ContinuumBath*>(&cf);
        if (!cb) throw InvalidInput("markov-qrt mode needs a continuum bath (analytic long-time limits)");
        for (double w : omegas) {
            Channel ca = cb->alpha_channel(), cbeta = cb->beta_channel();
            if (hermitian_coupling && w == 0.0 && ca == Channel::alpha) {
                ca = Channel::alpha_eff;
                cbeta = Channel::zero;
            }
            mk.push_back({markov_limit(*cb, ca, w), markov_limit(*cb, cbeta, -w)});
        }
    }
    return KernelSet(std::move(table), std::move(omegas), mode, std::move(mk));
}

} // namespace nmqrt::coef
