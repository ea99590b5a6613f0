// two_time.cpp - basis evolution of two-time correlators and the spin-boson scalar systems
#include "nmqrt/two_time.hpp"

#include <cmath>
#include <sstream>

#include "nmqrt/errors.hpp"

namespace nmqrt::twotime {

namespace {

Eigen::VectorXcd vec(const Operator& X) { return Eigen::Map<const Eigen::VectorXcd>(X.data(), X.size()); }

Operator unvec(const Eigen::VectorXcd& v, Eigen::Index d) { return Eigen::Map<const Operator>(v.data(), d, d); }

std::size_t grid_index(double x, double h, const char* what) {
    const double r = std::round(x / h);
    if (r < 0 || std::abs(x - r * h) > 1e-9 * std::max(1.0, std::abs(x)))
        throw InvalidInput(std::string(what) + "=" + std::to_string(x) + " is not a multiple of " + std::to_string(h));
    return static_cast<std::size_t>(r);
}

} // namespace

OperatorBasis OperatorBasis::matrix_units(const Operator& H) {
    auto eig = op::diagonalize(H);
    const Eigen::Index d = H.rows();
    std::vector<Operator> e;
    e.reserve(static_cast<std::size_t>(d * d));
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) e.push_back(eig.vectors.col(a) * eig.vectors.col(b).adjoint());
    return from_elements(std::move(e));
}

OperatorBasis OperatorBasis::from_elements(std::vector<Operator> elems) {
    if (elems.empty()) throw InvalidInput("operator basis: no elements");
    OperatorBasis b;
    b.d_ = elems.front().rows();
    const auto n = static_cast<Eigen::Index>(b.d_ * b.d_);
    if (static_cast<Eigen::Index>(elems.size()) != n) throw InvalidInput("operator basis: need d^2 elements");
    Eigen::MatrixXcd V(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& E = elems[static_cast<std::size_t>(i)];
        if (E.rows() != b.d_ || E.cols() != b.d_) throw InvalidInput("operator basis: element dimension mismatch");
        V.col(i) = vec(E);
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(V);
    if (lu.rank() < n) throw InvalidInput("operator basis: elements are linearly dependent");
    b.inv_ = lu.inverse();
    b.elems_ = std::move(elems);
    return b;
}

Eigen::VectorXcd OperatorBasis::coordinates(const Operator& X) const {
    if (X.rows() != d_ || X.cols() != d_) throw InvalidInput("operator basis: dimension mismatch");
    return inv_ * vec(X);
}

Operator OperatorBasis::compose(const Eigen::VectorXcd& c) const {
    Operator out = Operator::Zero(d_, d_);
    for (std::size_t i = 0; i < elems_.size(); ++i) out += c(static_cast<Eigen::Index>(i)) * elems_[i];
    return out;
}

Eigen::MatrixXcd initial_conditions(const Operator& rho_t2, const OperatorBasis& basis) {
    if (rho_t2.rows() != basis.dim()) throw InvalidInput("initial_conditions: dimension mismatch");
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd C(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            C(i, j) = (basis.element(static_cast<std::size_t>(i)) * basis.element(static_cast<std::size_t>(j)) * rho_t2)
                          .trace();
    return C;
}

std::vector<cd> CorrelationSet::correlator(const Operator& A, const Operator& B) const {
    const Eigen::VectorXcd a = basis.coordinates(A), b = basis.coordinates(B);
    std::vector<cd> out;
    out.reserve(values.size());
    for (const auto& C : values) out.push_back(a.transpose() * C * b);
    return out;
}

CorrelationSet evolve_general(const tcl2::Generator& gen, const coef::KernelSet& kernels, const Operator& rho_t2,
                              double t2, double t1_end) {
    const auto& model = gen.model();
    const auto& dec = gen.decomposition();
    const Eigen::Index d = model.dim();
    if (rho_t2.rows() != d || rho_t2.cols() != d) throw InvalidInput("evolve_general: state dimension mismatch");
    if (kernels.size() != dec.size()) throw InvalidInput("evolve_general: kernels do not match decomposition");
    if (t1_end < t2) throw InvalidInput("evolve_general: t1 range must start at t2 (t1 >= t2)");
    if (t1_end > kernels.t_max() * (1.0 + 1e-12) + 1e-12)
        throw InvalidInput("evolve_general: t1_end beyond tabulated bath range");
    const double hn = kernels.node_step();
    const double h = 2.0 * hn;
    const std::size_t m2 = grid_index(t2, hn, "t2");
    const std::size_t n = grid_index(t1_end - t2, h, "t1_end - t2");
    const std::size_t K = dec.size();

    CorrelationSet cs;
    cs.basis = OperatorBasis::matrix_units(model.hamiltonian);
    cs.t2 = t2;
    cs.mode = kernels.mode();
    const auto nb = static_cast<Eigen::Index>(cs.basis.size());

    const Operator& L = model.coupling;
    const Operator Ld = L.adjoint();
    const Operator Id = Operator::Identity(d, d);
    // vec([Z, M]) = (M^T kron I - I kron M) vec(Z)
    const Eigen::MatrixXcd Pa = op::kron(Ld.transpose(), Id) - op::kron(Id, Ld);
    const Eigen::MatrixXcd Pb = op::kron(L.transpose(), Id) - op::kron(Id, L);
    std::vector<Eigen::MatrixXcd> Qa(K), Qb(K);
    for (std::size_t k = 0; k < K; ++k) {
        Qa[k].resize(nb, nb);
        Qb[k].resize(nb, nb);
        const Operator& Lk = dec[k].component;
        for (Eigen::Index j = 0; j < nb; ++j) {
            const Operator& E = cs.basis.element(static_cast<std::size_t>(j));
            Qa[k].row(j) = cs.basis.coordinates(E * Lk - Lk * E).transpose();
            Qb[k].row(j) = cs.basis.coordinates(E * Lk.adjoint() - Lk.adjoint() * E).transpose();
        }
    }
    Eigen::MatrixXcd R(nb, nb), X(nb, nb);
    for (Eigen::Index i = 0; i < nb; ++i) {
        const Operator& E = cs.basis.element(static_cast<std::size_t>(i));
        R.row(i) = vec(E.transpose()).transpose();
        X.col(i) = vec(E * rho_t2);
    }

    const bool memory = kernels.has_memory();
    std::unique_ptr<coef::MemoryKernelEvaluator> mem;
    if (memory) mem = std::make_unique<coef::MemoryKernelEvaluator>(kernels.memory(t2));

    struct NodeData {
        Eigen::MatrixXcd S;
        std::vector<cd> ka, kb;
    };
    std::vector<cd> ga(K), gb(K);
    auto node = [&](std::size_t j) {
        const std::size_t m = m2 + j;
        for (std::size_t k = 0; k < K; ++k) {
            ga[k] = kernels.rate_alpha_node(k, m);
            gb[k] = kernels.rate_beta_node(k, m);
        }
        NodeData nd{gen.superoperator(ga, gb), {}, {}};
        if (memory) {
            const double t1 = t2 + hn * static_cast<double>(j);
            nd.ka.resize(K);
            nd.kb.resize(K);
            for (std::size_t k = 0; k < K; ++k) {
                nd.ka[k] = mem->alpha_kernel(k, t1);
                nd.kb[k] = mem->beta_kernel(k, t1);
            }
        }
        return nd;
    };
    auto rhs = [&](const NodeData& nd, const Eigen::MatrixXcd& Y) {
        Eigen::MatrixXcd out = nd.S * Y;
        if (memory) {
            const Eigen::MatrixXcd PaY = Pa * Y, PbY = Pb * Y;
            for (std::size_t k = 0; k < K; ++k) {
                if (nd.ka[k] != cd{}) out.noalias() += nd.ka[k] * (PaY * Qa[k].transpose());
                if (nd.kb[k] != cd{}) out.noalias() += nd.kb[k] * (PbY * Qb[k].transpose());
            }
        }
        return out;
    };

    cs.t1.reserve(n + 1);
    cs.values.reserve(n + 1);
    cs.t1.push_back(t2);
    cs.values.push_back(R * X);
    NodeData n0 = node(0);
    for (std::size_t s = 0; s < n; ++s) {
        const NodeData nm = node(2 * s + 1);
        NodeData ne = node(2 * s + 2);
        const Eigen::MatrixXcd k1 = rhs(n0, X);
        const Eigen::MatrixXcd k2 = rhs(nm, X + 0.5 * h * k1);
        const Eigen::MatrixXcd k3 = rhs(nm, X + 0.5 * h * k2);
        const Eigen::MatrixXcd k4 = rhs(ne, X + h * k3);
        X += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t1 = t2 + h * static_cast<double>(s + 1);
        if (!X.allFinite())
            throw NumericalFailure("two-time integration produced non-finite values at t1=" + std::to_string(t1));
        cs.t1.push_back(t1);
        cs.values.push_back(R * X);
        n0 = std::move(ne);
    }
    return cs;
}

std::string to_string(SpinPair p) {
    switch (p) {
    case SpinPair::pp: return "sp_sp";
    case SpinPair::mm: return "sm_sm";
    case SpinPair::mz: return "sm_sz";
    case SpinPair::zm: return "sz_sm";
    case SpinPair::pz: return "sp_sz";
    case SpinPair::zp: return "sz_sp";
    case SpinPair::zz: return "sz_sz";
    case SpinPair::mp: return "sm_sp";
    case SpinPair::pm: return "sp_sm";
    }
    return "unknown";
}

std::pair<Operator, Operator> spin_pair_operators(SpinPair p) {
    const Operator P = op::sigma_plus(), M = op::sigma_minus(), Z = op::sigma_z();
    switch (p) {
    case SpinPair::pp: return {P, P};
    case SpinPair::mm: return {M, M};
    case SpinPair::mz: return {M, Z};
    case SpinPair::zm: return {Z, M};
    case SpinPair::pz: return {P, Z};
    case SpinPair::zp: return {Z, P};
    case SpinPair::zz: return {Z, Z};
    case SpinPair::mp: return {M, P};
    case SpinPair::pm: return {P, M};
    }
    throw InvalidInput("spin pair");
}

SpinBosonCorrelators evolve_spin_boson(const coef::KernelSet& kernels, double omega_a, const Operator& rho_t2,
                                       double t2, double t1_end) {
    if (kernels.size() != 1 || std::abs(kernels.omega(0) - omega_a) > 1e-9 * std::max(1.0, std::abs(omega_a)))
        throw InvalidInput("evolve_spin_boson: kernels must hold the single frequency omega_a");
    if (rho_t2.rows() != 2 || rho_t2.cols() != 2) throw InvalidInput("evolve_spin_boson: need a 2x2 state");
    if (t1_end < t2) throw InvalidInput("evolve_spin_boson: requires t1 >= t2");
    if (t1_end > kernels.t_max() * (1.0 + 1e-12) + 1e-12)
        throw InvalidInput("evolve_spin_boson: t1_end beyond tabulated bath range");
    const double hn = kernels.node_step();
    const double h = 2.0 * hn;
    const std::size_t m2 = grid_index(t2, hn, "t2");
    const std::size_t n = grid_index(t1_end - t2, h, "t1_end - t2");

    using V = Eigen::Matrix<cd, 9, 1>;
    V y;
    for (std::size_t i = 0; i < 9; ++i) {
        auto [A, B] = spin_pair_operators(all_spin_pairs[i]);
        y(static_cast<Eigen::Index>(i)) = (A * B * rho_t2).trace();
    }
    const cd sp2 = (op::sigma_plus() * rho_t2).trace();
    const cd sm2 = (op::sigma_minus() * rho_t2).trace();
    const cd sz2 = (op::sigma_z() * rho_t2).trace();

    const bool memory = kernels.has_memory();
    std::unique_ptr<coef::MemoryKernelEvaluator> mem;
    if (memory) mem = std::make_unique<coef::MemoryKernelEvaluator>(kernels.memory(t2));
    const double w = omega_a;

    auto rhs = [&](const V& x, std::size_t j) {
        const std::size_t m = m2 + j;
        const cd g1 = kernels.rate_alpha_node(0, m), g2 = kernels.rate_beta_node(0, m);
        cd g3{}, g4{};
        if (memory) {
            const double t1 = t2 + hn * static_cast<double>(j);
            g3 = mem->alpha_kernel(0, t1);
            g4 = mem->beta_kernel(0, t1);
        }
        const cd up = I * w - (std::conj(g1) + g2);     // sigma_+ branch
        const cd dn = -I * w - (g1 + std::conj(g2));    // sigma_- branch
        const double zr = -2.0 * (g1 + g2).real();
        const double zc = -2.0 * (g1 - g2).real();
        V d;
        d(0) = up * x(0);                                        // <s+ s+>
        d(1) = dn * x(1);                                        // <s- s->
        d(2) = dn * x(2) - 2.0 * g3 * x(3);                      // <s- sz>
        d(3) = zr * x(3) + zc * sm2 - 2.0 * g4 * x(2);           // <sz s->
        d(4) = up * x(4) - 2.0 * g4 * x(5);                      // <s+ sz>
        d(5) = zr * x(5) + zc * sp2 - 2.0 * g3 * x(4);           // <sz s+>
        d(6) = zr * x(6) + zc * sz2 + 4.0 * g3 * x(8) + 4.0 * g4 * x(7);   // <sz sz>
        d(7) = dn * x(7) + g3 * x(6);                            // <s- s+>
        d(8) = up * x(8) + g4 * x(6);                            // <s+ s->
        return d;
    };

    SpinBosonCorrelators out;
    out.t2 = t2;
    out.mode = kernels.mode();
    auto push = [&](double t1) {
        out.t1.push_back(t1);
        for (std::size_t i = 0; i < 9; ++i) out.series[i].push_back(y(static_cast<Eigen::Index>(i)));
    };
    push(t2);
    for (std::size_t s = 0; s < n; ++s) {
        const V k1 = rhs(y, 2 * s);
        const V k2 = rhs(y + 0.5 * h * k1, 2 * s + 1);
        const V k3 = rhs(y + 0.5 * h * k2, 2 * s + 1);
        const V k4 = rhs(y + h * k3, 2 * s + 2);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y.allFinite()) throw NumericalFailure("spin-boson two-time integration diverged");
        push(t2 + h * static_cast<double>(s + 1));
    }
    return out;
}

std::string QrtReport::summary() const {
    std::ostringstream os;
    os << "condition(i)=" << (condition_i ? "holds" : "fails") << " condition(ii)=" << (condition_ii ? "holds" : "fails")
       << " markovian_bath=" << (markovian_bath ? "yes" : "no") << " qrt_predicted=" << (qrt_predicted ? "yes" : "no");
    if (coupled_violation) os << " (caveat: coupled to operators violating the conditions)";
    return os.str();
}

QrtReport qrt_condition_report(const SystemModel& model, const op::EigenoperatorDecomposition& dec,
                               const Operator& A, const Operator& B, bool finite_temperature, bool markovian_bath) {
    model.validate();
    const Eigen::Index d = model.dim();
    if (A.rows() != d || B.rows() != d || A.cols() != d || B.cols() != d)
        throw InvalidInput("qrt_condition_report: dimension mismatch");
    const Operator& L = model.coupling;
    const Operator Ld = L.adjoint();
    const double scale = std::max({1.0, op::max_abs(A), op::max_abs(B)}) * std::max(1.0, op::max_abs(L));
    auto zero = [&](const Operator& X) { return op::max_abs(X) <= 1e-10 * scale; };

    bool b_alpha = true, b_beta = true;
    for (std::size_t k = 0; k < dec.size(); ++k) {
        const Operator& Lk = dec[k].component;
        b_alpha = b_alpha && zero(op::commutator(B, Lk));
        b_beta = b_beta && zero(op::commutator(B, Lk.adjoint()));
    }
    auto cond_i = [&](const Operator& X) { return b_alpha || zero(op::commutator(Ld, X)); };
    auto cond_ii = [&](const Operator& X) { return !finite_temperature || b_beta || zero(op::commutator(L, X)); };

    QrtReport r;
    r.condition_i = cond_i(A);
    r.condition_ii = cond_ii(A);
    r.markovian_bath = markovian_bath;
    r.qrt_predicted = markovian_bath || (r.condition_i && r.condition_ii);

    // span of A under the QRT-form Heisenberg maps
    std::vector<Eigen::VectorXcd> span;
    std::vector<Operator> ops;
    auto add = [&](const Operator& X) {
        Eigen::VectorXcd v = vec(X);
        for (const auto& u : span) v -= u.dot(v) * u;
        const double nv = v.norm();
        if (nv > 1e-10 * std::max(1.0, vec(X).norm())) {
            span.push_back(v / nv);
            ops.push_back(unvec(span.back(), d));
            return true;
        }
        return false;
    };
    add(A);
    for (std::size_t i = 0; i < ops.size() && ops.size() < static_cast<std::size_t>(d * d); ++i) {
        const Operator X = ops[i];
        add(op::commutator(model.hamiltonian, X));
        for (std::size_t k = 0; k < dec.size(); ++k) {
            const Operator& Lk = dec[k].component;
            add(Lk.adjoint() * op::commutator(X, L));
            add(op::commutator(Ld, X) * Lk);
            add(Lk * op::commutator(X, Ld));
            add(op::commutator(L, X) * Lk.adjoint());
        }
    }
    r.reachable_dim = ops.size();
    if (r.condition_i && r.condition_ii)
        for (const auto& X : ops)
            if (!cond_i(X) || !cond_ii(X)) r.coupled_violation = true;
    return r;
}

Engine::Engine(SystemModel model, std::shared_ptr<const bath::CorrelationFunction> cf, double t_max,
               std::vector<EvolutionMode> modes, EngineOptions opt)
    : cf_(std::move(cf)) {
    if (!cf_) throw InvalidInput("engine: null bath");
    model.validate();
    if (!(t_max > 0.0)) throw InvalidInput("engine: t_max must be > 0");
    auto dec = op::eigenoperator_decompose(model.coupling, model.hamiltonian, opt.degeneracy_tol);
    const auto omegas = dec.frequencies();
    if (opt.step > 0.0) {
        step_ = opt.step;
    } else {
        const double h0 = tcl2::default_step(omegas, cf_->frequency_scale());
        // 1/n with n a multiple of 20 keeps t = 0.05 k on the grid
        step_ = 1.0 / (20.0 * std::ceil(1.0 / (20.0 * h0) - 1e-9));
    }
    const bool herm = op::is_hermitian(model.coupling);
    gen_ = std::make_unique<tcl2::Generator>(model, std::move(dec));
    table_ = bath::tabulate(*cf_, t_max, 0.25 * step_, opt.quad_rel_tol);
    for (auto m : modes) {
        if (has_mode(m)) continue;
        kernels_.emplace_back(m, std::make_unique<coef::KernelSet>(coef::build_kernels(*cf_, table_, omegas, m, herm)));
    }
}

bool Engine::has_mode(EvolutionMode m) const {
    for (const auto& [mm, k] : kernels_)
        if (mm == m) return true;
    return false;
}

const coef::KernelSet& Engine::kernels(EvolutionMode m) const {
    for (const auto& [mm, k] : kernels_)
        if (mm == m) return *k;
    throw InvalidInput("engine was not built for mode " + coef::to_string(m));
}

tcl2::Trajectory Engine::single_time(EvolutionMode m, const DensityMatrix& rho0, double t_end) const {
    return tcl2::propagate_density(*gen_, kernels(m), rho0, t_end);
}

CorrelationRun Engine::correlate(EvolutionMode m, const DensityMatrix& rho0, double t2, double t1_end) const {
    CorrelationRun run;
    run.single_time = single_time(m, rho0, t2);
    run.correlations = evolve_general(*gen_, kernels(m), run.single_time.states.back(), t2, t1_end);
    return run;
}

SpinBosonRun Engine::correlate_spin_boson(EvolutionMode m, const DensityMatrix& rho0, double t2,
                                          double t1_end) const {
    const auto& mod = gen_->model();
    if (mod.dim() != 2) throw InvalidInput("spin-boson path needs a two-level system");
    const double w = (mod.hamiltonian(0, 0) - mod.hamiltonian(1, 1)).real();
    if (op::max_abs(mod.hamiltonian - 0.5 * w * op::sigma_z()) > 1e-12 ||
        op::max_abs(mod.coupling - op::sigma_minus()) > 1e-12)
        throw InvalidInput("spin-boson path needs H = (w/2) sigma_z and L = sigma_-");
    const auto& k = kernels(m);
    const Operator& r0 = rho0.matrix();
    SpinBosonRun run;
    run.single_time = tcl2::spin_boson_single_time((op::sigma_plus() * r0).trace(), (op::sigma_minus() * r0).trace(),
                                                   (op::sigma_z() * r0).trace(), k, w, t2);
    const cd sp = run.single_time.sigma_plus.back(), sm = run.single_time.sigma_minus.back();
    const cd sz = run.single_time.sigma_z.back();
    Operator rho(2, 2);
    rho << 0.5 * (1.0 + sz), sm, sp, 0.5 * (1.0 - sz);
    run.correlations = evolve_spin_boson(k, w, rho, t2, t1_end);
    return run;
}

} // namespace nmqrt::twotime
