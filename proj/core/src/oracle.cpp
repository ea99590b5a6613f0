// oracle.cpp - exact discretized-bath correlators (block exact diagonalization, factorized modes)
#include "nmqrt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <unordered_map>
#include <limits>

#include <Eigen/Sparse>

#include "nmqrt/errors.hpp"

namespace nmqrt::oracle {

long long composite_dimension(Eigen::Index system_dim, const std::vector<int>& cutoffs) {
    long double total = static_cast<long double>(system_dim);
    for (int c : cutoffs) {
        total *= c;
        if (total > 4.6e18L) return -1;
    }
    return static_cast<long long>(total);
}

Operator build_total_hamiltonian(const SystemModel& model, const bath::DiscretizedBath& db, long long bound) {
    model.validate();
    db.validate();
    const long long dim = composite_dimension(model.dim(), db.fock_cutoffs);
    if (dim < 0 || dim > bound)
        throw InvalidInput("total Hilbert space dimension " + (dim < 0 ? std::string("> 4.6e18") : std::to_string(dim)) +
                           " exceeds bound " + std::to_string(bound));
    const std::size_t N = db.size();
    auto embed = [&](const Operator& sys, std::size_t mode, const Operator& m) {
        std::vector<Operator> f{sys};
        for (std::size_t l = 0; l < N; ++l) f.push_back(l == mode ? m : op::identity(db.fock_cutoffs[l]));
        return op::tensor_embed(f);
    };
    std::vector<Operator> f{model.hamiltonian};
    for (std::size_t l = 0; l < N; ++l) f.push_back(op::identity(db.fock_cutoffs[l]));
    Operator H = op::tensor_embed(f);
    const Operator& L = model.coupling;
    const Operator Id = op::identity(model.dim());
    for (std::size_t l = 0; l < N; ++l) {
        const Operator a = op::annihilation(db.fock_cutoffs[l]);
        const Operator ad = a.adjoint();
        H += db.modes[l].g * (embed(L.adjoint(), l, a) + embed(L, l, ad));
        H += db.modes[l].omega * embed(Id, l, ad * a);
    }
    return H;
}

std::vector<double> truncated_gibbs(double omega, bath::Temperature T, int n_c) {
    if (n_c < 1) throw InvalidInput("truncated_gibbs: n_c must be >= 1");
    std::vector<double> p(static_cast<std::size_t>(n_c), 0.0);
    if (T.is_zero()) {
        p[0] = 1.0;
        return p;
    }
    const double x = std::exp(-omega / T.kT);
    double z = 0.0, pn = 1.0;
    for (int n = 0; n < n_c; ++n) {
        p[static_cast<std::size_t>(n)] = pn;
        z += pn;
        pn *= x;
    }
    for (auto& v : p) v /= z;
    return p;
}

void check_thermal_truncation(const bath::DiscretizedBath& db, bath::Temperature T, double tail_tol) {
    for (std::size_t l = 0; l < db.size(); ++l) {
        const double tail = bath::gibbs_tail(db.modes[l].omega, T, db.fock_cutoffs[l]);
        if (tail >= tail_tol)
            throw InvalidInput("mode " + std::to_string(l) + " (omega=" + std::to_string(db.modes[l].omega) +
                               "): Gibbs tail " + std::to_string(tail) + " >= " + std::to_string(tail_tol) +
                               " with n_c=" + std::to_string(db.fock_cutoffs[l]) + "; requires n_c >= " +
                               std::to_string(bath::thermal_fock_cutoff(db.modes[l].omega, T, tail_tol)));
    }
}

bath::DiscretizedBath with_thermal_cutoffs(bath::DiscretizedBath db, bath::Temperature T, double tail_tol) {
    for (std::size_t l = 0; l < db.size(); ++l)
        db.fock_cutoffs[l] = std::max(db.fock_cutoffs[l], bath::thermal_fock_cutoff(db.modes[l].omega, T, tail_tol));
    return db;
}

bath::DiscretizedBath with_displacement_cutoffs(bath::DiscretizedBath db, const Operator& L, bath::Temperature T,
                                                double tail_tol) {
    Eigen::ComplexEigenSolver<Operator> es(L);
    double lmax = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) lmax = std::max(lmax, std::abs(es.eigenvalues()(i)));
    for (std::size_t l = 0; l < db.size(); ++l) {
        const double x = 2.0 * db.modes[l].g * lmax / db.modes[l].omega;
        const double mu = x * x;
        // Poisson tail sum_{n >= k} e^-mu mu^n / n!
        int k = 0;
        double pn = std::exp(-mu), cum = 0.0;
        while (1.0 - cum >= tail_tol && k < 10000) {
            cum += pn;
            ++k;
            pn *= mu / k;
        }
        const int need = bath::thermal_fock_cutoff(db.modes[l].omega, T, tail_tol) + k;
        db.fock_cutoffs[l] = std::max(db.fock_cutoffs[l], need);
    }
    return db;
}

Operator thermal_bath_state(const bath::DiscretizedBath& db, bath::Temperature T, double tail_tol, long long bound) {
    db.validate();
    check_thermal_truncation(db, T, tail_tol);
    const long long dim = composite_dimension(1, db.fock_cutoffs);
    if (dim < 0 || dim > bound) throw InvalidInput("bath state dimension exceeds bound " + std::to_string(bound));
    if (db.size() == 0) return op::identity(1);
    std::vector<Operator> f;
    for (std::size_t l = 0; l < db.size(); ++l) {
        auto p = truncated_gibbs(db.modes[l].omega, T, db.fock_cutoffs[l]);
        Operator r = Operator::Zero(db.fock_cutoffs[l], db.fock_cutoffs[l]);
        for (std::size_t n = 0; n < p.size(); ++n) r(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = p[n];
        f.push_back(r);
    }
    return op::tensor_embed(f);
}

namespace {

Eigen::VectorXcd phases(const Eigen::VectorXd& E, double t) {
    Eigen::VectorXcd p(E.size());
    for (Eigen::Index i = 0; i < E.size(); ++i) p(i) = std::polar(1.0, -E(i) * t);
    return p;
}

struct Block {
    std::vector<long long> states;
    Eigen::SparseMatrix<cd, Eigen::RowMajor> H;
    double centre = 0.0, radius = 0.0;   // spectrum inside [centre - radius, centre + radius]

    Eigen::Index size() const { return static_cast<Eigen::Index>(states.size()); }

    // exp(-i H dt) x by Chebyshev expansion, split so radius*dt stays moderate
    void evolve(Eigen::VectorXcd& x, double dt) const {
        if (dt == 0.0 || x.size() == 0) return;
        if (radius == 0.0) {
            x *= std::polar(1.0, -centre * dt);
            return;
        }
        const int pieces = std::max(1, static_cast<int>(std::ceil(radius * std::abs(dt) / 40.0)));
        const double h = dt / pieces;
        const double z = radius * h;
        const int kmax = static_cast<int>(std::abs(z) + 12.0 * std::cbrt(std::abs(z) + 1.0) + 20.0);
        std::vector<double> J(static_cast<std::size_t>(kmax) + 1);
        for (int k = 0; k <= kmax; ++k) J[static_cast<std::size_t>(k)] = std::cyl_bessel_j(static_cast<double>(k), std::abs(z));
        const double sgn = z < 0 ? -1.0 : 1.0;
        Eigen::VectorXcd t0, t1, t2, acc;
        for (int p = 0; p < pieces; ++p) {
            // T_k of (H - centre)/radius; coefficient (2 - delta_k0) (-i sgn)^k J_k(|z|)
            t0 = x;
            t1 = (H * x - centre * x) / radius;
            acc = J[0] * t0 + 2.0 * J[1] * cd(0.0, -sgn) * t1;
            cd ph = cd(0.0, -sgn);
            for (int k = 2; k <= kmax; ++k) {
                t2 = 2.0 * (H * t1 - centre * t1) / radius - t0;
                ph *= cd(0.0, -sgn);
                acc += 2.0 * J[static_cast<std::size_t>(k)] * ph * t2;
                t0.swap(t1);
                t1.swap(t2);
                if (k > std::abs(z) && std::abs(J[static_cast<std::size_t>(k)]) < 1e-17) break;
            }
            x = std::polar(1.0, -centre * h) * acc;
        }
    }
};

// Mixed-radix basis |s, n_1 .. n_N>, index s + d (n_1 + c_1 (n_2 + ...)).
class Subspace {
public:
    Subspace(const SystemModel& model, const bath::DiscretizedBath& db, long long bound)
        : H_(model.hamiltonian), L_(model.coupling), Ld_(model.coupling.adjoint()), db_(db), bound_(bound) {
        d_ = model.dim();
        const long long total = composite_dimension(d_, db.fock_cutoffs);
        if (total < 0) throw InvalidInput("composite space too large to index (more than 2^62 states)");
        long long s = d_;
        for (int c : db.fock_cutoffs) {
            stride_.push_back(s);
            s *= c;
        }
    }

    Eigen::Index system_dim() const { return d_; }
    int system_of(long long g) const { return static_cast<int>(g % d_); }
    int level(long long g, std::size_t l) const { return static_cast<int>((g / stride_[l]) % db_.fock_cutoffs[l]); }
    long long bath_index(const std::vector<int>& n) const {
        long long g = 0;
        for (std::size_t l = 0; l < n.size(); ++l) g += stride_[l] * n[l];
        return g;
    }

    template <class F>
    void apply_H(long long g, F&& emit) const {
        const int s = system_of(g);
        const long long base = g - s;
        double diag = 0.0;
        for (std::size_t l = 0; l < db_.size(); ++l) diag += db_.modes[l].omega * level(g, l);
        for (Eigen::Index sp = 0; sp < d_; ++sp) {
            cd v = H_(sp, s);
            if (sp == s) v += diag;
            if (v != cd{}) emit(base + sp, v);
        }
        for (std::size_t l = 0; l < db_.size(); ++l) {
            const int n = level(g, l);
            const double gl = db_.modes[l].g;
            if (gl == 0.0) continue;
            if (n > 0) {
                const double amp = gl * std::sqrt(static_cast<double>(n));
                for (Eigen::Index sp = 0; sp < d_; ++sp)
                    if (Ld_(sp, s) != cd{}) emit(base - stride_[l] + sp, amp * Ld_(sp, s));
            }
            if (n + 1 < db_.fock_cutoffs[l]) {
                const double amp = gl * std::sqrt(static_cast<double>(n + 1));
                for (Eigen::Index sp = 0; sp < d_; ++sp)
                    if (L_(sp, s) != cd{}) emit(base + stride_[l] + sp, amp * L_(sp, s));
            }
        }
    }

    std::pair<int, Eigen::Index> locate(long long g) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = where_.find(g);
        if (it != where_.end()) return it->second;
        discover(g);
        return where_.at(g);
    }

    const Block& block(int id) const { return *blocks_[static_cast<std::size_t>(id)]; }
    std::size_t largest() const {
        std::size_t m = 0;
        for (const auto& b : blocks_) m = std::max(m, b->states.size());
        return m;
    }

private:
    void discover(long long seed) {
        auto blk = std::make_unique<Block>();
        const int id = static_cast<int>(blocks_.size());
        std::unordered_map<long long, Eigen::Index> local;
        local[seed] = 0;
        blk->states.push_back(seed);
        for (std::size_t i = 0; i < blk->states.size(); ++i) {
            apply_H(blk->states[i], [&](long long g2, cd) {
                if (local.emplace(g2, static_cast<Eigen::Index>(blk->states.size())).second) {
                    blk->states.push_back(g2);
                    if (static_cast<long long>(blk->states.size()) > bound_)
                        throw InvalidInput("connected block exceeds dimension bound " + std::to_string(bound_));
                }
            });
        }
        const Eigen::Index D = blk->size();
        std::vector<Eigen::Triplet<cd>> trip;
        for (Eigen::Index j = 0; j < D; ++j)
            apply_H(blk->states[static_cast<std::size_t>(j)],
                    [&](long long g2, cd v) { trip.emplace_back(local.at(g2), j, v); });
        blk->H.resize(D, D);
        blk->H.setFromTriplets(trip.begin(), trip.end());
        blk->H.makeCompressed();
        const Eigen::SparseMatrix<cd, Eigen::RowMajor> Hd = blk->H.adjoint();
        double herm = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (Eigen::Index r = 0; r < D; ++r) {
            double off = 0.0, diag = 0.0;
            for (Eigen::SparseMatrix<cd, Eigen::RowMajor>::InnerIterator it(blk->H, r); it; ++it) {
                if (it.col() == r) diag = it.value().real();
                else off += std::abs(it.value());
            }
            lo = std::min(lo, diag - off);
            hi = std::max(hi, diag + off);
        }
        herm = (Eigen::SparseMatrix<cd, Eigen::RowMajor>(blk->H - Hd)).norm();
        if (herm > 1e-12 * std::max(1.0, blk->H.norm())) throw NumericalFailure("composite Hamiltonian block is not Hermitian");
        blk->centre = 0.5 * (hi + lo);
        blk->radius = 0.5 * (hi - lo) * (1.0 + 1e-9) + 1e-12;
        for (auto& [g, i] : local) where_[g] = {id, i};
        blocks_.push_back(std::move(blk));
    }

    Operator H_, L_, Ld_;
    bath::DiscretizedBath db_;
    long long bound_;
    Eigen::Index d_ = 0;
    std::vector<long long> stride_;
    std::unordered_map<long long, std::pair<int, Eigen::Index>> where_;
    std::vector<std::unique_ptr<Block>> blocks_;
    std::mutex mu_;
};

using Sparse = std::map<int, Eigen::VectorXcd>;   // block id -> local amplitudes

} // namespace

struct ExactCorrelator::Impl {
    Method method = Method::subspace;
    double discarded = 0.0;

    // subspace path
    std::unique_ptr<Subspace> space;
    struct Seed {
        double w;
        Sparse psi;
    };
    std::vector<Seed> seeds;

    // factorized path
    Eigen::MatrixXcd W;                 // joint eigenbasis columns
    Eigen::VectorXd E;                  // system energies
    std::vector<int> branch;            // system eigen index -> distinct coupling eigenvalue
    std::vector<std::vector<Eigen::MatrixXcd>> Q;   // [mode][branch]
    std::vector<std::vector<Eigen::VectorXd>> eps;
    std::vector<Eigen::VectorXd> r;     // Gibbs diagonal per mode

    Sparse apply_system(const Operator& A, const Sparse& x) {
        Sparse out;
        const Eigen::Index d = space->system_dim();
        for (const auto& [bid, v] : x) {
            // blocks are heap-allocated, so this survives locate() growing the list
            const std::vector<long long>& states = space->block(bid).states;
            for (Eigen::Index j = 0; j < v.size(); ++j) {
                if (v(j) == cd{}) continue;
                const long long g = states[static_cast<std::size_t>(j)];
                const int s = space->system_of(g);
                for (Eigen::Index sp = 0; sp < d; ++sp) {
                    const cd a = A(sp, s);
                    if (a == cd{}) continue;
                    auto [b2, i2] = space->locate(g - s + sp);
                    auto& dst = out[b2];
                    if (dst.size() == 0) dst = Eigen::VectorXcd::Zero(space->block(b2).size());
                    dst(i2) += a * v(j);
                }
            }
        }
        return out;
    }
};

ExactCorrelator::~ExactCorrelator() = default;
ExactCorrelator::ExactCorrelator(ExactCorrelator&&) noexcept = default;
ExactCorrelator& ExactCorrelator::operator=(ExactCorrelator&&) noexcept = default;

ExactCorrelator::ExactCorrelator(SystemModel model, bath::DiscretizedBath db, bath::Temperature T,
                                 DensityMatrix rho0, OracleOptions opt)
    : model_(std::move(model)), db_(std::move(db)), T_(T), rho0_(std::move(rho0)), opt_(opt),
      impl_(std::make_unique<Impl>()) {
    model_.validate();
    db_.validate();
    if (rho0_.dim() != model_.dim()) throw InvalidInput("oracle: initial state dimension mismatch");
    check_thermal_truncation(db_, T_, opt_.tail_tol);
    const Operator& H = model_.hamiltonian;
    const Operator& L = model_.coupling;
    const bool commuting = op::max_abs(op::commutator(H, L)) <= 1e-12 * std::max(1.0, op::max_abs(H) * op::max_abs(L)) &&
                           op::is_normal(L);
    Method m = opt_.method;
    if (m == Method::automatic) m = commuting ? Method::factorized : Method::subspace;
    if (m == Method::factorized && !commuting)
        throw InvalidInput("factorized oracle needs a normal coupling commuting with H_S");
    impl_->method = m;

    if (m == Method::subspace) {
        impl_->space = std::make_unique<Subspace>(model_, db_, opt_.component_bound);
        auto& sp = *impl_->space;
        Eigen::SelfAdjointEigenSolver<Operator> es(rho0_.matrix());
        const std::size_t N = db_.size();
        std::vector<std::vector<double>> p(N);
        for (std::size_t l = 0; l < N; ++l) p[l] = truncated_gibbs(db_.modes[l].omega, T_, db_.fock_cutoffs[l]);
        // enumerate bath configurations above the weight floor
        std::vector<std::pair<double, std::vector<int>>> configs;
        std::vector<int> n(N, 0);
        double kept = 0.0;
        auto rec = [&](auto&& self, std::size_t l, double w) -> void {
            if (l == N) {
                configs.emplace_back(w, n);
                kept += w;
                return;
            }
            for (int k = 0; k < db_.fock_cutoffs[l]; ++k) {
                const double w2 = w * p[l][static_cast<std::size_t>(k)];
                if (w2 < opt_.weight_floor) break;   // weights decrease with k
                n[l] = k;
                self(self, l + 1, w2);
            }
            n[l] = 0;
        };
        rec(rec, 0, 1.0);
        impl_->discarded = std::max(0.0, 1.0 - kept);
        const Eigen::Index d = model_.dim();
        for (Eigen::Index a = 0; a < d; ++a) {
            const double wa = es.eigenvalues()(a);
            if (wa < 1e-14) continue;
            const Eigen::VectorXcd v = es.eigenvectors().col(a);
            for (const auto& [wb, cfg] : configs) {
                const long long base = sp.bath_index(cfg);
                Sparse x;
                for (Eigen::Index s = 0; s < d; ++s) {
                    if (v(s) == cd{}) continue;
                    auto [bid, i] = sp.locate(base + s);
                    auto& dst = x[bid];
                    if (dst.size() == 0) dst = Eigen::VectorXcd::Zero(sp.block(bid).size());
                    dst(i) += v(s);
                }
                impl_->seeds.push_back({wa * wb / kept, std::move(x)});
            }
        }
    } else {
        // joint eigenbasis of H, L, L^dag from a generic Hermitian combination
        const Eigen::Index d = model_.dim();
        const double sH = std::max(1.0, op::max_abs(H)), sL = std::max(1.0, op::max_abs(L));
        bool ok = false;
        for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
            const double m1 = (0.5772156649 + 0.1 * attempt) * sH / sL, m2 = (0.3183098862 + 0.07 * attempt) * sH / sL;
            const Operator M = H + m1 * (L + L.adjoint()) + m2 * I * (L.adjoint() - L);
            Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (M + M.adjoint()));
            impl_->W = es.eigenvectors();
            const Operator Hd = impl_->W.adjoint() * H * impl_->W, Ldg = impl_->W.adjoint() * L * impl_->W;
            Operator offH = Hd, offL = Ldg;
            offH.diagonal().setZero();
            offL.diagonal().setZero();
            ok = op::max_abs(offH) < 1e-10 * sH && op::max_abs(offL) < 1e-10 * sL;
            if (ok) {
                impl_->E = Hd.diagonal().real();
                std::vector<cd> distinct;
                impl_->branch.assign(static_cast<std::size_t>(d), 0);
                for (Eigen::Index a = 0; a < d; ++a) {
                    const cd ell = Ldg(a, a);
                    std::size_t b = 0;
                    while (b < distinct.size() && std::abs(distinct[b] - ell) > 1e-12 * sL) ++b;
                    if (b == distinct.size()) distinct.push_back(ell);
                    impl_->branch[static_cast<std::size_t>(a)] = static_cast<int>(b);
                }
                for (std::size_t l = 0; l < db_.size(); ++l) {
                    const int nc = db_.fock_cutoffs[l];
                    const Operator a = op::annihilation(nc), ad = a.adjoint();
                    std::vector<Eigen::MatrixXcd> ql;
                    std::vector<Eigen::VectorXd> el;
                    for (const cd& ell : distinct) {
                        const Operator h = db_.modes[l].omega * ad * a + db_.modes[l].g * (std::conj(ell) * a + ell * ad);
                        auto eg = op::diagonalize(h, 1e-10);
                        ql.push_back(eg.vectors);
                        el.push_back(eg.energies);
                    }
                    impl_->Q.push_back(std::move(ql));
                    impl_->eps.push_back(std::move(el));
                    auto p = truncated_gibbs(db_.modes[l].omega, T_, nc);
                    impl_->r.push_back(Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
                }
            }
        }
        if (!ok) throw NumericalFailure("factorized oracle: could not find a joint eigenbasis of H_S and L");
    }
}

Method ExactCorrelator::method() const { return impl_->method; }
double ExactCorrelator::discarded_weight() const { return impl_->discarded; }
std::size_t ExactCorrelator::largest_block() const { return impl_->space ? impl_->space->largest() : 0; }

std::vector<cd> ExactCorrelator::two_time(const Operator& A, const Operator& B, double t2,
                                          const std::vector<double>& t1) const {
    const Eigen::Index d = model_.dim();
    if (A.rows() != d || A.cols() != d || B.rows() != d || B.cols() != d)
        throw InvalidInput("oracle: operator dimension mismatch");
    if (!(t2 >= 0.0)) throw InvalidInput("oracle: t2 must be >= 0");
    for (double t : t1)
        if (t < t2 - 1e-12) throw InvalidInput("oracle: requires t1 >= t2");
    std::vector<cd> out(t1.size(), cd{});
    auto& im = *impl_;

    if (im.method == Method::subspace) {
        auto& sp = *im.space;
        std::vector<std::size_t> order(t1.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return t1[x] < t1[y]; });
        auto evolve = [&](Sparse& x, double dt) {
            for (auto& [bid, v] : x) sp.block(bid).evolve(v, dt);
        };
        // <A(t1) B(t2)> = sum_seeds w <phi(tau)| A |chi(tau)>, phi = U(t1) psi, chi = U(tau) B U(t2) psi
        for (const auto& seed : im.seeds) {
            Sparse phi = seed.psi;
            evolve(phi, t2);
            Sparse chi = im.apply_system(B, phi);
            double tau_prev = 0.0;
            for (std::size_t k : order) {
                const double tau = t1[k] - t2;
                evolve(phi, tau - tau_prev);
                evolve(chi, tau - tau_prev);
                tau_prev = tau;
                const Sparse Achi = im.apply_system(A, chi);
                cd val{};
                for (const auto& [bid, v] : Achi) {
                    auto it = phi.find(bid);
                    if (it != phi.end()) val += it->second.dot(v);
                }
                out[k] += seed.w * val;
            }
        }
        return out;
    }

    // factorized path
    const Operator Ap = im.W.adjoint() * A * im.W, Bp = im.W.adjoint() * B * im.W;
    const Operator Rp = im.W.adjoint() * rho0_.matrix() * im.W;
    const double scale = std::max(1.0, op::max_abs(A)) * std::max(1.0, op::max_abs(B));
    struct Triple {
        Eigen::Index a, b, c;
        cd coef;
    };
    std::vector<Triple> tr;
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            for (Eigen::Index c = 0; c < d; ++c) {
                const cd v = Ap(a, b) * Bp(b, c) * Rp(c, a);
                if (std::abs(v) > 1e-15 * scale) tr.push_back({a, b, c, v});
            }
    const std::size_t N = db_.size();
    auto vprop = [&](std::size_t l, int br, double t) {
        const auto& Ql = im.Q[l][static_cast<std::size_t>(br)];
        return Eigen::MatrixXcd(Ql * phases(im.eps[l][static_cast<std::size_t>(br)], t).asDiagonal() * Ql.adjoint());
    };
    // X_l(b,c) = v_b^dag(t2) v_c(t2) r_l for the (b,c) branch pairs in use
    std::map<std::pair<int, int>, std::vector<Eigen::MatrixXcd>> X;
    for (const auto& t : tr) {
        const int bb = im.branch[static_cast<std::size_t>(t.b)], bc = im.branch[static_cast<std::size_t>(t.c)];
        auto& x = X[{bb, bc}];
        if (!x.empty()) continue;
        for (std::size_t l = 0; l < N; ++l)
            x.push_back(vprop(l, bb, t2).adjoint() * vprop(l, bc, t2) * im.r[l].asDiagonal());
    }
    const int nb = 1 + *std::max_element(im.branch.begin(), im.branch.end());
    for (std::size_t k = 0; k < t1.size(); ++k) {
        std::vector<std::vector<Eigen::MatrixXcd>> V(N);
        for (std::size_t l = 0; l < N; ++l)
            for (int b = 0; b < nb; ++b) V[l].push_back(vprop(l, b, t1[k]));
        for (const auto& t : tr) {
            const int ba = im.branch[static_cast<std::size_t>(t.a)], bb = im.branch[static_cast<std::size_t>(t.b)];
            const int bc = im.branch[static_cast<std::size_t>(t.c)];
            const auto& x = X.at({bb, bc});
            cd prod = t.coef * std::polar(1.0, (im.E(t.a) - im.E(t.b)) * t1[k] + (im.E(t.b) - im.E(t.c)) * t2);
            for (std::size_t l = 0; l < N; ++l) {
                const Eigen::MatrixXcd Y = V[l][static_cast<std::size_t>(ba)].adjoint() * V[l][static_cast<std::size_t>(bb)];
                prod *= (Y.cwiseProduct(x[l].transpose())).sum();
            }
            out[k] += prod;
        }
    }
    return out;
}

cd ExactCorrelator::two_time(const Operator& A, const Operator& B, double t1, double t2) const {
    return two_time(A, B, t2, std::vector<double>{t1})[0];
}

std::vector<cd> ExactCorrelator::single_time(const Operator& A, const std::vector<double>& times) const {
    return two_time(A, op::identity(model_.dim()), 0.0, times);
}

cd exact_two_time(const SystemModel& model, const bath::DiscretizedBath& db, bath::Temperature T,
                  const DensityMatrix& rho0, const Operator& A, const Operator& B, double t1, double t2) {
    return ExactCorrelator(model, db, T, rho0).two_time(A, B, t1, t2);
}

} // namespace nmqrt::oracle
