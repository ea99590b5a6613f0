// operator_algebra.cpp - dense operator helpers and eigenoperator decomposition
#include "nmqrt/operator_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nmqrt/errors.hpp"

namespace nmqrt::op {

Operator identity(Eigen::Index d) {
    if (d < 1) throw InvalidInput("identity: dimension must be >= 1");
    return Operator::Identity(d, d);
}

Operator sigma_plus() {
    Operator m = Operator::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

Operator sigma_minus() {
    Operator m = Operator::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

Operator sigma_x() { return sigma_plus() + sigma_minus(); }

Operator sigma_y() { return -I * (sigma_plus() - sigma_minus()); }

Operator sigma_z() {
    Operator m = Operator::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

Operator annihilation(Eigen::Index levels) {
    if (levels < 1) throw InvalidInput("annihilation: need at least one level");
    Operator a = Operator::Zero(levels, levels);
    for (Eigen::Index n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Operator creation(Eigen::Index levels) { return annihilation(levels).adjoint(); }

void require_square(const Operator& a, const char* name) {
    if (a.rows() < 1 || a.rows() != a.cols())
        throw InvalidInput(std::string(name) + ": operator must be square with dim >= 1");
    if (!a.allFinite()) throw InvalidInput(std::string(name) + ": non-finite entries");
}

double max_abs(const Operator& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Operator& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return max_abs(a - a.adjoint()) <= tol * std::max(1.0, max_abs(a));
}

bool is_normal(const Operator& a, double tol) {
    if (a.rows() != a.cols()) return false;
    Operator c = a * a.adjoint() - a.adjoint() * a;
    return max_abs(c) <= tol * std::max(1.0, max_abs(a) * max_abs(a));
}

Operator commutator(const Operator& a, const Operator& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        throw InvalidInput("commutator: dimension mismatch");
    return a * b - b * a;
}

Operator anticommutator(const Operator& a, const Operator& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        throw InvalidInput("anticommutator: dimension mismatch");
    return a * b + b * a;
}

Operator dagger(const Operator& a) { return a.adjoint(); }

HermitianEigen diagonalize(const Operator& h, double herm_tol) {
    require_square(h, "diagonalize");
    if (!is_hermitian(h, herm_tol)) throw InvalidInput("diagonalize: operator is not Hermitian");
    Operator hs = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> es(hs);
    if (es.info() != Eigen::Success) throw NumericalFailure("diagonalize: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Operator propagator(const Operator& H, double t) {
    auto eig = diagonalize(H);
    Eigen::VectorXcd ph(eig.energies.size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::exp(-I * eig.energies(i) * t);
    return eig.vectors * ph.asDiagonal() * eig.vectors.adjoint();
}

Operator interaction_picture(const Operator& L, const Operator& H, double t) {
    require_square(L, "interaction_picture");
    if (L.rows() != H.rows()) throw InvalidInput("interaction_picture: dimension mismatch");
    Operator U = propagator(H, t);
    return U.adjoint() * L * U;
}

EigenoperatorDecomposition::EigenoperatorDecomposition(std::vector<EigenoperatorTerm> terms)
    : terms_(std::move(terms)) {}

Operator EigenoperatorDecomposition::reassemble() const {
    if (terms_.empty()) return Operator();
    Operator s = Operator::Zero(terms_[0].component.rows(), terms_[0].component.cols());
    for (const auto& t : terms_) s += t.component;
    return s;
}

Operator EigenoperatorDecomposition::evaluate(double s) const {
    if (terms_.empty()) return Operator();
    Operator out = Operator::Zero(terms_[0].component.rows(), terms_[0].component.cols());
    for (const auto& t : terms_) out += std::exp(-I * t.frequency * s) * t.component;
    return out;
}

std::vector<double> EigenoperatorDecomposition::frequencies() const {
    std::vector<double> w;
    w.reserve(terms_.size());
    for (const auto& t : terms_) w.push_back(t.frequency);
    return w;
}

EigenoperatorDecomposition eigenoperator_decompose(const Operator& L, const Operator& H,
                                                   double degeneracy_tol) {
    require_square(L, "eigenoperator_decompose");
    if (L.rows() != H.rows()) throw InvalidInput("eigenoperator_decompose: dimension mismatch");
    auto eig = diagonalize(H);
    const Eigen::Index d = L.rows();
    Operator Lt = eig.vectors.adjoint() * L * eig.vectors;

    struct Entry { double w; Eigen::Index a, b; };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(d * d));
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b)
            entries.push_back({eig.energies(b) - eig.energies(a), a, b});
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& x, const Entry& y) { return x.w < y.w; });

    // chain-group sorted Bohr frequencies closer than the tolerance
    std::vector<EigenoperatorTerm> terms;
    const double scale = std::max(1.0, max_abs(L));
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i + 1;
        while (j < entries.size() && entries[j].w - entries[j - 1].w < degeneracy_tol) ++j;
        Operator comp = Operator::Zero(d, d);
        double wsum = 0.0;
        for (std::size_t k = i; k < j; ++k) {
            comp(entries[k].a, entries[k].b) = Lt(entries[k].a, entries[k].b);
            wsum += entries[k].w;
        }
        double w = wsum / static_cast<double>(j - i);
        if (std::abs(w) < degeneracy_tol) w = 0.0;
        if (max_abs(comp) > 1e-15 * scale)
            terms.push_back({w, eig.vectors * comp * eig.vectors.adjoint()});
        i = j;
    }
    // descending frequency, so sigma_x gives (+w, sigma_-) first
    std::reverse(terms.begin(), terms.end());
    return EigenoperatorDecomposition(std::move(terms));
}

Operator kron(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Operator tensor_embed(const std::vector<Operator>& ops) {
    if (ops.empty()) throw InvalidInput("tensor_embed: empty operator list");
    Operator out = ops.front();
    for (std::size_t k = 1; k < ops.size(); ++k) {
        if (ops[k].rows() < 1) throw InvalidInput("tensor_embed: empty factor");
        out = kron(out, ops[k]);
    }
    return out;
}

} // namespace nmqrt::op
