#include "doctest.h"

#include "nmqrt/errors.hpp"
#include "nmqrt/operator_algebra.hpp"

using namespace nmqrt;
using namespace nmqrt::op;

TEST_SUITE("operator_algebra") {

TEST_CASE("pauli algebra in the e,g ordering") {
    CHECK(max_abs(sigma_z() - Operator(Eigen::Vector2cd(1.0, -1.0).asDiagonal())) == 0.0);
    CHECK(max_abs(sigma_plus() * sigma_minus() - 0.5 * (identity(2) + sigma_z())) < 1e-15);
    CHECK(max_abs(commutator(sigma_plus(), sigma_minus()) - sigma_z()) < 1e-15);
    CHECK(max_abs(commutator(sigma_x(), sigma_y()) - 2.0 * I * sigma_z()) < 1e-15);
    CHECK(max_abs(anticommutator(sigma_x(), sigma_x()) - 2.0 * identity(2)) < 1e-15);
    CHECK(max_abs(dagger(sigma_minus()) - sigma_plus()) == 0.0);
}

TEST_CASE("ladder operators") {
    const Operator a = annihilation(5), ad = creation(5);
    CHECK(max_abs(ad - a.adjoint()) == 0.0);
    const Operator n = ad * a;
    for (int k = 0; k < 5; ++k) CHECK(n(k, k).real() == doctest::Approx(k));
    // truncation: [a, a^dag] = 1 except in the top level
    const Operator c = commutator(a, ad);
    for (int k = 0; k < 4; ++k) CHECK(c(k, k).real() == doctest::Approx(1.0));
    CHECK(c(4, 4).real() == doctest::Approx(-4.0));
    CHECK_THROWS_AS(annihilation(0), InvalidInput);
}

TEST_CASE("hermiticity and normality") {
    CHECK(is_hermitian(sigma_x()));
    CHECK_FALSE(is_hermitian(sigma_minus()));
    CHECK(is_normal(sigma_x()));
    CHECK_FALSE(is_normal(sigma_minus()));
    CHECK(is_normal(I * sigma_z()));
    CHECK_THROWS_AS(require_square(Operator(2, 3), "x"), InvalidInput);
    Operator bad = sigma_x();
    bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(require_square(bad, "x"), InvalidInput);
}

TEST_CASE("diagonalize and propagators") {
    const Operator H = 1.5 * sigma_z() + 0.3 * sigma_x();
    const auto e = diagonalize(H);
    CHECK(e.energies(0) <= e.energies(1));
    CHECK(max_abs(e.vectors * e.energies.cast<cd>().asDiagonal() * e.vectors.adjoint() - H) < 1e-13);
    const Operator U = propagator(H, 0.7);
    CHECK(max_abs(U * U.adjoint() - identity(2)) < 1e-14);
    CHECK_THROWS_AS(diagonalize(sigma_minus()), InvalidInput);
    // exp(iHt) sigma_- exp(-iHt) for H = (w/2) sigma_z
    const double w = 3.0, t = 0.4;
    const Operator Lt = interaction_picture(sigma_minus(), 0.5 * w * sigma_z(), t);
    CHECK(max_abs(Lt - std::polar(1.0, -w * t) * sigma_minus()) < 1e-14);
}

TEST_CASE("eigenoperator decomposition of sigma_x") {
    const double w = 3.0;
    const Operator H = 0.5 * w * sigma_z();
    const auto dec = eigenoperator_decompose(sigma_x(), H);
    REQUIRE(dec.size() == 2);
    // descending frequency
    CHECK(dec[0].frequency == doctest::Approx(w));
    CHECK(dec[1].frequency == doctest::Approx(-w));
    CHECK(max_abs(dec[0].component - sigma_minus()) < 1e-14);
    CHECK(max_abs(dec[1].component - sigma_plus()) < 1e-14);
    for (const auto& t : dec.terms()) CHECK(max_abs(commutator(H, t.component) + t.frequency * t.component) < 1e-13);
    CHECK(max_abs(dec.reassemble() - sigma_x()) < 1e-14);
    for (double s : {0.0, 0.3, 2.1}) CHECK(max_abs(dec.evaluate(s) - interaction_picture(sigma_x(), H, s)) < 1e-13);
}

TEST_CASE("eigenoperator decomposition edge cases") {
    const Operator H = 0.5 * 3.0 * sigma_z();
    SUBCASE("commuting coupling has one zero-frequency term") {
        const auto dec = eigenoperator_decompose(sigma_z(), H);
        REQUIRE(dec.size() == 1);
        CHECK(dec[0].frequency == 0.0);
    }
    SUBCASE("zero coupling has no terms") {
        CHECK(eigenoperator_decompose(Operator::Zero(2, 2), H).size() == 0);
    }
    SUBCASE("degenerate spectrum groups equal Bohr frequencies") {
        // three-level ladder with equal spacings: a single lowering frequency
        Operator H3 = Operator::Zero(3, 3);
        H3(0, 0) = 2.0;
        H3(1, 1) = 1.0;
        const Operator L = annihilation(3).transpose().eval();
        const auto dec = eigenoperator_decompose(L + L.adjoint().eval(), H3);
        CHECK(dec.size() == 2);
        CHECK(max_abs(dec.reassemble() - (L + L.adjoint()).eval()) < 1e-13);
    }
    SUBCASE("random hermitian H") {
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Random(4, 4);
        const Operator H4 = (A + A.adjoint()).eval();
        const Operator L = Eigen::MatrixXcd::Random(4, 4);
        const auto dec = eigenoperator_decompose(L, H4);
        CHECK(max_abs(dec.reassemble() - L) < 1e-12);
        for (const auto& t : dec.terms()) CHECK(max_abs(commutator(H4, t.component) + t.frequency * t.component) < 1e-11);
        CHECK(max_abs(dec.evaluate(1.3) - interaction_picture(L, H4, 1.3)) < 1e-12);
    }
    CHECK_THROWS_AS(eigenoperator_decompose(identity(3), H), InvalidInput);
}

TEST_CASE("tensor products") {
    const Operator k = kron(sigma_z(), identity(3));
    CHECK(k.rows() == 6);
    CHECK(k(0, 0).real() == 1.0);
    CHECK(k(3, 3).real() == -1.0);
    const Operator e = tensor_embed({sigma_x(), identity(2), sigma_z()});
    CHECK(e.rows() == 8);
    CHECK(max_abs(e - kron(kron(sigma_x(), identity(2)), sigma_z())) == 0.0);
    CHECK_THROWS_AS(tensor_embed({}), InvalidInput);
}

}
