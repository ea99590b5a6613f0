#include "doctest.h"

#include "nmqrt/errors.hpp"
#include "nmqrt/model.hpp"
#include "unit/helpers.hpp"

using namespace nmqrt;

TEST_SUITE("model") {

TEST_CASE("two-level presets") {
    const auto m = two_level(3.0, CouplingPreset::sigma_minus);
    CHECK(m.dim() == 2);
    CHECK(m.hamiltonian(0, 0).real() == doctest::Approx(1.5));
    CHECK(m.hamiltonian(1, 1).real() == doctest::Approx(-1.5));
    CHECK(op::max_abs(m.coupling - op::sigma_minus()) == 0.0);
    CHECK(op::max_abs(coupling_matrix(CouplingPreset::sigma_x) - op::sigma_x()) == 0.0);
    for (auto c : {CouplingPreset::sigma_minus, CouplingPreset::sigma_z, CouplingPreset::sigma_x})
        CHECK(coupling_from_string(to_string(c)) == c);
    CHECK_THROWS_AS(coupling_from_string("sigma_q"), InvalidInput);
}

TEST_CASE("model validation") {
    SystemModel m{op::sigma_x(), op::identity(3)};
    CHECK_THROWS_AS(m.validate(), InvalidInput);
    SystemModel n{op::sigma_minus(), op::sigma_z()};
    CHECK_THROWS_AS(n.validate(), InvalidInput);
    CHECK_THROWS_AS(two_level(std::numeric_limits<double>::infinity(), CouplingPreset::sigma_z), InvalidInput);
}

TEST_CASE("density matrices") {
    const auto rho = testing::fig1_state();
    CHECK(rho.matrix()(0, 0).real() == doctest::Approx(0.75));
    CHECK(rho.matrix()(0, 1).real() == doctest::Approx(std::sqrt(3.0) / 4.0));
    CHECK(rho.min_eigenvalue() == doctest::Approx(0.0).epsilon(1e-12));
    // unnormalized vectors are normalized
    op::State v(2);
    v << 2.0, 0.0;
    CHECK(DensityMatrix::pure(v).matrix()(0, 0).real() == doctest::Approx(1.0));
    CHECK(DensityMatrix::maximally_mixed(4).matrix()(3, 3).real() == doctest::Approx(0.25));

    op::Operator bad = op::identity(2);
    CHECK_THROWS_AS(DensityMatrix{bad}, InvalidInput);                     // trace 2
    bad = 0.5 * op::identity(2) + 0.1 * op::sigma_plus();
    CHECK_THROWS_AS(DensityMatrix{bad}, InvalidInput);                     // not Hermitian
    bad = op::Operator(Eigen::Vector2cd(1.2, -0.2).asDiagonal());
    CHECK_THROWS_AS(DensityMatrix{bad}, InvalidInput);                     // negative
    CHECK_THROWS_AS(DensityMatrix::pure(op::State::Zero(2)), InvalidInput);

    const auto chk = inspect_state(rho.matrix());
    CHECK(chk.trace_error < 1e-15);
    CHECK(chk.hermiticity_error < 1e-15);
}

}
