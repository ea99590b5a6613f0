#include "doctest.h"

#include <algorithm>

#include "nmqrt/errors.hpp"
#include "nmqrt/oracle.hpp"
#include "unit/helpers.hpp"

using namespace nmqrt;
using namespace nmqrt::oracle;

namespace {

bath::DiscretizedBath two_modes(double g, int nc) {
    bath::DiscretizedBath db;
    db.modes = {{1.5, g}, {2.5, 0.8 * g}};
    db.fock_cutoffs = {nc, nc};
    return db;
}

// brute force on the full composite space
cd dense_reference(const SystemModel& m, const bath::DiscretizedBath& db, bath::Temperature T, const DensityMatrix& rho,
                   const op::Operator& A, const op::Operator& B, double t1, double t2) {
    const auto H = build_total_hamiltonian(m, db);
    const auto R = thermal_bath_state(db, T);
    const op::Operator rho_tot = op::kron(rho.matrix(), R);
    const auto nb = R.rows();
    const op::Operator Af = op::kron(A, op::identity(nb)), Bf = op::kron(B, op::identity(nb));
    const auto U1 = op::propagator(H, t1), U2 = op::propagator(H, t2);
    return (U1.adjoint() * Af * U1 * U2.adjoint() * Bf * U2 * rho_tot).trace();
}

} // namespace

TEST_SUITE("oracle") {

TEST_CASE("composite dimension") {
    CHECK(composite_dimension(2, {3, 4}) == 24);
    CHECK(composite_dimension(2, {}) == 2);
    CHECK(composite_dimension(2, std::vector<int>(80, 4)) == -1);
}

TEST_CASE("total hamiltonian structure") {
    const auto m = two_level(3.0, CouplingPreset::sigma_minus);
    const auto H = build_total_hamiltonian(m, two_modes(0.3, 3));
    CHECK(H.rows() == 18);
    CHECK(op::is_hermitian(H));
    // no modes -> system Hamiltonian
    CHECK(op::max_abs(build_total_hamiltonian(m, bath::DiscretizedBath{}) - m.hamiltonian) == 0.0);
    // uncoupled -> sums of system and bath energies
    const auto H0 = build_total_hamiltonian(m, two_modes(0.0, 3));
    std::vector<double> e, ref;
    for (Eigen::Index i = 0; i < H0.rows(); ++i) e.push_back(H0(i, i).real());
    for (double s : {1.5, -1.5})
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) ref.push_back(s + 1.5 * a + 2.5 * b);
    CHECK(testing::max_diff(e, ref) < 1e-14);
    CHECK(op::max_abs(H0 - op::Operator(H0.diagonal().asDiagonal())) == 0.0);
    CHECK_THROWS_AS(build_total_hamiltonian(m, two_modes(0.3, 3), 10), InvalidInput);
}

TEST_CASE("thermal bath state") {
    bath::DiscretizedBath db;
    db.modes = {{1.0, 0.1}};
    db.fock_cutoffs = {40};
    const bath::Temperature T{1.0};
    const auto R = thermal_bath_state(db, T);
    CHECK(std::abs(R.trace() - 1.0) < 1e-14);
    const op::Operator n = op::creation(40) * op::annihilation(40);
    CHECK((n * R).trace().real() == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-12));
    const auto p = truncated_gibbs(1.0, T, 3);
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0));
    CHECK(p[1] / p[0] == doctest::Approx(std::exp(-1.0)));
    CHECK(truncated_gibbs(1.0, bath::Temperature{0.0}, 3)[0] == 1.0);
    // two modes: product state, purity multiplies
    db.modes = {{1.0, 0.1}, {2.0, 0.1}};
    db.fock_cutoffs = {20, 20};
    const auto R2 = thermal_bath_state(db, T);
    auto purity = [](double w) { return std::tanh(w / 2.0); };
    CHECK((R2 * R2).trace().real() == doctest::Approx(purity(1.0) * purity(2.0)).epsilon(1e-8));
}

TEST_CASE("thermal truncation checks") {
    auto db = two_modes(0.2, 2);
    CHECK_THROWS_AS(check_thermal_truncation(db, bath::Temperature{1.0}), InvalidInput);
    try {
        check_thermal_truncation(db, bath::Temperature{1.0});
    } catch (const InvalidInput& e) {
        const int need = bath::thermal_fock_cutoff(1.5, bath::Temperature{1.0});
        CHECK(std::string(e.what()).find(std::to_string(need)) != std::string::npos);
    }
    CHECK_NOTHROW(check_thermal_truncation(db, bath::Temperature{0.0}));
    const auto up = with_thermal_cutoffs(db, bath::Temperature{1.0});
    CHECK(up.fock_cutoffs[0] == bath::thermal_fock_cutoff(1.5, bath::Temperature{1.0}));
    CHECK_NOTHROW(check_thermal_truncation(up, bath::Temperature{1.0}));
    db.fock_cutoffs = {30, 30};
    CHECK(with_thermal_cutoffs(db, bath::Temperature{1.0}).fock_cutoffs[0] == 30);
    // displacement of a sigma_z coupled mode
    bath::DiscretizedBath one;
    one.modes = {{1.0, 0.5}};
    one.fock_cutoffs = {2};
    const auto disp = with_displacement_cutoffs(one, op::sigma_z(), bath::Temperature{0.0});
    CHECK(disp.fock_cutoffs[0] > 8);
}

TEST_CASE("subspace method against dense propagation") {
    const auto m = two_level(3.0, CouplingPreset::sigma_minus);
    const auto db = two_modes(0.3, 3);
    const bath::Temperature T{0.3};
    OracleOptions o;
    o.weight_floor = 0.0;
    const ExactCorrelator ex(m, db, T, testing::fig1_state(), o);
    CHECK(ex.method() == Method::subspace);
    CHECK(ex.discarded_weight() < 1e-14);
    CHECK(ex.largest_block() <= 18);
    const std::vector<double> t1{1.0, 1.7, 3.2, 6.0};
    for (auto [A, B] : {std::pair{op::sigma_plus(), op::sigma_minus()}, std::pair{op::sigma_z(), op::sigma_z()},
                        std::pair{op::sigma_minus(), op::sigma_z()}}) {
        const auto v = ex.two_time(A, B, 1.0, t1);
        for (std::size_t i = 0; i < t1.size(); ++i)
            CHECK(std::abs(v[i] - dense_reference(m, db, T, testing::fig1_state(), A, B, t1[i], 1.0)) < 1e-10);
    }
    const auto sz = ex.single_time(op::sigma_z(), {0.0, 2.0});
    CHECK(std::abs(sz[0] - 0.5) < 1e-13);
    CHECK(std::abs(sz[1] - dense_reference(m, db, T, testing::fig1_state(), op::sigma_z(), op::identity(2), 2.0, 0.0)) <
          1e-10);
    CHECK(std::abs(ex.two_time(op::sigma_z(), op::sigma_z(), 1.2, 1.2) - 1.0) < 1e-12);
}

TEST_CASE("factorized method against dense propagation") {
    const auto m = two_level(3.0, CouplingPreset::sigma_z);
    const auto db = two_modes(0.3, 5);
    const bath::Temperature T{0.3};
    OracleOptions o;
    o.weight_floor = 0.0;
    const ExactCorrelator fac(m, db, T, testing::fig1_state(), o);
    CHECK(fac.method() == Method::factorized);
    o.method = Method::subspace;
    const ExactCorrelator sub(m, db, T, testing::fig1_state(), o);
    for (double t1 : {1.0, 2.0, 4.5}) {
        const cd ref = dense_reference(m, db, T, testing::fig1_state(), op::sigma_plus(), op::sigma_minus(), t1, 1.0);
        CHECK(std::abs(fac.two_time(op::sigma_plus(), op::sigma_minus(), t1, 1.0) - ref) < 1e-10);
        CHECK(std::abs(sub.two_time(op::sigma_plus(), op::sigma_minus(), t1, 1.0) - ref) < 1e-10);
    }
    o.method = Method::factorized;
    CHECK_THROWS_AS(ExactCorrelator(two_level(3.0, CouplingPreset::sigma_x), db, T, testing::fig1_state(), o),
                    InvalidInput);
}

TEST_CASE("uncoupled modes leave the system free") {
    const auto m = two_level(3.0, CouplingPreset::sigma_minus);
    const ExactCorrelator ex(m, two_modes(0.0, 4), bath::Temperature{0.3}, testing::fig1_state());
    for (double t1 : {1.0, 2.0, 5.0})
        CHECK(std::abs(ex.two_time(op::sigma_plus(), op::sigma_minus(), t1, 1.0) - 0.75 * std::polar(1.0, 3.0 * (t1 - 1.0))) <
              1e-11);
    const ExactCorrelator none(m, bath::DiscretizedBath{}, bath::Temperature{1.0}, testing::fig1_state());
    CHECK(std::abs(none.two_time(op::sigma_z(), op::sigma_z(), 3.0, 1.0) - 1.0) < 1e-12);
}

TEST_CASE("excitation number is conserved for sigma_minus coupling") {
    // rotating-wave coupling conserves sigma_z/2 + sum a^dag a; at T = 0 from |e> the
    // total stays 1/2, so the single excitation just moves around
    const auto m = two_level(1.0, CouplingPreset::sigma_minus);
    bath::DiscretizedBath db;
    db.modes = {{0.9, 0.2}, {1.1, 0.2}};
    db.fock_cutoffs = {2, 2};
    op::State e(2);
    e << 1.0, 0.0;
    const ExactCorrelator ex(m, db, bath::Temperature{0.0}, DensityMatrix::pure(e));
    const auto sz = ex.single_time(op::sigma_z(), {0.0, 3.0, 10.0});
    CHECK(sz[0].real() == doctest::Approx(1.0));
    CHECK(sz[1].real() < 0.99);
    CHECK(std::abs(sz[2].imag()) < 1e-12);
    const auto ref = dense_reference(m, db, bath::Temperature{0.0}, DensityMatrix::pure(e), op::sigma_z(), op::identity(2), 10.0, 0.0);
    CHECK(std::abs(sz[2] - ref) < 1e-10);
}

TEST_CASE("oracle input validation") {
    const auto m = two_level(3.0, CouplingPreset::sigma_minus);
    CHECK_THROWS_AS(ExactCorrelator(m, two_modes(0.3, 2), bath::Temperature{1.0}, testing::fig1_state()), InvalidInput);
    CHECK_THROWS_AS(ExactCorrelator(m, two_modes(0.3, 3), bath::Temperature{0.3}, DensityMatrix::maximally_mixed(3)),
                    InvalidInput);
    OracleOptions o;
    o.component_bound = 4;
    CHECK_THROWS_AS(ExactCorrelator(m, two_modes(0.3, 3), bath::Temperature{0.3}, testing::fig1_state(), o), InvalidInput);
    const ExactCorrelator ex(m, two_modes(0.3, 3), bath::Temperature{0.3}, testing::fig1_state());
    CHECK_THROWS_AS(ex.two_time(op::sigma_z(), op::sigma_z(), 1.0, std::vector<double>{0.5}), InvalidInput);
}

}
