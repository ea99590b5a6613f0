#include "doctest.h"

#include "nmqrt/errors.hpp"
#include "nmqrt/tcl2.hpp"
#include "nmqrt/two_time.hpp"
#include "unit/helpers.hpp"

using namespace nmqrt;
using coef::EvolutionMode;

namespace {

std::shared_ptr<const bath::CorrelationTable> zero_table(double step, double t_max) {
    const auto n = static_cast<std::size_t>(std::llround(t_max / step)) + 1;
    return std::make_shared<bath::CorrelationTable>(step, std::vector<cd>(n), std::vector<cd>(n), 1e-10, true);
}

op::Operator random_operator(int d, unsigned seed) {
    std::srand(seed);
    return op::Operator::Random(d, d);
}

} // namespace

TEST_SUITE("tcl2") {

TEST_CASE("default step rule") {
    CHECK(tcl2::default_step({3.0, -3.0}, 5.0) == doctest::Approx(0.01));
    CHECK(tcl2::default_step({3.0}, 40.0) == doctest::Approx(1.0 / 800.0));
    CHECK(tcl2::default_step({12.0}, 1.0) == doctest::Approx(1.0 / 240.0));
    CHECK(tcl2::default_step({0.1}, 0.1) == doctest::Approx(0.01));
}

TEST_CASE("generator preserves trace and hermiticity for arbitrary rates") {
    for (auto c : {CouplingPreset::sigma_minus, CouplingPreset::sigma_x, CouplingPreset::sigma_z}) {
        const auto m = two_level(3.0, c);
        const tcl2::Generator gen(m, op::eigenoperator_decompose(m.coupling, m.hamiltonian));
        const std::size_t n = gen.decomposition().size();
        std::vector<cd> ga(n), gb(n);
        for (std::size_t k = 0; k < n; ++k) {
            ga[k] = cd(0.3 + 0.1 * k, -0.7 + 0.2 * k);
            gb[k] = cd(0.05 * k + 0.02, 0.4);
        }
        op::Operator X = random_operator(2, 7);
        X = (X + X.adjoint()).eval();
        const auto Y = gen.apply(ga, gb, X);
        CHECK(std::abs(Y.trace()) < 1e-13);
        CHECK(op::max_abs(Y - Y.adjoint()) < 1e-13);
        // superoperator matrix matches apply on a non-Hermitian input
        const op::Operator Z = random_operator(2, 11);
        const auto S = gen.superoperator(ga, gb);
        const Eigen::VectorXcd v = S * Eigen::Map<const Eigen::VectorXcd>(Z.data(), Z.size());
        const auto W = gen.apply(ga, gb, Z);
        CHECK((v - Eigen::Map<const Eigen::VectorXcd>(W.data(), W.size())).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("zero rates give unitary evolution") {
    const auto m = two_level(3.0, CouplingPreset::sigma_minus);
    const tcl2::Generator gen(m, op::eigenoperator_decompose(m.coupling, m.hamiltonian));
    const coef::KernelSet ks(zero_table(0.0025, 4.0), gen.decomposition().frequencies(), EvolutionMode::non_markov_full);
    const auto rho0 = testing::fig1_state();
    const auto traj = tcl2::propagate_density(gen, ks, rho0, 4.0);
    CHECK(traj.stats.step == doctest::Approx(0.01));
    CHECK(traj.stats.steps == 400);
    for (double t : {0.0, 1.0, 2.5, 4.0}) {
        const auto U = op::propagator(m.hamiltonian, t);
        const op::Operator exact = U * rho0.matrix() * U.adjoint();
        // RK4 phase error at w h = 0.03
        CHECK(op::max_abs(traj.at_time(t) - exact) < 1e-7);
    }
    const auto sp = tcl2::single_time_expectation(op::sigma_plus(), traj);
    CHECK(sp.size() == traj.times.size());
    CHECK(std::abs(sp.back() - std::sqrt(3.0) / 4.0 * std::polar(1.0, 3.0 * 4.0)) < 1e-7);
    CHECK_THROWS_AS(traj.at_time(0.005), InvalidInput);
    CHECK_THROWS_AS(tcl2::propagate_density(gen, ks, rho0, 5.0), InvalidInput);
    CHECK_THROWS_AS(tcl2::propagate_density(gen, ks, rho0, 1.005), InvalidInput);
}

TEST_CASE("trajectory stays a density matrix") {
    const auto b = testing::bath(0.4, 5.0, 1.0);
    twotime::Engine eng(two_level(3.0, CouplingPreset::sigma_x), b, 3.0, {EvolutionMode::non_markov_full});
    const auto traj = eng.single_time(EvolutionMode::non_markov_full, testing::fig1_state(), 3.0);
    CHECK(traj.stats.max_trace_error < 1e-12);
    CHECK(traj.stats.max_hermiticity_error < 1e-12);
    CHECK_FALSE(traj.stats.negativity_beyond_tolerance);
    CHECK(traj.stats.max_error_indicator < 1e-4);
}

TEST_CASE("step halving shows fourth order convergence") {
    const auto b = testing::bath(0.1, 5.0, 1.0);
    const auto m = two_level(3.0, CouplingPreset::sigma_minus);
    std::vector<cd> ends;
    for (double h : {0.1, 0.05, 0.025}) {
        twotime::EngineOptions o;
        o.step = h;
        twotime::Engine eng(m, b, 2.0, {EvolutionMode::non_markov_full}, o);
        const auto traj = eng.single_time(EvolutionMode::non_markov_full, testing::fig1_state(), 2.0);
        ends.push_back(traj.states.back()(0, 1));
    }
    const double order = std::log2(std::abs(ends[0] - ends[1]) / std::abs(ends[1] - ends[2]));
    CHECK(order > 3.5);
    CHECK(order < 4.6);
}

TEST_CASE("spin-boson scalar path matches the general generator") {
    const auto b = testing::bath(0.1, 5.0, 1.0);
    const auto m = two_level(3.0, CouplingPreset::sigma_minus);
    for (auto mode : {EvolutionMode::markov_qrt, EvolutionMode::non_markov_full}) {
        twotime::Engine eng(m, b, 3.0, {mode});
        const auto rho0 = testing::fig1_state();
        const auto traj = eng.single_time(mode, rho0, 3.0);
        const auto& r = rho0.matrix();
        const auto sb = tcl2::spin_boson_single_time((op::sigma_plus() * r).trace(), (op::sigma_minus() * r).trace(),
                                                     (op::sigma_z() * r).trace(), eng.kernels(mode), 3.0, 3.0);
        REQUIRE(sb.times.size() == traj.times.size());
        CHECK(testing::max_diff(sb.sigma_plus, tcl2::single_time_expectation(op::sigma_plus(), traj)) < 1e-10);
        CHECK(testing::max_diff(sb.sigma_z, tcl2::single_time_expectation(op::sigma_z(), traj)) < 1e-10);
    }
}

TEST_CASE("markov evolution relaxes to the gibbs state") {
    const auto b = testing::bath(0.1, 5.0, 1.0);
    const auto m = two_level(3.0, CouplingPreset::sigma_minus);
    const tcl2::Generator gen(m, op::eigenoperator_decompose(m.coupling, m.hamiltonian));
    const auto lim = coef::markovian_limits(*b, 3.0);
    const coef::KernelSet ks(zero_table(0.0025, 30.0), {3.0}, EvolutionMode::markov_qrt, {lim});
    const auto traj = tcl2::propagate_density(gen, ks, testing::fig1_state(), 30.0);
    const auto& rho = traj.states.back();
    const double pe = 1.0 / (1.0 + std::exp(3.0));
    CHECK(std::abs(rho(0, 0) - pe) < 1e-8);
    CHECK(std::abs(rho(0, 1)) < 1e-8);
}

TEST_CASE("invalid inputs") {
    const auto m = two_level(3.0, CouplingPreset::sigma_minus);
    const tcl2::Generator gen(m, op::eigenoperator_decompose(m.coupling, m.hamiltonian));
    const coef::KernelSet wrong(zero_table(0.0025, 1.0), {3.0, 1.0}, EvolutionMode::non_markov_qrt);
    CHECK_THROWS_AS(tcl2::propagate_density(gen, wrong, testing::fig1_state(), 1.0), InvalidInput);
    CHECK_THROWS_AS(tcl2::propagate_density(gen, wrong, DensityMatrix::maximally_mixed(3), 1.0), InvalidInput);
    SystemModel bad = m;
    bad.hamiltonian(0, 1) = 1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

}
