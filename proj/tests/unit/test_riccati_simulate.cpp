#include <doctest.h>

#include "mcd/benchplant.hpp"
#include "mcd/error.hpp"
#include "mcd/linalg.hpp"
#include "mcd/riccati.hpp"
#include "mcd/simulate.hpp"
#include "support.hpp"

using namespace mcd;

TEST_CASE("scalar Riccati equations") {
    const Matrix one = Matrix::Ones(1, 1);
    const CareSolution stable = care_solve(-one, one, Matrix::Zero(1, 1), one);
    CHECK(std::abs(stable.P(0, 0)) < 1e-14);
    CHECK(std::abs(stable.L(0, 0)) < 1e-14);

    // 2 a p - p^2 c^2 / v + q = 0 with a = 1, c = 1, q = 0: p = 2
    const CareSolution unstable = care_solve(one, one, Matrix::Zero(1, 1), one);
    CHECK(unstable.P(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(unstable.L(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(1.0 - unstable.L(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("Riccati residual and stability on random detectable systems") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = test::random_matrix(4, 4, rng);
        const Matrix c = test::random_matrix(2, 4, rng);
        const Matrix q = Matrix::Identity(4, 4);
        const Matrix v = Matrix::Identity(2, 2);
        const CareSolution s = care_solve(a, c, q, v);
        CHECK(s.residual <= 1e-8);
        CHECK(care_residual(a, c, q, v, s.P) <= 1e-8);
        CHECK(spectral_abscissa(a - s.L * c) < 0.0);
        CHECK((s.P - s.P.transpose()).norm() < 1e-12 * std::max(1.0, s.P.norm()));
    }
}

TEST_CASE("Riccati equation with an undetectable unstable mode fails") {
    Matrix a(2, 2);
    a << 1.0, 0.0, 0.0, -1.0;
    Matrix c(1, 2);
    c << 0.0, 1.0;
    CHECK_THROWS_AS(care_solve(a, c, Matrix::Identity(2, 2), Matrix::Identity(1, 1)), Error);
}

TEST_CASE("badly scaled measurement is still solved accurately") {
    Matrix a(2, 2);
    a << 0.0, 1.0, 0.0, 0.0;
    Matrix c(1, 2);
    c << 1e6, 0.0;
    const CareSolution s = care_solve(a, c, Matrix::Identity(2, 2), Matrix::Identity(1, 1));
    CHECK(s.residual <= 1e-8);
}

TEST_CASE("zero input gives zero output") {
    std::mt19937_64 rng(8);
    const StateSpace g = test::random_stable(3, 2, 2, rng);
    const Trajectory t = simulate(g, Matrix::Zero(2, 100), 0.01);
    CHECK(t.y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step response of a first-order lag") {
    const StateSpace g(Matrix::Constant(1, 1, -1.0), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
    const double dt = 0.01;
    const Trajectory t = simulate(g, Matrix::Ones(1, 501), dt);
    CHECK(t.t(500) == doctest::Approx(5.0));
    CHECK(std::abs(t.y(0, 500) - (1.0 - std::exp(-5.0))) < 1e-6);
}

TEST_CASE("two-mass steady-state amplitude at the flexible mode matches |G(jw)|") {
    const MechanicalModel m = make_two_mass();
    StateSpace g = evaluate_local(m, {0.0});
    // anchor the rigid-body drift with a weak spring so a steady state exists
    const double w_anchor = kTwoPi * 0.5;
    for (Index r = 2; r < 4; ++r) {
        for (Index c = 0; c < 2; ++c) {
            g.A(r, c) -= w_anchor * w_anchor / 2.0;
            g.A(r, c + 2) -= 0.7 * w_anchor;
        }
    }
    const StateSpace g1 = subsystem(g, std::vector<Index>{0}, std::vector<Index>{0});
    REQUIRE(is_hurwitz(g1));
    const double f = 50.0;
    const double dt = 1.0 / (f * 200.0);
    const Index n = static_cast<Index>(40.0 / dt);
    Matrix u(1, n);
    for (Index k = 0; k < n; ++k) {
        u(0, k) = std::sin(kTwoPi * f * static_cast<double>(k) * dt);
    }
    const Trajectory t = simulate(g1, u, dt);
    const double amp = t.y.rightCols(n / 20).cwiseAbs().maxCoeff();
    const double expected = std::abs(test::at_hz(g1, f)(0, 0));
    CHECK(std::abs(amp - expected) / expected < 0.01);
}

TEST_CASE("simulate rejects bad arguments") {
    const StateSpace g = StateSpace::gain(Matrix::Ones(1, 1));
    CHECK_THROWS_AS(simulate(g, Matrix::Zero(1, 10), 0.0), Error);
    Matrix u = Matrix::Zero(1, 10);
    u(0, 3) = std::nan("");
    CHECK_THROWS_AS(simulate(g, u, 0.1), Error);
}
