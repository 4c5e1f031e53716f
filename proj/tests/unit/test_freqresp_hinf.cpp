#include <doctest.h>

#include "mcd/error.hpp"
#include "mcd/hinf.hpp"
#include "support.hpp"

using namespace mcd;

TEST_CASE("first-order response at DC and at the corner") {
    const StateSpace g(Matrix::Constant(1, 1, -1.0), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
    const std::vector<double> f{0.0, 1.0 / kTwoPi};
    const FrequencyResponse fr = freq_response(g, f);
    CHECK(std::abs(fr.values[0](0, 0) - Complex(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(fr.values[1](0, 0) - 1.0 / Complex(1.0, 1.0)) < 1e-15);
    CHECK(std::abs(std::abs(fr.values[1](0, 0)) - 1.0 / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("Hessenberg evaluator, parallel and serial paths agree with the dense solve") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const StateSpace g = test::random_stable(4, 2, 3, rng);
        const auto grid = logspace(1e-3, 1e2, 10);
        const FrequencyResponse par = freq_response(g, grid);
        const FrequencyResponse ser = freq_response_serial(g, grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const CMatrix ref = evaluate_dense(g, Complex(0.0, kTwoPi * grid[k]));
            CHECK(test::rel_err(par.values[k], ref) < 1e-12);
            CHECK(test::rel_err(ser.values[k], ref) < 1e-12);
        }
        std::vector<double> omegas;
        for (double f : logspace(1e-2, 1e2, 301)) {
            omegas.push_back(kTwoPi * f);
        }
        const PeakGain a = peak_gain_grid(g, omegas);
        const PeakGain b = peak_gain_grid_serial(g, omegas);
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
        CHECK(a.omega == b.omega);
    }
}

TEST_CASE("evaluating at a pole is a numeric error") {
    const StateSpace integ(Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
    const std::vector<double> f{0.0};
    try {
        freq_response(integ, f);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kNumeric);
    }
}

TEST_CASE("H-infinity norm of simple systems") {
    const StateSpace lp(Matrix::Constant(1, 1, -1.0), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
    CHECK(hinf_norm(lp).gamma == doctest::Approx(1.0).epsilon(1e-6));
    const StateSpace gain = StateSpace::gain(Matrix::Constant(1, 1, 3.0));
    CHECK(hinf_norm(gain).gamma == doctest::Approx(3.0).epsilon(1e-12));

    Matrix a(2, 2);
    a << 0.0, 1.0, -1.0, -0.2;
    Matrix b(2, 1);
    b << 0.0, 1.0;
    Matrix c(1, 2);
    c << 1.0, 0.0;
    const StateSpace res(a, b, c, Matrix::Zero(1, 1));
    const double zeta = 0.1;
    const double analytic = 1.0 / (2.0 * zeta * std::sqrt(1.0 - zeta * zeta));
    CHECK(analytic == doctest::Approx(5.0252).epsilon(1e-4));
    const HinfResult r = hinf_norm(res);
    CHECK(r.lower <= analytic * (1.0 + 1e-12));
    CHECK(r.gamma >= analytic * (1.0 - 1e-12));
    CHECK(r.gamma - r.lower <= 3e-6 * analytic);
    CHECK(hinf_norm_grid(res) == doctest::Approx(analytic).epsilon(1e-4));
}

TEST_CASE("H-infinity norm agrees with the dense-grid oracle on random systems") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> dim(1, 10);
    for (int trial = 0; trial < 20; ++trial) {
        const StateSpace g = test::random_stable(dim(rng), 2, 2, rng);
        const HinfResult h = hinf_norm(g, 1e-6);
        const double grid = hinf_norm_grid(g, 100000);
        CHECK(h.gamma >= grid * (1.0 - 1e-9));
        CHECK(std::abs(h.gamma - grid) / grid < 5e-3);
    }
}

TEST_CASE("H-infinity norm of an unstable system is refused") {
    const StateSpace g(Matrix::Constant(1, 1, 1.0), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
    CHECK_THROWS_AS(hinf_norm(g), Error);
}
