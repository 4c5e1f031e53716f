#include <cmath>
#include <functional>

#include <doctest.h>

#include "mcd/closed_loop.hpp"
#include "mcd/error.hpp"
#include "mcd/linalg.hpp"
#include "mcd/synthesis.hpp"
#include "mcd/shaping.hpp"
#include "mcd/workflow.hpp"
#include "support.hpp"

using namespace mcd;

namespace {

double mag(const RationalDiagonalFilter& f, double hz, std::size_t ch = 0) {
    return std::abs(f.eval(ch, Complex(0.0, kTwoPi * hz)));
}

StateSpace double_integrator() {
    Matrix a(2, 2);
    a << 0.0, 1.0, 0.0, 0.0;
    Matrix b(2, 1);
    b << 0.0, 1.0;
    Matrix c(1, 2);
    c << 1.0, 0.0;
    return StateSpace(a, b, c, Matrix::Zero(1, 1));
}

/// Frequency where |f| first crosses `level` going upward/downward, by bisection on a bracket.
double crossing(const std::function<double(double)>& g, double lo, double hi) {
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        ((g(lo) > 0.0) == (g(mid) > 0.0) ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

void check_realization(const RationalDiagonalFilter& f) {
    const StateSpace g = f.to_state_space();
    for (double hz : logspace(1e-2, 1e4, 60)) {
        const CMatrix direct = f.eval(Complex(0.0, kTwoPi * hz));
        const CMatrix realized = test::at_hz(g, hz);
        CHECK((direct - realized).norm() <= 1e-10 * std::max(1.0, direct.norm()));
    }
}

}  // namespace

TEST_CASE("scalings") {
    SUBCASE("unit gains give identity scalings") {
        const StateSpace g = StateSpace::gain(Matrix::Identity(2, 2));
        const ScalingSet s = compute_scalings(g, {5.0, 7.0}, Vector::Ones(2), 1);
        CHECK(s.Wz_sc.isApprox(Matrix::Identity(2, 2)));
        CHECK(s.Ww1_sc.isApprox(Matrix::Identity(2, 2)));
        CHECK(s.Ww2_sc.isApprox(Matrix::Identity(1, 1)));
    }
    SUBCASE("double integrator") {
        const ScalingSet s = compute_scalings(double_integrator(), {10.0}, Vector::Constant(1, 1e-6), 0);
        const double w = kTwoPi * 10.0;
        CHECK(s.Wz_sc(0, 0) == doctest::Approx(1e6).epsilon(1e-12));
        CHECK(s.Ww1_sc(0, 0) == doctest::Approx(w * w * 1e-6).epsilon(1e-10));
        // scaled plant crosses 0 dB at the bandwidth
        const StateSpace scaled = scale(s.Wz_sc, double_integrator(), s.Ww1_sc);
        const double f0 = crossing([&](double hz) { return std::abs(test::at_hz(scaled, hz)(0, 0)) - 1.0; }, 0.1, 1000.0);
        CHECK(f0 == doctest::Approx(10.0).epsilon(1e-6));
    }
    SUBCASE("errors") {
        const StateSpace zero = StateSpace::gain(Matrix::Zero(1, 1));
        CHECK_THROWS_AS(compute_scalings(zero, {1.0}, Vector::Ones(1), 0), Error);
        CHECK_THROWS_AS(compute_scalings(double_integrator(), {0.0}, Vector::Ones(1), 0), Error);
    }
}

TEST_CASE("integral weight") {
    const RationalDiagonalFilter w = make_integral_filter({25.0}, 0.5);
    CHECK(mag(w, 1e6) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(1.0 / 0.5 == doctest::Approx(std::pow(10.0, 6.0 / 20.0)).epsilon(0.01));
    ShapingParams p;
    p.f_bw = {100.0};
    CHECK(p.integral_corners().front() == doctest::Approx(25.0));
    CHECK(mag(make_integral_filter(p.integral_corners(), 0.5), 2.5) == doctest::Approx(5.0).epsilon(0.01));

    const StateSpace pure = make_integral_filter({25.0}, 0.5).to_state_space();
    REQUIRE(pure.states() == 1);
    CHECK(pure.A(0, 0) == 0.0);
    const StateSpace leaky = make_integral_filter({25.0}, 0.5, 1e-3).to_state_space();
    CHECK(leaky.A(0, 0) == doctest::Approx(-kTwoPi * 25.0 * 1e-3).epsilon(1e-12));
    CHECK_THROWS_AS(make_integral_filter({25.0}, 0.0), Error);
}

TEST_CASE("roll-off weight") {
    const RationalDiagonalFilter w = make_rolloff_filter({400.0}, 0.5, 20.0);
    CHECK(std::abs(w.eval(0, Complex(0.0, 0.0))) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(mag(w, 1e9) == doctest::Approx(10.0).epsilon(1e-5));
    ShapingParams p;
    p.f_bw = {100.0};
    CHECK(p.rolloff_corners().front() == doctest::Approx(400.0));
    // |W| passes sqrt(2) K_r near the zero corner and sqrt(2) K_r alpha / ... near the pole
    const double f3 = crossing([&](double hz) { return mag(w, hz) - std::sqrt(2.0) * 0.5; }, 1.0, 1e5);
    CHECK(f3 > 300.0);
    CHECK(f3 < 500.0);
    const StateSpace g = w.to_state_space();
    CHECK(is_hurwitz(g));
    CHECK_THROWS_AS(make_rolloff_filter({400.0}, 0.5, 1.0), Error);
}

TEST_CASE("damping weight") {
    const DampingShape d{50.0, 0.5, 0.005, 2.0, 1.0};
    const RationalDiagonalFilter w = make_damping_filter({d});
    CHECK(std::abs(w.eval(0, Complex(0.0, 0.0))) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(mag(w, 1e9) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(mag(w, 50.0) == doctest::Approx(2.0 * 100.0).epsilon(1e-10));
    const RationalDiagonalFilter flat = make_damping_filter({DampingShape{50.0, 0.1, 0.1, 3.0, 1.0}});
    for (double hz : {0.1, 10.0, 50.0, 400.0}) {
        CHECK(mag(flat, hz) == doctest::Approx(3.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(make_damping_filter({DampingShape{50.0, 0.001, 0.005, 1.0, 1.0}}), Error);
}

TEST_CASE("flexible-mode controller") {
    const double w0 = kTwoPi * 50.0;
    const RationalDiagonalFilter k = make_kfm({{-3.0, 2.0}, {w0, 2.0 * w0}, 2.0});
    CHECK(std::abs(k.eval(0, Complex(0.0, w0))) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(k.eval(1, Complex(0.0, 2.0 * w0))) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(k.eval(0, Complex(0.0, 0.0))) == 0.0);
    CHECK(std::abs(k.eval(0, Complex(0.0, 1e9))) < 1e-5);
    CHECK(k.to_state_space().D.norm() == 0.0);

    for (double q : {1.0, 4.0, 10.0}) {
        const RationalDiagonalFilter kq = make_kfm({{1.0}, {w0}, q});
        auto g = [&](double w) { return std::abs(kq.eval(0, Complex(0.0, w))) - 1.0 / std::sqrt(2.0); };
        const double lo = crossing(g, w0 / 1000.0, w0);
        const double hi = crossing(g, w0, w0 * 1000.0);
        CHECK((hi - lo) == doctest::Approx(w0 / q).epsilon(0.05));
    }
    CHECK_THROWS_AS(make_kfm({{1.0}, {0.0}, 1.0}), Error);
    CHECK_THROWS_AS(make_kfm({{1.0}, {w0}, 0.0}), Error);
}

TEST_CASE("realizations match rational evaluation") {
    check_realization(make_integral_filter({2.0, 30.0}, 0.5, 1e-3));
    check_realization(make_rolloff_filter({40.0, 100.0}, 0.5, 20.0));
    check_realization(make_damping_filter({DampingShape{50.0, 0.5, 0.005, 1.0, 1.0}, DampingShape{120.0, 0.3, 0.01, 2.0, 1.0}}));
    check_realization(make_kfm({{-2.0, 5.0}, {300.0, 800.0}, 3.0}));
}

TEST_CASE("weight sets per pattern") {
    ShapingParams p;
    p.f_bw = {10.0};
    p.flex = {DampingShape{50.0}};
    const ShapingFilterSet six = make_weights(p, BlockPattern::kSix);
    CHECK(mag(six.Ww1, 3.0) == doctest::Approx(1.0));
    CHECK(mag(six.Ww3, 50.0) == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(mag(six.Wz2, 0.0) == doctest::Approx(0.5));
    const ShapingFilterSet four = make_weights(p, BlockPattern::kFour);
    CHECK(mag(four.Wz2, 3.0) == doctest::Approx(1.0));
    CHECK(mag(four.Ww1, 1e9) == doctest::Approx(10.0).epsilon(1e-6));
    CHECK(mag(four.Ww2, 50.0) == doctest::Approx(100.0).epsilon(1e-9));
    ShapingParams bad = p;
    bad.alpha = 0.5;
    CHECK_THROWS_AS(make_weights(bad, BlockPattern::kSix), Error);
}

TEST_CASE("flexible-mode loop leaves the DC sensitivity unchanged") {
    const DesignContext ctx = prepare(default_config("two_mass"));
    for (BlockPattern pattern : {BlockPattern::kSix, BlockPattern::kFour}) {
        const SynthesisProblem problem = make_problem(ctx, pattern);
        StructuredControllerParams params = initial_params(ctx, problem);
        // negative gains add damping to the flexible mode
        params.xi.assign(params.xi.size(), -synthesis_options(ctx.cfg, problem, true).xi_scale);
        const StateSpace& plant = problem.grid_plants.front();
        const StateSpace on = sensitivity(plant, problem, bind_controller(problem, params, true));
        const StateSpace off = sensitivity(plant, problem, bind_controller(problem, params, false));
        REQUIRE(is_hurwitz(on));
        CHECK(std::abs(std::abs(test::at_hz(on, 0.0)(0, 0)) - std::abs(test::at_hz(off, 0.0)(0, 0))) < 1e-9);
        if (pattern == BlockPattern::kFour) {
            // the error-based observer sees the output disturbance, so the flexible loop shapes S
            CHECK(std::abs(test::at_hz(on, 50.0)(0, 0) - test::at_hz(off, 50.0)(0, 0)) > 1e-6);
        }
    }
}
