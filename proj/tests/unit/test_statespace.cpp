#include <doctest.h>

#include "mcd/diagram.hpp"
#include "mcd/error.hpp"
#include "mcd/linalg.hpp"
#include "support.hpp"

using namespace mcd;
using mcd::test::at_hz;
using mcd::test::rel_err;

namespace {

StateSpace first_order(double a) {
    return StateSpace(Matrix::Constant(1, 1, -a), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
}

}  // namespace

TEST_CASE("series with identity keeps the transfer") {
    std::mt19937_64 rng(3);
    const StateSpace g = test::random_stable(4, 2, 3, rng);
    const StateSpace s = series(g, StateSpace::gain(Matrix::Identity(3, 3)));
    for (double f : {0.01, 0.3, 2.0, 40.0}) {
        CHECK(rel_err(at_hz(s, f), at_hz(g, f)) < 1e-12);
    }
}

TEST_CASE("unit negative feedback of an integrator") {
    const StateSpace integ(Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
    const StateSpace cl = feedback(integ, StateSpace::gain(Matrix::Ones(1, 1)));
    for (double f : {0.0, 0.1, 1.0, 10.0}) {
        const Complex s(0.0, kTwoPi * f);
        CHECK(std::abs(at_hz(cl, f)(0, 0) - 1.0 / (s + 1.0)) < 1e-12);
    }
}

TEST_CASE("series and parallel match pointwise frequency-response arithmetic") {
    std::mt19937_64 rng(11);
    const auto grid = logspace(1e-3, 1e2, 50);
    for (int trial = 0; trial < 5; ++trial) {
        const StateSpace g1 = test::random_stable(3, 2, 2, rng);
        const StateSpace g2 = test::random_stable(3, 2, 2, rng);
        const StateSpace s = series(g1, g2);
        const StateSpace p = parallel(g1, g2);
        const StateSpace fb = feedback(g1, g2);
        for (double f : grid) {
            const CMatrix a = at_hz(g1, f);
            const CMatrix b = at_hz(g2, f);
            CHECK(rel_err(at_hz(s, f), b * a) < 1e-10);
            CHECK(rel_err(at_hz(p, f), a + b) < 1e-10);
            const CMatrix eye = CMatrix::Identity(2, 2);
            CHECK(rel_err(at_hz(fb, f), (eye + a * b).partialPivLu().solve(a)) < 1e-9);
        }
    }
}

TEST_CASE("is_hurwitz") {
    CHECK(is_hurwitz(Matrix::Constant(1, 1, -1.0)));
    Matrix dbl(2, 2);
    dbl << 0.0, 1.0, 0.0, 0.0;
    CHECK_FALSE(is_hurwitz(dbl));
    std::mt19937_64 rng(5);
    for (int k = 0; k < 10; ++k) {
        CHECK(is_hurwitz(test::random_stable(6, 1, 1, rng)));
    }
    CHECK_FALSE(is_hurwitz(Matrix::Constant(1, 1, -1.0), 2.0));
}

TEST_CASE("non-conformable operands are dimension errors") {
    const StateSpace g1 = first_order(1.0);
    const StateSpace g2 = StateSpace::gain(Matrix::Ones(2, 2));
    CHECK_THROWS_AS(series(g1, g2), Error);
    try {
        series(g1, g2);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kDimension);
    }
}

TEST_CASE("subsystem, scale and balanced preserve the transfer") {
    std::mt19937_64 rng(9);
    const StateSpace g = test::random_stable(5, 3, 2, rng);
    const std::vector<Index> rows{1};
    const std::vector<Index> cols{2, 0};
    const StateSpace sub = subsystem(g, rows, cols);
    const Matrix l = test::random_matrix(2, 2, rng);
    const Matrix r = test::random_matrix(3, 3, rng);
    const StateSpace sc = scale(l, g, r);
    const StateSpace bal = balanced(g);
    for (double f : {0.01, 0.5, 7.0}) {
        const CMatrix full = at_hz(g, f);
        CHECK(std::abs(at_hz(sub, f)(0, 0) - full(1, 2)) < 1e-12);
        CHECK(std::abs(at_hz(sub, f)(0, 1) - full(1, 0)) < 1e-12);
        CHECK(rel_err(at_hz(sc, f), l.cast<Complex>() * full * r.cast<Complex>()) < 1e-12);
        CHECK(rel_err(at_hz(bal, f), full) < 1e-12);
    }
}

TEST_CASE("diagram closes a feedback loop like feedback()") {
    const StateSpace plant = first_order(2.0);
    const StateSpace ctrl = StateSpace::gain(Matrix::Constant(1, 1, 3.0));
    Diagram d;
    d.input("r", 1);
    d.block("u", ctrl, {{"r", Matrix()}, {"y", -Matrix::Ones(1, 1)}});
    d.block("y", plant, {{"u", Matrix()}});
    d.output("e", {{"r", Matrix()}, {"y", -Matrix::Ones(1, 1)}});
    const StateSpace t = d.build({"r"}, {"y"});
    const StateSpace e = d.build({"r"}, {"e"});
    for (double f : {0.0, 0.3, 3.0}) {
        const Complex s(0.0, kTwoPi * f);
        const Complex loop = 3.0 / (s + 2.0);
        CHECK(std::abs(at_hz(t, f)(0, 0) - loop / (1.0 + loop)) < 1e-12);
        CHECK(std::abs(at_hz(e, f)(0, 0) - 1.0 / (1.0 + loop)) < 1e-12);
    }
}

TEST_CASE("singular algebraic loop is a rank error") {
    const StateSpace unit = StateSpace::gain(Matrix::Ones(1, 1));
    Diagram d;
    d.input("r", 1);
    d.block("a", unit, {{"r", Matrix()}, {"a", Matrix()}});
    try {
        d.build({"r"}, {"a"});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kRank);
    }
}
