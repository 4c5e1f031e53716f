#include <cmath>

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include "mcd/benchplant.hpp"
#include "mcd/error.hpp"
#include "mcd/mechanics.hpp"
#include "support.hpp"

using namespace mcd;

namespace {

/// Undamped eigenfrequencies in Hz, ascending, from the generalized symmetric problem K v = w^2 M v.
Vector eigen_hz(const MechanicalModel& m) {
    const Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(m.K, m.M);
    return es.eigenvalues().cwiseMax(0.0).cwiseSqrt() / kTwoPi;
}

/// Largest deviation of the frequency response from the nominal one at f, relative to the nominal.
double position_spread(const BenchmarkSpec& spec, double hz) {
    const CMatrix nominal = test::at_hz(evaluate_local(spec.model, spec.p_star), hz);
    double worst = 0.0;
    for (const auto& p : spec.model.domain.grid(spec.grid_per_axis)) {
        worst = std::max(worst, (test::at_hz(evaluate_local(spec.model, p), hz) - nominal).norm());
    }
    return worst / nominal.norm();
}

}  // namespace

TEST_CASE("two-mass benchmark") {
    const MechanicalModel m = make_two_mass();
    CHECK_NOTHROW(m.validate());
    // characteristic polynomial of M^-1 K: w^4 - tr w^2 + det = 0
    const Matrix a = m.M.inverse() * m.K;
    const double tr = a.trace();
    const double det = a.determinant();
    const double disc = std::sqrt(tr * tr - 4.0 * det);
    const double w2_hi = 0.5 * (tr + disc);
    const double w2_lo = 0.5 * (tr - disc);
    CHECK(std::abs(w2_lo) <= 1e-9 * w2_hi);
    CHECK(std::sqrt(w2_hi) / kTwoPi == doctest::Approx(50.0).epsilon(1e-9));
    const Vector hz = eigen_hz(m);
    CHECK(hz(1) == doctest::Approx(50.0).epsilon(1e-9));

    const Matrix phi0 = m.phi_s.evaluate({0.0});
    CHECK(phi0(0, 0) == 1.0);
    CHECK(phi0(0, 1) == 0.0);
    Vector shape(2);
    shape << 1.0, -1.0;
    shape /= std::sqrt(2.0);
    CHECK(std::abs((m.phi_s.evaluate({0.5}) * shape)(0)) < 1e-15);
    CHECK(std::abs((m.phi_s.evaluate({0.0}) * shape)(0)) > 0.5);

    const MechanicalModel two = make_two_mass(true);
    CHECK(two.outputs() == 2);
    CHECK(two.phi_s.evaluate({0.2})(1, 0) == doctest::Approx(0.2));
    CHECK(position_spread(two_mass_spec(), 50.0) > 0.2);
}

TEST_CASE("mmpa-lite benchmark") {
    const MechanicalModel m = make_mmpa_lite();
    CHECK_NOTHROW(m.validate());
    const Eigen::FullPivLU<Matrix> lu(m.K);
    CHECK(m.K.rows() - lu.rank() == 3);
    const Vector hz = eigen_hz(m);
    REQUIRE(hz.size() == 5);
    for (Index i = 0; i < 3; ++i) {
        CHECK(hz(i) < 1e-6 * hz(4));
    }
    CHECK(hz(3) == doctest::Approx(120.0).epsilon(1e-6));
    CHECK(hz(4) == doctest::Approx(180.0).epsilon(1e-6));

    // torsion mode is invisible at the plate center by symmetry
    const Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(m.K, m.M);
    const Vector torsion = es.eigenvectors().col(3);
    const Matrix center = m.phi_s.evaluate({0.5, 0.5});
    CHECK((center * torsion).cwiseAbs().maxCoeff() < 1e-12 * torsion.norm());
    CHECK((m.phi_s.evaluate({0.0, 0.0}) * torsion).cwiseAbs().maxCoeff() > 1e-3);

    const ModalDecomposition dec = modal_decompose(m);
    CHECK(dec.n_rigid == 3);
    CHECK(dec.zeta(3) <= 0.01);
    CHECK(position_spread(mmpa_lite_spec(), 120.0) > 0.2);
}

TEST_CASE("benchmark lookup") {
    for (const auto& name : benchmark_names()) {
        const BenchmarkSpec spec = benchmark_by_name(name);
        CHECK(spec.name == name);
        CHECK_NOTHROW(spec.model.validate());
        CHECK(spec.model.domain.contains(spec.p_star));
    }
    CHECK_THROWS_AS(benchmark_by_name("three_mass"), Error);
}
