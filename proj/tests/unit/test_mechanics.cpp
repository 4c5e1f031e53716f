#include <doctest.h>

#include "mcd/benchplant.hpp"
#include "mcd/error.hpp"
#include "mcd/mechanics.hpp"
#include "support.hpp"

using namespace mcd;

namespace {

MechanicalModel simple_model(const Matrix& m, const Matrix& d, const Matrix& k) {
    MechanicalModel model;
    model.M = m;
    model.D = d;
    model.K = k;
    model.domain.box = {{0.0, 1.0}};
    const Index n = m.rows();
    model.phi_a = PositionMap::constant(Matrix::Identity(n, n), model.domain);
    model.phi_s = PositionMap::constant(Matrix::Identity(n, n), model.domain);
    return model;
}

Matrix chain_stiffness() {
    Matrix k(2, 2);
    k << 1.0, -1.0, -1.0, 1.0;
    return k;
}

}  // namespace

TEST_CASE("identity mass and stiffness") {
    const MechanicalModel m = simple_model(Matrix::Identity(2, 2), Matrix::Zero(2, 2), Matrix::Identity(2, 2));
    const ModalDecomposition dec = modal_decompose(m);
    CHECK(dec.omega(0) == doctest::Approx(1.0));
    CHECK(dec.omega(1) == doctest::Approx(1.0));
    CHECK((dec.Vt.transpose() * dec.Vt - Matrix::Identity(2, 2)).norm() < 1e-12);
    CHECK(dec.n_rigid == 0);
}

TEST_CASE("free-free chain has a rigid-body mode") {
    const MechanicalModel m = simple_model(Matrix::Identity(2, 2), Matrix::Zero(2, 2), chain_stiffness());
    const ModalDecomposition dec = modal_decompose(m);
    CHECK(dec.n_rigid == 1);
    CHECK(dec.omega(0) == 0.0);
    CHECK(dec.omega(1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(dec.Vt(0, 0) - r) < 1e-12);
    CHECK(std::abs(dec.Vt(1, 0) - r) < 1e-12);
    // sign rule: the leading largest-magnitude entry is positive
    CHECK(std::abs(dec.Vt(0, 1) - r) < 1e-12);
    CHECK(std::abs(dec.Vt(1, 1) + r) < 1e-12);
}

TEST_CASE("scalar modal damping") {
    const MechanicalModel m = simple_model(Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 0.8),
                                           Matrix::Constant(1, 1, 8.0));
    const ModalDecomposition dec = modal_decompose(m);
    CHECK(dec.omega(0) == doctest::Approx(2.0));
    CHECK(dec.Vt(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    // V^T D V = 0.4, zeta = 0.4 / (2 * 2)
    CHECK(dec.zeta(0) == doctest::Approx(0.1));
}

TEST_CASE("single-mode modal state space") {
    const MechanicalModel m = simple_model(Matrix::Ones(1, 1), Matrix::Constant(1, 1, 0.2), Matrix::Constant(1, 1, 4.0));
    const ModalDecomposition dec = modal_decompose(m);
    const StateSpace g = to_modal_ss(dec, m, {0.5});
    Matrix a(2, 2);
    a << 0.0, 1.0, -4.0, -0.2;
    CHECK((g.A - a).norm() < 1e-12);
}

TEST_CASE("modal model reproduces the second-order form") {
    const MechanicalModel m = make_two_mass();
    const ModalDecomposition dec = modal_decompose(m);
    const auto grid = logspace(0.1, 1000.0, 40);
    for (double p : {0.0, 0.3, 0.75, 1.0}) {
        const StateSpace modal = to_modal_ss(dec, m, {p});
        const StateSpace direct = evaluate_local(m, {p});
        for (double f : grid) {
            CHECK(test::rel_err(test::at_hz(modal, f), test::at_hz(direct, f)) < 1e-9);
        }
    }
    // constant actuation map: B does not depend on p
    CHECK((to_modal_ss(dec, m, {0.0}).B - to_modal_ss(dec, m, {1.0}).B).norm() == 0.0);
}

TEST_CASE("grouping permutation is a permutation") {
    for (Index modes : {1, 2, 5}) {
        const Matrix t = mode_grouping_permutation(modes);
        CHECK((t * t.transpose() - Matrix::Identity(2 * modes, 2 * modes)).norm() == 0.0);
        for (Index r = 0; r < t.rows(); ++r) {
            CHECK(t.row(r).sum() == 1.0);
            CHECK(t.row(r).cwiseAbs().maxCoeff() == 1.0);
        }
    }
}

TEST_CASE("partition of the free-free chain") {
    const Matrix k = chain_stiffness();
    const MechanicalModel m = simple_model(Matrix::Identity(2, 2), 0.02 * k, k);
    const ModalDecomposition dec = modal_decompose(m);
    const PartitionedModalModel pm = group_and_partition(dec, m, 1, {1});
    Matrix a_rb(2, 2);
    a_rb << 0.0, 1.0, 0.0, 0.0;
    CHECK((pm.A_rb - a_rb).norm() == 0.0);
    const double w = std::sqrt(2.0);
    Matrix a_f(2, 2);
    a_f << 0.0, 1.0, -2.0, -2.0 * dec.zeta(1) * w;
    CHECK((pm.A_fm_r - a_f).norm() < 1e-12);
    CHECK(pm.A_fm_d.size() == 0);
    CHECK(pm.n_disc() == 0);

    // un-partitioned model equals the second-order form
    for (double f : {0.01, 0.2, 3.0}) {
        CHECK(test::rel_err(test::at_hz(evaluate_local(pm, {0.4}), f), test::at_hz(evaluate_local(m, {0.4}), f)) <
              1e-10);
    }
}

TEST_CASE("frozen plants on the grid match direct construction") {
    const MechanicalModel m = make_two_mass();
    const ModalDecomposition dec = modal_decompose(m);
    const PartitionedModalModel pm = group_and_partition(dec, m, 1, {1});
    for (const auto& p : m.domain.grid(11)) {
        const StateSpace a = evaluate_local(pm, p);
        const StateSpace b = evaluate_local(m, p);
        for (double f : {0.3, 10.0, 49.0, 51.0, 400.0}) {
            CHECK(test::rel_err(test::at_hz(a, f), test::at_hz(b, f)) < 1e-12);
        }
    }
    const Matrix phi_s0 = m.phi_s.evaluate({0.0});
    CHECK(phi_s0(0, 0) == 1.0);
    CHECK(phi_s0(0, 1) == 0.0);
}

TEST_CASE("constant maps give p-independent local models") {
    const MechanicalModel m = simple_model(Matrix::Identity(2, 2), 0.02 * chain_stiffness(), chain_stiffness());
    const ModalDecomposition dec = modal_decompose(m);
    const PartitionedModalModel pm = group_and_partition(dec, m, 1, {1});
    const StateSpace a = evaluate_local(pm, {0.0});
    const StateSpace b = evaluate_local(pm, {1.0});
    CHECK((a.B - b.B).norm() == 0.0);
    CHECK((a.C - b.C).norm() == 0.0);
}

TEST_CASE("mass-normalization and stiffness diagonalization on random pairs") {
    std::mt19937_64 rng(123);
    std::uniform_int_distribution<int> dim(1, 10);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = dim(rng);
        std::uniform_int_distribution<int> nul(0, static_cast<int>(std::min<Index>(n - 1, 3)));
        const Index nullity = nul(rng);
        const Matrix a = test::random_matrix(n, n, rng);
        const Matrix mm = a.transpose() * a + static_cast<double>(n) * Matrix::Identity(n, n);
        const Matrix r = test::random_matrix(n - nullity, n, rng);
        const Matrix kk = r.transpose() * r;
        const MechanicalModel m = simple_model(mm, 0.01 * kk, 0.5 * (kk + kk.transpose()));
        const ModalDecomposition dec = modal_decompose(m);
        const Matrix& v = dec.Vt;
        CHECK((v.transpose() * mm * v - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
        const Matrix omega2 = dec.omega.cwiseAbs2().asDiagonal();
        CHECK((v.transpose() * m.K * v - omega2).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(dec.n_rigid == nullity);
    }
}

TEST_CASE("non-proportional damping is refused unless forced") {
    Matrix d(2, 2);
    d << 0.3, 0.0, 0.0, 0.0;
    const MechanicalModel m = simple_model(Matrix::Identity(2, 2), d, chain_stiffness() + Matrix::Identity(2, 2));
    try {
        modal_decompose(m);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::kDomain);
    }
    const ModalDecomposition forced = modal_decompose(m, true);
    CHECK(!forced.warnings.empty());
}

TEST_CASE("invalid mechanical data") {
    Matrix k = chain_stiffness();
    k(0, 1) = -0.5;
    CHECK_THROWS_AS(simple_model(Matrix::Identity(2, 2), Matrix::Zero(2, 2), k).validate(), Error);
    CHECK_THROWS_AS(simple_model(-Matrix::Identity(2, 2), Matrix::Zero(2, 2), chain_stiffness()).validate(), Error);
}

TEST_CASE("mechanical model JSON round trip") {
    const MechanicalModel m = make_mmpa_lite();
    const MechanicalModel back = mechanical_model_from_json(to_json(m));
    CHECK((back.M - m.M).norm() == 0.0);
    CHECK((back.K - m.K).norm() == 0.0);
    for (const auto& p : m.domain.grid(3)) {
        CHECK((back.phi_s.evaluate(p) - m.phi_s.evaluate(p)).norm() < 1e-15);
        CHECK((back.phi_a.evaluate(p) - m.phi_a.evaluate(p)).norm() < 1e-15);
    }
    Json bad = to_json(m);
    bad["extra"] = 1;
    CHECK_THROWS_AS(mechanical_model_from_json(bad), Error);
}
