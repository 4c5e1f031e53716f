#include "mcd/benchplant.hpp"

#include <array>
#include <cmath>

#include "mcd/error.hpp"

namespace mcd {

namespace {

constexpr double kTwoMassHz = 50.0;
constexpr double kTwoMassZeta = 0.01;
constexpr double kTorsionHz = 120.0;
constexpr double kUmbrellaHz = 180.0;
constexpr double kPlateZeta = 0.005;

Domain unit_box(std::size_t dims) {
    Domain d;
    d.box.assign(dims, {0.0, 1.0});
    return d;
}

}  // namespace

MechanicalModel make_two_mass(bool two_outputs) {
    const double w = kTwoPi * kTwoMassHz;
    const double k = 0.5 * w * w;  // flexible mode sqrt(2k/m)
    MechanicalModel m;
    m.domain = unit_box(1);
    m.M = Matrix::Identity(2, 2);
    m.K.resize(2, 2);
    m.K << k, -k, -k, k;
    m.D = (2.0 * kTwoMassZeta / w) * m.K;
    m.phi_a = PositionMap::constant(Matrix::Identity(2, 2), m.domain);

    const Index ny = two_outputs ? 2 : 1;
    PositionMap s(ny, 2, m.domain);
    Matrix c0 = Matrix::Zero(ny, 2);
    Matrix c1 = Matrix::Zero(ny, 2);
    c0(0, 0) = 1.0;
    c1(0, 0) = -1.0;
    c1(0, 1) = 1.0;
    if (two_outputs) {
        c0(1, 1) = 1.0;
        c1(1, 0) = 1.0;
        c1(1, 1) = -1.0;
    }
    s.add_term({0}, c0);
    s.add_term({1}, c1);
    m.phi_s = s;
    m.validate();
    return m;
}

MechanicalModel make_mmpa_lite() {
    const double m_corner = 0.25;
    const double m_center = 1.0;
    // corners at (x, y) in plate units, then the center mass
    const std::array<std::array<double, 2>, 4> corner{{{1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}}};
    const Index n = 5;

    MechanicalModel m;
    m.domain = unit_box(2);
    m.M = Vector({{m_corner, m_corner, m_corner, m_corner, m_center}}).asDiagonal();

    Matrix v(n, n);  // heave, roll, pitch, torsion, umbrella
    for (Index i = 0; i < 4; ++i) {
        const double x = corner[static_cast<std::size_t>(i)][0];
        const double y = corner[static_cast<std::size_t>(i)][1];
        v.row(i) << 1.0, y, x, x * y, 1.0;
    }
    v.row(4) << 1.0, 0.0, 0.0, 0.0, -4.0 * m_corner / m_center;
    for (Index j = 0; j < n; ++j) {
        v.col(j) /= std::sqrt(v.col(j).dot(m.M * v.col(j)));
    }
    Vector omega(n);
    omega << 0.0, 0.0, 0.0, kTwoPi * kTorsionHz, kTwoPi * kUmbrellaHz;
    const Matrix mv = m.M * v;
    m.K = mv * omega.cwiseAbs2().asDiagonal() * mv.transpose();
    m.D = mv * (2.0 * kPlateZeta * omega).asDiagonal() * mv.transpose();
    m.K = 0.5 * (m.K + m.K.transpose());
    m.D = 0.5 * (m.D + m.D.transpose());

    Matrix pa = Matrix::Zero(n, 4);
    pa.topRows(4).setIdentity();
    m.phi_a = PositionMap::constant(pa, m.domain);

    // Sensor j sits at plate point (a_j + p1 - 1/2, b_j + p2 - 1/2) and reads
    // sum_i (1 + x x_i)(1 + y y_i)/4 q_i over the corners.
    const std::array<std::array<double, 2>, 3> sensor{{{0.5, 0.0}, {-0.5, 0.0}, {0.0, 0.5}}};
    PositionMap s(3, n, m.domain);
    for (Index j = 0; j < 3; ++j) {
        const double a = sensor[static_cast<std::size_t>(j)][0] - 0.5;
        const double b = sensor[static_cast<std::size_t>(j)][1] - 0.5;
        for (Index i = 0; i < 4; ++i) {
            const double xi = corner[static_cast<std::size_t>(i)][0];
            const double yi = corner[static_cast<std::size_t>(i)][1];
            // (1 + xi (a + p1)) (1 + yi (b + p2)) / 4 expanded in p1, p2
            const double cx0 = 1.0 + xi * a;
            const double cy0 = 1.0 + yi * b;
            auto put = [&](std::vector<int> e, double value) {
                Matrix c = Matrix::Zero(3, n);
                c(j, i) = 0.25 * value;
                s.add_term(e, c);
            };
            put({0, 0}, cx0 * cy0);
            put({1, 0}, xi * cy0);
            put({0, 1}, cx0 * yi);
            put({1, 1}, xi * yi);
        }
    }
    m.phi_s = s;
    m.validate();
    return m;
}

BenchmarkSpec two_mass_spec() {
    BenchmarkSpec b;
    b.name = "two_mass";
    b.model = make_two_mass();
    b.n_rb = 1;
    b.retain = {1};
    b.controlled = {1};
    b.n_flex = 1;
    b.p_star = {0.0};
    b.grid_per_axis = 11;
    b.f_bw = {10.0};
    b.flex_hz = {kTwoMassHz};
    b.flex_zeta = kTwoMassZeta;
    return b;
}

BenchmarkSpec mmpa_lite_spec() {
    BenchmarkSpec b;
    b.name = "mmpa_lite";
    b.model = make_mmpa_lite();
    b.n_rb = 3;
    b.retain = {3};
    b.controlled = {3};
    b.n_flex = 1;
    b.p_star = {1.0, 1.0};
    b.grid_per_axis = 5;
    b.f_bw = {15.0, 15.0, 15.0};
    b.flex_hz = {kTorsionHz, kUmbrellaHz};
    b.flex_zeta = kPlateZeta;
    return b;
}

BenchmarkSpec benchmark_by_name(const std::string& name) {
    if (name == "two_mass") {
        return two_mass_spec();
    }
    if (name == "mmpa_lite") {
        return mmpa_lite_spec();
    }
    fail(ErrorKind::kConfig, "unknown benchmark \"" + name + "\" (known: two_mass, mmpa_lite)");
}

std::vector<std::string> benchmark_names() { return {"two_mass", "mmpa_lite"}; }

}  // namespace mcd
