#include "mcd/simulate.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "mcd/error.hpp"

namespace mcd {

ZohModel discretize_zoh(const StateSpace& g, double dt) {
    require(dt > 0.0 && std::isfinite(dt), ErrorKind::kDomain, "discretize_zoh: dt must be positive");
    const Index n = g.states();
    const Index m = g.inputs();
    Matrix aug = Matrix::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = g.A * dt;
    aug.topRightCorner(n, m) = g.B * dt;
    const Matrix e = aug.exp();
    return ZohModel{e.topLeftCorner(n, n), e.topRightCorner(n, m), dt};
}

Trajectory simulate(const StateSpace& g, const Matrix& u, double dt, const Vector& x0) {
    g.validate();
    require(dt > 0.0 && std::isfinite(dt), ErrorKind::kDomain, "simulate: dt must be positive");
    require(u.cols() >= 2, ErrorKind::kDomain, "simulate: need at least 2 input samples");
    require(u.rows() == g.inputs(), ErrorKind::kDimension, "simulate: input rows must equal system inputs");
    require(u.allFinite(), ErrorKind::kNumeric, "simulate: non-finite input samples");
    const Index n = g.states();
    const Index steps = u.cols();
    require(x0.size() == 0 || x0.size() == n, ErrorKind::kDimension, "simulate: initial state size mismatch");

    const ZohModel zoh = discretize_zoh(g, dt);
    Trajectory tr;
    tr.t = Vector::LinSpaced(steps, 0.0, dt * static_cast<double>(steps - 1));
    tr.x.resize(n, steps);
    tr.y.resize(g.outputs(), steps);
    Vector x = x0.size() == 0 ? Vector::Zero(n) : x0;
    for (Index k = 0; k < steps; ++k) {
        tr.x.col(k) = x;
        tr.y.col(k) = g.C * x + g.D * u.col(k);
        x = zoh.Ad * x + zoh.Bd * u.col(k);
    }
    return tr;
}

Vector rms(const Matrix& signals) {
    if (signals.cols() == 0) {
        return Vector::Zero(signals.rows());
    }
    return (signals.array().square().rowwise().sum() / static_cast<double>(signals.cols())).sqrt();
}

}  // namespace mcd
