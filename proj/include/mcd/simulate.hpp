#pragma once

#include "mcd/statespace.hpp"

namespace mcd {

struct ZohModel {
    Matrix Ad;
    Matrix Bd;
    double dt = 0.0;
};

/// Exact zero-order-hold discretization through the exponential of [[A, B], [0, 0]] dt.
ZohModel discretize_zoh(const StateSpace& g, double dt);

struct Trajectory {
    Vector t;  // sample times, s
    Matrix x;  // states x samples
    Matrix y;  // outputs x samples
};

/// Simulates G driven by u (inputs x samples, held constant over each step of length dt).
/// Throws Error(kDomain) for dt <= 0 or fewer than 2 samples, Error(kNumeric) for
/// non-finite input samples.
Trajectory simulate(const StateSpace& g, const Matrix& u, double dt, const Vector& x0 = Vector());

/// Root-mean-square over samples of each row.
Vector rms(const Matrix& signals);

}  // namespace mcd
