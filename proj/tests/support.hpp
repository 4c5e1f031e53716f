#pragma once

#include <cmath>
#include <random>

#include "mcd/freqresp.hpp"
#include "mcd/statespace.hpp"

namespace mcd::test {

inline Matrix random_matrix(Index r, Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
        for (Index j = 0; j < c; ++j) {
            m(i, j) = n(rng);
        }
    }
    return m;
}

/// Stable by construction: A = Q - rho I with rho beyond the spectral abscissa of Q.
inline StateSpace random_stable(Index n, Index m, Index p, std::mt19937_64& rng) {
    const Matrix q = random_matrix(n, n, rng);
    const Eigen::EigenSolver<Matrix> es(q);
    const double abscissa = es.eigenvalues().real().maxCoeff();
    std::uniform_real_distribution<double> margin(0.1, 1.0);
    Matrix a = q - (abscissa + margin(rng)) * Matrix::Identity(n, n);
    return StateSpace(a, random_matrix(n, m, rng), random_matrix(p, n, rng), random_matrix(p, m, rng));
}

inline CMatrix at_hz(const StateSpace& g, double f) { return evaluate_dense(g, Complex(0.0, kTwoPi * f)); }

inline double rel_err(const CMatrix& a, const CMatrix& b) {
    return (a - b).norm() / std::max(1e-300, b.norm());
}

}  // namespace mcd::test
