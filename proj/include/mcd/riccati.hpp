#pragma once

#include "mcd/types.hpp"

namespace mcd {

struct CareSolution {
    Matrix P;         // symmetric PSD solution
    Matrix L;         // observer gain P C^T V^-1
    double residual;  // normalized Frobenius residual, see care_residual
};

/// Filter Riccati equation  A P + P A^T - P C^T V^-1 C P + Q = 0  via an ordered complex
/// Schur form of the Hamiltonian. A - L C is Hurwitz on success.
/// Throws Error(kNumeric) for undetectable (A, C), imaginary-axis Hamiltonian eigenvalues,
/// or residual above tol.
CareSolution care_solve(const Matrix& A, const Matrix& C, const Matrix& Q, const Matrix& V,
                        double tol = 1e-8);

/// ||A P + P A^T - P C^T V^-1 C P + Q||_F divided by
/// max(1, ||A P||_F + ||P A^T||_F + ||P C^T V^-1 C P||_F + ||Q||_F).
double care_residual(const Matrix& A, const Matrix& C, const Matrix& Q, const Matrix& V,
                     const Matrix& P);

}  // namespace mcd
