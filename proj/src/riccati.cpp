#include "mcd/riccati.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "mcd/error.hpp"
#include "mcd/linalg.hpp"

namespace mcd {

namespace {

/// Swaps diagonal entries k and k+1 of the upper-triangular t, updating the unitary u.
void swap_adjacent(CMatrix& t, CMatrix& u, Index k) {
    const Complex t11 = t(k, k);
    const Complex t22 = t(k + 1, k + 1);
    // Eigenvector of the 2x2 block for eigenvalue t22.
    Complex v1 = t(k, k + 1);
    Complex v2 = t22 - t11;
    const double nrm = std::hypot(std::abs(v1), std::abs(v2));
    if (nrm == 0.0) {
        return;  // equal eigenvalues with zero coupling: nothing to do
    }
    v1 /= nrm;
    v2 /= nrm;
    Eigen::Matrix2cd z;
    z << v1, -std::conj(v2), v2, std::conj(v1);
    const Index n = t.rows();
    t.middleRows(k, 2) = z.adjoint() * t.middleRows(k, 2);
    t.middleCols(k, 2) = t.middleCols(k, 2) * z;
    u.middleCols(k, 2) = u.middleCols(k, 2) * z;
    t(k + 1, k) = Complex(0.0, 0.0);
    (void)n;
}

/// Solves F X + X F^T + W = 0 through its Kronecker form (sizes here stay small).
Matrix lyapunov_kron(const Matrix& f, const Matrix& w) {
    const Index n = f.rows();
    const Matrix eye = Matrix::Identity(n, n);
    Matrix k = Matrix::Zero(n * n, n * n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            // vec(F X) = (I (x) F) vec X,  vec(X F^T) = (F (x) I) vec X
            k.block(i * n, j * n, n, n) += eye(i, j) * f;
            k.block(i * n, j * n, n, n) += f(i, j) * eye;
        }
    }
    const Vector rhs = -Eigen::Map<const Vector>(w.data(), n * n);
    const Vector x = k.partialPivLu().solve(rhs);
    Matrix out = Eigen::Map<const Matrix>(x.data(), n, n);
    return 0.5 * (out + out.transpose());
}

constexpr Index kNewtonMaxStates = 40;

}  // namespace

double care_residual(const Matrix& A, const Matrix& C, const Matrix& Q, const Matrix& V, const Matrix& P) {
    const Matrix vinv = V.inverse();
    const Matrix ap = A * P;
    const Matrix quad = P * C.transpose() * vinv * C * P;
    const Matrix res = ap + ap.transpose() - quad + Q;
    const double scale = std::max(1.0, 2.0 * ap.norm() + quad.norm() + Q.norm());
    return res.norm() / scale;
}

CareSolution care_solve(const Matrix& A, const Matrix& C, const Matrix& Q, const Matrix& V, double tol) {
    const Index n = A.rows();
    const Index p = C.rows();
    require(A.cols() == n && C.cols() == n && Q.rows() == n && Q.cols() == n && V.rows() == p && V.cols() == p,
            ErrorKind::kDimension, "care_solve: non-conformable A, C, Q, V");
    require(A.allFinite() && C.allFinite() && Q.allFinite() && V.allFinite(), ErrorKind::kNumeric,
            "care_solve: non-finite data");
    Eigen::LLT<Matrix> vchol(V);
    require(vchol.info() == Eigen::Success, ErrorKind::kDomain, "care_solve: V must be positive definite");
    if (n == 0) {
        return CareSolution{Matrix(0, 0), Matrix(0, p), 0.0};
    }

    // Dual of the control Riccati equation: Hamiltonian [[A^T, -C^T V^-1 C], [-Q, -A]].
    Matrix h(2 * n, 2 * n);
    h.topLeftCorner(n, n) = A.transpose();
    h.topRightCorner(n, n) = -C.transpose() * vchol.solve(C);
    h.bottomLeftCorner(n, n) = -Q;
    h.bottomRightCorner(n, n) = -A;

    Eigen::ComplexSchur<CMatrix> schur(h.cast<Complex>());
    require(schur.info() == Eigen::Success, ErrorKind::kNumeric, "care_solve: Schur decomposition failed");
    CMatrix t = schur.matrixT();
    CMatrix u = schur.matrixU();

    // relative to each eigenvalue: badly scaled data (large C/V ratios) put well-separated
    // eigenvalues at very different magnitudes
    for (Index i = 0; i < 2 * n; ++i) {
        require(std::abs(t(i, i).real()) > 1e-9 * std::max(1.0, std::abs(t(i, i))), ErrorKind::kNumeric,
                "care_solve: Hamiltonian has imaginary-axis eigenvalues; (A, C) not detectable or "
                "(A, Q) has uncontrollable imaginary-axis modes");
    }
    // Bubble the stable eigenvalues to the leading block.
    for (Index i = 0; i < 2 * n; ++i) {
        for (Index k = 2 * n - 2; k >= i; --k) {
            if (t(k, k).real() >= 0.0 && t(k + 1, k + 1).real() < 0.0) {
                swap_adjacent(t, u, k);
            }
        }
    }
    Index stable = 0;
    while (stable < 2 * n && t(stable, stable).real() < 0.0) {
        ++stable;
    }
    require(stable == n, ErrorKind::kNumeric, "care_solve: stable invariant subspace has wrong dimension");

    const CMatrix u1 = u.topLeftCorner(n, n);
    const CMatrix u2 = u.bottomLeftCorner(n, n);
    Eigen::FullPivLU<CMatrix> lu(u1);
    require(lu.rcond() > 1e-14, ErrorKind::kNumeric, "care_solve: (A, C) is not detectable");
    // X = U2 U1^-1  =>  X^T = U1^-T U2^T
    CMatrix xt = lu.transpose().solve(u2.transpose());
    Matrix P = xt.transpose().real();
    P = 0.5 * (P + P.transpose()).eval();

    // Newton (Kleinman) refinement recovers accuracy lost to badly scaled data
    double res = care_residual(A, C, Q, V, P);
    if (n <= kNewtonMaxStates) {
        for (int it = 0; it < 8 && res > 1e-14; ++it) {
            const Matrix l = vchol.solve(C * P).transpose();
            const Matrix f = A - l * C;
            if (spectral_abscissa(f) >= 0.0) {
                break;
            }
            const Matrix next = lyapunov_kron(f, Q + l * V * l.transpose());
            const double r = care_residual(A, C, Q, V, next);
            if (!(r < res)) {
                break;
            }
            P = next;
            res = r;
        }
    }

    CareSolution sol;
    sol.P = P;
    sol.L = vchol.solve(C * P).transpose();
    sol.residual = res;
    require(sol.residual <= tol, ErrorKind::kNumeric,
            "care_solve: residual " + std::to_string(sol.residual) + " above tolerance");
    require(spectral_abscissa(A - sol.L * C) < 0.0, ErrorKind::kNumeric, "care_solve: A - L C is not Hurwitz");
    return sol;
}

}  // namespace mcd
