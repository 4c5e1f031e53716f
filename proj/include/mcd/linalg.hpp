#pragma once

#include "mcd/types.hpp"

namespace mcd {

struct PseudoInverse {
    Matrix pinv;
    Index rank = 0;
    Vector singular_values;
    Matrix right_null;  // columns spanning the numerically deficient input directions
    Matrix left_null;   // columns spanning the numerically deficient output directions
};

/// Moore-Penrose inverse by SVD; singular values below rel_cutoff * sigma_max are dropped.
PseudoInverse pseudo_inverse(const Matrix& a, double rel_cutoff = 1e-10);

double max_singular_value(const CMatrix& m);
double max_singular_value(const Matrix& m);

/// Largest real part of the eigenvalues of a; -inf for an empty matrix.
double spectral_abscissa(const Matrix& a);

CVector eigenvalues(const Matrix& a);

/// Diagonal similarity D such that D^-1 A D has rows and columns of comparable norm
/// (Parlett-Reinsch, powers of two so the transform is exact).
Vector balancing_scale(const Matrix& a);

}  // namespace mcd
