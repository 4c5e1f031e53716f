#include "mcd/linalg.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace mcd {

PseudoInverse pseudo_inverse(const Matrix& a, double rel_cutoff) {
    PseudoInverse out;
    out.pinv = Matrix::Zero(a.cols(), a.rows());
    if (a.size() == 0) {
        return out;
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    out.singular_values = s;
    const double cutoff = rel_cutoff * (s.size() > 0 ? s(0) : 0.0);
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff && s(i) > 0.0) {
            ++rank;
        }
    }
    out.rank = rank;
    const Matrix& u = svd.matrixU();
    const Matrix& v = svd.matrixV();
    for (Index i = 0; i < rank; ++i) {
        out.pinv += v.col(i) * (u.col(i).transpose() / s(i));
    }
    out.right_null = v.rightCols(v.cols() - rank);
    out.left_null = u.rightCols(u.cols() - rank);
    return out;
}

double max_singular_value(const CMatrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    if (m.size() == 1) {
        return std::abs(m(0, 0));
    }
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

double max_singular_value(const Matrix& m) {
    if (m.size() == 0) {
        return 0.0;
    }
    if (m.size() == 1) {
        return std::abs(m(0, 0));
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

CVector eigenvalues(const Matrix& a) {
    if (a.rows() == 0) {
        return CVector();
    }
    Eigen::EigenSolver<Matrix> es(a, false);
    return es.eigenvalues();
}

double spectral_abscissa(const Matrix& a) {
    if (a.rows() == 0) {
        return -std::numeric_limits<double>::infinity();
    }
    const CVector ev = eigenvalues(a);
    double m = -std::numeric_limits<double>::infinity();
    for (Index i = 0; i < ev.size(); ++i) {
        m = std::max(m, ev(i).real());
    }
    return m;
}

Vector balancing_scale(const Matrix& a) {
    const Index n = a.rows();
    Vector d = Vector::Ones(n);
    if (n == 0) {
        return d;
    }
    Matrix b = a;
    constexpr double kRadix = 2.0;
    bool converged = false;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        converged = true;
        for (Index i = 0; i < n; ++i) {
            double c = 0.0;
            double r = 0.0;
            for (Index j = 0; j < n; ++j) {
                if (j != i) {
                    c += std::abs(b(j, i));
                    r += std::abs(b(i, j));
                }
            }
            if (c == 0.0 || r == 0.0) {
                continue;
            }
            double g = r / kRadix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= kRadix;
                c *= kRadix * kRadix;
            }
            g = r * kRadix;
            while (c > g) {
                f /= kRadix;
                c /= kRadix * kRadix;
            }
            if ((c + r) / f < 0.95 * s) {
                converged = false;
                d(i) *= f;
                b.row(i) /= f;
                b.col(i) *= f;
            }
        }
    }
    return d;
}

}  // namespace mcd
