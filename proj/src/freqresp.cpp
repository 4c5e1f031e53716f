#include "mcd/freqresp.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include <Eigen/Eigenvalues>

#include "mcd/error.hpp"
#include "mcd/linalg.hpp"

namespace mcd {

namespace {

constexpr double kSingularTol = 1e3 * std::numeric_limits<double>::epsilon();

std::string singular_message(Complex s) {
    return "frequency response: s = " + std::to_string(s.real()) + (s.imag() < 0 ? "" : "+") +
           std::to_string(s.imag()) + "j is numerically a pole";
}

}  // namespace

FrequencyEvaluator::FrequencyEvaluator(const StateSpace& g_in) : d_(g_in.D) {
    const Index n = g_in.states();
    if (n == 0) {
        h_ = Matrix(0, 0);
        qb_ = Matrix(0, g_in.inputs());
        cq_ = Matrix(g_in.outputs(), 0);
        return;
    }
    // closed loops mix gains of very different magnitude; balancing keeps the pivot test meaningful
    const StateSpace g = balanced(g_in);
    Eigen::HessenbergDecomposition<Matrix> hess(g.A);
    const Matrix q = hess.matrixQ();
    h_ = hess.matrixH();
    qb_ = q.transpose() * g.B;
    cq_ = g.C * q;
    scale_ = std::max(1.0, h_.cwiseAbs().maxCoeff());
}

CMatrix FrequencyEvaluator::operator()(Complex s) const {
    const Index n = h_.rows();
    const Index m = qb_.cols();
    if (n == 0) {
        return d_.cast<Complex>();
    }
    // (sI - H) X = Q^T B, with sI - H upper Hessenberg.
    CMatrix t = -h_.cast<Complex>();
    t.diagonal().array() += s;
    CMatrix x = qb_.cast<Complex>();
    const double tol = kSingularTol * std::max(scale_, std::abs(s));
    for (Index k = 0; k + 1 < n; ++k) {
        if (std::abs(t(k + 1, k)) > std::abs(t(k, k))) {
            t.row(k).segment(k, n - k).swap(t.row(k + 1).segment(k, n - k));
            x.row(k).swap(x.row(k + 1));
        }
        if (std::abs(t(k, k)) <= tol) {
            fail(ErrorKind::kNumeric, singular_message(s));
        }
        const Complex l = t(k + 1, k) / t(k, k);
        if (l != Complex(0.0, 0.0)) {
            t.row(k + 1).segment(k, n - k) -= l * t.row(k).segment(k, n - k);
            x.row(k + 1) -= l * x.row(k);
        }
    }
    if (std::abs(t(n - 1, n - 1)) <= tol) {
        fail(ErrorKind::kNumeric, singular_message(s));
    }
    for (Index k = n - 1; k >= 0; --k) {
        for (Index j = k + 1; j < n; ++j) {
            x.row(k) -= t(k, j) * x.row(j);
        }
        x.row(k) /= t(k, k);
    }
    (void)m;
    return cq_.cast<Complex>() * x + d_.cast<Complex>();
}

CMatrix evaluate_dense(const StateSpace& g, Complex s) { return evaluate_unbalanced(balanced(g), s); }

CMatrix evaluate_unbalanced(const StateSpace& g, Complex s) {
    const Index n = g.states();
    if (n == 0) {
        return g.D.cast<Complex>();
    }
    CMatrix t = -g.A.cast<Complex>();
    t.diagonal().array() += s;
    Eigen::PartialPivLU<CMatrix> lu(t);
    // PartialPivLU does not report singularity; check the pivots.
    const CMatrix& packed = lu.matrixLU();
    const double tol = kSingularTol * std::max({1.0, g.A.cwiseAbs().maxCoeff(), std::abs(s)});
    for (Index i = 0; i < n; ++i) {
        if (std::abs(packed(i, i)) <= tol) {
            fail(ErrorKind::kNumeric, singular_message(s));
        }
    }
    return g.C.cast<Complex>() * lu.solve(g.B.cast<Complex>()) + g.D.cast<Complex>();
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
    require(lo > 0.0 && hi >= lo && n >= 1, ErrorKind::kDomain, "logspace: need 0 < lo <= hi and n >= 1");
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return out;
}

void check_grid(std::span<const double> freqs_hz) {
    for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
        require(std::isfinite(freqs_hz[i]) && freqs_hz[i] >= 0.0, ErrorKind::kDomain,
                "frequency grid must be nonnegative and finite");
        require(i == 0 || freqs_hz[i] > freqs_hz[i - 1], ErrorKind::kDomain,
                "frequency grid must be strictly ascending");
    }
}

FrequencyResponse freq_response(const StateSpace& g, std::span<const double> freqs_hz) {
    check_grid(freqs_hz);
    FrequencyResponse fr;
    fr.freqs_hz.assign(freqs_hz.begin(), freqs_hz.end());
    fr.values.resize(freqs_hz.size());
    const FrequencyEvaluator eval(g);
    const auto n = static_cast<long>(freqs_hz.size());
    std::vector<std::exception_ptr> errors(freqs_hz.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) {
        try {
            fr.values[static_cast<std::size_t>(k)] = eval(Complex(0.0, kTwoPi * freqs_hz[static_cast<std::size_t>(k)]));
        } catch (...) {
            errors[static_cast<std::size_t>(k)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return fr;
}

FrequencyResponse freq_response_serial(const StateSpace& g, std::span<const double> freqs_hz) {
    check_grid(freqs_hz);
    FrequencyResponse fr;
    fr.freqs_hz.assign(freqs_hz.begin(), freqs_hz.end());
    fr.values.reserve(freqs_hz.size());
    const StateSpace b = balanced(g);
    for (double f : freqs_hz) {
        fr.values.push_back(evaluate_unbalanced(b, Complex(0.0, kTwoPi * f)));
    }
    return fr;
}

PeakGain peak_gain_grid(const StateSpace& g, std::span<const double> omegas) {
    const FrequencyEvaluator eval(g);
    const auto n = static_cast<long>(omegas.size());
    std::vector<double> gains(omegas.size(), 0.0);
    std::vector<std::exception_ptr> errors(omegas.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        try {
            gains[i] = max_singular_value(eval(Complex(0.0, omegas[i])));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    PeakGain best;
    for (std::size_t i = 0; i < gains.size(); ++i) {
        if (errors[i]) {
            std::rethrow_exception(errors[i]);
        }
        if (gains[i] > best.value) {
            best.value = gains[i];
            best.omega = omegas[i];
        }
    }
    return best;
}

PeakGain peak_gain_grid_serial(const StateSpace& g, std::span<const double> omegas) {
    PeakGain best;
    const StateSpace b = balanced(g);
    for (double w : omegas) {
        const double v = max_singular_value(evaluate_unbalanced(b, Complex(0.0, w)));
        if (v > best.value) {
            best.value = v;
            best.omega = w;
        }
    }
    return best;
}

}  // namespace mcd
