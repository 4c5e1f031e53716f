#pragma once

#include <span>
#include <vector>

#include "mcd/statespace.hpp"

namespace mcd {

struct FrequencyResponse {
    std::vector<double> freqs_hz;
    std::vector<CMatrix> values;  // one outputs x inputs matrix per grid point
};

/// Evaluates C (sI - A)^-1 B + D after a one-off Hessenberg reduction of A, so each point
/// costs O(n^2 m) instead of a dense factorization.
class FrequencyEvaluator {
public:
    explicit FrequencyEvaluator(const StateSpace& g);

    /// Throws Error(kNumeric) when s is numerically an eigenvalue of A.
    CMatrix operator()(Complex s) const;

    Index states() const { return h_.rows(); }

private:
    Matrix h_;   // upper Hessenberg form of A
    Matrix qb_;  // Q^T B
    Matrix cq_;  // C Q
    Matrix d_;
    double scale_ = 1.0;
};

/// Direct evaluation by a dense LU solve of the balanced system; used as the reference path.
CMatrix evaluate_dense(const StateSpace& g, Complex s);
/// Same without balancing, for systems already balanced by the caller.
CMatrix evaluate_unbalanced(const StateSpace& g, Complex s);

/// n points from lo to hi (both > 0), equally spaced in log scale.
std::vector<double> logspace(double lo, double hi, std::size_t n);

void check_grid(std::span<const double> freqs_hz);

/// Frequency response on a Hz grid. OpenMP-parallel over grid points.
FrequencyResponse freq_response(const StateSpace& g, std::span<const double> freqs_hz);
/// Reference implementation: serial, dense solve per point.
FrequencyResponse freq_response_serial(const StateSpace& g, std::span<const double> freqs_hz);

struct PeakGain {
    double value = 0.0;
    double omega = 0.0;  // rad/s
};

/// max over the grid of sigma_max(G(j omega)). OpenMP-parallel reduction with a fixed
/// tie-break (lowest index wins) so the result is independent of thread count.
PeakGain peak_gain_grid(const StateSpace& g, std::span<const double> omegas);
PeakGain peak_gain_grid_serial(const StateSpace& g, std::span<const double> omegas);

}  // namespace mcd
