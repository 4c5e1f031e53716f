#pragma once

#include <cstddef>

#include "mcd/statespace.hpp"

namespace mcd {

struct HinfResult {
    double gamma = 0.0;   // upper end of the final bracket
    double lower = 0.0;   // attained sigma_max at peak_omega
    double peak_omega = 0.0;
    int iterations = 0;
    bool used_fallback = false;
};

/// H-infinity norm of a stable system.
///
/// Brackets gamma between an attained lower bound and a test level, refining the bracket
/// with the imaginary-axis eigenvalues of the associated Hamiltonian: a level gamma is
/// exceeded by ||G||inf iff the Hamiltonian has eigenvalues on the imaginary axis, and those
/// eigenvalues locate the frequency intervals where sigma_max(G(jw)) > gamma. When the
/// Hamiltonian test is ill-conditioned the routine falls back to a dense frequency grid.
///
/// Throws Error(kNumeric) if A is not Hurwitz.
HinfResult hinf_norm(const StateSpace& g, double rel_tol = 1e-6);

/// Dense-grid estimate of ||G||inf on n log-spaced frequencies spanning the pole magnitudes.
/// A lower bound; used as an independent oracle and as the fallback path.
double hinf_norm_grid(const StateSpace& g, std::size_t n = 100000);

}  // namespace mcd
