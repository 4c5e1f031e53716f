#pragma once

#include <vector>

#include "mcd/closed_loop.hpp"
#include "mcd/optimizer.hpp"

namespace mcd {

struct SynthesisOptions {
    PatternSearchOptions search;
    double hinf_tol = 1e-4;        // relative tolerance of the norm inside the search
    double final_hinf_tol = 1e-6;  // tolerance of the reported norm
    bool flex_loop = true;         // false: conventional design, xi = 0 and no observer
    bool tune_rb = true;
    std::vector<int> objective_blocks;  // generalized-input blocks in the objective; empty = all
    double xi_scale = 1.0;
    int stabilize_budget = 100;    // polls of the spectral-abscissa pre-phase
};

struct SynthesisResult {
    StructuredControllerParams params;
    StructuredControllerParams init;
    double gamma = 0.0;        // norm of the objective map at params
    double gamma_init = 0.0;   // same at the (possibly stabilized) initial point; inf if unstable
    std::vector<double> log;   // accepted objective values
    GridCertificate certificate;
    int evaluations = 0;
    bool stabilized = false;   // a pre-phase was needed
    double init_abscissa = 0.0;
};

/// Objective value at params: norm of the selected blocks of M at the nominal plant, or +inf
/// when the loop is unstable at the nominal plant or at any grid point.
double synthesis_objective(const SynthesisProblem& problem, const StructuredControllerParams& params,
                           const SynthesisOptions& opts, double hinf_tol);

/// Largest closed-loop spectral abscissa over the nominal plant and the grid.
double worst_abscissa(const SynthesisProblem& problem, const StructuredControllerParams& params, bool flex_loop);

/// Locally minimizes the objective over diag(K_RB, L, K_FM) from init. Throws Error(kNumeric)
/// if no stabilizing point is found (message carries the best abscissa).
SynthesisResult synthesize(const SynthesisProblem& problem, const StructuredControllerParams& init,
                           const SynthesisOptions& opts);

}  // namespace mcd
