#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mcd/types.hpp"

namespace mcd {

struct PatternSearchOptions {
    int budget = 200;            // polls per start; 0 returns the start point unchanged
    int starts = 5;              // the given start plus starts-1 seeded perturbations of it
    std::uint64_t seed = 1;
    double initial_step = 0.5;
    double min_step = 1e-3;
    double perturbation = 0.3;   // standard deviation of the start perturbations
    int max_evaluations = 0;     // 0 = unlimited
};

struct PatternSearchResult {
    Vector x;
    double value = 0.0;
    double initial_value = 0.0;
    /// Global best objective after every accepted step (non-increasing).
    std::vector<double> log;
    int evaluations = 0;
    int polls = 0;
    int best_start = 0;
};

/// Objective returning +inf for infeasible points. Must be safe to call concurrently.
using Objective = std::function<double(const Vector&)>;

/// Compass search: every poll evaluates x +/- step e_i (concurrently), moves to the best
/// strictly improving candidate (lowest index on ties) and halves the step when none improves.
/// Deterministic for a fixed seed regardless of thread count.
PatternSearchResult pattern_search(const Objective& f, const Vector& x0, const PatternSearchOptions& opts);

}  // namespace mcd
