#pragma once

#include <vector>

#include "mcd/filter.hpp"
#include "mcd/io.hpp"
#include "mcd/position_map.hpp"

namespace mcd {

/// Frozen plants over the scheduling grid and an additive output-uncertainty weight
/// covering their deviation from the nominal one.
struct UncertainPlant {
    StateSpace nominal;
    std::vector<StateSpace> grid;
    std::vector<SchedulingPoint> points;
    Index nominal_index = 0;
    /// Per output channel k / (s^2/w^2 + 2 zeta s/w + 1); each channel dominates
    /// max_p sigma_max(G_p - G_nom) on the verification grid.
    RationalDiagonalFilter weight;
    Index delta_in = 0;   // Delta maps delta_in signals ...
    Index delta_out = 0;  // ... to delta_out signals
    std::vector<double> verify_hz;
    std::vector<double> deviation;  // max_p sigma_max(G_p - G_nom) per verification frequency
    double worst_ratio = 0.0;       // max over verification frequencies of deviation / |W| (<= 1)

    Json to_json() const;
};

/// Throws Error(kNumeric) if the fitted weight fails to dominate the deviation on the
/// verification grid (the message names the worst frequency).
UncertainPlant build_uncertain_plant(const std::vector<StateSpace>& grid, const std::vector<SchedulingPoint>& points,
                                     Index nominal_index, std::size_t verify_points = 200);

/// Frequency band (Hz) spanned by the nonzero poles of g, widened by `margin` on both sides.
std::pair<double, double> pole_band_hz(const StateSpace& g, double margin);

}  // namespace mcd
