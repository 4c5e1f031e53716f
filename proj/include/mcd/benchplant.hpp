#pragma once

#include <string>
#include <vector>

#include "mcd/mechanics.hpp"

namespace mcd {

/// A surrogate plant together with the design choices it is meant to be used with.
struct BenchmarkSpec {
    std::string name;
    MechanicalModel model;
    Index n_rb = 0;
    std::vector<Index> retain;      // flexible modes kept in the observer model
    std::vector<Index> controlled;  // modes receiving active damping
    Index n_flex = 0;               // modes decoupled on the actuator side
    SchedulingPoint p_star;
    std::size_t grid_per_axis = 0;
    std::vector<double> f_bw;       // rigid-body target bandwidths, Hz
    std::vector<double> flex_hz;    // eigenfrequencies the plant was built for
    double flex_zeta = 0.0;
};

/// Two unit masses joined by a spring tuned to 50 Hz, both actuated, sensed at the
/// p-weighted point (1 - p) q1 + p q2 (plus p q1 + (1 - p) q2 when two outputs are requested).
MechanicalModel make_two_mass(bool two_outputs = false);

/// Plate of four corner masses and a center mass: heave, roll and pitch rigid-body modes,
/// torsion at 120 Hz and an umbrella mode at 180 Hz (zeta 0.005). Corner actuators; three
/// point sensors that translate with p in [0,1]^2 and read the bilinear interpolation of the
/// corner displacements.
MechanicalModel make_mmpa_lite();

BenchmarkSpec two_mass_spec();
BenchmarkSpec mmpa_lite_spec();
/// Looks a benchmark up by name ("two_mass", "mmpa_lite"); Error(kConfig) if unknown.
BenchmarkSpec benchmark_by_name(const std::string& name);
std::vector<std::string> benchmark_names();

}  // namespace mcd
