#pragma once

#include "mcd/io.hpp"
#include "mcd/mechanics.hpp"

namespace mcd {

/// Static input/output transformations making the rigid-body (and optionally some
/// flexible) channels of the plant diagonal at one scheduling point.
struct DecouplingPair {
    Matrix T_u;  // n_u x (n_rb + n_flex)
    Matrix T_y;  // n_rb x n_y
    SchedulingPoint p;
    bool position_independent = false;
    Index n_rb = 0;
    Index n_flex = 0;
};

/// Velocity rows of the per-mode grouped input map, (I (x) [0 1]) B.
Matrix velocity_rows(const Matrix& b_grouped);
/// Position columns of the per-mode grouped output map, C (I (x) [1 0])^T.
Matrix position_cols(const Matrix& c_grouped);

/// T_u = pinv of the rigid-body velocity input rows, T_y = pinv of the rigid-body position
/// output columns. Throws Error(kRank) naming the deficient directions.
DecouplingPair rb_decoupling(const PartitionedModalModel& pm, const SchedulingPoint& p);

/// Extends T_u to the first n_flex retained flexible modes so that each of them gets its own
/// input channel (ordered after the rigid-body channels). T_y stays rigid-body only.
DecouplingPair extended_input_decoupling(const PartitionedModalModel& pm, const SchedulingPoint& p, Index n_flex);

/// T_y G T_u.
StateSpace apply_decoupling(const StateSpace& g, const DecouplingPair& pair);
/// Same transformation applied to every input/output map of the partitioned model.
PartitionedModalModel apply_decoupling(const PartitionedModalModel& pm, const DecouplingPair& pair);

/// Largest deviation from identity of stacked-input(p) T_u and T_y output(p).
struct DecouplingResidual {
    double input = 0.0;
    double output = 0.0;
};
DecouplingResidual decoupling_residual(const PartitionedModalModel& pm, const DecouplingPair& pair,
                                       const SchedulingPoint& p);

Json to_json(const DecouplingPair& pair);

}  // namespace mcd
