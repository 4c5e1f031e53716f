#pragma once

#include <string>
#include <vector>

#include "mcd/io.hpp"
#include "mcd/position_map.hpp"
#include "mcd/statespace.hpp"

namespace mcd {

/// M q'' + D q' + K q = phi_a(p) u,  y = phi_s(p) q.
struct MechanicalModel {
    Matrix M;
    Matrix D;
    Matrix K;
    PositionMap phi_a;  // n_q x n_u
    PositionMap phi_s;  // n_y x n_q
    Domain domain;

    Index dofs() const { return M.rows(); }
    Index inputs() const { return phi_a.cols(); }
    Index outputs() const { return phi_s.rows(); }

    /// Checks symmetry, M SPD, D and K PSD, map shapes.
    void validate() const;
};

struct ModalDecomposition {
    Matrix Vt;      // mass-normalized mode shapes, one per column
    Vector omega;   // rad/s, ascending; rigid-body modes exactly 0
    Vector zeta;    // modal damping ratios; 0 for rigid-body modes
    Index n_rigid = 0;
    std::vector<std::string> warnings;

    Index modes() const { return omega.size(); }
};

/// Solves K V = M V Lambda. Requires proportional damping (V^T D V diagonal) unless
/// force_diagonal is set, in which case off-diagonal modal damping is dropped with a warning.
ModalDecomposition modal_decompose(const MechanicalModel& model, bool force_diagonal = false);

/// Modal LPV model frozen at p: x = [eta; eta'].
StateSpace to_modal_ss(const ModalDecomposition& dec, const MechanicalModel& model, const SchedulingPoint& p);

/// Permutation taking [eta; eta'] to per-mode (position, velocity) pairs.
Matrix mode_grouping_permutation(Index modes);

/// Mode-grouped model split into rigid-body, retained-flexible and discarded-flexible blocks.
/// Each block's states are per-mode (position, velocity) pairs.
struct PartitionedModalModel {
    Matrix A_rb;
    Matrix A_fm_r;
    Matrix A_fm_d;
    PositionMap B_rb;
    PositionMap B_fm_r;
    PositionMap B_fm_d;
    PositionMap C_rb;
    PositionMap C_fm_r;
    PositionMap C_fm_d;
    Index n_rb = 0;
    std::vector<Index> retained;   // indices into the decomposition's mode list
    std::vector<Index> discarded;
    Vector omega;                  // per mode of the decomposition
    Vector zeta;
    Domain domain;

    Index n_flex() const { return static_cast<Index>(retained.size()); }
    Index n_disc() const { return static_cast<Index>(discarded.size()); }
    Index inputs() const { return B_rb.cols(); }
    Index outputs() const { return C_rb.rows(); }
};

PartitionedModalModel group_and_partition(const ModalDecomposition& dec, const MechanicalModel& model, Index n_rb,
                                          const std::vector<Index>& retain);

/// Grouped LTI model at p with states [rigid; retained; discarded].
StateSpace evaluate_local(const PartitionedModalModel& pm, const SchedulingPoint& p);
/// Second-order form [q; q'] at p, without any modal transformation.
StateSpace evaluate_local(const MechanicalModel& model, const SchedulingPoint& p);

Json to_json(const MechanicalModel& model);
MechanicalModel mechanical_model_from_json(const Json& j);
Json position_map_to_json(const PositionMap& m);
PositionMap position_map_from_json(const Json& j, Index rows, Index cols, const Domain& domain,
                                   const std::string& what);

}  // namespace mcd
