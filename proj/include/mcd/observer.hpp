#pragma once

#include <string>
#include <vector>

#include "mcd/filter.hpp"
#include "mcd/io.hpp"
#include "mcd/mechanics.hpp"

namespace mcd {

/// Rigid-body and retained flexible dynamics with the discarded modes replaced by their
/// static contribution (compliance correction) in the feed-through.
struct TruncatedModel {
    StateSpace model;  // states [rigid; retained], D = D_o
    SchedulingPoint p;
    Index n_rb = 0;
    Index n_flex = 0;
};

/// D_o = -C_d(p) A_d^-1 B_d(p). Throws Error(kDomain) if a discarded mode has no stiffness.
TruncatedModel truncate_with_compliance(const PartitionedModalModel& pm, const SchedulingPoint& p);

/// Static contribution -C_d A_d^-1 B_d of the discarded modes at p (zero if none).
Matrix compliance_correction(const PartitionedModalModel& pm, const SchedulingPoint& p);

enum class ObserverKind { kOutput, kError };

struct ModalObserver {
    ObserverKind kind = ObserverKind::kOutput;
    /// Output-based: inputs [u; y]. Error-based: inputs [u_FM; e]. Output: estimated modal velocities.
    StateSpace realization;
    Matrix L;
    Matrix Psi;
    /// Matrices of the model the observer copies; the estimation error obeys A - L C_meas.
    Matrix A_model;
    Matrix C_meas;
    CVector error_poles;
    bool error_stable = false;
    std::vector<std::string> warnings;

    Index control_inputs() const { return realization.inputs() - L.cols(); }
    Index measurement_inputs() const { return L.cols(); }
};

/// Observer x' = (A_o - L C_o) x + (B_o - L D_o) u + L y,  eta_hat = Psi x.
ModalObserver build_output_observer(const TruncatedModel& tm, const Matrix& L, const Matrix& Psi);

/// Observer over the retained flexible modes only, driven by the flexible-mode commands u_FM
/// (the decoupled inputs after the n_rb rigid-body channels) and the tracking error e ~ -y_flex.
/// The measurement model is e = -C_f x - D_o u_FM, so
///   x' = (A_f + L C_f) x + (B_f + L D_o) u_FM + L e.
ModalObserver build_error_observer(const PartitionedModalModel& pm, const SchedulingPoint& p, const Matrix& L,
                                   const Matrix& Psi);

/// Matrices (A, C_meas) whose filter Riccati solution seeds L for each observer kind.
struct ObserverDesignModel {
    Matrix A;
    Matrix C;
};
ObserverDesignModel output_observer_design_model(const TruncatedModel& tm);
ObserverDesignModel error_observer_design_model(const PartitionedModalModel& pm, const SchedulingPoint& p);

/// Map e -> u_FM of the flexible loop closed through the observer:
/// [I - K_FM O_u]^-1 K_FM O_e. Throws Error(kRank) on a singular algebraic loop.
StateSpace sigma_subsystem(const ModalObserver& obs, const RationalDiagonalFilter& kfm);

/// One row per controlled mode selecting its velocity state; controlled entries are mode
/// indices of the decomposition and must be retained modes.
Matrix selection_matrix(const PartitionedModalModel& pm, const std::vector<Index>& controlled, ObserverKind kind);

Json to_json(const ModalObserver& obs);
std::string to_string(ObserverKind kind);

}  // namespace mcd
