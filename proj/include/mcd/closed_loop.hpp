#pragma once

#include <string>
#include <vector>

#include "mcd/controller.hpp"
#include "mcd/observer.hpp"
#include "mcd/shaping.hpp"

namespace mcd {

/// Everything the controller is designed against. All plants are decoupled (inputs
/// [rigid-body channels; flexible channels], outputs the rigid-body channels).
struct SynthesisProblem {
    BlockPattern pattern = BlockPattern::kSix;  // six-block: output-based observer; four-block: error-based
    StateSpace plant;                           // nominal plant at p_star
    SchedulingPoint p_star;
    std::vector<SchedulingPoint> grid;
    std::vector<StateSpace> grid_plants;
    ScalingSet scalings;
    ShapingFilterSet weights;
    TruncatedModel truncated;     // observer model for the output-based observer
    PartitionedModalModel model;  // decoupled partitioned model, for the error-based observer
    Matrix Psi;
    std::vector<double> flex_omega;  // rad/s, per controlled mode
    double Q = 1.0;

    Index n_rb() const { return plant.outputs(); }
    Index n_flex() const { return plant.inputs() - plant.outputs(); }
    ObserverKind observer_kind() const {
        return pattern == BlockPattern::kSix ? ObserverKind::kOutput : ObserverKind::kError;
    }
};

/// Realized controller pieces. K_RB acts between the scaled error and the scaled rigid-body
/// input; the observer and K_FM act on physical (decoupled) signals.
struct ControllerBinding {
    StateSpace k_rb;
    bool flex_loop = false;
    ModalObserver observer;
    RationalDiagonalFilter kfm;
};

ControllerBinding bind_controller(const SynthesisProblem& problem, const StructuredControllerParams& params,
                                  bool flex_loop);

/// Feedback loop around `plant`. External inputs (any subset, in order):
///   "r"     reference, physical units (n_rb)
///   "d_out" output disturbance in scaled units, not seen by an output-based observer (n_rb)
///   "d_in1" rigid-body input disturbance in scaled units, part of the known input (n_rb)
///   "d_in2" force on the flexible channels, physical units, unknown to the observer (n_flex)
/// Outputs: "e_s" scaled error, "e" physical error, "c" K_RB output, "y" plant output,
///   "u1" physical rigid-body input, "u_fm" flexible-mode command, "eta" estimated velocities.
StateSpace closed_loop(const StateSpace& plant, const SynthesisProblem& problem, const ControllerBinding& binding,
                       const std::vector<std::string>& inputs, const std::vector<std::string>& outputs);

/// Weighted closed-loop map M with  z = -M w.
/// Six-block: w = [w1 (output disturbance); w2 (input disturbance); w3 (flexible force)],
/// Four-block: w = [w1 (input disturbance); w2 (flexible force)];  z = [z1 = W_z1 e_s; z2 = W_z2 c].
struct ClosedLoopMap {
    StateSpace M;
    BlockPattern pattern = BlockPattern::kSix;
    std::vector<Index> z_sizes;
    std::vector<Index> w_sizes;
    std::vector<std::string> w_names;

    /// Columns of the generalized inputs in `blocks` (0-based block indices).
    StateSpace columns(const std::vector<int>& blocks) const;
    Json channel_map() const;
};

ClosedLoopMap weighted_map(const StateSpace& plant, const SynthesisProblem& problem, const ControllerBinding& binding);

/// S = [I + G_Delta,1 K_RB]^-1 (six-block) or [I + G_1 K_RB + G_2 Sigma]^-1 (four-block), scaled.
StateSpace sensitivity(const StateSpace& plant, const SynthesisProblem& problem, const ControllerBinding& binding);

/// Plant with the flexible loop closed: inputs [u1; u2] (physical), output y. The observer
/// knows u1 and its own command u_FM but not u2. With the loop open this is the plant.
StateSpace plant_delta(const StateSpace& plant, const SynthesisProblem& problem, const ControllerBinding& binding);

/// Scaled rigid-body loop gain P_eff K_RB, with P_eff the map c -> -e_s when the loop is broken
/// at the K_RB output (flexible loop closed): Wz_sc G_Delta,1 Ww1_sc for the output-based observer.
StateSpace rb_loop_gain(const StateSpace& plant, const SynthesisProblem& problem, const ControllerBinding& binding);

/// Lowest frequency (Hz) at which |L_ii| falls through 1 on [f_lo, f_hi]; NaN if none.
double crossover_hz(const StateSpace& loop_gain, Index channel, double f_lo, double f_hi);

struct GridCertificate {
    std::vector<SchedulingPoint> points;
    std::vector<bool> hurwitz;
    std::vector<double> abscissa;  // slowest closed-loop pole real part per point

    bool all_stable() const;
    Json to_json() const;
};

/// Closes the full loop (K_RB, observer, K_FM) around each frozen local plant.
GridCertificate grid_stability_check(const SynthesisProblem& problem, const ControllerBinding& binding);

}  // namespace mcd
