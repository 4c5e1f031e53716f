#pragma once

#include <vector>

#include "mcd/filter.hpp"
#include "mcd/io.hpp"

namespace mcd {

/// Static normalizations of the plant channels.
struct ScalingSet {
    Matrix Wz_sc;   // output: reciprocal expected tracking error
    Matrix Ww1_sc;  // rigid-body inputs: 0 dB diagonal crossing at the target bandwidths
    Matrix Ww2_sc;  // flexible inputs: identity
};

/// g_rb: the square rigid-body channel of the decoupled nominal plant.
/// Throws Error(kDomain) when a diagonal response vanishes at its bandwidth.
ScalingSet compute_scalings(const StateSpace& g_rb, const std::vector<double>& f_bw_hz, const Vector& expected_error,
                            Index flex_channels);

/// K_s (s + 2 pi f_I) / (s + leak * 2 pi f_I) per channel; leak = 0 gives the pure integrator.
RationalDiagonalFilter make_integral_filter(const std::vector<double>& f_i_hz, double k_s, double leak = 0.0);
/// K_r (s + 2 pi f_r) / (s / alpha + 2 pi f_r) per channel.
RationalDiagonalFilter make_rolloff_filter(const std::vector<double>& f_r_hz, double k_r, double alpha);

struct DampingShape {
    double f_hz = 0.0;
    double beta1 = 0.5;
    double beta2 = 0.005;
    double eps = 1.0;
    double Q = 1.0;  // band factor of the flexible-mode controller for this mode
};
/// eps (s^2/w^2 + 2 beta1 s/w + 1) / (s^2/w^2 + 2 beta2 s/w + 1), w = 2 pi f: peaks at f with
/// ratio beta1/beta2. beta1 == beta2 degenerates to the constant eps.
RationalDiagonalFilter make_damping_filter(const std::vector<DampingShape>& shapes);

/// Band-pass flexible-mode controller  xi_i (w_i/Q) s / (s^2 + (w_i/Q) s + w_i^2).
struct FlexControllerParams {
    std::vector<double> xi;
    std::vector<double> omega;  // rad/s
    double Q = 1.0;
};
RationalDiagonalFilter make_kfm(const FlexControllerParams& params);

/// Tunable shaping parameters; empty f_I / f_r default to f_bw/4 and 4 f_bw.
struct ShapingParams {
    double K_s = 0.5;
    double K_r = 0.5;
    double alpha = 20.0;
    std::vector<double> f_bw;
    std::vector<double> f_I;
    std::vector<double> f_r;
    std::vector<DampingShape> flex;
    /// Integrator pole of W_z1 moved to -leak * 2 pi f_I so the weighted map has a finite norm.
    double integrator_leak = 1e-3;

    std::vector<double> integral_corners() const;
    std::vector<double> rolloff_corners() const;
    void validate() const;
};

enum class BlockPattern { kSix, kFour };

/// Weights of the weighted closed-loop map. The 6-block pattern uses W_z1 integral,
/// W_z2 roll-off, W_w1 = W_w2 = I and W_w3 damping; the 4-block pattern uses W_z1 integral,
/// W_z2 = I, W_w1 roll-off and W_w2 damping (W_w3 unused).
struct ShapingFilterSet {
    BlockPattern pattern = BlockPattern::kSix;
    RationalDiagonalFilter Wz1;
    RationalDiagonalFilter Wz2;
    RationalDiagonalFilter Ww1;
    RationalDiagonalFilter Ww2;
    RationalDiagonalFilter Ww3;
    ShapingParams params;
};

ShapingFilterSet make_weights(const ShapingParams& params, BlockPattern pattern);

Json to_json(const ShapingParams& p);
Json to_json(const ScalingSet& s);

}  // namespace mcd
