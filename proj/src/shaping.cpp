#include "mcd/shaping.hpp"

#include <cmath>

#include "mcd/error.hpp"
#include "mcd/freqresp.hpp"

namespace mcd {

namespace {

void require_positive(double v, const std::string& what) {
    require(std::isfinite(v) && v > 0.0, ErrorKind::kDomain, what + " must be positive");
}

}  // namespace

ScalingSet compute_scalings(const StateSpace& g_rb, const std::vector<double>& f_bw_hz, const Vector& expected_error,
                            Index flex_channels) {
    const Index n = g_rb.outputs();
    require(g_rb.inputs() == n, ErrorKind::kDimension, "compute_scalings: rigid-body plant must be square");
    require(static_cast<Index>(f_bw_hz.size()) == n && expected_error.size() == n, ErrorKind::kDimension,
            "compute_scalings: one bandwidth and one expected error per rigid-body channel");
    ScalingSet s;
    s.Wz_sc = Matrix::Zero(n, n);
    s.Ww1_sc = Matrix::Zero(n, n);
    const FrequencyEvaluator eval(g_rb);
    for (Index i = 0; i < n; ++i) {
        require_positive(f_bw_hz[static_cast<std::size_t>(i)], "compute_scalings: f_bw");
        require_positive(expected_error(i), "compute_scalings: expected error");
        s.Wz_sc(i, i) = 1.0 / expected_error(i);
    }
    for (Index i = 0; i < n; ++i) {
        const double g = std::abs(eval(Complex(0.0, kTwoPi * f_bw_hz[static_cast<std::size_t>(i)]))(i, i));
        require(g > 0.0 && std::isfinite(g), ErrorKind::kDomain,
                "compute_scalings: rigid-body channel " + std::to_string(i) + " has zero response at its bandwidth");
        s.Ww1_sc(i, i) = 1.0 / (g * s.Wz_sc(i, i));
    }
    s.Ww2_sc = Matrix::Identity(flex_channels, flex_channels);
    return s;
}

RationalDiagonalFilter make_integral_filter(const std::vector<double>& f_i_hz, double k_s, double leak) {
    require_positive(k_s, "integral filter: K_s");
    require(leak >= 0.0 && leak < 1.0, ErrorKind::kDomain, "integral filter: leak must lie in [0, 1)");
    std::vector<std::vector<RationalSection>> ch;
    for (double f : f_i_hz) {
        require_positive(f, "integral filter: f_I");
        const double w = kTwoPi * f;
        RationalSection s;
        s.num = {0.0, k_s, k_s * w};
        s.den = {0.0, 1.0, leak * w};
        ch.push_back({s});
    }
    return RationalDiagonalFilter(std::move(ch));
}

RationalDiagonalFilter make_rolloff_filter(const std::vector<double>& f_r_hz, double k_r, double alpha) {
    require_positive(k_r, "roll-off filter: K_r");
    require(alpha > 1.0, ErrorKind::kDomain, "roll-off filter: alpha must exceed 1");
    std::vector<std::vector<RationalSection>> ch;
    for (double f : f_r_hz) {
        require_positive(f, "roll-off filter: f_r");
        const double w = kTwoPi * f;
        RationalSection s;
        s.num = {0.0, k_r, k_r * w};
        s.den = {0.0, 1.0 / alpha, w};
        ch.push_back({s});
    }
    return RationalDiagonalFilter(std::move(ch));
}

RationalDiagonalFilter make_damping_filter(const std::vector<DampingShape>& shapes) {
    std::vector<std::vector<RationalSection>> ch;
    for (const auto& d : shapes) {
        require_positive(d.f_hz, "damping filter: f");
        require_positive(d.beta2, "damping filter: beta2");
        require_positive(d.eps, "damping filter: eps");
        require(d.beta1 >= d.beta2, ErrorKind::kDomain,
                "damping filter: beta1 must not be below beta2 (the filter would attenuate the mode)");
        const double w = kTwoPi * d.f_hz;
        RationalSection s;
        s.num = {d.eps / (w * w), 2.0 * d.eps * d.beta1 / w, d.eps};
        s.den = {1.0 / (w * w), 2.0 * d.beta2 / w, 1.0};
        ch.push_back({s});
    }
    return RationalDiagonalFilter(std::move(ch));
}

RationalDiagonalFilter make_kfm(const FlexControllerParams& params) {
    require(params.xi.size() == params.omega.size(), ErrorKind::kDimension, "make_kfm: one gain per mode");
    require_positive(params.Q, "make_kfm: Q");
    std::vector<std::vector<RationalSection>> ch;
    for (std::size_t i = 0; i < params.xi.size(); ++i) {
        require_positive(params.omega[i], "make_kfm: omega");
        require(std::isfinite(params.xi[i]), ErrorKind::kDomain, "make_kfm: xi must be finite");
        const double w = params.omega[i];
        RationalSection s;
        s.num = {0.0, params.xi[i] * w / params.Q, 0.0};
        s.den = {1.0, w / params.Q, w * w};
        ch.push_back({s});
    }
    return RationalDiagonalFilter(std::move(ch));
}

std::vector<double> ShapingParams::integral_corners() const {
    if (!f_I.empty()) {
        return f_I;
    }
    std::vector<double> out;
    for (double f : f_bw) {
        out.push_back(f / 4.0);
    }
    return out;
}

std::vector<double> ShapingParams::rolloff_corners() const {
    if (!f_r.empty()) {
        return f_r;
    }
    std::vector<double> out;
    for (double f : f_bw) {
        out.push_back(4.0 * f);
    }
    return out;
}

void ShapingParams::validate() const {
    require(!f_bw.empty(), ErrorKind::kConfig, "filters.f_bw: at least one rigid-body bandwidth is required");
    require(f_I.empty() || f_I.size() == f_bw.size(), ErrorKind::kConfig, "filters.f_I: one entry per f_bw");
    require(f_r.empty() || f_r.size() == f_bw.size(), ErrorKind::kConfig, "filters.f_r: one entry per f_bw");
    require_positive(K_s, "filters.K_s");
    require_positive(K_r, "filters.K_r");
    require(alpha > 1.0, ErrorKind::kConfig, "filters.alpha must exceed 1");
    require(integrator_leak > 0.0 && integrator_leak < 1.0, ErrorKind::kConfig,
            "filters.integrator_leak must lie in (0, 1)");
}

ShapingFilterSet make_weights(const ShapingParams& params, BlockPattern pattern) {
    params.validate();
    ShapingFilterSet w;
    w.pattern = pattern;
    w.params = params;
    const std::size_t n_rb = params.f_bw.size();
    w.Wz1 = make_integral_filter(params.integral_corners(), params.K_s, params.integrator_leak);
    if (pattern == BlockPattern::kSix) {
        w.Wz2 = make_rolloff_filter(params.rolloff_corners(), params.K_r, params.alpha);
        w.Ww1 = RationalDiagonalFilter::identity(n_rb);
        w.Ww2 = RationalDiagonalFilter::identity(n_rb);
        w.Ww3 = make_damping_filter(params.flex);
    } else {
        w.Wz2 = RationalDiagonalFilter::identity(n_rb);
        w.Ww1 = make_rolloff_filter(params.rolloff_corners(), params.K_r, params.alpha);
        w.Ww2 = make_damping_filter(params.flex);
    }
    return w;
}

Json to_json(const ShapingParams& p) {
    Json j;
    j["K_s"] = p.K_s;
    j["K_r"] = p.K_r;
    j["alpha"] = p.alpha;
    j["f_bw"] = p.f_bw;
    j["f_I"] = p.integral_corners();
    j["f_r"] = p.rolloff_corners();
    j["integrator_leak"] = p.integrator_leak;
    Json flex = Json::array();
    for (const auto& d : p.flex) {
        flex.push_back({{"f_hz", d.f_hz}, {"beta1", d.beta1}, {"beta2", d.beta2}, {"eps", d.eps}, {"Q", d.Q}});
    }
    j["flex"] = flex;
    return j;
}

Json to_json(const ScalingSet& s) {
    return {{"Wz_sc", matrix_to_json(s.Wz_sc)}, {"Ww1_sc", matrix_to_json(s.Ww1_sc)},
            {"Ww2_sc", matrix_to_json(s.Ww2_sc)}};
}

}  // namespace mcd
