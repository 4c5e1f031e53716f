#include "mcd/controller.hpp"

#include <algorithm>

#include <cmath>

#include "mcd/error.hpp"

namespace mcd {

namespace {

double& field(RbChannelParams& c, int i) {
    switch (i) {
        case 0: return c.k;
        case 1: return c.f_i;
        case 2: return c.f_leak;
        case 3: return c.f_z;
        case 4: return c.f_p;
        case 5: return c.f_lp;
        default: return c.zeta_lp;
    }
}

const char* field_name(int i) {
    static const char* names[] = {"k", "f_i", "f_leak", "f_z", "f_p", "f_lp", "zeta_lp"};
    return names[i];
}

// Search box: K_RB gains and corners within a factor 100 of the reference, the low-pass
// damping within [0.1, 5], observer gains within a factor 1e6 of their initial value.
constexpr double kRbLogRange = 4.605170185988091;     // ln 100
constexpr double kLLogRange = 13.815510557964274;     // ln 1e6
constexpr double kZetaLp[2] = {0.1, 5.0};

}  // namespace

void RbChannelParams::validate() const {
    RbChannelParams copy = *this;
    for (int i = 0; i < kCount; ++i) {
        const double v = field(copy, i);
        require(std::isfinite(v) && v > 0.0, ErrorKind::kDomain,
                std::string("K_RB parameter ") + field_name(i) + " must be positive and finite");
    }
}

std::size_t StructuredControllerParams::parameter_count() const {
    return k_rb.size() * RbChannelParams::kCount + static_cast<std::size_t>(L.size()) + xi.size();
}

RationalDiagonalFilter make_krb(const std::vector<RbChannelParams>& channels) {
    std::vector<std::vector<RationalSection>> out;
    for (const auto& c : channels) {
        c.validate();
        const double wi = kTwoPi * c.f_i;
        const double wl = kTwoPi * c.f_leak;
        const double wz = kTwoPi * c.f_z;
        const double wp = kTwoPi * c.f_p;
        const double wlp = kTwoPi * c.f_lp;
        RationalSection pi;
        pi.num = {0.0, c.k, c.k * wi};
        pi.den = {0.0, 1.0, wl};
        RationalSection lead;
        lead.num = {0.0, 1.0, wz};
        lead.den = {0.0, 1.0, wp};
        RationalSection lp;
        lp.num = {0.0, 0.0, wlp * wlp};
        lp.den = {1.0, 2.0 * c.zeta_lp * wlp, wlp * wlp};
        out.push_back({pi, lead, lp});
    }
    return RationalDiagonalFilter(std::move(out));
}

RbChannelParams loop_shaping_init(double f_bw, double plant_gain) {
    require(f_bw > 0.0 && plant_gain > 0.0, ErrorKind::kDomain, "loop_shaping_init: f_bw and gain must be positive");
    RbChannelParams c;
    c.f_i = f_bw / 4.0;
    c.f_leak = c.f_i * 1e-3;
    c.f_z = f_bw / 3.0;
    c.f_p = 3.0 * f_bw;
    c.f_lp = 6.0 * f_bw;
    c.zeta_lp = 0.7;
    c.k = 1.0;
    const Complex s(0.0, kTwoPi * f_bw);
    const double mag = std::abs(make_krb({c}).eval(0, s));
    c.k = 1.0 / (mag * plant_gain);
    return c;
}

ParameterMap::ParameterMap(const StructuredControllerParams& reference, bool tune_rb, bool tune_flex,
                           double xi_scale)
    : ref_(reference), tune_rb_(tune_rb), tune_flex_(tune_flex), xi_scale_(xi_scale) {
    require(xi_scale > 0.0, ErrorKind::kDomain, "ParameterMap: xi scale must be positive");
    if (tune_rb_) {
        for (std::size_t ch = 0; ch < ref_.k_rb.size(); ++ch) {
            for (int i = 0; i < RbChannelParams::kCount; ++i) {
                names_.push_back("K_RB[" + std::to_string(ch) + "]." + field_name(i));
            }
        }
    }
    if (tune_flex_) {
        const double lmax = ref_.L.size() ? ref_.L.cwiseAbs().maxCoeff() : 0.0;
        l_scale_ = lmax > 0.0 ? lmax : 1.0;
        for (Index c = 0; c < ref_.L.cols(); ++c) {
            for (Index r = 0; r < ref_.L.rows(); ++r) {
                names_.push_back("L[" + std::to_string(r) + "," + std::to_string(c) + "]");
            }
        }
        for (std::size_t i = 0; i < ref_.xi.size(); ++i) {
            names_.push_back("xi[" + std::to_string(i) + "]");
        }
    }
}

Vector ParameterMap::encode(const StructuredControllerParams& p) const {
    Vector theta(size());
    Index k = 0;
    if (tune_rb_) {
        for (auto c : p.k_rb) {
            for (int i = 0; i < RbChannelParams::kCount; ++i) {
                theta(k++) = std::log(field(c, i));
            }
        }
    }
    if (tune_flex_) {
        for (Index c = 0; c < ref_.L.cols(); ++c) {
            for (Index r = 0; r < ref_.L.rows(); ++r) {
                const double l0 = ref_.L(r, c);
                const double l = p.L(r, c);
                if (l0 != 0.0 && l / l0 > 0.0) {
                    theta(k++) = std::log(l / l0);
                } else {
                    theta(k++) = l0 != 0.0 ? -30.0 : l / l_scale_;
                }
            }
        }
        for (double x : p.xi) {
            theta(k++) = x / xi_scale_;
        }
    }
    return theta;
}

StructuredControllerParams ParameterMap::decode(const Vector& theta) const {
    require(theta.size() == size(), ErrorKind::kDimension, "ParameterMap: wrong parameter vector length");
    StructuredControllerParams p = ref_;
    Index k = 0;
    if (tune_rb_) {
        for (std::size_t ch = 0; ch < p.k_rb.size(); ++ch) {
            RbChannelParams& c = p.k_rb[ch];
            RbChannelParams r = ref_.k_rb[ch];
            for (int i = 0; i < RbChannelParams::kCount; ++i) {
                const double t = theta(k++);
                if (i == RbChannelParams::kCount - 1) {
                    field(c, i) = std::clamp(std::exp(t), kZetaLp[0], kZetaLp[1]);
                } else {
                    const double l0 = std::log(field(r, i));
                    field(c, i) = std::exp(std::clamp(t, l0 - kRbLogRange, l0 + kRbLogRange));
                }
            }
        }
    }
    if (tune_flex_) {
        for (Index c = 0; c < ref_.L.cols(); ++c) {
            for (Index r = 0; r < ref_.L.rows(); ++r) {
                const double l0 = ref_.L(r, c);
                p.L(r, c) = l0 != 0.0 ? l0 * std::exp(std::clamp(theta(k), -kLLogRange, kLLogRange))
                                      : theta(k) * l_scale_;
                ++k;
            }
        }
        for (auto& x : p.xi) {
            x = theta(k++) * xi_scale_;
        }
    }
    return p;
}

Json to_json(const StructuredControllerParams& p) {
    Json rb = Json::array();
    for (auto c : p.k_rb) {
        Json ch;
        for (int i = 0; i < RbChannelParams::kCount; ++i) {
            ch[field_name(i)] = field(c, i);
        }
        rb.push_back(ch);
    }
    return {{"K_RB", rb}, {"L", matrix_to_json(p.L)}, {"xi", p.xi}};
}

StructuredControllerParams structured_params_from_json(const Json& j) {
    require(j.is_object() && j.contains("K_RB") && j.contains("L") && j.contains("xi"), ErrorKind::kConfig,
            "controller parameters: expected \"K_RB\", \"L\" and \"xi\"");
    StructuredControllerParams p;
    for (const Json& ch : j["K_RB"]) {
        RbChannelParams c;
        for (int i = 0; i < RbChannelParams::kCount; ++i) {
            require(ch.contains(field_name(i)) && ch[field_name(i)].is_number(), ErrorKind::kConfig,
                    std::string("controller parameters: K_RB entry lacks ") + field_name(i));
            field(c, i) = ch[field_name(i)].get<double>();
        }
        c.validate();
        p.k_rb.push_back(c);
    }
    p.L = matrix_from_json(j["L"], "controller parameters.L");
    p.xi = j["xi"].get<std::vector<double>>();
    return p;
}

}  // namespace mcd
