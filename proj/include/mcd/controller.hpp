#pragma once

#include <string>
#include <vector>

#include "mcd/filter.hpp"
#include "mcd/io.hpp"

namespace mcd {

/// One rigid-body channel of K_RB:
///   k (s + w_i)/(s + w_leak) * (s + w_z)/(s + w_p) * w_lp^2/(s^2 + 2 zeta_lp w_lp s + w_lp^2)
/// with all corner frequencies given in Hz.
struct RbChannelParams {
    double k = 1.0;
    double f_i = 1.0;
    double f_leak = 1e-3;
    double f_z = 1.0;
    double f_p = 10.0;
    double f_lp = 100.0;
    double zeta_lp = 0.7;

    static constexpr int kCount = 7;
    void validate() const;
};

/// Tunable entries of diag(K_RB, L, K_FM).
struct StructuredControllerParams {
    std::vector<RbChannelParams> k_rb;
    Matrix L;                // observer gain, empty when the flexible loop is absent
    std::vector<double> xi;  // flexible-mode gains

    std::size_t parameter_count() const;
};

RationalDiagonalFilter make_krb(const std::vector<RbChannelParams>& channels);

/// Classical start: integral corner f_bw/4, lead centered at f_bw (zero f_bw/3, pole 3 f_bw),
/// low-pass at 6 f_bw, gain giving |K(j 2 pi f_bw)| = 1/plant_gain (unit crossover for a
/// plant normalized to 0 dB at f_bw).
RbChannelParams loop_shaping_init(double f_bw, double plant_gain = 1.0);

/// Coordinates used by the optimizer. Positive quantities are log-scaled; nonzero observer
/// gain entries are scaled multiplicatively about their initial value (so they keep their
/// sign), zero entries and the flexible gains additively. decode() clamps to a search box:
/// K_RB gains and corners within a factor 100 of the reference, low-pass damping in [0.1, 5],
/// nonzero observer gains within a factor 1e6 of their reference.
class ParameterMap {
public:
    ParameterMap(const StructuredControllerParams& reference, bool tune_rb, bool tune_flex, double xi_scale);

    Vector encode(const StructuredControllerParams& p) const;
    StructuredControllerParams decode(const Vector& theta) const;
    Index size() const { return static_cast<Index>(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }

private:
    StructuredControllerParams ref_;
    bool tune_rb_;
    bool tune_flex_;
    double xi_scale_;
    double l_scale_ = 1.0;
    std::vector<std::string> names_;
};

Json to_json(const StructuredControllerParams& p);
StructuredControllerParams structured_params_from_json(const Json& j);

}  // namespace mcd
