#include "mcd/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcd/error.hpp"
#include "mcd/freqresp.hpp"
#include "mcd/linalg.hpp"

namespace mcd {

namespace {

struct Shape {
    double k = 0.0;
    double w = 1.0;
    double zeta = 1.0;

    double mag(double omega) const {
        const Complex s(0.0, omega);
        return k / std::abs(s * s / (w * w) + 2.0 * zeta * s / w + 1.0);
    }
};

std::vector<double> deviation_on(const std::vector<StateSpace>& grid, Index nominal, const std::vector<double>& hz) {
    const FrequencyEvaluator nom(grid[static_cast<std::size_t>(nominal)]);
    std::vector<FrequencyEvaluator> evals;
    for (const auto& g : grid) {
        evals.emplace_back(g);
    }
    std::vector<double> dev(hz.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < hz.size(); ++k) {
        const Complex s(0.0, kTwoPi * hz[k]);
        const CMatrix g0 = nom(s);
        double worst = 0.0;
        for (const auto& e : evals) {
            worst = std::max(worst, max_singular_value(CMatrix(e(s) - g0)));
        }
        dev[k] = worst;
    }
    return dev;
}

}  // namespace

std::pair<double, double> pole_band_hz(const StateSpace& g, double margin) {
    const CVector p = poles(g);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Index i = 0; i < p.size(); ++i) {
        const double m = std::abs(p(i));
        if (m > 1e-9) {
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
    }
    if (hi == 0.0) {
        return {0.01, 100.0};
    }
    return {lo / kTwoPi / margin, hi / kTwoPi * margin};
}

UncertainPlant build_uncertain_plant(const std::vector<StateSpace>& grid, const std::vector<SchedulingPoint>& points,
                                     Index nominal_index, std::size_t verify_points) {
    require(grid.size() >= 2 && grid.size() == points.size(), ErrorKind::kDomain,
            "build_uncertain_plant: need at least two grid points with matching coordinates");
    require(nominal_index >= 0 && nominal_index < static_cast<Index>(grid.size()), ErrorKind::kDomain,
            "build_uncertain_plant: nominal index out of range");
    for (const auto& g : grid) {
        require(g.inputs() == grid[0].inputs() && g.outputs() == grid[0].outputs(), ErrorKind::kDimension,
                "build_uncertain_plant: grid models differ in dimension");
    }
    UncertainPlant up;
    up.grid = grid;
    up.points = points;
    up.nominal_index = nominal_index;
    up.nominal = grid[static_cast<std::size_t>(nominal_index)];
    up.delta_in = up.nominal.inputs();
    up.delta_out = up.nominal.outputs();

    auto [lo, hi] = pole_band_hz(up.nominal, 20.0);
    up.verify_hz = logspace(lo, hi, verify_points);
    up.deviation = deviation_on(grid, nominal_index, up.verify_hz);

    // dense fitting grid plus the lightly damped pole frequencies of every grid model
    std::vector<double> fit_hz = logspace(lo, hi, 4000);
    for (const auto& g : grid) {
        const CVector p = poles(g);
        for (Index i = 0; i < p.size(); ++i) {
            const double f = std::abs(p(i).imag()) / kTwoPi;
            if (f > lo && f < hi) {
                fit_hz.push_back(f);
            }
        }
    }
    fit_hz.insert(fit_hz.end(), up.verify_hz.begin(), up.verify_hz.end());
    std::sort(fit_hz.begin(), fit_hz.end());
    const std::vector<double> fit_dev = deviation_on(grid, nominal_index, fit_hz);
    const double dev_max = *std::max_element(fit_dev.begin(), fit_dev.end());

    Shape best;
    if (dev_max > 1e-14 * std::max(1.0, max_singular_value(up.nominal.D))) {
        double best_cost = std::numeric_limits<double>::infinity();
        const std::vector<double> w_cand = logspace(kTwoPi * lo, kTwoPi * hi, 120);
        const std::vector<double> z_cand = logspace(1e-3, 1.0, 31);
        for (double w : w_cand) {
            for (double z : z_cand) {
                Shape s{1.0, w, z};
                double k = 0.0;
                for (std::size_t i = 0; i < fit_hz.size(); ++i) {
                    k = std::max(k, fit_dev[i] / s.mag(kTwoPi * fit_hz[i]));
                }
                s.k = k * (1.0 + 1e-6);
                double cost = 0.0;
                for (double f : up.verify_hz) {
                    cost += std::log(s.mag(kTwoPi * f));
                }
                if (cost < best_cost) {
                    best_cost = cost;
                    best = s;
                }
            }
        }
    }
    std::vector<std::vector<RationalSection>> ch;
    for (Index i = 0; i < up.delta_out; ++i) {
        RationalSection sec;
        if (best.k > 0.0) {
            sec.num = {0.0, 0.0, best.k};
            sec.den = {1.0 / (best.w * best.w), 2.0 * best.zeta / best.w, 1.0};
        } else {
            sec.num = {0.0, 0.0, 0.0};
        }
        ch.push_back({sec});
    }
    up.weight = RationalDiagonalFilter(std::move(ch));

    double worst = 0.0;
    std::size_t worst_k = 0;
    for (std::size_t k = 0; k < up.verify_hz.size(); ++k) {
        const double wmag = std::abs(up.weight.eval(0, Complex(0.0, kTwoPi * up.verify_hz[k])));
        const double ratio = wmag > 0.0 ? up.deviation[k] / wmag : (up.deviation[k] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        if (ratio > worst) {
            worst = ratio;
            worst_k = k;
        }
    }
    up.worst_ratio = worst;
    if (worst > 1.0) {
        std::ostringstream os;
        os << "build_uncertain_plant: weight fails to dominate the deviation at " << up.verify_hz[worst_k]
           << " Hz (ratio " << worst << ")";
        fail(ErrorKind::kNumeric, os.str());
    }
    return up;
}

Json UncertainPlant::to_json() const {
    const auto& sec = weight.sections(0).front();
    Json j;
    j["nominal_index"] = nominal_index;
    j["nominal_p"] = points[static_cast<std::size_t>(nominal_index)];
    j["delta_in"] = delta_in;
    j["delta_out"] = delta_out;
    j["weight"] = {{"num", sec.num}, {"den", sec.den}};
    j["worst_ratio"] = worst_ratio;
    j["max_deviation"] = deviation.empty() ? 0.0 : *std::max_element(deviation.begin(), deviation.end());
    return j;
}

}  // namespace mcd
