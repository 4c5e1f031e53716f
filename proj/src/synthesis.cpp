#include "mcd/synthesis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mcd/error.hpp"
#include "mcd/hinf.hpp"
#include "mcd/linalg.hpp"

namespace mcd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> all_blocks(const SynthesisProblem& problem) {
    return problem.pattern == BlockPattern::kSix ? std::vector<int>{0, 1, 2} : std::vector<int>{0, 1};
}

}  // namespace

double worst_abscissa(const SynthesisProblem& problem, const StructuredControllerParams& params, bool flex_loop) {
    const ControllerBinding b = bind_controller(problem, params, flex_loop);
    double worst = spectral_abscissa(closed_loop(problem.plant, problem, b, {"r"}, {"e"}).A);
    for (const auto& g : problem.grid_plants) {
        worst = std::max(worst, spectral_abscissa(closed_loop(g, problem, b, {"r"}, {"e"}).A));
    }
    return worst;
}

double synthesis_objective(const SynthesisProblem& problem, const StructuredControllerParams& params,
                           const SynthesisOptions& opts, double hinf_tol) {
    if (worst_abscissa(problem, params, opts.flex_loop) >= 0.0) {
        return kInf;
    }
    const ControllerBinding b = bind_controller(problem, params, opts.flex_loop);
    const ClosedLoopMap map = weighted_map(problem.plant, problem, b);
    const std::vector<int> blocks = opts.objective_blocks.empty() ? all_blocks(problem) : opts.objective_blocks;
    return hinf_norm(balanced(map.columns(blocks)), hinf_tol).gamma;
}

SynthesisResult synthesize(const SynthesisProblem& problem, const StructuredControllerParams& init,
                           const SynthesisOptions& opts) {
    SynthesisResult res;
    res.init = init;
    const ParameterMap pmap(init, opts.tune_rb, opts.flex_loop, opts.xi_scale);
    Vector theta0 = pmap.encode(init);

    res.init_abscissa = worst_abscissa(problem, init, opts.flex_loop);
    if (res.init_abscissa >= 0.0) {
        res.stabilized = true;
        PatternSearchOptions so = opts.search;
        so.budget = opts.stabilize_budget;
        so.starts = 1;
        const Objective abscissa = [&](const Vector& th) {
            const double a = worst_abscissa(problem, pmap.decode(th), opts.flex_loop);
            // stop improving once comfortably stable so the main phase starts from a sane point
            return std::max(a, -1e-3);
        };
        const PatternSearchResult r = pattern_search(abscissa, theta0, so);
        res.evaluations += r.evaluations;
        if (r.value >= 0.0) {
            std::ostringstream os;
            os << "synthesize: no stabilizing controller found; best closed-loop spectral abscissa " << r.value;
            fail(ErrorKind::kNumeric, os.str());
        }
        theta0 = r.x;
        res.init = pmap.decode(theta0);
    }

    const Objective objective = [&](const Vector& th) {
        return synthesis_objective(problem, pmap.decode(th), opts, opts.hinf_tol);
    };
    const PatternSearchResult r = pattern_search(objective, theta0, opts.search);
    res.evaluations += r.evaluations;
    res.log = r.log;
    res.params = pmap.decode(r.x);
    res.gamma = synthesis_objective(problem, res.params, opts, opts.final_hinf_tol);
    res.gamma_init = synthesis_objective(problem, res.init, opts, opts.final_hinf_tol);
    if (res.gamma > res.gamma_init) {
        // the search tolerance can mis-rank nearly equal points; never report a worse design
        res.params = res.init;
        res.gamma = res.gamma_init;
    }
    res.certificate = grid_stability_check(problem, bind_controller(problem, res.params, opts.flex_loop));
    return res;
}

}  // namespace mcd
