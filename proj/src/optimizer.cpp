#include "mcd/optimizer.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "mcd/error.hpp"

namespace mcd {

namespace {

struct LocalRun {
    Vector x;
    double value;
    std::vector<double> accepted;
    int evaluations = 0;
    int polls = 0;
};

LocalRun compass(const Objective& f, Vector x, double fx, const PatternSearchOptions& opts, int eval_cap) {
    LocalRun run{x, fx, {}, 0, 0};
    const Index n = x.size();
    double step = opts.initial_step;
    std::vector<double> values(static_cast<std::size_t>(2 * n));
    while (run.polls < opts.budget && step >= opts.min_step && n > 0) {
        if (eval_cap > 0 && run.evaluations + 2 * n > eval_cap) {
            break;
        }
        ++run.polls;
#pragma omp parallel for schedule(dynamic)
        for (Index k = 0; k < 2 * n; ++k) {
            Vector cand = run.x;
            cand(k / 2) += (k % 2 == 0 ? step : -step);
            double v;
            try {
                v = f(cand);
            } catch (const std::exception&) {
                v = std::numeric_limits<double>::infinity();
            }
            values[static_cast<std::size_t>(k)] = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
        }
        run.evaluations += static_cast<int>(2 * n);
        Index best = -1;
        double best_v = run.value;
        for (Index k = 0; k < 2 * n; ++k) {
            if (values[static_cast<std::size_t>(k)] < best_v) {
                best_v = values[static_cast<std::size_t>(k)];
                best = k;
            }
        }
        if (best >= 0 && best_v < run.value - 1e-12 * std::abs(run.value)) {
            run.x(best / 2) += (best % 2 == 0 ? step : -step);
            run.value = best_v;
            run.accepted.push_back(best_v);
        } else {
            step *= 0.5;
        }
    }
    return run;
}

double safe_eval(const Objective& f, const Vector& x) {
    try {
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

PatternSearchResult pattern_search(const Objective& f, const Vector& x0, const PatternSearchOptions& opts) {
    require(opts.budget >= 0 && opts.starts >= 1, ErrorKind::kDomain, "pattern_search: bad budget or start count");
    require(opts.initial_step > 0.0 && opts.min_step > 0.0, ErrorKind::kDomain, "pattern_search: steps must be positive");
    PatternSearchResult res;
    res.x = x0;
    res.value = safe_eval(f, x0);
    res.initial_value = res.value;
    res.evaluations = 1;
    res.log.push_back(res.value);
    if (opts.budget == 0) {
        return res;
    }
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal(0.0, opts.perturbation);
    for (int s = 0; s < opts.starts; ++s) {
        Vector start = x0;
        double fs = res.initial_value;
        if (s > 0) {
            for (Index i = 0; i < start.size(); ++i) {
                start(i) += normal(rng);
            }
            fs = safe_eval(f, start);
            ++res.evaluations;
            if (!std::isfinite(fs)) {
                continue;
            }
        }
        const int cap = opts.max_evaluations > 0 ? opts.max_evaluations - res.evaluations : 0;
        if (opts.max_evaluations > 0 && cap <= 0) {
            break;
        }
        const LocalRun run = compass(f, start, fs, opts, cap);
        res.evaluations += run.evaluations;
        res.polls += run.polls;
        for (double v : run.accepted) {
            if (v < res.log.back()) {
                res.log.push_back(v);
            }
        }
        if (run.value < res.value) {
            res.value = run.value;
            res.x = run.x;
            res.best_start = s;
            if (res.log.back() > run.value) {
                res.log.push_back(run.value);
            }
        }
    }
    return res;
}

}  // namespace mcd
