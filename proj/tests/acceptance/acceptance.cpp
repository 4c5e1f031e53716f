// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mcd/error.hpp"
#include "mcd/freqresp.hpp"
#include "mcd/hinf.hpp"
#include "mcd/linalg.hpp"
#include "mcd/observer.hpp"
#include "mcd/workflow.hpp"
#include "support.hpp"

using namespace mcd;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Designs shared by several criteria, computed once.
struct Runs {
    std::unique_ptr<DesignContext> two_mass;
    std::unique_ptr<DesignContext> mmpa;
    std::unique_ptr<ComparisonRun> six;
    std::unique_ptr<ComparisonRun> four;
    std::unique_ptr<ComparisonRun> mmpa_six;
    double six_seconds = 0.0;

    const DesignContext& tm() {
        if (!two_mass) {
            two_mass = std::make_unique<DesignContext>(prepare(default_config("two_mass")));
        }
        return *two_mass;
    }
    const DesignContext& mm() {
        if (!mmpa) {
            // the full default budget takes several minutes on this plant; the certificate
            // criterion only needs a synthesized design, so a shorter search is used
            RunConfig cfg = default_config("mmpa_lite");
            cfg.optimizer.budget = 30;
            cfg.optimizer.starts = 1;
            mmpa = std::make_unique<DesignContext>(prepare(cfg));
        }
        return *mmpa;
    }
    const ComparisonRun& run6() {
        if (!six) {
            const auto t0 = std::chrono::steady_clock::now();
            six = std::make_unique<ComparisonRun>(run_comparison(tm(), BlockPattern::kSix));
            six_seconds = seconds_since(t0);
        }
        return *six;
    }
    const ComparisonRun& run4() {
        if (!four) {
            four = std::make_unique<ComparisonRun>(run_comparison(tm(), BlockPattern::kFour));
        }
        return *four;
    }
    const ComparisonRun& run_mmpa() {
        if (!mmpa_six) {
            mmpa_six = std::make_unique<ComparisonRun>(run_comparison(mm(), BlockPattern::kSix));
        }
        return *mmpa_six;
    }
};

Runs runs;

// 1. mass-normalized mode shapes diagonalize random M, K
Outcome modal_algebra() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> size(1, 10);
    double worst_m = 0.0;
    double worst_k = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = size(rng);
        const Matrix a = test::random_matrix(n, n, rng);
        const Matrix m = a * a.transpose() + static_cast<double>(n) * Matrix::Identity(n, n);
        // K of deficient rank for some trials (rigid-body modes)
        const Index rank = std::max<Index>(0, n - trial % 3);
        const Matrix b = test::random_matrix(n, rank, rng);
        const Matrix k = 100.0 * b * b.transpose();
        MechanicalModel model;
        model.M = m;
        model.K = 0.5 * (k + k.transpose());
        model.D = 1e-3 * model.K;
        model.domain = Domain{{{0.0, 1.0}}};
        model.phi_a = PositionMap::constant(Matrix::Identity(n, n), model.domain);
        model.phi_s = PositionMap::constant(Matrix::Ones(1, n), model.domain);
        const ModalDecomposition dec = modal_decompose(model);
        const Matrix& v = dec.Vt;
        const Matrix w2 = dec.omega.array().square().matrix().asDiagonal();
        worst_m = std::max(worst_m, (v.transpose() * model.M * v - Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
        const double kscale = std::max(1.0, model.K.cwiseAbs().maxCoeff());
        worst_k = std::max(worst_k, (v.transpose() * model.K * v - w2).cwiseAbs().maxCoeff() / kscale);
    }
    const double t = seconds_since(t0);
    return {worst_m <= 1e-10 && worst_k <= 1e-8 && t < 10.0,
            "max |V'MV - I| " + fmt(worst_m) + ", max |V'KV - W^2|/max(1,|K|) " + fmt(worst_k) + ", " + fmt(t) + " s"};
}

// 2. decoupling identities at the design point
Outcome decoupling_exactness() {
    double worst = 0.0;
    for (const DesignContext* ctx : {&runs.tm(), &runs.mm()}) {
        const PartitionedModalModel& pm = ctx->pm;
        const DecouplingPair& pair = ctx->pair;
        const SchedulingPoint& p = ctx->cfg.p_star;
        const Matrix b_rb = velocity_rows(pm.B_rb.evaluate(p));
        const Matrix b_fm = velocity_rows(pm.B_fm_r.evaluate(p));
        Matrix stacked(pm.n_rb + pair.n_flex, pm.inputs());
        stacked << b_rb, b_fm.topRows(pair.n_flex);
        const Index nd = stacked.rows();
        worst = std::max(worst, (stacked * pair.T_u - Matrix::Identity(nd, nd)).cwiseAbs().maxCoeff());
        const Matrix c_rb = position_cols(pm.C_rb.evaluate(p));
        worst = std::max(worst, (pair.T_y * c_rb - Matrix::Identity(pm.n_rb, pm.n_rb)).cwiseAbs().maxCoeff());
        worst = std::max(worst, (b_fm.topRows(pair.n_flex) * pair.T_u.leftCols(pm.n_rb)).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-10, "largest deviation over both benchmarks " + fmt(worst)};
}

/// DC gain of the flexible part (states after the rigid-body ones) of a grouped model.
Matrix flexible_dc(const StateSpace& g, Index rigid_states) {
    const Index n = g.states() - rigid_states;
    if (n == 0) {
        return g.D;
    }
    const Matrix a = g.A.bottomRightCorner(n, n);
    return g.D - g.C.rightCols(n) * a.partialPivLu().solve(g.B.bottomRows(n));
}

// 3. truncated model keeps the static flexible contribution
Outcome compliance_correction_dc() {
    double worst = 0.0;
    std::size_t points = 0;
    // two-mass with its flexible mode discarded, mmpa-lite with the umbrella mode discarded
    const MechanicalModel tm = make_two_mass();
    const ModalDecomposition tm_dec = modal_decompose(tm);
    const PartitionedModalModel tm_pm = group_and_partition(tm_dec, tm, 1, {});
    const BenchmarkSpec mm = mmpa_lite_spec();
    const ModalDecomposition mm_dec = modal_decompose(mm.model);
    const PartitionedModalModel mm_pm = group_and_partition(mm_dec, mm.model, mm.n_rb, mm.retain);
    for (const PartitionedModalModel* pm : {&tm_pm, &mm_pm}) {
        const std::size_t per_axis = pm->domain.dims() == 1 ? 11 : 5;
        for (const auto& p : pm->domain.grid(per_axis)) {
            const Index nr = 2 * pm->n_rb;
            const Matrix truncated = flexible_dc(truncate_with_compliance(*pm, p).model, nr);
            const Matrix full = flexible_dc(evaluate_local(*pm, p), nr);
            worst = std::max(worst, (truncated - full).cwiseAbs().maxCoeff() / std::max(1e-300, full.cwiseAbs().maxCoeff()));
            ++points;
        }
    }
    return {worst <= 1e-10, "relative DC mismatch " + fmt(worst) + " over " + std::to_string(points) + " grid points"};
}

// 4. H-infinity norm against the dense-grid oracle
Outcome hinf_accuracy() {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> n_states(1, 8);
    std::uniform_int_distribution<int> n_io(1, 3);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const StateSpace g = test::random_stable(n_states(rng), n_io(rng), n_io(rng), rng);
        const double h = hinf_norm(g).gamma;
        const double grid = hinf_norm_grid(g, 100000);
        worst = std::max(worst, std::abs(h - grid) / grid);
    }
    Matrix a(2, 2);
    a << 0.0, 1.0, -1.0, -0.2;
    Matrix b(2, 1);
    b << 0.0, 1.0;
    Matrix c(1, 2);
    c << 1.0, 0.0;
    const double resonance = hinf_norm(StateSpace(a, b, c, Matrix::Zero(1, 1))).gamma;
    const double res_err = std::abs(resonance - 5.0252) / 5.0252;
    return {worst <= 0.005 && res_err <= 0.001,
            "worst relative gap to grid " + fmt(worst) + "; resonance " + fmt(resonance) + " (error " + fmt(res_err) + ")"};
}

// 5. Riccati initialization of both observer kinds on both benchmarks
Outcome riccati_initialization() {
    double worst_res = 0.0;
    double worst_abscissa = -std::numeric_limits<double>::infinity();
    for (const DesignContext* ctx : {&runs.tm(), &runs.mm()}) {
        for (BlockPattern pattern : {BlockPattern::kSix, BlockPattern::kFour}) {
            const SynthesisProblem pr = make_problem(*ctx, pattern);
            const CareSolution sol = observer_riccati(*ctx, pr);
            const ObserverDesignModel dm = pattern == BlockPattern::kSix
                                               ? output_observer_design_model(pr.truncated)
                                               : error_observer_design_model(pr.model, pr.p_star);
            const Matrix cs = pr.scalings.Wz_sc * dm.C;
            const Index n = dm.A.rows();
            const double res = care_residual(dm.A, cs, ctx->cfg.observer_q * Matrix::Identity(n, n),
                                             ctx->cfg.observer_v * Matrix::Identity(cs.rows(), cs.rows()), sol.P);
            worst_res = std::max(worst_res, res);
            worst_abscissa = std::max(worst_abscissa, spectral_abscissa(dm.A - sol.L * dm.C));
        }
    }
    return {worst_res <= 1e-8 && worst_abscissa < 0.0,
            "worst residual " + fmt(worst_res) + ", slowest observer error pole real part " + fmt(worst_abscissa)};
}

// 6. six-block co-design damps the flexible channel
Outcome six_block_codesign() {
    const ComparisonRun& r = runs.run6();
    const double db = r.flex_reduction_db();
    const double g = r.proposed.result.gamma;
    const double g0 = r.proposed.result.gamma_init;
    return {db >= 6.0 && g < g0 && runs.six_seconds < 300.0,
            "flexible-channel peak " + fmt(r.conventional.metrics.flex_peak) + " -> " + fmt(r.proposed.metrics.flex_peak) +
                " (" + fmt(db) + " dB); gamma " + fmt(g0) + " -> " + fmt(g) + "; run " + fmt(runs.six_seconds) + " s"};
}

// 7. rigid-body bandwidth preserved
Outcome bandwidth_preservation() {
    const ComparisonRun& r = runs.run6();
    const double fc = r.conventional.metrics.crossover_hz.at(0);
    const double fp = r.proposed.metrics.crossover_hz.at(0);
    const double rel = (fp - fc) / fc;
    return {std::isfinite(rel) && std::abs(rel) <= 0.15,
            "crossover " + fmt(fc) + " Hz -> " + fmt(fp) + " Hz (" + fmt(100.0 * rel) + " %)"};
}

// 8. four-block co-design and its performance trade-off
Outcome four_block_codesign() {
    const ComparisonRun& r4 = runs.run4();
    const ComparisonRun& r6 = runs.run6();
    const double db = r4.flex_reduction_db();
    const double s4 = r4.proposed.metrics.s_peak;
    const double s6 = r6.proposed.metrics.s_peak;
    return {db >= 3.0 && s4 >= s6,
            "flexible-channel reduction " + fmt(db) + " dB; sensitivity peak four-block " + fmt(s4) + " vs six-block " +
                fmt(s6) + "; crossover four-block " + fmt(r4.proposed.metrics.crossover_hz.at(0)) + " Hz vs conventional " +
                fmt(r4.conventional.metrics.crossover_hz.at(0)) + " Hz"};
}

// 9. frozen-grid certificate and its sign-flip counterexample
Outcome grid_certificate() {
    bool ok = true;
    std::string detail;
    const std::vector<std::pair<std::string, const ComparisonRun*>> cases{
        {"two-mass six-block", &runs.run6()}, {"two-mass four-block", &runs.run4()}, {"mmpa-lite six-block", &runs.run_mmpa()}};
    for (const auto& [name, run] : cases) {
        const SynthesisProblem& pr = run->problem;
        const std::size_t expected = pr.grid.front().size() == 1 ? 11 : 25;
        std::size_t stable = 0;
        for (const DesignOutcome* d : {&run->conventional, &run->proposed}) {
            const GridCertificate c = grid_stability_check(pr, bind_controller(pr, d->params, d->flex_loop));
            ok = ok && c.points.size() == expected && c.all_stable();
            stable += static_cast<std::size_t>(std::count(c.hurwitz.begin(), c.hurwitz.end(), true));
        }
        ControllerBinding flipped = bind_controller(pr, run->proposed.params, true);
        const Matrix minus = -Matrix::Identity(pr.n_rb(), pr.n_rb());
        flipped.k_rb = scale(minus, flipped.k_rb, Matrix::Identity(pr.n_rb(), pr.n_rb()));
        const GridCertificate fc = grid_stability_check(pr, flipped);
        const auto failing = std::count(fc.hurwitz.begin(), fc.hurwitz.end(), false);
        ok = ok && failing >= 1;
        detail += name + ": " + std::to_string(stable) + "/" + std::to_string(2 * expected) + " stable, sign flip fails at " +
                  std::to_string(failing) + "; ";
    }
    return {ok, detail};
}

// 10. the norm bound implies the sensitivity bound
Outcome weighted_bound() {
    double worst = 0.0;
    std::string gammas;
    for (const DesignOutcome* d : {&runs.run6().conventional, &runs.run6().proposed}) {
        const SynthesisProblem& pr = runs.run6().problem;
        const ControllerBinding b = bind_controller(pr, d->params, d->flex_loop);
        const double gamma = hinf_norm(balanced(weighted_map(pr.plant, pr, b).M)).gamma;
        gammas += fmt(gamma) + " ";
        const StateSpace s = sensitivity(pr.plant, pr, b);
        const double lo = pr.weights.params.f_bw.front() / 100.0;
        for (double f : logspace(lo, 1000.0, 200)) {
            const Complex jw(0.0, kTwoPi * f);
            const CMatrix sv = evaluate_dense(s, jw);
            for (Index i = 0; i < pr.n_rb(); ++i) {
                const auto ch = static_cast<std::size_t>(i);
                const double inv_weight = 1.0 / std::abs(pr.weights.Wz1.eval(ch, jw) * pr.weights.Ww1.eval(ch, jw));
                worst = std::max(worst, std::abs(sv(i, i)) / (gamma * inv_weight));
            }
        }
    }
    return {worst <= 1.0 + 1e-6,
            "gamma (conventional, proposed) " + gammas + "; worst |S| / (gamma |(W_z1 W_w1)^-1|) " + fmt(worst)};
}

// 11. time-domain comparison under a band disturbance at the flexible mode
Outcome time_domain() {
    const ComparisonRun& r = runs.run6();
    const SimulationComparison sim = simulate_comparison(runs.tm(), r, runs.tm().cfg.simulation);
    const double ratio = sim.rms_on / sim.rms_off;
    std::string sweep;
    if (sim.sweep_bounded) {
        sweep = std::string("; scheduled sweep ") + (*sim.sweep_bounded ? "bounded" : "unbounded");
    }
    return {ratio <= 0.7, "RMS on " + fmt(sim.rms_on) + ", off " + fmt(sim.rms_off) + ", ratio " + fmt(ratio) + sweep};
}

// 12. error-based observer is smaller by the rigid-body states
Outcome observer_dimension() {
    bool ok = true;
    std::string detail;
    for (const DesignContext* ctx : {&runs.tm(), &runs.mm()}) {
        const SynthesisProblem six = make_problem(*ctx, BlockPattern::kSix);
        const SynthesisProblem four = make_problem(*ctx, BlockPattern::kFour);
        const Index out_dim = bind_controller(six, initial_params(*ctx, six), true).observer.realization.states();
        const Index err_dim = bind_controller(four, initial_params(*ctx, four), true).observer.realization.states();
        ok = ok && err_dim == out_dim - 2 * ctx->pm.n_rb;
        detail += ctx->cfg.model + ": " + std::to_string(err_dim) + " = " + std::to_string(out_dim) + " - 2*" +
                  std::to_string(ctx->pm.n_rb) + "; ";
    }
    return {ok, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"modal algebra", modal_algebra},
        {"decoupling exactness", decoupling_exactness},
        {"compliance correction", compliance_correction_dc},
        {"H-infinity norm", hinf_accuracy},
        {"Riccati initialization", riccati_initialization},
        {"six-block co-design", six_block_codesign},
        {"bandwidth preservation", bandwidth_preservation},
        {"four-block co-design and trade-off", four_block_codesign},
        {"grid certificate", grid_certificate},
        {"weighted-bound semantics", weighted_bound},
        {"time-domain active damping", time_domain},
        {"observer dimension", observer_dimension},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": "
                  << o.detail << std::endl;
    }
    std::cout << criteria.size() - static_cast<std::size_t>(failed) << "/" << criteria.size() << " criteria passed"
              << std::endl;
    return failed == 0 ? 0 : 1;
}
