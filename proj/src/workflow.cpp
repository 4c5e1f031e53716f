#include "mcd/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "mcd/error.hpp"
#include "mcd/freqresp.hpp"
#include "mcd/hinf.hpp"
#include "mcd/linalg.hpp"
#include "mcd/riccati.hpp"

namespace mcd {

namespace {

/// Object view that rejects keys it was not asked about.
class ConfigReader {
public:
    ConfigReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        require(j.is_object(), ErrorKind::kConfig, "config: " + where() + " must be an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }
    const Json& at(const std::string& key) const { return j_.at(key); }
    std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    template <typename T>
    void get(const std::string& key, T& out) {
        if (!has(key)) {
            return;
        }
        try {
            out = j_.at(key).get<T>();
        } catch (const Json::exception&) {
            fail(ErrorKind::kConfig, "config: bad value at " + path(key));
        }
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.contains(item.key())) {
                fail(ErrorKind::kConfig, "config: unknown key " + path(item.key()));
            }
        }
    }

private:
    std::string where() const { return path_.empty() ? "top level" : path_; }

    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename T>
void positive(T value, const std::string& what) {
    require(value > T(0), ErrorKind::kConfig, "config: " + what + " must be positive");
}

std::vector<double> hz_of(const ModalDecomposition& dec, const std::vector<Index>& modes) {
    std::vector<double> out;
    for (Index m : modes) {
        out.push_back(dec.omega(m) / kTwoPi);
    }
    return out;
}

double max_pole_hz(const StateSpace& g) {
    const CVector p = poles(g);
    double m = 0.0;
    for (Index i = 0; i < p.size(); ++i) {
        m = std::max(m, std::abs(p(i)));
    }
    return m / kTwoPi;
}

}  // namespace

// ---------------------------------------------------------------------------------------
// configuration

Json RunConfig::to_json() const {
    Json j;
    j["model"] = model;
    j["p_star"] = p_star;
    j["grid"] = {{"points_per_axis", grid_per_axis}};
    j["retain"] = retain;
    j["controlled"] = controlled;
    j["n_flex"] = n_flex;
    j["force_diagonal"] = force_diagonal;
    j["scaling"] = {{"expected_error", vector_to_json(expected_error)}};
    Json f = mcd::to_json(filters);
    j["filters"] = f;
    j["observer"] = {{"Q_weight", observer_q}, {"V_weight", observer_v}};
    j["optimizer"] = {{"budget", optimizer.budget},
                      {"seed", optimizer.seed},
                      {"starts", optimizer.starts},
                      {"initial_step", optimizer.initial_step},
                      {"min_step", optimizer.min_step},
                      {"perturbation", optimizer.perturbation},
                      {"hinf_tol", optimizer.hinf_tol},
                      {"stabilize_budget", optimizer.stabilize_budget}};
    j["analysis"] = {{"points", analysis.points}, {"f_min", analysis.f_min}, {"f_max", analysis.f_max}};
    j["simulation"] = {{"duration", simulation.duration},
                       {"dt", simulation.dt},
                       {"settle", simulation.settle},
                       {"disturbance",
                        {{"center_hz", simulation.dist_center_hz},
                         {"bandwidth_hz", simulation.dist_bandwidth_hz},
                         {"amplitude", simulation.dist_amplitude}}},
                       {"reference", {{"amplitude", simulation.ref_amplitude}, {"move_time", simulation.ref_move_time}}},
                       {"sweep_segments", simulation.sweep_segments}};
    return j;
}

RunConfig default_config(const std::string& benchmark) {
    const BenchmarkSpec spec = benchmark_by_name(benchmark);
    RunConfig cfg;
    cfg.model = spec.name;
    cfg.p_star = spec.p_star;
    cfg.grid_per_axis = spec.grid_per_axis;
    cfg.retain = spec.retain;
    cfg.controlled = spec.controlled;
    cfg.n_flex = spec.n_flex;
    cfg.filters.f_bw = spec.f_bw;
    cfg.expected_error = Vector::Constant(spec.n_rb, 1e-6);
    for (double f : spec.flex_hz) {
        DampingShape s;
        s.f_hz = f;
        s.eps = 1e-4;
        cfg.filters.flex.push_back(s);
    }
    cfg.filters.flex.resize(cfg.controlled.size());
    cfg.simulation.sweep_segments = 40;
    return cfg;
}

RunConfig apply_config(const Json& j, RunConfig base) {
    ConfigReader top(j, "");
    if (top.has("model")) {
        std::string m;
        top.get("model", m);
        const auto names = benchmark_names();
        if (std::find(names.begin(), names.end(), m) != names.end()) {
            base = default_config(m);
        } else {
            base = RunConfig{};
            base.model = m;
        }
    }
    RunConfig cfg = std::move(base);
    top.get("p_star", cfg.p_star);
    if (top.has("grid")) {
        ConfigReader g(top.at("grid"), top.path("grid"));
        g.get("points_per_axis", cfg.grid_per_axis);
        g.finish();
    }
    top.get("retain", cfg.retain);
    top.get("controlled", cfg.controlled);
    top.get("n_flex", cfg.n_flex);
    top.get("force_diagonal", cfg.force_diagonal);
    if (top.has("scaling")) {
        ConfigReader s(top.at("scaling"), top.path("scaling"));
        if (s.has("expected_error")) {
            const Json& e = s.at("expected_error");
            if (e.is_number()) {
                const Index n = std::max<Index>(cfg.expected_error.size(), 1);
                cfg.expected_error = Vector::Constant(n, e.get<double>());
            } else {
                std::vector<double> v;
                s.get("expected_error", v);
                cfg.expected_error = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
            }
        }
        s.finish();
    }
    if (top.has("filters")) {
        ConfigReader f(top.at("filters"), top.path("filters"));
        ShapingParams& p = cfg.filters;
        f.get("K_s", p.K_s);
        f.get("K_r", p.K_r);
        f.get("alpha", p.alpha);
        f.get("f_bw", p.f_bw);
        f.get("f_I", p.f_I);
        f.get("f_r", p.f_r);
        f.get("integrator_leak", p.integrator_leak);
        if (f.has("flex")) {
            const Json& arr = f.at("flex");
            require(arr.is_array(), ErrorKind::kConfig, "config: " + f.path("flex") + " must be an array");
            std::vector<DampingShape> shapes;
            for (std::size_t i = 0; i < arr.size(); ++i) {
                DampingShape s = i < p.flex.size() ? p.flex[i] : DampingShape{};
                ConfigReader r(arr[i], f.path("flex") + "[" + std::to_string(i) + "]");
                r.get("f_hz", s.f_hz);
                r.get("beta1", s.beta1);
                r.get("beta2", s.beta2);
                r.get("eps", s.eps);
                r.get("Q", s.Q);
                r.finish();
                shapes.push_back(s);
            }
            p.flex = shapes;
        }
        f.finish();
    }
    if (top.has("observer")) {
        ConfigReader o(top.at("observer"), top.path("observer"));
        o.get("Q_weight", cfg.observer_q);
        o.get("V_weight", cfg.observer_v);
        o.finish();
    }
    if (top.has("optimizer")) {
        ConfigReader o(top.at("optimizer"), top.path("optimizer"));
        OptimizerSettings& s = cfg.optimizer;
        o.get("budget", s.budget);
        o.get("seed", s.seed);
        o.get("starts", s.starts);
        o.get("initial_step", s.initial_step);
        o.get("min_step", s.min_step);
        o.get("perturbation", s.perturbation);
        o.get("hinf_tol", s.hinf_tol);
        o.get("stabilize_budget", s.stabilize_budget);
        o.finish();
    }
    if (top.has("analysis")) {
        ConfigReader a(top.at("analysis"), top.path("analysis"));
        a.get("points", cfg.analysis.points);
        a.get("f_min", cfg.analysis.f_min);
        a.get("f_max", cfg.analysis.f_max);
        a.finish();
    }
    if (top.has("simulation")) {
        ConfigReader s(top.at("simulation"), top.path("simulation"));
        SimulationSettings& sim = cfg.simulation;
        s.get("duration", sim.duration);
        s.get("dt", sim.dt);
        s.get("settle", sim.settle);
        s.get("sweep_segments", sim.sweep_segments);
        if (s.has("disturbance")) {
            ConfigReader d(s.at("disturbance"), s.path("disturbance"));
            d.get("center_hz", sim.dist_center_hz);
            d.get("bandwidth_hz", sim.dist_bandwidth_hz);
            d.get("amplitude", sim.dist_amplitude);
            d.finish();
        }
        if (s.has("reference")) {
            ConfigReader r(s.at("reference"), s.path("reference"));
            r.get("amplitude", sim.ref_amplitude);
            r.get("move_time", sim.ref_move_time);
            r.finish();
        }
        s.finish();
    }
    top.finish();
    return cfg;
}

MechanicalModel load_model(const std::string& model) {
    const auto names = benchmark_names();
    if (std::find(names.begin(), names.end(), model) != names.end()) {
        return benchmark_by_name(model).model;
    }
    require(std::filesystem::exists(model), ErrorKind::kConfig,
            "model '" + model + "' is neither a benchmark name nor an existing file");
    return mechanical_model_from_json(read_json_file(model));
}

RunConfig complete_config(RunConfig cfg, const MechanicalModel& model, const ModalDecomposition& dec) {
    const Index n_rb = dec.n_rigid;
    require(n_rb > 0, ErrorKind::kConfig, "config: the model has no rigid-body modes");
    const Index n_modes = dec.modes();
    if (cfg.p_star.empty()) {
        cfg.p_star = model.domain.center();
    }
    require(cfg.p_star.size() == model.domain.dims(), ErrorKind::kConfig,
            "config: p_star has the wrong dimension for the model's scheduling domain");
    if (!model.domain.contains(cfg.p_star)) {
        fail(ErrorKind::kConfig, "config: p_star lies outside the scheduling domain");
    }
    if (cfg.grid_per_axis == 0) {
        cfg.grid_per_axis = model.domain.dims() == 1 ? 11 : 5;
    }
    if (cfg.retain.empty() && n_modes > n_rb) {
        cfg.retain = {n_rb};
    }
    if (cfg.controlled.empty()) {
        cfg.controlled = cfg.retain;
    }
    if (cfg.n_flex < 0) {
        cfg.n_flex = static_cast<Index>(cfg.controlled.size());
    }
    require(!cfg.controlled.empty(), ErrorKind::kConfig, "config: at least one controlled flexible mode is required");
    require(static_cast<Index>(cfg.controlled.size()) == cfg.n_flex, ErrorKind::kConfig,
            "config: n_flex must equal the number of controlled modes (one decoupled channel each)");
    for (std::size_t i = 0; i < cfg.controlled.size(); ++i) {
        // decoupled flexible channel i drives the i-th retained mode
        require(i < cfg.retain.size() && cfg.retain[i] == cfg.controlled[i], ErrorKind::kConfig,
                "config: controlled modes must be the leading retained modes, in order");
    }
    if (cfg.filters.f_bw.empty()) {
        const double f0 = dec.omega(cfg.controlled.front()) / kTwoPi;
        cfg.filters.f_bw.assign(static_cast<std::size_t>(n_rb), f0 / 5.0);
    }
    require(static_cast<Index>(cfg.filters.f_bw.size()) == n_rb, ErrorKind::kConfig,
            "config: filters.f_bw needs one entry per rigid-body channel");
    if (cfg.expected_error.size() == 0) {
        cfg.expected_error = Vector::Constant(n_rb, 1e-6);
    }
    if (cfg.expected_error.size() == 1 && n_rb > 1) {
        cfg.expected_error = Vector::Constant(n_rb, cfg.expected_error(0));
    }
    require(cfg.expected_error.size() == n_rb, ErrorKind::kConfig,
            "config: scaling.expected_error needs one entry per rigid-body channel");
    const std::vector<double> hz = hz_of(dec, cfg.controlled);
    if (cfg.filters.flex.size() < hz.size()) {
        cfg.filters.flex.resize(hz.size());
    }
    require(cfg.filters.flex.size() == hz.size(), ErrorKind::kConfig,
            "config: filters.flex needs one entry per controlled mode");
    for (std::size_t i = 0; i < hz.size(); ++i) {
        if (cfg.filters.flex[i].f_hz <= 0.0) {
            cfg.filters.flex[i].f_hz = hz[i];
        }
    }
    cfg.filters.validate();
    positive(cfg.observer_q, "observer.Q_weight");
    positive(cfg.observer_v, "observer.V_weight");
    require(cfg.optimizer.budget >= 0, ErrorKind::kConfig, "config: optimizer.budget must be non-negative");
    positive(cfg.optimizer.starts, "optimizer.starts");
    positive(cfg.optimizer.initial_step, "optimizer.initial_step");
    positive(cfg.optimizer.min_step, "optimizer.min_step");
    positive(cfg.optimizer.hinf_tol, "optimizer.hinf_tol");
    positive(cfg.analysis.points, "analysis.points");
    positive(cfg.simulation.duration, "simulation.duration");
    require(cfg.simulation.dt >= 0.0 && cfg.simulation.settle >= 0.0 && cfg.simulation.settle < cfg.simulation.duration,
            ErrorKind::kConfig, "config: simulation.dt/settle out of range");
    return cfg;
}

// ---------------------------------------------------------------------------------------
// design pipeline

DesignContext prepare(const RunConfig& cfg_in) {
    DesignContext ctx;
    ctx.model = load_model(cfg_in.model);
    ctx.model.validate();
    ctx.dec = modal_decompose(ctx.model, cfg_in.force_diagonal);
    ctx.cfg = complete_config(cfg_in, ctx.model, ctx.dec);
    const RunConfig& cfg = ctx.cfg;

    ctx.pm = group_and_partition(ctx.dec, ctx.model, ctx.dec.n_rigid, cfg.retain);
    ctx.pair = extended_input_decoupling(ctx.pm, cfg.p_star, cfg.n_flex);
    ctx.pm_dec = apply_decoupling(ctx.pm, ctx.pair);
    ctx.nominal = evaluate_local(ctx.pm_dec, cfg.p_star);
    ctx.grid = ctx.model.domain.grid(cfg.grid_per_axis);
    for (std::size_t k = 0; k < ctx.grid.size(); ++k) {
        ctx.grid_plants.push_back(evaluate_local(ctx.pm_dec, ctx.grid[k]));
        bool same = true;
        for (std::size_t d = 0; d < cfg.p_star.size(); ++d) {
            same = same && std::abs(ctx.grid[k][d] - cfg.p_star[d]) <= 1e-12;
        }
        if (same && ctx.nominal_index < 0) {
            ctx.nominal_index = static_cast<Index>(k);
        }
    }
    const Index nr = ctx.pm.n_rb;
    const std::vector<Index> rb = index_range(0, nr);
    ctx.scalings = compute_scalings(subsystem(ctx.nominal, rb, rb), cfg.filters.f_bw, cfg.expected_error, cfg.n_flex);
    return ctx;
}

SynthesisProblem make_problem(const DesignContext& ctx, BlockPattern pattern) {
    SynthesisProblem pr;
    pr.pattern = pattern;
    pr.plant = ctx.nominal;
    pr.p_star = ctx.cfg.p_star;
    pr.grid = ctx.grid;
    pr.grid_plants = ctx.grid_plants;
    pr.scalings = ctx.scalings;
    pr.weights = make_weights(ctx.cfg.filters, pattern);
    pr.truncated = truncate_with_compliance(ctx.pm_dec, ctx.cfg.p_star);
    pr.model = ctx.pm_dec;
    pr.Psi = selection_matrix(ctx.pm_dec, ctx.cfg.controlled, pr.observer_kind());
    for (Index m : ctx.cfg.controlled) {
        pr.flex_omega.push_back(ctx.dec.omega(m));
    }
    pr.Q = ctx.cfg.filters.flex.front().Q;
    return pr;
}

CareSolution observer_riccati(const DesignContext& ctx, const SynthesisProblem& problem) {
    const ObserverDesignModel dm = problem.observer_kind() == ObserverKind::kOutput
                                       ? output_observer_design_model(problem.truncated)
                                       : error_observer_design_model(problem.model, problem.p_star);
    // the measurement is weighted in the scaled error units the rest of the design uses
    const Matrix& wz = problem.scalings.Wz_sc;
    const Matrix cs = wz * dm.C;
    const Index n = dm.A.rows();
    const Index m = cs.rows();
    CareSolution sol = care_solve(dm.A, cs, ctx.cfg.observer_q * Matrix::Identity(n, n),
                                  ctx.cfg.observer_v * Matrix::Identity(m, m));
    sol.L = sol.L * wz;
    return sol;
}

StructuredControllerParams initial_params(const DesignContext& ctx, const SynthesisProblem& problem) {
    StructuredControllerParams p;
    const FrequencyEvaluator g(problem.plant);
    for (Index i = 0; i < problem.n_rb(); ++i) {
        const double f = ctx.cfg.filters.f_bw[static_cast<std::size_t>(i)];
        // scaled plant Wz G Ww1 is 0 dB at f_bw by construction of the scalings
        const CMatrix gi = g(Complex(0.0, kTwoPi * f));
        const double gain = std::abs(gi(i, i)) * problem.scalings.Wz_sc(i, i) * problem.scalings.Ww1_sc(i, i);
        p.k_rb.push_back(loop_shaping_init(f, gain));
    }
    p.L = observer_riccati(ctx, problem).L;
    p.xi.assign(problem.flex_omega.size(), 0.0);
    return p;
}

int flex_block(BlockPattern pattern) { return pattern == BlockPattern::kSix ? 2 : 1; }

std::vector<int> rigid_blocks(BlockPattern pattern) {
    return pattern == BlockPattern::kSix ? std::vector<int>{0, 1} : std::vector<int>{0};
}

SynthesisOptions synthesis_options(const RunConfig& cfg, const SynthesisProblem& problem, bool flex_loop) {
    SynthesisOptions o;
    o.search.budget = cfg.optimizer.budget;
    o.search.starts = cfg.optimizer.starts;
    o.search.seed = cfg.optimizer.seed;
    o.search.initial_step = cfg.optimizer.initial_step;
    o.search.min_step = cfg.optimizer.min_step;
    o.search.perturbation = cfg.optimizer.perturbation;
    o.hinf_tol = cfg.optimizer.hinf_tol;
    o.stabilize_budget = cfg.optimizer.stabilize_budget;
    o.flex_loop = flex_loop;
    o.tune_rb = true;
    if (!flex_loop) {
        o.objective_blocks = rigid_blocks(problem.pattern);
    }
    // one unit of the flexible-gain coordinate adds about one percent of modal damping
    const double w = *std::max_element(problem.flex_omega.begin(), problem.flex_omega.end());
    o.xi_scale = w > 0.0 ? 0.02 * w : 1.0;
    return o;
}

DesignMetrics evaluate_design(const SynthesisProblem& problem, const StructuredControllerParams& params, bool flex_loop,
                              const std::vector<int>& objective_blocks) {
    DesignMetrics m;
    const ControllerBinding b = bind_controller(problem, params, flex_loop);
    const ClosedLoopMap map = weighted_map(problem.plant, problem, b);
    m.gamma = hinf_norm(balanced(map.M), 1e-6).gamma;
    m.gamma_objective = hinf_norm(balanced(map.columns(objective_blocks)), 1e-6).gamma;
    m.flex_peak = hinf_norm(balanced(map.columns({flex_block(problem.pattern)})), 1e-6).gamma;

    const StateSpace s = sensitivity(problem.plant, problem, b);
    const StateSpace loop = rb_loop_gain(problem.plant, problem, b);
    const auto& f_bw = problem.weights.params.f_bw;
    for (Index i = 0; i < problem.n_rb(); ++i) {
        const std::vector<Index> ch{i};
        m.s_peak = std::max(m.s_peak, hinf_norm(balanced(subsystem(s, ch, ch)), 1e-6).gamma);
        const double f = f_bw[static_cast<std::size_t>(i)];
        m.crossover_hz.push_back(crossover_hz(loop, i, f / 100.0, f * 100.0));
    }

    if (problem.pattern == BlockPattern::kSix) {
        // |M11| = |W_z1 S W_w1| <= gamma on every channel and frequency
        const double lo = *std::min_element(f_bw.begin(), f_bw.end()) / 100.0;
        const double hi = std::max(1.0, max_pole_hz(problem.plant)) * 10.0;
        const std::vector<double> freqs = logspace(lo, hi, 200);
        const FrequencyEvaluator se(s);
        for (double f : freqs) {
            const Complex jw(0.0, kTwoPi * f);
            const CMatrix sv = se(jw);
            for (Index i = 0; i < problem.n_rb(); ++i) {
                const std::size_t ch = static_cast<std::size_t>(i);
                const double w = std::abs(problem.weights.Wz1.eval(ch, jw) * problem.weights.Ww1.eval(ch, jw));
                const double ratio = std::abs(sv(i, i)) * w / m.gamma_objective;
                m.bound_worst_ratio = std::max(m.bound_worst_ratio, ratio);
            }
        }
        m.bound_holds = m.bound_worst_ratio <= 1.0 + 1e-6;
    }
    m.certificate = grid_stability_check(problem, b);
    return m;
}

Json DesignMetrics::to_json() const {
    Json j;
    j["gamma"] = gamma;
    j["gamma_objective"] = gamma_objective;
    j["flex_channel_peak"] = flex_peak;
    j["flex_channel_peak_db"] = 20.0 * std::log10(flex_peak);
    j["sensitivity_peak"] = s_peak;
    j["sensitivity_peak_db"] = 20.0 * std::log10(s_peak);
    Json c = Json::array();
    for (double f : crossover_hz) {
        c.push_back(std::isfinite(f) ? Json(f) : Json(nullptr));
    }
    j["crossover_hz"] = c;
    j["weighted_bound"] = {{"holds", bound_holds}, {"worst_ratio", bound_worst_ratio}};
    j["grid_certificate"] = certificate.to_json();
    return j;
}

double ComparisonRun::flex_reduction_db() const {
    return 20.0 * std::log10(conventional.metrics.flex_peak / proposed.metrics.flex_peak);
}

namespace {

Json outcome_json(const DesignOutcome& d) {
    Json j;
    j["flex_loop"] = d.flex_loop;
    j["controller"] = to_json(d.params);
    j["initial_controller"] = to_json(d.result.init);
    j["gamma"] = d.result.gamma;
    j["gamma_init"] = d.result.gamma_init;
    j["iterate_log"] = d.result.log;
    j["evaluations"] = d.result.evaluations;
    j["stabilization_phase"] = d.result.stabilized;
    j["init_abscissa"] = d.result.init_abscissa;
    j["metrics"] = d.metrics.to_json();
    return j;
}

}  // namespace

Json ComparisonRun::to_json() const {
    Json j;
    j["pattern"] = problem.pattern == BlockPattern::kSix ? "six-block" : "four-block";
    j["observer"] = to_string(problem.observer_kind());
    j["p_star"] = problem.p_star;
    j["scalings"] = mcd::to_json(problem.scalings);
    j["weights"] = mcd::to_json(problem.weights.params);
    j["flex_omega"] = problem.flex_omega;
    j["conventional"] = outcome_json(conventional);
    j["proposed"] = outcome_json(proposed);
    j["flex_peak_reduction_db"] = flex_reduction_db();
    j["gamma_improved"] = proposed.result.gamma < proposed.result.gamma_init;

    // a destabilizing modification of the proposed design must be caught by the grid check
    ControllerBinding flipped = bind_controller(problem, proposed.params, true);
    flipped.k_rb = scale(-Matrix::Identity(flipped.k_rb.outputs(), flipped.k_rb.outputs()), flipped.k_rb,
                         Matrix::Identity(flipped.k_rb.inputs(), flipped.k_rb.inputs()));
    j["sign_flipped_certificate"] = grid_stability_check(problem, flipped).to_json();
    return j;
}

ComparisonRun run_comparison(const DesignContext& ctx, BlockPattern pattern) {
    ComparisonRun run;
    run.problem = make_problem(ctx, pattern);
    const SynthesisProblem& pr = run.problem;
    const StructuredControllerParams init = initial_params(ctx, pr);

    const SynthesisOptions conv_opts = synthesis_options(ctx.cfg, pr, false);
    run.conventional.flex_loop = false;
    run.conventional.result = synthesize(pr, init, conv_opts);
    run.conventional.params = run.conventional.result.params;
    run.conventional.metrics = evaluate_design(pr, run.conventional.params, false, conv_opts.objective_blocks);

    StructuredControllerParams start = init;
    start.k_rb = run.conventional.params.k_rb;
    const SynthesisOptions prop_opts = synthesis_options(ctx.cfg, pr, true);
    run.proposed.flex_loop = true;
    run.proposed.result = synthesize(pr, start, prop_opts);
    run.proposed.params = run.proposed.result.params;
    std::vector<int> all(pr.pattern == BlockPattern::kSix ? 3 : 2);
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = static_cast<int>(i);
    }
    run.proposed.metrics = evaluate_design(pr, run.proposed.params, true, all);
    return run;
}

ComparisonRun load_comparison(const DesignContext& ctx, const Json& results) {
    require(results.is_object() && results.contains("pattern") && results.contains("conventional") &&
                results.contains("proposed"),
            ErrorKind::kConfig, "results: not a synthesis results document");
    const std::string pat = results.at("pattern").get<std::string>();
    require(pat == "six-block" || pat == "four-block", ErrorKind::kConfig, "results: unknown pattern " + pat);
    ComparisonRun run;
    run.problem = make_problem(ctx, pat == "six-block" ? BlockPattern::kSix : BlockPattern::kFour);
    auto load = [&](const Json& j, bool flex_loop, const std::vector<int>& blocks) {
        DesignOutcome d;
        d.flex_loop = flex_loop;
        d.params = structured_params_from_json(j.at("controller"));
        d.result.params = d.params;
        d.result.init = structured_params_from_json(j.at("initial_controller"));
        d.result.gamma = j.at("gamma").get<double>();
        d.result.gamma_init = j.at("gamma_init").get<double>();
        d.result.log = j.at("iterate_log").get<std::vector<double>>();
        d.result.evaluations = j.at("evaluations").get<int>();
        d.result.stabilized = j.at("stabilization_phase").get<bool>();
        d.result.init_abscissa = j.at("init_abscissa").get<double>();
        d.metrics = evaluate_design(run.problem, d.params, flex_loop, blocks);
        d.result.certificate = d.metrics.certificate;
        return d;
    };
    try {
        std::vector<int> all(run.problem.pattern == BlockPattern::kSix ? 3 : 2);
        for (std::size_t i = 0; i < all.size(); ++i) {
            all[i] = static_cast<int>(i);
        }
        run.conventional = load(results.at("conventional"), false, rigid_blocks(run.problem.pattern));
        run.proposed = load(results.at("proposed"), true, all);
    } catch (const Json::exception& e) {
        fail(ErrorKind::kConfig, std::string("results: malformed design entry (") + e.what() + ")");
    }
    return run;
}

std::vector<double> analysis_grid(const DesignContext& ctx) {
    double lo = ctx.cfg.analysis.f_min;
    double hi = ctx.cfg.analysis.f_max;
    if (lo <= 0.0) {
        lo = *std::min_element(ctx.cfg.filters.f_bw.begin(), ctx.cfg.filters.f_bw.end()) / 100.0;
    }
    if (hi <= 0.0) {
        hi = 10.0 * std::max(1.0, max_pole_hz(ctx.nominal));
    }
    require(hi > lo, ErrorKind::kConfig, "config: analysis.f_max must exceed analysis.f_min");
    return logspace(lo, hi, ctx.cfg.analysis.points);
}

std::vector<std::string> write_frequency_exports(const ComparisonRun& run, const std::vector<double>& freqs_hz,
                                                 const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    auto put = [&](const std::string& name, const StateSpace& g) {
        std::ofstream os(std::filesystem::path(dir) / name);
        require(static_cast<bool>(os), ErrorKind::kConfig, "cannot write " + name + " in " + dir);
        write_csv(os, freq_response(g, freqs_hz));
        written.push_back(name);
    };
    const SynthesisProblem& pr = run.problem;
    for (const DesignOutcome* d : {&run.conventional, &run.proposed}) {
        const std::string tag = d->flex_loop ? "proposed" : "conventional";
        const ControllerBinding b = bind_controller(pr, d->params, d->flex_loop);
        put("weighted_map_" + tag + ".csv", weighted_map(pr.plant, pr, b).M);
        put("sensitivity_" + tag + ".csv", sensitivity(pr.plant, pr, b));
        put("loop_gain_" + tag + ".csv", rb_loop_gain(pr.plant, pr, b));
    }
    return written;
}

// ---------------------------------------------------------------------------------------
// time domain

namespace {

/// Second-order band-pass  (2 pi B) s / (s^2 + 2 pi B s + w0^2) on n channels (unit peak gain).
StateSpace band_pass(double center_hz, double bandwidth_hz, Index n) {
    const double w0 = kTwoPi * center_hz;
    const double bw = kTwoPi * bandwidth_hz;
    StateSpace one(Matrix(2, 2), Matrix(2, 1), Matrix(1, 2), Matrix::Zero(1, 1));
    one.A << 0.0, 1.0, -w0 * w0, -bw;
    one.B << 0.0, 1.0;
    one.C << 0.0, bw;
    std::vector<StateSpace> parts(static_cast<std::size_t>(n), one);
    return append(parts);
}

/// Cosine-profile point-to-point move: position, and acceleration for the feedforward.
void reference_profile(double t, double amplitude, double move_time, double& pos, double& acc) {
    if (t <= 0.0) {
        pos = 0.0;
        acc = 0.0;
    } else if (t >= move_time) {
        pos = amplitude;
        acc = 0.0;
    } else {
        const double w = M_PI / move_time;
        pos = 0.5 * amplitude * (1.0 - std::cos(w * t));
        acc = 0.5 * amplitude * w * w * std::cos(w * t);
    }
}

struct Excitation {
    Matrix u;  // [r; d_in1; noise] x samples
    double dt = 0.0;
    std::size_t settle_index = 0;
};

Excitation make_excitation(const DesignContext& ctx, const SynthesisProblem& pr, const SimulationSettings& sim,
                           double dt) {
    const Index nr = pr.n_rb();
    const Index nf = pr.n_flex();
    Excitation ex;
    ex.dt = dt;
    const auto n = static_cast<Index>(std::llround(sim.duration / dt)) + 1;
    ex.u = Matrix::Zero(nr + nr + nf, n);
    std::mt19937_64 rng(ctx.cfg.optimizer.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    // white noise of unit power per Hz through the unit-peak band-pass: amplitude scales RMS
    const double noise_scale = sim.dist_amplitude / std::sqrt(dt);
    const Matrix ww1_inv = pr.scalings.Ww1_sc.inverse();
    for (Index k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        double pos = 0.0;
        double acc = 0.0;
        reference_profile(t, sim.ref_amplitude, sim.ref_move_time, pos, acc);
        ex.u.block(0, k, nr, 1).setConstant(pos);
        // the decoupled rigid-body channels are unit-mass double integrators
        ex.u.block(nr, k, nr, 1) = ww1_inv * Vector::Constant(nr, acc);
        for (Index i = 0; i < nf; ++i) {
            ex.u(2 * nr + i, k) = noise_scale * normal(rng);
        }
    }
    ex.settle_index = static_cast<std::size_t>(std::llround(sim.settle / dt));
    return ex;
}

/// Loop from [r; d_in1; noise] to e with the disturbance filter in front of d_in2.
StateSpace excited_loop(const StateSpace& plant, const SynthesisProblem& pr, const ControllerBinding& b,
                        const StateSpace& filter) {
    const StateSpace loop = closed_loop(plant, pr, b, {"r", "d_in1", "d_in2"}, {"e"});
    const Index nr = pr.n_rb();
    const StateSpace pass = StateSpace::gain(Matrix::Identity(2 * nr, 2 * nr));
    const StateSpace parts[] = {pass, filter};
    return series(append(parts), loop);
}

double tail_rms(const Trajectory& tr, std::size_t from) {
    const Index start = static_cast<Index>(std::min<std::size_t>(from, static_cast<std::size_t>(tr.y.cols() - 1)));
    return rms(tr.y.rightCols(tr.y.cols() - start)).norm();
}

}  // namespace

void write_trajectories_csv(std::ostream& os, const SimulationComparison& sim) {
    const Index nr = sim.on.y.rows();
    os << "t_s";
    for (Index i = 0; i < nr; ++i) {
        os << ",e_on_" << i << "_m";
    }
    for (Index i = 0; i < nr; ++i) {
        os << ",e_off_" << i << "_m";
    }
    os << "\n";
    os.precision(12);
    for (Index k = 0; k < sim.on.t.size(); ++k) {
        os << sim.on.t(k);
        for (Index i = 0; i < nr; ++i) {
            os << "," << sim.on.y(i, k);
        }
        for (Index i = 0; i < nr; ++i) {
            os << "," << sim.off.y(i, k);
        }
        os << "\n";
    }
}

Json to_json(const SimulationComparison& sim) {
    Json j;
    j["rms_observer_on"] = sim.rms_on;
    j["rms_observer_off"] = sim.rms_off;
    j["rms_ratio"] = sim.rms_off > 0.0 ? Json(sim.rms_on / sim.rms_off) : Json(nullptr);
    if (sim.sweep_bounded) {
        j["scheduled_sweep"] = {{"bounded", *sim.sweep_bounded},
                                {"peak_error", sim.sweep_peak},
                                {"note", "piecewise-frozen sweep; an empirical check, not a proof of "
                                         "time-varying stability"}};
    }
    return j;
}

SimulationComparison simulate_comparison(const DesignContext& ctx, const ComparisonRun& run,
                                         const SimulationSettings& sim_in) {
    SimulationSettings sim = sim_in;
    const SynthesisProblem& pr = run.problem;
    if (sim.dist_center_hz <= 0.0) {
        sim.dist_center_hz = pr.flex_omega.front() / kTwoPi;
    }
    double dt = sim.dt;
    if (dt <= 0.0) {
        dt = 1.0 / (50.0 * std::max(sim.dist_center_hz, pr.flex_omega.back() / kTwoPi));
    }
    const StateSpace filter = band_pass(sim.dist_center_hz, sim.dist_bandwidth_hz, pr.n_flex());
    const Excitation ex = make_excitation(ctx, pr, sim, dt);

    const ControllerBinding on = bind_controller(pr, run.proposed.params, true);
    const ControllerBinding off = bind_controller(pr, run.conventional.params, false);

    SimulationComparison out;
    out.on = simulate(excited_loop(pr.plant, pr, on, filter), ex.u, dt);
    out.off = simulate(excited_loop(pr.plant, pr, off, filter), ex.u, dt);
    out.rms_on = tail_rms(out.on, ex.settle_index);
    out.rms_off = tail_rms(out.off, ex.settle_index);

    if (sim.sweep_segments > 0) {
        // piecewise-frozen sweep along the domain diagonal, state carried across segments
        const Domain& dom = ctx.model.domain;
        const Index n = ex.u.cols();
        const auto segs = static_cast<Index>(sim.sweep_segments);
        Vector x;
        double peak = 0.0;
        bool finite = true;
        for (Index s = 0; s < segs; ++s) {
            const double frac = segs == 1 ? 0.5 : static_cast<double>(s) / static_cast<double>(segs - 1);
            SchedulingPoint p(dom.dims());
            for (std::size_t d = 0; d < dom.dims(); ++d) {
                p[d] = dom.box[d][0] + frac * (dom.box[d][1] - dom.box[d][0]);
            }
            const Index k0 = s * n / segs;
            const Index k1 = std::min(n, (s + 1) * n / segs + 1);
            if (k1 - k0 < 2) {
                continue;
            }
            const StateSpace g = excited_loop(evaluate_local(ctx.pm_dec, p), pr, on, filter);
            const Trajectory tr = simulate(g, ex.u.middleCols(k0, k1 - k0), dt, x);
            x = tr.x.col(tr.x.cols() - 1);
            finite = finite && tr.y.allFinite() && x.allFinite();
            if (finite) {
                peak = std::max(peak, tr.y.cwiseAbs().maxCoeff());
            }
        }
        const double frozen_peak = out.on.y.cwiseAbs().maxCoeff();
        out.sweep_peak = peak;
        out.sweep_bounded = finite && peak <= 100.0 * std::max(frozen_peak, 1e-300);
    }
    return out;
}

}  // namespace mcd
