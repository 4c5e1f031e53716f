// Command-line front end: decoupling, synthesis comparisons, analysis, simulation and grid checks.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mcd/error.hpp"
#include "mcd/freqresp.hpp"
#include "mcd/workflow.hpp"

namespace fs = std::filesystem;
using namespace mcd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string model;
    std::string config;
    std::string out = "out";
    std::string results;
    std::string p_star;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> grid;
    std::optional<int> budget;
    std::string pattern = "six";
    Index n_flex = 1;
};

SchedulingPoint parse_point(const std::string& text) {
    SchedulingPoint p;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            p.push_back(std::stod(item, &used));
            require(used == item.size(), ErrorKind::kConfig, "");
        } catch (const std::exception&) {
            fail(ErrorKind::kConfig, "--p-star: cannot parse '" + text + "' (expected comma-separated numbers)");
        }
    }
    require(!p.empty(), ErrorKind::kConfig, "--p-star: empty point");
    return p;
}

RunConfig load_config(const CommonOptions& o) {
    Json j = Json::object();
    if (!o.config.empty()) {
        j = read_json_file(o.config);
    } else if (!o.results.empty()) {
        const Json r = read_json_file(o.results);
        require(r.contains("config"), ErrorKind::kConfig, "results file carries no config");
        j = r.at("config");
    }
    if (!o.model.empty()) {
        j["model"] = o.model;
    }
    const std::string base = j.contains("model") && j["model"].is_string() ? j["model"].get<std::string>() : "two_mass";
    const auto names = benchmark_names();
    RunConfig cfg = apply_config(j, std::find(names.begin(), names.end(), base) != names.end()
                                        ? default_config(base)
                                        : default_config("two_mass"));
    if (!o.p_star.empty()) {
        cfg.p_star = parse_point(o.p_star);
    }
    if (o.seed) {
        cfg.optimizer.seed = *o.seed;
    }
    if (o.grid) {
        cfg.grid_per_axis = *o.grid;
    }
    if (o.budget) {
        cfg.optimizer.budget = *o.budget;
    }
    return cfg;
}

BlockPattern parse_pattern(const std::string& s) {
    if (s == "six") {
        return BlockPattern::kSix;
    }
    require(s == "four", ErrorKind::kConfig, "--pattern must be 'six' or 'four'");
    return BlockPattern::kFour;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    require(static_cast<bool>(os), ErrorKind::kConfig, "cannot write " + path.string());
    os << text;
}

Json results_document(const DesignContext& ctx, const ComparisonRun& run) {
    Json j = run.to_json();
    j["config"] = ctx.cfg.to_json();
    j["decoupling"] = to_json(ctx.pair);
    return j;
}

/// Uses the designs in --results when given, otherwise synthesizes them.
ComparisonRun obtain_comparison(const DesignContext& ctx, const CommonOptions& o) {
    if (!o.results.empty()) {
        return load_comparison(ctx, read_json_file(o.results));
    }
    return run_comparison(ctx, parse_pattern(o.pattern));
}

int cmd_decouple(const CommonOptions& o) {
    RunConfig cfg = load_config(o);
    const MechanicalModel model = load_model(cfg.model);
    model.validate();
    const ModalDecomposition dec = modal_decompose(model, cfg.force_diagonal);
    if (cfg.p_star.empty()) {
        cfg.p_star = model.domain.center();
    }
    std::vector<Index> flexible;
    for (Index m = dec.n_rigid; m < dec.modes(); ++m) {
        flexible.push_back(m);
    }
    const PartitionedModalModel pm = group_and_partition(dec, model, dec.n_rigid, flexible);
    const DecouplingPair pair = extended_input_decoupling(pm, cfg.p_star, o.n_flex);
    const PartitionedModalModel pm_dec = apply_decoupling(pm, pair);
    const DecouplingResidual res = decoupling_residual(pm, pair, cfg.p_star);

    fs::create_directories(o.out);
    Json j = to_json(pair);
    j["residual"] = {{"input", res.input}, {"output", res.output}};
    j["identity_checks_pass"] = res.input <= 1e-10 && res.output <= 1e-10;
    Json notes = Json::array();
    if (pair.position_independent) {
        notes.push_back("position-independent decoupling");
    }
    for (const auto& w : dec.warnings) {
        notes.push_back(w);
    }
    j["notes"] = notes;
    write_json_file((fs::path(o.out) / "decoupling.json").string(), j);
    write_json_file((fs::path(o.out) / "model.json").string(), to_json(model));

    const StateSpace g = evaluate_local(pm_dec, cfg.p_star);
    double fmax = 1.0;
    for (Index m = 0; m < dec.modes(); ++m) {
        fmax = std::max(fmax, dec.omega(m) / kTwoPi);
    }
    const std::vector<double> freqs = logspace(fmax / 1000.0, fmax * 10.0, cfg.analysis.points);
    std::ofstream os(fs::path(o.out) / "decoupled_response.csv");
    write_csv(os, freq_response(g, freqs));

    std::cout << "T_u " << pair.T_u.rows() << "x" << pair.T_u.cols() << ", T_y " << pair.T_y.rows() << "x"
              << pair.T_y.cols() << "; residual input " << res.input << ", output " << res.output << "\n";
    for (const auto& n : notes) {
        std::cout << n.get<std::string>() << "\n";
    }
    return kExitOk;
}

int cmd_synth(const CommonOptions& o, BlockPattern pattern) {
    const DesignContext ctx = prepare(load_config(o));
    fs::create_directories(o.out);
    ComparisonRun run;
    try {
        run = run_comparison(ctx, pattern);
    } catch (const Error& e) {
        Json j;
        j["config"] = ctx.cfg.to_json();
        j["error"] = e.what();
        write_json_file((fs::path(o.out) / "results.json").string(), j);
        throw;
    }
    write_json_file((fs::path(o.out) / "results.json").string(), results_document(ctx, run));
    write_frequency_exports(run, analysis_grid(ctx), o.out);
    std::cout << "gamma: conventional " << run.conventional.result.gamma << ", proposed " << run.proposed.result.gamma
              << " (init " << run.proposed.result.gamma_init << ")\n"
              << "flexible-channel peak reduction " << run.flex_reduction_db() << " dB\n"
              << "grid certificate " << (run.proposed.metrics.certificate.all_stable() ? "passed" : "FAILED") << "\n";
    return kExitOk;
}

int cmd_analyze(const CommonOptions& o) {
    require(!o.results.empty(), ErrorKind::kConfig, "analyze needs --results");
    const DesignContext ctx = prepare(load_config(o));
    const ComparisonRun run = load_comparison(ctx, read_json_file(o.results));
    fs::create_directories(o.out);
    Json j = results_document(ctx, run);
    try {
        j["uncertainty"] = build_uncertain_plant(ctx.grid_plants, ctx.grid, std::max<Index>(ctx.nominal_index, 0))
                               .to_json();
    } catch (const Error& e) {
        j["uncertainty"] = {{"error", e.what()}};
    }
    write_json_file((fs::path(o.out) / "analysis.json").string(), j);
    write_frequency_exports(run, analysis_grid(ctx), o.out);
    std::cout << "flexible-channel peak reduction " << run.flex_reduction_db() << " dB\n";
    return kExitOk;
}

int cmd_simulate(const CommonOptions& o) {
    const DesignContext ctx = prepare(load_config(o));
    const ComparisonRun run = obtain_comparison(ctx, o);
    const SimulationComparison sim = simulate_comparison(ctx, run, ctx.cfg.simulation);
    fs::create_directories(o.out);
    std::ofstream os(fs::path(o.out) / "trajectories.csv");
    write_trajectories_csv(os, sim);
    Json j = to_json(sim);
    j["config"] = ctx.cfg.to_json();
    write_json_file((fs::path(o.out) / "simulation.json").string(), j);
    std::cout << "RMS tracking error: observer on " << sim.rms_on << ", off " << sim.rms_off << "\n";
    if (sim.sweep_bounded) {
        std::cout << "scheduled sweep " << (*sim.sweep_bounded ? "bounded" : "UNBOUNDED") << "\n";
    }
    return kExitOk;
}

int cmd_gridcheck(const CommonOptions& o) {
    const DesignContext ctx = prepare(load_config(o));
    const ComparisonRun run = obtain_comparison(ctx, o);
    fs::create_directories(o.out);
    Json j;
    j["conventional"] = run.conventional.metrics.certificate.to_json();
    j["proposed"] = run.proposed.metrics.certificate.to_json();
    write_json_file((fs::path(o.out) / "gridcheck.json").string(), j);
    const bool ok = run.conventional.metrics.certificate.all_stable() && run.proposed.metrics.certificate.all_stable();
    std::cout << "grid certificate " << (ok ? "passed" : "FAILED") << " on " << ctx.grid.size() << " points\n";
    return ok ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modal observer co-design for position-dependent motion systems"};
    app.require_subcommand(1);
    CommonOptions o;

    auto add_common = [&](CLI::App* c) {
        c->add_option("--model", o.model, "benchmark name or MechanicalModel JSON file");
        c->add_option("--config", o.config, "run configuration JSON");
        c->add_option("--out", o.out, "output directory");
        c->add_option("--seed", o.seed, "optimizer seed");
        c->add_option("--p-star", o.p_star, "design point, comma separated");
        c->add_option("--grid", o.grid, "grid points per scheduling axis");
        c->add_option("--budget", o.budget, "optimizer polls per start");
    };
    CLI::App* dec = app.add_subcommand("decouple", "decoupling matrices and decoupled plant response");
    add_common(dec);
    dec->add_option("--n-flex", o.n_flex, "flexible modes to decouple on the actuator side");
    CLI::App* s6 = app.add_subcommand("synth6", "output-based observer co-design (six-block) vs conventional");
    add_common(s6);
    CLI::App* s4 = app.add_subcommand("synth4", "error-based observer co-design (four-block) vs conventional");
    add_common(s4);
    CLI::App* an = app.add_subcommand("analyze", "recompute metrics, uncertainty weight and responses");
    add_common(an);
    an->add_option("--results", o.results, "results.json from synth6/synth4")->required();
    CLI::App* sim = app.add_subcommand("simulate", "time-domain comparison of observer on/off");
    add_common(sim);
    CLI::App* gc = app.add_subcommand("gridcheck", "frozen-grid closed-loop stability certificate");
    add_common(gc);
    for (CLI::App* c : {sim, gc}) {
        c->add_option("--results", o.results, "results.json with the designs (synthesized when absent)");
        c->add_option("--pattern", o.pattern, "six or four, when synthesizing")->check(CLI::IsMember({"six", "four"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (dec->parsed()) {
            return cmd_decouple(o);
        }
        if (s6->parsed()) {
            return cmd_synth(o, BlockPattern::kSix);
        }
        if (s4->parsed()) {
            return cmd_synth(o, BlockPattern::kFour);
        }
        if (an->parsed()) {
            return cmd_analyze(o);
        }
        if (sim->parsed()) {
            return cmd_simulate(o);
        }
        return cmd_gridcheck(o);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::kNumeric ? kExitNumeric : kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
