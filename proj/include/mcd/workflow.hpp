#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcd/benchplant.hpp"
#include "mcd/decoupling.hpp"
#include "mcd/riccati.hpp"
#include "mcd/simulate.hpp"
#include "mcd/synthesis.hpp"
#include "mcd/uncertainty.hpp"

namespace mcd {

struct OptimizerSettings {
    int budget = 150;
    std::uint64_t seed = 1;
    int starts = 5;
    double initial_step = 0.5;
    double min_step = 1e-3;
    double perturbation = 0.3;
    double hinf_tol = 1e-4;
    int stabilize_budget = 100;
};

struct AnalysisSettings {
    std::size_t points = 400;
    double f_min = 0.0;  // 0: derived from the plant poles
    double f_max = 0.0;
};

struct SimulationSettings {
    double duration = 4.0;
    double dt = 0.0;           // 0: 1/(50 f_max), f_max the highest retained eigenfrequency
    double settle = 0.5;       // s excluded from the RMS
    double dist_center_hz = 0.0;   // 0: the first controlled eigenfrequency
    double dist_bandwidth_hz = 0.25;
    double dist_amplitude = 1.0;
    double ref_amplitude = 0.0;
    double ref_move_time = 0.2;
    std::size_t sweep_segments = 0;  // > 0: additionally run a scheduled sweep through the domain
};

/// Everything a run needs; defaults come from a benchmark or are derived from the model.
struct RunConfig {
    std::string model = "two_mass";
    SchedulingPoint p_star;
    std::size_t grid_per_axis = 0;
    std::vector<Index> retain;
    std::vector<Index> controlled;
    Index n_flex = -1;
    bool force_diagonal = false;
    Vector expected_error;
    ShapingParams filters;
    double observer_q = 1.0;  // Riccati weights Q = q I, V = v I (output in scaled units)
    double observer_v = 1.0;
    OptimizerSettings optimizer;
    AnalysisSettings analysis;
    SimulationSettings simulation;

    Json to_json() const;
};

/// Defaults for a named benchmark.
RunConfig default_config(const std::string& benchmark);
/// Overlays a JSON configuration on `base`. Unknown keys raise Error(kConfig) with their path.
RunConfig apply_config(const Json& j, RunConfig base);
/// Loads the model named by cfg.model (benchmark name or MechanicalModel JSON file).
MechanicalModel load_model(const std::string& model);
/// Fills fields left unset (derived from the model) and validates the combination.
RunConfig complete_config(RunConfig cfg, const MechanicalModel& model, const ModalDecomposition& dec);

/// Model, modal data, decoupling and frozen plants shared by all commands.
struct DesignContext {
    RunConfig cfg;
    MechanicalModel model;
    ModalDecomposition dec;
    PartitionedModalModel pm;      // physical inputs/outputs
    DecouplingPair pair;
    PartitionedModalModel pm_dec;  // decoupled
    std::vector<SchedulingPoint> grid;
    std::vector<StateSpace> grid_plants;
    StateSpace nominal;
    Index nominal_index = -1;      // position of p_star in the grid, -1 if absent
    ScalingSet scalings;
};

DesignContext prepare(const RunConfig& cfg);

SynthesisProblem make_problem(const DesignContext& ctx, BlockPattern pattern);

/// K_RB from the loop-shaping heuristic, L from the filter Riccati equation, xi = 0.
StructuredControllerParams initial_params(const DesignContext& ctx, const SynthesisProblem& problem);
/// Riccati solution used for the observer initialization (gain in physical units).
CareSolution observer_riccati(const DesignContext& ctx, const SynthesisProblem& problem);

struct DesignMetrics {
    double gamma = 0.0;            // full weighted map
    double gamma_objective = 0.0;  // blocks the design was optimized on
    double flex_peak = 0.0;        // norm of the flexible-force column
    double s_peak = 0.0;           // max over rigid-body channels of |S_ii|
    std::vector<double> crossover_hz;
    bool bound_holds = true;       // |S_ii| <= gamma_objective |(W_z1 W_w1)_ii^-1| on the verification grid
    double bound_worst_ratio = 0.0;
    GridCertificate certificate;

    Json to_json() const;
};

struct DesignOutcome {
    StructuredControllerParams params;
    SynthesisResult result;
    DesignMetrics metrics;
    bool flex_loop = false;
};

struct ComparisonRun {
    SynthesisProblem problem;
    DesignOutcome conventional;  // flexible loop open, tuned on the rigid-body blocks only
    DesignOutcome proposed;      // full structure on the full map, started from the conventional K_RB

    double flex_reduction_db() const;
    Json to_json() const;
};

DesignMetrics evaluate_design(const SynthesisProblem& problem, const StructuredControllerParams& params, bool flex_loop,
                              const std::vector<int>& objective_blocks);

/// Flexible-force column index (0-based block) for the pattern.
int flex_block(BlockPattern pattern);
std::vector<int> rigid_blocks(BlockPattern pattern);

SynthesisOptions synthesis_options(const RunConfig& cfg, const SynthesisProblem& problem, bool flex_loop);

ComparisonRun run_comparison(const DesignContext& ctx, BlockPattern pattern);

/// Rebuilds a comparison from a results document written by ComparisonRun::to_json (the
/// controllers are taken from it, metrics are recomputed).
ComparisonRun load_comparison(const DesignContext& ctx, const Json& results);

/// Frequency grid used for CSV exports.
std::vector<double> analysis_grid(const DesignContext& ctx);

/// Writes weighted-map, sensitivity and loop-gain responses of both designs on one grid.
/// Returns the file names written (relative to dir).
std::vector<std::string> write_frequency_exports(const ComparisonRun& run, const std::vector<double>& freqs_hz,
                                                 const std::string& dir);

struct SimulationComparison {
    double rms_on = 0.0;   // tracking error RMS, proposed design
    double rms_off = 0.0;  // conventional design
    Trajectory on;
    Trajectory off;
    std::optional<bool> sweep_bounded;
    double sweep_peak = 0.0;
};

/// Columns t_s, then e_on_<i>_m and e_off_<i>_m per rigid-body channel.
void write_trajectories_csv(std::ostream& os, const SimulationComparison& sim);
Json to_json(const SimulationComparison& sim);

/// Frozen-p* closed loops driven by the same band-limited disturbance on the flexible
/// channels (and an optional reference with rigid-body feedforward).
SimulationComparison simulate_comparison(const DesignContext& ctx, const ComparisonRun& run,
                                         const SimulationSettings& sim);

}  // namespace mcd
