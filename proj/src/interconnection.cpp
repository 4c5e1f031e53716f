#include "mcd/closed_loop.hpp"

#include <cmath>
#include <limits>

#include "mcd/diagram.hpp"
#include "mcd/error.hpp"
#include "mcd/freqresp.hpp"
#include "mcd/linalg.hpp"

namespace mcd {

namespace {

Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
    Matrix out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

/// Loop diagram with the four disturbance/reference inputs external.
/// With open_rb the K_RB output c becomes an external input instead of a block output.
Diagram loop_diagram(const StateSpace& plant, const SynthesisProblem& problem, const ControllerBinding& b,
                     bool open_rb = false) {
    const Index nr = problem.n_rb();
    const Index nf = problem.n_flex();
    require(plant.outputs() == nr && plant.inputs() == nr + nf, ErrorKind::kDimension,
            "closed loop: plant dimensions differ from the synthesis problem");
    const Matrix& wz = problem.scalings.Wz_sc;
    const Matrix& ww1 = problem.scalings.Ww1_sc;
    const Matrix wz_inv = wz.inverse();
    const Matrix i_r = Matrix::Identity(nr, nr);
    const Matrix to_u1 = stack_rows(ww1, Matrix::Zero(nf, nr));
    const Matrix to_u2 = stack_rows(Matrix::Zero(nr, nf), Matrix::Identity(nf, nf));

    Diagram d;
    d.input("r", nr);
    d.input("d_out", nr);
    d.input("d_in1", nr);
    d.input("d_in2", nf);

    const std::vector<Term> e_s{{"r", wz}, {"y", -wz}, {"d_out", -i_r}};
    const std::vector<Term> e{{"r", i_r}, {"y", -i_r}, {"d_out", -wz_inv}};
    const std::vector<Term> u1{{"c", ww1}, {"d_in1", ww1}};

    d.block("y", plant, {{"c", to_u1}, {"d_in1", to_u1}, {"u_fm", to_u2}, {"d_in2", to_u2}});
    if (open_rb) {
        d.input("c", nr);
    } else {
        d.block("c", b.k_rb, e_s);
    }
    if (b.flex_loop) {
        const Index ne = b.observer.measurement_inputs();
        const Index nc = b.observer.control_inputs();
        if (b.observer.kind == ObserverKind::kOutput) {
            // inputs [u1; u_fm; y]
            require(nc == nr + nf && ne == nr, ErrorKind::kDimension, "closed loop: observer input size");
            Matrix g1 = Matrix::Zero(nc + ne, nr);
            g1.topRows(nr) = ww1;
            Matrix g2 = Matrix::Zero(nc + ne, nf);
            g2.middleRows(nr, nf).setIdentity();
            Matrix g3 = Matrix::Zero(nc + ne, nr);
            g3.bottomRows(nr).setIdentity();
            d.block("eta", b.observer.realization, {{"c", g1}, {"d_in1", g1}, {"u_fm", g2}, {"y", g3}});
        } else {
            // inputs [u_fm; e]
            require(nc == nf && ne == nr, ErrorKind::kDimension, "closed loop: observer input size");
            Matrix g1 = Matrix::Zero(nc + ne, nf);
            g1.topRows(nf).setIdentity();
            Matrix ge = Matrix::Zero(nc + ne, nr);
            ge.bottomRows(nr).setIdentity();
            std::vector<Term> in{{"u_fm", g1}};
            for (const auto& t : e) {
                in.push_back({t.signal, ge * t.gain});
            }
            d.block("eta", b.observer.realization, in);
        }
        d.block("u_fm", b.kfm.to_state_space(), {{"eta", Matrix()}});
    } else {
        d.block("u_fm", StateSpace::gain(Matrix::Zero(nf, nf)), {{"d_in2", Matrix()}});
    }
    d.output("e_s", e_s);
    d.output("e", e);
    d.output("u1", u1);
    return d;
}

}  // namespace

ControllerBinding bind_controller(const SynthesisProblem& problem, const StructuredControllerParams& params,
                                  bool flex_loop) {
    ControllerBinding b;
    require(static_cast<Index>(params.k_rb.size()) == problem.n_rb(), ErrorKind::kDimension,
            "bind_controller: one K_RB channel per rigid-body channel");
    b.k_rb = make_krb(params.k_rb).to_state_space();
    b.flex_loop = flex_loop;
    if (!flex_loop) {
        return b;
    }
    require(params.xi.size() == problem.flex_omega.size(), ErrorKind::kDimension,
            "bind_controller: one flexible gain per controlled mode");
    if (problem.observer_kind() == ObserverKind::kOutput) {
        b.observer = build_output_observer(problem.truncated, params.L, problem.Psi);
    } else {
        b.observer = build_error_observer(problem.model, problem.p_star, params.L, problem.Psi);
    }
    b.kfm = make_kfm({params.xi, problem.flex_omega, problem.Q});
    return b;
}

StateSpace closed_loop(const StateSpace& plant, const SynthesisProblem& problem, const ControllerBinding& binding,
                       const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
    return loop_diagram(plant, problem, binding).build(inputs, outputs);
}

ClosedLoopMap weighted_map(const StateSpace& plant, const SynthesisProblem& problem, const ControllerBinding& binding) {
    const ShapingFilterSet& w = problem.weights;
    ClosedLoopMap out;
    out.pattern = problem.pattern;
    const Index nr = problem.n_rb();
    const Index nf = problem.n_flex();
    StateSpace loop;
    StateSpace in_w;
    const StateSpace ww2_sc = StateSpace::gain(problem.scalings.Ww2_sc);
    if (problem.pattern == BlockPattern::kSix) {
        loop = closed_loop(plant, problem, binding, {"d_out", "d_in1", "d_in2"}, {"e_s", "c"});
        const StateSpace parts[] = {w.Ww1.to_state_space(), w.Ww2.to_state_space(),
                                    series(w.Ww3.to_state_space(), ww2_sc)};
        in_w = append(parts);
        out.w_sizes = {nr, nr, nf};
        out.w_names = {"w1_output_disturbance", "w2_input_disturbance", "w3_flexible_force"};
    } else {
        loop = closed_loop(plant, problem, binding, {"d_in1", "d_in2"}, {"e_s", "c"});
        const StateSpace parts[] = {w.Ww1.to_state_space(), series(w.Ww2.to_state_space(), ww2_sc)};
        in_w = append(parts);
        out.w_sizes = {nr, nf};
        out.w_names = {"w1_input_disturbance", "w2_flexible_force"};
    }
    const StateSpace zparts[] = {w.Wz1.to_state_space(), w.Wz2.to_state_space()};
    const StateSpace out_w = append(zparts);
    const StateSpace m = series(series(in_w, loop), out_w);
    out.M = scale(-Matrix::Identity(m.outputs(), m.outputs()), m, Matrix::Identity(m.inputs(), m.inputs()));
    out.z_sizes = {nr, nr};
    return out;
}

StateSpace ClosedLoopMap::columns(const std::vector<int>& blocks) const {
    std::vector<Index> cols;
    for (int b : blocks) {
        require(b >= 0 && b < static_cast<int>(w_sizes.size()), ErrorKind::kDimension, "ClosedLoopMap: bad block");
        Index off = 0;
        for (int k = 0; k < b; ++k) {
            off += w_sizes[static_cast<std::size_t>(k)];
        }
        for (Index i = 0; i < w_sizes[static_cast<std::size_t>(b)]; ++i) {
            cols.push_back(off + i);
        }
    }
    const std::vector<Index> rows = index_range(0, M.outputs());
    return subsystem(M, rows, cols);
}

Json ClosedLoopMap::channel_map() const {
    Json j;
    j["pattern"] = pattern == BlockPattern::kSix ? "six-block" : "four-block";
    j["z"] = {{{"name", "z1 = W_z1 e_s"}, {"size", z_sizes[0]}}, {{"name", "z2 = W_z2 c"}, {"size", z_sizes[1]}}};
    Json w = Json::array();
    for (std::size_t k = 0; k < w_sizes.size(); ++k) {
        w.push_back({{"name", w_names[k]}, {"size", w_sizes[k]}});
    }
    j["w"] = w;
    j["sign"] = "z = -M w";
    return j;
}

StateSpace sensitivity(const StateSpace& plant, const SynthesisProblem& problem, const ControllerBinding& binding) {
    const StateSpace g = closed_loop(plant, problem, binding, {"d_out"}, {"e_s"});
    return scale(-Matrix::Identity(g.outputs(), g.outputs()), g, Matrix::Identity(g.inputs(), g.inputs()));
}

StateSpace plant_delta(const StateSpace& plant, const SynthesisProblem& problem, const ControllerBinding& binding) {
    const Index nr = problem.n_rb();
    const Index nf = problem.n_flex();
    if (!binding.flex_loop) {
        return plant;
    }
    require(binding.observer.kind == ObserverKind::kOutput, ErrorKind::kDimension,
            "plant_delta: defined for the output-based observer");
    const Index nin = nr + nf;
    Diagram d;
    d.input("u1", nr);
    d.input("u2", nf);
    const Matrix to_u1 = stack_rows(Matrix::Identity(nr, nr), Matrix::Zero(nf, nr));
    const Matrix to_u2 = stack_rows(Matrix::Zero(nr, nf), Matrix::Identity(nf, nf));
    d.block("y", plant, {{"u1", to_u1}, {"u_fm", to_u2}, {"u2", to_u2}});
    Matrix g1 = Matrix::Zero(nin + nr, nr);
    g1.topRows(nr).setIdentity();
    Matrix g2 = Matrix::Zero(nin + nr, nf);
    g2.middleRows(nr, nf).setIdentity();
    Matrix g3 = Matrix::Zero(nin + nr, nr);
    g3.bottomRows(nr).setIdentity();
    d.block("eta", binding.observer.realization, {{"u1", g1}, {"u_fm", g2}, {"y", g3}});
    d.block("u_fm", binding.kfm.to_state_space(), {{"eta", Matrix()}});
    return d.build({"u1", "u2"}, {"y"});
}

StateSpace rb_loop_gain(const StateSpace& plant, const SynthesisProblem& problem, const ControllerBinding& binding) {
    // loop broken at the K_RB output, every other loop closed
    const StateSpace open = loop_diagram(plant, problem, binding, true).build({"c"}, {"e_s"});
    const StateSpace p_eff = scale(-Matrix::Identity(open.outputs(), open.outputs()), open,
                                   Matrix::Identity(open.inputs(), open.inputs()));
    return series(binding.k_rb, p_eff);
}

double crossover_hz(const StateSpace& loop_gain, Index channel, double f_lo, double f_hi) {
    const FrequencyEvaluator eval(loop_gain);
    auto mag = [&](double f) { return std::abs(eval(Complex(0.0, kTwoPi * f))(channel, channel)); };
    const std::vector<double> grid = logspace(f_lo, f_hi, 2000);
    double prev = mag(grid[0]);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double cur = mag(grid[k]);
        if (prev >= 1.0 && cur < 1.0) {
            double a = std::log(grid[k - 1]);
            double b = std::log(grid[k]);
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (a + b);
                (mag(std::exp(m)) >= 1.0 ? a : b) = m;
            }
            return std::exp(0.5 * (a + b));
        }
        prev = cur;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

bool GridCertificate::all_stable() const {
    for (bool h : hurwitz) {
        if (!h) {
            return false;
        }
    }
    return !hurwitz.empty();
}

Json GridCertificate::to_json() const {
    Json pts = Json::array();
    for (std::size_t k = 0; k < points.size(); ++k) {
        pts.push_back({{"p", points[k]}, {"hurwitz", static_cast<bool>(hurwitz[k])}, {"abscissa", abscissa[k]}});
    }
    return {{"all_stable", all_stable()}, {"points", pts}};
}

GridCertificate grid_stability_check(const SynthesisProblem& problem, const ControllerBinding& binding) {
    GridCertificate cert;
    const auto n = static_cast<std::ptrdiff_t>(problem.grid_plants.size());
    require(n > 0, ErrorKind::kDomain, "grid_stability_check: empty grid");
    cert.points = problem.grid;
    cert.hurwitz.assign(static_cast<std::size_t>(n), false);
    cert.abscissa.assign(static_cast<std::size_t>(n), 0.0);
    std::vector<char> ok(static_cast<std::size_t>(n), 0);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        try {
            const StateSpace cl = closed_loop(problem.grid_plants[i], problem, binding, {"r"}, {"e"});
            cert.abscissa[i] = spectral_abscissa(cl.A);
        } catch (const std::exception&) {
            cert.abscissa[i] = std::numeric_limits<double>::infinity();
        }
        ok[i] = cert.abscissa[i] < 0.0;
    }
    for (std::size_t i = 0; i < ok.size(); ++i) {
        cert.hurwitz[i] = ok[i] != 0;
    }
    return cert;
}

}  // namespace mcd
