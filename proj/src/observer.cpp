#include "mcd/observer.hpp"

#include <algorithm>

#include "mcd/error.hpp"
#include "mcd/linalg.hpp"

namespace mcd {

namespace {

void finish(ModalObserver& obs) {
    const Matrix err = obs.A_model - obs.L * obs.C_meas;
    obs.error_poles = eigenvalues(err);
    obs.error_stable = obs.error_poles.size() == 0 || obs.error_poles.real().maxCoeff() < 0.0;
    if (!obs.error_stable) {
        obs.warnings.push_back(to_string(obs.kind) + " observer: estimation-error dynamics are not Hurwitz (abscissa " +
                               std::to_string(obs.error_poles.real().maxCoeff()) + ")");
    }
}

Index flex_offset(const PartitionedModalModel& pm) { return pm.n_rb; }

}  // namespace

Matrix compliance_correction(const PartitionedModalModel& pm, const SchedulingPoint& p) {
    pm.domain.check(p);
    if (pm.n_disc() == 0) {
        return Matrix::Zero(pm.outputs(), pm.inputs());
    }
    for (Index m : pm.discarded) {
        require(pm.omega(m) > 0.0, ErrorKind::kDomain,
                "truncate_with_compliance: discarded mode " + std::to_string(m) + " has zero stiffness");
    }
    const Eigen::PartialPivLU<Matrix> lu(pm.A_fm_d);
    return -pm.C_fm_d.evaluate(p) * lu.solve(pm.B_fm_d.evaluate(p));
}

TruncatedModel truncate_with_compliance(const PartitionedModalModel& pm, const SchedulingPoint& p) {
    TruncatedModel tm;
    tm.p = p;
    tm.n_rb = pm.n_rb;
    tm.n_flex = pm.n_flex();
    const Matrix d_o = compliance_correction(pm, p);
    const Index nr = pm.A_rb.rows();
    const Index nf = pm.A_fm_r.rows();
    Matrix a = Matrix::Zero(nr + nf, nr + nf);
    a.topLeftCorner(nr, nr) = pm.A_rb;
    a.bottomRightCorner(nf, nf) = pm.A_fm_r;
    Matrix b(nr + nf, pm.inputs());
    b << pm.B_rb.evaluate(p), pm.B_fm_r.evaluate(p);
    Matrix c(pm.outputs(), nr + nf);
    c << pm.C_rb.evaluate(p), pm.C_fm_r.evaluate(p);
    tm.model = StateSpace(a, b, c, d_o);
    return tm;
}

ModalObserver build_output_observer(const TruncatedModel& tm, const Matrix& L, const Matrix& Psi) {
    const StateSpace& g = tm.model;
    const Index n = g.states();
    require(L.rows() == n && L.cols() == g.outputs(), ErrorKind::kDimension,
            "build_output_observer: L must be " + std::to_string(n) + " x " + std::to_string(g.outputs()));
    require(Psi.cols() == n, ErrorKind::kDimension, "build_output_observer: Psi must have one column per state");
    ModalObserver obs;
    obs.kind = ObserverKind::kOutput;
    obs.L = L;
    obs.Psi = Psi;
    obs.A_model = g.A;
    obs.C_meas = g.C;
    Matrix b(n, g.inputs() + g.outputs());
    b << g.B - L * g.D, L;
    obs.realization = StateSpace(g.A - L * g.C, b, Psi, Matrix::Zero(Psi.rows(), b.cols()));
    finish(obs);
    return obs;
}

ObserverDesignModel output_observer_design_model(const TruncatedModel& tm) {
    return {tm.model.A, tm.model.C};
}

ObserverDesignModel error_observer_design_model(const PartitionedModalModel& pm, const SchedulingPoint& p) {
    return {pm.A_fm_r, -pm.C_fm_r.evaluate(p)};
}

ModalObserver build_error_observer(const PartitionedModalModel& pm, const SchedulingPoint& p, const Matrix& L,
                                   const Matrix& Psi) {
    pm.domain.check(p);
    const Index n = pm.A_fm_r.rows();
    const Index ny = pm.outputs();
    const Index nfm = pm.inputs() - pm.n_rb;
    require(nfm >= 0, ErrorKind::kDimension, "build_error_observer: fewer inputs than rigid-body modes");
    require(L.rows() == n && L.cols() == ny, ErrorKind::kDimension,
            "build_error_observer: L must be " + std::to_string(n) + " x " + std::to_string(ny));
    require(Psi.cols() == n, ErrorKind::kDimension, "build_error_observer: Psi must have one column per state");
    const Index off = flex_offset(pm);
    const Matrix c_f = pm.C_fm_r.evaluate(p);
    const Matrix b_f = pm.B_fm_r.evaluate(p).middleCols(off, nfm);
    const Matrix d_o = compliance_correction(pm, p).middleCols(off, nfm);

    ModalObserver obs;
    obs.kind = ObserverKind::kError;
    obs.L = L;
    obs.Psi = Psi;
    obs.A_model = pm.A_fm_r;
    obs.C_meas = -c_f;
    Matrix b(n, nfm + ny);
    b << b_f + L * d_o, L;
    obs.realization = StateSpace(pm.A_fm_r + L * c_f, b, Psi, Matrix::Zero(Psi.rows(), b.cols()));
    finish(obs);
    return obs;
}

StateSpace sigma_subsystem(const ModalObserver& obs, const RationalDiagonalFilter& kfm) {
    const StateSpace k = kfm.to_state_space();
    const Index nfm = obs.control_inputs();
    const Index ne = obs.measurement_inputs();
    const Index neta = obs.realization.outputs();
    require(obs.kind == ObserverKind::kError, ErrorKind::kDimension,
            "sigma_subsystem: requires an error-based observer");
    require(k.inputs() == neta && k.outputs() == nfm, ErrorKind::kDimension,
            "sigma_subsystem: K_FM must map the " + std::to_string(neta) + " estimated velocities to the " +
                std::to_string(nfm) + " flexible-mode commands");
    const StateSpace parts[] = {obs.realization, k};
    const StateSpace blocks = append(parts);
    // block inputs [u_FM; e; eta_hat], block outputs [eta_hat; u_FM]
    Matrix F = Matrix::Zero(nfm + ne + neta, neta + nfm);
    F.block(0, neta, nfm, nfm).setIdentity();
    F.block(nfm + ne, 0, neta, neta).setIdentity();
    Matrix E = Matrix::Zero(nfm + ne + neta, ne);
    E.block(nfm, 0, ne, ne).setIdentity();
    Matrix H = Matrix::Zero(nfm, neta + nfm);
    H.rightCols(nfm).setIdentity();
    return interconnect(blocks, F, E, H, Matrix::Zero(nfm, ne));
}

Matrix selection_matrix(const PartitionedModalModel& pm, const std::vector<Index>& controlled, ObserverKind kind) {
    const Index offset = kind == ObserverKind::kOutput ? pm.n_rb : 0;
    const Index states = 2 * (offset + pm.n_flex());
    Matrix psi = Matrix::Zero(static_cast<Index>(controlled.size()), states);
    for (std::size_t r = 0; r < controlled.size(); ++r) {
        const auto it = std::find(pm.retained.begin(), pm.retained.end(), controlled[r]);
        require(it != pm.retained.end(), ErrorKind::kDomain,
                "selection_matrix: controlled mode " + std::to_string(controlled[r]) + " is not a retained mode");
        const Index k = static_cast<Index>(it - pm.retained.begin());
        psi(static_cast<Index>(r), 2 * (offset + k) + 1) = 1.0;
    }
    return psi;
}

std::string to_string(ObserverKind kind) { return kind == ObserverKind::kOutput ? "output" : "error"; }

Json to_json(const ModalObserver& obs) {
    Json j = to_json(obs.realization);
    j["kind"] = to_string(obs.kind);
    j["L"] = matrix_to_json(obs.L);
    j["Psi"] = matrix_to_json(obs.Psi);
    Json poles = Json::array();
    for (Index i = 0; i < obs.error_poles.size(); ++i) {
        poles.push_back({obs.error_poles(i).real(), obs.error_poles(i).imag()});
    }
    j["error_poles"] = poles;
    j["error_stable"] = obs.error_stable;
    return j;
}

}  // namespace mcd
