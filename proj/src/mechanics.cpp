#include "mcd/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mcd/error.hpp"

namespace mcd {

namespace {

constexpr double kRigidThreshold = 1e-6;

bool symmetric(const Matrix& m) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

bool psd(const Matrix& m) {
    if (m.rows() == 0) {
        return true;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -1e-9 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

Matrix mode_block(double omega, double zeta) {
    Matrix a(2, 2);
    a << 0.0, 1.0, -omega * omega, -2.0 * zeta * omega;
    return a;
}

Matrix block_diag(const std::vector<Matrix>& blocks) {
    Index n = 0;
    for (const auto& b : blocks) {
        n += b.rows();
    }
    Matrix out = Matrix::Zero(n, n);
    Index o = 0;
    for (const auto& b : blocks) {
        out.block(o, o, b.rows(), b.cols()) = b;
        o += b.rows();
    }
    return out;
}

std::string exponent_key(const std::vector<int>& e) {
    std::ostringstream os;
    for (std::size_t i = 0; i < e.size(); ++i) {
        os << (i ? "," : "") << e[i];
    }
    return os.str();
}

std::vector<int> parse_exponent_key(std::string key, std::size_t dims, const std::string& what) {
    for (char& c : key) {
        if (c == '[' || c == ']' || c == '(' || c == ')') {
            c = ' ';
        }
    }
    std::vector<int> e;
    std::stringstream ss(key);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.find_first_not_of(' ') == std::string::npos) {
            continue;
        }
        try {
            e.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            fail(ErrorKind::kConfig, what + ": bad monomial exponent tuple \"" + key + "\"");
        }
    }
    require(e.size() == dims, ErrorKind::kConfig,
            what + ": monomial \"" + key + "\" must have " + std::to_string(dims) + " exponents");
    return e;
}

}  // namespace

void MechanicalModel::validate() const {
    const Index n = M.rows();
    require(n > 0 && M.cols() == n && D.rows() == n && D.cols() == n && K.rows() == n && K.cols() == n,
            ErrorKind::kDimension, "mechanical model: M, D, K must be square and of equal size");
    require(M.allFinite() && D.allFinite() && K.allFinite(), ErrorKind::kDomain,
            "mechanical model: non-finite entries");
    require(symmetric(M) && symmetric(D) && symmetric(K), ErrorKind::kDomain,
            "mechanical model: M, D, K must be symmetric");
    Eigen::LLT<Matrix> llt(M);
    require(llt.info() == Eigen::Success, ErrorKind::kDomain, "mechanical model: M must be positive definite");
    require(psd(K), ErrorKind::kDomain, "mechanical model: K must be positive semidefinite");
    require(psd(D), ErrorKind::kDomain, "mechanical model: D must be positive semidefinite");
    require(phi_a.rows() == n, ErrorKind::kDimension, "mechanical model: phi_a must have n_q rows");
    require(phi_s.cols() == n, ErrorKind::kDimension, "mechanical model: phi_s must have n_q columns");
    require(phi_a.domain().dims() == domain.dims() && phi_s.domain().dims() == domain.dims(),
            ErrorKind::kDimension, "mechanical model: map domains differ from the model domain");
}

ModalDecomposition modal_decompose(const MechanicalModel& model, bool force_diagonal) {
    model.validate();
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(model.K, model.M, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    require(ges.info() == Eigen::Success, ErrorKind::kNumeric, "modal_decompose: eigensolver failed");
    const Index n = model.dofs();
    ModalDecomposition dec;
    dec.Vt = ges.eigenvectors();  // V^T M V = I
    const Vector lambda = ges.eigenvalues();
    dec.omega = lambda.cwiseMax(0.0).cwiseSqrt();
    const double wmax = dec.omega.maxCoeff();
    for (Index i = 0; i < n; ++i) {
        if (dec.omega(i) < kRigidThreshold * wmax || wmax == 0.0) {
            dec.omega(i) = 0.0;
            ++dec.n_rigid;
        }
    }
    // Re-polish mass normalization and fix signs: largest-magnitude entry positive
    // (first such entry on ties).
    for (Index i = 0; i < n; ++i) {
        auto v = dec.Vt.col(i);
        v /= std::sqrt(v.dot(model.M * v));
        const double vmax = v.cwiseAbs().maxCoeff();
        for (Index k = 0; k < n; ++k) {
            if (std::abs(v(k)) >= vmax * (1.0 - 1e-9)) {
                if (v(k) < 0.0) {
                    v = -v;
                }
                break;
            }
        }
    }

    const Matrix modal_d = dec.Vt.transpose() * model.D * dec.Vt;
    Matrix off = modal_d;
    off.diagonal().setZero();
    const double off_norm = off.norm();
    if (off_norm > 1e-8 * std::max(1.0, modal_d.norm())) {
        std::ostringstream os;
        os << "modal_decompose: damping is not proportional (off-diagonal modal damping norm " << off_norm << ")";
        require(force_diagonal, ErrorKind::kDomain, os.str());
        dec.warnings.push_back(os.str() + "; off-diagonal terms discarded");
    }
    dec.zeta = Vector::Zero(n);
    for (Index i = 0; i < n; ++i) {
        if (dec.omega(i) > 0.0) {
            dec.zeta(i) = 0.5 * modal_d(i, i) / dec.omega(i);
        }
    }
    return dec;
}

StateSpace to_modal_ss(const ModalDecomposition& dec, const MechanicalModel& model, const SchedulingPoint& p) {
    model.domain.check(p);
    const Index n = dec.modes();
    Matrix a = Matrix::Zero(2 * n, 2 * n);
    a.topRightCorner(n, n) = Matrix::Identity(n, n);
    a.bottomLeftCorner(n, n) = Vector(-dec.omega.cwiseAbs2()).asDiagonal();
    a.bottomRightCorner(n, n) = Vector(-2.0 * dec.zeta.cwiseProduct(dec.omega)).asDiagonal();
    const Matrix phi_a = model.phi_a.evaluate(p);
    const Matrix phi_s = model.phi_s.evaluate(p);
    Matrix b = Matrix::Zero(2 * n, phi_a.cols());
    b.bottomRows(n) = dec.Vt.transpose() * phi_a;
    Matrix c = Matrix::Zero(phi_s.rows(), 2 * n);
    c.leftCols(n) = phi_s * dec.Vt;
    return StateSpace(a, b, c, Matrix::Zero(phi_s.rows(), phi_a.cols()));
}

Matrix mode_grouping_permutation(Index modes) {
    Matrix e1(2, 1);
    e1 << 1.0, 0.0;
    Matrix e2(2, 1);
    e2 << 0.0, 1.0;
    const Matrix id = Matrix::Identity(modes, modes);
    Matrix t(2 * modes, 2 * modes);
    // T = [I (x) [1 0]^T, I (x) [0 1]^T]
    for (Index i = 0; i < modes; ++i) {
        for (Index j = 0; j < modes; ++j) {
            t.block(2 * i, j, 2, 1) = id(i, j) * e1;
            t.block(2 * i, modes + j, 2, 1) = id(i, j) * e2;
        }
    }
    return t;
}

PartitionedModalModel group_and_partition(const ModalDecomposition& dec, const MechanicalModel& model, Index n_rb,
                                          const std::vector<Index>& retain) {
    const Index n = dec.modes();
    require(n_rb == dec.n_rigid, ErrorKind::kDomain,
            "group_and_partition: n_rb = " + std::to_string(n_rb) + " but the model has " +
                std::to_string(dec.n_rigid) + " rigid-body modes");
    std::set<Index> keep;
    for (Index r : retain) {
        require(r >= 0 && r < n, ErrorKind::kDomain, "group_and_partition: retained mode " + std::to_string(r) +
                                                         " out of range");
        require(r >= n_rb, ErrorKind::kDomain,
                "group_and_partition: retained mode " + std::to_string(r) + " is a rigid-body mode");
        require(keep.insert(r).second, ErrorKind::kDomain, "group_and_partition: duplicate retained mode");
    }

    PartitionedModalModel pm;
    pm.n_rb = n_rb;
    pm.retained.assign(keep.begin(), keep.end());
    for (Index i = n_rb; i < n; ++i) {
        if (!keep.count(i)) {
            pm.discarded.push_back(i);
        }
    }
    pm.omega = dec.omega;
    pm.zeta = dec.zeta;
    pm.domain = model.domain;

    // Per-mode rows of T [0; V^T] and columns of [V 0] T^T, grouped as (position, velocity).
    auto input_rows = [&](const std::vector<Index>& modes) {
        Matrix sel = Matrix::Zero(2 * static_cast<Index>(modes.size()), model.dofs());
        for (std::size_t k = 0; k < modes.size(); ++k) {
            sel.row(2 * static_cast<Index>(k) + 1) = dec.Vt.col(modes[k]).transpose();
        }
        return model.phi_a.left_multiply(sel);
    };
    auto output_cols = [&](const std::vector<Index>& modes) {
        Matrix sel = Matrix::Zero(model.dofs(), 2 * static_cast<Index>(modes.size()));
        for (std::size_t k = 0; k < modes.size(); ++k) {
            sel.col(2 * static_cast<Index>(k)) = dec.Vt.col(modes[k]);
        }
        return model.phi_s.right_multiply(sel);
    };
    auto dynamics = [&](const std::vector<Index>& modes) {
        std::vector<Matrix> blocks;
        for (Index m : modes) {
            blocks.push_back(mode_block(dec.omega(m), dec.zeta(m)));
        }
        return block_diag(blocks);
    };

    std::vector<Index> rigid(static_cast<std::size_t>(n_rb));
    for (Index i = 0; i < n_rb; ++i) {
        rigid[static_cast<std::size_t>(i)] = i;
    }
    pm.A_rb = dynamics(rigid);
    pm.A_fm_r = dynamics(pm.retained);
    pm.A_fm_d = dynamics(pm.discarded);
    pm.B_rb = input_rows(rigid);
    pm.B_fm_r = input_rows(pm.retained);
    pm.B_fm_d = input_rows(pm.discarded);
    pm.C_rb = output_cols(rigid);
    pm.C_fm_r = output_cols(pm.retained);
    pm.C_fm_d = output_cols(pm.discarded);
    return pm;
}

StateSpace evaluate_local(const PartitionedModalModel& pm, const SchedulingPoint& p) {
    pm.domain.check(p);
    const Matrix a = block_diag({pm.A_rb, pm.A_fm_r, pm.A_fm_d});
    const Index n = a.rows();
    const Index m = pm.inputs();
    const Index q = pm.outputs();
    Matrix b(n, m);
    b << pm.B_rb.evaluate(p), pm.B_fm_r.evaluate(p), pm.B_fm_d.evaluate(p);
    Matrix c(q, n);
    c << pm.C_rb.evaluate(p), pm.C_fm_r.evaluate(p), pm.C_fm_d.evaluate(p);
    return StateSpace(a, b, c, Matrix::Zero(q, m));
}

StateSpace evaluate_local(const MechanicalModel& model, const SchedulingPoint& p) {
    model.domain.check(p);
    const Index n = model.dofs();
    const Eigen::LLT<Matrix> mchol(model.M);
    Matrix a = Matrix::Zero(2 * n, 2 * n);
    a.topRightCorner(n, n) = Matrix::Identity(n, n);
    a.bottomLeftCorner(n, n) = -mchol.solve(model.K);
    a.bottomRightCorner(n, n) = -mchol.solve(model.D);
    const Matrix phi_a = model.phi_a.evaluate(p);
    const Matrix phi_s = model.phi_s.evaluate(p);
    Matrix b = Matrix::Zero(2 * n, phi_a.cols());
    b.bottomRows(n) = mchol.solve(phi_a);
    Matrix c = Matrix::Zero(phi_s.rows(), 2 * n);
    c.leftCols(n) = phi_s;
    return StateSpace(a, b, c, Matrix::Zero(phi_s.rows(), phi_a.cols()));
}

Json position_map_to_json(const PositionMap& m) {
    Json entries = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            Json coeffs = Json::object();
            for (const auto& t : m.terms()) {
                if (t.coeff(r, c) != 0.0) {
                    coeffs[exponent_key(t.exponents)] = t.coeff(r, c);
                }
            }
            if (!coeffs.empty()) {
                entries.push_back({{"entry", {r, c}}, {"coeffs", coeffs}});
            }
        }
    }
    return entries;
}

PositionMap position_map_from_json(const Json& j, Index rows, Index cols, const Domain& domain,
                                   const std::string& what) {
    require(j.is_array(), ErrorKind::kConfig, what + ": expected a list of entries");
    PositionMap m(rows, cols, domain);
    for (const Json& e : j) {
        require(e.is_object() && e.contains("entry") && e.contains("coeffs"), ErrorKind::kConfig,
                what + ": each entry needs \"entry\" and \"coeffs\"");
        for (const auto& [key, value] : e.items()) {
            require(key == "entry" || key == "coeffs", ErrorKind::kConfig,
                    what + ": unknown key \"" + key + "\"");
        }
        const Json& rc = e["entry"];
        require(rc.is_array() && rc.size() == 2 && rc[0].is_number_integer() && rc[1].is_number_integer(),
                ErrorKind::kConfig, what + ": \"entry\" must be [row, col]");
        const auto r = rc[0].get<Index>();
        const auto c = rc[1].get<Index>();
        require(r >= 0 && r < rows && c >= 0 && c < cols, ErrorKind::kConfig, what + ": entry out of range");
        require(e["coeffs"].is_object(), ErrorKind::kConfig, what + ": \"coeffs\" must be an object");
        for (const auto& [key, value] : e["coeffs"].items()) {
            require(value.is_number(), ErrorKind::kConfig, what + ": coefficient must be numeric");
            Matrix coeff = Matrix::Zero(rows, cols);
            coeff(r, c) = value.get<double>();
            m.add_term(parse_exponent_key(key, domain.dims(), what), coeff);
        }
    }
    return m;
}

Json to_json(const MechanicalModel& model) {
    Json j;
    j["M"] = matrix_to_json(model.M);
    j["D"] = matrix_to_json(model.D);
    j["K"] = matrix_to_json(model.K);
    j["n_u"] = model.inputs();
    j["n_y"] = model.outputs();
    j["phi_a"] = position_map_to_json(model.phi_a);
    j["phi_s"] = position_map_to_json(model.phi_s);
    Json dom = Json::array();
    for (const auto& b : model.domain.box) {
        dom.push_back({b[0], b[1]});
    }
    j["domain"] = dom;
    return j;
}

MechanicalModel mechanical_model_from_json(const Json& j) {
    require(j.is_object(), ErrorKind::kConfig, "model: expected an object");
    for (const char* key : {"M", "D", "K", "phi_a", "phi_s", "domain"}) {
        require(j.contains(key), ErrorKind::kConfig, std::string("model: missing \"") + key + "\"");
    }
    for (const auto& [key, value] : j.items()) {
        static const std::set<std::string> known{"M", "D", "K", "phi_a", "phi_s", "domain", "n_u", "n_y", "name"};
        require(known.count(key) > 0, ErrorKind::kConfig, "model: unknown key \"" + key + "\"");
    }
    MechanicalModel m;
    m.M = matrix_from_json(j["M"], "model.M");
    m.D = matrix_from_json(j["D"], "model.D");
    m.K = matrix_from_json(j["K"], "model.K");
    require(j["domain"].is_array(), ErrorKind::kConfig, "model.domain: expected [[min, max], ...]");
    for (const Json& b : j["domain"]) {
        require(b.is_array() && b.size() == 2 && b[0].is_number() && b[1].is_number(), ErrorKind::kConfig,
                "model.domain: each coordinate needs [min, max]");
        const double lo = b[0].get<double>();
        const double hi = b[1].get<double>();
        require(lo <= hi, ErrorKind::kConfig, "model.domain: min must not exceed max");
        m.domain.box.push_back({lo, hi});
    }
    auto infer = [&](const Json& entries, int axis) {
        Index n = 0;
        for (const Json& e : entries) {
            if (e.contains("entry") && e["entry"].is_array() && e["entry"].size() == 2) {
                n = std::max(n, e["entry"][static_cast<std::size_t>(axis)].get<Index>() + 1);
            }
        }
        return n;
    };
    const Index nq = m.M.rows();
    const Index nu = j.contains("n_u") ? j["n_u"].get<Index>() : infer(j["phi_a"], 1);
    const Index ny = j.contains("n_y") ? j["n_y"].get<Index>() : infer(j["phi_s"], 0);
    m.phi_a = position_map_from_json(j["phi_a"], nq, nu, m.domain, "model.phi_a");
    m.phi_s = position_map_from_json(j["phi_s"], ny, nq, m.domain, "model.phi_s");
    m.validate();
    return m;
}

}  // namespace mcd
