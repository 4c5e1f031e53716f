#include "mcd/decoupling.hpp"

#include <sstream>

#include "mcd/error.hpp"
#include "mcd/linalg.hpp"

namespace mcd {

namespace {

std::string describe_directions(const Matrix& dirs) {
    std::ostringstream os;
    os.precision(4);
    for (Index j = 0; j < dirs.cols(); ++j) {
        os << (j ? "; " : "") << "[";
        for (Index i = 0; i < dirs.rows(); ++i) {
            os << (i ? ", " : "") << dirs(i, j);
        }
        os << "]";
    }
    return os.str();
}

PositionMap stacked_inputs(const PartitionedModalModel& pm, Index n_flex) {
    return PositionMap::vstack({pm.B_rb, pm.B_fm_r.rows_block(0, 2 * n_flex)}, pm.inputs(), pm.domain);
}

bool velocity_rows_constant(const PositionMap& b) {
    Matrix sel = Matrix::Zero(b.rows() / 2, b.rows());
    for (Index i = 0; i < sel.rows(); ++i) {
        sel(i, 2 * i + 1) = 1.0;
    }
    return b.left_multiply(sel).is_constant();
}

bool position_cols_constant(const PositionMap& c) {
    Matrix sel = Matrix::Zero(c.cols(), c.cols() / 2);
    for (Index i = 0; i < sel.cols(); ++i) {
        sel(2 * i, i) = 1.0;
    }
    return c.right_multiply(sel).is_constant();
}

Matrix input_pinv(const Matrix& bv, const std::string& what) {
    const PseudoInverse pi = pseudo_inverse(bv);
    if (pi.rank < bv.rows()) {
        fail(ErrorKind::kRank, what + ": velocity input matrix has rank " + std::to_string(pi.rank) + " < " +
                                   std::to_string(bv.rows()) + "; modal directions without actuation: " +
                                   describe_directions(pi.left_null));
    }
    return pi.pinv;
}

}  // namespace

Matrix velocity_rows(const Matrix& b_grouped) {
    Matrix out(b_grouped.rows() / 2, b_grouped.cols());
    for (Index i = 0; i < out.rows(); ++i) {
        out.row(i) = b_grouped.row(2 * i + 1);
    }
    return out;
}

Matrix position_cols(const Matrix& c_grouped) {
    Matrix out(c_grouped.rows(), c_grouped.cols() / 2);
    for (Index i = 0; i < out.cols(); ++i) {
        out.col(i) = c_grouped.col(2 * i);
    }
    return out;
}

DecouplingPair rb_decoupling(const PartitionedModalModel& pm, const SchedulingPoint& p) {
    return extended_input_decoupling(pm, p, 0);
}

DecouplingPair extended_input_decoupling(const PartitionedModalModel& pm, const SchedulingPoint& p, Index n_flex) {
    pm.domain.check(p);
    require(pm.n_rb > 0, ErrorKind::kRank, "decoupling: the model has no rigid-body modes");
    require(n_flex >= 0, ErrorKind::kDomain, "extended_input_decoupling: n_flex must be non-negative");
    const Index needed = pm.n_rb + n_flex;
    require(pm.inputs() >= needed, ErrorKind::kRank,
            "extended_input_decoupling: " + std::to_string(pm.inputs()) + " actuators cannot decouple " +
                std::to_string(pm.n_rb) + " rigid-body + " + std::to_string(n_flex) + " flexible modes");
    require(n_flex <= pm.n_flex(), ErrorKind::kRank,
            "extended_input_decoupling: n_flex = " + std::to_string(n_flex) + " but only " +
                std::to_string(pm.n_flex()) + " flexible modes are retained");

    DecouplingPair pair;
    pair.p = p;
    pair.n_rb = pm.n_rb;
    pair.n_flex = n_flex;
    const PositionMap stacked = stacked_inputs(pm, n_flex);
    pair.T_u = input_pinv(velocity_rows(stacked.evaluate(p)), "decoupling");

    const Matrix cp = position_cols(pm.C_rb.evaluate(p));
    const PseudoInverse po = pseudo_inverse(cp);
    if (po.rank < cp.cols()) {
        fail(ErrorKind::kRank, "decoupling: rigid-body position output matrix has rank " + std::to_string(po.rank) +
                                   " < " + std::to_string(cp.cols()) + "; unsensed rigid-body directions: " +
                                   describe_directions(po.right_null));
    }
    pair.T_y = po.pinv;
    pair.position_independent = velocity_rows_constant(stacked) && position_cols_constant(pm.C_rb);
    return pair;
}

StateSpace apply_decoupling(const StateSpace& g, const DecouplingPair& pair) {
    require(pair.T_u.rows() == g.inputs() && pair.T_y.cols() == g.outputs(), ErrorKind::kDimension,
            "apply_decoupling: decoupling matrices do not conform to the plant");
    return scale(pair.T_y, g, pair.T_u);
}

PartitionedModalModel apply_decoupling(const PartitionedModalModel& pm, const DecouplingPair& pair) {
    require(pair.T_u.rows() == pm.inputs() && pair.T_y.cols() == pm.outputs(), ErrorKind::kDimension,
            "apply_decoupling: decoupling matrices do not conform to the plant");
    PartitionedModalModel out = pm;
    out.B_rb = pm.B_rb.right_multiply(pair.T_u);
    out.B_fm_r = pm.B_fm_r.right_multiply(pair.T_u);
    out.B_fm_d = pm.B_fm_d.right_multiply(pair.T_u);
    out.C_rb = pm.C_rb.left_multiply(pair.T_y);
    out.C_fm_r = pm.C_fm_r.left_multiply(pair.T_y);
    out.C_fm_d = pm.C_fm_d.left_multiply(pair.T_y);
    return out;
}

DecouplingResidual decoupling_residual(const PartitionedModalModel& pm, const DecouplingPair& pair,
                                       const SchedulingPoint& p) {
    const Matrix bv = velocity_rows(stacked_inputs(pm, pair.n_flex).evaluate(p));
    const Matrix cp = position_cols(pm.C_rb.evaluate(p));
    DecouplingResidual r;
    r.input = (bv * pair.T_u - Matrix::Identity(bv.rows(), bv.rows())).cwiseAbs().maxCoeff();
    r.output = (pair.T_y * cp - Matrix::Identity(cp.cols(), cp.cols())).cwiseAbs().maxCoeff();
    return r;
}

Json to_json(const DecouplingPair& pair) {
    Json j;
    j["T_u"] = matrix_to_json(pair.T_u);
    j["T_y"] = matrix_to_json(pair.T_y);
    j["p_design"] = pair.p;
    j["position_independent"] = pair.position_independent;
    j["n_rb"] = pair.n_rb;
    j["n_flex"] = pair.n_flex;
    return j;
}

}  // namespace mcd
