#include "mcd/statespace.hpp"

#include <numeric>
#include <sstream>

#include "mcd/error.hpp"
#include "mcd/linalg.hpp"

namespace mcd {

namespace {

std::string shape(const Matrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

}  // namespace

StateSpace::StateSpace(Matrix a, Matrix b, Matrix c, Matrix d)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)) {
    validate();
}

StateSpace StateSpace::gain(const Matrix& d) {
    return StateSpace(Matrix(0, 0), Matrix(0, d.cols()), Matrix(d.rows(), 0), d);
}

StateSpace StateSpace::zero(Index outputs, Index inputs) {
    return gain(Matrix::Zero(outputs, inputs));
}

void StateSpace::validate() const {
    const Index n = A.rows();
    require(A.cols() == n, ErrorKind::kDimension, "A must be square, got " + shape(A));
    require(B.rows() == n, ErrorKind::kDimension, "B rows must equal A rows, got " + shape(B));
    require(C.cols() == n, ErrorKind::kDimension, "C cols must equal A rows, got " + shape(C));
    require(D.rows() == C.rows() && D.cols() == B.cols(), ErrorKind::kDimension,
            "D must be " + std::to_string(C.rows()) + "x" + std::to_string(B.cols()) + ", got " + shape(D));
    require(A.allFinite() && B.allFinite() && C.allFinite() && D.allFinite(), ErrorKind::kNumeric,
            "state-space matrices contain non-finite entries");
    require(input_labels.empty() || static_cast<Index>(input_labels.size()) == B.cols(), ErrorKind::kDimension,
            "input label count mismatch");
    require(output_labels.empty() || static_cast<Index>(output_labels.size()) == C.rows(),
            ErrorKind::kDimension, "output label count mismatch");
}

StateSpace series(const StateSpace& first, const StateSpace& second) {
    require(first.outputs() == second.inputs(), ErrorKind::kDimension,
            "series: first has " + std::to_string(first.outputs()) + " outputs, second has " +
                std::to_string(second.inputs()) + " inputs");
    const Index n1 = first.states();
    const Index n2 = second.states();
    Matrix a = Matrix::Zero(n1 + n2, n1 + n2);
    a.topLeftCorner(n1, n1) = first.A;
    a.bottomLeftCorner(n2, n1) = second.B * first.C;
    a.bottomRightCorner(n2, n2) = second.A;
    Matrix b(n1 + n2, first.inputs());
    b << first.B, second.B * first.D;
    Matrix c(second.outputs(), n1 + n2);
    c << second.D * first.C, second.C;
    StateSpace out(a, b, c, second.D * first.D);
    out.input_labels = first.input_labels;
    out.output_labels = second.output_labels;
    return out;
}

StateSpace parallel(const StateSpace& g1, const StateSpace& g2) {
    require(g1.inputs() == g2.inputs() && g1.outputs() == g2.outputs(), ErrorKind::kDimension,
            "parallel: systems must have equal input and output counts");
    const Index n1 = g1.states();
    const Index n2 = g2.states();
    Matrix a = Matrix::Zero(n1 + n2, n1 + n2);
    a.topLeftCorner(n1, n1) = g1.A;
    a.bottomRightCorner(n2, n2) = g2.A;
    Matrix b(n1 + n2, g1.inputs());
    b << g1.B, g2.B;
    Matrix c(g1.outputs(), n1 + n2);
    c << g1.C, g2.C;
    return StateSpace(a, b, c, g1.D + g2.D);
}

StateSpace append(std::span<const StateSpace> systems) {
    Index n = 0;
    Index m = 0;
    Index p = 0;
    for (const auto& g : systems) {
        n += g.states();
        m += g.inputs();
        p += g.outputs();
    }
    Matrix a = Matrix::Zero(n, n);
    Matrix b = Matrix::Zero(n, m);
    Matrix c = Matrix::Zero(p, n);
    Matrix d = Matrix::Zero(p, m);
    Index on = 0;
    Index om = 0;
    Index op = 0;
    for (const auto& g : systems) {
        a.block(on, on, g.states(), g.states()) = g.A;
        b.block(on, om, g.states(), g.inputs()) = g.B;
        c.block(op, on, g.outputs(), g.states()) = g.C;
        d.block(op, om, g.outputs(), g.inputs()) = g.D;
        on += g.states();
        om += g.inputs();
        op += g.outputs();
    }
    return StateSpace(a, b, c, d);
}

StateSpace interconnect(const StateSpace& blocks, const Matrix& F, const Matrix& E, const Matrix& H,
                        const Matrix& J) {
    const Index m = blocks.inputs();
    const Index p = blocks.outputs();
    require(F.rows() == m && F.cols() == p, ErrorKind::kDimension, "interconnect: F must be inputs x outputs");
    require(E.rows() == m, ErrorKind::kDimension, "interconnect: E must have one row per block input");
    require(H.cols() == p, ErrorKind::kDimension, "interconnect: H must have one column per block output");
    require(J.rows() == H.rows() && J.cols() == E.cols(), ErrorKind::kDimension,
            "interconnect: J must be exogenous outputs x exogenous inputs");

    // u = F (C x + D u) + E w  =>  (I - F D) u = F C x + E w
    const Matrix loop = Matrix::Identity(m, m) - F * blocks.D;
    Eigen::FullPivLU<Matrix> lu(loop);
    require(m == 0 || lu.isInvertible(), ErrorKind::kRank, "interconnect: singular algebraic loop (I - F D)");
    const Matrix ux = m == 0 ? Matrix(0, blocks.states()) : Matrix(lu.solve(F * blocks.C));
    const Matrix uw = m == 0 ? Matrix(0, E.cols()) : Matrix(lu.solve(E));
    // y = C x + D u
    const Matrix yx = blocks.C + blocks.D * ux;
    const Matrix yw = blocks.D * uw;
    return StateSpace(blocks.A + blocks.B * ux, blocks.B * uw, H * yx, H * yw + J);
}

StateSpace feedback(const StateSpace& g1, const StateSpace& g2, int sign) {
    require(g2.inputs() == g1.outputs() && g2.outputs() == g1.inputs(), ErrorKind::kDimension,
            "feedback: return path must map outputs of the forward path to its inputs");
    require(sign == 1 || sign == -1, ErrorKind::kDomain, "feedback: sign must be +1 or -1");
    const Index m1 = g1.inputs();
    const Index p1 = g1.outputs();
    const StateSpace parts[] = {g1, g2};
    const StateSpace blocks = append(parts);
    // block inputs [u1; u2], outputs [y1; y2]
    Matrix F = Matrix::Zero(m1 + p1, p1 + m1);
    F.block(0, p1, m1, m1) = sign * Matrix::Identity(m1, m1);
    F.block(m1, 0, p1, p1) = Matrix::Identity(p1, p1);
    Matrix E = Matrix::Zero(m1 + p1, m1);
    E.topRows(m1) = Matrix::Identity(m1, m1);
    Matrix H = Matrix::Zero(p1, p1 + m1);
    H.leftCols(p1) = Matrix::Identity(p1, p1);
    return interconnect(blocks, F, E, H, Matrix::Zero(p1, m1));
}

StateSpace connect(Connection kind, const StateSpace& g1, const StateSpace& g2, int sign) {
    switch (kind) {
        case Connection::kSeries:
            return series(g1, g2);
        case Connection::kParallel:
            return parallel(g1, g2);
        case Connection::kFeedback:
            return feedback(g1, g2, sign);
    }
    fail(ErrorKind::kDomain, "connect: unknown connection kind");
}

StateSpace subsystem(const StateSpace& g, std::span<const Index> outputs, std::span<const Index> inputs) {
    Matrix b(g.states(), static_cast<Index>(inputs.size()));
    Matrix c(static_cast<Index>(outputs.size()), g.states());
    Matrix d(static_cast<Index>(outputs.size()), static_cast<Index>(inputs.size()));
    for (std::size_t j = 0; j < inputs.size(); ++j) {
        require(inputs[j] >= 0 && inputs[j] < g.inputs(), ErrorKind::kDimension, "subsystem: input index out of range");
        b.col(static_cast<Index>(j)) = g.B.col(inputs[j]);
    }
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        require(outputs[i] >= 0 && outputs[i] < g.outputs(), ErrorKind::kDimension,
                "subsystem: output index out of range");
        c.row(static_cast<Index>(i)) = g.C.row(outputs[i]);
        for (std::size_t j = 0; j < inputs.size(); ++j) {
            d(static_cast<Index>(i), static_cast<Index>(j)) = g.D(outputs[i], inputs[j]);
        }
    }
    return StateSpace(g.A, b, c, d);
}

StateSpace scale(const Matrix& out, const StateSpace& g, const Matrix& in) {
    require(out.cols() == g.outputs() && in.rows() == g.inputs(), ErrorKind::kDimension,
            "scale: non-conformable scaling matrices");
    return StateSpace(g.A, g.B * in, out * g.C, out * g.D * in);
}

CVector poles(const StateSpace& g) {
    return eigenvalues(g.A);
}

bool is_hurwitz(const Matrix& a, double margin) {
    if (a.rows() == 0) {
        return true;
    }
    return spectral_abscissa(a) < -margin;
}

bool is_hurwitz(const StateSpace& g, double margin) {
    return is_hurwitz(g.A, margin);
}

StateSpace balanced(const StateSpace& g) {
    const Vector d = balancing_scale(g.A);
    const Vector dinv = d.cwiseInverse();
    StateSpace out(dinv.asDiagonal() * g.A * d.asDiagonal(), dinv.asDiagonal() * g.B, g.C * d.asDiagonal(), g.D);
    out.input_labels = g.input_labels;
    out.output_labels = g.output_labels;
    return out;
}

std::vector<Index> index_range(Index first, Index count) {
    std::vector<Index> idx(static_cast<std::size_t>(count));
    std::iota(idx.begin(), idx.end(), first);
    return idx;
}

}  // namespace mcd
