#include "mcd/diagram.hpp"

#include <algorithm>

#include "mcd/error.hpp"

namespace mcd {

void Diagram::input(const std::string& name, Index dim) {
    require(!dims_.count(name), ErrorKind::kDimension, "diagram: duplicate signal " + name);
    inputs_.emplace_back(name, dim);
    dims_[name] = dim;
}

void Diagram::block(const std::string& name, const StateSpace& g, std::vector<Term> in) {
    require(!dims_.count(name), ErrorKind::kDimension, "diagram: duplicate signal " + name);
    blocks_.push_back({name, g, std::move(in)});
    dims_[name] = g.outputs();
}

void Diagram::output(const std::string& name, std::vector<Term> terms) {
    outputs_.push_back({name, std::move(terms)});
}

Index Diagram::dim(const std::string& signal) const {
    const auto it = dims_.find(signal);
    require(it != dims_.end(), ErrorKind::kDimension, "diagram: unknown signal " + signal);
    return it->second;
}

StateSpace Diagram::build(const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) const {
    // offsets of block outputs and of the selected external inputs
    std::map<std::string, Index> y_off;
    Index ny = 0;
    std::vector<StateSpace> systems;
    for (const auto& b : blocks_) {
        y_off[b.name] = ny;
        ny += b.g.outputs();
        systems.push_back(b.g);
    }
    std::map<std::string, Index> w_off;
    Index nw = 0;
    for (const auto& name : inputs) {
        const auto it = std::find_if(inputs_.begin(), inputs_.end(), [&](const auto& e) { return e.first == name; });
        require(it != inputs_.end(), ErrorKind::kDimension, "diagram: unknown external input " + name);
        w_off[name] = nw;
        nw += it->second;
    }
    const StateSpace all = append(systems);

    // Adds the contribution of `terms` into rows [row, row + rows) of (Fy, Fw).
    auto stamp = [&](const std::vector<Term>& terms, Index row, Index rows, Matrix& fy, Matrix& fw) {
        for (const auto& t : terms) {
            const Index d = dim(t.signal);
            const Matrix g = t.gain.size() == 0 ? Matrix(Matrix::Identity(rows, d)) : t.gain;
            require(g.rows() == rows && g.cols() == d, ErrorKind::kDimension,
                    "diagram: gain on signal " + t.signal + " has the wrong shape");
            if (y_off.count(t.signal)) {
                fy.block(row, y_off[t.signal], rows, d) += g;
            } else if (w_off.count(t.signal)) {
                fw.block(row, w_off[t.signal], rows, d) += g;
            }
            // an external input not selected for this build is held at zero
        }
    };

    Matrix F = Matrix::Zero(all.inputs(), ny);
    Matrix E = Matrix::Zero(all.inputs(), nw);
    Index row = 0;
    for (const auto& b : blocks_) {
        stamp(b.in, row, b.g.inputs(), F, E);
        row += b.g.inputs();
    }

    Index nz = 0;
    std::vector<const Output*> sel;
    for (const auto& name : outputs) {
        const auto it = std::find_if(outputs_.begin(), outputs_.end(), [&](const Output& o) { return o.name == name; });
        if (it != outputs_.end()) {
            sel.push_back(&*it);
            nz += it->terms.empty() ? 0 : (it->terms.front().gain.size() ? it->terms.front().gain.rows()
                                                                          : dim(it->terms.front().signal));
        } else {
            // a plain signal may be requested directly as an output
            sel.push_back(nullptr);
            nz += dim(name);
        }
    }
    Matrix H = Matrix::Zero(nz, ny);
    Matrix J = Matrix::Zero(nz, nw);
    Index zr = 0;
    for (std::size_t k = 0; k < outputs.size(); ++k) {
        if (sel[k]) {
            const Index rows = sel[k]->terms.front().gain.size() ? sel[k]->terms.front().gain.rows()
                                                                 : dim(sel[k]->terms.front().signal);
            stamp(sel[k]->terms, zr, rows, H, J);
            zr += rows;
        } else {
            const Index rows = dim(outputs[k]);
            stamp({Term{outputs[k], Matrix()}}, zr, rows, H, J);
            zr += rows;
        }
    }
    return interconnect(all, F, E, H, J);
}

}  // namespace mcd
