#pragma once

#include <map>
#include <string>
#include <vector>

#include "mcd/statespace.hpp"

namespace mcd {

/// gain * signal; an empty gain means identity.
struct Term {
    std::string signal;
    Matrix gain;
};

/// Signal-flow description of an interconnection of LTI blocks. Every block input is a sum
/// of terms over external inputs and block outputs; build() closes all internal connections.
class Diagram {
public:
    void input(const std::string& name, Index dim);
    /// Adds block g; its output becomes the signal `name`, its input is the sum of `in`.
    void block(const std::string& name, const StateSpace& g, std::vector<Term> in);
    void output(const std::string& name, std::vector<Term> terms);

    Index dim(const std::string& signal) const;

    /// Map from the listed external inputs to the listed outputs (in the given order).
    StateSpace build(const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) const;

private:
    struct Block {
        std::string name;
        StateSpace g;
        std::vector<Term> in;
    };
    struct Output {
        std::string name;
        std::vector<Term> terms;
    };
    std::vector<std::pair<std::string, Index>> inputs_;
    std::vector<Block> blocks_;
    std::vector<Output> outputs_;
    std::map<std::string, Index> dims_;
};

}  // namespace mcd
