#pragma once

#include <span>
#include <string>
#include <vector>

#include "mcd/types.hpp"

namespace mcd {

/// Continuous-time LTI model  dx/dt = A x + B u,  y = C x + D u.
struct StateSpace {
    Matrix A;
    Matrix B;
    Matrix C;
    Matrix D;
    std::vector<std::string> input_labels;
    std::vector<std::string> output_labels;

    StateSpace() = default;
    StateSpace(Matrix a, Matrix b, Matrix c, Matrix d);

    /// Static map y = D u.
    static StateSpace gain(const Matrix& d);
    static StateSpace zero(Index outputs, Index inputs);

    Index states() const { return A.rows(); }
    Index inputs() const { return D.cols(); }
    Index outputs() const { return D.rows(); }

    /// Throws Error(kDimension) on non-conformable blocks, Error(kNumeric) on non-finite entries.
    void validate() const;
};

enum class Connection { kSeries, kParallel, kFeedback };

/// first then second: y = second(first(u)).
StateSpace series(const StateSpace& first, const StateSpace& second);
StateSpace parallel(const StateSpace& g1, const StateSpace& g2);
/// Closed loop of forward path g1 with g2 in the return path: u1 = r + sign * g2(y1).
StateSpace feedback(const StateSpace& g1, const StateSpace& g2, int sign = -1);
StateSpace connect(Connection kind, const StateSpace& g1, const StateSpace& g2, int sign = -1);

/// Block-diagonal stacking of independent systems (inputs and outputs concatenated).
StateSpace append(std::span<const StateSpace> systems);

/// Closes a static interconnection around a block-diagonal system G with inputs u, outputs y:
///   u = F y + E w,   z = H y + J w.
/// Returns the map w -> z. Throws Error(kRank) if I - F D is singular.
StateSpace interconnect(const StateSpace& blocks, const Matrix& F, const Matrix& E, const Matrix& H,
                        const Matrix& J);

/// Sub-map from the selected inputs to the selected outputs.
StateSpace subsystem(const StateSpace& g, std::span<const Index> outputs, std::span<const Index> inputs);

/// Left/right multiplication by constant matrices: out * G * in.
StateSpace scale(const Matrix& out, const StateSpace& g, const Matrix& in);

CVector poles(const StateSpace& g);

/// True iff every pole has real part < -margin.
bool is_hurwitz(const StateSpace& g, double margin = 0.0);
bool is_hurwitz(const Matrix& a, double margin = 0.0);

/// Diagonal state similarity improving conditioning of frequency and Hamiltonian computations.
StateSpace balanced(const StateSpace& g);

std::vector<Index> index_range(Index first, Index count);

}  // namespace mcd
