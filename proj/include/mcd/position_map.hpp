#pragma once

#include <array>
#include <vector>

#include "mcd/types.hpp"

namespace mcd {

/// Axis-aligned box of admissible scheduling values.
struct Domain {
    std::vector<std::array<double, 2>> box;

    std::size_t dims() const { return box.size(); }
    bool contains(const SchedulingPoint& p, double rel_tol = 1e-12) const;
    /// Throws Error(kDomain) naming the offending coordinate.
    void check(const SchedulingPoint& p) const;
    SchedulingPoint center() const;
    /// Tensor grid with `per_axis` equally spaced points per coordinate, first axis fastest.
    std::vector<SchedulingPoint> grid(std::size_t per_axis) const;
};

/// Matrix-valued polynomial in the scheduling vector: sum_k p^e_k * C_k.
class PositionMap {
public:
    struct Term {
        std::vector<int> exponents;
        Matrix coeff;
    };

    PositionMap() = default;
    PositionMap(Index rows, Index cols, Domain domain);

    static PositionMap constant(const Matrix& m, Domain domain);

    /// Adds coeff * p^exponents (merged with an existing term of equal exponents).
    void add_term(const std::vector<int>& exponents, const Matrix& coeff);

    /// Throws Error(kDomain) if p lies outside the domain.
    Matrix evaluate(const SchedulingPoint& p) const;

    PositionMap left_multiply(const Matrix& l) const;
    PositionMap right_multiply(const Matrix& r) const;
    /// Rows [first, first + count).
    PositionMap rows_block(Index first, Index count) const;
    PositionMap cols_block(Index first, Index count) const;
    static PositionMap vstack(const std::vector<PositionMap>& parts, Index cols, const Domain& domain);
    static PositionMap hstack(const std::vector<PositionMap>& parts, Index rows, const Domain& domain);

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    const Domain& domain() const { return domain_; }
    const std::vector<Term>& terms() const { return terms_; }
    int degree() const;
    /// True when every non-constant term vanishes.
    bool is_constant() const;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    Domain domain_;
    std::vector<Term> terms_;
};

}  // namespace mcd
