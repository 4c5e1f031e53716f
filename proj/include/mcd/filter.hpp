#pragma once

#include <array>
#include <vector>

#include "mcd/statespace.hpp"

namespace mcd {

/// (b2 s^2 + b1 s + b0) / (a2 s^2 + a1 s + a0). Proper: degree(num) <= degree(den).
struct RationalSection {
    std::array<double, 3> num{0.0, 0.0, 1.0};
    std::array<double, 3> den{0.0, 0.0, 1.0};

    int num_degree() const;
    int den_degree() const;
    Complex eval(Complex s) const;
    StateSpace to_state_space() const;
    void validate() const;
};

/// Diagonal filter: each channel is a cascade of rational sections.
class RationalDiagonalFilter {
public:
    RationalDiagonalFilter() = default;
    explicit RationalDiagonalFilter(std::vector<std::vector<RationalSection>> channels);

    static RationalDiagonalFilter identity(std::size_t n);
    static RationalDiagonalFilter constant(const Vector& gains);

    std::size_t channels() const { return channels_.size(); }
    const std::vector<RationalSection>& sections(std::size_t ch) const { return channels_.at(ch); }

    Complex eval(std::size_t ch, Complex s) const;
    CMatrix eval(Complex s) const;

    StateSpace to_state_space() const;

private:
    std::vector<std::vector<RationalSection>> channels_;
};

}  // namespace mcd
