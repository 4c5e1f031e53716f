#include "mcd/filter.hpp"

#include <cmath>

#include "mcd/error.hpp"

namespace mcd {

namespace {

int degree(const std::array<double, 3>& c) {
    if (c[0] != 0.0) {
        return 2;
    }
    if (c[1] != 0.0) {
        return 1;
    }
    return c[2] != 0.0 ? 0 : -1;
}

}  // namespace

int RationalSection::num_degree() const { return degree(num); }
int RationalSection::den_degree() const { return degree(den); }

void RationalSection::validate() const {
    for (int i = 0; i < 3; ++i) {
        require(std::isfinite(num[i]) && std::isfinite(den[i]), ErrorKind::kDomain,
                "rational section: non-finite coefficient");
    }
    require(den_degree() >= 0, ErrorKind::kDomain, "rational section: zero denominator");
    require(num_degree() <= den_degree(), ErrorKind::kDomain, "rational section: improper section");
}

Complex RationalSection::eval(Complex s) const {
    const Complex n = (num[0] * s + num[1]) * s + num[2];
    const Complex d = (den[0] * s + den[1]) * s + den[2];
    return n / d;
}

StateSpace RationalSection::to_state_space() const {
    validate();
    const int order = den_degree();
    const double lead = den[2 - order];
    // normalized coefficients, highest power first
    const double b2 = num[0] / lead;
    const double b1 = num[1] / lead;
    const double b0 = num[2] / lead;
    const double a1 = den[1] / lead;
    const double a0 = den[2] / lead;
    if (order == 0) {
        return StateSpace::gain(Matrix::Constant(1, 1, b0));
    }
    if (order == 1) {
        // (b1 s + b0) / (s + a0)
        const double d = b1;
        return StateSpace(Matrix::Constant(1, 1, -a0), Matrix::Constant(1, 1, 1.0),
                          Matrix::Constant(1, 1, b0 - d * a0), Matrix::Constant(1, 1, d));
    }
    // (b2 s^2 + b1 s + b0) / (s^2 + a1 s + a0), controllable canonical form
    const double d = b2;
    Matrix a(2, 2);
    a << 0.0, 1.0, -a0, -a1;
    Matrix b(2, 1);
    b << 0.0, 1.0;
    Matrix c(1, 2);
    c << b0 - d * a0, b1 - d * a1;
    return StateSpace(a, b, c, Matrix::Constant(1, 1, d));
}

RationalDiagonalFilter::RationalDiagonalFilter(std::vector<std::vector<RationalSection>> channels)
    : channels_(std::move(channels)) {
    for (const auto& ch : channels_) {
        for (const auto& s : ch) {
            s.validate();
        }
    }
}

RationalDiagonalFilter RationalDiagonalFilter::identity(std::size_t n) {
    return constant(Vector::Ones(static_cast<Index>(n)));
}

RationalDiagonalFilter RationalDiagonalFilter::constant(const Vector& gains) {
    std::vector<std::vector<RationalSection>> ch(static_cast<std::size_t>(gains.size()));
    for (Index i = 0; i < gains.size(); ++i) {
        RationalSection s;
        s.num = {0.0, 0.0, gains(i)};
        ch[static_cast<std::size_t>(i)].push_back(s);
    }
    return RationalDiagonalFilter(std::move(ch));
}

Complex RationalDiagonalFilter::eval(std::size_t ch, Complex s) const {
    Complex v(1.0, 0.0);
    for (const auto& sec : channels_.at(ch)) {
        v *= sec.eval(s);
    }
    return v;
}

CMatrix RationalDiagonalFilter::eval(Complex s) const {
    const auto n = static_cast<Index>(channels_.size());
    CMatrix m = CMatrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        m(i, i) = eval(static_cast<std::size_t>(i), s);
    }
    return m;
}

StateSpace RationalDiagonalFilter::to_state_space() const {
    std::vector<StateSpace> per_channel;
    per_channel.reserve(channels_.size());
    for (const auto& ch : channels_) {
        StateSpace g = StateSpace::gain(Matrix::Identity(1, 1));
        for (const auto& sec : ch) {
            g = series(g, sec.to_state_space());
        }
        per_channel.push_back(std::move(g));
    }
    return append(per_channel);
}

}  // namespace mcd
