#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace mcd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;
using Index = Eigen::Index;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// A point in the scheduling domain.
using SchedulingPoint = std::vector<double>;

}  // namespace mcd
