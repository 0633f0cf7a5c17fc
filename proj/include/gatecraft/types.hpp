#pragma once

#include <cmath>
#include <Eigen/Dense>

#include <complex>
#include <numbers>

namespace gatecraft {

using cplx = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Matrix4c = Eigen::Matrix4cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::remainder(a, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

}  // namespace gatecraft
