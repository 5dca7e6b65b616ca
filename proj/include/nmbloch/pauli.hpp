// pauli.hpp — fixed 2x2 operator algebra shared by the Bloch generators and the
// channel (Choi) machinery

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace nmbloch::pauli {

using Mat2 = Eigen::Matrix2cd;

inline Mat2 identity() { return Mat2::Identity(); }

inline Mat2 sigma_x() {
    Mat2 m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Mat2 sigma_y() {
    Mat2 m;
    m << std::complex<double>(0, 0), std::complex<double>(0, -1),
         std::complex<double>(0, 1), std::complex<double>(0, 0);
    return m;
}

inline Mat2 sigma_z() {
    Mat2 m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

inline Mat2 sigma_plus() { return 0.5 * (sigma_x() + std::complex<double>(0, 1) * sigma_y()); }
inline Mat2 sigma_minus() { return 0.5 * (sigma_x() - std::complex<double>(0, 1) * sigma_y()); }

// Basis order used throughout: sigma_0 = I, then x, y, z.
inline const std::array<Mat2, 4>& basis() {
    static const std::array<Mat2, 4> b = {identity(), sigma_x(), sigma_y(), sigma_z()};
    return b;
}

} // namespace nmbloch::pauli
