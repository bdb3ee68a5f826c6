#ifndef TZLAB_MATRIX_HPP
#define TZLAB_MATRIX_HPP

#include <Eigen/Dense>
#include <complex>

#include "tzlab/errors.hpp"

namespace tzlab {

using cdouble = std::complex<double>;
using Mat3c = Eigen::Matrix3cd;
using Vec3c = Eigen::Vector3cd;
using RowVec3c = Eigen::Matrix<cdouble, 1, 3>;
using Vec3d = Eigen::Vector3d;

inline double max_abs(const Mat3c& m) { return m.cwiseAbs().maxCoeff(); }
inline double max_abs(const Vec3c& v) { return v.cwiseAbs().maxCoeff(); }
inline double max_abs(const RowVec3c& v) { return v.cwiseAbs().maxCoeff(); }

// Inverse with a scale-aware singularity guard: |det| > 1e-12 * ||M||^3.
inline Mat3c inverse_checked(const Mat3c& m) {
    const double scale = m.cwiseAbs().maxCoeff();
    const cdouble det = m.determinant();
    if (std::abs(det) <= 1e-12 * scale * scale * scale)
        throw SingularMatrix("3x3 inverse: |det| below scale-aware threshold");
    return m.inverse();
}

inline double max_imag(const Mat3c& m) { return m.imag().cwiseAbs().maxCoeff(); }
inline double max_imag(const Vec3c& v) { return v.imag().cwiseAbs().maxCoeff(); }

} // namespace tzlab

#endif // TZLAB_MATRIX_HPP
