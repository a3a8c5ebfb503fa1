#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>
#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace fbms {

/// 113-bit binary float. The sweepout schedules put geometric features at
/// scales far below double resolution (eps0 ~ 1e-23 for g = 5), so mesh
/// construction is templated on the scalar and instantiated with this type.
using Quad = boost::multiprecision::float128;

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

using Vec3d = Vec3<double>;
using Vec3q = Vec3<Quad>;

template <typename Scalar>
inline Scalar pi() {
    return boost::math::constants::pi<Scalar>();
}

template <typename Scalar>
inline double to_double(const Scalar& x) {
    return static_cast<double>(x);
}

template <typename To, typename From>
inline Vec3<To> cast_vec(const Vec3<From>& v) {
    return Vec3<To>(static_cast<To>(v.x()), static_cast<To>(v.y()), static_cast<To>(v.z()));
}

/// asinh without relying on boost's float128 overload (broken on some
/// boost releases). Accurate for all real x.
template <typename Scalar>
inline Scalar safe_asinh(const Scalar& x) {
    using std::abs;
    using std::log;
    using std::sqrt;
    using std::log1p;
    const Scalar a = abs(x);
    // log1p form keeps relative accuracy for small arguments
    const Scalar r = log1p(a + a * a / (Scalar(1) + sqrt(Scalar(1) + a * a)));
    return x < Scalar(0) ? -r : r;
}

template <typename Scalar>
inline Scalar safe_acosh(const Scalar& x) {
    using std::log;
    using std::sqrt;
    return log(x + sqrt((x - Scalar(1)) * (x + Scalar(1))));
}

template <typename Scalar>
inline Scalar epsilon() {
    return std::numeric_limits<Scalar>::epsilon();
}

}  // namespace fbms
