#pragma once

#include "cablefsi/common.hpp"

#include <cmath>
#include <numbers>

namespace cablefsi::rotation {

template <typename T>
using Vec3T = Eigen::Matrix<T, 3, 1>;
template <typename T>
using Mat3T = Eigen::Matrix<T, 3, 3>;

inline double value_of(double x) { return x; }
template <typename T>
auto value_of(const T& x) -> decltype(x.value()) {
  return x.value();
}

template <typename T>
Mat3T<T> skew(const Vec3T<T>& w) {
  Mat3T<T> s;
  s << T(0), -w.z(), w.y(), w.z(), T(0), -w.x(), -w.y(), w.x(), T(0);
  return s;
}

/// Rodrigues map R(theta) = exp([theta]x); series expansion below 1e-8 rad.
inline Mat3 rotation_matrix(const Vec3& theta) {
  const double angle = theta.norm();
  const Mat3 k = skew<double>(theta);
  if (angle < 1e-8) {
    return Mat3::Identity() + k + 0.5 * k * k;
  }
  const double a = std::sin(angle) / angle;
  const double b = (1.0 - std::cos(angle)) / (angle * angle);
  return Mat3::Identity() + a * k + b * k * k;
}

/// Inverse of rotation_matrix with angle in [0, pi], via the unit quaternion
/// (Shepperd branch selection). Generic so it can be differentiated.
template <typename T>
Vec3T<T> rotation_vector(const Mat3T<T>& m) {
  using std::atan2;
  using std::sqrt;
  const T tr = m(0, 0) + m(1, 1) + m(2, 2);
  T w;
  Vec3T<T> v;
  const double t0 = value_of(tr);
  const double d0 = value_of(m(0, 0));
  const double d1 = value_of(m(1, 1));
  const double d2 = value_of(m(2, 2));
  if (t0 >= d0 && t0 >= d1 && t0 >= d2) {
    const T r = sqrt(T(1) + tr);
    w = T(0.5) * r;
    const T s = T(0.5) / r;
    v << (m(2, 1) - m(1, 2)) * s, (m(0, 2) - m(2, 0)) * s, (m(1, 0) - m(0, 1)) * s;
  } else if (d0 >= d1 && d0 >= d2) {
    const T r = sqrt(T(1) + m(0, 0) - m(1, 1) - m(2, 2));
    const T s = T(0.5) / r;
    v << T(0.5) * r, (m(0, 1) + m(1, 0)) * s, (m(0, 2) + m(2, 0)) * s;
    w = (m(2, 1) - m(1, 2)) * s;
  } else if (d1 >= d2) {
    const T r = sqrt(T(1) + m(1, 1) - m(0, 0) - m(2, 2));
    const T s = T(0.5) / r;
    v << (m(0, 1) + m(1, 0)) * s, T(0.5) * r, (m(1, 2) + m(2, 1)) * s;
    w = (m(0, 2) - m(2, 0)) * s;
  } else {
    const T r = sqrt(T(1) + m(2, 2) - m(0, 0) - m(1, 1));
    const T s = T(0.5) / r;
    v << (m(0, 2) + m(2, 0)) * s, (m(1, 2) + m(2, 1)) * s, T(0.5) * r;
    w = (m(1, 0) - m(0, 1)) * s;
  }
  if (value_of(w) < 0.0) {
    w = -w;
    v = -v;
  }
  const T s2 = v.dot(v);
  T factor;
  if (value_of(s2) < 1e-16) {
    // 2 atan(s / w) / s expanded in s^2; keeps derivatives finite at zero.
    const T inv_w = T(1) / w;
    factor = T(2) * inv_w * (T(1) - s2 * inv_w * inv_w / T(3));
  } else {
    const T s = sqrt(s2);
    factor = T(2) * atan2(s, w) / s;
  }
  return factor * v;
}

/// Equivalent rotation vector (theta + 2 pi k axis) closest to `previous`, so
/// rotation histories stay continuous past an angle of pi.
inline Vec3 unwrap(const Vec3& theta, const Vec3& previous) {
  const double angle = theta.norm();
  Vec3 axis = angle > 1e-12 ? Vec3(theta / angle) : Vec3(previous.normalized());
  if (!axis.allFinite() || axis.norm() < 0.5) return theta;
  Vec3 best = theta;
  double best_dist = (theta - previous).norm();
  for (int k = -3; k <= 3; ++k) {
    if (k == 0) continue;
    const Vec3 candidate = theta + 2.0 * std::numbers::pi * k * axis;
    const double dist = (candidate - previous).norm();
    if (dist < best_dist) {
      best = candidate;
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace cablefsi::rotation
