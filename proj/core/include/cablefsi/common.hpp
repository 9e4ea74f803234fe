#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace cablefsi {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Index = std::int64_t;

/// Base class of every error raised by the library. The driver maps
/// ConfigError to exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class RefinementError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class StateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

inline Vec3 to_vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

}  // namespace cablefsi
