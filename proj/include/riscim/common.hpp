#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace riscim {

using Vec3 = Eigen::Vector3d;
using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Free-space wavenumber k0 = 2*pi*f/c.
inline double wavenumber(double frequency_hz) {
  return kTwoPi * frequency_hz / kSpeedOfLight;
}

/// Wrap a phase to (-pi, pi].
inline double wrap_phase(double x) {
  double w = std::remainder(x, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

/// Invalid configuration input (file or programmatic).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem / container format failure.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace riscim
