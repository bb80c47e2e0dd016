// SPDX-License-Identifier: Apache-2.0
//
// Shared value types and error classes.

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace uvaa {

using Complex = std::complex<double>;
using ComplexVec = std::vector<Complex>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kSpeedOfLight = 299792458.0;

struct Position3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Position3 operator+(const Position3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
  Position3 operator-(const Position3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
  Position3 operator*(double s) const { return {x * s, y * s, z * s}; }
  bool operator==(const Position3 &) const = default;

  double dot(const Position3 &o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double distance(const Position3 &a, const Position3 &b) { return (a - b).norm(); }

// Axis-aligned rectangle in the ground plane.
struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

// Invalid or inconsistent configuration. `key()` names the offending
// config entry (e.g. "radio.transmit_power_w") when one is known.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string &what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string &key() const { return key_; }

 private:
  std::string key_;
};

// Raised when a numerical routine meets a degenerate or non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace uvaa
