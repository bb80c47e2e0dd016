// SPDX-License-Identifier: Apache-2.0

#include "uvaa/energy.hpp"

#include <algorithm>
#include <cmath>

namespace uvaa {

double derive_blade_power(const AeroParams &p) {
  return p.profile_drag_coeff / 8.0 * p.air_density * p.solidity * p.disc_area * std::pow(p.tip_speed, 3);
}

double derive_induced_power(const AeroParams &p) {
  const double weight = p.mass_kg * p.gravity;
  return (1.0 + p.induced_correction) * std::pow(weight, 1.5) / std::sqrt(2.0 * p.air_density * p.disc_area);
}

namespace {

double blade_power(const AeroParams &p) { return p.blade_power_w > 0.0 ? p.blade_power_w : derive_blade_power(p); }
double induced_power(const AeroParams &p) {
  return p.induced_power_w > 0.0 ? p.induced_power_w : derive_induced_power(p);
}

}  // namespace

double propulsion_power(double v, const AeroParams &p) {
  const double v2 = v * v;
  const double vt2 = p.tip_speed * p.tip_speed;
  const double v02 = p.induced_velocity * p.induced_velocity;
  const double blade = blade_power(p) * (1.0 + 3.0 * v2 / vt2);
  const double inner = std::sqrt(1.0 + v2 * v2 / (4.0 * v02 * v02)) - v2 / (2.0 * v02);
  const double induced = induced_power(p) * std::sqrt(inner);
  const double parasite = 0.5 * p.drag_ratio * p.air_density * p.solidity * p.disc_area * v2 * v;
  return blade + induced + parasite;
}

double propulsion_power_derivative(double v, const AeroParams &p) {
  const double v2 = v * v;
  const double vt2 = p.tip_speed * p.tip_speed;
  const double v02 = p.induced_velocity * p.induced_velocity;
  const double root = std::sqrt(1.0 + v2 * v2 / (4.0 * v02 * v02));
  const double inner = root - v2 / (2.0 * v02);
  // d(inner)/dv = v^3 / (2 v0^4 root) - v / v0^2
  const double d_inner = v2 * v / (2.0 * v02 * v02 * root) - v / v02;
  return blade_power(p) * 6.0 * v / vt2 + induced_power(p) * 0.5 * d_inner / std::sqrt(inner) +
         1.5 * p.drag_ratio * p.air_density * p.solidity * p.disc_area * v2;
}

double flight_energy_unclamped(double v_now, double mean_v_now, double mean_v_prev, double z_now, double z_prev,
                               double slot_seconds, const AeroParams &p) {
  return propulsion_power(v_now, p) * slot_seconds +
         0.5 * p.mass_kg * (mean_v_now * mean_v_now - mean_v_prev * mean_v_prev) +
         p.mass_kg * p.gravity * (z_now - z_prev);
}

double flight_energy(double v_now, double mean_v_now, double mean_v_prev, double z_now, double z_prev,
                     double slot_seconds, const AeroParams &p) {
  return std::max(0.0, flight_energy_unclamped(v_now, mean_v_now, mean_v_prev, z_now, z_prev, slot_seconds, p));
}

double energy_optimal_speed(const AeroParams &p, double v_max) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = 0.0;
  double b = std::max(v_max, 0.0);
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = propulsion_power(c, p);
  double fd = propulsion_power(d, p);
  while (b - a > 1e-4) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = propulsion_power(c, p);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = propulsion_power(d, p);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace uvaa
