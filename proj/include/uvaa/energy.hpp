// SPDX-License-Identifier: Apache-2.0
//
// Rotary-wing propulsion power and per-slot flight energy.

#pragma once

#include "uvaa/config.hpp"

namespace uvaa {

// Hover blade-profile power P_B = (delta / 8) rho s A v_tip^3.
double derive_blade_power(const AeroParams &p);
// Hover induced power P_I = (1 + k) W^{3/2} / sqrt(2 rho A), W = m g.
double derive_induced_power(const AeroParams &p);

// Propulsion power [W] at horizontal speed v [m/s]; requires v >= 0.
double propulsion_power(double v, const AeroParams &p);

// dP/dv, closed form.
double propulsion_power_derivative(double v, const AeroParams &p);

// Slot energy [J]: P(v) dt + kinetic change + potential change, floored at 0
// because descent and deceleration do not recharge the battery.
double flight_energy(double v_now, double mean_v_now, double mean_v_prev, double z_now, double z_prev,
                     double slot_seconds, const AeroParams &p);

// Same expression without the floor; used to check energy additivity.
double flight_energy_unclamped(double v_now, double mean_v_now, double mean_v_prev, double z_now, double z_prev,
                               double slot_seconds, const AeroParams &p);

// argmin of propulsion_power over [0, v_max] by golden-section search (1e-3 m/s).
double energy_optimal_speed(const AeroParams &p, double v_max);

}  // namespace uvaa
