// SPDX-License-Identifier: Apache-2.0
//
// Electromagnetic model: array factor of the UAV virtual antenna array, UPA
// steering vectors of the STAR-RIS, the three link types, the radiated-power
// normalisation integral, composite user gains and the sum rate.
//
// Angle convention. For a direction vector d = dst - src:
//   theta = polar angle from +z, in [0, pi]      (acos(d_z / |d|))
//   phi   = azimuth in the x-y plane, (-pi, pi]  (atan2(d_y, d_x))
// The array factor uses the unit vector (sin theta cos phi, sin theta sin phi,
// cos theta). The STAR-RIS steering vectors use the factor triple
// (sin theta, cos phi, sin phi) measured from the RIS towards the far end of
// the link, so rows run along x and columns along y.

#pragma once

#include <span>

#include "uvaa/config.hpp"
#include "uvaa/rng.hpp"
#include "uvaa/scenario.hpp"
#include "uvaa/types.hpp"

namespace uvaa {

struct AngleSet {
  double theta = 0.0;  // polar
  double phi = 0.0;    // azimuth
};

struct AngleFactors {
  double sin_vert = 0.0;
  double cos_horiz = 1.0;
  double sin_horiz = 0.0;
};

AngleSet direction_angles(const Position3 &src, const Position3 &dst);
AngleFactors aoa_aod_from_geometry(const Position3 &src, const Position3 &dst);

// Sum_m w_m exp(j k (r_m . u(angle))) for positions already relative to the
// array reference point. Complex weights allow phase-invariance checks.
Complex array_factor(std::span<const Position3> rel_positions, std::span<const Complex> weights,
                     const AngleSet &angle, double wavelength);

// Array factor of the swarm with real excitations, positions taken relative
// to the swarm centroid.
Complex array_factor(const SwarmState &swarm, const AngleSet &angle, double wavelength);

ComplexVec upa_steering(const AngleFactors &f, int rows, int cols, double spacing_row, double spacing_col,
                        double wavelength);

struct ChannelRealization {
  ComplexVec h_ms;
  ComplexVec h_sk;
  ComplexVec h_sj;
  Complex h_mk;
  Complex h_mj;

  AngleSet to_ris;  // AF angles, UVAA centroid -> RIS
  AngleSet to_k;
  AngleSet to_j;
  AngleFactors aoa_ms;  // at the RIS, towards the UVAA
  AngleFactors aod_sk;
  AngleFactors aod_sj;

  Complex fading_mk;
  Complex fading_mj;
  ComplexVec nlos_k;
  ComplexVec nlos_j;
};

// LoS UVAA -> RIS link. Deterministic.
ComplexVec link_uvaa_ris(const SwarmState &swarm, const ScenarioConfig &cfg);

// Rayleigh UVAA -> user link with a single fading draw from `rng`.
Complex link_uvaa_user(const SwarmState &swarm, const Position3 &user, const ScenarioConfig &cfg, Rng &rng,
                       Complex *fading_out = nullptr);

// Rician RIS -> user link; draws N_S NLoS coefficients from `rng`.
ComplexVec link_ris_user(const Position3 &user, const ScenarioConfig &cfg, Rng &rng,
                         ComplexVec *nlos_out = nullptr);

// Draw order: h_mk fading, h_mj fading, NLoS towards K, NLoS towards J.
ChannelRealization draw_channel(const SwarmState &swarm, const Position3 &user_k, const Position3 &user_j,
                                const ScenarioConfig &cfg, Rng &rng);

// Midpoint-rule value of the integral of |AF|^2 w^2 sin(theta) over the sphere.
double pattern_integral_quadrature(const SwarmState &swarm, const ScenarioConfig &cfg, int n_theta, int n_phi);

// Closed form for isotropic elements: 4 pi sum_mn I_m I_n sinc(k |r_m - r_n|).
double pattern_integral_isotropic(const SwarmState &swarm, double wavelength);

// Dispatches on cfg.pattern_method; `automatic` uses the closed form when the
// element pattern is isotropic and the quadrature otherwise.
double pattern_integral(const SwarmState &swarm, const ScenarioConfig &cfg);

double element_pattern(ElementPattern pattern, double theta, double phi);

class StarRisState;

// G = 4 pi |h_ms^T Theta h_su + h_direct|^2 / pattern * eta.
double composite_gain(const ChannelRealization &chan, const StarRisState &ris, Side side, double pattern_value,
                      double efficiency);

// The complex amplitude inside |.|^2 of the composite gain.
Complex composite_amplitude(const ChannelRealization &chan, const StarRisState &ris, Side side);

double system_rate(double gain_k, double gain_j, const ScenarioConfig &cfg);
double side_rate(double gain, const ScenarioConfig &cfg);

}  // namespace uvaa
