// SPDX-License-Identifier: Apache-2.0

#include "uvaa/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "uvaa/star_ris.hpp"

namespace uvaa {

AngleSet direction_angles(const Position3 &src, const Position3 &dst) {
  const Position3 d = dst - src;
  const double r = d.norm();
  if (!(r > 0.0)) throw NumericError("direction_angles: source and destination coincide");
  return {std::acos(std::clamp(d.z / r, -1.0, 1.0)), std::atan2(d.y, d.x)};
}

AngleFactors aoa_aod_from_geometry(const Position3 &src, const Position3 &dst) {
  const Position3 d = dst - src;
  const double r = d.norm();
  if (!(r > 0.0)) throw NumericError("aoa_aod_from_geometry: source and destination coincide");
  const double horiz = std::hypot(d.x, d.y);
  AngleFactors f;
  f.sin_vert = horiz / r;
  if (horiz > 0.0) {
    f.cos_horiz = d.x / horiz;
    f.sin_horiz = d.y / horiz;
  } else {
    // Azimuth is undefined on the vertical axis; atan2(0, 0) = 0.
    f.cos_horiz = 1.0;
    f.sin_horiz = 0.0;
  }
  return f;
}

Complex array_factor(std::span<const Position3> rel_positions, std::span<const Complex> weights,
                     const AngleSet &angle, double wavelength) {
  const double k = kTwoPi / wavelength;
  const double st = std::sin(angle.theta);
  const Position3 u{st * std::cos(angle.phi), st * std::sin(angle.phi), std::cos(angle.theta)};
  Complex af{0.0, 0.0};
  for (std::size_t m = 0; m < rel_positions.size(); ++m) {
    af += weights[m] * std::polar(1.0, k * rel_positions[m].dot(u));
  }
  return af;
}

namespace {

void relative_swarm(const SwarmState &swarm, std::vector<Position3> &rel, std::vector<Complex> &w) {
  const Position3 c = swarm.centroid();
  rel.clear();
  w.clear();
  for (const auto &u : swarm.uavs) {
    rel.push_back(u.position - c);
    w.emplace_back(u.excitation, 0.0);
  }
}

}  // namespace

Complex array_factor(const SwarmState &swarm, const AngleSet &angle, double wavelength) {
  std::vector<Position3> rel;
  std::vector<Complex> w;
  relative_swarm(swarm, rel, w);
  return array_factor(rel, w, angle, wavelength);
}

ComplexVec upa_steering(const AngleFactors &f, int rows, int cols, double spacing_row, double spacing_col,
                        double wavelength) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("upa_steering: rows and cols must be >= 1");
  const double row_step = -kTwoPi * spacing_row / wavelength * f.cos_horiz * f.sin_vert;
  const double col_step = -kTwoPi * spacing_col / wavelength * f.sin_horiz * f.sin_vert;
  ComplexVec out(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    const Complex a = std::polar(1.0, row_step * r);
    for (int c = 0; c < cols; ++c) {
      out[static_cast<std::size_t>(r) * cols + c] = a * std::polar(1.0, col_step * c);
    }
  }
  return out;
}

ComplexVec link_uvaa_ris(const SwarmState &swarm, const ScenarioConfig &cfg) {
  const Position3 c = swarm.centroid();
  const double d = distance(c, cfg.ris_position);
  if (!(d > 0.0)) throw NumericError("link_uvaa_ris: UVAA centroid coincides with the RIS");
  const Complex af = array_factor(swarm, direction_angles(c, cfg.ris_position), cfg.wavelength());
  const double pl = std::sqrt(cfg.pathloss_ref / (d * d));
  ComplexVec h = upa_steering(aoa_aod_from_geometry(cfg.ris_position, c), cfg.ris_rows, cfg.ris_cols,
                              cfg.spacing_row, cfg.spacing_col, cfg.wavelength());
  for (auto &v : h) v *= af * pl;
  return h;
}

Complex link_uvaa_user(const SwarmState &swarm, const Position3 &user, const ScenarioConfig &cfg, Rng &rng,
                       Complex *fading_out) {
  const Position3 c = swarm.centroid();
  const double d = distance(c, user);
  const Complex fading = rng.complex_normal();
  if (fading_out) *fading_out = fading;
  if (!(d > 0.0)) throw NumericError("link_uvaa_user: UVAA centroid coincides with the user");
  const Complex af = array_factor(swarm, direction_angles(c, user), cfg.wavelength());
  return af * std::sqrt(cfg.pathloss_ref * std::pow(d, -cfg.exponent_direct)) * fading;
}

ComplexVec link_ris_user(const Position3 &user, const ScenarioConfig &cfg, Rng &rng, ComplexVec *nlos_out) {
  const std::size_t n = static_cast<std::size_t>(cfg.ris_elements);
  ComplexVec nlos(n);
  for (auto &v : nlos) v = rng.complex_normal();
  if (nlos_out) *nlos_out = nlos;
  const double d = distance(cfg.ris_position, user);
  if (!(d > 0.0)) throw NumericError("link_ris_user: user coincides with the RIS");
  const double beta = cfg.rician_factor;
  const double w_los = std::sqrt(beta / (1.0 + beta));
  const double w_nlos = std::sqrt(1.0 / (1.0 + beta));
  const double pl = std::sqrt(cfg.pathloss_ref * std::pow(d, -cfg.exponent_ris));
  ComplexVec h = upa_steering(aoa_aod_from_geometry(cfg.ris_position, user), cfg.ris_rows, cfg.ris_cols,
                              cfg.spacing_row, cfg.spacing_col, cfg.wavelength());
  for (std::size_t s = 0; s < n; ++s) h[s] = pl * (w_los * h[s] + w_nlos * nlos[s]);
  return h;
}

ChannelRealization draw_channel(const SwarmState &swarm, const Position3 &user_k, const Position3 &user_j,
                                const ScenarioConfig &cfg, Rng &rng) {
  ChannelRealization ch;
  const Position3 c = swarm.centroid();
  ch.to_ris = direction_angles(c, cfg.ris_position);
  ch.to_k = direction_angles(c, user_k);
  ch.to_j = direction_angles(c, user_j);
  ch.aoa_ms = aoa_aod_from_geometry(cfg.ris_position, c);
  ch.aod_sk = aoa_aod_from_geometry(cfg.ris_position, user_k);
  ch.aod_sj = aoa_aod_from_geometry(cfg.ris_position, user_j);
  ch.h_ms = link_uvaa_ris(swarm, cfg);
  ch.h_mk = link_uvaa_user(swarm, user_k, cfg, rng, &ch.fading_mk);
  ch.h_mj = link_uvaa_user(swarm, user_j, cfg, rng, &ch.fading_mj);
  ch.h_sk = link_ris_user(user_k, cfg, rng, &ch.nlos_k);
  ch.h_sj = link_ris_user(user_j, cfg, rng, &ch.nlos_j);
  return ch;
}

double element_pattern(ElementPattern pattern, double theta, double /*phi*/) {
  switch (pattern) {
    case ElementPattern::isotropic:
      return 1.0;
    case ElementPattern::dipole:
      return std::sin(theta);
  }
  return 1.0;
}

double pattern_integral_quadrature(const SwarmState &swarm, const ScenarioConfig &cfg, int n_theta, int n_phi) {
  if (n_theta < 8 || n_phi < 8) throw std::invalid_argument("pattern_integral: grid too coarse (N_theta < 8)");
  std::vector<Position3> rel;
  std::vector<Complex> w;
  relative_swarm(swarm, rel, w);
  const double dtheta = kPi / n_theta;
  const double dphi = kTwoPi / n_phi;
  const double lambda = cfg.wavelength();
  double total = 0.0;
  for (int i = 0; i < n_theta; ++i) {
    const double theta = (i + 0.5) * dtheta;
    const double st = std::sin(theta);
    double ring = 0.0;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = (j + 0.5) * dphi;
      const double wp = element_pattern(cfg.element_pattern, theta, phi);
      ring += std::norm(array_factor(rel, w, {theta, phi}, lambda)) * wp * wp;
    }
    total += ring * st;
  }
  return total * dtheta * dphi;
}

double pattern_integral_isotropic(const SwarmState &swarm, double wavelength) {
  const double k = kTwoPi / wavelength;
  const auto &u = swarm.uavs;
  double sum = 0.0;
  for (std::size_t m = 0; m < u.size(); ++m) {
    sum += u[m].excitation * u[m].excitation;
    for (std::size_t n = m + 1; n < u.size(); ++n) {
      const double x = k * distance(u[m].position, u[n].position);
      const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
      sum += 2.0 * u[m].excitation * u[n].excitation * sinc;
    }
  }
  return 4.0 * kPi * sum;
}

double pattern_integral(const SwarmState &swarm, const ScenarioConfig &cfg) {
  if (cfg.pattern_method == PatternMethod::automatic && cfg.element_pattern == ElementPattern::isotropic) {
    return pattern_integral_isotropic(swarm, cfg.wavelength());
  }
  return pattern_integral_quadrature(swarm, cfg, cfg.quadrature_theta, cfg.quadrature_phi);
}

Complex composite_amplitude(const ChannelRealization &chan, const StarRisState &ris, Side side) {
  const bool same = side == Side::same;
  const ComplexVec &h_su = same ? chan.h_sk : chan.h_sj;
  Complex acc = same ? chan.h_mk : chan.h_mj;
  for (std::size_t s = 0; s < chan.h_ms.size(); ++s) {
    const ElementCoeff c = ris.element(s);
    const Complex theta = same ? reflection_coeff(c) : transmission_coeff(c);
    acc += chan.h_ms[s] * theta * h_su[s];
  }
  return acc;
}

double composite_gain(const ChannelRealization &chan, const StarRisState &ris, Side side, double pattern_value,
                      double efficiency) {
  if (!(pattern_value > 0.0)) throw NumericError("composite_gain: pattern integral is zero");
  return 4.0 * kPi * std::norm(composite_amplitude(chan, ris, side)) / pattern_value * efficiency;
}

double side_rate(double gain, const ScenarioConfig &cfg) {
  return cfg.bandwidth_hz * std::log2(1.0 + cfg.transmit_power_w * gain / cfg.noise_power_w);
}

double system_rate(double gain_k, double gain_j, const ScenarioConfig &cfg) {
  return side_rate(gain_k, cfg) + side_rate(gain_j, cfg);
}

}  // namespace uvaa
