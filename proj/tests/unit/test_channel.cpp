// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"
#include "uvaa/channel.hpp"
#include "uvaa/star_ris.hpp"

using namespace uvaa;

namespace {

ScenarioConfig defaults() {
  SimConfig cfg = uvaa::testing::config_from("");
  cfg.finalize();
  return cfg.scenario;
}

SwarmState swarm_of(const std::vector<Position3> &pos, double excitation = 1.0) {
  SwarmState s;
  for (const auto &p : pos) {
    UavState u;
    u.position = p;
    u.excitation = excitation;
    s.uavs.push_back(u);
  }
  return s;
}

// Small swarm spread over about two wavelengths around `c`.
SwarmState compact_swarm(int n, double lambda, const Position3 &c, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Position3> pos;
  for (int i = 0; i < n; ++i) {
    pos.push_back(c + Position3{rng.uniform(-lambda, lambda), rng.uniform(-lambda, lambda),
                                rng.uniform(-lambda, lambda)});
  }
  return swarm_of(pos);
}

}  // namespace

TEST(ArrayFactor, SingleElementIsOne) {
  const SwarmState s = swarm_of({{10.0, 20.0, 30.0}});
  for (double th = 0.0; th <= kPi; th += 0.3) {
    for (double ph = -kPi; ph <= kPi; ph += 0.4) {
      const Complex af = array_factor(s, {th, ph}, 0.125);
      EXPECT_NEAR(af.real(), 1.0, 1e-15);
      EXPECT_NEAR(af.imag(), 0.0, 1e-15);
    }
  }
}

TEST(ArrayFactor, QuarterWavePairCancelsEndfire) {
  const double lambda = 0.125;
  const SwarmState s = swarm_of({{-lambda / 4.0, 0.0, 0.0}, {lambda / 4.0, 0.0, 0.0}});
  EXPECT_NEAR(std::abs(array_factor(s, {kPi / 2.0, 0.0}, lambda)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(array_factor(s, {kPi / 2.0, kPi / 2.0}, lambda)), 2.0, 1e-12);
}

TEST(ArrayFactor, BoundedByTotalExcitation) {
  const double lambda = 0.125;
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    SwarmState s = compact_swarm(5, 10.0 * lambda, {0.0, 0.0, 0.0}, 100 + trial);
    double total = 0.0;
    for (auto &u : s.uavs) {
      u.excitation = rng.uniform();
      total += u.excitation;
    }
    const AngleSet a{rng.uniform(0.0, kPi), rng.uniform(-kPi, kPi)};
    EXPECT_LE(std::abs(array_factor(s, a, lambda)), total + 1e-12);
  }
}

TEST(ArrayFactor, CommonPhaseLeavesMagnitudeUnchanged) {
  const double lambda = 0.125;
  const std::vector<Position3> pos{{0.1, 0.0, 0.0}, {-0.05, 0.2, 0.01}, {0.0, -0.1, 0.03}};
  const std::vector<Complex> w{{0.3, 0.0}, {1.0, 0.0}, {0.7, 0.0}};
  std::vector<Complex> rotated;
  for (const auto &x : w) rotated.push_back(x * std::polar(1.0, 1.234));
  for (double th = 0.1; th < kPi; th += 0.5) {
    const AngleSet a{th, 0.7};
    EXPECT_NEAR(std::abs(array_factor(pos, w, a, lambda)), std::abs(array_factor(pos, rotated, a, lambda)), 1e-12);
  }
}

TEST(Steering, DegenerateAndTwoElement) {
  const ComplexVec one = upa_steering({0.3, 0.5, 0.8}, 1, 1, 0.0625, 0.0625, 0.125);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], Complex(1.0, 0.0));

  const ComplexVec two = upa_steering({1.0, 1.0, 1.0}, 2, 1, 0.0625, 0.0625, 0.125);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_NEAR(std::abs(two[0] - Complex(1.0, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(two[1] - std::polar(1.0, -kPi)), 0.0, 1e-15);
}

TEST(Steering, TwoByTwoIsKroneckerProduct) {
  const AngleFactors f{0.6, 0.8, 0.6};
  const double lambda = 0.125;
  const double dr = 0.06;
  const double dc = 0.07;
  const ComplexVec full = upa_steering(f, 2, 2, dr, dc, lambda);
  // Row factor along x, column factor along y.
  const ComplexVec rows = upa_steering(f, 2, 1, dr, dc, lambda);
  const ComplexVec cols = upa_steering(f, 1, 2, dr, dc, lambda);
  ASSERT_EQ(full.size(), 4u);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const Complex expect = rows[r] * cols[c];
      EXPECT_NEAR(std::abs(full[r * 2 + c] - expect), 0.0, 1e-14);
    }
  }
}

TEST(Angles, GeometryCases) {
  const AngleFactors up = aoa_aod_from_geometry({0.0, 0.0, 0.0}, {0.0, 0.0, 10.0});
  EXPECT_DOUBLE_EQ(up.sin_vert, 0.0);
  const AngleFactors east = aoa_aod_from_geometry({1.0, 2.0, 3.0}, {11.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(east.sin_vert, 1.0);
  EXPECT_DOUBLE_EQ(east.cos_horiz, 1.0);
  EXPECT_DOUBLE_EQ(east.sin_horiz, 0.0);
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const Position3 a{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(0, 100)};
    const Position3 b{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(0, 100)};
    const AngleFactors f = aoa_aod_from_geometry(a, b);
    EXPECT_NEAR(f.cos_horiz * f.cos_horiz + f.sin_horiz * f.sin_horiz, 1.0, 1e-12);
    EXPECT_GE(f.sin_vert, 0.0);
    EXPECT_LE(f.sin_vert, 1.0);
    const AngleSet s = direction_angles(a, b);
    EXPECT_NEAR(std::sin(s.theta), f.sin_vert, 1e-12);
  }
  EXPECT_THROW(direction_angles({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}), NumericError);
}

TEST(UvaaRisLink, DistanceScalingAndUniformMagnitude) {
  ScenarioConfig cfg = defaults();
  const Position3 c{1450.0, 1450.0, 75.0};
  const SwarmState s = swarm_of({c});
  const ComplexVec near = link_uvaa_ris(s, cfg);
  const double d = distance(c, cfg.ris_position);
  for (const auto &h : near) EXPECT_NEAR(std::abs(h), std::sqrt(cfg.pathloss_ref) / d, 1e-15);

  const Position3 far = cfg.ris_position + (c - cfg.ris_position) * 2.0;
  const ComplexVec f = link_uvaa_ris(swarm_of({far}), cfg);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(std::abs(f[i]), 0.5 * std::abs(near[i]), 1e-15);
}

TEST(UvaaRisLink, SingleElementMagnitude) {
  SimConfig sim = uvaa::testing::config_from("[ris]\nelements = 1\n");
  sim.finalize();
  const ScenarioConfig &cfg = sim.scenario;
  const SwarmState s = compact_swarm(3, cfg.wavelength(), {1450.0, 1450.0, 70.0}, 3);
  const ComplexVec h = link_uvaa_ris(s, cfg);
  ASSERT_EQ(h.size(), 1u);
  const Position3 c = s.centroid();
  const double af = std::abs(array_factor(s, direction_angles(c, cfg.ris_position), cfg.wavelength()));
  EXPECT_NEAR(std::abs(h[0]), af * std::sqrt(cfg.pathloss_ref) / distance(c, cfg.ris_position), 1e-15);
}

TEST(DirectLink, UnitFadingPowerAndPathLossExponent) {
  ScenarioConfig cfg = defaults();
  const SwarmState s = swarm_of({{0.0, 0.0, 0.0}});
  const int n = 100000;
  Rng rng(5);
  double p1 = 0.0;
  double p10 = 0.0;
  for (int i = 0; i < n; ++i) {
    p1 += std::norm(link_uvaa_user(s, {10.0, 0.0, 0.0}, cfg, rng));
    p10 += std::norm(link_uvaa_user(s, {100.0, 0.0, 0.0}, cfg, rng));
  }
  const double expect1 = cfg.pathloss_ref * std::pow(10.0, -3.6);
  EXPECT_NEAR(p1 / n / expect1, 1.0, 0.02);
  EXPECT_NEAR((p10 / p1), std::pow(10.0, -3.6), 0.04 * std::pow(10.0, -3.6));
}

TEST(DirectLink, SameSeedSameDraw) {
  ScenarioConfig cfg = defaults();
  const SwarmState s = swarm_of({{1450.0, 1450.0, 70.0}});
  Rng a(8);
  Rng b(8);
  EXPECT_EQ(link_uvaa_user(s, {1500.0, 1450.0, 0.0}, cfg, a), link_uvaa_user(s, {1500.0, 1450.0, 0.0}, cfg, b));
}

TEST(RisUserLink, LargeRicianFactorIsLineOfSight) {
  ScenarioConfig cfg = defaults();
  cfg.rician_factor = 1e6;
  const Position3 user{1490.0, 1450.0, 0.0};
  Rng rng(6);
  const ComplexVec h = link_ris_user(user, cfg, rng);
  const double d = distance(cfg.ris_position, user);
  const double pl = std::sqrt(cfg.pathloss_ref * std::pow(d, -cfg.exponent_ris));
  const ComplexVec los = upa_steering(aoa_aod_from_geometry(cfg.ris_position, user), cfg.ris_rows, cfg.ris_cols,
                                      cfg.spacing_row, cfg.spacing_col, cfg.wavelength());
  for (std::size_t s = 0; s < h.size(); ++s) EXPECT_LT(std::abs(h[s] / pl - los[s]), 1e-2);
  EXPECT_LT(std::sqrt(1.0 / (1.0 + cfg.rician_factor)), 1e-3);
}

TEST(RisUserLink, MeanPowerEqualsPathLossForAnyRicianFactor) {
  ScenarioConfig cfg = defaults();
  cfg.ris_elements = 4;
  cfg.ris_rows = 2;
  cfg.ris_cols = 2;
  const Position3 user{1490.0, 1450.0, 0.0};
  const double d = distance(cfg.ris_position, user);
  const double expect = cfg.pathloss_ref * std::pow(d, -cfg.exponent_ris);
  for (double beta : {0.0, 1.9952623149688795, 10.0}) {
    cfg.rician_factor = beta;
    Rng rng(7);
    std::vector<double> power(4, 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const ComplexVec h = link_ris_user(user, cfg, rng);
      for (int s = 0; s < 4; ++s) power[s] += std::norm(h[s]);
    }
    for (int s = 0; s < 4; ++s) EXPECT_NEAR(power[s] / n / expect, 1.0, 0.02) << "beta " << beta;
  }
}

TEST(PatternIntegral, SingleIsotropicElementIsSphereArea) {
  ScenarioConfig cfg = defaults();
  const SwarmState s = swarm_of({{1450.0, 1450.0, 70.0}});
  EXPECT_NEAR(pattern_integral_quadrature(s, cfg, 90, 180) / (4.0 * kPi), 1.0, 0.005);
  EXPECT_NEAR(pattern_integral_isotropic(s, cfg.wavelength()), 4.0 * kPi, 1e-12);
  EXPECT_NEAR(pattern_integral(s, cfg), 4.0 * kPi, 1e-12);
}

TEST(PatternIntegral, ZeroExcitationGivesZero) {
  ScenarioConfig cfg = defaults();
  const SwarmState s = swarm_of({{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}, 0.0);
  EXPECT_EQ(pattern_integral_quadrature(s, cfg, 16, 32), 0.0);
  EXPECT_EQ(pattern_integral_isotropic(s, cfg.wavelength()), 0.0);
}

TEST(PatternIntegral, GridRefinementConverges) {
  ScenarioConfig cfg = defaults();
  for (int n : {2, 4, 8}) {
    const SwarmState s = compact_swarm(n, cfg.wavelength(), {0.0, 0.0, 0.0}, 20 + n);
    const double coarse = pattern_integral_quadrature(s, cfg, 90, 180);
    const double fine = pattern_integral_quadrature(s, cfg, 180, 360);
    EXPECT_LT(std::abs(coarse - fine) / fine, 1e-3) << n << " UAVs";
  }
}

TEST(PatternIntegral, ClosedFormMatchesQuadrature) {
  ScenarioConfig cfg = defaults();
  for (int n : {2, 5, 8}) {
    const SwarmState s = compact_swarm(n, cfg.wavelength(), {0.0, 0.0, 0.0}, 40 + n);
    const double q = pattern_integral_quadrature(s, cfg, 180, 360);
    EXPECT_NEAR(pattern_integral_isotropic(s, cfg.wavelength()) / q, 1.0, 1e-3) << n << " UAVs";
  }
}

TEST(PatternIntegral, DipoleUsesQuadrature) {
  ScenarioConfig cfg = defaults();
  cfg.element_pattern = ElementPattern::dipole;
  const SwarmState s = swarm_of({{0.0, 0.0, 0.0}});
  // Integral of sin^2 over the sphere is 8 pi / 3.
  EXPECT_NEAR(pattern_integral(s, cfg) / (8.0 * kPi / 3.0), 1.0, 1e-3);
}

TEST(PatternIntegral, CoarseGridRejected) {
  ScenarioConfig cfg = defaults();
  EXPECT_THROW(pattern_integral_quadrature(swarm_of({{0, 0, 0}}), cfg, 4, 180), std::invalid_argument);
}

namespace {

ChannelRealization toy_channel() {
  ChannelRealization ch;
  ch.h_ms = {{0.3, -0.2}, {-0.1, 0.5}};
  ch.h_sk = {{0.7, 0.1}, {0.2, -0.4}};
  ch.h_sj = {{-0.6, 0.3}, {0.05, 0.9}};
  ch.h_mk = {0.11, -0.07};
  ch.h_mj = {-0.02, 0.13};
  return ch;
}

}  // namespace

TEST(CompositeGain, MatchesHandExpansion) {
  const ChannelRealization ch = toy_channel();
  StarRisState ris(2);
  ris.set_element(0, {0.3, 1.1, 2.0});
  ris.set_element(1, {0.8, 4.0, 0.4});
  const Complex r0 = std::polar(std::sqrt(0.3), 1.1);
  const Complex r1 = std::polar(std::sqrt(0.8), 4.0);
  const Complex t0 = std::polar(std::sqrt(0.7), 2.0);
  const Complex t1 = std::polar(std::sqrt(0.2), 0.4);
  const Complex sk = ch.h_ms[0] * r0 * ch.h_sk[0] + ch.h_ms[1] * r1 * ch.h_sk[1] + ch.h_mk;
  const Complex sj = ch.h_ms[0] * t0 * ch.h_sj[0] + ch.h_ms[1] * t1 * ch.h_sj[1] + ch.h_mj;
  const double pattern = 3.0;
  EXPECT_NEAR(composite_gain(ch, ris, Side::same, pattern, 1.0), 4.0 * kPi * std::norm(sk) / pattern, 1e-14);
  EXPECT_NEAR(composite_gain(ch, ris, Side::opposite, pattern, 1.0), 4.0 * kPi * std::norm(sj) / pattern, 1e-14);
  EXPECT_NEAR(composite_gain(ch, ris, Side::same, pattern, 0.5),
              0.5 * composite_gain(ch, ris, Side::same, pattern, 1.0), 1e-15);
}

TEST(CompositeGain, ZeroWhenSideIsSilent) {
  ChannelRealization ch = toy_channel();
  ch.h_mk = {0.0, 0.0};
  StarRisState ris(2, {0.0, 0.3, 0.4});  // everything transmitted, nothing reflected
  EXPECT_EQ(composite_gain(ch, ris, Side::same, 1.0, 1.0), 0.0);
  EXPECT_GT(composite_gain(ch, ris, Side::opposite, 1.0, 1.0), 0.0);
  EXPECT_THROW(composite_gain(ch, ris, Side::same, 0.0, 1.0), NumericError);
}

TEST(CompositeGain, NonNegativeOnRandomChannels) {
  ScenarioConfig cfg = defaults();
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const SwarmState s = compact_swarm(3, 20.0, {1450.0, 1450.0, 75.0}, 60 + trial);
    const ChannelRealization ch = draw_channel(s, {1500.0, 1450.0, 0.0}, {1500.0, 1550.0, 0.0}, cfg, rng);
    StarRisState ris(static_cast<std::size_t>(cfg.ris_elements), {rng.uniform(), rng.uniform(0, 6), 1.0});
    const double pattern = pattern_integral(s, cfg);
    EXPECT_GE(composite_gain(ch, ris, Side::same, pattern, 1.0), 0.0);
    EXPECT_GE(composite_gain(ch, ris, Side::opposite, pattern, 1.0), 0.0);
  }
}

TEST(CompositeGain, CommonExcitationPhaseInvariance) {
  // A common unit phase on every UAV multiplies all three UVAA-originated
  // links by the same factor, so the magnitude inside the gain is unchanged.
  const ChannelRealization ch = toy_channel();
  ChannelRealization rotated = ch;
  const Complex w = std::polar(1.0, 0.77);
  for (auto &h : rotated.h_ms) h *= w;
  rotated.h_mk *= w;
  rotated.h_mj *= w;
  StarRisState ris(2, {0.4, 0.5, 1.5});
  EXPECT_NEAR(composite_gain(ch, ris, Side::same, 2.0, 1.0), composite_gain(rotated, ris, Side::same, 2.0, 1.0),
              1e-14);
  EXPECT_NEAR(composite_gain(ch, ris, Side::opposite, 2.0, 1.0),
              composite_gain(rotated, ris, Side::opposite, 2.0, 1.0), 1e-14);
}

TEST(Rate, ClosedFormCases) {
  ScenarioConfig cfg = defaults();
  EXPECT_EQ(system_rate(0.0, 0.0, cfg), 0.0);
  const double unit = cfg.noise_power_w / cfg.transmit_power_w;
  EXPECT_NEAR(system_rate(unit, 0.0, cfg), cfg.bandwidth_hz, 1e-6);
  EXPECT_NEAR(system_rate(3.0 * unit, 3.0 * unit, cfg), 4.0 * cfg.bandwidth_hz, 1e-6);
}

TEST(DrawChannel, DeterministicForSeed) {
  ScenarioConfig cfg = defaults();
  const SwarmState s = compact_swarm(4, 10.0, {1450.0, 1450.0, 75.0}, 1);
  Rng a(12);
  Rng b(12);
  const ChannelRealization x = draw_channel(s, {1500.0, 1450.0, 0.0}, {1500.0, 1550.0, 0.0}, cfg, a);
  const ChannelRealization y = draw_channel(s, {1500.0, 1450.0, 0.0}, {1500.0, 1550.0, 0.0}, cfg, b);
  EXPECT_EQ(x.h_ms, y.h_ms);
  EXPECT_EQ(x.h_sk, y.h_sk);
  EXPECT_EQ(x.h_sj, y.h_sj);
  EXPECT_EQ(x.h_mk, y.h_mk);
  EXPECT_EQ(x.h_mj, y.h_mj);
}
