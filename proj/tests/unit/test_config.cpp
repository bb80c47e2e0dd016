// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "uvaa/config.hpp"
#include "uvaa/energy.hpp"

using namespace uvaa;

namespace {

SimConfig finalized(const std::string &toml) {
  SimConfig cfg = parse_config(toml);
  cfg.finalize();
  return cfg;
}

std::string config_error_key(const std::string &toml) {
  try {
    finalized(toml);
  } catch (const ConfigError &e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST(Config, EmptyFileGivesDocumentedDefaults) {
  const SimConfig cfg = finalized("");
  const ScenarioConfig &s = cfg.scenario;
  EXPECT_EQ(s.num_uavs, 8);
  EXPECT_EQ(s.ris_elements, 60);
  EXPECT_EQ(s.ris_rows, 6);
  EXPECT_EQ(s.ris_cols, 10);
  EXPECT_DOUBLE_EQ(s.carrier_hz, 2.4e9);
  EXPECT_DOUBLE_EQ(s.spacing_row, 0.5 * kSpeedOfLight / 2.4e9);
  EXPECT_DOUBLE_EQ(s.spacing_col, s.spacing_row);
  EXPECT_DOUBLE_EQ(s.d_min, 0.5);
  EXPECT_DOUBLE_EQ(s.h_min, 60.0);
  EXPECT_DOUBLE_EQ(s.h_max, 90.0);
  EXPECT_DOUBLE_EQ(s.exponent_direct, 3.6);
  EXPECT_DOUBLE_EQ(s.exponent_ris, 2.7);
  EXPECT_NEAR(10.0 * std::log10(s.rician_factor), 3.0, 1e-12);
  // -155 dBm/Hz over 2 MHz
  EXPECT_NEAR(s.noise_power_w, std::pow(10.0, -18.5) * 2e6, 1e-25);
  EXPECT_EQ(s.slots_per_episode, 100);
  EXPECT_EQ(cfg.reward.t_max, 100);
  ASSERT_TRUE(cfg.reward.reference_point.has_value());
  EXPECT_EQ(*cfg.reward.reference_point, s.region_center());
  EXPECT_DOUBLE_EQ(cfg.aero.blade_power_w, derive_blade_power(cfg.aero));
  EXPECT_DOUBLE_EQ(cfg.train.gamma, 0.9);
  EXPECT_DOUBLE_EQ(cfg.train.learning_rate, 7e-4);
  EXPECT_DOUBLE_EQ(cfg.train.alpha, 0.01);
  EXPECT_DOUBLE_EQ(cfg.train.tau, 0.005);
  EXPECT_EQ(cfg.train.episodes, 3000);
  EXPECT_DOUBLE_EQ(cfg.anneal.cooling, 0.95);
  EXPECT_NEAR(cfg.train.v_me, 10.128471329004267, 1e-3);
}

TEST(Config, ExplicitFactorisationAccepted) {
  const SimConfig cfg = finalized("[ris]\nelements = 60\nrows = 6\ncols = 10\n");
  EXPECT_EQ(cfg.scenario.ris_rows * cfg.scenario.ris_cols, 60);
}

TEST(Config, ElementsAloneAreFactorised) {
  const SimConfig cfg = finalized("[ris]\nelements = 32\n");
  EXPECT_EQ(cfg.scenario.ris_rows, 4);
  EXPECT_EQ(cfg.scenario.ris_cols, 8);
}

TEST(Config, FactorisationMismatchNamesKey) {
  try {
    finalized("[ris]\nelements = 60\nrows = 5\ncols = 10\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError &e) {
    EXPECT_EQ(e.key(), "ris.elements");
    EXPECT_NE(std::string(e.what()).find("N_S"), std::string::npos);
  }
}

TEST(Config, NegativeTransmitPowerRejected) {
  try {
    finalized("[radio]\ntransmit_power_w = -1.0\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError &e) {
    EXPECT_NE(std::string(e.what()).find("P_t must be positive"), std::string::npos);
    EXPECT_EQ(e.key(), "radio.transmit_power_w");
  }
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_EQ(config_error_key("[radio]\nfoo = 1\n"), "radio.foo");
  EXPECT_EQ(config_error_key("bogus = 3\n"), "bogus");
  EXPECT_EQ(config_error_key("[nonsense]\nx = 1\n"), "nonsense");
}

TEST(Config, WrongTypeNamesKey) { EXPECT_EQ(config_error_key("[region]\nnum_uavs = \"eight\"\n"), "region.num_uavs"); }

TEST(Config, InvariantViolations) {
  EXPECT_EQ(config_error_key("[region]\nl_min = 10.0\nl_max = 5.0\n"), "region.l_min");
  EXPECT_EQ(config_error_key("[region]\nh_min = 90.0\nh_max = 60.0\n"), "region.h_min");
  EXPECT_EQ(config_error_key("[radio]\narray_efficiency = 1.5\n"), "radio.array_efficiency");
  EXPECT_EQ(config_error_key("[train]\ngamma = 1.0\n"), "train.gamma");
  EXPECT_EQ(config_error_key("[sa]\ncooling = 1.0\n"), "sa.cooling");
  EXPECT_EQ(config_error_key("[train]\nbatch_size = 10\nbuffer_capacity = 5\n"), "train.batch_size");
  EXPECT_EQ(config_error_key("seed = -4\n"), "seed");
  EXPECT_EQ(config_error_key("[radio]\nquadrature_theta = 4\n"), "radio.quadrature_theta");
}

TEST(Config, ParseErrorIsConfigError) { EXPECT_THROW(parse_config("[region\nx="), ConfigError); }

TEST(Config, MissingFileIsConfigError) { EXPECT_THROW(load_config("/nonexistent/uvaa.toml"), ConfigError); }

TEST(Config, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "uvaa_test_config.toml";
  {
    std::ofstream os(path);
    os << "seed = 42\n[region]\nnum_uavs = 3\n";
  }
  SimConfig cfg = load_config(path);
  cfg.finalize();
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.scenario.num_uavs, 3);
  std::filesystem::remove(path);
}

TEST(Config, HashIgnoresSeedAndEpisodeCount) {
  SimConfig a = finalized("seed = 1\n");
  SimConfig b = finalized("seed = 2\n[train]\nepisodes = 7\ncheckpoint_every = 3\n");
  EXPECT_EQ(config_hash(a), config_hash(b));
  SimConfig c = finalized("[region]\nnum_uavs = 4\n");
  EXPECT_NE(config_hash(a), config_hash(c));
}

TEST(Config, JsonSnapshotRoundTripsScalars) {
  const SimConfig cfg = finalized("[radio]\nbandwidth_hz = 3e6\n");
  const auto j = config_to_json(cfg);
  EXPECT_DOUBLE_EQ(j["radio"]["bandwidth_hz"].get<double>(), 3e6);
}

TEST(Config, FactorGrid) {
  EXPECT_EQ(factor_grid(60), std::make_pair(6, 10));
  EXPECT_EQ(factor_grid(4), std::make_pair(2, 2));
  EXPECT_EQ(factor_grid(7), std::make_pair(1, 7));
  EXPECT_EQ(factor_grid(32), std::make_pair(4, 8));
  EXPECT_EQ(factor_grid(1), std::make_pair(1, 1));
  EXPECT_THROW(factor_grid(0), ConfigError);
}
