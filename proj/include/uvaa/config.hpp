// SPDX-License-Identifier: Apache-2.0
//
// Configuration for the whole simulator. Loaded from TOML with sections
// [region], [ris], [radio], [mobility], [energy], [sa], [reward], [train]
// and a top-level `seed`. Every key is optional; see README.md for the full
// key list with units and defaults. Unknown keys are rejected.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "uvaa/types.hpp"

namespace uvaa {

enum class ElementPattern { isotropic, dipole };
enum class PatternMethod { automatic, quadrature };

struct ScenarioConfig {
  // [region]
  double l_min = 1400.0;
  double l_max = 1500.0;
  double h_min = 60.0;
  double h_max = 90.0;
  double d_min = 0.5;
  int num_uavs = 8;

  // [ris]
  Position3 ris_position{1500.0, 1500.0, 20.0};
  int ris_elements = 60;
  int ris_rows = 6;
  int ris_cols = 10;
  double spacing_row = 0.0;  // filled with wavelength / 2 when not given
  double spacing_col = 0.0;

  // [radio]
  double carrier_hz = 2.4e9;
  double bandwidth_hz = 2.0e6;
  double transmit_power_w = 0.1;
  double noise_psd_dbm_hz = -155.0;
  double noise_power_w = 0.0;  // derived from the PSD unless given
  double pathloss_ref = 1e-3;
  double exponent_direct = 3.6;
  double exponent_ris = 2.7;
  double rician_factor = 1.9952623149688795;  // 3 dB
  double array_efficiency = 1.0;
  ElementPattern element_pattern = ElementPattern::isotropic;
  PatternMethod pattern_method = PatternMethod::automatic;
  int quadrature_theta = 90;
  int quadrature_phi = 180;
  double rate_floor_k_bps = 1e5;
  double rate_floor_j_bps = 1e5;

  // [mobility]
  double slot_seconds = 1.0;
  int slots_per_episode = 100;
  int num_users_k = 1;
  int num_users_j = 1;
  Rect users_k{1480.0, 1530.0, 1400.0, 1490.0};
  Rect users_j{1480.0, 1530.0, 1510.0, 1600.0};
  double gm_memory = 0.8;
  double gm_mean_speed = 1.0;
  double gm_speed_std = 0.3;
  double gm_heading_std = 0.1;
  double v_min = 0.0;
  double v_max = 20.0;
  double omega_min = -5.0;
  double omega_max = 5.0;

  double wavelength() const { return kSpeedOfLight / carrier_hz; }
  Position3 region_center() const {
    return {0.5 * (l_min + l_max), 0.5 * (l_min + l_max), 0.5 * (h_min + h_max)};
  }
};

// Rotary-wing aerodynamic parameters.
struct AeroParams {
  double mass_kg = 2.0;
  double gravity = 9.8;
  double tip_speed = 120.0;
  double induced_velocity = 4.03;
  double drag_ratio = 0.6;
  double solidity = 0.05;
  double air_density = 1.225;
  double disc_area = 0.503;
  double profile_drag_coeff = 0.012;
  double induced_correction = 0.1;
  double blade_power_w = 0.0;    // P_B; derived when 0
  double induced_power_w = 0.0;  // P_I; derived when 0
};

// Candidate grid for one STAR-RIS element.
struct CandidateSet {
  std::vector<double> amplitudes;
  std::vector<double> phases_r;
  std::vector<double> phases_t;

  std::size_t size() const { return amplitudes.size() * phases_r.size() * phases_t.size(); }
};

struct AnnealConfig {
  double t_init = 1.0;
  double cooling = 0.95;
  double t_min = 0.1;
  double amp_step = 0.25;
  double phase_step = kPi / 4.0;
  int amp_count = 3;
  int phase_count = 4;
  // Map candidate metrics onto [0, 1] (min to max) before the temperature
  // softmax, so the temperature is dimensionless whatever the channel scale.
  bool normalize_metrics = true;
  // When set, every element uses this grid instead of the adaptive one.
  std::optional<CandidateSet> fixed_grid;
};

struct RewardParams {
  double lambda1 = 1.0;
  double lambda2 = 0.01;
  double zeta1 = 1.0;
  double zeta2 = 0.01;
  double epsilon = 0.2;
  int t_max = 0;  // 0 means slots_per_episode
  std::optional<Position3> reference_point;  // box center when unset
  double rate_scale = 1e-6;  // reward uses Mbit/s
};

struct TrainConfig {
  int episodes = 3000;
  int batch_size = 256;
  int buffer_capacity = 100000;
  int updates_per_slot = 1;
  double gamma = 0.90;
  double tau = 0.005;
  double alpha = 0.01;
  double learning_rate = 7e-4;
  double sigma_b = 1.0;
  double v_me = 0.0;  // derived from AeroParams when 0
  bool attention = true;
  bool velocity_guidance = true;
  bool twin_critic = false;
  int policy_hidden = 128;
  int embed_hidden = 128;
  int head_hidden = 128;
  int key_dim = 64;
  int checkpoint_every = 100;
};

struct SimConfig {
  ScenarioConfig scenario;
  AeroParams aero;
  AnnealConfig anneal;
  RewardParams reward;
  TrainConfig train;
  std::uint64_t seed = 1;

  // Fills derived defaults and checks invariants; throws ConfigError.
  void finalize();
};

SimConfig load_config(const std::filesystem::path &path);
SimConfig parse_config(std::string_view toml_text);

// Canonical JSON snapshot (keys sorted).
nlohmann::json config_to_json(const SimConfig &cfg);
// Stable hash of everything except the seed.
std::string config_hash(const SimConfig &cfg);

// Picks rows x cols = n with rows the largest divisor <= sqrt(n).
std::pair<int, int> factor_grid(int n);

}  // namespace uvaa
