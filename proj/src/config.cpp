// SPDX-License-Identifier: Apache-2.0

#include "uvaa/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "uvaa/energy.hpp"
#include "uvaa/rng.hpp"

namespace uvaa {
namespace {

std::string qualified(std::string_view section, std::string_view key) {
  return section.empty() ? std::string(key) : std::string(section) + "." + std::string(key);
}

// Reads typed keys from one TOML table and remembers which keys were seen, so
// that anything left over can be reported as unknown.
class SectionReader {
 public:
  SectionReader(const toml::table *table, std::string section)
      : table_(table), section_(std::move(section)) {}

  void read(std::string_view key, double &out) {
    const toml::node *n = find(key);
    if (!n) return;
    if (auto v = n->value<double>()) {
      out = *v;
    } else {
      fail(key, "expected a number");
    }
  }

  void read(std::string_view key, int &out) {
    const toml::node *n = find(key);
    if (!n) return;
    if (auto v = n->value_exact<int64_t>()) {
      out = static_cast<int>(*v);
    } else {
      fail(key, "expected an integer");
    }
  }

  void read(std::string_view key, bool &out) {
    const toml::node *n = find(key);
    if (!n) return;
    if (auto v = n->value_exact<bool>()) {
      out = *v;
    } else {
      fail(key, "expected a boolean");
    }
  }

  void read(std::string_view key, std::string &out) {
    const toml::node *n = find(key);
    if (!n) return;
    if (auto v = n->value_exact<std::string>()) {
      out = *v;
    } else {
      fail(key, "expected a string");
    }
  }

  void read(std::string_view key, std::vector<double> &out) {
    const toml::node *n = find(key);
    if (!n) return;
    const toml::array *arr = n->as_array();
    if (!arr) fail(key, "expected an array of numbers");
    out.clear();
    for (const auto &el : *arr) {
      auto v = el.value<double>();
      if (!v) fail(key, "expected an array of numbers");
      out.push_back(*v);
    }
  }

  void read(std::string_view key, Position3 &out) {
    std::vector<double> v;
    if (!has(key)) return;
    read(key, v);
    if (v.size() != 3) fail(key, "expected [x, y, z]");
    out = {v[0], v[1], v[2]};
  }

  void read(std::string_view key, std::optional<Position3> &out) {
    if (!has(key)) return;
    Position3 p;
    read(key, p);
    out = p;
  }

  void read(std::string_view key, Rect &out) {
    std::vector<double> v;
    if (!has(key)) return;
    read(key, v);
    if (v.size() != 4) fail(key, "expected [x_min, x_max, y_min, y_max]");
    out = {v[0], v[1], v[2], v[3]};
  }

  bool has(std::string_view key) const { return table_ && table_->contains(key); }

  void finish() const {
    if (!table_) return;
    for (const auto &[k, v] : *table_) {
      if (!seen_.count(std::string(k.str()))) {
        if (section_.empty() && v.is_table()) continue;
        const std::string name = qualified(section_, k.str());
        throw ConfigError(name, "unknown config key '" + name + "'");
      }
    }
  }

  [[noreturn]] void fail(std::string_view key, const std::string &msg) const {
    const std::string name = qualified(section_, key);
    throw ConfigError(name, "config key '" + name + "': " + msg);
  }

 private:
  const toml::node *find(std::string_view key) {
    if (!table_) return nullptr;
    seen_.insert(std::string(key));
    return table_->get(key);
  }

  const toml::table *table_;
  std::string section_;
  std::set<std::string> seen_;
};

const toml::table *subtable(const toml::table &root, std::string_view name) {
  const toml::node *n = root.get(name);
  if (!n) return nullptr;
  const toml::table *t = n->as_table();
  if (!t) throw ConfigError(std::string(name), "config section [" + std::string(name) + "] must be a table");
  return t;
}

void require(bool ok, const char *key, const std::string &msg) {
  if (!ok) throw ConfigError(key, std::string(key) + ": " + msg);
}

ElementPattern parse_pattern(const std::string &s) {
  if (s == "isotropic") return ElementPattern::isotropic;
  if (s == "dipole") return ElementPattern::dipole;
  throw ConfigError("radio.element_pattern", "radio.element_pattern: unknown pattern '" + s + "'");
}

PatternMethod parse_method(const std::string &s) {
  if (s == "auto") return PatternMethod::automatic;
  if (s == "quadrature") return PatternMethod::quadrature;
  throw ConfigError("radio.pattern_method", "radio.pattern_method: unknown method '" + s + "'");
}

}  // namespace

std::pair<int, int> factor_grid(int n) {
  if (n <= 0) throw ConfigError("ris.elements", "ris.elements must be positive");
  int rows = 1;
  for (int r = 1; r * r <= n; ++r) {
    if (n % r == 0) rows = r;
  }
  return {rows, n / rows};
}

void SimConfig::finalize() {
  ScenarioConfig &s = scenario;
  require(s.l_min < s.l_max, "region.l_min", "L_min must be < L_max");
  require(s.h_min < s.h_max, "region.h_min", "H_min must be < H_max");
  require(s.d_min >= 0.0, "region.d_min", "D_min must be >= 0");
  require(s.num_uavs >= 1, "region.num_uavs", "N_M must be >= 1");
  require(s.ris_elements >= 1, "ris.elements", "N_S must be >= 1");
  require(s.ris_rows >= 1 && s.ris_cols >= 1, "ris.rows", "rows and cols must be >= 1");
  require(s.ris_rows * s.ris_cols == s.ris_elements, "ris.elements",
          "N_S must equal N_S^R * N_S^C (" + std::to_string(s.ris_elements) + " != " +
              std::to_string(s.ris_rows) + " * " + std::to_string(s.ris_cols) + ")");
  require(s.carrier_hz > 0.0, "radio.carrier_hz", "carrier frequency must be positive");
  if (s.spacing_row <= 0.0) s.spacing_row = 0.5 * s.wavelength();
  if (s.spacing_col <= 0.0) s.spacing_col = 0.5 * s.wavelength();
  require(s.bandwidth_hz > 0.0, "radio.bandwidth_hz", "B must be positive");
  require(s.transmit_power_w > 0.0, "radio.transmit_power_w", "P_t must be positive");
  if (s.noise_power_w <= 0.0) {
    s.noise_power_w = std::pow(10.0, (s.noise_psd_dbm_hz - 30.0) / 10.0) * s.bandwidth_hz;
  }
  require(s.noise_power_w > 0.0, "radio.noise_power_w", "sigma^2 must be positive");
  require(s.pathloss_ref > 0.0, "radio.pathloss_ref", "path-loss reference must be positive");
  require(s.rician_factor >= 0.0, "radio.rician_factor_db", "Rician factor must be >= 0");
  require(s.array_efficiency >= 0.0 && s.array_efficiency <= 1.0, "radio.array_efficiency",
          "array efficiency must lie in [0, 1]");
  require(s.quadrature_theta >= 8, "radio.quadrature_theta", "quadrature grid too coarse (N_theta < 8)");
  require(s.quadrature_phi >= 8, "radio.quadrature_phi", "quadrature grid too coarse (N_phi < 8)");
  require(s.slot_seconds > 0.0, "mobility.slot_seconds", "slot duration must be positive");
  require(s.slots_per_episode >= 1, "mobility.slots_per_episode", "N_L must be >= 1");
  require(s.num_users_k >= 1, "mobility.num_users_k", "need at least one user per side");
  require(s.num_users_j >= 1, "mobility.num_users_j", "need at least one user per side");
  require(s.users_k.x_min < s.users_k.x_max && s.users_k.y_min < s.users_k.y_max,
          "mobility.users_k_rect", "empty rectangle");
  require(s.users_j.x_min < s.users_j.x_max && s.users_j.y_min < s.users_j.y_max,
          "mobility.users_j_rect", "empty rectangle");
  require(s.gm_memory >= 0.0 && s.gm_memory <= 1.0, "mobility.memory", "memory factor must lie in [0, 1]");
  require(s.gm_speed_std >= 0.0 && s.gm_heading_std >= 0.0, "mobility.speed_std", "noise std must be >= 0");
  require(s.v_min >= 0.0 && s.v_min <= s.v_max, "mobility.v_min", "need 0 <= v_min <= v_max");
  require(s.omega_min <= s.omega_max, "mobility.omega_min", "need omega_min <= omega_max");

  AeroParams &a = aero;
  require(a.mass_kg > 0 && a.gravity > 0 && a.tip_speed > 0 && a.induced_velocity > 0 && a.drag_ratio > 0 &&
              a.solidity > 0 && a.air_density > 0 && a.disc_area > 0,
          "energy", "aerodynamic parameters must be strictly positive");
  require(a.tip_speed > a.induced_velocity, "energy.tip_speed", "v_tip must exceed v_0");
  if (a.blade_power_w <= 0.0) a.blade_power_w = derive_blade_power(a);
  if (a.induced_power_w <= 0.0) a.induced_power_w = derive_induced_power(a);

  AnnealConfig &sa = anneal;
  require(sa.t_min > 0.0, "sa.t_min", "T_min must be positive");
  require(sa.t_init >= sa.t_min, "sa.t_init", "T_init must be >= T_min");
  require(sa.cooling > 0.0 && sa.cooling < 1.0, "sa.cooling", "cooling rate must lie in (0, 1)");
  require(sa.amp_count >= 1 && sa.phase_count >= 1, "sa.amp_count", "candidate counts must be >= 1");
  require(sa.amp_step >= 0.0 && sa.phase_step >= 0.0, "sa.amp_step", "steps must be >= 0");
  if (sa.fixed_grid) {
    require(sa.fixed_grid->size() > 0, "sa.grid_amplitudes", "fixed candidate grid must be nonempty");
  }

  RewardParams &r = reward;
  require(r.lambda1 >= 0 && r.lambda2 >= 0 && r.zeta1 >= 0 && r.zeta2 >= 0, "reward.lambda1",
          "objective and guidance weights must be >= 0");
  require(r.epsilon > 0.0 && r.epsilon <= 1.0, "reward.epsilon", "epsilon must lie in (0, 1]");
  if (r.t_max <= 0) r.t_max = s.slots_per_episode;
  if (!r.reference_point) r.reference_point = s.region_center();

  TrainConfig &t = train;
  require(t.episodes >= 0, "train.episodes", "N_E must be >= 0");
  require(t.gamma >= 0.0 && t.gamma < 1.0, "train.gamma", "gamma must lie in [0, 1)");
  require(t.tau > 0.0 && t.tau <= 1.0, "train.tau", "tau must lie in (0, 1]");
  require(t.alpha >= 0.0, "train.alpha", "entropy temperature must be >= 0");
  require(t.learning_rate > 0.0, "train.learning_rate", "learning rate must be positive");
  require(t.batch_size >= 1, "train.batch_size", "batch size must be >= 1");
  require(t.batch_size <= t.buffer_capacity, "train.batch_size", "N_B must not exceed buffer capacity");
  require(t.updates_per_slot >= 0, "train.updates_per_slot", "N_U must be >= 0");
  require(t.sigma_b >= 0.0, "train.sigma_b", "sigma_b must be >= 0");
  require(t.policy_hidden >= 1 && t.embed_hidden >= 1 && t.head_hidden >= 1 && t.key_dim >= 1, "train.key_dim",
          "network sizes must be >= 1");
  require(t.checkpoint_every >= 0, "train.checkpoint_every", "checkpoint cadence must be >= 0");
  if (t.v_me <= 0.0) t.v_me = energy_optimal_speed(a, s.v_max);
}

SimConfig parse_config(std::string_view toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error &e) {
    std::ostringstream os;
    os << "config parse error: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError("", os.str());
  }

  SimConfig cfg;
  ScenarioConfig &s = cfg.scenario;

  if (const toml::node *n = root.get("seed")) {
    auto v = n->value_exact<int64_t>();
    require(v.has_value() && *v >= 0, "seed", "seed must be a non-negative integer");
    cfg.seed = static_cast<std::uint64_t>(*v);
  }
  for (const char *name : {"region", "ris", "radio", "mobility", "energy", "sa", "reward", "train"}) {
    (void)subtable(root, name);
  }
  for (const auto &[k, v] : root) {
    static const std::set<std::string> known{"seed",   "region", "ris",    "radio", "mobility",
                                             "energy", "sa",     "reward", "train"};
    if (!known.count(std::string(k.str()))) {
      throw ConfigError(std::string(k.str()), "unknown config key '" + std::string(k.str()) + "'");
    }
  }

  {
    SectionReader r(subtable(root, "region"), "region");
    r.read("l_min", s.l_min);
    r.read("l_max", s.l_max);
    r.read("h_min", s.h_min);
    r.read("h_max", s.h_max);
    r.read("d_min", s.d_min);
    r.read("num_uavs", s.num_uavs);
    r.finish();
  }
  {
    SectionReader r(subtable(root, "ris"), "ris");
    r.read("position", s.ris_position);
    r.read("elements", s.ris_elements);
    const bool has_rows = r.has("rows") || r.has("cols");
    r.read("rows", s.ris_rows);
    r.read("cols", s.ris_cols);
    if (!has_rows && r.has("elements")) {
      std::tie(s.ris_rows, s.ris_cols) = factor_grid(s.ris_elements);
    }
    r.read("spacing_row", s.spacing_row);
    r.read("spacing_col", s.spacing_col);
    r.finish();
  }
  {
    SectionReader r(subtable(root, "radio"), "radio");
    r.read("carrier_hz", s.carrier_hz);
    r.read("bandwidth_hz", s.bandwidth_hz);
    r.read("transmit_power_w", s.transmit_power_w);
    r.read("noise_psd_dbm_hz", s.noise_psd_dbm_hz);
    r.read("noise_power_w", s.noise_power_w);
    r.read("pathloss_ref", s.pathloss_ref);
    r.read("exponent_direct", s.exponent_direct);
    r.read("exponent_ris", s.exponent_ris);
    if (r.has("rician_factor_db")) {
      double db = 0.0;
      r.read("rician_factor_db", db);
      s.rician_factor = std::pow(10.0, db / 10.0);
    }
    r.read("array_efficiency", s.array_efficiency);
    std::string pattern, method;
    r.read("element_pattern", pattern);
    if (!pattern.empty()) s.element_pattern = parse_pattern(pattern);
    r.read("pattern_method", method);
    if (!method.empty()) s.pattern_method = parse_method(method);
    r.read("quadrature_theta", s.quadrature_theta);
    r.read("quadrature_phi", s.quadrature_phi);
    r.read("rate_floor_k_bps", s.rate_floor_k_bps);
    r.read("rate_floor_j_bps", s.rate_floor_j_bps);
    r.finish();
  }
  {
    SectionReader r(subtable(root, "mobility"), "mobility");
    r.read("slot_seconds", s.slot_seconds);
    r.read("slots_per_episode", s.slots_per_episode);
    r.read("num_users_k", s.num_users_k);
    r.read("num_users_j", s.num_users_j);
    r.read("users_k_rect", s.users_k);
    r.read("users_j_rect", s.users_j);
    r.read("memory", s.gm_memory);
    r.read("mean_speed", s.gm_mean_speed);
    r.read("speed_std", s.gm_speed_std);
    r.read("heading_std", s.gm_heading_std);
    r.read("v_min", s.v_min);
    r.read("v_max", s.v_max);
    r.read("omega_min", s.omega_min);
    r.read("omega_max", s.omega_max);
    r.finish();
  }
  {
    AeroParams &a = cfg.aero;
    SectionReader r(subtable(root, "energy"), "energy");
    r.read("mass_kg", a.mass_kg);
    r.read("gravity", a.gravity);
    r.read("tip_speed", a.tip_speed);
    r.read("induced_velocity", a.induced_velocity);
    r.read("drag_ratio", a.drag_ratio);
    r.read("solidity", a.solidity);
    r.read("air_density", a.air_density);
    r.read("disc_area", a.disc_area);
    r.read("profile_drag_coeff", a.profile_drag_coeff);
    r.read("induced_correction", a.induced_correction);
    r.read("blade_power_w", a.blade_power_w);
    r.read("induced_power_w", a.induced_power_w);
    r.finish();
  }
  {
    AnnealConfig &a = cfg.anneal;
    SectionReader r(subtable(root, "sa"), "sa");
    r.read("t_init", a.t_init);
    r.read("cooling", a.cooling);
    r.read("t_min", a.t_min);
    r.read("amp_step", a.amp_step);
    r.read("phase_step", a.phase_step);
    r.read("amp_count", a.amp_count);
    r.read("phase_count", a.phase_count);
    r.read("normalize_metrics", a.normalize_metrics);
    if (r.has("grid_amplitudes") || r.has("grid_phases_r") || r.has("grid_phases_t")) {
      CandidateSet grid;
      r.read("grid_amplitudes", grid.amplitudes);
      r.read("grid_phases_r", grid.phases_r);
      r.read("grid_phases_t", grid.phases_t);
      if (grid.amplitudes.empty() || grid.phases_r.empty() || grid.phases_t.empty()) {
        r.fail("grid_amplitudes", "fixed grid needs grid_amplitudes, grid_phases_r and grid_phases_t");
      }
      a.fixed_grid = grid;
    }
    r.finish();
  }
  {
    RewardParams &p = cfg.reward;
    SectionReader r(subtable(root, "reward"), "reward");
    r.read("lambda1", p.lambda1);
    r.read("lambda2", p.lambda2);
    r.read("zeta1", p.zeta1);
    r.read("zeta2", p.zeta2);
    r.read("epsilon", p.epsilon);
    r.read("t_max", p.t_max);
    r.read("reference_point", p.reference_point);
    r.read("rate_scale", p.rate_scale);
    r.finish();
  }
  {
    TrainConfig &t = cfg.train;
    SectionReader r(subtable(root, "train"), "train");
    r.read("episodes", t.episodes);
    r.read("batch_size", t.batch_size);
    r.read("buffer_capacity", t.buffer_capacity);
    r.read("updates_per_slot", t.updates_per_slot);
    r.read("gamma", t.gamma);
    r.read("tau", t.tau);
    r.read("alpha", t.alpha);
    r.read("learning_rate", t.learning_rate);
    r.read("sigma_b", t.sigma_b);
    r.read("v_me", t.v_me);
    r.read("attention", t.attention);
    r.read("velocity_guidance", t.velocity_guidance);
    r.read("twin_critic", t.twin_critic);
    r.read("policy_hidden", t.policy_hidden);
    r.read("embed_hidden", t.embed_hidden);
    r.read("head_hidden", t.head_hidden);
    r.read("key_dim", t.key_dim);
    r.read("checkpoint_every", t.checkpoint_every);
    r.finish();
  }

  cfg.finalize();
  return cfg;
}

SimConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

nlohmann::json config_to_json(const SimConfig &cfg) {
  using nlohmann::json;
  const ScenarioConfig &s = cfg.scenario;
  auto pos = [](const Position3 &p) { return json::array({p.x, p.y, p.z}); };
  auto rect = [](const Rect &r) { return json::array({r.x_min, r.x_max, r.y_min, r.y_max}); };
  json j;
  j["seed"] = cfg.seed;
  j["region"] = {{"l_min", s.l_min}, {"l_max", s.l_max}, {"h_min", s.h_min},
                 {"h_max", s.h_max}, {"d_min", s.d_min}, {"num_uavs", s.num_uavs}};
  j["ris"] = {{"position", pos(s.ris_position)}, {"elements", s.ris_elements}, {"rows", s.ris_rows},
              {"cols", s.ris_cols},              {"spacing_row", s.spacing_row}, {"spacing_col", s.spacing_col}};
  j["radio"] = {{"carrier_hz", s.carrier_hz},
                {"bandwidth_hz", s.bandwidth_hz},
                {"transmit_power_w", s.transmit_power_w},
                {"noise_psd_dbm_hz", s.noise_psd_dbm_hz},
                {"noise_power_w", s.noise_power_w},
                {"pathloss_ref", s.pathloss_ref},
                {"exponent_direct", s.exponent_direct},
                {"exponent_ris", s.exponent_ris},
                {"rician_factor", s.rician_factor},
                {"array_efficiency", s.array_efficiency},
                {"element_pattern", s.element_pattern == ElementPattern::isotropic ? "isotropic" : "dipole"},
                {"pattern_method", s.pattern_method == PatternMethod::automatic ? "auto" : "quadrature"},
                {"quadrature_theta", s.quadrature_theta},
                {"quadrature_phi", s.quadrature_phi},
                {"rate_floor_k_bps", s.rate_floor_k_bps},
                {"rate_floor_j_bps", s.rate_floor_j_bps}};
  j["mobility"] = {{"slot_seconds", s.slot_seconds},
                   {"slots_per_episode", s.slots_per_episode},
                   {"num_users_k", s.num_users_k},
                   {"num_users_j", s.num_users_j},
                   {"users_k_rect", rect(s.users_k)},
                   {"users_j_rect", rect(s.users_j)},
                   {"memory", s.gm_memory},
                   {"mean_speed", s.gm_mean_speed},
                   {"speed_std", s.gm_speed_std},
                   {"heading_std", s.gm_heading_std},
                   {"v_min", s.v_min},
                   {"v_max", s.v_max},
                   {"omega_min", s.omega_min},
                   {"omega_max", s.omega_max}};
  const AeroParams &a = cfg.aero;
  j["energy"] = {{"mass_kg", a.mass_kg},
                 {"gravity", a.gravity},
                 {"tip_speed", a.tip_speed},
                 {"induced_velocity", a.induced_velocity},
                 {"drag_ratio", a.drag_ratio},
                 {"solidity", a.solidity},
                 {"air_density", a.air_density},
                 {"disc_area", a.disc_area},
                 {"profile_drag_coeff", a.profile_drag_coeff},
                 {"induced_correction", a.induced_correction},
                 {"blade_power_w", a.blade_power_w},
                 {"induced_power_w", a.induced_power_w}};
  const AnnealConfig &sa = cfg.anneal;
  j["sa"] = {{"t_init", sa.t_init},         {"cooling", sa.cooling},         {"t_min", sa.t_min},
             {"amp_step", sa.amp_step},     {"phase_step", sa.phase_step},   {"amp_count", sa.amp_count},
             {"phase_count", sa.phase_count}, {"normalize_metrics", sa.normalize_metrics}};
  if (sa.fixed_grid) {
    j["sa"]["grid_amplitudes"] = sa.fixed_grid->amplitudes;
    j["sa"]["grid_phases_r"] = sa.fixed_grid->phases_r;
    j["sa"]["grid_phases_t"] = sa.fixed_grid->phases_t;
  }
  const RewardParams &r = cfg.reward;
  j["reward"] = {{"lambda1", r.lambda1}, {"lambda2", r.lambda2}, {"zeta1", r.zeta1},
                 {"zeta2", r.zeta2},     {"epsilon", r.epsilon}, {"t_max", r.t_max},
                 {"rate_scale", r.rate_scale}};
  if (r.reference_point) j["reward"]["reference_point"] = pos(*r.reference_point);
  const TrainConfig &t = cfg.train;
  j["train"] = {{"episodes", t.episodes},
                {"batch_size", t.batch_size},
                {"buffer_capacity", t.buffer_capacity},
                {"updates_per_slot", t.updates_per_slot},
                {"gamma", t.gamma},
                {"tau", t.tau},
                {"alpha", t.alpha},
                {"learning_rate", t.learning_rate},
                {"sigma_b", t.sigma_b},
                {"v_me", t.v_me},
                {"attention", t.attention},
                {"velocity_guidance", t.velocity_guidance},
                {"twin_critic", t.twin_critic},
                {"policy_hidden", t.policy_hidden},
                {"embed_hidden", t.embed_hidden},
                {"head_hidden", t.head_hidden},
                {"key_dim", t.key_dim},
                {"checkpoint_every", t.checkpoint_every}};
  return j;
}

std::string config_hash(const SimConfig &cfg) {
  nlohmann::json j = config_to_json(cfg);
  j.erase("seed");
  // Run length and checkpoint cadence do not change what a checkpoint means.
  j["train"].erase("episodes");
  j["train"].erase("checkpoint_every");
  std::ostringstream os;
  os << std::hex << fnv1a64(j.dump());
  return os.str();
}

}  // namespace uvaa
