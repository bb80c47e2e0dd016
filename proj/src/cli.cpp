// SPDX-License-Identifier: Apache-2.0

#include "uvaa/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "uvaa/channel.hpp"
#include "uvaa/learn/checkpoint.hpp"
#include "uvaa/scenario.hpp"
#include "uvaa/star_ris.hpp"

#ifndef UVAA_BUILD_ID
#define UVAA_BUILD_ID "unknown"
#endif

namespace uvaa::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json complex_json(const Complex &c) { return json::array({c.real(), c.imag()}); }

json complex_vec_json(const ComplexVec &v) {
  json a = json::array();
  for (const auto &c : v) a.push_back(complex_json(c));
  return a;
}

json trajectory_record(const learn::SlotRecord &r) {
  json j;
  j["episode"] = r.episode;
  j["slot"] = r.slot;
  json uavs = json::array();
  for (const auto &u : r.env.deployment().swarm.uavs) {
    uavs.push_back({{"x", u.position.x},
                    {"y", u.position.y},
                    {"z", u.position.z},
                    {"speed", u.speed},
                    {"heading", u.heading},
                    {"vertical_speed", u.vertical_speed},
                    {"excitation", u.excitation}});
  }
  j["uavs"] = std::move(uavs);
  auto users = [](const std::vector<UserState> &side) {
    json a = json::array();
    for (const auto &u : side) a.push_back(json::array({u.position.x, u.position.y}));
    return a;
  };
  j["users_k"] = users(r.env.deployment().users_k);
  j["users_j"] = users(r.env.deployment().users_j);
  j["rewards"] = r.outcome.rewards;
  j["rate_bps"] = r.outcome.metrics.rate_bps;
  j["gain_k"] = r.outcome.metrics.gain_k;
  j["gain_j"] = r.outcome.metrics.gain_j;
  j["energy_j"] = r.outcome.metrics.energy_j;
  j["boundary_violations"] = r.outcome.metrics.boundary_violations;
  j["collision_violations"] = r.outcome.metrics.collision_violations;
  return j;
}

json channel_record(const learn::SlotRecord &r) {
  const ChannelRealization &c = r.env.last_channel();
  const StarRisState &ris = r.env.ris();
  json j;
  j["episode"] = r.episode;
  j["slot"] = r.slot;
  j["h_ms"] = complex_vec_json(c.h_ms);
  j["h_sk"] = complex_vec_json(c.h_sk);
  j["h_sj"] = complex_vec_json(c.h_sj);
  j["h_mk"] = complex_json(c.h_mk);
  j["h_mj"] = complex_json(c.h_mj);
  std::vector<double> ar;
  std::vector<double> pr;
  std::vector<double> pt;
  for (std::size_t s = 0; s < ris.size(); ++s) {
    ar.push_back(ris.amp_r(s));
    pr.push_back(ris.phase_r(s));
    pt.push_back(ris.phase_t(s));
  }
  j["ris"] = {{"amp_r", ar}, {"phase_r", pr}, {"phase_t", pt}};
  return j;
}

// Streams JSON lines for the optional dumps and remembers what was written.
class Dumps {
 public:
  Dumps(const fs::path &out, bool trajectories, bool channels) {
    if (trajectories) traj_.open(out / "trajectories.jsonl");
    if (channels) chan_.open(out / "channels.jsonl");
  }

  void attach(learn::RunHooks &hooks) {
    if (!traj_.is_open() && !chan_.is_open()) return;
    hooks.on_slot = [this](const learn::SlotRecord &r) {
      if (traj_.is_open()) traj_ << trajectory_record(r).dump() << '\n';
      if (chan_.is_open()) chan_ << channel_record(r).dump() << '\n';
    };
  }

  void files(std::vector<std::string> &out) const {
    if (traj_.is_open()) out.emplace_back("trajectories.jsonl");
    if (chan_.is_open()) out.emplace_back("channels.jsonl");
  }

 private:
  std::ofstream traj_;
  std::ofstream chan_;
};

void write_text(const fs::path &p, const std::string &text) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

void write_metrics(const fs::path &p, const std::vector<learn::EpisodeMetrics> &log) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  learn::write_metrics_csv(os, log);
}

void write_manifest(const fs::path &out, const std::string &command, const SimConfig &cfg, const std::string &start,
                    std::vector<std::string> files, const json &extra = json::object()) {
  json m;
  m["command"] = command;
  m["config"] = config_to_json(cfg);
  m["config_hash"] = config_hash(cfg);
  m["seed"] = cfg.seed;
  m["build"] = UVAA_BUILD_ID;
  m["started_utc"] = start;
  m["finished_utc"] = utc_now();
  files.emplace_back("manifest.json");
  m["files"] = files;
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  write_text(out / "manifest.json", m.dump(2) + "\n");
}

template <class F>
int guarded(F &&body) {
  try {
    return body();
  } catch (const ConfigError &e) {
    std::cerr << "config error [" << e.key() << "]: " << e.what() << '\n';
    return kExitConfig;
  } catch (const learn::CheckpointError &e) {
    std::cerr << "checkpoint refused: " << e.what() << '\n';
    return kExitCheckpoint;
  } catch (const NumericError &e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

SimConfig resolve_config(const CommonOptions &opts) {
  SimConfig cfg = opts.config ? load_config(*opts.config) : parse_config("");
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.episodes) {
    if (*opts.episodes < 0) throw ConfigError("train.episodes", "--episodes must be non-negative");
    cfg.train.episodes = *opts.episodes;
  }
  cfg.finalize();
  return cfg;
}

int run_train(const TrainOptions &opts) {
  return guarded([&] {
    const std::string start = utc_now();
    const SimConfig cfg = resolve_config(opts.common);
    const learn::Method method = learn::parse_method(opts.method);
    const fs::path out = opts.common.out;
    fs::create_directories(out);
    Dumps dumps(out, opts.dump_trajectories, opts.dump_channels);
    learn::RunHooks hooks;
    dumps.attach(hooks);
    std::vector<std::string> files{"metrics.csv", "summary.json"};

    std::vector<learn::EpisodeMetrics> log;
    if (method == learn::Method::random) {
      log = learn::baseline_random(cfg, cfg.train.episodes, hooks);
    } else {
      fs::create_directories(out / "checkpoints");
      const int every = cfg.train.checkpoint_every;
      hooks.on_episode_end = [&](int episode, const learn::Masac &learner) {
        if (every > 0 && episode % every == 0) {
          char name[64];
          std::snprintf(name, sizeof name, "episode_%06d.json", episode);
          learn::save_checkpoint(out / "checkpoints" / name, learner, cfg, method, episode);
          files.push_back(std::string("checkpoints/") + name);
        }
      };
      auto result = learn::hmcd_train(cfg, method, hooks);
      learn::save_checkpoint(out / "checkpoints" / "final.json", *result.learner, cfg, method, cfg.train.episodes);
      files.emplace_back("checkpoints/final.json");
      log = std::move(result.log);
    }
    write_metrics(out / "metrics.csv", log);
    json summary = learn::summarize(log);
    summary["method"] = method_name(method);
    write_text(out / "summary.json", summary.dump(2) + "\n");
    dumps.files(files);
    write_manifest(out, "train", cfg, start, files, {{"method", method_name(method)}});
    return kExitOk;
  });
}

int run_eval(const EvalOptions &opts) {
  return guarded([&] {
    const std::string start = utc_now();
    const SimConfig cfg = resolve_config(opts.common);
    const int episodes = opts.common.episodes.value_or(10);
    const learn::CheckpointInfo info = learn::read_checkpoint_info(opts.checkpoint);
    if (info.method == learn::Method::random) throw learn::CheckpointError("random policies have no checkpoint");
    auto learner = learn::make_learner(cfg, info.method);
    learn::load_checkpoint(opts.checkpoint, *learner, cfg);

    const fs::path out = opts.common.out;
    fs::create_directories(out);
    Dumps dumps(out, opts.dump_trajectories, opts.dump_channels);
    learn::RunHooks hooks;
    dumps.attach(hooks);
    const auto log = learn::evaluate(cfg, *learner, episodes, hooks);
    write_metrics(out / "metrics.csv", log);
    json summary = learn::summarize(log);
    summary["method"] = method_name(info.method);
    summary["checkpoint_episode"] = info.episode;
    write_text(out / "summary.json", summary.dump(2) + "\n");
    std::vector<std::string> files{"metrics.csv", "summary.json"};
    dumps.files(files);
    write_manifest(out, "eval", cfg, start, files, {{"checkpoint", fs::absolute(opts.checkpoint).string()}});
    return kExitOk;
  });
}

std::string sweep_csv_header() { return "axis,value,seed,status,mean_rate_bps,total_energy_j,mean_reward"; }

int run_sweep(const SweepOptions &opts) {
  return guarded([&] {
    const std::string start = utc_now();
    if (opts.axis != "uav_count" && opts.axis != "ris_elements") {
      throw ConfigError("axis", "--axis must be uav_count or ris_elements, got '" + opts.axis + "'");
    }
    if (opts.values.empty()) throw ConfigError("values", "--values must list at least one value");
    const SimConfig base = resolve_config(opts.common);
    const learn::Method method = learn::parse_method(opts.method);
    const fs::path out = opts.common.out;
    fs::create_directories(out);

    std::ostringstream table;
    table << sweep_csv_header() << '\n';
    std::vector<std::string> files{"sweep.csv"};
    for (std::size_t i = 0; i < opts.values.size(); ++i) {
      const int value = opts.values[i];
      SimConfig cfg = base;
      cfg.seed = base.seed + i;
      std::string status = "ok";
      std::vector<learn::EpisodeMetrics> log;
      const std::string sub = "value_" + std::to_string(value);
      try {
        if (opts.axis == "uav_count") {
          cfg.scenario.num_uavs = value;
        } else {
          const auto [rows, cols] = factor_grid(value);
          cfg.scenario.ris_elements = value;
          cfg.scenario.ris_rows = rows;
          cfg.scenario.ris_cols = cols;
        }
        cfg.finalize();
        fs::create_directories(out / sub);
        if (method == learn::Method::random) {
          log = learn::baseline_random(cfg, cfg.train.episodes);
          write_metrics(out / sub / "metrics.csv", log);
        } else {
          auto result = learn::hmcd_train(cfg, method);
          write_metrics(out / sub / "train_metrics.csv", result.log);
          log = learn::evaluate(cfg, *result.learner, opts.eval_episodes);
          write_metrics(out / sub / "metrics.csv", log);
          files.push_back(sub + "/train_metrics.csv");
        }
        files.push_back(sub + "/metrics.csv");
      } catch (const std::exception &e) {
        status = "error";
        std::cerr << "sweep value " << value << " failed: " << e.what() << '\n';
      }
      const json s = learn::summarize(log);
      char row[512];
      if (status == "ok" && !log.empty()) {
        std::snprintf(row, sizeof row, "%s,%d,%llu,%s,%.17g,%.17g,%.17g", opts.axis.c_str(), value,
                      static_cast<unsigned long long>(cfg.seed), status.c_str(),
                      s["mean_rate_bps"]["mean"].get<double>(), s["total_energy_j"]["mean"].get<double>(),
                      s["mean_reward"]["mean"].get<double>());
      } else {
        std::snprintf(row, sizeof row, "%s,%d,%llu,%s,,,", opts.axis.c_str(), value,
                      static_cast<unsigned long long>(cfg.seed), status == "ok" ? "empty" : status.c_str());
      }
      table << row << '\n';
    }
    write_text(out / "sweep.csv", table.str());
    write_manifest(out, "sweep", base, start, files,
                   {{"axis", opts.axis}, {"values", opts.values}, {"method", opts.method}});
    return kExitOk;
  });
}

nlohmann::json oracle_report(const SimConfig &cfg, int trials) {
  const ScenarioConfig &sc = cfg.scenario;
  if (sc.ris_elements > 3) {
    throw ConfigError("ris.elements", "oracle instances need at most 3 STAR-RIS elements, got " +
                                          std::to_string(sc.ris_elements));
  }
  if (trials < 0) throw ConfigError("trials", "--trials must be non-negative");
  CandidateSet grid;
  if (cfg.anneal.fixed_grid) {
    grid = *cfg.anneal.fixed_grid;
  } else {
    grid.amplitudes = {0.0, 0.5, 1.0};
    grid.phases_r = {0.0, kPi / 2.0, kPi, 3.0 * kPi / 2.0};
    grid.phases_t = grid.phases_r;
  }
  AnnealConfig greedy = cfg.anneal;
  greedy.fixed_grid = grid;
  greedy.t_init = greedy.t_min;  // T <= T_min: every selection is an argmax

  RngStreams rs(cfg.seed);
  json rows = json::array();
  int within99 = 0;
  int within90 = 0;
  for (int t = 0; t < trials; ++t) {
    const Deployment d = init_deployment(sc, rs.init);
    const ChannelRealization chan = draw_channel(d.swarm, users_centroid(d.users_k), users_centroid(d.users_j), sc,
                                                 rs.fading);
    const OracleResult best = exhaustive_oracle(chan, grid);
    StarRisState start(static_cast<std::size_t>(sc.ris_elements), candidate_at(grid, 0));
    const StarRisState atso = atso_optimize(chan, start, greedy, rs.annealing);
    const double atso_metric = joint_metric(chan, atso);
    const double ratio = best.metric > 0.0 ? atso_metric / best.metric : 1.0;
    within99 += ratio >= 0.99;
    within90 += ratio >= 0.90;
    rows.push_back({{"instance", t}, {"oracle_metric", best.metric}, {"atso_metric", atso_metric}, {"ratio", ratio}});
  }
  const bool pass = trials == 0 || (within99 >= (8 * trials + 9) / 10 && within90 == trials);
  return {{"trials", rows},
          {"summary",
           {{"count", trials}, {"within_99pct", within99}, {"within_90pct", within90}, {"pass", pass}}}};
}

int run_oracle(const OracleOptions &opts) {
  return guarded([&] {
    const std::string start = utc_now();
    const SimConfig cfg = resolve_config(opts.common);
    const json report = oracle_report(cfg, opts.trials);
    const fs::path out = opts.common.out;
    fs::create_directories(out);
    write_text(out / "oracle.json", report.dump(2) + "\n");
    write_manifest(out, "oracle", cfg, start, {"oracle.json"}, {{"trials", opts.trials}});
    return report["summary"]["pass"].get<bool>() ? kExitOk : kExitRuntime;
  });
}

int main_entry(int argc, char **argv) {
  CLI::App app{"STAR-RIS assisted UAV virtual antenna array simulator"};
  app.require_subcommand(1);

  auto add_common = [](CLI::App *cmd, CommonOptions &c, std::optional<std::string> &config,
                       std::optional<std::uint64_t> &seed, std::optional<int> &episodes) {
    cmd->add_option("--config", config, "TOML config file (defaults when omitted)");
    cmd->add_option("--seed", seed, "master seed override");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--episodes", episodes, "episode count override");
  };

  struct Raw {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<int> episodes;
  };
  Raw raw;
  TrainOptions train;
  EvalOptions eval;
  SweepOptions sweep;
  OracleOptions oracle;
  std::string values_text;
  // --dump-* flags are shared by train and eval.
  bool dump_traj = false;
  bool dump_chan = false;

  auto *c_train = app.add_subcommand("train", "train HMCD (or a baseline) and write metrics and checkpoints");
  add_common(c_train, train.common, raw.config, raw.seed, raw.episodes);
  c_train->add_option("--method", train.method, "hmcd | hmcd-noattn | sal | random");
  c_train->add_flag("--dump-trajectories", dump_traj, "write trajectories.jsonl");
  c_train->add_flag("--dump-channels", dump_chan, "write channels.jsonl");

  auto *c_eval = app.add_subcommand("eval", "roll out a frozen checkpoint");
  add_common(c_eval, eval.common, raw.config, raw.seed, raw.episodes);
  c_eval->add_option("--checkpoint", eval.checkpoint, "checkpoint JSON")->required();
  c_eval->add_flag("--dump-trajectories", dump_traj, "write trajectories.jsonl");
  c_eval->add_flag("--dump-channels", dump_chan, "write channels.jsonl");

  auto *c_sweep = app.add_subcommand("sweep", "repeat runs over UAV counts or STAR-RIS sizes");
  add_common(c_sweep, sweep.common, raw.config, raw.seed, raw.episodes);
  c_sweep->add_option("--axis", sweep.axis, "uav_count | ris_elements")->required();
  c_sweep->add_option("--values", values_text, "comma-separated values, e.g. 4,8,16")->required();
  c_sweep->add_option("--method", sweep.method, "hmcd | hmcd-noattn | sal | random");
  c_sweep->add_option("--eval-episodes", sweep.eval_episodes, "evaluation episodes per value");

  auto *c_oracle = app.add_subcommand("oracle", "compare ATSO with exhaustive search on tiny surfaces");
  add_common(c_oracle, oracle.common, raw.config, raw.seed, raw.episodes);
  c_oracle->add_option("--trials", oracle.trials, "number of random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  auto fill = [&raw](CommonOptions &c) {
    if (raw.config) c.config = *raw.config;
    c.seed = raw.seed;
    c.episodes = raw.episodes;
  };
  if (c_train->parsed()) {
    fill(train.common);
    train.dump_trajectories = dump_traj;
    train.dump_channels = dump_chan;
    return run_train(train);
  }
  if (c_eval->parsed()) {
    fill(eval.common);
    eval.dump_trajectories = dump_traj;
    eval.dump_channels = dump_chan;
    return run_eval(eval);
  }
  if (c_sweep->parsed()) {
    fill(sweep.common);
    std::stringstream ss(values_text);
    std::string item;
    try {
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) sweep.values.push_back(std::stoi(item));
      }
    } catch (const std::exception &) {
      std::cerr << "config error [values]: cannot parse --values '" << values_text << "'\n";
      return kExitConfig;
    }
    return run_sweep(sweep);
  }
  fill(oracle.common);
  return run_oracle(oracle);
}

}  // namespace uvaa::cli
