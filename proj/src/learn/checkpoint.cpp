// SPDX-License-Identifier: Apache-2.0

#include "uvaa/learn/checkpoint.hpp"

#include <fstream>

namespace uvaa::learn {

nlohmann::json checkpoint_json(const Masac &learner, const SimConfig &cfg, Method method, int episode) {
  nlohmann::json doc;
  doc["format"] = "uvaa-checkpoint-1";
  doc["config_hash"] = config_hash(cfg);
  doc["method"] = method_name(method);
  doc["episode"] = episode;
  nlohmann::json params = nlohmann::json::object();
  for (const auto &[name, v] : learner.parameters()) {
    const Mat &m = v.value();
    params[name] = {{"rows", m.rows()},
                    {"cols", m.cols()},
                    {"data", std::vector<double>(m.data(), m.data() + m.size())}};
  }
  doc["params"] = std::move(params);
  return doc;
}

void save_checkpoint(const std::filesystem::path &path, const Masac &learner, const SimConfig &cfg, Method method,
                     int episode) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write checkpoint " + path.string());
  os << checkpoint_json(learner, cfg, method, episode).dump() << '\n';
}

namespace {

nlohmann::json read_json(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) throw CheckpointError("cannot open checkpoint " + path.string());
  try {
    return nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception &e) {
    throw CheckpointError("malformed checkpoint " + path.string() + ": " + e.what());
  }
}

CheckpointInfo info_of(const nlohmann::json &doc) {
  try {
    return {doc.at("config_hash").get<std::string>(), parse_method(doc.at("method").get<std::string>()),
            doc.at("episode").get<int>()};
  } catch (const std::exception &e) {
    throw CheckpointError(std::string("malformed checkpoint header: ") + e.what());
  }
}

}  // namespace

CheckpointInfo read_checkpoint_info(const std::filesystem::path &path) { return info_of(read_json(path)); }

CheckpointInfo load_checkpoint(const std::filesystem::path &path, Masac &learner, const SimConfig &cfg) {
  return load_checkpoint(read_json(path), learner, cfg);
}

CheckpointInfo load_checkpoint(const nlohmann::json &doc, Masac &learner, const SimConfig &cfg) {
  const CheckpointInfo info = info_of(doc);
  const std::string expected = config_hash(cfg);
  if (info.config_hash != expected) {
    throw CheckpointError("checkpoint config hash " + info.config_hash + " does not match config hash " + expected);
  }
  const auto &params = doc.at("params");
  for (auto [name, v] : learner.parameters()) {
    if (!params.contains(name)) throw CheckpointError("checkpoint is missing parameter '" + name + "'");
    const auto &p = params.at(name);
    const auto rows = p.at("rows").get<Eigen::Index>();
    const auto cols = p.at("cols").get<Eigen::Index>();
    const auto data = p.at("data").get<std::vector<double>>();
    if (rows != v.rows() || cols != v.cols() || static_cast<Eigen::Index>(data.size()) != rows * cols) {
      throw CheckpointError("checkpoint parameter '" + name + "' has the wrong shape");
    }
    v.value() = Eigen::Map<const Mat>(data.data(), rows, cols);
  }
  return info;
}

}  // namespace uvaa::learn
