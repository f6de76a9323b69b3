// Copyright 2026 The mtd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mtd/matrix_io.hpp"
#include "mtd/scenario.hpp"

namespace mtd {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::Config, what); }

void allow_only(const json& obj, const std::string& where, std::set<std::string> keys) {
  if (!obj.is_object()) config_error(where + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (keys.count(k) == 0) config_error(where + ": unknown key '" + k + "'");
  }
}

Matrix matrix_from(const json& j, const std::string& where, const fs::path& base) {
  if (j.is_string()) {
    const fs::path p = fs::path(j.get<std::string>());
    return io::read_matrix_file((p.is_absolute() ? p : base / p).string());
  }
  if (!j.is_array() || j.empty()) config_error(where + ": expected a nonempty array of rows");
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      config_error(where + ": ragged matrix rows");
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

Vector vector_from(const json& j, const std::string& where) {
  if (!j.is_array()) config_error(where + ": expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
  return v;
}

ScheduleKey key_from(const json& j) {
  if (j.is_string()) return ScheduleKey::from_hex(j.get<std::string>());
  if (j.is_number_unsigned() || j.is_number_integer()) {
    return ScheduleKey::from_integer(j.get<std::uint64_t>());
  }
  config_error("schedule.seed: expected an integer or a 64-digit hex string");
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void parse_system(const json& j, SystemSpec& s, const fs::path& base) {
  allow_only(j, "system", {"source", "seed", "n", "l", "radius_min", "radius_max",
                           "coupling_scale", "q_scale", "r_scale", "r_floor", "max_attempts",
                           "pairs", "Q", "R", "x0_mean", "P0"});
  const std::string source = j.value("source", "generated");
  if (source == "generated") {
    s.generated = true;
    GeneratorSpec& g = s.generator;
    read(j, "seed", g.seed);
    read(j, "n", g.n);
    read(j, "l", g.l);
    read(j, "radius_min", g.radius_min);
    read(j, "radius_max", g.radius_max);
    read(j, "coupling_scale", g.coupling_scale);
    read(j, "q_scale", g.q_scale);
    read(j, "r_scale", g.r_scale);
    read(j, "r_floor", g.r_floor);
    read(j, "max_attempts", g.max_attempts);
    return;
  }
  if (source != "explicit") config_error("system.source: expected 'generated' or 'explicit'");
  s.generated = false;
  if (!j.contains("pairs") || !j.at("pairs").is_array() || j.at("pairs").empty()) {
    config_error("system.pairs: explicit systems need at least one {A, C} pair");
  }
  for (std::size_t i = 0; i < j.at("pairs").size(); ++i) {
    const json& p = j.at("pairs")[i];
    const std::string where = "system.pairs[" + std::to_string(i + 1) + "]";
    allow_only(p, where, {"A", "C"});
    if (!p.contains("A") || !p.contains("C")) config_error(where + ": needs A and C");
    s.pairs.emplace_back(matrix_from(p.at("A"), where + ".A", base),
                         matrix_from(p.at("C"), where + ".C", base));
  }
  const Index n = s.pairs.front().n();
  const Index m = s.pairs.front().m();
  for (const char* key : {"Q", "R"}) {
    if (!j.contains(key)) config_error(std::string("system.") + key + ": required");
  }
  s.noise.Q = matrix_from(j.at("Q"), "system.Q", base);
  s.noise.R = matrix_from(j.at("R"), "system.R", base);
  s.noise.x0_mean = j.contains("x0_mean") ? vector_from(j.at("x0_mean"), "system.x0_mean")
                                          : Vector::Zero(n);
  s.noise.P0 = j.contains("P0") ? matrix_from(j.at("P0"), "system.P0", base)
                                : Matrix::Identity(n, n);
  s.noise.validate(n, m);
}

AttackKind attack_kind(const std::string& s) {
  if (s == "none") return AttackKind::None;
  if (s == "omniscient") return AttackKind::Omniscient;
  if (s == "guessing") return AttackKind::Guessing;
  if (s == "persistent_bias") return AttackKind::PersistentBias;
  if (s == "cross_model") return AttackKind::CrossModel;
  config_error("attack.kind: unknown attack '" + s + "'");
}

Index one_based(const json& j, const std::string& where) {
  const auto v = j.get<long long>();
  if (v < 1) config_error(where + ": indices are one-based");
  return static_cast<Index>(v - 1);
}

void parse_attack(const json& j, AttackSpec& a) {
  allow_only(j, "attack", {"kind", "sensors", "x0star", "scale", "seed", "profile",
                           "restart_each_period", "models"});
  a.kind = attack_kind(j.value("kind", "none"));
  if (j.contains("sensors")) {
    for (const auto& s : j.at("sensors")) a.sensors.push_back(one_based(s, "attack.sensors"));
  }
  if (j.contains("x0star")) {
    const json& x = j.at("x0star");
    if (x.is_string()) {
      if (x.get<std::string>() != "dominant") config_error("attack.x0star: expected 'dominant'");
    } else {
      a.x0_star = vector_from(x, "attack.x0star");
    }
  }
  read(j, "scale", a.scale);
  read(j, "seed", a.seed);
  read(j, "restart_each_period", a.restart_each_period);
  if (j.contains("profile")) {
    const json& p = j.at("profile");
    allow_only(p, "attack.profile", {"constant", "ramp"});
    read(p, "constant", a.profile.constant);
    read(p, "ramp", a.profile.ramp);
  }
  if (j.contains("models")) {
    const json& m = j.at("models");
    if (!m.is_array() || m.size() != 2) config_error("attack.models: expected two indices");
    a.model_in_force = one_based(m[0], "attack.models");
    a.attacker_model = one_based(m[1], "attack.models");
  }
  if (a.kind != AttackKind::None && a.sensors.empty()) {
    config_error("attack.sensors: an attack needs at least one sensor");
  }
}

void parse_detector(const json& j, DetectorSpec& d) {
  allow_only(j, "detector", {"window", "alpha", "gamma", "central_window", "central_alpha",
                             "central_gamma", "removal_policy", "remove"});
  read(j, "window", d.window);
  read(j, "alpha", d.alpha);
  if (j.contains("gamma") && !j.at("gamma").is_null()) d.gamma = j.at("gamma").get<double>();
  read(j, "central_window", d.central_window);
  read(j, "central_alpha", d.central_alpha);
  if (j.contains("central_gamma") && !j.at("central_gamma").is_null()) {
    d.central_gamma = j.at("central_gamma").get<double>();
  }
  read(j, "removal_policy", d.removal_policy);
  read(j, "remove", d.remove);
  if (d.window < 1 || d.central_window < 1) config_error("detector: windows must be >= 1");
  if (d.removal_policy < 1) config_error("detector.removal_policy: must be >= 1");
  if (!d.gamma && !(d.alpha > 0.0 && d.alpha < 1.0)) config_error("detector.alpha: need 0<a<1");
  if (!d.central_gamma && !(d.central_alpha > 0.0 && d.central_alpha < 1.0)) {
    config_error("detector.central_alpha: need 0 < alpha < 1");
  }
}

}  // namespace

const char* to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::None: return "none";
    case AttackKind::Omniscient: return "omniscient";
    case AttackKind::Guessing: return "guessing";
    case AttackKind::PersistentBias: return "persistent_bias";
    case AttackKind::CrossModel: return "cross_model";
  }
  return "unknown";
}

ScenarioConfig parse_config(const std::string& text, const std::string& base_dir) {
  ScenarioConfig cfg;
  try {
    const json j = json::parse(text);
    allow_only(j, "config", {"system", "schedule", "noise", "attack", "estimator", "detector",
                             "horizon", "trials", "parallel", "output"});
    if (j.contains("system")) parse_system(j.at("system"), cfg.system, fs::path(base_dir));
    if (j.contains("schedule")) {
      const json& s = j.at("schedule");
      allow_only(s, "schedule", {"period", "seed"});
      read(s, "period", cfg.schedule.period);
      if (s.contains("seed")) cfg.schedule.key = key_from(s.at("seed"));
      if (cfg.schedule.period < 0) config_error("schedule.period: must be >= 1 (0 = 2n)");
    }
    if (j.contains("noise")) {
      const json& s = j.at("noise");
      allow_only(s, "noise", {"seed", "frame"});
      read(s, "seed", cfg.noise.seed);
      const std::string frame = s.value("frame", "tracking");
      if (frame == "tracking") {
        cfg.noise.frame = Frame::Tracking;
      } else if (frame == "absolute") {
        cfg.noise.frame = Frame::Absolute;
      } else {
        config_error("noise.frame: expected 'tracking' or 'absolute'");
      }
    }
    if (j.contains("attack")) parse_attack(j.at("attack"), cfg.attack);
    if (j.contains("estimator")) {
      const json& s = j.at("estimator");
      allow_only(s, "estimator", {"epsilon"});
      read(s, "epsilon", cfg.estimator.epsilon);
      if (!(cfg.estimator.epsilon > 0.0)) config_error("estimator.epsilon: must be positive");
    }
    if (j.contains("detector")) parse_detector(j.at("detector"), cfg.detector);
    read(j, "horizon", cfg.horizon);
    read(j, "trials", cfg.trials);
    read(j, "parallel", cfg.parallel);
    if (cfg.horizon < 0) config_error("horizon: must be >= 1 (0 = 20 periods)");
    if (cfg.trials < 1) config_error("trials: must be >= 1");
    if (j.contains("output")) {
      const json& s = j.at("output");
      allow_only(s, "output", {"dir", "format"});
      read(s, "dir", cfg.output.dir);
      const std::string format = s.value("format", "csv");
      if (format == "csv") {
        cfg.output.format = OutputFormat::Csv;
      } else if (format == "jsonl") {
        cfg.output.format = OutputFormat::Jsonl;
      } else {
        config_error("output.format: expected 'csv' or 'jsonl'");
      }
    }
  } catch (const json::exception& e) {
    config_error(std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    config_error(std::string("config: ") + e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("config: cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  const fs::path parent = fs::path(path).parent_path();
  return parse_config(text.str(), parent.empty() ? "." : parent.string());
}

}  // namespace mtd
