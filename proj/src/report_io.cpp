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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "mtd/scenario.hpp"

namespace mtd {
namespace {

using json = nlohmann::json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json num_json(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

json optional_step(const std::optional<Index>& v) { return v ? json(*v) : json(nullptr); }

std::string ext(OutputFormat f) { return f == OutputFormat::Csv ? ".csv" : ".jsonl"; }

}  // namespace

void write_metrics(std::ostream& os, const RunReport& report, OutputFormat format) {
  const Index m = report.steps.empty() ? 0 : report.steps.front().z.size();
  if (format == OutputFormat::Csv) {
    os << "# mtd-metrics v1\n";
    os << "step,schedule_index,err_central,err_fused,trace_P";
    for (Index s = 1; s <= m; ++s) os << ",z_" << s;
    os << '\n';
    for (const auto& sm : report.steps) {
      os << sm.step << ',' << sm.schedule_index + 1 << ',' << num(sm.err_central) << ','
         << num(sm.err_fused) << ',' << num(sm.trace_P);
      for (Index s = 0; s < m; ++s) os << ',' << num(sm.z(s));
      os << '\n';
    }
    return;
  }
  for (const auto& sm : report.steps) {
    json z = json::array();
    for (Index s = 0; s < m; ++s) z.push_back(num_json(sm.z(s)));
    const json row = {{"step", sm.step},
                      {"schedule_index", sm.schedule_index + 1},
                      {"err_central", sm.err_central},
                      {"err_fused", sm.err_fused},
                      {"trace_P", sm.trace_P},
                      {"z", z}};
    os << row.dump() << '\n';
  }
}

void write_events(std::ostream& os, const RunReport& report, OutputFormat format) {
  // Sensor 0 marks system-level events.
  if (format == OutputFormat::Csv) {
    os << "# mtd-events v1\n";
    os << "step,sensor,event\n";
    for (const auto& e : report.log.events) {
      os << e.step << ',' << e.sensor + 1 << ',' << to_string(e.kind) << '\n';
    }
    return;
  }
  for (const auto& e : report.log.events) {
    os << json{{"step", e.step}, {"sensor", e.sensor + 1}, {"event", to_string(e.kind)}}.dump()
       << '\n';
  }
}

void write_summary(std::ostream& os, const MonteCarloReport& mc) {
  json runs = json::array();
  for (const auto& r : mc.runs) {
    json sensors = json::array();
    for (std::size_t s = 0; s < r.log.sensors.size(); ++s) {
      const SensorLog& sl = r.log.sensors[s];
      sensors.push_back({{"sensor", s + 1},
                         {"alarms", sl.alarms},
                         {"windows", r.windows[s]},
                         {"first_alarm", optional_step(sl.first_alarm)},
                         {"removal", optional_step(sl.removal)}});
    }
    json attacked = json::array();
    for (Index s : r.attacked) attacked.push_back(s + 1);
    runs.push_back({{"trial", r.trial},
                    {"mse_central", num_json(r.mse_central)},
                    {"mse_fused", num_json(r.mse_fused)},
                    {"attacked", attacked},
                    {"first_central_alarm", optional_step(r.log.first_central_alarm)},
                    {"identification_time", optional_step(r.identification_time())},
                    {"clean_removed", r.clean_removed()},
                    {"sensors", sensors}});
  }
  const json out = {{"schema", "mtd-summary v1"},
                    {"trials", mc.runs.size()},
                    {"identification_rate", mc.identification_rate},
                    {"clean_removal_free_rate", mc.clean_removal_free_rate},
                    {"tail_mse_ratio", num_json(mc.tail_ratio)},
                    {"runs", runs}};
  os << out.dump(2) << '\n';
}

void write_outputs(const std::string& dir, const MonteCarloReport& mc, OutputFormat format) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    require(static_cast<bool>(f), ErrorKind::Config, "cannot write " + name + " in " + dir);
    return f;
  };
  const bool single = mc.runs.size() == 1;
  for (const auto& r : mc.runs) {
    const std::string suffix = single ? "" : "_trial" + std::to_string(r.trial + 1);
    auto metrics = open("metrics" + suffix + ext(format));
    write_metrics(metrics, r, format);
    auto events = open("events" + suffix + ext(format));
    write_events(events, r, format);
  }
  auto summary = open("summary.json");
  write_summary(summary, mc);
}

}  // namespace mtd
