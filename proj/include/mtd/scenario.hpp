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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mtd/adversary.hpp"
#include "mtd/detection.hpp"
#include "mtd/estimation.hpp"
#include "mtd/system_model.hpp"

namespace mtd {

// ---------------------------------------------------------------------------
// Example system

struct GeneratorSpec {
  std::uint64_t seed = 1;
  Index n = 15;  // five equal diagonal blocks
  Index l = 7;
  double radius_min = 1.05;
  double radius_max = 1.3;
  double coupling_scale = 0.2;
  double q_scale = 1.0;
  double r_scale = 1.0;
  double r_floor = 1e-3;
  Index max_attempts = 20;
};

struct GeneratedSystem {
  std::vector<LtiPair> pairs;
  NoiseModel noise;
  Index attempts = 1;  // draws needed until every structural check passed
};

/// Upper block-triangular A(j) with nonzero blocks (1,1) (1,2) (2,2) (2,4)
/// (3,3) (3,5) (4,4) (4,5) (5,5), unstable diagonal blocks, and two banks of
/// five block-diagonal sensor rows (m = 10). Redraws with a new sub-seed when
/// a pair is unobservable, a sensor's null space is not shared across
/// models, or the bank cannot be fused.
GeneratedSystem generate_example_system(const GeneratorSpec& spec);

/// Nonzero (row, col) block positions of the generated A, zero-based.
const std::vector<std::pair<Index, Index>>& example_block_pattern();

// ---------------------------------------------------------------------------
// Configuration

enum class Frame { Tracking, Absolute };
enum class OutputFormat { Csv, Jsonl };
enum class AttackKind { None, Omniscient, Guessing, PersistentBias, CrossModel };

const char* to_string(AttackKind kind);

struct SystemSpec {
  bool generated = true;
  GeneratorSpec generator;
  std::vector<LtiPair> pairs;  // explicit source
  NoiseModel noise;            // explicit source
};

struct ScheduleSpec {
  Index period = 0;  // 0 selects 2n
  ScheduleKey key = ScheduleKey::from_integer(1);
};

struct NoiseSpec {
  std::uint64_t seed = 1;
  Frame frame = Frame::Tracking;
};

struct AttackSpec {
  AttackKind kind = AttackKind::None;
  std::vector<Index> sensors;   // zero-based
  std::optional<Vector> x0_star;  // empty selects the dominant mode of A(1)
  double scale = 1.0;             // multiplies x0* or the bias profile
  std::uint64_t seed = 1;
  BiasProfile profile;
  bool restart_each_period = false;
  Index model_in_force = 0;  // cross-model only
  Index attacker_model = 1;  // cross-model only
};

struct EstimatorSpec {
  double epsilon = 1e-6;
};

struct DetectorSpec {
  Index window = 5;
  double alpha = 6.9e-8;
  std::optional<double> gamma;  // overrides alpha when set
  Index central_window = 3;
  double central_alpha = 4.2e-4;
  std::optional<double> central_gamma;
  Index removal_policy = 2;
  bool remove = true;
};

struct OutputSpec {
  std::string dir;
  OutputFormat format = OutputFormat::Csv;
};

struct ScenarioConfig {
  SystemSpec system;
  ScheduleSpec schedule;
  NoiseSpec noise;
  AttackSpec attack;
  EstimatorSpec estimator;
  DetectorSpec detector;
  Index horizon = 0;  // 0 selects 20 periods
  Index trials = 1;
  bool parallel = true;
  OutputSpec output;
};

/// Parses the JSON config schema documented in docs/config.md. Relative
/// matrix file paths resolve against `base_dir`. Throws Error{Config}.
ScenarioConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ScenarioConfig load_config(const std::string& path);

/// Target set and noise model for a config (generates when requested).
struct ResolvedSystem {
  TargetSet targets;
  NoiseModel noise;
};
ResolvedSystem resolve_system(const ScenarioConfig& cfg);

Index effective_period(const ScenarioConfig& cfg, Index n);
Index effective_horizon(const ScenarioConfig& cfg, Index n);

// ---------------------------------------------------------------------------
// Runs

struct StepMetrics {
  Index step = 0;
  Index schedule_index = 0;
  double err_central = 0.0;
  double err_fused = 0.0;
  double trace_P = 0.0;       // trace P_{k|k-1} of the central filter
  double trace_fused = 0.0;   // trace of the fused covariance
  Vector z;                   // local residues, NaN for removed sensors
  Vector stat;                // windowed local statistics, NaN when unavailable
  double central_stat = std::numeric_limits<double>::quiet_NaN();
};

struct RunOptions {
  Exec exec = Exec::Serial;
  bool keep_vectors = false;  // store full error vectors and central residues
};

struct RunReport {
  Index trial = 0;
  std::vector<StepMetrics> steps;
  IdentificationLog log;
  std::vector<Index> attacked;
  double mse_central = 0.0;
  double mse_fused = 0.0;
  std::vector<Index> windows;  // evaluated windows per sensor
  double gamma = 0.0;          // per-sensor threshold in force

  std::vector<Vector> central_errors;  // keep_vectors only
  std::vector<Vector> fused_errors;
  std::vector<Vector> central_residues;

  bool all_attacked_removed() const;
  Index clean_removed() const;
  /// Latest removal step among attacked sensors, if all were removed.
  std::optional<Index> identification_time() const;
};

/// One trial with streams derived from the config seeds and `trial`.
RunReport run_trial(const ScenarioConfig& cfg, const ResolvedSystem& sys, Index trial,
                    const RunOptions& opts = {});

/// run_trial(cfg, resolve_system(cfg), 0).
RunReport run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

struct MonteCarloReport {
  std::vector<RunReport> runs;     // ordered by trial
  std::vector<double> mse_central;  // mean squared error per step over trials
  std::vector<double> mse_fused;
  double identification_rate = 0.0;   // share of trials removing every attacked sensor
  double clean_removal_free_rate = 0.0;
  double tail_ratio = 0.0;  // mean fused / mean central MSE over the last half
};

MonteCarloReport monte_carlo(const ScenarioConfig& cfg, Index trials, Exec exec = Exec::Parallel,
                             bool keep_steps = true);

// ---------------------------------------------------------------------------
// Output

void write_metrics(std::ostream& os, const RunReport& report, OutputFormat format);
void write_events(std::ostream& os, const RunReport& report, OutputFormat format);
void write_summary(std::ostream& os, const MonteCarloReport& mc);

/// Writes metrics/events per trial plus summary.json into `dir`.
void write_outputs(const std::string& dir, const MonteCarloReport& mc, OutputFormat format);

}  // namespace mtd
